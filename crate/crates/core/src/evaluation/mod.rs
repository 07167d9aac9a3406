//! Render-quality evaluation: annotator rubric records, their aggregation
//! into per-element error distributions and readability by field, and the
//! inter-rater agreement statistics.

mod aggregate;
mod agreement;
mod record;

pub use aggregate::{
    aggregate_errors, bibliography_bucket, citation_bucket, object_bucket, readability_by_field, select_primary,
    text_bucket, DistributionRow, DistributionSection, ErrorTable, PrimaryAnnotator, PrimarySelection, ReadabilityRow,
    ReadabilityTable,
};
pub use agreement::{
    agreement_csv, agreement_suite, cohens_kappa, icc, mean_difference, pair_records, percent_agreement,
    AgreementMetric, AgreementResult, AgreementRow,
};
pub use record::{
    load_records_dir, read_records_csv, read_records_dir, validate_record, write_records_csv, write_records_dir,
    BibliographyGrade, CitationGrade, EvaluationRecord, MetadataGrade, Readability, RecordFile, RECORD_SCHEMA_VERSION,
};
