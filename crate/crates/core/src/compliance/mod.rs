//! PDF accessibility compliance: checker reports scored on five criteria,
//! creator metadata canonicalized to typesetting-software clusters, and the
//! aggregate tables and statistics over a corpus.

mod report;
mod software;

use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

pub use report::{
    parse_report, rule_criterion, rule_status, NormalizedReport, ParsedReport, ReportStatus, RuleOutcome,
    REPORT_SCHEMA_VERSION,
};
pub use software::{canonicalize_creator, Cluster, SoftwareMapping};

use crate::error::StatsError;
use crate::stats::{anova_f, kruskal_wallis_h, pearson_r, StatResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    AltText,
    TableHeaders,
    TaggedPdf,
    DefaultLanguage,
    TabOrder,
}

impl Criterion {
    pub const ALL: [Criterion; 5] = [
        Criterion::AltText,
        Criterion::TableHeaders,
        Criterion::TaggedPdf,
        Criterion::DefaultLanguage,
        Criterion::TabOrder,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Criterion::AltText => "Alt-text",
            Criterion::TableHeaders => "Table headers",
            Criterion::TaggedPdf => "Tagged PDF",
            Criterion::DefaultLanguage => "Default language",
            Criterion::TabOrder => "Tab order",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Passed,
    #[default]
    Failed,
    NeedsManualCheck,
}

/// Outcome of all five criteria for one PDF.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionSet {
    pub alt_text: CheckStatus,
    pub table_headers: CheckStatus,
    pub tagged_pdf: CheckStatus,
    pub default_language: CheckStatus,
    pub tab_order: CheckStatus,
}

impl CriterionSet {
    /// Passed for the listed criteria, Failed for the rest.
    pub fn passing(passed: &[Criterion]) -> Self {
        let mut set = Self::default();
        for &c in passed {
            set.set(c, CheckStatus::Passed);
        }
        set
    }

    pub fn get(&self, c: Criterion) -> CheckStatus {
        match c {
            Criterion::AltText => self.alt_text,
            Criterion::TableHeaders => self.table_headers,
            Criterion::TaggedPdf => self.tagged_pdf,
            Criterion::DefaultLanguage => self.default_language,
            Criterion::TabOrder => self.tab_order,
        }
    }

    pub fn set(&mut self, c: Criterion, status: CheckStatus) {
        let slot = match c {
            Criterion::AltText => &mut self.alt_text,
            Criterion::TableHeaders => &mut self.table_headers,
            Criterion::TaggedPdf => &mut self.tagged_pdf,
            Criterion::DefaultLanguage => &mut self.default_language,
            Criterion::TabOrder => &mut self.tab_order,
        };
        *slot = status;
    }

    pub fn passed(&self, c: Criterion) -> bool {
        self.get(c) == CheckStatus::Passed
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplianceRecord {
    pub paper_id: String,
    pub year: Option<i32>,
    pub field_of_study: String,
    pub criteria: CriterionSet,
    /// xmp creator tool, docinfo creator tool and producer, in that order.
    pub creator_raw: Vec<String>,
    pub software_cluster: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplianceScore {
    /// Number of criteria passed, 0 to 5.
    pub total: u8,
    /// total / 5.
    pub normalized: f64,
    /// All five criteria passed.
    pub adobe5: bool,
}

/// Total, normalized total and the all-five indicator. Manual checks count
/// as not passed.
pub fn score(criteria: &CriterionSet) -> ComplianceScore {
    let total = Criterion::ALL.iter().filter(|&&c| criteria.passed(c)).count() as u8;
    ComplianceScore {
        total,
        normalized: f64::from(total) / 5.0,
        adobe5: total == 5,
    }
}

/// One row of the metadata CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperMetadata {
    pub paper_id: String,
    #[serde(default)]
    pub year: Option<i32>,
    #[serde(default)]
    pub field_of_study: String,
    #[serde(default)]
    pub xmp_creator_tool: String,
    #[serde(default)]
    pub docinfo_creator_tool: String,
    #[serde(default)]
    pub producer: String,
}

impl PaperMetadata {
    pub fn creator_values(&self) -> Vec<String> {
        vec![
            self.xmp_creator_tool.clone(),
            self.docinfo_creator_tool.clone(),
            self.producer.clone(),
        ]
    }
}

pub fn read_metadata<R: Read>(reader: R) -> Result<Vec<PaperMetadata>, csv::Error> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader)
        .deserialize()
        .collect()
}

/// Joins a parsed report with its metadata row (when there is one).
pub fn build_record(
    paper_id: &str,
    criteria: CriterionSet,
    metadata: Option<&PaperMetadata>,
    mapping: &SoftwareMapping,
) -> ComplianceRecord {
    let creator_raw = metadata.map(PaperMetadata::creator_values).unwrap_or_default();
    ComplianceRecord {
        paper_id: paper_id.to_string(),
        year: metadata.and_then(|m| m.year),
        field_of_study: metadata
            .map(|m| m.field_of_study.trim())
            .filter(|f| !f.is_empty())
            .unwrap_or("Unknown")
            .to_string(),
        software_cluster: mapping.canonicalize(&creator_raw),
        creator_raw,
        criteria,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupBy {
    All,
    Year,
    FieldOfStudy,
    SoftwareCluster,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub group: String,
    pub n: usize,
    pub passed: BTreeMap<Criterion, usize>,
    pub rates: BTreeMap<Criterion, f64>,
    pub mean_normalized: f64,
    pub adobe5_count: usize,
    pub adobe5_rate: f64,
}

fn group_key(r: &ComplianceRecord, by: GroupBy) -> String {
    match by {
        GroupBy::All => "All".to_string(),
        GroupBy::Year => r.year.map_or_else(|| "Unknown".to_string(), |y| y.to_string()),
        GroupBy::FieldOfStudy => r.field_of_study.clone(),
        GroupBy::SoftwareCluster => r.software_cluster.clone(),
    }
}

/// Per-group criterion pass rates, mean normalized compliance and the
/// all-five rate. Years sort numerically, software clusters in mapping
/// order, everything else alphabetically; "Unknown" and "Other" go last.
pub fn aggregate(
    records: &[ComplianceRecord],
    by: GroupBy,
    mapping: &SoftwareMapping,
) -> Result<Vec<AggregateRow>, StatsError> {
    if records.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let mut groups: BTreeMap<String, Vec<&ComplianceRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(group_key(r, by)).or_default().push(r);
    }
    let mut rows: Vec<AggregateRow> = groups
        .into_iter()
        .map(|(group, members)| {
            let n = members.len();
            let mut passed = BTreeMap::new();
            let mut rates = BTreeMap::new();
            for c in Criterion::ALL {
                let k = members.iter().filter(|r| r.criteria.passed(c)).count();
                passed.insert(c, k);
                rates.insert(c, k as f64 / n as f64);
            }
            let scores: Vec<ComplianceScore> = members.iter().map(|r| score(&r.criteria)).collect();
            let adobe5_count = scores.iter().filter(|s| s.adobe5).count();
            AggregateRow {
                group,
                n,
                passed,
                rates,
                mean_normalized: scores.iter().map(|s| s.normalized).sum::<f64>() / n as f64,
                adobe5_count,
                adobe5_rate: adobe5_count as f64 / n as f64,
            }
        })
        .collect();
    let names = mapping.cluster_names();
    rows.sort_by_key(|row| {
        let g = row.group.as_str();
        let last = g == "Unknown" || g == mapping.other;
        let (rank, num) = match by {
            GroupBy::Year => (0, g.parse::<i64>().unwrap_or(i64::MAX)),
            GroupBy::SoftwareCluster => (names.iter().position(|n| *n == g).unwrap_or(names.len()), 0),
            _ => (0, 0),
        };
        (last, rank, num, g.to_string())
    });
    Ok(rows)
}

/// Aggregate rows as CSV: group, n, one pass-rate column per criterion, mean
/// normalized compliance and the all-five count and rate. Rates are
/// fractions with four decimals.
pub fn aggregate_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::from("group,n");
    for c in Criterion::ALL {
        out.push_str(&format!(
            ",{}_rate",
            serde_json::to_value(c)
                .expect("criterion serializes")
                .as_str()
                .unwrap_or_default()
        ));
    }
    out.push_str(",mean_normalized,adobe5_count,adobe5_rate\n");
    for r in rows {
        let group = if r.group.contains([',', '"']) {
            format!("\"{}\"", r.group.replace('"', "\"\""))
        } else {
            r.group.clone()
        };
        out.push_str(&format!("{group},{}", r.n));
        for c in Criterion::ALL {
            out.push_str(&format!(",{:.4}", r.rates.get(&c).copied().unwrap_or(0.0)));
        }
        out.push_str(&format!(
            ",{:.4},{},{:.4}\n",
            r.mean_normalized, r.adobe5_count, r.adobe5_rate
        ));
    }
    out
}

/// Histogram as CSV with one row per total score.
pub fn histogram_csv(h: &[usize; 6]) -> String {
    let mut out = String::from("total,count\n");
    for (total, count) in h.iter().enumerate() {
        out.push_str(&format!("{total},{count}\n"));
    }
    out
}

/// Number of records at each total compliance score 0 to 5.
pub fn histogram(records: &[ComplianceRecord]) -> [usize; 6] {
    let mut h = [0; 6];
    for r in records {
        h[usize::from(score(&r.criteria).total)] += 1;
    }
    h
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionRow {
    pub label: String,
    pub count: usize,
    /// Percentage of the corpus, 0 to 100.
    pub percent: f64,
}

/// Share of papers meeting each criterion and all five together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionTable {
    pub n: usize,
    pub rows: Vec<CriterionRow>,
    pub adobe5: CriterionRow,
}

pub fn criterion_table(records: &[ComplianceRecord]) -> Result<CriterionTable, StatsError> {
    if records.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let n = records.len();
    let row = |label: &str, count: usize| CriterionRow {
        label: label.to_string(),
        count,
        percent: 100.0 * count as f64 / n as f64,
    };
    let rows = Criterion::ALL
        .iter()
        .map(|&c| row(c.label(), records.iter().filter(|r| r.criteria.passed(c)).count()))
        .collect();
    let adobe5 = row(
        "Adobe-5 Compliance",
        records.iter().filter(|r| score(&r.criteria).adobe5).count(),
    );
    Ok(CriterionTable { n, rows, adobe5 })
}

impl CriterionTable {
    /// CSV with one row per criterion and the all-five row last;
    /// percentages to one decimal place.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("criterion,count,percent\n");
        for r in self.rows.iter().chain(std::iter::once(&self.adobe5)) {
            out.push_str(&format!("{},{},{:.1}%\n", r.label, r.count, r.percent));
        }
        out
    }
}

/// Paper count per software cluster in mapping order, Other last.
pub fn software_distribution(records: &[ComplianceRecord], mapping: &SoftwareMapping) -> Vec<CriterionRow> {
    let n = records.len().max(1);
    mapping
        .cluster_names()
        .into_iter()
        .map(|name| {
            let count = records.iter().filter(|r| r.software_cluster == name).count();
            CriterionRow {
                label: name.to_string(),
                count,
                percent: 100.0 * count as f64 / n as f64,
            }
        })
        .collect()
}

/// Results of the three corpus-level tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    /// Group names for the ANOVA and Kruskal-Wallis tests.
    pub groups: Vec<String>,
    pub anova: Option<StatResult>,
    pub kruskal_wallis: Option<StatResult>,
    /// Per field: share of Word-typeset papers against mean normalized
    /// compliance.
    pub word_share_vs_compliance: Option<StatResult>,
    pub fields: Vec<FieldPoint>,
    /// Why a statistic is missing, when one is.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldPoint {
    pub field: String,
    pub n: usize,
    pub word_share: f64,
    pub mean_normalized: f64,
}

/// Total compliance per software cluster (Other only when requested).
pub fn cluster_groups(
    records: &[ComplianceRecord],
    mapping: &SoftwareMapping,
    include_other: bool,
) -> Vec<(String, Vec<f64>)> {
    mapping
        .cluster_names()
        .into_iter()
        .filter(|name| include_other || *name != mapping.other)
        .map(|name| {
            let values: Vec<f64> = records
                .iter()
                .filter(|r| r.software_cluster == name)
                .map(|r| f64::from(score(&r.criteria).total))
                .collect();
            (name.to_string(), values)
        })
        .filter(|(_, v)| !v.is_empty())
        .collect()
}

/// ANOVA and Kruskal-Wallis across software clusters, and the correlation
/// between Word usage and compliance across fields of study.
pub fn corpus_stats(
    records: &[ComplianceRecord],
    mapping: &SoftwareMapping,
    include_other: bool,
    word_cluster: &str,
) -> CorpusStats {
    let groups = cluster_groups(records, mapping, include_other);
    let values: Vec<Vec<f64>> = groups.iter().map(|(_, v)| v.clone()).collect();
    let fields: Vec<FieldPoint> = aggregate(records, GroupBy::FieldOfStudy, mapping)
        .unwrap_or_default()
        .into_iter()
        .map(|row| {
            let word = records
                .iter()
                .filter(|r| r.field_of_study == row.group && r.software_cluster == word_cluster)
                .count();
            FieldPoint {
                word_share: word as f64 / row.n as f64,
                field: row.group,
                n: row.n,
                mean_normalized: row.mean_normalized,
            }
        })
        .collect();
    let xs: Vec<f64> = fields.iter().map(|f| f.word_share).collect();
    let ys: Vec<f64> = fields.iter().map(|f| f.mean_normalized).collect();
    let mut notes = Vec::new();
    let mut keep = |name: &str, r: Result<StatResult, StatsError>| match r {
        Ok(v) => Some(v),
        Err(e) => {
            notes.push(format!("{name}: {e}"));
            None
        }
    };
    let anova = keep("anova", anova_f(&values));
    let kruskal_wallis = keep("kruskal_wallis", kruskal_wallis_h(&values));
    let word_share_vs_compliance = keep("word_share_vs_compliance", pearson_r(&xs, &ys));
    CorpusStats {
        groups: groups.into_iter().map(|(g, _)| g).collect(),
        anova,
        kruskal_wallis,
        word_share_vs_compliance,
        fields,
        notes,
    }
}
