//! Inter-rater agreement between two annotators.
//!
//! ICC is the two-way random-effects, absolute-agreement, single-rater form
//! ICC(A,1). For n items rated by k = 2 raters with grand mean m, row (item)
//! means r_i and column (rater) means c_j:
//!
//! ```text
//! MSR = k Σ (r_i − m)² / (n − 1)
//! MSC = n Σ (c_j − m)² / (k − 1)
//! MSE = (SST − SSR − SSC) / ((n − 1)(k − 1))
//! ICC = (MSR − MSE) / (MSR + (k − 1) MSE + k (MSC − MSE) / n)
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::aggregate::{bibliography_bucket, citation_bucket};
use super::record::EvaluationRecord;
use crate::error::{EvaluationError, StatsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgreementMetric {
    PercentAgreement,
    CohensKappa,
    Icc,
    MeanDifference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementResult {
    pub metric: AgreementMetric,
    pub value: f64,
    /// Standard deviation, for the mean difference only.
    pub sd: Option<f64>,
    pub n_items: usize,
    /// Set when the statistic is undefined for the input and `value` is the
    /// conventional stand-in.
    #[serde(default)]
    pub degenerate: bool,
}

fn check_lengths(a: usize, b: usize) -> Result<(), StatsError> {
    if a != b {
        return Err(StatsError::LengthMismatch(a, b));
    }
    if a == 0 {
        return Err(StatsError::EmptyInput);
    }
    Ok(())
}

/// Proportion of items with identical values.
pub fn percent_agreement<T: PartialEq>(a: &[T], b: &[T]) -> Result<AgreementResult, StatsError> {
    check_lengths(a.len(), b.len())?;
    let same = a.iter().zip(b).filter(|(x, y)| x == y).count();
    Ok(AgreementResult {
        metric: AgreementMetric::PercentAgreement,
        value: same as f64 / a.len() as f64,
        sd: None,
        n_items: a.len(),
        degenerate: false,
    })
}

/// Cohen's kappa for labels in `0..classes`. When chance agreement is 1 (both
/// raters used one and the same class throughout) kappa is undefined; the
/// result is flagged degenerate and carries the observed agreement.
pub fn cohens_kappa(a: &[usize], b: &[usize], classes: usize) -> Result<AgreementResult, StatsError> {
    check_lengths(a.len(), b.len())?;
    if let Some(&bad) = a.iter().chain(b).find(|&&l| l >= classes) {
        return Err(StatsError::DegenerateInput(format!("label {bad} outside 0..{classes}")));
    }
    let n = a.len() as f64;
    let mut row = vec![0usize; classes];
    let mut col = vec![0usize; classes];
    let mut same = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        row[x] += 1;
        col[y] += 1;
        same += usize::from(x == y);
    }
    let p_o = same as f64 / n;
    let p_e: f64 = row
        .iter()
        .zip(&col)
        .map(|(&r, &c)| (r as f64 / n) * (c as f64 / n))
        .sum();
    let degenerate = (1.0 - p_e).abs() < 1e-12;
    Ok(AgreementResult {
        metric: AgreementMetric::CohensKappa,
        value: if degenerate { p_o } else { (p_o - p_e) / (1.0 - p_e) },
        sd: None,
        n_items: a.len(),
        degenerate,
    })
}

/// ICC(A,1) for two raters; see the module docs for the formulas.
pub fn icc(a: &[f64], b: &[f64]) -> Result<AgreementResult, StatsError> {
    check_lengths(a.len(), b.len())?;
    if a.len() < 2 {
        return Err(StatsError::DegenerateInput("ICC needs at least two items".into()));
    }
    let n = a.len() as f64;
    let k = 2.0;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let m = (mean_a + mean_b) / 2.0;
    let sst: f64 = a.iter().chain(b).map(|x| (x - m).powi(2)).sum();
    if sst <= 1e-24 * a.iter().chain(b).map(|x| x * x).sum::<f64>().max(f64::MIN_POSITIVE) {
        return Err(StatsError::DegenerateInput("zero total variance".into()));
    }
    let ssr: f64 = k * a.iter().zip(b).map(|(x, y)| ((x + y) / 2.0 - m).powi(2)).sum::<f64>();
    let ssc = n * ((mean_a - m).powi(2) + (mean_b - m).powi(2));
    let sse = (sst - ssr - ssc).max(0.0);
    let msr = ssr / (n - 1.0);
    let msc = ssc / (k - 1.0);
    let mse = sse / ((n - 1.0) * (k - 1.0));
    let value = (msr - mse) / (msr + (k - 1.0) * mse + k * (msc - mse) / n);
    Ok(AgreementResult {
        metric: AgreementMetric::Icc,
        value,
        sd: None,
        n_items: a.len(),
        degenerate: false,
    })
}

/// Mean and population standard deviation of |a_i − b_i|.
pub fn mean_difference(a: &[f64], b: &[f64]) -> Result<AgreementResult, StatsError> {
    check_lengths(a.len(), b.len())?;
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect();
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    Ok(AgreementResult {
        metric: AgreementMetric::MeanDifference,
        value: mean,
        sd: Some(var.sqrt()),
        n_items: d.len(),
        degenerate: false,
    })
}

/// One row of the agreement table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementRow {
    pub criterion: String,
    /// Number of answer classes, for categorical questions.
    pub classes: Option<usize>,
    pub agreement: AgreementResult,
    pub kappa: Option<AgreementResult>,
    pub icc: Option<AgreementResult>,
    pub mean_difference: Option<AgreementResult>,
    /// Why a statistic is missing, when it is.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

type Categorical = fn(&EvaluationRecord) -> Option<usize>;
type Numeric = fn(&EvaluationRecord) -> Option<u32>;

const CATEGORICAL: [(&str, usize, Categorical); 6] = [
    ("Title", 3, |r| r.title_ok.map(|g| g as usize)),
    ("Authors", 3, |r| r.authors_ok.map(|g| g as usize)),
    ("Abstract", 3, |r| r.abstract_ok.map(|g| g as usize)),
    ("Bibliography extraction", 4, |r| {
        r.bibliography_grade.map(|g| bibliography_bucket(Some(g)) - 1)
    }),
    ("Inline citation linking", 4, |r| {
        r.inline_citation_grade.map(|g| citation_bucket(Some(g)) - 1)
    }),
    ("Overall score", 3, |r| r.readability.map(|g| g as usize)),
];

const NUMERIC: [(&str, Numeric); 9] = [
    ("Number of figures", |r| r.figures_present),
    ("Figure extraction errors", EvaluationRecord::figure_errors),
    ("Figure caption errors", EvaluationRecord::figure_caption_errors),
    ("Number of tables", |r| r.tables_present),
    ("Table extraction errors", EvaluationRecord::table_errors),
    ("Table caption errors", EvaluationRecord::table_caption_errors),
    ("Header/footer/footnote errors", |r| r.header_footer_errors),
    ("Section heading errors", |r| r.section_heading_errors),
    ("Body paragraph errors", |r| r.missing_paragraphs),
];

/// Pairs records of the two annotators by paper id, skipping papers either
/// annotator skipped. When an annotator has several records for one paper
/// the one with the smallest annotator id is used.
pub fn pair_records<'a>(
    a: &'a [EvaluationRecord],
    b: &'a [EvaluationRecord],
) -> Vec<(&'a EvaluationRecord, &'a EvaluationRecord)> {
    let index = |rs: &'a [EvaluationRecord]| {
        let mut m: BTreeMap<&'a str, &'a EvaluationRecord> = BTreeMap::new();
        for r in rs.iter().filter(|r| !r.is_skipped()) {
            m.entry(r.paper_id.as_str())
                .and_modify(|e| {
                    if r.annotator_id < e.annotator_id {
                        *e = r;
                    }
                })
                .or_insert(r);
        }
        m
    };
    let ia = index(a);
    let ib = index(b);
    ia.iter()
        .filter_map(|(paper, ra)| Some((*ra, *ib.get(paper)?)))
        .collect()
}

/// The full agreement table over the papers both annotators graded:
/// observed agreement and Cohen's kappa for categorical questions, exact-match
/// agreement, ICC and mean absolute difference for counts. Items missing an
/// answer from either annotator are left out of that row.
pub fn agreement_suite(a: &[EvaluationRecord], b: &[EvaluationRecord]) -> Result<Vec<AgreementRow>, EvaluationError> {
    let pairs = pair_records(a, b);
    if pairs.is_empty() {
        return Err(EvaluationError::NoOverlap);
    }
    let mut rows = Vec::new();
    for (name, classes, get) in CATEGORICAL {
        let (xa, xb): (Vec<usize>, Vec<usize>) = pairs.iter().filter_map(|(ra, rb)| Some((get(ra)?, get(rb)?))).unzip();
        if xa.is_empty() {
            continue;
        }
        rows.push(AgreementRow {
            criterion: name.to_string(),
            classes: Some(classes),
            agreement: percent_agreement(&xa, &xb)?,
            kappa: Some(cohens_kappa(&xa, &xb, classes)?),
            icc: None,
            mean_difference: None,
            notes: Vec::new(),
        });
    }
    for (name, get) in NUMERIC {
        let (xa, xb): (Vec<f64>, Vec<f64>) = pairs
            .iter()
            .filter_map(|(ra, rb)| Some((f64::from(get(ra)?), f64::from(get(rb)?))))
            .unzip();
        if xa.is_empty() {
            continue;
        }
        let mut notes = Vec::new();
        let icc = match icc(&xa, &xb) {
            Ok(r) => Some(r),
            Err(e) => {
                notes.push(format!("ICC: {e}"));
                None
            }
        };
        rows.push(AgreementRow {
            criterion: name.to_string(),
            classes: None,
            agreement: percent_agreement(&xa, &xb)?,
            kappa: None,
            icc,
            mean_difference: Some(mean_difference(&xa, &xb)?),
            notes,
        });
    }
    Ok(rows)
}

/// Agreement table as CSV with two-decimal cells and "-" for statistics that
/// do not apply.
pub fn agreement_csv(rows: &[AgreementRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "criterion",
        "classes",
        "n",
        "agreement",
        "kappa",
        "icc",
        "mean_difference",
    ])
    .expect("in-memory csv write");
    let fmt = |r: &Option<AgreementResult>| r.as_ref().map_or("-".to_string(), |r| format!("{:.2}", r.value));
    for row in rows {
        let md = row.mean_difference.as_ref().map_or("-".to_string(), |r| {
            format!("{:.2} ± {:.2}", r.value, r.sd.unwrap_or(0.0))
        });
        w.write_record([
            row.criterion.clone(),
            row.classes.map_or("-".to_string(), |c| c.to_string()),
            row.agreement.n_items.to_string(),
            format!("{:.2}", row.agreement.value),
            fmt(&row.kappa),
            fmt(&row.icc),
            md,
        ])
        .expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
}
