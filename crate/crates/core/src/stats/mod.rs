//! Test statistics used in the compliance analysis: Pearson correlation,
//! one-way ANOVA and the Kruskal-Wallis H test, each with a p-value.

pub mod special;

use serde::{Deserialize, Serialize};

use crate::error::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    PearsonR,
    AnovaF,
    KruskalWallisH,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatResult {
    pub statistic: Statistic,
    /// May be infinite for ANOVA when every group is constant.
    pub value: f64,
    pub p_value: f64,
    /// Sample size per group (a single entry for correlation).
    pub n: Vec<usize>,
    /// Degrees of freedom of the reference distribution.
    pub df: Vec<f64>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Pearson's r with a two-tailed p-value from t = r·sqrt((n−2)/(1−r²)) on
/// n−2 degrees of freedom.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<StatResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(StatsError::DegenerateInput(format!("need at least 3 points, got {n}")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::DegenerateInput("non-finite value".into()));
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::DegenerateInput("zero variance".into()));
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let df = (n - 2) as f64;
    let p_value = if r.abs() == 1.0 {
        0.0
    } else {
        special::t_two_tailed(r * (df / (1.0 - r * r)).sqrt(), df)
    };
    Ok(StatResult {
        statistic: Statistic::PearsonR,
        value: r,
        p_value,
        n: vec![n],
        df: vec![df],
    })
}

fn check_groups(groups: &[Vec<f64>]) -> Result<usize, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::DegenerateInput(format!(
            "need at least 2 groups, got {}",
            groups.len()
        )));
    }
    if let Some(i) = groups.iter().position(|g| g.is_empty()) {
        return Err(StatsError::DegenerateInput(format!("group {i} is empty")));
    }
    if groups.iter().flatten().any(|v| !v.is_finite()) {
        return Err(StatsError::DegenerateInput("non-finite value".into()));
    }
    Ok(groups.iter().map(Vec::len).sum())
}

/// One-way ANOVA F on (k−1, N−k) degrees of freedom. Constant groups with
/// different means give F = ∞ and p = 0; all values equal is degenerate.
pub fn anova_f(groups: &[Vec<f64>]) -> Result<StatResult, StatsError> {
    let total = check_groups(groups)?;
    let k = groups.len();
    if total <= k {
        return Err(StatsError::DegenerateInput(format!(
            "need more observations ({total}) than groups ({k})"
        )));
    }
    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    let grand = mean(&all);
    let mut between = 0.0;
    let mut within = 0.0;
    for g in groups {
        let m = mean(g);
        between += g.len() as f64 * (m - grand).powi(2);
        within += g.iter().map(|v| (v - m).powi(2)).sum::<f64>();
    }
    let scale = all.iter().map(|v| v * v).sum::<f64>().max(f64::MIN_POSITIVE);
    let negligible = |s: f64| s <= 1e-24 * scale;
    let (d1, d2) = ((k - 1) as f64, (total - k) as f64);
    let (value, p_value) = match (negligible(between), negligible(within)) {
        (true, true) => {
            return Err(StatsError::DegenerateInput(
                "no variance within or between groups".into(),
            ))
        }
        (false, true) => (f64::INFINITY, 0.0),
        _ => {
            let f = (between / d1) / (within / d2);
            (f, special::f_upper(f, d1, d2))
        }
    };
    Ok(StatResult {
        statistic: Statistic::AnovaF,
        value,
        p_value,
        n: groups.iter().map(Vec::len).collect(),
        df: vec![d1, d2],
    })
}

/// Average ranks (1-based) of `values`, ties sharing the mean of their ranks.
/// Also returns the tie correction sum Σ(t³ − t).
pub fn average_ranks(values: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        let t = (j - i + 1) as f64;
        ties += t * t * t - t;
        i = j + 1;
    }
    (ranks, ties)
}

/// Kruskal-Wallis H with tie correction; p from chi-squared on k−1 degrees
/// of freedom.
pub fn kruskal_wallis_h(groups: &[Vec<f64>]) -> Result<StatResult, StatsError> {
    let total = check_groups(groups)?;
    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    let (ranks, ties) = average_ranks(&all);
    let n = total as f64;
    let correction = 1.0 - ties / (n * n * n - n);
    if total < 2 || correction <= 0.0 {
        return Err(StatsError::DegenerateInput("all values are identical".into()));
    }
    let mut offset = 0;
    let mut sum = 0.0;
    for g in groups {
        let r: f64 = ranks[offset..offset + g.len()].iter().sum();
        sum += r * r / g.len() as f64;
        offset += g.len();
    }
    let h = ((12.0 / (n * (n + 1.0))) * sum - 3.0 * (n + 1.0)) / correction;
    let h = h.max(0.0);
    let df = (groups.len() - 1) as f64;
    Ok(StatResult {
        statistic: Statistic::KruskalWallisH,
        value: h,
        p_value: special::chi2_upper(h, df),
        n: groups.iter().map(Vec::len).collect(),
        df: vec![df],
    })
}
