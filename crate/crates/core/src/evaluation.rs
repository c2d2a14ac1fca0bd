//! RMSD statistics used to compare prediction methods across fragments.
//!
//! Distribution functions (Student-t, normal) are evaluated from the
//! regularized incomplete beta and gamma functions implemented below.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};

const MAX_ITER: usize = 500;
const CF_EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + 7.5;
    let series = COEF[1..]
        .iter()
        .enumerate()
        .fold(COEF[0], |acc, (i, c)| acc + c / (x + i as f64 + 1.0));
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + series.ln()
}

/// Continued fraction for the incomplete beta (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

/// `I_x(a, b)` with `y = 1 - x` passed separately so callers can avoid
/// cancellation near `x = 1`.
fn beta_inc_xy(a: f64, b: f64, x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * y.ln();
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_cf(a, b, x) / a
    } else {
        1.0 - ln_front.exp() * beta_cf(b, a, y) / b
    }
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn beta_inc(a: f64, b: f64, x: f64) -> f64 {
    beta_inc_xy(a, b, x, 1.0 - x)
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < a + 1.0 {
        gamma_series(a, x)
    } else {
        1.0 - gamma_cf(a, x)
    }
}

/// Regularized upper incomplete gamma `Q(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x < a + 1.0 {
        1.0 - gamma_series(a, x)
    } else {
        gamma_cf(a, x)
    }
}

fn gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * CF_EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_cf(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

pub fn erfc(x: f64) -> f64 {
    if x >= 0.0 {
        gamma_q(0.5, x * x)
    } else {
        1.0 + gamma_p(0.5, x * x)
    }
}

/// Upper tail of the standard normal.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Upper tail `P(T > t)` of Student's t with `df` degrees of freedom.
pub fn student_t_sf(t: f64, df: f64) -> f64 {
    if t == 0.0 {
        return 0.5;
    }
    let t2 = t * t;
    let half_tail = 0.5 * beta_inc_xy(0.5 * df, 0.5, df / (df + t2), t2 / (df + t2));
    if t > 0.0 {
        half_tail
    } else {
        1.0 - half_tail
    }
}

pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    student_t_sf(-t, df)
}

/// Inverse CDF of Student's t, by bisection.
pub fn student_t_quantile(p: f64, df: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) || !(df > 0.0) {
        return Err(Error::Domain(format!(
            "t quantile needs p in (0, 1) and df > 0, got p = {p}, df = {df}"
        )));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p < 0.5 {
        return student_t_quantile(1.0 - p, df).map(|q| -q);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while student_t_cdf(hi, df) < p {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if student_t_cdf(mid, df) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(Error::Validation(format!(
            "{what} contains non-finite value {v}"
        ))),
        None => Ok(()),
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n − 1 denominator); 0 for a single value.
fn sample_sd(values: &[f64], mean: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

pub fn summary_stats(values: &[f64]) -> Result<SummaryStats> {
    if values.is_empty() {
        return Err(Error::EmptyInput("RMSD list"));
    }
    check_finite(values, "RMSD list")?;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let m = mean(values);
    Ok(SummaryStats {
        n,
        mean: m,
        median,
        std: sample_sd(values, m),
        min: sorted[0],
        max: sorted[n - 1],
    })
}

/// Relative reduction of the mean RMSD, in percent.
pub fn improvement(baseline_mean: f64, hybrid_mean: f64) -> Result<f64> {
    if !(baseline_mean > 0.0) || !baseline_mean.is_finite() || !hybrid_mean.is_finite() {
        return Err(Error::Domain(format!(
            "improvement needs a positive baseline mean, got {baseline_mean}"
        )));
    }
    Ok(100.0 * (baseline_mean - hybrid_mean) / baseline_mean)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedTestResult {
    pub n: usize,
    /// Mean of `baseline - hybrid`; positive when the hybrid is better.
    pub mean_diff: f64,
    pub sd_diff: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub t_statistic: f64,
    pub df: usize,
    pub p_one_tailed: f64,
    pub cohens_dz: f64,
    /// Absent when fewer than five differences are nonzero.
    pub wilcoxon_p_one_tailed: Option<f64>,
}

fn differences(baseline: &[f64], hybrid: &[f64]) -> Result<Vec<f64>> {
    if baseline.len() != hybrid.len() {
        return Err(Error::Misaligned(format!(
            "{} baseline values against {} hybrid values",
            baseline.len(),
            hybrid.len()
        )));
    }
    check_finite(baseline, "baseline")?;
    check_finite(hybrid, "hybrid")?;
    Ok(baseline.iter().zip(hybrid).map(|(b, h)| b - h).collect())
}

/// One-tailed paired t-test of `baseline > hybrid`, with Cohen's dz, a 95%
/// confidence interval on the mean difference, and the Wilcoxon companion.
///
/// Identical inputs give the null result (t = 0, p = 0.5); any other
/// constant difference has no defined t and is rejected.
pub fn paired_t_test(baseline: &[f64], hybrid: &[f64]) -> Result<PairedTestResult> {
    let diffs = differences(baseline, hybrid)?;
    let n = diffs.len();
    if n < 2 {
        return Err(Error::DegenerateTest(
            "paired t-test needs at least 2 pairs",
        ));
    }
    let df = n - 1;
    let m = mean(&diffs);
    let sd = sample_sd(&diffs, m);
    let wilcoxon = match wilcoxon_signed_rank(baseline, hybrid) {
        Ok(w) => Some(w.p_one_tailed),
        Err(Error::DegenerateTest(_)) => None,
        Err(e) => return Err(e),
    };
    if sd == 0.0 {
        if diffs.iter().all(|&d| d == 0.0) {
            return Ok(PairedTestResult {
                n,
                mean_diff: 0.0,
                sd_diff: 0.0,
                ci95_low: 0.0,
                ci95_high: 0.0,
                t_statistic: 0.0,
                df,
                p_one_tailed: 0.5,
                cohens_dz: 0.0,
                wilcoxon_p_one_tailed: wilcoxon,
            });
        }
        return Err(Error::DegenerateTest(
            "paired differences have zero variance",
        ));
    }
    let se = sd / (n as f64).sqrt();
    let t = m / se;
    let half_width = student_t_quantile(0.975, df as f64)? * se;
    Ok(PairedTestResult {
        n,
        mean_diff: m,
        sd_diff: sd,
        ci95_low: m - half_width,
        ci95_high: m + half_width,
        t_statistic: t,
        df,
        p_one_tailed: student_t_sf(t, df as f64),
        cohens_dz: m / sd,
        wilcoxon_p_one_tailed: wilcoxon,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// Pairs left after dropping zero differences.
    pub n: usize,
    pub w_plus: f64,
    pub w_minus: f64,
    pub exact: bool,
    /// `P(W+ >= observed)` under the null.
    pub p_one_tailed: f64,
}

/// Largest sample evaluated with the exact null distribution.
pub const WILCOXON_EXACT_MAX: usize = 25;

/// Average ranks of `values` (1-based); ties share the mean of their ranks.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// One-tailed Wilcoxon signed-rank test of `baseline > hybrid`.
///
/// Zero differences are dropped before ranking.
pub fn wilcoxon_signed_rank(baseline: &[f64], hybrid: &[f64]) -> Result<WilcoxonResult> {
    let diffs: Vec<f64> = differences(baseline, hybrid)?
        .into_iter()
        .filter(|&d| d != 0.0)
        .collect();
    let n = diffs.len();
    if n == 0 {
        return Err(Error::DegenerateTest("all paired differences are zero"));
    }
    if n < 5 {
        return Err(Error::DegenerateTest(
            "signed-rank test needs at least 5 nonzero differences",
        ));
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = midranks(&abs);
    let w_plus: f64 = ranks
        .iter()
        .zip(&diffs)
        .filter(|(_, d)| **d > 0.0)
        .map(|(r, _)| r)
        .sum();
    let total = (n * (n + 1)) as f64 / 2.0;
    let w_minus = total - w_plus;

    let (exact, p) = if n <= WILCOXON_EXACT_MAX {
        // midranks are multiples of 1/2, so doubled ranks are integers
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
        let max: usize = doubled.iter().sum();
        let mut counts = vec![0.0f64; max + 1];
        counts[0] = 1.0;
        for &r in &doubled {
            for s in (r..=max).rev() {
                counts[s] += counts[s - r];
            }
        }
        let observed = (2.0 * w_plus).round() as usize;
        let tail: f64 = counts[observed..].iter().sum();
        (true, tail / 2f64.powi(n as i32))
    } else {
        let nf = n as f64;
        let mu = nf * (nf + 1.0) / 4.0;
        let mut tie_term = 0.0;
        let mut sorted = abs.clone();
        sorted.sort_by(f64::total_cmp);
        for group in sorted.chunk_by(|a, b| a == b) {
            let t = group.len() as f64;
            tie_term += t * t * t - t;
        }
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
        let z = (w_plus - mu - 0.5) / var.sqrt();
        (false, normal_sf(z))
    };
    Ok(WilcoxonResult {
        n,
        w_plus,
        w_minus,
        exact,
        p_one_tailed: p.clamp(0.0, 1.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub n: usize,
    pub pearson_r: f64,
    pub r_squared: f64,
    pub slope: f64,
    pub intercept: f64,
}

/// Pearson correlation and least-squares line of RMSD on score.
pub fn score_rmsd_correlation(scores: &[f64], rmsds: &[f64]) -> Result<Correlation> {
    if scores.len() != rmsds.len() {
        return Err(Error::Misaligned(format!(
            "{} scores against {} RMSD values",
            scores.len(),
            rmsds.len()
        )));
    }
    if scores.len() < 3 {
        return Err(Error::DegenerateTest("correlation needs at least 3 points"));
    }
    check_finite(scores, "scores")?;
    check_finite(rmsds, "RMSD list")?;
    let (mx, my) = (mean(scores), mean(rmsds));
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in scores.iter().zip(rmsds) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateTest("correlation input has zero variance"));
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let slope = sxy / sxx;
    Ok(Correlation {
        n: scores.len(),
        pearson_r: r,
        r_squared: r * r,
        slope,
        intercept: my - slope * mx,
    })
}

/// Per-fragment RMSDs for several methods, aligned by fragment id.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodRmsdTable {
    fragments: Vec<String>,
    rmsd: BTreeMap<String, Vec<f64>>,
    scores: BTreeMap<String, Vec<Option<f64>>>,
}

struct LongRow {
    fragment: String,
    method: String,
    rmsd: f64,
    score: Option<f64>,
}

impl MethodRmsdTable {
    /// Build from per-method columns sharing the fragment order.
    pub fn new(fragments: Vec<String>, methods: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let rows = methods
            .into_iter()
            .flat_map(|(method, values)| {
                if values.len() != fragments.len() {
                    return vec![Err(Error::Misaligned(format!(
                        "method {method} has {} values for {} fragments",
                        values.len(),
                        fragments.len()
                    )))];
                }
                fragments
                    .iter()
                    .zip(values)
                    .map(|(f, v)| {
                        Ok(LongRow {
                            fragment: f.clone(),
                            method: method.clone(),
                            rmsd: v,
                            score: None,
                        })
                    })
                    .collect()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }

    /// Attach per-fragment scores (e.g. fused energies) to one method.
    pub fn with_scores(mut self, method: &str, scores: Vec<f64>) -> Result<Self> {
        if scores.len() != self.fragments.len() {
            return Err(Error::Misaligned(format!(
                "{} scores for {} fragments",
                scores.len(),
                self.fragments.len()
            )));
        }
        check_finite(&scores, "scores")?;
        let slot = self
            .scores
            .get_mut(method)
            .ok_or_else(|| Error::Validation(format!("unknown method {method:?}")))?;
        *slot = scores.into_iter().map(Some).collect();
        Ok(self)
    }

    fn from_rows(rows: Vec<LongRow>) -> Result<Self> {
        let mut cells: BTreeMap<String, BTreeMap<String, (f64, Option<f64>)>> = BTreeMap::new();
        for row in rows {
            if !(row.rmsd.is_finite() && row.rmsd >= 0.0) {
                return Err(Error::Validation(format!(
                    "RMSD for {}/{} must be finite and non-negative, got {}",
                    row.fragment, row.method, row.rmsd
                )));
            }
            let per_method = cells.entry(row.method.clone()).or_default();
            if per_method
                .insert(row.fragment.clone(), (row.rmsd, row.score))
                .is_some()
            {
                return Err(Error::Validation(format!(
                    "fragment {} appears twice for method {}",
                    row.fragment, row.method
                )));
            }
        }
        if cells.is_empty() {
            return Err(Error::EmptyInput("RMSD table"));
        }
        let all: BTreeSet<&String> = cells.values().flat_map(|m| m.keys()).collect();
        let mut problems = Vec::new();
        for (method, per) in &cells {
            let missing: Vec<&str> = all
                .iter()
                .filter(|f| !per.contains_key(**f))
                .map(|f| f.as_str())
                .collect();
            if !missing.is_empty() {
                problems.push(format!("{method} lacks {}", missing.join(", ")));
            }
        }
        if !problems.is_empty() {
            return Err(Error::Misaligned(problems.join("; ")));
        }
        if all.len() < 2 {
            return Err(Error::Validation(format!(
                "need at least 2 fragments per method, got {}",
                all.len()
            )));
        }
        let fragments: Vec<String> = all.into_iter().cloned().collect();
        let mut rmsd = BTreeMap::new();
        let mut scores = BTreeMap::new();
        for (method, per) in cells {
            rmsd.insert(method.clone(), per.values().map(|c| c.0).collect());
            scores.insert(method, per.values().map(|c| c.1).collect());
        }
        Ok(Self {
            fragments,
            rmsd,
            scores,
        })
    }

    /// Parse the long-format CSV with columns `fragment_id`, `method`,
    /// `rmsd_angstrom` and an optional `score`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader.headers()?.clone();
        let find = |name: &str| header.iter().position(|h| h.eq_ignore_ascii_case(name));
        let col = |name: &'static str| {
            find(name).ok_or_else(|| Error::Schema(format!("missing column {name:?}")))
        };
        let (fi, mi, ri) = (col("fragment_id")?, col("method")?, col("rmsd_angstrom")?);
        let si = find("score");
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            let row = i + 1;
            let number = |idx: usize, name: &str| -> Result<Option<f64>> {
                let cell = record.get(idx).unwrap_or("");
                if cell.is_empty() || cell.eq_ignore_ascii_case("na") {
                    return Ok(None);
                }
                cell.parse().map(Some).map_err(|_| Error::Parse {
                    row,
                    column: name.into(),
                    message: format!("{cell:?} is not a number"),
                })
            };
            let rmsd = number(ri, "rmsd_angstrom")?.ok_or_else(|| Error::Parse {
                row,
                column: "rmsd_angstrom".into(),
                message: "missing value".into(),
            })?;
            let score = match si {
                Some(s) => number(s, "score")?,
                None => None,
            };
            rows.push(LongRow {
                fragment: record.get(fi).unwrap_or("").to_string(),
                method: record.get(mi).unwrap_or("").to_string(),
                rmsd,
                score,
            });
        }
        Self::from_rows(rows)
    }

    pub fn fragments(&self) -> &[String] {
        &self.fragments
    }

    pub fn methods(&self) -> impl Iterator<Item = &str> {
        self.rmsd.keys().map(String::as_str)
    }

    pub fn rmsd(&self, method: &str) -> Option<&[f64]> {
        self.rmsd.get(method).map(Vec::as_slice)
    }

    /// Scores for `method`, present only if every fragment has one.
    pub fn scores(&self, method: &str) -> Option<Vec<f64>> {
        self.scores.get(method)?.iter().copied().collect()
    }

    fn require(&self, method: &str) -> Result<&[f64]> {
        self.rmsd(method)
            .ok_or_else(|| Error::Validation(format!("unknown method {method:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub baseline: String,
    pub improvement_pct: f64,
    pub test: PairedTestResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub hybrid: String,
    pub stats: Vec<(String, SummaryStats)>,
    pub comparisons: Vec<Comparison>,
    pub correlations: Vec<(String, Correlation)>,
}

/// Summaries for every method, paired tests of each baseline against the
/// hybrid, and score–RMSD correlations for methods that carry scores.
/// An empty `baselines` list means every method other than the hybrid.
pub fn evaluate(
    table: &MethodRmsdTable,
    baselines: &[String],
    hybrid: &str,
) -> Result<EvaluationReport> {
    let hybrid_rmsd = table.require(hybrid)?;
    let baselines: Vec<String> = if baselines.is_empty() {
        table
            .methods()
            .filter(|m| *m != hybrid)
            .map(String::from)
            .collect()
    } else {
        baselines.to_vec()
    };
    let hybrid_mean = mean(hybrid_rmsd);
    let mut comparisons = Vec::new();
    for b in &baselines {
        let base = table.require(b)?;
        comparisons.push(Comparison {
            baseline: b.clone(),
            improvement_pct: improvement(mean(base), hybrid_mean)?,
            test: paired_t_test(base, hybrid_rmsd)?,
        });
    }
    let stats = table
        .methods()
        .map(|m| Ok((m.to_string(), summary_stats(table.require(m)?)?)))
        .collect::<Result<_>>()?;
    let mut correlations = Vec::new();
    for m in table.methods() {
        if let Some(scores) = table.scores(m) {
            correlations.push((
                m.to_string(),
                score_rmsd_correlation(&scores, table.require(m)?)?,
            ));
        }
    }
    Ok(EvaluationReport {
        hybrid: hybrid.to_string(),
        stats,
        comparisons,
        correlations,
    })
}

fn fmt_p(p: Option<f64>) -> String {
    p.map_or_else(|| "NA".into(), |p| format!("{p:.6e}"))
}

impl EvaluationReport {
    pub fn stats_csv(&self) -> String {
        let mut out = String::from("method,n,mean,median,std,min,max\n");
        for (m, s) in &self.stats {
            let _ = writeln!(
                out,
                "{m},{},{:.6},{:.6},{:.6},{:.6},{:.6}",
                s.n, s.mean, s.median, s.std, s.min, s.max
            );
        }
        out
    }

    pub fn tests_csv(&self) -> String {
        let mut out = String::from(
            "baseline,hybrid,n,improvement_pct,mean_diff,ci95_low,ci95_high,t,df,p_one_tailed,cohens_dz,wilcoxon_p_one_tailed\n",
        );
        for c in &self.comparisons {
            let t = &c.test;
            let _ = writeln!(
                out,
                "{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{},{},{:.6},{}",
                c.baseline,
                self.hybrid,
                t.n,
                c.improvement_pct,
                t.mean_diff,
                t.ci95_low,
                t.ci95_high,
                t.t_statistic,
                t.df,
                fmt_p(Some(t.p_one_tailed)),
                t.cohens_dz,
                fmt_p(t.wilcoxon_p_one_tailed),
            );
        }
        out
    }

    pub fn correlation_csv(&self) -> String {
        let mut out = String::from("method,n,pearson_r,r_squared,slope,intercept\n");
        for (m, c) in &self.correlations {
            let _ = writeln!(
                out,
                "{m},{},{:.6},{:.6},{:.6},{:.6}",
                c.n, c.pearson_r, c.r_squared, c.slope, c.intercept
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("RMSD summary (Å)\n");
        let _ = writeln!(
            out,
            "  {:<16} {:>4} {:>8} {:>8} {:>8} {:>8} {:>8}",
            "method", "n", "mean", "median", "std", "min", "max"
        );
        for (m, s) in &self.stats {
            let _ = writeln!(
                out,
                "  {m:<16} {:>4} {:>8.3} {:>8.3} {:>8.3} {:>8.3} {:>8.3}",
                s.n, s.mean, s.median, s.std, s.min, s.max
            );
        }
        if !self.comparisons.is_empty() {
            let _ = writeln!(
                out,
                "\nPaired comparisons against {} (one-tailed)",
                self.hybrid
            );
            for c in &self.comparisons {
                let t = &c.test;
                let _ = writeln!(
                    out,
                    "  {}: improvement {:.1}%, mean diff {:.3} Å [{:.3}, {:.3}], t({}) = {:.2}, p = {}, dz = {:.2}, Wilcoxon p = {}",
                    c.baseline,
                    c.improvement_pct,
                    t.mean_diff,
                    t.ci95_low,
                    t.ci95_high,
                    t.df,
                    t.t_statistic,
                    fmt_p(Some(t.p_one_tailed)),
                    t.cohens_dz,
                    fmt_p(t.wilcoxon_p_one_tailed),
                );
            }
        }
        if !self.correlations.is_empty() {
            out.push_str("\nScore–RMSD correlation\n");
            for (m, c) in &self.correlations {
                let _ = writeln!(
                    out,
                    "  {m}: r = {:.3}, R² = {:.3}, RMSD ≈ {:.3}·score {} {:.3} (n = {})",
                    c.pearson_r,
                    c.r_squared,
                    c.slope,
                    if c.intercept < 0.0 { '-' } else { '+' },
                    c.intercept.abs(),
                    c.n
                );
            }
        }
        out
    }
}
