//! Fixtures shared by the integration targets.
#![allow(dead_code)]

use fusefold::evaluation::MethodRmsdTable;

pub const N_FRAGMENTS: usize = 75;

/// Published per-method moments: (name, mean, median, sd, min, max).
pub const TABLE_MOMENTS: [(&str, f64, f64, f64, f64, f64); 4] = [
    ("af3", 11.43, 11.25, 2.69, 6.36, 17.92),
    ("colabfold", 11.79, 12.14, 2.84, 5.02, 17.67),
    ("quantum_only", 6.85, 6.79, 1.92, 3.17, 14.51),
    ("hybrid", 4.89, 4.70, 1.10, 2.76, 9.16),
];

/// Published paired t statistics against the hybrid, n = 75.
pub const TABLE_T: [(&str, f64); 3] = [
    ("af3", 19.93),
    ("colabfold", 21.50),
    ("quantum_only", 10.12),
];

fn sample_mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_sd(v: &[f64]) -> f64 {
    let m = sample_mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

/// An ascending sample of odd size `n` with the given mean, median, sample
/// sd, min and max. Below the median the values are evenly spaced, above it
/// they spread quadratically; the two spans are solved for by bisection.
pub fn moment_matched(n: usize, mean: f64, median: f64, sd: f64, min: f64, max: f64) -> Vec<f64> {
    assert!(n % 2 == 1 && n >= 5);
    let half = (n - 3) / 2;
    let u: Vec<f64> = (1..=half).map(|i| i as f64 / (half + 1) as f64).collect();
    let v: Vec<f64> = (1..=half)
        .map(|i| (i as f64 / (half + 1) as f64).powi(2))
        .collect();
    let (su, sv) = (u.iter().sum::<f64>(), v.iter().sum::<f64>());
    // the interior must supply this much mass beyond the median
    let excess = n as f64 * mean - min - max - median * (2 * half + 1) as f64;
    let build = |a: f64| -> Vec<f64> {
        let b = (excess + a * su) / sv;
        let mut out = vec![min];
        out.extend(u.iter().rev().map(|x| median - a * x));
        out.push(median);
        out.extend(v.iter().map(|x| median + b * x));
        out.push(max);
        out
    };
    let (mut lo, mut hi) = (
        0.0,
        (median - min) * (half + 1) as f64 / half as f64 * 0.999,
    );
    assert!(
        sample_sd(&build(lo)) < sd && sample_sd(&build(hi)) > sd,
        "moments unreachable"
    );
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sample_sd(&build(mid)) < sd {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let out = build(0.5 * (lo + hi));
    assert!(out.windows(2).all(|w| w[0] <= w[1]) && *out.last().unwrap() == max);
    out
}

/// A deterministic pattern with sample mean exactly 0 and sd exactly 1
/// (up to rounding), decorrelated from index order by `stride`.
pub fn standardized(n: usize, stride: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n)
        .map(|i| {
            let k = (i * stride) % n;
            // evenly spaced quantiles pushed through a cubic for heavier tails
            let q = (k as f64 + 0.5) / n as f64 * 2.0 - 1.0;
            q + 0.6 * q * q * q
        })
        .collect();
    let m = sample_mean(&raw);
    let s = sample_sd(&raw);
    raw.iter().map(|x| (x - m) / s).collect()
}

pub fn fragment_ids(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("frag{i:03}")).collect()
}

/// Per-fragment RMSDs whose hybrid column matches the published moments and
/// whose baselines differ from it by the published means with the spread
/// implied by the published t statistics.
pub fn benchmark_columns() -> Vec<(String, Vec<f64>)> {
    let (_, hm, hmed, hsd, hmin, hmax) = TABLE_MOMENTS[3];
    let sorted = moment_matched(N_FRAGMENTS, hm, hmed, hsd, hmin, hmax);
    // scatter so fragment order is not rank order
    let hybrid: Vec<f64> = (0..N_FRAGMENTS)
        .map(|i| sorted[(i * 29) % N_FRAGMENTS])
        .collect();
    let mut cols = Vec::new();
    for (k, (name, t)) in TABLE_T.iter().enumerate() {
        let mean = TABLE_MOMENTS[k].1;
        let delta = mean - hm;
        let sd_d = delta * (N_FRAGMENTS as f64).sqrt() / t;
        let z = standardized(N_FRAGMENTS, [7, 11, 13][k]);
        let col: Vec<f64> = hybrid
            .iter()
            .zip(&z)
            .map(|(h, z)| h + delta + sd_d * z)
            .collect();
        assert!(
            col.iter().all(|v| *v >= 0.0),
            "{name} fixture went negative"
        );
        cols.push((name.to_string(), col));
    }
    cols.push(("hybrid".to_string(), hybrid));
    cols
}

pub fn benchmark_table() -> MethodRmsdTable {
    MethodRmsdTable::new(fragment_ids(N_FRAGMENTS), benchmark_columns()).unwrap()
}

/// Long-format CSV text for a set of columns.
pub fn long_csv(columns: &[(String, Vec<f64>)], scores: Option<(&str, &[f64])>) -> String {
    let ids = fragment_ids(columns[0].1.len());
    let mut out = String::from("fragment_id,method,rmsd_angstrom,score\n");
    for (name, values) in columns {
        for (i, (id, v)) in ids.iter().zip(values).enumerate() {
            let score = match scores {
                Some((m, s)) if m == name => format!("{}", s[i]),
                _ => String::new(),
            };
            out.push_str(&format!("{id},{name},{v},{score}\n"));
        }
    }
    out
}
