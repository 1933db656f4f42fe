use std::fmt::Write;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `failures` out of `trials`.
pub fn wilson(failures: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = failures as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // clamp against rounding so the point estimate always lies inside
    ((centre - half).clamp(0.0, phat), (centre + half).clamp(phat, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub d: usize,
    pub p: f64,
    pub trials: u64,
    pub failures: u64,
    pub logical_error_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub wall_seconds: f64,
}

impl ResultRow {
    pub fn new(d: usize, p: f64, trials: u64, failures: u64, wall_seconds: f64) -> Self {
        let (ci_low, ci_high) = wilson(failures, trials);
        Self {
            d,
            p,
            trials,
            failures,
            logical_error_rate: failures as f64 / trials as f64,
            ci_low,
            ci_high,
            wall_seconds,
        }
    }
}

pub const CSV_HEADER: &str = "d,p,trials,failures,logical_error_rate,ci_low,ci_high,wall_seconds";

pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{:.6e},{:.6e},{:.6e},{:.3}",
            r.d, r.p, r.trials, r.failures, r.logical_error_rate, r.ci_low, r.ci_high, r.wall_seconds
        )
        .unwrap();
    }
    s
}
