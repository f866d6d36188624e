//! Single-equation dynamic lag regressions of returns on their own lags
//! and on sentiment lags, with BIC-ranked lag-order scans.

use super::ols::{ols, RegressionResult};
use super::tdist::stars_four_level;
use super::EconError;
use serde::Serialize;

/// Lag orders of one dynamic regression: `p1` own-return lags and `p2`
/// sentiment lags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VarSpec {
    pub p1: usize,
    pub p2: usize,
}

impl VarSpec {
    pub fn new(p1: usize, p2: usize) -> Result<Self, EconError> {
        if p1 + p2 == 0 {
            return Err(EconError::EmptySpec);
        }
        Ok(VarSpec { p1, p2 })
    }

    pub fn max_lag(&self) -> usize {
        self.p1.max(self.p2)
    }
}

impl std::fmt::Display for VarSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.p1, self.p2)
    }
}

/// One fitted lag specification.
#[derive(Clone, Debug, Serialize)]
pub struct VarFit {
    pub spec: VarSpec,
    pub n_effective: usize,
    /// True when any lag coefficient (intercept excluded) has p < 0.1.
    pub significant: bool,
    /// Four-level significance mark per coefficient, parallel to
    /// `result.coefficients`.
    pub marks: Vec<&'static str>,
    pub result: RegressionResult,
}

fn lagged(series: &[f64], lag: usize, drop: usize) -> Vec<f64> {
    (drop..series.len()).map(|t| series[t - lag]).collect()
}

/// Fit `d(t)` on lags `1..=p1` of `d` and `1..=p2` of `s`, dropping the
/// first `drop >= max(p1, p2)` rows. `n_effective = len - drop` exactly.
pub fn var_fit_common(
    d: &[f64],
    s: &[f64],
    spec: VarSpec,
    drop: usize,
    intercept: bool,
) -> Result<VarFit, EconError> {
    if d.len() != s.len() {
        return Err(EconError::LengthMismatch {
            name: "sentiment".to_string(),
            got: s.len(),
            expected: d.len(),
        });
    }
    assert!(drop >= spec.max_lag(), "drop must cover the largest lag");
    let n = d.len();
    if n <= drop + spec.p1 + spec.p2 + 2 {
        return Err(EconError::InsufficientSample {
            n,
            needed: drop + spec.p1 + spec.p2 + 3,
            spec,
        });
    }

    let y = lagged(d, 0, drop);
    let mut names: Vec<String> = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for lag in 1..=spec.p1 {
        names.push(format!("return_lag{lag}"));
        columns.push(lagged(d, lag, drop));
    }
    for lag in 1..=spec.p2 {
        names.push(format!("sentiment_lag{lag}"));
        columns.push(lagged(s, lag, drop));
    }
    let predictors: Vec<(&str, &[f64])> = names
        .iter()
        .map(String::as_str)
        .zip(columns.iter().map(Vec::as_slice))
        .collect();

    let result = ols(&y, &predictors, intercept)?;
    let marks: Vec<&'static str> = result
        .coefficients
        .iter()
        .map(|c| stars_four_level(c.p_value))
        .collect();
    let significant = result
        .coefficients
        .iter()
        .any(|c| c.name != "intercept" && c.p_value < 0.1);

    Ok(VarFit {
        spec,
        n_effective: y.len(),
        significant,
        marks,
        result,
    })
}

/// Fit one specification on its own maximal sample
/// (`drop = max(p1, p2)`).
pub fn var_fit(d: &[f64], s: &[f64], spec: VarSpec, intercept: bool) -> Result<VarFit, EconError> {
    var_fit_common(d, s, spec, spec.max_lag(), intercept)
}

/// Fit every specification on the `(0..=p1_max) x (0..=p2_max)` grid
/// except `(0,0)`, on a common sample aligned to the largest lag so BIC
/// values are comparable, ranked ascending by BIC.
pub fn var_scan(
    d: &[f64],
    s: &[f64],
    p1_max: usize,
    p2_max: usize,
    intercept: bool,
) -> Result<Vec<VarFit>, EconError> {
    if p1_max + p2_max == 0 {
        return Err(EconError::EmptySpec);
    }
    let drop = p1_max.max(p2_max);
    let mut fits = Vec::new();
    for p1 in 0..=p1_max {
        for p2 in 0..=p2_max {
            if p1 + p2 == 0 {
                continue;
            }
            fits.push(var_fit_common(d, s, VarSpec { p1, p2 }, drop, intercept)?);
        }
    }
    fits.sort_by(|a, b| {
        a.result
            .bic
            .partial_cmp(&b.result.bic)
            .unwrap()
            .then_with(|| (a.spec.p1, a.spec.p2).cmp(&(b.spec.p1, b.spec.p2)))
    });
    Ok(fits)
}
