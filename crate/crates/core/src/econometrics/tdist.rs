//! Student-t tail probabilities and significance markers.

use statrs::function::beta::beta_reg;

/// Two-sided p-value of a t-statistic with `df` degrees of freedom,
/// computed through the regularized incomplete beta function:
/// `P(|T| >= t) = I_{df/(df+t^2)}(df/2, 1/2)`.
pub fn two_sided_p(t: f64, df: f64) -> f64 {
    assert!(df > 0.0, "degrees of freedom must be positive");
    if t == 0.0 {
        return 1.0;
    }
    if !t.is_finite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    beta_reg(df / 2.0, 0.5, x).clamp(0.0, 1.0)
}

/// Hypothesis-table convention: `*` < 0.1, `**` < 0.05, `***` < 0.01.
pub fn stars_three_level(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

/// Lag-table convention: `+` < 0.1, `*` < 0.05, `**` < 0.01, `***` < 0.001.
pub fn stars_four_level(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else if p < 0.1 {
        "+"
    } else {
        ""
    }
}
