//! Ordinary least squares with classical inference.

use super::linalg::{least_squares, DenseMatrix};
use super::tdist::{stars_three_level, two_sided_p};
use super::EconError;
use chrono::{Datelike, NaiveDate};
use serde::Serialize;
use std::collections::BTreeMap;

/// One estimated coefficient with its classical (homoskedastic) inference.
#[derive(Clone, Debug, Serialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_stat: f64,
    pub p_value: f64,
}

/// Output of one least-squares fit.
#[derive(Clone, Debug, Serialize)]
pub struct RegressionResult {
    pub coefficients: Vec<Coefficient>,
    pub r_squared: f64,
    pub n: usize,
    /// Residual degrees of freedom, `n - #parameters`.
    pub df: usize,
    pub rss: f64,
    pub bic: f64,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

impl RegressionResult {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }
}

/// Gaussian-likelihood BIC counting the error variance as a parameter:
/// `n ln(RSS/n) + (k+1) ln(n) + n (1 + ln 2π)` for `k` mean parameters.
pub fn bic(n: usize, rss: f64, mean_params: usize) -> f64 {
    let n_f = n as f64;
    n_f * (rss / n_f).ln() + (mean_params as f64 + 1.0) * n_f.ln() + n_f * (1.0 + (2.0 * std::f64::consts::PI).ln())
}

/// Fit `y` on the named predictor columns, optionally with an intercept
/// (prepended as the first coefficient).
///
/// Coefficients solve the least-squares problem; standard errors are
/// classical, t-tests are against zero with `n - #parameters` degrees of
/// freedom, and `r_squared` is centered when an intercept is present.
pub fn ols(y: &[f64], predictors: &[(&str, &[f64])], intercept: bool) -> Result<RegressionResult, EconError> {
    let n = y.len();
    for (name, col) in predictors {
        if col.len() != n {
            return Err(EconError::LengthMismatch {
                name: name.to_string(),
                got: col.len(),
                expected: n,
            });
        }
    }
    let params = predictors.len() + usize::from(intercept);
    if n <= params {
        return Err(EconError::TooFewObservations { n, params });
    }

    let mut names: Vec<String> = Vec::with_capacity(params);
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(params);
    if intercept {
        names.push("intercept".to_string());
        columns.push(vec![1.0; n]);
    }
    for (name, col) in predictors {
        names.push(name.to_string());
        columns.push(col.to_vec());
    }

    let x = DenseMatrix::from_columns(&columns);
    let solution = least_squares(&x, y).map_err(|deficiency| EconError::RankDeficient {
        columns: deficiency.columns.iter().map(|&j| names[j].clone()).collect(),
    })?;

    let mut residuals = Vec::with_capacity(n);
    let mut rss = 0.0;
    for i in 0..n {
        let mut fitted = 0.0;
        for j in 0..params {
            fitted += x.get(i, j) * solution.beta[j];
        }
        let r = y[i] - fitted;
        rss += r * r;
        residuals.push(r);
    }

    let tss = if intercept {
        let mean = y.iter().sum::<f64>() / n as f64;
        y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
    } else {
        y.iter().map(|v| v * v).sum::<f64>()
    };
    let r_squared = if tss > 0.0 {
        (1.0 - rss / tss).clamp(0.0, 1.0)
    } else if rss > 0.0 {
        0.0
    } else {
        1.0
    };

    let df = n - params;
    let sigma2 = rss / df as f64;
    let coefficients = names
        .into_iter()
        .zip(&solution.beta)
        .zip(&solution.xtx_inv_diag)
        .map(|((name, &estimate), &diag)| {
            let std_error = (sigma2 * diag).sqrt();
            let t_stat = if std_error > 0.0 {
                estimate / std_error
            } else if estimate == 0.0 {
                0.0
            } else {
                f64::INFINITY.copysign(estimate)
            };
            Coefficient {
                name,
                estimate,
                std_error,
                t_stat,
                p_value: two_sided_p(t_stat, df as f64),
            }
        })
        .collect();

    Ok(RegressionResult {
        coefficients,
        r_squared,
        n,
        df,
        rss,
        bic: bic(n, rss, params),
        residuals,
    })
}

/// Result of the sentiment-return hypothesis regression
/// `d_i = α + β s_i + ε` on days where both series are defined.
#[derive(Clone, Debug, Serialize)]
pub struct HypothesisTest {
    pub n: usize,
    pub beta: f64,
    pub beta_std_error: f64,
    pub p_value: f64,
    pub stars: &'static str,
    pub r_squared: f64,
    pub result: RegressionResult,
}

/// Minimum aligned sample for the hypothesis regression.
pub const MIN_ALIGNED_DAYS: usize = 30;

fn series_range(series: &[(NaiveDate, f64)]) -> Option<(NaiveDate, NaiveDate)> {
    let min = series.iter().map(|&(d, _)| d).min()?;
    let max = series.iter().map(|&(d, _)| d).max()?;
    Some((min, max))
}

/// Inner-join two dated series on their trading days.
pub fn align_series(
    left: &[(NaiveDate, f64)],
    right: &[(NaiveDate, f64)],
) -> Vec<(NaiveDate, f64, f64)> {
    let rhs: BTreeMap<NaiveDate, f64> = right.iter().copied().collect();
    let mut joined: Vec<(NaiveDate, f64, f64)> = left
        .iter()
        .filter_map(|&(d, l)| rhs.get(&d).map(|&r| (d, l, r)))
        .collect();
    joined.sort_by_key(|&(d, _, _)| d);
    joined
}

/// Regress after-market returns on a sentiment series (inner join on
/// days; at least [`MIN_ALIGNED_DAYS`] aligned observations required).
pub fn hypothesis_test(
    returns: &[(NaiveDate, f64)],
    sentiment: &[(NaiveDate, f64)],
) -> Result<HypothesisTest, EconError> {
    let joined = align_series(returns, sentiment);
    if joined.len() < MIN_ALIGNED_DAYS {
        return Err(EconError::TooFewAlignedDays {
            n: joined.len(),
            required: MIN_ALIGNED_DAYS,
            left: series_range(returns),
            right: series_range(sentiment),
        });
    }
    let y: Vec<f64> = joined.iter().map(|&(_, d, _)| d).collect();
    let s: Vec<f64> = joined.iter().map(|&(_, _, v)| v).collect();
    let result = ols(&y, &[("sentiment", &s)], true)?;
    let slope = result.coefficient("sentiment").expect("slope present").clone();
    Ok(HypothesisTest {
        n: joined.len(),
        beta: slope.estimate,
        beta_std_error: slope.std_error,
        p_value: slope.p_value,
        stars: stars_three_level(slope.p_value),
        r_squared: result.r_squared,
        result,
    })
}

/// Split a joined (day, return, sentiment) sample by calendar year.
pub fn split_by_year(joined: &[(NaiveDate, f64, f64)]) -> BTreeMap<i32, Vec<(NaiveDate, f64, f64)>> {
    let mut by_year: BTreeMap<i32, Vec<(NaiveDate, f64, f64)>> = BTreeMap::new();
    for &(d, a, b) in joined {
        by_year.entry(d.year()).or_default().push((d, a, b));
    }
    by_year
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn day(offset: i64) -> NaiveDate {
        NaiveDate::from_ymd_opt(2014, 1, 1).unwrap() + chrono::Duration::days(offset)
    }

    /// Independent oracle: solve the normal equations with an explicit
    /// Gauss-Jordan matrix inversion (no QR anywhere).
    fn normal_equations_oracle(y: &[f64], cols: &[Vec<f64>], intercept: bool) -> (Vec<f64>, Vec<f64>, f64) {
        let n = y.len();
        let mut design: Vec<Vec<f64>> = Vec::new();
        if intercept {
            design.push(vec![1.0; n]);
        }
        design.extend(cols.iter().cloned());
        let k = design.len();

        let mut xtx = vec![vec![0.0; k]; k];
        let mut xty = vec![0.0; k];
        for a in 0..k {
            for b in 0..k {
                xtx[a][b] = (0..n).map(|i| design[a][i] * design[b][i]).sum();
            }
            xty[a] = (0..n).map(|i| design[a][i] * y[i]).sum();
        }

        // Gauss-Jordan inversion with partial pivoting
        let mut aug: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                let mut row = xtx[i].clone();
                row.extend((0..k).map(|j| if i == j { 1.0 } else { 0.0 }));
                row
            })
            .collect();
        for col in 0..k {
            let pivot = (col..k)
                .max_by(|&a, &b| aug[a][col].abs().partial_cmp(&aug[b][col].abs()).unwrap())
                .unwrap();
            aug.swap(col, pivot);
            let p = aug[col][col];
            assert!(p.abs() > 1e-12, "oracle hit a singular design");
            for v in aug[col].iter_mut() {
                *v /= p;
            }
            for row in 0..k {
                if row != col {
                    let factor = aug[row][col];
                    for j in 0..2 * k {
                        aug[row][j] -= factor * aug[col][j];
                    }
                }
            }
        }
        let inv: Vec<Vec<f64>> = aug.into_iter().map(|row| row[k..].to_vec()).collect();

        let beta: Vec<f64> = (0..k).map(|i| (0..k).map(|j| inv[i][j] * xty[j]).sum()).collect();
        let mut rss = 0.0;
        for i in 0..n {
            let fitted: f64 = (0..k).map(|j| design[j][i] * beta[j]).sum();
            rss += (y[i] - fitted) * (y[i] - fitted);
        }
        let sigma2 = rss / (n - k) as f64;
        let se: Vec<f64> = (0..k).map(|j| (sigma2 * inv[j][j]).sqrt()).collect();
        let mean = y.iter().sum::<f64>() / n as f64;
        let tss: f64 = if intercept {
            y.iter().map(|v| (v - mean) * (v - mean)).sum()
        } else {
            y.iter().map(|v| v * v).sum()
        };
        (beta, se, 1.0 - rss / tss)
    }

    #[test]
    fn noiseless_line_recovers_exact_coefficients() {
        let x: Vec<f64> = (0..20).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let fit = ols(&y, &[("x", &x)], true).unwrap();
        assert!((fit.coefficient("x").unwrap().estimate - 2.0).abs() < 1e-10);
        assert!(fit.coefficient("intercept").unwrap().estimate.abs() < 1e-10);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(fit.coefficient("x").unwrap().p_value < 1e-12);
    }

    #[test]
    fn constant_regressor_is_a_rank_error_naming_the_column() {
        let x = vec![3.0; 10];
        let y: Vec<f64> = (0..10).map(f64::from).collect();
        match ols(&y, &[("x", &x)], true) {
            Err(EconError::RankDeficient { columns }) => assert_eq!(columns, vec!["x"]),
            other => panic!("expected rank error, got {other:?}"),
        }
    }

    #[test]
    fn matches_normal_equations_oracle_on_a_random_design() {
        // oracle: explicit X^T X inversion by Gauss-Jordan
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 40;
        let k = 3;
        let cols: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let named: Vec<(&str, &[f64])> = vec![("a", &cols[0]), ("b", &cols[1]), ("c", &cols[2])];
        let fit = ols(&y, &named, true).unwrap();

        let (beta, se, r2) = normal_equations_oracle(&y, &cols, true);
        for (j, c) in fit.coefficients.iter().enumerate() {
            assert!((c.estimate - beta[j]).abs() < 1e-10, "{}", c.name);
            assert!((c.std_error - se[j]).abs() < 1e-10);
        }
        assert!((fit.r_squared - r2).abs() < 1e-10);
    }

    #[test]
    fn residuals_are_orthogonal_to_the_design() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 50;
        let x1: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let x2: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| 0.3 * x1[i] - 0.8 * x2[i] + rng.gen_range(-0.5..0.5))
            .collect();
        let fit = ols(&y, &[("x1", &x1), ("x2", &x2)], true).unwrap();
        let scale: f64 = y.iter().map(|v| v.abs()).sum::<f64>();
        for col in [&x1, &x2] {
            let dot: f64 = fit.residuals.iter().zip(col.iter()).map(|(r, v)| r * v).sum();
            assert!(dot.abs() < 1e-8 * scale.max(1.0));
        }
        let sum: f64 = fit.residuals.iter().sum();
        assert!(sum.abs() < 1e-8 * scale.max(1.0));
    }

    #[test]
    fn slope_is_invariant_to_sentiment_shift_and_scales_inversely() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 120;
        let s: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let d: Vec<f64> = s.iter().map(|v| 0.002 * v + rng.gen_range(-0.001..0.001)).collect();
        let returns: Vec<(NaiveDate, f64)> = d.iter().enumerate().map(|(i, &v)| (day(i as i64), v)).collect();
        let sent: Vec<(NaiveDate, f64)> = s.iter().enumerate().map(|(i, &v)| (day(i as i64), v)).collect();
        let base = hypothesis_test(&returns, &sent).unwrap();

        let shifted: Vec<(NaiveDate, f64)> = sent.iter().map(|&(d, v)| (d, v + 5.0)).collect();
        let shifted_fit = hypothesis_test(&returns, &shifted).unwrap();
        assert!((shifted_fit.beta - base.beta).abs() < 1e-12);
        assert!((shifted_fit.r_squared - base.r_squared).abs() < 1e-12);

        let scaled: Vec<(NaiveDate, f64)> = sent.iter().map(|&(d, v)| (d, 4.0 * v)).collect();
        let scaled_fit = hypothesis_test(&returns, &scaled).unwrap();
        assert!((scaled_fit.beta - base.beta / 4.0).abs() < 1e-12);
        let t_base = base.result.coefficient("sentiment").unwrap().t_stat;
        let t_scaled = scaled_fit.result.coefficient("sentiment").unwrap().t_stat;
        assert!((t_base - t_scaled).abs() < 1e-9);
        assert!((scaled_fit.r_squared - base.r_squared).abs() < 1e-12);
    }

    #[test]
    fn planted_signal_is_recovered_exactly() {
        let n = 60;
        let s: Vec<f64> = (0..n).map(|i| ((i * 37) % 19) as f64 / 19.0 - 0.5).collect();
        let returns: Vec<(NaiveDate, f64)> = s
            .iter()
            .enumerate()
            .map(|(i, &v)| (day(i as i64), 0.002 * v))
            .collect();
        let sent: Vec<(NaiveDate, f64)> = s.iter().enumerate().map(|(i, &v)| (day(i as i64), v)).collect();
        let fit = hypothesis_test(&returns, &sent).unwrap();
        assert!((fit.beta - 0.002).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(fit.stars, "***");
    }

    #[test]
    fn too_few_aligned_days_is_an_error_listing_ranges() {
        let returns: Vec<(NaiveDate, f64)> = (0..40).map(|i| (day(i), 0.1)).collect();
        let sent: Vec<(NaiveDate, f64)> = (100..140).map(|i| (day(i), 0.2)).collect();
        match hypothesis_test(&returns, &sent) {
            Err(EconError::TooFewAlignedDays { n, left, right, .. }) => {
                assert_eq!(n, 0);
                assert_eq!(left.unwrap().0, day(0));
                assert_eq!(right.unwrap().1, day(139));
            }
            other => panic!("expected alignment error, got {other:?}"),
        }
    }

    #[test]
    fn bic_penalty_can_outweigh_an_rss_drop() {
        // nested designs on a common sample: extra column lowers RSS but
        // raises BIC when the improvement is noise-level
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 80;
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let junk: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = x.iter().map(|v| 1.5 * v + rng.gen_range(-0.3..0.3)).collect();
        let small = ols(&y, &[("x", &x)], true).unwrap();
        let big = ols(&y, &[("x", &x), ("junk", &junk)], true).unwrap();
        assert!(big.rss <= small.rss + 1e-12, "adding a column may not raise RSS");
        assert!(big.bic > small.bic, "penalty must dominate a noise-level fit gain");
    }
}
