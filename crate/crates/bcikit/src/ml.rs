//! Binary linear discriminant analysis with optional analytic shrinkage
//! regularization of the covariance.
//!
//! The weight vector is `w = Σ⁻¹ (μ1 - μ2)` with the pooled within-class
//! covariance Σ; with shrinkage enabled Σ is blended toward a scaled
//! identity, `Σ̃ = (1-γ) Σ + γ ν I`, with the intensity γ estimated
//! analytically from the data (Ledoit-Wolf / Schäfer-Strimmer style).
//! High-dimensional, low-sample problems that make the plain covariance
//! singular stay solvable with shrinkage on.

use nalgebra::{DMatrix, DVector};
use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::FeatureVectors;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MlError {
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("expected exactly two classes, found {0:?}")]
    NotTwoClasses(Vec<String>),
    #[error("class '{class}' has {got} observations, need at least 2")]
    TooFewPerClass { class: String, got: usize },
    #[error("pooled covariance is singular; enable shrinkage or add observations")]
    SingularCovariance,
    #[error("model expects {expected} features, data has {got}")]
    FeatureCountMismatch { expected: usize, got: usize },
    #[error("shrinkage intensity {0} outside [0, 1]")]
    BadGamma(f64),
}

/// Covariance shrunk toward a scaled identity target.
#[derive(Debug, Clone)]
pub struct ShrinkageEstimate {
    /// `(1-γ) S + γ ν I`, symmetric; positive definite whenever γ > 0
    pub sigma: Array2<f64>,
    /// shrinkage intensity in [0, 1]
    pub gamma: f64,
    /// target level: mean of the empirical diagonal
    pub nu: f64,
}

fn center_columns(x: &Array2<f64>) -> Array2<f64> {
    let n = x.nrows() as f64;
    let mut centered = x.clone();
    for mut col in centered.columns_mut() {
        let mean = col.sum() / n;
        col.mapv_inplace(|v| v - mean);
    }
    centered
}

/// Empirical covariance of centered rows with an explicit denominator.
fn covariance_of_centered(xc: &Array2<f64>, ddof: usize) -> Array2<f64> {
    let (n, d) = xc.dim();
    let denom = (n.saturating_sub(ddof)).max(1) as f64;
    let mut s = Array2::<f64>::zeros((d, d));
    for row in xc.rows() {
        for i in 0..d {
            let ri = row[i];
            for j in i..d {
                s[(i, j)] += ri * row[j];
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            let v = s[(i, j)] / denom;
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    s
}

/// Analytic shrinkage intensity toward `ν I` for centered observations:
/// the estimated variance of the covariance entries over the squared
/// distance between the empirical covariance and the target, clipped to
/// [0, 1].
fn analytic_gamma(xc: &Array2<f64>, s: &Array2<f64>, nu: f64) -> f64 {
    let (n, d) = xc.dim();
    let nf = n as f64;
    // Var over observations of z_ij(k) = x_ki * x_kj, unbiased
    let mut var_sum = 0.0;
    for i in 0..d {
        for j in 0..d {
            let mut zsum = 0.0;
            let mut zsq = 0.0;
            for k in 0..n {
                let z = xc[(k, i)] * xc[(k, j)];
                zsum += z;
                zsq += z * z;
            }
            let mean = zsum / nf;
            var_sum += (zsq - nf * mean * mean) / (nf - 1.0);
        }
    }
    let numerator = nf / ((nf - 1.0) * (nf - 1.0)) * var_sum;
    let mut denominator = 0.0;
    for i in 0..d {
        for j in 0..d {
            let t = if i == j { nu } else { 0.0 };
            denominator += (s[(i, j)] - t).powi(2);
        }
    }
    if denominator <= 0.0 {
        return 0.0;
    }
    (numerator / denominator).clamp(0.0, 1.0)
}

fn shrink_centered(xc: &Array2<f64>, ddof: usize, gamma: Option<f64>) -> ShrinkageEstimate {
    let d = xc.ncols();
    let s = covariance_of_centered(xc, ddof);
    let nu = (0..d).map(|i| s[(i, i)]).sum::<f64>() / d as f64;
    let gamma = gamma.unwrap_or_else(|| analytic_gamma(xc, &s, nu));
    let mut sigma = s;
    for i in 0..d {
        for j in 0..d {
            let t = if i == j { nu } else { 0.0 };
            sigma[(i, j)] = (1.0 - gamma) * sigma[(i, j)] + gamma * t;
        }
    }
    ShrinkageEstimate { sigma, gamma, nu }
}

/// Shrinkage covariance of raw observations (rows) with the automatic
/// analytic intensity. The empirical covariance uses denominator `n - 1`.
pub fn shrinkage_covariance(x: &Array2<f64>) -> Result<ShrinkageEstimate, MlError> {
    if x.nrows() < 2 {
        return Err(MlError::TooFewObservations {
            needed: 2,
            got: x.nrows(),
        });
    }
    let xc = center_columns(x);
    Ok(shrink_centered(&xc, 1, None))
}

/// [`shrinkage_covariance`] with the intensity forced to a given value
/// (γ = 0 reproduces the empirical covariance, γ = 1 the scaled identity).
pub fn shrinkage_covariance_with_gamma(
    x: &Array2<f64>,
    gamma: f64,
) -> Result<ShrinkageEstimate, MlError> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(MlError::BadGamma(gamma));
    }
    if x.nrows() < 2 {
        return Err(MlError::TooFewObservations {
            needed: 2,
            got: x.nrows(),
        });
    }
    let xc = center_columns(x);
    Ok(shrink_centered(&xc, 1, Some(gamma)))
}

/// Trained binary linear discriminant.
///
/// Scores are `w·x + b`; positive (and zero) scores classify as
/// `class_names[0]`, negative as `class_names[1]`. Serializes to the JSON
/// object `{w, b, gamma, class_names}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LdaModel {
    pub w: Vec<f64>,
    pub b: f64,
    pub gamma: f64,
    pub class_names: Vec<String>,
}

impl LdaModel {
    pub fn n_features(&self) -> usize {
        self.w.len()
    }

    /// Class name for a score under the zero-goes-to-class-one tie rule.
    pub fn classify(&self, score: f64) -> &str {
        if score >= 0.0 {
            &self.class_names[0]
        } else {
            &self.class_names[1]
        }
    }
}

/// Trains LDA on labeled feature vectors.
///
/// The pooled within-class covariance is computed from class-centered
/// observations with denominator `n - 2` (two estimated means). With
/// `use_shrinkage` the covariance is shrunk by the automatic analytic
/// intensity; without it a rank-deficient covariance is an error. The
/// weight orientation makes the first class's projected mean positive.
pub fn train_lda(fv: &FeatureVectors, use_shrinkage: bool) -> Result<LdaModel, MlError> {
    if fv.class_names.len() != 2 {
        return Err(MlError::NotTwoClasses(fv.class_names.clone()));
    }
    let d = fv.n_features();
    let n = fv.n_observations();
    let counts = [
        fv.labels.iter().filter(|&&c| c == 0).count(),
        fv.labels.iter().filter(|&&c| c == 1).count(),
    ];
    for (c, &count) in counts.iter().enumerate() {
        if count < 2 {
            return Err(MlError::TooFewPerClass {
                class: fv.class_names[c].clone(),
                got: count,
            });
        }
    }

    let mut means = [vec![0.0f64; d], vec![0.0f64; d]];
    for (k, &class) in fv.labels.iter().enumerate() {
        for j in 0..d {
            means[class][j] += fv.values[(k, j)];
        }
    }
    for (class, &count) in counts.iter().enumerate() {
        for v in &mut means[class] {
            *v /= count as f64;
        }
    }

    // class-centered observations pool into one covariance
    let mut xc = fv.values.clone();
    for (k, &class) in fv.labels.iter().enumerate() {
        for j in 0..d {
            xc[(k, j)] -= means[class][j];
        }
    }
    let estimate = if use_shrinkage {
        shrink_centered(&xc, 2, None)
    } else {
        shrink_centered(&xc, 2, Some(0.0))
    };

    let sigma = DMatrix::from_fn(d, d, |i, j| estimate.sigma[(i, j)]);
    let diff = DVector::from_fn(d, |i, _| means[0][i] - means[1][i]);
    let chol = sigma.cholesky().ok_or(MlError::SingularCovariance)?;
    let w = chol.solve(&diff);

    let mut b = 0.0;
    for i in 0..d {
        b -= w[i] * (means[0][i] + means[1][i]);
    }
    b /= 2.0;
    let _ = n;
    Ok(LdaModel {
        w: w.iter().copied().collect(),
        b,
        gamma: estimate.gamma,
        class_names: fv.class_names.clone(),
    })
}

/// Scores every observation: `w·x + b`.
pub fn apply_lda(model: &LdaModel, fv: &FeatureVectors) -> Result<Vec<f64>, MlError> {
    if fv.n_features() != model.n_features() {
        return Err(MlError::FeatureCountMismatch {
            expected: model.n_features(),
            got: fv.n_features(),
        });
    }
    Ok(fv
        .values
        .rows()
        .into_iter()
        .map(|row| {
            row.iter()
                .zip(&model.w)
                .map(|(x, w)| x * w)
                .sum::<f64>()
                + model.b
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gauss(rng: &mut ChaCha8Rng) -> f64 {
        let u1: f64 = rng.random::<f64>().max(1e-12);
        let u2: f64 = rng.random();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    fn fv_from(rows: Vec<Vec<f64>>, labels: Vec<usize>, classes: &[&str]) -> FeatureVectors {
        let n = rows.len();
        let d = rows[0].len();
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        FeatureVectors {
            values: Array2::from_shape_vec((n, d), flat).unwrap(),
            labels,
            class_names: classes.iter().map(|s| s.to_string()).collect(),
            feature_names: (0..d).map(|j| format!("f{j}")).collect(),
        }
    }

    #[test]
    fn forced_gamma_one_gives_scaled_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = Array2::from_shape_fn((40, 4), |_| gauss(&mut rng) * 2.0 + 1.0);
        let est = shrinkage_covariance_with_gamma(&x, 1.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { est.nu } else { 0.0 };
                assert_eq!(est.sigma[(i, j)], want);
            }
        }
    }

    #[test]
    fn forced_gamma_zero_gives_empirical_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = Array2::from_shape_fn((25, 3), |_| gauss(&mut rng));
        let est = shrinkage_covariance_with_gamma(&x, 0.0).unwrap();
        let xc = center_columns(&x);
        let s = covariance_of_centered(&xc, 1);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(est.sigma[(i, j)], s[(i, j)]);
            }
        }
    }

    #[test]
    fn automatic_gamma_vanishes_with_many_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = Array2::from_shape_fn((10_000, 5), |_| gauss(&mut rng));
        let est = shrinkage_covariance(&x).unwrap();
        assert!(est.gamma < 0.05, "gamma {}", est.gamma);
        let mut max_dev = 0.0f64;
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j { 1.0 } else { 0.0 };
                max_dev = max_dev.max((est.sigma[(i, j)] - want).abs());
            }
        }
        assert!(max_dev < 0.1, "deviation {max_dev}");
    }

    #[test]
    fn shrunk_covariance_is_symmetric_and_positive_definite() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        // fewer observations than dimensions: plain covariance is singular
        let x = Array2::from_shape_fn((8, 12), |_| gauss(&mut rng));
        let est = shrinkage_covariance(&x).unwrap();
        assert!(est.gamma > 0.0);
        let d = 12;
        for i in 0..d {
            for j in 0..d {
                assert!((est.sigma[(i, j)] - est.sigma[(j, i)]).abs() < 1e-14);
            }
        }
        let m = DMatrix::from_fn(d, d, |i, j| est.sigma[(i, j)]);
        assert!(m.cholesky().is_some(), "gamma > 0 must give PD");
    }

    #[test]
    fn too_few_observations_rejected() {
        let x = Array2::from_shape_vec((1, 3), vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            shrinkage_covariance(&x),
            Err(MlError::TooFewObservations { .. })
        ));
    }

    #[test]
    fn symmetric_means_identity_covariance() {
        // empirical class means (1,0) and (-1,0), pooled covariance ∝ I
        let fv = fv_from(
            vec![
                vec![2.0, 0.0],
                vec![0.0, 0.0],
                vec![1.0, 1.0],
                vec![1.0, -1.0],
                vec![0.0, 0.0],
                vec![-2.0, 0.0],
                vec![-1.0, 1.0],
                vec![-1.0, -1.0],
            ],
            vec![0, 0, 0, 0, 1, 1, 1, 1],
            &["pos", "neg"],
        );
        let model = train_lda(&fv, false).unwrap();
        assert!(model.w[0] > 0.0);
        assert_eq!(model.w[1], 0.0);
        assert_eq!(model.b, 0.0);
        assert_eq!(model.gamma, 0.0);
    }

    /// Plain Gauss elimination with partial pivoting, the independent
    /// linear-solve oracle.
    fn solve_oracle(a: &Array2<f64>, b: &[f64]) -> Vec<f64> {
        let d = b.len();
        let mut m = vec![vec![0.0f64; d + 1]; d];
        for i in 0..d {
            for j in 0..d {
                m[i][j] = a[(i, j)];
            }
            m[i][d] = b[i];
        }
        for col in 0..d {
            let pivot = (col..d)
                .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
                .unwrap();
            m.swap(col, pivot);
            for row in 0..d {
                if row == col {
                    continue;
                }
                let f = m[row][col] / m[col][col];
                for j in col..=d {
                    m[row][j] -= f * m[col][j];
                }
            }
        }
        (0..d).map(|i| m[i][d] / m[i][i]).collect()
    }

    #[test]
    fn weights_match_linear_solve_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let d = 2 + (rng.random::<f64>() * 5.0) as usize;
            let n_per = 30 + (rng.random::<f64>() * 40.0) as usize;
            let shift: Vec<f64> = (0..d).map(|_| gauss(&mut rng)).collect();
            let mut rows = Vec::new();
            let mut labels = Vec::new();
            for class in 0..2 {
                for _ in 0..n_per {
                    let row: Vec<f64> = (0..d)
                        .map(|j| gauss(&mut rng) + if class == 0 { shift[j] } else { -shift[j] })
                        .collect();
                    rows.push(row);
                    labels.push(class);
                }
            }
            let fv = fv_from(rows, labels, &["a", "b"]);
            let model = train_lda(&fv, false).unwrap();

            // rebuild the pooled covariance and mean difference independently
            let mut mu = [vec![0.0f64; d], vec![0.0f64; d]];
            for (k, &c) in fv.labels.iter().enumerate() {
                for j in 0..d {
                    mu[c][j] += fv.values[(k, j)];
                }
            }
            for m in &mut mu {
                for v in m.iter_mut() {
                    *v /= n_per as f64;
                }
            }
            let n = 2 * n_per;
            let mut sigma = Array2::<f64>::zeros((d, d));
            for (k, &c) in fv.labels.iter().enumerate() {
                for i in 0..d {
                    for j in 0..d {
                        sigma[(i, j)] += (fv.values[(k, i)] - mu[c][i])
                            * (fv.values[(k, j)] - mu[c][j]);
                    }
                }
            }
            sigma.mapv_inplace(|v| v / (n - 2) as f64);
            let diff: Vec<f64> = (0..d).map(|j| mu[0][j] - mu[1][j]).collect();
            let want = solve_oracle(&sigma, &diff);
            let scale: f64 = want.iter().map(|v| v * v).sum::<f64>().sqrt();
            for (got, want) in model.w.iter().zip(&want) {
                assert!(
                    (got - want).abs() <= 1e-8 * scale.max(1.0),
                    "{got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn rank_deficient_needs_shrinkage() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let d = 50;
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for class in 0..2usize {
            for _ in 0..10 {
                rows.push((0..d).map(|_| gauss(&mut rng) + class as f64).collect());
                labels.push(class);
            }
        }
        let fv = fv_from(rows, labels, &["a", "b"]);
        assert!(matches!(
            train_lda(&fv, false),
            Err(MlError::SingularCovariance)
        ));
        let model = train_lda(&fv, true).unwrap();
        assert!(model.gamma > 0.0);
        assert!(model.w.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn scores_are_affine_in_features() {
        let model = LdaModel {
            w: vec![1.0, 0.0],
            b: 0.0,
            gamma: 0.0,
            class_names: vec!["a".into(), "b".into()],
        };
        let fv = fv_from(vec![vec![2.0, 5.0]], vec![0], &["a", "b"]);
        assert_eq!(apply_lda(&model, &fv).unwrap()[0], 2.0);

        let model = LdaModel {
            w: vec![0.7, -1.3, 0.2],
            b: 0.4,
            gamma: 0.0,
            class_names: vec!["a".into(), "b".into()],
        };
        let x = vec![1.0, 2.0, -0.5];
        let y = vec![-2.0, 0.3, 4.0];
        let alpha = 0.3;
        let blend: Vec<f64> = x
            .iter()
            .zip(&y)
            .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
            .collect();
        let fv = fv_from(vec![x, y, blend], vec![0, 0, 0], &["a", "b"]);
        let scores = apply_lda(&model, &fv).unwrap();
        assert!((scores[2] - (alpha * scores[0] + (1.0 - alpha) * scores[1])).abs() < 1e-10);
    }

    #[test]
    fn midpoint_of_training_means_scores_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for class in 0..2usize {
            for _ in 0..25 {
                rows.push(
                    (0..3)
                        .map(|j| gauss(&mut rng) + if class == 0 { j as f64 } else { -1.0 })
                        .collect(),
                );
                labels.push(class);
            }
        }
        let fv = fv_from(rows, labels, &["a", "b"]);
        let model = train_lda(&fv, false).unwrap();
        let mut mu = [vec![0.0f64; 3], vec![0.0f64; 3]];
        for (k, &c) in fv.labels.iter().enumerate() {
            for j in 0..3 {
                mu[c][j] += fv.values[(k, j)] / 25.0;
            }
        }
        let midpoint: Vec<f64> = (0..3).map(|j| (mu[0][j] + mu[1][j]) / 2.0).collect();
        let probe = fv_from(vec![midpoint], vec![0], &["a", "b"]);
        let score = apply_lda(&model, &probe).unwrap()[0];
        assert!(score.abs() < 1e-12, "midpoint score {score}");

        // projected class means symmetric about zero for equal class sizes
        let scores = apply_lda(&model, &fv).unwrap();
        let m0: f64 = scores
            .iter()
            .zip(&fv.labels)
            .filter(|(_, &c)| c == 0)
            .map(|(s, _)| s)
            .sum::<f64>()
            / 25.0;
        let m1: f64 = scores
            .iter()
            .zip(&fv.labels)
            .filter(|(_, &c)| c == 1)
            .map(|(s, _)| s)
            .sum::<f64>()
            / 25.0;
        assert!((m0 + m1).abs() < 1e-10, "means {m0} {m1}");
        assert!(m0 > 0.0, "first class projects positive");
    }

    #[test]
    fn feature_scaling_keeps_decisions() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for class in 0..2usize {
            for _ in 0..30 {
                rows.push(
                    (0..4)
                        .map(|_| gauss(&mut rng) + if class == 0 { 0.8 } else { -0.8 })
                        .collect::<Vec<f64>>(),
                );
                labels.push(class);
            }
        }
        let fv = fv_from(rows.clone(), labels.clone(), &["a", "b"]);
        let scaled_rows: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|v| v * 37.5).collect())
            .collect();
        let fv_scaled = fv_from(scaled_rows, labels, &["a", "b"]);
        let m1 = train_lda(&fv, false).unwrap();
        let m2 = train_lda(&fv_scaled, false).unwrap();
        let s1 = apply_lda(&m1, &fv).unwrap();
        let s2 = apply_lda(&m2, &fv_scaled).unwrap();
        for (a, b) in s1.iter().zip(&s2) {
            assert_eq!(a.signum(), b.signum());
        }
    }

    #[test]
    fn separable_gaussians_classify_held_out() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let d = 4;
        let make = |rng: &mut ChaCha8Rng, n_per: usize| {
            let mut rows = Vec::new();
            let mut labels = Vec::new();
            for class in 0..2usize {
                for _ in 0..n_per {
                    // means 4 sigma apart along the first axis
                    let offset = if class == 0 { 2.0 } else { -2.0 };
                    let mut row: Vec<f64> = (0..d).map(|_| gauss(rng)).collect();
                    row[0] += offset;
                    rows.push(row);
                    labels.push(class);
                }
            }
            fv_from(rows, labels, &["a", "b"])
        };
        let train = make(&mut rng, 500);
        let test = make(&mut rng, 500);
        let model = train_lda(&train, false).unwrap();
        let scores = apply_lda(&model, &test).unwrap();
        let correct = scores
            .iter()
            .zip(&test.labels)
            .filter(|(s, &c)| (s.signum() >= 0.0) == (c == 0))
            .count();
        let accuracy = correct as f64 / scores.len() as f64;
        assert!(accuracy >= 0.99, "held-out accuracy {accuracy}");
    }

    #[test]
    fn model_round_trips_as_json() {
        let model = LdaModel {
            w: vec![0.25, -1.5],
            b: 0.125,
            gamma: 0.5,
            class_names: vec!["target".into(), "nontarget".into()],
        };
        let json = serde_json::to_string(&model).unwrap();
        assert!(json.contains("\"w\""));
        assert!(json.contains("\"class_names\""));
        let back: LdaModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn mismatched_feature_count_rejected() {
        let model = LdaModel {
            w: vec![1.0, 2.0],
            b: 0.0,
            gamma: 0.0,
            class_names: vec!["a".into(), "b".into()],
        };
        let fv = fv_from(vec![vec![1.0, 2.0, 3.0]], vec![0], &["a", "b"]);
        assert!(matches!(
            apply_lda(&model, &fv),
            Err(MlError::FeatureCountMismatch { .. })
        ));
    }
}
