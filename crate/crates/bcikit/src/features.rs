//! Feature extraction: classwise averages, jumping means, signed r²
//! discriminability, CSP and SPoC spatial filters, and flattening into
//! feature vectors.
//!
//! CSP solves `Σ1 w = λ (Σ1 + Σ2) w` for two-class epoched data; SPoC
//! solves `Cz w = λ C̄ w` against a continuous per-epoch target. Both go
//! through the same route: whiten the right-hand matrix, then take the
//! symmetric eigendecomposition of the whitened left-hand matrix.

use nalgebra::DMatrix;
use ndarray::{Array2, ArrayD, ArrayView2, Axis, IxDyn};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{
    AxisCoords, Data, DataError, CHANNEL_AXIS, CLASS_AXIS, COMPONENT_AXIS, INTERVAL_AXIS,
    TIME_AXIS, UNIT_ENUM, UNIT_MS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeatureError {
    #[error("no epochs to operate on")]
    NoEpochs,
    #[error("interval [{start}, {end}) contains no samples of the epoch time axis")]
    EmptyIntervalWindow { start: f64, end: f64 },
    #[error("expected exactly two classes, found {0:?}")]
    NotTwoClasses(Vec<String>),
    #[error("class '{class}' has {got} epochs, need at least {needed}")]
    TooFewEpochsPerClass {
        class: String,
        got: usize,
        needed: usize,
    },
    #[error("epoch {0} has zero total variance")]
    ZeroVarianceEpoch(usize),
    #[error("composite covariance is singular (rank-deficient channels)")]
    SingularCompositeCovariance,
    #[error("mean covariance is singular (rank-deficient channels)")]
    SingularMeanCovariance,
    #[error("target variable has {got} entries for {expected} epochs")]
    LengthMismatch { expected: usize, got: usize },
    #[error("target variable is constant; power co-modulation is undefined")]
    ConstantTarget,
    #[error("filter column {column} out of range for {channels} channels")]
    ColumnOutOfRange { column: usize, channels: usize },
    #[error("data has {got} channels but the model was trained on {expected}")]
    ChannelCountMismatch { expected: usize, got: usize },
    #[error("values contain NaN or infinity")]
    NonFiniteValues,
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Class labels of an epoched container: unique names in first-appearance
/// order plus the per-epoch class index.
pub fn class_labels(epo: &Data) -> Result<(Vec<String>, Vec<usize>), FeatureError> {
    let class_axis = epo.axis_index(CLASS_AXIS)?;
    let labels = epo.axes()[class_axis]
        .as_text()
        .ok_or(DataError::WrongCoordinateKind {
            axis: class_axis,
            expected: "text",
            found: epo.axes()[class_axis].kind(),
        })?;
    let mut classes: Vec<String> = Vec::new();
    let mut indices = Vec::with_capacity(labels.len());
    for label in labels {
        let idx = match classes.iter().position(|c| c == label) {
            Some(i) => i,
            None => {
                classes.push(label.clone());
                classes.len() - 1
            }
        };
        indices.push(idx);
    }
    Ok((classes, indices))
}

/// Arithmetic mean over the epochs of each class.
///
/// Output is `(class, time, channel)` with one row per distinct class, in
/// first-appearance order.
pub fn classwise_average(epo: &Data) -> Result<Data, FeatureError> {
    let (classes, indices) = class_labels(epo)?;
    if indices.is_empty() {
        return Err(FeatureError::NoEpochs);
    }
    let class_axis = epo.axis_index(CLASS_AXIS)?;
    let mut shape = epo.shape().to_vec();
    shape[class_axis] = classes.len();
    let mut sums = ArrayD::<f64>::zeros(IxDyn(&shape));
    let mut counts = vec![0usize; classes.len()];
    for (e, &class) in indices.iter().enumerate() {
        let mut acc = sums.index_axis_mut(Axis(class_axis), class);
        acc += &epo.values().index_axis(Axis(class_axis), e);
        counts[class] += 1;
    }
    for (class, &count) in counts.iter().enumerate() {
        let mut acc = sums.index_axis_mut(Axis(class_axis), class);
        acc /= count as f64;
    }
    Ok(epo.with_replaced(
        sums,
        vec![(class_axis, AxisCoords::Text(classes))],
    )?)
}

/// Means over consecutive time intervals, the classic ERP feature.
///
/// For every epoch and channel, averages the samples whose timestamps fall
/// in each `[start, end)` interval. The interval axis is labeled with the
/// interval midpoints.
pub fn jumping_means(epo: &Data, intervals_ms: &[(f64, f64)]) -> Result<Data, FeatureError> {
    let t_axis = epo.time_axis()?;
    let class_axis = epo.axis_index(CLASS_AXIS)?;
    let ch_axis = epo.channel_axis()?;
    let ts = epo.timestamps()?;
    let n_epochs = epo.shape()[class_axis];
    let n_ch = epo.shape()[ch_axis];

    let mut windows = Vec::with_capacity(intervals_ms.len());
    for &(start, end) in intervals_ms {
        let win = crate::sigproc::time_window_indices(ts, start, end);
        if win.is_empty() {
            return Err(FeatureError::EmptyIntervalWindow { start, end });
        }
        windows.push(win);
    }

    let mut out = ArrayD::<f64>::zeros(IxDyn(&[n_epochs, intervals_ms.len(), n_ch]));
    for e in 0..n_epochs {
        let x = epoch_view(epo, class_axis, t_axis, e);
        for (i, win) in windows.iter().enumerate() {
            let len = win.len() as f64;
            for ch in 0..n_ch {
                let mut acc = 0.0;
                for t in win.clone() {
                    acc += x[(t, ch)];
                }
                out[IxDyn(&[e, i, ch])] = acc / len;
            }
        }
    }

    let midpoints: Vec<f64> = intervals_ms.iter().map(|(s, e)| (s + e) / 2.0).collect();
    let class_coords = epo.axes()[class_axis].clone();
    let channel_coords = epo.axes()[ch_axis].clone();
    Ok(Data::with_all(
        out,
        vec![
            class_coords,
            AxisCoords::Numeric(midpoints),
            channel_coords,
        ],
        vec![CLASS_AXIS.into(), INTERVAL_AXIS.into(), CHANNEL_AXIS.into()],
        vec![UNIT_ENUM.into(), UNIT_MS.into(), UNIT_ENUM.into()],
        epo.extra().clone(),
        None,
    )?)
}

/// Signed squared point-biserial correlation per (time, channel): how well
/// a single value separates the two classes, in [-1, 1].
///
/// `r = sqrt(n1*n2)/(n1+n2) * (mu1 - mu2) / sigma`, with `sigma` the
/// population standard deviation of all values at that point; the output is
/// `sign(r) * r^2`. Points with zero variance map to 0.
pub fn signed_r_squared(epo: &Data) -> Result<Data, FeatureError> {
    let (classes, indices) = class_labels(epo)?;
    if classes.len() != 2 {
        return Err(FeatureError::NotTwoClasses(classes));
    }
    let counts = [
        indices.iter().filter(|&&c| c == 0).count(),
        indices.iter().filter(|&&c| c == 1).count(),
    ];
    for (c, &count) in counts.iter().enumerate() {
        if count < 2 {
            return Err(FeatureError::TooFewEpochsPerClass {
                class: classes[c].clone(),
                got: count,
                needed: 2,
            });
        }
    }
    let class_axis = epo.axis_index(CLASS_AXIS)?;
    let n1 = counts[0] as f64;
    let n2 = counts[1] as f64;
    let n = n1 + n2;
    let scale = (n1 * n2).sqrt() / n;

    let mut shape = epo.shape().to_vec();
    shape.remove(class_axis);
    let mut out = ArrayD::<f64>::zeros(IxDyn(&shape));
    let points: usize = shape.iter().product();
    // per-class partial sums, combined commutatively, so presenting the two
    // classes in the opposite order negates the result bit-for-bit
    let mut sums = vec![[0.0f64; 2]; points];
    let mut sqs = vec![[0.0f64; 2]; points];
    for (e, &class) in indices.iter().enumerate() {
        let epoch = epo.values().index_axis(Axis(class_axis), e);
        let epoch = epoch.as_standard_layout();
        for (p, &v) in epoch.iter().enumerate() {
            sums[p][class] += v;
            sqs[p][class] += v * v;
        }
    }
    let flat = out.as_slice_mut().expect("freshly created standard layout");
    for p in 0..points {
        let all_sum = sums[p][0] + sums[p][1];
        let all_sq = sqs[p][0] + sqs[p][1];
        let var = all_sq / n - (all_sum / n).powi(2);
        if var <= 0.0 {
            flat[p] = 0.0;
            continue;
        }
        let r = scale * (sums[p][0] / n1 - sums[p][1] / n2) / var.sqrt();
        flat[p] = r * r.abs();
    }

    let mut axes = epo.axes().to_vec();
    axes.remove(class_axis);
    let mut names = epo.names().to_vec();
    names.remove(class_axis);
    let mut units = epo.units().to_vec();
    units.remove(class_axis);
    Ok(Data::with_all(
        out,
        axes,
        names,
        units,
        epo.extra().clone(),
        None,
    )?)
}

/// Spatial filters from a generalized eigenproblem.
///
/// Columns of `filters` project multi-channel samples onto components;
/// rows of `patterns` (the inverse-transpose of the filters) describe how
/// each component is expressed across channels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpatialModel {
    /// filters[j] is the j-th filter over channels
    pub filters: Vec<Vec<f64>>,
    /// patterns[j] is the j-th pattern over channels
    pub patterns: Vec<Vec<f64>>,
    pub lambdas: Vec<f64>,
    pub channels: Vec<String>,
}

/// CSP model: variance-ratio eigenvalues in [0, 1], descending.
pub type CspModel = SpatialModel;
/// SPoC model: power/target covariance eigenvalues, descending.
pub type SpocModel = SpatialModel;

impl SpatialModel {
    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    /// Filter matrix with filters as columns (channels x components).
    pub fn filter_matrix(&self) -> Array2<f64> {
        let c = self.n_channels();
        let mut w = Array2::zeros((c, self.filters.len()));
        for (j, f) in self.filters.iter().enumerate() {
            for (i, &v) in f.iter().enumerate() {
                w[(i, j)] = v;
            }
        }
        w
    }
}

/// Centered channel covariance of one epoch (time x channel view).
fn epoch_covariance(x: &ArrayView2<f64>) -> DMatrix<f64> {
    let (n, c) = x.dim();
    let mut means = vec![0.0; c];
    for row in x.outer_iter() {
        for (j, &v) in row.iter().enumerate() {
            means[j] += v;
        }
    }
    for m in &mut means {
        *m /= n as f64;
    }
    let mut cov = DMatrix::zeros(c, c);
    for row in x.outer_iter() {
        for i in 0..c {
            let di = row[i] - means[i];
            for j in i..c {
                cov[(i, j)] += di * (row[j] - means[j]);
            }
        }
    }
    let denom = (n - 1).max(1) as f64;
    for i in 0..c {
        for j in i..c {
            let v = cov[(i, j)] / denom;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    cov
}

/// Epoch values as a (time, channel) view.
fn epoch_view<'a>(
    epo: &'a Data,
    class_axis: usize,
    t_axis: usize,
    e: usize,
) -> ndarray::ArrayBase<ndarray::CowRepr<'a, f64>, ndarray::Ix2> {
    let view = epo.values().index_axis(Axis(class_axis), e);
    let t_in_epoch = t_axis - usize::from(class_axis < t_axis);
    let view2 = view
        .into_dimensionality::<ndarray::Ix2>()
        .expect("epochs are (time, channel) after removing the class axis");
    if t_in_epoch == 0 {
        ndarray::CowArray::from(view2)
    } else {
        ndarray::CowArray::from(view2.reversed_axes())
    }
}

/// Pooled per-class covariances used by [`train_csp`]: every epoch's
/// centered covariance is normalized by its trace, then averaged per class.
pub fn class_covariances(epo: &Data) -> Result<(Array2<f64>, Array2<f64>), FeatureError> {
    let (classes, indices) = class_labels(epo)?;
    if classes.len() != 2 {
        return Err(FeatureError::NotTwoClasses(classes));
    }
    let class_axis = epo.axis_index(CLASS_AXIS)?;
    let t_axis = epo.time_axis()?;
    let c = epo.shape()[epo.channel_axis()?];
    let mut sums = [DMatrix::<f64>::zeros(c, c), DMatrix::<f64>::zeros(c, c)];
    let mut counts = [0usize; 2];
    for (e, &class) in indices.iter().enumerate() {
        let x = epoch_view(epo, class_axis, t_axis, e);
        let cov = epoch_covariance(&x.view());
        let trace = cov.trace();
        if !(trace > 0.0) {
            return Err(FeatureError::ZeroVarianceEpoch(e));
        }
        sums[class] += cov / trace;
        counts[class] += 1;
    }
    for class in 0..2 {
        if counts[class] == 0 {
            return Err(FeatureError::NotTwoClasses(classes));
        }
        sums[class] /= counts[class] as f64;
    }
    let to_nd = |m: &DMatrix<f64>| Array2::from_shape_fn((c, c), |(i, j)| m[(i, j)]);
    Ok((to_nd(&sums[0]), to_nd(&sums[1])))
}

/// Solves `m w = lambda s w` for symmetric `m` and positive-definite `s` by
/// whitening `s` and diagonalizing the whitened `m`. Columns of the result
/// are sorted by descending eigenvalue (ties broken by original position)
/// and satisfy `W^T s W = I`.
fn whitened_generalized_eig(
    m: &DMatrix<f64>,
    s: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, Vec<f64>), ()> {
    let eig_s = s.clone().symmetric_eigen();
    let d_max = eig_s.eigenvalues.iter().fold(0.0f64, |acc, &v| acc.max(v));
    if !(d_max > 0.0) {
        return Err(());
    }
    if eig_s.eigenvalues.iter().any(|&d| d < 1e-10 * d_max) {
        return Err(());
    }
    let c = s.nrows();
    // P = D^{-1/2} U^T whitens s: P s P^T = I
    let mut p = eig_s.eigenvectors.transpose();
    for i in 0..c {
        let scale = 1.0 / eig_s.eigenvalues[i].sqrt();
        for j in 0..c {
            p[(i, j)] *= scale;
        }
    }
    let mut t = &p * m * p.transpose();
    // enforce symmetry against rounding
    for i in 0..c {
        for j in (i + 1)..c {
            let v = (t[(i, j)] + t[(j, i)]) / 2.0;
            t[(i, j)] = v;
            t[(j, i)] = v;
        }
    }
    let eig_t = t.symmetric_eigen();
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&i, &j| {
        eig_t.eigenvalues[j]
            .partial_cmp(&eig_t.eigenvalues[i])
            .unwrap()
            .then(i.cmp(&j))
    });
    let mut w = DMatrix::zeros(c, c);
    let mut lambdas = Vec::with_capacity(c);
    let pt = p.transpose();
    for (col, &src) in order.iter().enumerate() {
        let v = eig_t.eigenvectors.column(src);
        let wcol = &pt * v;
        for i in 0..c {
            w[(i, col)] = wcol[i];
        }
        lambdas.push(eig_t.eigenvalues[src]);
    }
    Ok((w, lambdas))
}

fn model_from_eig(
    w: DMatrix<f64>,
    lambdas: Vec<f64>,
    channels: Vec<String>,
) -> Result<SpatialModel, FeatureError> {
    let c = channels.len();
    let w_inv = w
        .clone()
        .lu()
        .try_inverse()
        .ok_or(FeatureError::SingularCompositeCovariance)?;
    // A = (W^{-1})^T: pattern j is the j-th row of W^{-1}
    let filters: Vec<Vec<f64>> = (0..c)
        .map(|j| (0..c).map(|i| w[(i, j)]).collect())
        .collect();
    let patterns: Vec<Vec<f64>> = (0..c)
        .map(|j| (0..c).map(|i| w_inv[(j, i)]).collect())
        .collect();
    Ok(SpatialModel {
        filters,
        patterns,
        lambdas,
        channels,
    })
}

/// Trains common spatial patterns on two-class epoched data.
///
/// Solves `Σ1 w = λ (Σ1 + Σ2) w` with the per-class covariances of
/// [`class_covariances`]. Filters are sorted by descending λ ∈ [0, 1]:
/// the first columns maximize class-1 variance, the last maximize class-2
/// variance.
pub fn train_csp(epo: &Data) -> Result<CspModel, FeatureError> {
    let (sigma1, sigma2) = class_covariances(epo)?;
    let c = sigma1.nrows();
    let m = DMatrix::from_fn(c, c, |i, j| sigma1[(i, j)]);
    let s = DMatrix::from_fn(c, c, |i, j| sigma1[(i, j)] + sigma2[(i, j)]);
    let (w, lambdas) = whitened_generalized_eig(&m, &s)
        .map_err(|_| FeatureError::SingularCompositeCovariance)?;
    let lambdas = lambdas.into_iter().map(|l| l.clamp(0.0, 1.0)).collect();
    model_from_eig(w, lambdas, epo.channel_names()?.to_vec())
}

/// Projects every epoch through the selected filter columns, yielding
/// `(class, time, component)` data.
pub fn apply_csp(epo: &Data, model: &SpatialModel, columns: &[usize]) -> Result<Data, FeatureError> {
    let c = model.n_channels();
    for &col in columns {
        if col >= model.filters.len() {
            return Err(FeatureError::ColumnOutOfRange {
                column: col,
                channels: model.filters.len(),
            });
        }
    }
    let n_ch = epo.shape()[epo.channel_axis()?];
    if n_ch != c {
        return Err(FeatureError::ChannelCountMismatch {
            expected: c,
            got: n_ch,
        });
    }
    let class_axis = epo.axis_index(CLASS_AXIS)?;
    let t_axis = epo.time_axis()?;
    let n_epochs = epo.shape()[class_axis];
    let n_t = epo.shape()[t_axis];
    let k = columns.len();

    let mut w_sel = Array2::<f64>::zeros((c, k));
    for (j, &col) in columns.iter().enumerate() {
        for i in 0..c {
            w_sel[(i, j)] = model.filters[col][i];
        }
    }

    let mut out = ArrayD::<f64>::zeros(IxDyn(&[n_epochs, n_t, k]));
    for e in 0..n_epochs {
        let x = epoch_view(epo, class_axis, t_axis, e);
        let projected = x.dot(&w_sel);
        let mut slot = out.index_axis_mut(Axis(0), e);
        slot.assign(&projected);
    }

    let class_coords = epo.axes()[class_axis].clone();
    let time_coords = AxisCoords::Numeric(epo.timestamps()?.to_vec());
    let comp_names: Vec<String> = columns.iter().map(|c| format!("csp{c}")).collect();
    Ok(Data::with_all(
        out,
        vec![
            class_coords,
            time_coords,
            AxisCoords::Text(comp_names),
        ],
        vec![CLASS_AXIS.into(), TIME_AXIS.into(), COMPONENT_AXIS.into()],
        vec![UNIT_ENUM.into(), UNIT_MS.into(), UNIT_ENUM.into()],
        epo.extra().clone(),
        None,
    )?)
}

/// Trains source power co-modulation filters against a continuous
/// per-epoch target variable `z`.
///
/// Solves `Cz w = λ C̄ w` where `C̄` is the mean epoch covariance and `Cz`
/// the z-weighted mean (z standardized to zero mean, unit variance).
/// Columns are sorted by descending λ and normalized so `wᵀ C̄ w = 1`.
pub fn train_spoc(epo: &Data, z: &[f64]) -> Result<SpocModel, FeatureError> {
    let class_axis = epo.axis_index(CLASS_AXIS)?;
    let t_axis = epo.time_axis()?;
    let n_epochs = epo.shape()[class_axis];
    if z.len() != n_epochs {
        return Err(FeatureError::LengthMismatch {
            expected: n_epochs,
            got: z.len(),
        });
    }
    if n_epochs == 0 {
        return Err(FeatureError::NoEpochs);
    }
    let mean_z = z.iter().sum::<f64>() / n_epochs as f64;
    let var_z = z.iter().map(|v| (v - mean_z).powi(2)).sum::<f64>() / n_epochs as f64;
    if var_z <= 0.0 {
        return Err(FeatureError::ConstantTarget);
    }
    let sd_z = var_z.sqrt();

    let c = epo.shape()[epo.channel_axis()?];
    let mut c_mean = DMatrix::<f64>::zeros(c, c);
    let mut c_z = DMatrix::<f64>::zeros(c, c);
    for e in 0..n_epochs {
        let x = epoch_view(epo, class_axis, t_axis, e);
        let cov = epoch_covariance(&x.view());
        let ze = (z[e] - mean_z) / sd_z;
        c_mean += &cov;
        c_z += cov * ze;
    }
    c_mean /= n_epochs as f64;
    c_z /= n_epochs as f64;

    let (w, lambdas) =
        whitened_generalized_eig(&c_z, &c_mean).map_err(|_| FeatureError::SingularMeanCovariance)?;
    let model = model_from_eig(w, lambdas, epo.channel_names()?.to_vec())?;
    Ok(model)
}

/// Observations-by-features matrix with class labels, the classifier input.
#[derive(Debug, Clone)]
pub struct FeatureVectors {
    pub values: Array2<f64>,
    /// per-observation index into `class_names`
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
    pub feature_names: Vec<String>,
}

impl FeatureVectors {
    pub fn n_observations(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.values.ncols()
    }
}

fn coord_label(coords: &AxisCoords, i: usize) -> String {
    match coords {
        AxisCoords::Numeric(v) => format!("{}", v[i]),
        AxisCoords::Text(v) => v[i].clone(),
    }
}

/// Flattens everything after the leading observation axis into one feature
/// axis, row-major. Observation labels come from the leading text axis.
pub fn create_feature_vectors(data: &Data) -> Result<FeatureVectors, FeatureError> {
    if data.values().iter().any(|v| !v.is_finite()) {
        return Err(FeatureError::NonFiniteValues);
    }
    let (class_names, labels) = class_labels(data)?;
    let class_axis = data.axis_index(CLASS_AXIS)?;
    let n_obs = data.shape()[class_axis];
    let n_features: usize = data
        .shape()
        .iter()
        .enumerate()
        .filter(|(d, _)| *d != class_axis)
        .map(|(_, &s)| s)
        .product();

    // bring the observation axis to the front, then flatten
    let rank = data.rank();
    let mut perm: Vec<usize> = vec![class_axis];
    perm.extend((0..rank).filter(|&d| d != class_axis));
    let moved = data.values().view().permuted_axes(perm.clone());
    let flat: Vec<f64> = moved.iter().copied().collect();
    let values = Array2::from_shape_vec((n_obs, n_features), flat)
        .expect("flattened length matches");

    // feature names: row-major cross product of the remaining axis labels
    let feature_axes: Vec<usize> = (0..rank).filter(|&d| d != class_axis).collect();
    let mut feature_names = Vec::with_capacity(n_features);
    let mut idx = vec![0usize; feature_axes.len()];
    if n_features > 0 {
        loop {
            let name = feature_axes
                .iter()
                .zip(&idx)
                .map(|(&d, &i)| coord_label(&data.axes()[d], i))
                .collect::<Vec<_>>()
                .join("/");
            feature_names.push(name);
            // increment the mixed-radix counter
            let mut d = feature_axes.len();
            loop {
                if d == 0 {
                    break;
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < data.shape()[feature_axes[d]] {
                    break;
                }
                idx[d] = 0;
                if d == 0 {
                    break;
                }
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    debug_assert_eq!(feature_names.len(), n_features);

    Ok(FeatureVectors {
        values,
        labels,
        class_names,
        feature_names,
    })
}

/// Log-variance of each component per epoch, the classic feature after CSP
/// projection.
pub fn log_variance_features(epo: &Data) -> Result<FeatureVectors, FeatureError> {
    let (class_names, labels) = class_labels(epo)?;
    let class_axis = epo.axis_index(CLASS_AXIS)?;
    let t_axis = epo.time_axis()?;
    let n_epochs = epo.shape()[class_axis];
    let comp_axis = (0..epo.rank())
        .find(|&d| d != class_axis && d != t_axis)
        .expect("epoched data has a component axis");
    let n_comp = epo.shape()[comp_axis];

    let mut values = Array2::<f64>::zeros((n_epochs, n_comp));
    for e in 0..n_epochs {
        let x = epoch_view(epo, class_axis, t_axis, e);
        let n = x.nrows() as f64;
        for j in 0..n_comp {
            let col = x.column(j);
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
            values[(e, j)] = var.max(f64::MIN_POSITIVE).ln();
        }
    }
    let feature_names = (0..n_comp)
        .map(|j| coord_label(&epo.axes()[comp_axis], j))
        .collect();
    Ok(FeatureVectors {
        values,
        labels,
        class_names,
        feature_names,
    })
}
