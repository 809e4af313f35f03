//! Butterworth band-pass design and stateful IIR filtering.
//!
//! Design follows the classical route: analog low-pass prototype,
//! low-pass-to-band-pass transform at the pre-warped band edges, bilinear
//! transform into the z-domain, then expansion of the zero/pole/gain form
//! into transfer-function coefficients.
//!
//! Application is the direct-form-II-transposed recursion, run
//! independently per channel. The per-channel delay line is exposed as
//! [`FilterState`] so a stream may be filtered chunk by chunk with results
//! identical to a single pass.

use ndarray::Axis;
use num_complex::Complex64;

use super::SigprocError;
use crate::data::Data;

/// Digital IIR transfer-function coefficients with design metadata.
///
/// `b` are the feed-forward and `a` the feedback coefficients with `a[0]`
/// normalized to one; the filter is guaranteed stable at design time.
#[derive(Debug, Clone, PartialEq)]
pub struct IirCoefficients {
    b: Vec<f64>,
    a: Vec<f64>,
    low_hz: f64,
    high_hz: f64,
    order: usize,
    fs_hz: f64,
}

impl IirCoefficients {
    /// Wraps raw coefficients, normalizing `a[0]` to one and verifying
    /// stability. Band metadata is zeroed.
    pub fn from_ba(b: &[f64], a: &[f64], fs_hz: f64) -> Result<IirCoefficients, SigprocError> {
        assert!(!a.is_empty() && a[0] != 0.0, "a[0] must be non-zero");
        let a0 = a[0];
        let a: Vec<f64> = a.iter().map(|v| v / a0).collect();
        let b: Vec<f64> = b.iter().map(|v| v / a0).collect();
        if !schur_stable(&a) {
            return Err(SigprocError::UnstableFilter);
        }
        Ok(IirCoefficients {
            b,
            a,
            low_hz: 0.0,
            high_hz: 0.0,
            order: 0,
            fs_hz,
        })
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn band_hz(&self) -> (f64, f64) {
        (self.low_hz, self.high_hz)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn fs_hz(&self) -> f64 {
        self.fs_hz
    }

    /// Delay-line length of the direct-form-II-transposed realization.
    pub fn state_depth(&self) -> usize {
        self.b.len().max(self.a.len()) - 1
    }

    /// Magnitude of the frequency response at `f_hz`.
    pub fn magnitude_at(&self, f_hz: f64) -> f64 {
        let w = 2.0 * std::f64::consts::PI * f_hz / self.fs_hz;
        let z = Complex64::new(0.0, -w).exp();
        let eval = |coeffs: &[f64]| {
            coeffs
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
        };
        (eval(&self.b) / eval(&self.a)).norm()
    }
}

/// Designs a stable Butterworth band-pass filter.
///
/// `order` is the prototype order; the resulting digital filter has
/// `2 * order` poles. Band edges are pre-warped so the bilinear transform
/// places them exactly.
pub fn design_bandpass(
    low_hz: f64,
    high_hz: f64,
    fs_hz: f64,
    order: usize,
) -> Result<IirCoefficients, SigprocError> {
    if !(low_hz > 0.0 && low_hz < high_hz && high_hz < fs_hz / 2.0) || order < 1 {
        return Err(SigprocError::InvalidBand {
            low: low_hz,
            high: high_hz,
            fs: fs_hz,
            order,
        });
    }

    // Analog Butterworth prototype: `order` poles on the unit circle's left
    // half, no zeros, unit gain.
    let n = order as i64;
    let mut poles: Vec<Complex64> = Vec::with_capacity(order);
    let mut m = -n + 1;
    while m < n {
        let theta = std::f64::consts::PI * m as f64 / (2.0 * n as f64);
        poles.push(-(Complex64::new(0.0, theta).exp()));
        m += 2;
    }
    let mut gain = 1.0;

    // Pre-warped band edges on the internal fs=2 grid used by the bilinear
    // transform below.
    let warp = |f: f64| 4.0 * (std::f64::consts::PI * f / fs_hz).tan();
    let (w1, w2) = (warp(low_hz), warp(high_hz));
    let wo = (w1 * w2).sqrt();
    let bw = w2 - w1;

    // Low-pass to band-pass: each pole splits into a pair around ±wo,
    // `order` zeros appear at the origin.
    let mut bp_poles = Vec::with_capacity(2 * order);
    for p in &poles {
        let scaled = p * bw / 2.0;
        let shift = (scaled * scaled - wo * wo).sqrt();
        bp_poles.push(scaled + shift);
        bp_poles.push(scaled - shift);
    }
    let mut bp_zeros = vec![Complex64::new(0.0, 0.0); order];
    gain *= bw.powi(order as i32);
    poles = bp_poles;

    // Bilinear transform at fs=2: s -> (4 + s) / (4 - s); zeros left at
    // infinity land on the Nyquist point z = -1.
    let fs2 = Complex64::new(4.0, 0.0);
    let num: Complex64 = bp_zeros.iter().map(|z| fs2 - z).product();
    let den: Complex64 = poles.iter().map(|p| fs2 - p).product();
    gain *= (num / den).re;
    let z_zeros: Vec<Complex64> = bp_zeros
        .iter()
        .map(|z| (fs2 + z) / (fs2 - z))
        .chain(std::iter::repeat(Complex64::new(-1.0, 0.0)).take(order))
        .collect();
    let z_poles: Vec<Complex64> = poles.iter().map(|p| (fs2 + p) / (fs2 - p)).collect();
    bp_zeros.clear();

    if z_poles.iter().any(|p| p.norm() >= 1.0) {
        return Err(SigprocError::UnstableFilter);
    }

    let b: Vec<f64> = poly(&z_zeros).iter().map(|c| (c * gain).re).collect();
    let a: Vec<f64> = poly(&z_poles).iter().map(|c| c.re).collect();
    debug_assert!((a[0] - 1.0).abs() < 1e-12);

    if !schur_stable(&a) {
        return Err(SigprocError::UnstableFilter);
    }
    Ok(IirCoefficients {
        b,
        a,
        low_hz,
        high_hz,
        order,
        fs_hz,
    })
}

/// Expands a monic polynomial from its roots, highest power first.
fn poly(roots: &[Complex64]) -> Vec<Complex64> {
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        coeffs.push(Complex64::new(0.0, 0.0));
        for i in (1..coeffs.len()).rev() {
            let prev = coeffs[i - 1];
            coeffs[i] = coeffs[i] - r * prev;
        }
    }
    coeffs
}

/// Schur-Cohn stability test: all roots of the monic polynomial `a` lie
/// strictly inside the unit circle iff every reflection coefficient has
/// magnitude below one.
fn schur_stable(a: &[f64]) -> bool {
    let mut coeffs = a.to_vec();
    while coeffs.len() > 1 {
        let m = coeffs.len() - 1;
        let k = coeffs[m];
        if k.abs() >= 1.0 {
            return false;
        }
        let denom = 1.0 - k * k;
        let next: Vec<f64> = (0..m)
            .map(|i| (coeffs[i] - k * coeffs[m - i]) / denom)
            .collect();
        coeffs = next;
    }
    true
}

/// Per-channel delay lines for chunked filtering.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterState {
    // channel-major: state[ch][tap]
    state: Vec<Vec<f64>>,
}

impl FilterState {
    /// Zero state for `channels` channels of a given filter.
    pub fn zeros(coeffs: &IirCoefficients, channels: usize) -> FilterState {
        FilterState {
            state: vec![vec![0.0; coeffs.state_depth()]; channels],
        }
    }

    pub fn channels(&self) -> usize {
        self.state.len()
    }

    pub fn depth(&self) -> usize {
        self.state.first().map_or(0, Vec::len)
    }
}

fn df2t_channel(b: &[f64], a: &[f64], x: &[f64], z: &mut [f64], y: &mut [f64]) {
    let depth = z.len();
    for (i, &xi) in x.iter().enumerate() {
        let yi = b[0] * xi + if depth > 0 { z[0] } else { 0.0 };
        for t in 0..depth {
            let carry = if t + 1 < depth { z[t + 1] } else { 0.0 };
            let bn = b.get(t + 1).copied().unwrap_or(0.0);
            let an = a.get(t + 1).copied().unwrap_or(0.0);
            z[t] = carry + bn * xi - an * yi;
        }
        y[i] = yi;
    }
}

/// Filters a continuous `(time, channel)` recording along time,
/// independently per channel, using the direct-form-II-transposed
/// recursion.
///
/// With `state = None` the delay lines start at zero. The returned state
/// continues the stream: filtering a signal in chunks while threading the
/// state equals filtering it in one pass.
pub fn apply_filter(
    data: &Data,
    coeffs: &IirCoefficients,
    state: Option<&FilterState>,
) -> Result<(Data, FilterState), SigprocError> {
    let t_axis = data.time_axis()?;
    if data.rank() != 2 {
        // epoched input goes through filter_epochs
        return Err(SigprocError::NotContinuous(data.rank()));
    }
    let ch_axis = 1 - t_axis;
    let n_ch = data.shape()[ch_axis];
    let depth = coeffs.state_depth();
    let mut st = match state {
        Some(s) => {
            if s.channels() != n_ch || s.depth() != depth {
                return Err(SigprocError::StateShapeMismatch {
                    state_channels: s.channels(),
                    state_depth: s.depth(),
                    channels: n_ch,
                    depth,
                });
            }
            s.clone()
        }
        None => FilterState::zeros(coeffs, n_ch),
    };

    let mut values = data.values().clone();
    let n = data.shape()[t_axis];
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    for ch in 0..n_ch {
        {
            let lane = values.index_axis(Axis(ch_axis), ch);
            for (i, v) in lane.iter().enumerate() {
                x[i] = *v;
            }
        }
        df2t_channel(coeffs.b(), coeffs.a(), &x, &mut st.state[ch], &mut y);
        let mut lane = values.index_axis_mut(Axis(ch_axis), ch);
        for (i, v) in lane.iter_mut().enumerate() {
            *v = y[i];
        }
    }
    let out = data.with_replaced(values, vec![])?;
    Ok((out, st))
}

/// Filters every epoch of a `(class, time, channel)` container along time
/// with zero initial conditions per epoch.
pub fn filter_epochs(epo: &Data, coeffs: &IirCoefficients) -> Result<Data, SigprocError> {
    let t_axis = epo.time_axis()?;
    let n = epo.shape()[t_axis];
    let mut values = epo.values().clone();
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    // every (epoch, channel) pair is one independent lane along time
    for mut lane in values.lanes_mut(Axis(t_axis)) {
        for (i, v) in lane.iter().enumerate() {
            x[i] = *v;
        }
        let mut z = vec![0.0; coeffs.state_depth()];
        df2t_channel(coeffs.b(), coeffs.a(), &x, &mut z, &mut y);
        for (i, v) in lane.iter_mut().enumerate() {
            *v = y[i];
        }
    }
    Ok(epo.with_replaced(values, vec![])?)
}

/// Steady-state delay-line contents for a unit-step input: filtering a
/// constant `c` with initial state `c * zi` produces `c` from the first
/// output sample on. Suppresses startup transients in [`filtfilt`].
fn steady_state_gain(b: &[f64], a: &[f64]) -> Vec<f64> {
    let m = b.len().max(a.len());
    let depth = m - 1;
    if depth == 0 {
        return Vec::new();
    }
    let bn = |i: usize| b.get(i).copied().unwrap_or(0.0);
    let an = |i: usize| a.get(i).copied().unwrap_or(0.0);
    // (I - A^T) zi = b[1..] - a[1..] * b[0], with A the companion matrix of a
    let mut lhs = nalgebra::DMatrix::<f64>::identity(depth, depth);
    for i in 0..depth {
        lhs[(i, 0)] += an(i + 1);
        if i + 1 < depth {
            lhs[(i, i + 1)] -= 1.0;
        }
    }
    let rhs = nalgebra::DVector::<f64>::from_fn(depth, |i, _| bn(i + 1) - an(i + 1) * bn(0));
    lhs.lu()
        .solve(&rhs)
        .map(|v| v.iter().copied().collect())
        .expect("stable filter has a steady state")
}

/// Zero-phase filtering: forward pass, reverse, forward pass, reverse.
///
/// The signal is extended at both ends by an odd-symmetric reflection of
/// `3 * state_depth` samples, each pass starts from the steady state
/// matched to its first sample, and the extensions are trimmed from the
/// result. Phase distortion is zero; non-causal, offline only.
pub fn filtfilt(data: &Data, coeffs: &IirCoefficients) -> Result<Data, SigprocError> {
    let t_axis = data.time_axis()?;
    let n = data.shape()[t_axis];
    let ext = 3 * coeffs.state_depth();
    if n <= ext {
        return Err(SigprocError::SignalTooShort { len: n, min: ext });
    }
    let zi = steady_state_gain(coeffs.b(), coeffs.a());
    let mut values = data.values().clone();
    let mut x = vec![0.0; n + 2 * ext];
    for mut lane in values.lanes_mut(Axis(t_axis)) {
        for (i, v) in lane.iter().enumerate() {
            x[ext + i] = *v;
        }
        let first = x[ext];
        let last = x[ext + n - 1];
        for i in 0..ext {
            x[i] = 2.0 * first - x[2 * ext - i];
            x[ext + n + i] = 2.0 * last - x[ext + n - 2 - i];
        }
        let mut y = vec![0.0; x.len()];
        let mut z: Vec<f64> = zi.iter().map(|v| v * x[0]).collect();
        df2t_channel(coeffs.b(), coeffs.a(), &x, &mut z, &mut y);
        y.reverse();
        let mut z: Vec<f64> = zi.iter().map(|v| v * y[0]).collect();
        let mut y2 = vec![0.0; y.len()];
        df2t_channel(coeffs.b(), coeffs.a(), &y, &mut z, &mut y2);
        y2.reverse();
        for (i, v) in lane.iter_mut().enumerate() {
            *v = y2[ext + i];
        }
    }
    Ok(data.with_replaced(values, vec![])?)
}

/// Splits a continuous recording into consecutive time chunks of the given
/// lengths (test and replay helper).
pub fn split_at_lengths(data: &Data, lengths: &[usize]) -> Vec<Data> {
    let t_axis = data.time_axis().expect("continuous data");
    let ts = data.timestamps().expect("numeric time axis");
    let mut out = Vec::new();
    let mut start = 0;
    for &len in lengths {
        let end = (start + len).min(ts.len());
        let values = data
            .values()
            .slice_axis(Axis(t_axis), ndarray::Slice::from(start..end))
            .to_owned();
        let times = ts[start..end].to_vec();
        out.push(
            data.with_replaced(
                values,
                vec![(t_axis, crate::data::AxisCoords::Numeric(times))],
            )
            .expect("chunk metadata is consistent"),
        );
        start = end;
        if start >= ts.len() {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{continuous, data_equal, max_abs_diff, time_axis_ms};

    fn sine(f_hz: f64, fs_hz: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * f_hz * i as f64 / fs_hz).sin())
            .collect()
    }

    fn one_channel(vals: Vec<f64>, fs: f64) -> Data {
        let n = vals.len();
        continuous(
            vals.into_iter().map(|v| vec![v]).collect(),
            time_axis_ms(n, fs),
            &["c0"],
        )
        .unwrap()
    }

    #[test]
    fn broadband_design_passes_center_frequency() {
        let c = design_bandpass(0.1, 60.0, 240.0, 5).unwrap();
        assert_eq!(c.b().len(), 11);
        assert_eq!(c.a().len(), 11);
        assert!((c.a()[0] - 1.0).abs() < 1e-12);
        let peak = (0..400)
            .map(|i| 0.1 + (60.0 - 0.1) * i as f64 / 399.0)
            .map(|f| c.magnitude_at(f))
            .fold(0.0, f64::max);
        let center = (0.1f64 * 60.0).sqrt();
        let db = 20.0 * (c.magnitude_at(center) / peak).log10();
        assert!(db >= -3.1 && db <= 1e-9, "center response {db} dB");
    }

    #[test]
    fn narrow_band_design_attenuates_out_of_band() {
        let c = design_bandpass(8.0, 15.0, 100.0, 5).unwrap();
        let peak = (0..300)
            .map(|i| 8.0 + 7.0 * i as f64 / 299.0)
            .map(|f| c.magnitude_at(f))
            .fold(0.0, f64::max);
        assert!(c.magnitude_at(11.0) >= 0.89 * peak);
        assert!(c.magnitude_at(50.0) <= 0.01);
    }

    #[test]
    fn inverted_band_rejected() {
        assert!(matches!(
            design_bandpass(60.0, 0.1, 240.0, 5),
            Err(SigprocError::InvalidBand { .. })
        ));
        assert!(matches!(
            design_bandpass(1.0, 130.0, 240.0, 5),
            Err(SigprocError::InvalidBand { .. })
        ));
        assert!(matches!(
            design_bandpass(1.0, 30.0, 240.0, 0),
            Err(SigprocError::InvalidBand { .. })
        ));
    }

    #[test]
    fn designs_across_orders_are_stable() {
        for order in 1..=8 {
            let c = design_bandpass(4.0, 30.0, 200.0, order).unwrap();
            // impulse response must decay
            let impulse: Vec<f64> = std::iter::once(1.0)
                .chain(std::iter::repeat(0.0).take(4999))
                .collect();
            let d = one_channel(impulse, 200.0);
            let (y, _) = apply_filter(&d, &c, None).unwrap();
            let yv: Vec<f64> = y.values().iter().copied().collect();
            let tail = yv[yv.len() - 100..]
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(tail < 1e-6, "order {order} tail {tail}");
        }
    }

    #[test]
    fn identity_filter_is_identity() {
        let c = IirCoefficients::from_ba(&[1.0], &[1.0], 100.0).unwrap();
        let d = one_channel(sine(7.0, 100.0, 64), 100.0);
        let (y, _) = apply_filter(&d, &c, None).unwrap();
        assert!(data_equal(&y, &d));
    }

    #[test]
    fn from_ba_rejects_unstable() {
        assert!(matches!(
            IirCoefficients::from_ba(&[1.0], &[1.0, -1.5], 100.0),
            Err(SigprocError::UnstableFilter)
        ));
    }

    #[test]
    fn band_pass_rejects_dc() {
        let c = design_bandpass(1.0, 10.0, 100.0, 4).unwrap();
        let d = one_channel(vec![1.0; 3000], 100.0);
        let (y, _) = apply_filter(&d, &c, None).unwrap();
        let yv: Vec<f64> = y.values().iter().copied().collect();
        let tail = yv[yv.len() - 50..]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(tail < 1e-6, "tail magnitude {tail}");
    }

    #[test]
    fn chunked_filtering_matches_single_pass() {
        let c = design_bandpass(2.0, 20.0, 100.0, 5).unwrap();
        let vals: Vec<f64> = (0..500)
            .map(|i| (i as f64 * 0.37).sin() + 0.2 * ((i * i) as f64 * 0.011).cos())
            .collect();
        let d = one_channel(vals, 100.0);
        let (whole, _) = apply_filter(&d, &c, None).unwrap();
        for split in [1usize, 13, 250, 499] {
            let chunks = split_at_lengths(&d, &[split, 500 - split]);
            let (y1, st) = apply_filter(&chunks[0], &c, None).unwrap();
            let (y2, _) = apply_filter(&chunks[1], &c, Some(&st)).unwrap();
            let rejoined = crate::buffers::concat_time(&[y1, y2]).unwrap();
            assert!(max_abs_diff(&whole, &rejoined).unwrap() < 1e-12);
        }
    }

    #[test]
    fn state_shape_mismatch_rejected() {
        let c = design_bandpass(2.0, 20.0, 100.0, 5).unwrap();
        let d = one_channel(sine(5.0, 100.0, 32), 100.0);
        let st = FilterState::zeros(&c, 3);
        assert!(matches!(
            apply_filter(&d, &c, Some(&st)),
            Err(SigprocError::StateShapeMismatch { .. })
        ));
    }

    #[test]
    fn filtering_is_linear() {
        let c = design_bandpass(2.0, 20.0, 100.0, 4).unwrap();
        let x = one_channel(sine(5.0, 100.0, 256), 100.0);
        let y = one_channel(sine(11.0, 100.0, 256), 100.0);
        let (alpha, beta) = (1.7, -0.4);
        let combined_vals: Vec<f64> = x
            .values()
            .iter()
            .zip(y.values().iter())
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        let combined = one_channel(combined_vals, 100.0);
        let (fx, _) = apply_filter(&x, &c, None).unwrap();
        let (fy, _) = apply_filter(&y, &c, None).unwrap();
        let (fc, _) = apply_filter(&combined, &c, None).unwrap();
        let err = fc
            .values()
            .iter()
            .zip(fx.values().iter().zip(fy.values().iter()))
            .map(|(c, (a, b))| (c - (alpha * a + beta * b)).abs())
            .fold(0.0f64, f64::max);
        assert!(err < 1e-10);
    }

    #[test]
    fn filtfilt_has_zero_phase_in_passband() {
        let c = design_bandpass(5.0, 15.0, 100.0, 4).unwrap();
        // 8 Hz at 100 Hz: period 12.5 samples, so lags within +-6 samples
        // are unambiguous
        let x = sine(8.0, 100.0, 600);
        let d = one_channel(x.clone(), 100.0);
        let y = filtfilt(&d, &c).unwrap();
        let yv: Vec<f64> = y.values().iter().copied().collect();
        // cross-correlation peak lag between input and output must be zero
        let mut best = (i64::MIN, f64::MIN);
        for lag in -6i64..=6 {
            let mut acc = 0.0;
            for i in 100..500usize {
                let j = i as i64 + lag;
                acc += x[i] * yv[j as usize];
            }
            if acc > best.1 {
                best = (lag, acc);
            }
        }
        assert_eq!(best.0, 0, "cross-correlation peak at lag {}", best.0);

        // the causal single pass, by contrast, must show a nonzero lag
        let (causal, _) = apply_filter(&d, &c, None).unwrap();
        let cv: Vec<f64> = causal.values().iter().copied().collect();
        let mut best = (i64::MIN, f64::MIN);
        for lag in -6i64..=6 {
            let mut acc = 0.0;
            for i in 100..500usize {
                acc += x[i] * cv[(i as i64 + lag) as usize];
            }
            if acc > best.1 {
                best = (lag, acc);
            }
        }
        assert_ne!(best.0, 0, "causal filter should delay the sinusoid");
    }

    #[test]
    fn filtfilt_commutes_with_time_reversal() {
        // The operator is palindromic up to the boundary transients that the
        // odd extension suppresses; those decay like pole_radius^distance
        // (~0.92 here), so the interior must match to full precision.
        let c = design_bandpass(5.0, 15.0, 100.0, 3).unwrap();
        let n = 2000;
        let vals: Vec<f64> = (0..n)
            .map(|i| (i as f64 * 0.17).sin() * (i as f64 * 0.013).cos())
            .collect();
        let d = one_channel(vals.clone(), 100.0);
        let y = filtfilt(&d, &c).unwrap();
        let mut rev_vals = vals;
        rev_vals.reverse();
        let rev = one_channel(rev_vals, 100.0);
        let y_rev = filtfilt(&rev, &c).unwrap();
        let mut rev_back: Vec<f64> = y_rev.values().iter().copied().collect();
        rev_back.reverse();
        let forward: Vec<f64> = y.values().iter().copied().collect();
        let interior = forward[500..n - 500]
            .iter()
            .zip(&rev_back[500..n - 500])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(interior < 1e-12, "interior palindromic error {interior}");
        let overall = forward
            .iter()
            .zip(&rev_back)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(overall < 0.1, "boundary transient error {overall}");
    }

    #[test]
    fn filtfilt_rejects_short_signals() {
        let c = design_bandpass(5.0, 15.0, 100.0, 5).unwrap();
        let d = one_channel(vec![1.0, 2.0], 100.0);
        assert!(matches!(
            filtfilt(&d, &c),
            Err(SigprocError::SignalTooShort { .. })
        ));
    }

    #[test]
    fn epoch_filtering_matches_per_epoch_continuous() {
        let c = design_bandpass(5.0, 15.0, 100.0, 3).unwrap();
        let e0: Vec<f64> = sine(10.0, 100.0, 50);
        let e1: Vec<f64> = sine(7.0, 100.0, 50);
        let mut vals = e0.clone();
        vals.extend(&e1);
        let values =
            ndarray::ArrayD::from_shape_vec(ndarray::IxDyn(&[2, 50, 1]), vals).unwrap();
        let epo = Data::new(
            values,
            vec![
                crate::data::AxisCoords::text(&["a", "b"]),
                crate::data::AxisCoords::Numeric(time_axis_ms(50, 100.0)),
                crate::data::AxisCoords::text(&["c0"]),
            ],
            vec!["class", "time", "channel"],
            vec!["#", "ms", "#"],
        )
        .unwrap();
        let out = filter_epochs(&epo, &c).unwrap();
        let (f0, _) = apply_filter(&one_channel(e0, 100.0), &c, None).unwrap();
        let (f1, _) = apply_filter(&one_channel(e1, 100.0), &c, None).unwrap();
        let got0: Vec<f64> = out
            .values()
            .index_axis(Axis(0), 0)
            .iter()
            .copied()
            .collect();
        let want0: Vec<f64> = f0.values().iter().copied().collect();
        assert_eq!(got0, want0);
        let got1: Vec<f64> = out
            .values()
            .index_axis(Axis(0), 1)
            .iter()
            .copied()
            .collect();
        let want1: Vec<f64> = f1.values().iter().copied().collect();
        assert_eq!(got1, want1);
    }
}
