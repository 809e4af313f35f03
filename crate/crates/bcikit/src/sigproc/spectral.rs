//! One-sided amplitude spectra and short-time spectrograms.

use ndarray::{ArrayD, Axis, IxDyn, Slice};
use rustfft::{num_complex::Complex, FftPlanner};

use super::SigprocError;
use crate::data::{AxisCoords, Data, CHANNEL_AXIS, FREQUENCY_AXIS, TIME_AXIS, UNIT_HZ, UNIT_MS};

/// Taper applied before the discrete Fourier transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    #[default]
    Hann,
    Rectangular,
}

impl Window {
    fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; n],
            Window::Hann => (0..n)
                .map(|i| {
                    if n < 2 {
                        1.0
                    } else {
                        0.5 * (1.0
                            - (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
                    }
                })
                .collect(),
        }
    }
}

/// Number of one-sided bins for an `n`-point transform.
fn one_sided_len(n: usize) -> usize {
    n / 2 + 1
}

/// One-sided amplitude of a windowed frame: bins scaled by `2/N` except DC
/// and (for even N) Nyquist, which get `1/N`.
fn one_sided_amplitude(frame: &[f64]) -> Vec<f64> {
    let n = frame.len();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let mut buf: Vec<Complex<f64>> = frame.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fft.process(&mut buf);
    let n_freq = one_sided_len(n);
    (0..n_freq)
        .map(|k| {
            let full = k == 0 || (n % 2 == 0 && k == n / 2);
            let scale = if full { 1.0 } else { 2.0 };
            buf[k].norm() * scale / n as f64
        })
        .collect()
}

/// Applies `f` to every lane along `axis`, producing lanes of `out_len`.
fn map_axis_lanes(
    values: &ArrayD<f64>,
    axis: usize,
    out_len: usize,
    mut f: impl FnMut(&[f64], &mut Vec<f64>),
) -> ArrayD<f64> {
    let rank = values.ndim();
    // move the processed axis last
    let mut perm: Vec<usize> = (0..rank).filter(|&d| d != axis).collect();
    perm.push(axis);
    let moved = values.view().permuted_axes(perm.clone());
    let moved = moved.as_standard_layout();
    let n = values.shape()[axis];
    let outer: usize = moved.len() / n.max(1);

    let mut out_flat = Vec::with_capacity(outer * out_len);
    let mut lane_out = Vec::with_capacity(out_len);
    let flat = moved.as_slice().expect("standard layout");
    for row in 0..outer {
        lane_out.clear();
        f(&flat[row * n..(row + 1) * n], &mut lane_out);
        debug_assert_eq!(lane_out.len(), out_len);
        out_flat.extend_from_slice(&lane_out);
    }

    let mut moved_shape: Vec<usize> = perm[..rank - 1]
        .iter()
        .map(|&d| values.shape()[d])
        .collect();
    moved_shape.push(out_len);
    let moved_out = ArrayD::from_shape_vec(IxDyn(&moved_shape), out_flat)
        .expect("flat buffer matches shape");
    // undo the permutation
    let mut inverse = vec![0usize; rank];
    for (new_pos, &old_axis) in perm.iter().enumerate() {
        inverse[old_axis] = new_pos;
    }
    moved_out.view().permuted_axes(inverse).to_owned()
}

/// One-sided amplitude spectrum per channel with the default Hann window.
///
/// The time axis is replaced by a frequency axis running from 0 to the
/// Nyquist frequency; all other dimensions (e.g. a class axis of epoched
/// data) pass through unchanged.
pub fn spectrum(data: &Data) -> Result<Data, SigprocError> {
    spectrum_windowed(data, Window::Hann)
}

/// [`spectrum`] with an explicit window choice.
pub fn spectrum_windowed(data: &Data, window: Window) -> Result<Data, SigprocError> {
    let t_axis = data.time_axis()?;
    let n = data.shape()[t_axis];
    if n < 2 {
        return Err(SigprocError::TooFewSamples);
    }
    let fs = data.sampling_rate_hz()?;
    let taper = window.coefficients(n);
    let n_freq = one_sided_len(n);
    let values = map_axis_lanes(data.values(), t_axis, n_freq, |lane, out| {
        let frame: Vec<f64> = lane.iter().zip(&taper).map(|(x, w)| x * w).collect();
        out.extend(one_sided_amplitude(&frame));
    });

    let freqs: Vec<f64> = (0..n_freq).map(|k| k as f64 * fs / n as f64).collect();
    let (_, _, mut names, mut units, extra, _) = data.to_parts();
    names[t_axis] = FREQUENCY_AXIS.into();
    units[t_axis] = UNIT_HZ.into();
    let mut axes = data.axes().to_vec();
    axes[t_axis] = AxisCoords::Numeric(freqs);
    Ok(Data::with_all(values, axes, names, units, extra, None)?)
}

/// Short-time Fourier magnitude with a Hann window.
///
/// Frames of `window_samples` samples advance by
/// `hop = max(1, floor(window * (1 - overlap)))`; the segment count is
/// `1 + floor((N - window) / hop)`. Returns `(time, frequency, channel)`
/// with the time axis at the center of each frame.
pub fn spectrogram(
    data: &Data,
    window_samples: usize,
    overlap_fraction: f64,
) -> Result<Data, SigprocError> {
    let t_axis = data.time_axis()?;
    if data.rank() != 2 {
        return Err(SigprocError::NotContinuous(data.rank()));
    }
    let n = data.shape()[t_axis];
    if window_samples > n || window_samples < 2 {
        return Err(SigprocError::WindowTooLarge {
            window: window_samples,
            len: n,
        });
    }
    if !(0.0..1.0).contains(&overlap_fraction) {
        return Err(SigprocError::BadOverlap(overlap_fraction));
    }
    let fs = data.sampling_rate_hz()?;
    let ts = data.timestamps()?;
    let hop = (((window_samples as f64) * (1.0 - overlap_fraction)).floor() as usize).max(1);
    let n_segments = 1 + (n - window_samples) / hop;
    let taper = Window::Hann.coefficients(window_samples);
    let n_freq = one_sided_len(window_samples);

    let channels = data.channel_names()?.to_vec();
    let n_ch = channels.len();
    let mut out = ArrayD::zeros(IxDyn(&[n_segments, n_freq, n_ch]));
    let mut centers = Vec::with_capacity(n_segments);
    let mut frame = vec![0.0; window_samples];
    for s in 0..n_segments {
        let start = s * hop;
        centers.push((ts[start] + ts[start + window_samples - 1]) / 2.0);
        for ch in 0..n_ch {
            let lane = data
                .values()
                .slice_axis(Axis(t_axis), Slice::from(start..start + window_samples));
            let lane = lane.index_axis(Axis(if t_axis == 0 { 1 } else { 0 }), ch);
            for (i, v) in lane.iter().enumerate() {
                frame[i] = v * taper[i];
            }
            for (k, amp) in one_sided_amplitude(&frame).into_iter().enumerate() {
                out[IxDyn(&[s, k, ch])] = amp;
            }
        }
    }

    let freqs: Vec<f64> = (0..n_freq)
        .map(|k| k as f64 * fs / window_samples as f64)
        .collect();
    Ok(Data::with_all(
        out,
        vec![
            AxisCoords::Numeric(centers),
            AxisCoords::Numeric(freqs),
            AxisCoords::Text(channels),
        ],
        vec![TIME_AXIS.into(), FREQUENCY_AXIS.into(), CHANNEL_AXIS.into()],
        vec![UNIT_MS.into(), UNIT_HZ.into(), "#".into()],
        data.extra().clone(),
        None,
    )?)
}
