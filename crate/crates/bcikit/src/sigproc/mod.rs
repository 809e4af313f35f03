//! Core DSP operations on [`Data`]: channel selection, IIR filtering,
//! subsampling, marker-based segmentation, baseline removal, spectra.
//!
//! All operations are pure; the only state that ever exists is the explicit
//! [`FilterState`](filter::FilterState) value threaded through chunked
//! filtering.

mod filter;
mod spectral;

pub use filter::{
    apply_filter, design_bandpass, filter_epochs, filtfilt, FilterState, IirCoefficients,
};
pub use spectral::{spectrogram, spectrum, spectrum_windowed, Window};

use ndarray::{Axis, Slice};
use thiserror::Error;

use crate::data::{
    AxisCoords, Data, DataError, MarkerList, CHANNEL_AXIS, CLASS_AXIS, TIME_AXIS, UNIT_ENUM,
    UNIT_MS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SigprocError {
    #[error("no channels left after selection with patterns {0:?}")]
    NoChannelsLeft(Vec<String>),
    #[error("invalid band: need 0 < low < high < fs/2 and order >= 1 (low {low}, high {high}, fs {fs}, order {order})")]
    InvalidBand {
        low: f64,
        high: f64,
        fs: f64,
        order: usize,
    },
    #[error("designed filter is unstable")]
    UnstableFilter,
    #[error("filter state shape ({state_channels} channels, depth {state_depth}) does not match data ({channels} channels, depth {depth})")]
    StateShapeMismatch {
        state_channels: usize,
        state_depth: usize,
        channels: usize,
        depth: usize,
    },
    #[error("signal of {len} samples is too short for zero-phase filtering (needs more than {min})")]
    SignalTooShort { len: usize, min: usize },
    #[error("expected continuous (time, channel) data, got rank {0}")]
    NotContinuous(usize),
    #[error("sampling rate {fs} Hz is not an integer multiple of target {target} Hz")]
    NonIntegerFactor { fs: f64, target: f64 },
    #[error("epoch interval [{start}, {end}) is empty")]
    EmptyInterval { start: f64, end: f64 },
    #[error("reference interval [{start}, {end}) contains no samples")]
    EmptyReference { start: f64, end: f64 },
    #[error("need at least two samples for a spectrum")]
    TooFewSamples,
    #[error("window of {window} samples exceeds the signal length {len}")]
    WindowTooLarge { window: usize, len: usize },
    #[error("overlap fraction {0} must lie in [0, 1)")]
    BadOverlap(f64),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Shell-style glob match supporting `*` (any run) and `?` (any one char).
pub(crate) fn glob_match(pattern: &str, name: &str) -> bool {
    fn rec(p: &[u8], n: &[u8]) -> bool {
        match (p.first(), n.first()) {
            (None, None) => true,
            (Some(b'*'), _) => rec(&p[1..], n) || (!n.is_empty() && rec(p, &n[1..])),
            (Some(b'?'), Some(_)) => rec(&p[1..], &n[1..]),
            (Some(c), Some(d)) if c == d => rec(&p[1..], &n[1..]),
            _ => false,
        }
    }
    rec(pattern.as_bytes(), name.as_bytes())
}

/// Keeps (or with `invert`, drops) the channels whose names match any of
/// the glob patterns. Channel order is preserved.
pub fn select_channels(
    data: &Data,
    patterns: &[&str],
    invert: bool,
) -> Result<Data, SigprocError> {
    let ch_axis = data.channel_axis()?;
    let names = data.channel_names()?;
    let keep: Vec<usize> = names
        .iter()
        .enumerate()
        .filter(|(_, name)| {
            let hit = patterns.iter().any(|p| glob_match(p, name));
            hit != invert
        })
        .map(|(i, _)| i)
        .collect();
    if keep.is_empty() {
        return Err(SigprocError::NoChannelsLeft(
            patterns.iter().map(|s| s.to_string()).collect(),
        ));
    }
    let values = data.values().select(Axis(ch_axis), &keep);
    let kept_names: Vec<String> = keep.iter().map(|&i| names[i].clone()).collect();
    Ok(data.with_replaced(values, vec![(ch_axis, AxisCoords::Text(kept_names))])?)
}

/// Keeps every k-th sample starting at index 0, where `k = fs / target_fs`
/// must be an integer. The time axis is decimated identically; markers are
/// time-based and carried through unchanged.
///
/// This is pure decimation: no anti-alias filter is applied. Callers must
/// low-pass filter beforehand when the signal has content above the new
/// Nyquist frequency.
pub fn subsample(data: &Data, target_fs_hz: f64) -> Result<Data, SigprocError> {
    let fs = data.sampling_rate_hz()?;
    let factor = fs / target_fs_hz;
    let k = factor.round();
    if (factor - k).abs() > 1e-6 * factor.abs() || k < 1.0 {
        return Err(SigprocError::NonIntegerFactor {
            fs,
            target: target_fs_hz,
        });
    }
    let k = k as usize;
    decimate(data, k)
}

/// Stride-`k` decimation along the time axis (any rank).
pub fn decimate(data: &Data, k: usize) -> Result<Data, SigprocError> {
    let t_axis = data.time_axis()?;
    if k == 1 {
        return Ok(data.clone());
    }
    let values = data
        .values()
        .slice_axis(Axis(t_axis), Slice::new(0, None, k as isize))
        .to_owned();
    let times: Vec<f64> = data.timestamps()?.iter().copied().step_by(k).collect();
    Ok(data.with_replaced(values, vec![(t_axis, AxisCoords::Numeric(times))])?)
}

// Boundary guard for assigning float timestamps to half-open windows.
// Keeps window membership stable against sub-nanosecond rounding noise.
const T_EPS_MS: f64 = 1e-6;

/// Indices of timestamps falling in `[start, end)` (with a small guard so
/// rounding noise never flips boundary membership).
pub(crate) fn time_window_indices(ts: &[f64], start: f64, end: f64) -> std::ops::Range<usize> {
    let lo = ts.partition_point(|&t| t < start - T_EPS_MS);
    let hi = ts.partition_point(|&t| t < end - T_EPS_MS);
    lo..hi
}

/// Cuts marker-aligned epochs out of a continuous recording.
///
/// Every marker whose label matches a `class_defs` pattern becomes one
/// epoch covering `[marker + start, marker + end)` milliseconds, exactly
/// `round((end-start) * fs / 1000)` samples. Markers whose window is not
/// fully inside the recording are skipped. Epochs are stacked in marker
/// order on a leading class axis labeled with the mapped class names; the
/// epoch time axis is relative to the marker.
pub fn segment(
    data: &Data,
    markers: &MarkerList,
    class_defs: &[(&str, &str)],
    interval_ms: (f64, f64),
) -> Result<Data, SigprocError> {
    let (start, end) = interval_ms;
    if start >= end {
        return Err(SigprocError::EmptyInterval { start, end });
    }
    let dt = data.sampling_interval_ms()?;
    let ts = data.timestamps()?;
    let t_axis = data.time_axis()?;
    let n_epoch = ((end - start) / dt).round() as usize;

    let mut labels: Vec<String> = Vec::new();
    let mut slices: Vec<ndarray::ArrayD<f64>> = Vec::new();
    for m in markers {
        let Some(class) = class_defs
            .iter()
            .find(|(pat, _)| glob_match(pat, &m.label))
            .map(|(_, class)| *class)
        else {
            continue;
        };
        let t_start = m.time_ms + start;
        let first = ((t_start - ts[0]) / dt - T_EPS_MS).ceil() as i64;
        if first < 0 || (first as usize) + n_epoch > ts.len() {
            continue;
        }
        let first = first as usize;
        let window = data
            .values()
            .slice_axis(Axis(t_axis), Slice::from(first..first + n_epoch));
        // epochs are stacked (time, channel) regardless of the input order
        let epoch = if t_axis == 0 {
            window.to_owned()
        } else {
            window.reversed_axes().to_owned()
        };
        slices.push(epoch.insert_axis(Axis(0)));
        labels.push(class.to_string());
    }

    let channels = data.channel_names()?.to_vec();
    let n_ch = channels.len();
    let rel_time: Vec<f64> = (0..n_epoch).map(|j| start + j as f64 * dt).collect();
    let values = if slices.is_empty() {
        ndarray::ArrayD::zeros(ndarray::IxDyn(&[0, n_epoch, n_ch]))
    } else {
        let views: Vec<_> = slices.iter().map(|s| s.view()).collect();
        ndarray::concatenate(Axis(0), &views).expect("epochs share a shape")
    };
    let epo = Data::with_all(
        values,
        vec![
            AxisCoords::Text(labels),
            AxisCoords::Numeric(rel_time),
            AxisCoords::Text(channels),
        ],
        vec![CLASS_AXIS.into(), TIME_AXIS.into(), CHANNEL_AXIS.into()],
        vec![UNIT_ENUM.into(), UNIT_MS.into(), UNIT_ENUM.into()],
        data.extra().clone(),
        None,
    )?;
    Ok(epo)
}

/// Subtracts, per epoch and channel, the mean over the reference interval
/// `[start, end)` of the epoch time axis. Idempotent.
pub fn remove_baseline(epo: &Data, ref_interval_ms: (f64, f64)) -> Result<Data, SigprocError> {
    let t_axis = epo.time_axis()?;
    let ts = epo.timestamps()?;
    let win = time_window_indices(ts, ref_interval_ms.0, ref_interval_ms.1);
    if win.is_empty() {
        return Err(SigprocError::EmptyReference {
            start: ref_interval_ms.0,
            end: ref_interval_ms.1,
        });
    }
    let reference = epo
        .values()
        .slice_axis(Axis(t_axis), Slice::from(win))
        .mean_axis(Axis(t_axis))
        .expect("non-empty reference window");
    let mut values = epo.values().clone();
    for mut lane in values.axis_iter_mut(Axis(t_axis)) {
        lane -= &reference;
    }
    Ok(epo.with_replaced(values, vec![])?)
}
