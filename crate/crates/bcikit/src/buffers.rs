//! Streaming containers for online processing.
//!
//! [`RingBuffer`] keeps a fixed-duration tail window of a continuous
//! recording together with the markers that still fall inside it.
//! [`BlockBuffer`] re-chunks arbitrary appends into fixed-size blocks.
//!
//! Both are persistent-style: appends return the updated buffer instead of
//! mutating, so snapshots stay valid and the toolbox-wide purity rule holds.

use ndarray::{concatenate, Axis, Slice};
use thiserror::Error;

use crate::data::{AxisCoords, Data, DataError, Marker, MarkerList};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BufferError {
    #[error("chunk channels {got:?} do not match the buffered channels {expected:?}")]
    ChannelMismatch { expected: Vec<String>, got: Vec<String> },
    #[error("chunk sampling interval {got} ms does not match the buffered interval {expected} ms")]
    SamplingRateMismatch { expected: f64, got: f64 },
    #[error("chunk timestamps must continue the buffered stream (last {last} ms, next {start} ms)")]
    TimeMismatch { last: f64, start: f64 },
    #[error("block size must be at least one sample")]
    ZeroBlockSize,
    #[error(transparent)]
    Data(#[from] DataError),
}

// Relative tolerance for comparing sample intervals across chunk boundaries.
const DT_RTOL: f64 = 1e-6;

#[derive(Debug, Clone)]
struct Stream {
    channels: Vec<String>,
    unit: String,
    // absolute timestamps of retained samples, ms
    times: Vec<f64>,
    // retained samples, row-major time x channel
    rows: Vec<f64>,
    dt_ms: Option<f64>,
}

impl Stream {
    fn new() -> Stream {
        Stream {
            channels: Vec::new(),
            unit: "#".to_string(),
            times: Vec::new(),
            rows: Vec::new(),
            dt_ms: None,
        }
    }

    fn n_samples(&self) -> usize {
        self.times.len()
    }

    fn check_and_learn_dt(&mut self, chunk_times: &[f64]) -> Result<(), BufferError> {
        let mut last = self.times.last().copied();
        for &t in chunk_times {
            if let Some(prev) = last {
                let gap = t - prev;
                if gap <= 0.0 {
                    return Err(BufferError::TimeMismatch { last: prev, start: t });
                }
                match self.dt_ms {
                    Some(dt) => {
                        if (gap - dt).abs() > DT_RTOL * dt {
                            return Err(BufferError::SamplingRateMismatch {
                                expected: dt,
                                got: gap,
                            });
                        }
                    }
                    None => self.dt_ms = Some(gap),
                }
            }
            last = Some(t);
        }
        Ok(())
    }

    fn append(&mut self, chunk: &Data) -> Result<(), BufferError> {
        let names = chunk.channel_names()?;
        if self.times.is_empty() && self.channels.is_empty() {
            self.channels = names.to_vec();
            self.unit = chunk.units()[chunk.channel_axis()?].clone();
        } else if names != self.channels.as_slice() {
            return Err(BufferError::ChannelMismatch {
                expected: self.channels.clone(),
                got: names.to_vec(),
            });
        }
        self.check_and_learn_dt(chunk.timestamps()?)?;
        let t_axis = chunk.time_axis()?;
        let view = if t_axis == 0 {
            chunk.values().view()
        } else {
            chunk.values().view().reversed_axes()
        };
        self.times.extend_from_slice(chunk.timestamps()?);
        for row in view.outer_iter() {
            self.rows.extend(row.iter().copied());
        }
        Ok(())
    }

    /// Drops all samples before index `keep_from`.
    fn trim_front(&mut self, keep_from: usize) {
        if keep_from == 0 {
            return;
        }
        let c = self.channels.len();
        self.times.drain(..keep_from);
        self.rows.drain(..keep_from * c);
    }

    fn make_data(&self, times: Vec<f64>, rows: Vec<f64>) -> Data {
        let c = self.channels.len();
        let n = times.len();
        let values = ndarray::ArrayD::from_shape_vec(ndarray::IxDyn(&[n, c]), rows)
            .expect("row storage matches shape");
        Data::with_all(
            values,
            vec![
                AxisCoords::Numeric(times),
                AxisCoords::Text(self.channels.clone()),
            ],
            vec![crate::data::TIME_AXIS.into(), crate::data::CHANNEL_AXIS.into()],
            vec![crate::data::UNIT_MS.into(), self.unit.clone()],
            Default::default(),
            None,
        )
        .expect("stream contents are consistent by construction")
    }

    /// Snapshot as continuous Data with the time axis re-based to zero.
    fn snapshot(&self) -> Data {
        let t0 = self.times.first().copied().unwrap_or(0.0);
        let times: Vec<f64> = self.times.iter().map(|t| t - t0).collect();
        self.make_data(times, self.rows.clone())
    }
}

/// Fixed-duration tail window over a continuous stream, with marker
/// bookkeeping.
///
/// The capacity is given in milliseconds and converted to a sample count
/// once the sampling interval is known from the appended chunks. Markers
/// whose sample scrolls out of the window are dropped; a marker exactly at
/// the first retained sample survives (half-open eviction).
#[derive(Debug, Clone)]
pub struct RingBuffer {
    capacity_ms: f64,
    stream: Stream,
    // absolute marker times, ms
    markers: Vec<Marker>,
    total_appended: usize,
}

impl RingBuffer {
    pub fn new(capacity_ms: f64) -> RingBuffer {
        RingBuffer {
            capacity_ms,
            stream: Stream::new(),
            markers: Vec::new(),
            total_appended: 0,
        }
    }

    pub fn capacity_ms(&self) -> f64 {
        self.capacity_ms
    }

    /// Samples currently held.
    pub fn len(&self) -> usize {
        self.stream.n_samples()
    }

    pub fn is_empty(&self) -> bool {
        self.stream.n_samples() == 0
    }

    /// Total samples appended over the buffer's lifetime.
    pub fn total_appended(&self) -> usize {
        self.total_appended
    }

    /// Absolute timestamp of the first retained sample.
    pub fn window_start_ms(&self) -> Option<f64> {
        self.stream.times.first().copied()
    }

    /// Absolute timestamp of the newest retained sample.
    pub fn window_end_ms(&self) -> Option<f64> {
        self.stream.times.last().copied()
    }

    /// Appends a chunk and its markers, returning the updated buffer.
    ///
    /// Marker times are on the same clock as the chunk timestamps. After the
    /// append only the last capacity worth of samples is retained and
    /// markers whose time precedes the retained window are discarded.
    pub fn append(&self, chunk: &Data, markers: &MarkerList) -> Result<RingBuffer, BufferError> {
        let mut next = self.clone();
        let n_new = chunk.timestamps()?.len();
        next.stream.append(chunk)?;
        next.total_appended += n_new;
        for m in markers {
            next.markers.push(m.clone());
        }
        if let Some(dt) = next.stream.dt_ms {
            let capacity = (next.capacity_ms / dt + 1e-9).floor().max(0.0) as usize;
            let held = next.stream.n_samples();
            if held > capacity {
                next.stream.trim_front(held - capacity);
            }
        }
        if let Some(&t_first) = next.stream.times.first() {
            next.markers.retain(|m| m.time_ms >= t_first);
        }
        Ok(next)
    }

    /// Snapshot of the stored window, time axis re-based to start at zero
    /// and markers shifted accordingly. Does not consume the buffer.
    pub fn get(&self) -> (Data, MarkerList) {
        let data = self.stream.snapshot();
        let t0 = self.stream.times.first().copied().unwrap_or(0.0);
        let markers = MarkerList::from_markers(
            self.markers
                .iter()
                .map(|m| Marker::new(m.time_ms - t0, m.label.clone()))
                .collect(),
        );
        (data, markers)
    }
}

/// Re-chunks arbitrary appends into blocks of a fixed sample count.
///
/// Every append drains the largest possible multiple of `block_samples`;
/// what remains (always fewer than `block_samples` samples) is retained for
/// the next append.
#[derive(Debug, Clone)]
pub struct BlockBuffer {
    block_samples: usize,
    stream: Stream,
}

impl BlockBuffer {
    pub fn new(block_samples: usize) -> Result<BlockBuffer, BufferError> {
        if block_samples == 0 {
            return Err(BufferError::ZeroBlockSize);
        }
        Ok(BlockBuffer {
            block_samples,
            stream: Stream::new(),
        })
    }

    pub fn block_samples(&self) -> usize {
        self.block_samples
    }

    /// Samples waiting for the next full block.
    pub fn residue_len(&self) -> usize {
        self.stream.n_samples()
    }

    /// Appends a chunk and drains complete blocks.
    ///
    /// The emitted `Data` holds `floor((residue + chunk) / block) * block`
    /// samples (possibly zero) in stream order with their original
    /// timestamps; the remainder stays buffered.
    pub fn append_drain(&self, chunk: &Data) -> Result<(BlockBuffer, Data), BufferError> {
        let mut next = self.clone();
        next.stream.append(chunk)?;
        let total = next.stream.n_samples();
        let emit = (total / next.block_samples) * next.block_samples;
        let times: Vec<f64> = next.stream.times[..emit].to_vec();
        let rows: Vec<f64> = next.stream.rows[..emit * next.stream.channels.len()].to_vec();
        next.stream.trim_front(emit);
        let emitted = next.stream.make_data(times, rows);
        Ok((next, emitted))
    }
}

/// Concatenates continuous chunks along the time axis, keeping the first
/// chunk's metadata. Used by tests and the replay oracle.
pub fn concat_time(chunks: &[Data]) -> Result<Data, BufferError> {
    assert!(!chunks.is_empty(), "need at least one chunk");
    let first = &chunks[0];
    let t_axis = first.time_axis()?;
    let mut times = Vec::new();
    let mut views = Vec::new();
    for c in chunks {
        times.extend_from_slice(c.timestamps()?);
        views.push(c.values().view());
    }
    let channels = first.channel_names()?.to_vec();
    let values = concatenate(Axis(t_axis), &views).map_err(|_| BufferError::ChannelMismatch {
        expected: channels,
        got: Vec::new(),
    })?;
    Ok(first.with_replaced(values, vec![(t_axis, AxisCoords::Numeric(times))])?)
}

/// Last `n` samples of a continuous recording, timestamps preserved.
pub fn tail(data: &Data, n: usize) -> Result<Data, BufferError> {
    let t_axis = data.time_axis()?;
    let len = data.shape()[t_axis];
    let start = len.saturating_sub(n);
    let values = data
        .values()
        .slice_axis(Axis(t_axis), Slice::from(start..len))
        .to_owned();
    let times = data.timestamps()?[start..].to_vec();
    Ok(data.with_replaced(values, vec![(t_axis, AxisCoords::Numeric(times))])?)
}
