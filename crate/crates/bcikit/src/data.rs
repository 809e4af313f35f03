//! The labeled tensor container used by every other module.
//!
//! A [`Data`] bundles an n-dimensional `f64` array with per-dimension
//! metadata: a name, a unit, and a coordinate array (numeric timestamps or
//! text labels) for each axis. Continuous recordings are `(time, channel)`,
//! epoched recordings `(class, time, channel)`; operations locate axes by
//! name rather than position so other layouts keep working.
//!
//! All operations in this crate are pure: they take `&Data` and return a
//! fresh `Data`, never touching the input. Unknown attributes placed in the
//! open `extra` map are carried through every operation verbatim.

use std::collections::BTreeMap;

use ndarray::ArrayD;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Conventional name of the time axis.
pub const TIME_AXIS: &str = "time";
/// Conventional name of the channel axis.
pub const CHANNEL_AXIS: &str = "channel";
/// Conventional name of the class/epoch axis of epoched data.
pub const CLASS_AXIS: &str = "class";
/// Conventional name of the frequency axis of spectra.
pub const FREQUENCY_AXIS: &str = "frequency";
/// Conventional name of the component axis after spatial filtering.
pub const COMPONENT_AXIS: &str = "component";
/// Conventional name of the interval axis produced by jumping means.
pub const INTERVAL_AXIS: &str = "interval";

/// Pseudo-unit for axes that enumerate things (channel names, class names).
pub const UNIT_ENUM: &str = "#";
/// Unit string for millisecond time axes.
pub const UNIT_MS: &str = "ms";
/// Unit string for frequency axes.
pub const UNIT_HZ: &str = "Hz";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("rank mismatch: tensor has {rank} dimensions but {what} has {got} entries")]
    RankMismatch {
        what: &'static str,
        rank: usize,
        got: usize,
    },
    #[error("dimension mismatch on axis {axis}: tensor extent is {expected} but axis coordinates have length {got}")]
    DimensionMismatch {
        axis: usize,
        expected: usize,
        got: usize,
    },
    #[error("axis '{0}' not found")]
    AxisNotFound(String),
    #[error("axis name '{0}' occurs more than once")]
    AmbiguousAxis(String),
    #[error("numeric coordinates on axis {axis} must be finite")]
    NonFiniteCoordinates { axis: usize },
    #[error("timestamps on axis {axis} must be strictly increasing")]
    NonIncreasingTimestamps { axis: usize },
    #[error("axis {axis} holds {found} coordinates, expected {expected}")]
    WrongCoordinateKind {
        axis: usize,
        expected: &'static str,
        found: &'static str,
    },
    #[error("time axis is not uniformly sampled")]
    IrregularSampling,
    #[error("need at least two samples to derive a sampling interval")]
    TooFewTimestamps,
    #[error("marker time {0} is not finite")]
    NonFiniteMarkerTime(f64),
}

/// Coordinate array of one dimension: timestamps/frequencies or text labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "lowercase")]
pub enum AxisCoords {
    Numeric(Vec<f64>),
    Text(Vec<String>),
}

impl AxisCoords {
    pub fn len(&self) -> usize {
        match self {
            AxisCoords::Numeric(v) => v.len(),
            AxisCoords::Text(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AxisCoords::Numeric(_) => "numeric",
            AxisCoords::Text(_) => "text",
        }
    }

    pub fn as_numeric(&self) -> Option<&[f64]> {
        match self {
            AxisCoords::Numeric(v) => Some(v),
            AxisCoords::Text(_) => None,
        }
    }

    pub fn as_text(&self) -> Option<&[String]> {
        match self {
            AxisCoords::Text(v) => Some(v),
            AxisCoords::Numeric(_) => None,
        }
    }

    pub fn text(labels: &[&str]) -> AxisCoords {
        AxisCoords::Text(labels.iter().map(|s| s.to_string()).collect())
    }

    fn bit_eq(&self, other: &AxisCoords) -> bool {
        match (self, other) {
            (AxisCoords::Numeric(a), AxisCoords::Numeric(b)) => {
                a.len() == b.len()
                    && a.iter()
                        .zip(b.iter())
                        .all(|(x, y)| x.to_bits() == y.to_bits())
            }
            (AxisCoords::Text(a), AxisCoords::Text(b)) => a == b,
            _ => false,
        }
    }
}

/// A time-stamped label on a continuous recording. Times are in
/// milliseconds on the same clock as the recording's time axis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Marker {
    pub time_ms: f64,
    pub label: String,
}

impl Marker {
    pub fn new(time_ms: f64, label: impl Into<String>) -> Marker {
        Marker {
            time_ms,
            label: label.into(),
        }
    }
}

/// Ordered list of markers, sorted by time with insertion order preserved
/// among equal times.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MarkerList(Vec<Marker>);

impl MarkerList {
    pub fn new() -> MarkerList {
        MarkerList(Vec::new())
    }

    /// Builds a list from arbitrary order; sorting is stable so entries with
    /// equal times keep their original relative order.
    pub fn from_markers(mut markers: Vec<Marker>) -> MarkerList {
        markers.sort_by(|a, b| a.time_ms.partial_cmp(&b.time_ms).expect("finite marker time"));
        MarkerList(markers)
    }

    /// Inserts after all existing entries with the same time.
    pub fn push(&mut self, marker: Marker) {
        let at = self
            .0
            .partition_point(|m| m.time_ms <= marker.time_ms);
        self.0.insert(at, marker);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Marker> {
        self.0.iter()
    }

    pub fn entries(&self) -> &[Marker] {
        &self.0
    }

    /// Copy with every time shifted by `offset_ms`.
    pub fn shifted(&self, offset_ms: f64) -> MarkerList {
        MarkerList(
            self.0
                .iter()
                .map(|m| Marker::new(m.time_ms + offset_ms, m.label.clone()))
                .collect(),
        )
    }

    /// Copy keeping only markers at or after `from_ms` (half-open eviction:
    /// a marker exactly at the boundary survives).
    pub fn from_time(&self, from_ms: f64) -> MarkerList {
        MarkerList(
            self.0
                .iter()
                .filter(|m| m.time_ms >= from_ms)
                .cloned()
                .collect(),
        )
    }

    fn bit_eq(&self, other: &MarkerList) -> bool {
        self.0.len() == other.0.len()
            && self
                .0
                .iter()
                .zip(other.0.iter())
                .all(|(a, b)| a.time_ms.to_bits() == b.time_ms.to_bits() && a.label == b.label)
    }
}

impl<'a> IntoIterator for &'a MarkerList {
    type Item = &'a Marker;
    type IntoIter = std::slice::Iter<'a, Marker>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl FromIterator<Marker> for MarkerList {
    fn from_iter<T: IntoIterator<Item = Marker>>(iter: T) -> MarkerList {
        MarkerList::from_markers(iter.into_iter().collect())
    }
}

/// Value stored in the open `extra` attribute map.
///
/// This mirrors JSON, except that `Float` may hold non-finite numbers in
/// memory; serialization to disk rejects those (see `io::save_data`).
/// Equality on floats is bitwise.
#[derive(Debug, Clone)]
pub enum ExtraValue {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
    List(Vec<ExtraValue>),
    Map(BTreeMap<String, ExtraValue>),
}

impl PartialEq for ExtraValue {
    fn eq(&self, other: &ExtraValue) -> bool {
        use ExtraValue::*;
        match (self, other) {
            (Null, Null) => true,
            (Bool(a), Bool(b)) => a == b,
            (Int(a), Int(b)) => a == b,
            (Float(a), Float(b)) => a.to_bits() == b.to_bits(),
            (Text(a), Text(b)) => a == b,
            (List(a), List(b)) => a == b,
            (Map(a), Map(b)) => a == b,
            _ => false,
        }
    }
}

impl ExtraValue {
    /// Converts to JSON; fails on non-finite floats, which JSON cannot hold.
    pub fn to_json(&self) -> Option<serde_json::Value> {
        use ExtraValue::*;
        Some(match self {
            Null => serde_json::Value::Null,
            Bool(b) => serde_json::Value::Bool(*b),
            Int(i) => serde_json::Value::from(*i),
            Float(f) => serde_json::Value::Number(serde_json::Number::from_f64(*f)?),
            Text(s) => serde_json::Value::String(s.clone()),
            List(xs) => {
                serde_json::Value::Array(xs.iter().map(|x| x.to_json()).collect::<Option<_>>()?)
            }
            Map(m) => serde_json::Value::Object(
                m.iter()
                    .map(|(k, v)| Some((k.clone(), v.to_json()?)))
                    .collect::<Option<_>>()?,
            ),
        })
    }

    pub fn from_json(value: &serde_json::Value) -> ExtraValue {
        use serde_json::Value;
        match value {
            Value::Null => ExtraValue::Null,
            Value::Bool(b) => ExtraValue::Bool(*b),
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    ExtraValue::Int(i)
                } else {
                    ExtraValue::Float(n.as_f64().unwrap_or(f64::NAN))
                }
            }
            Value::String(s) => ExtraValue::Text(s.clone()),
            Value::Array(xs) => ExtraValue::List(xs.iter().map(ExtraValue::from_json).collect()),
            Value::Object(m) => ExtraValue::Map(
                m.iter()
                    .map(|(k, v)| (k.clone(), ExtraValue::from_json(v)))
                    .collect(),
            ),
        }
    }
}

impl From<&str> for ExtraValue {
    fn from(s: &str) -> ExtraValue {
        ExtraValue::Text(s.to_string())
    }
}

impl From<String> for ExtraValue {
    fn from(s: String) -> ExtraValue {
        ExtraValue::Text(s)
    }
}

impl From<f64> for ExtraValue {
    fn from(f: f64) -> ExtraValue {
        ExtraValue::Float(f)
    }
}

impl From<i64> for ExtraValue {
    fn from(i: i64) -> ExtraValue {
        ExtraValue::Int(i)
    }
}

impl From<bool> for ExtraValue {
    fn from(b: bool) -> ExtraValue {
        ExtraValue::Bool(b)
    }
}

/// Open attribute map carried verbatim through every operation.
pub type ExtraMap = BTreeMap<String, ExtraValue>;

/// n-dimensional labeled data: the universal carrier for continuous signals,
/// epochs, spectra and feature maps.
#[derive(Debug, Clone)]
pub struct Data {
    values: ArrayD<f64>,
    axes: Vec<AxisCoords>,
    names: Vec<String>,
    units: Vec<String>,
    extra: ExtraMap,
    markers: Option<MarkerList>,
}

impl Data {
    /// Builds a validated `Data` from a tensor and per-dimension metadata.
    ///
    /// Rejects any disagreement between the tensor shape and the metadata
    /// lengths, non-finite numeric coordinates, and time axes that are not
    /// strictly increasing.
    pub fn new(
        values: ArrayD<f64>,
        axes: Vec<AxisCoords>,
        names: Vec<&str>,
        units: Vec<&str>,
    ) -> Result<Data, DataError> {
        Data::with_all(
            values,
            axes,
            names.into_iter().map(String::from).collect(),
            units.into_iter().map(String::from).collect(),
            ExtraMap::new(),
            None,
        )
    }

    /// Full constructor, used by operations to carry metadata through.
    pub fn with_all(
        values: ArrayD<f64>,
        axes: Vec<AxisCoords>,
        names: Vec<String>,
        units: Vec<String>,
        extra: ExtraMap,
        markers: Option<MarkerList>,
    ) -> Result<Data, DataError> {
        let rank = values.ndim();
        if axes.len() != rank {
            return Err(DataError::RankMismatch {
                what: "axes",
                rank,
                got: axes.len(),
            });
        }
        if names.len() != rank {
            return Err(DataError::RankMismatch {
                what: "names",
                rank,
                got: names.len(),
            });
        }
        if units.len() != rank {
            return Err(DataError::RankMismatch {
                what: "units",
                rank,
                got: units.len(),
            });
        }
        for (d, coords) in axes.iter().enumerate() {
            let expected = values.shape()[d];
            if coords.len() != expected {
                return Err(DataError::DimensionMismatch {
                    axis: d,
                    expected,
                    got: coords.len(),
                });
            }
            if let AxisCoords::Numeric(ts) = coords {
                if ts.iter().any(|t| !t.is_finite()) {
                    return Err(DataError::NonFiniteCoordinates { axis: d });
                }
                if names[d] == TIME_AXIS && ts.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(DataError::NonIncreasingTimestamps { axis: d });
                }
            }
        }
        if let Some(ml) = &markers {
            for m in ml {
                if !m.time_ms.is_finite() {
                    return Err(DataError::NonFiniteMarkerTime(m.time_ms));
                }
            }
        }
        Ok(Data {
            values,
            axes,
            names,
            units,
            extra,
            markers,
        })
    }

    pub fn values(&self) -> &ArrayD<f64> {
        &self.values
    }

    pub fn shape(&self) -> &[usize] {
        self.values.shape()
    }

    pub fn rank(&self) -> usize {
        self.values.ndim()
    }

    pub fn axes(&self) -> &[AxisCoords] {
        &self.axes
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn units(&self) -> &[String] {
        &self.units
    }

    pub fn extra(&self) -> &ExtraMap {
        &self.extra
    }

    pub fn markers(&self) -> Option<&MarkerList> {
        self.markers.as_ref()
    }

    /// Consuming builder: adds one `extra` attribute.
    pub fn with_extra(mut self, key: impl Into<String>, value: impl Into<ExtraValue>) -> Data {
        self.extra.insert(key.into(), value.into());
        self
    }

    /// Consuming builder: replaces the whole `extra` map.
    pub fn with_extra_map(mut self, extra: ExtraMap) -> Data {
        self.extra = extra;
        self
    }

    /// Consuming builder: attaches markers.
    pub fn with_markers(mut self, markers: MarkerList) -> Data {
        self.markers = Some(markers);
        self
    }

    /// Consuming builder: drops markers (epoched outputs have none).
    pub fn without_markers(mut self) -> Data {
        self.markers = None;
        self
    }

    /// Decomposes into parts; `Data::with_all` on the result rebuilds an
    /// equal value.
    pub fn to_parts(
        &self,
    ) -> (
        ArrayD<f64>,
        Vec<AxisCoords>,
        Vec<String>,
        Vec<String>,
        ExtraMap,
        Option<MarkerList>,
    ) {
        (
            self.values.clone(),
            self.axes.clone(),
            self.names.clone(),
            self.units.clone(),
            self.extra.clone(),
            self.markers.clone(),
        )
    }

    /// Index of the uniquely named dimension.
    pub fn axis_index(&self, name: &str) -> Result<usize, DataError> {
        let mut hits = self.names.iter().enumerate().filter(|(_, n)| *n == name);
        match (hits.next(), hits.next()) {
            (Some((i, _)), None) => Ok(i),
            (Some(_), Some(_)) => Err(DataError::AmbiguousAxis(name.to_string())),
            (None, _) => Err(DataError::AxisNotFound(name.to_string())),
        }
    }

    pub fn time_axis(&self) -> Result<usize, DataError> {
        self.axis_index(TIME_AXIS)
    }

    pub fn channel_axis(&self) -> Result<usize, DataError> {
        self.axis_index(CHANNEL_AXIS)
    }

    /// Timestamps of the time axis, in milliseconds.
    pub fn timestamps(&self) -> Result<&[f64], DataError> {
        let d = self.time_axis()?;
        self.axes[d]
            .as_numeric()
            .ok_or(DataError::WrongCoordinateKind {
                axis: d,
                expected: "numeric",
                found: self.axes[d].kind(),
            })
    }

    /// Channel names along the channel axis.
    pub fn channel_names(&self) -> Result<&[String], DataError> {
        let d = self.channel_axis()?;
        self.axes[d].as_text().ok_or(DataError::WrongCoordinateKind {
            axis: d,
            expected: "text",
            found: self.axes[d].kind(),
        })
    }

    /// Sampling interval of the time axis in milliseconds. Requires at least
    /// two samples and uniform spacing (relative tolerance 1e-6).
    pub fn sampling_interval_ms(&self) -> Result<f64, DataError> {
        let ts = self.timestamps()?;
        if ts.len() < 2 {
            return Err(DataError::TooFewTimestamps);
        }
        let dt = (ts[ts.len() - 1] - ts[0]) / (ts.len() - 1) as f64;
        for w in ts.windows(2) {
            if ((w[1] - w[0]) - dt).abs() > 1e-6 * dt.abs() {
                return Err(DataError::IrregularSampling);
            }
        }
        Ok(dt)
    }

    /// Sampling rate of the time axis in Hz.
    pub fn sampling_rate_hz(&self) -> Result<f64, DataError> {
        Ok(1000.0 / self.sampling_interval_ms()?)
    }

    /// Exact equality: shapes, bitwise values, axes, names, units, markers
    /// and extra attributes must all match. Tolerant comparison is a test
    /// helper, not part of this operation.
    pub fn data_equal(&self, other: &Data) -> bool {
        self.values.shape() == other.values.shape()
            && self
                .values
                .iter()
                .zip(other.values.iter())
                .all(|(a, b)| a.to_bits() == b.to_bits())
            && self.axes.len() == other.axes.len()
            && self
                .axes
                .iter()
                .zip(other.axes.iter())
                .all(|(a, b)| a.bit_eq(b))
            && self.names == other.names
            && self.units == other.units
            && self.extra == other.extra
            && match (&self.markers, &other.markers) {
                (None, None) => true,
                (Some(a), Some(b)) => a.bit_eq(b),
                _ => false,
            }
    }

    /// Fresh `Data` with new values (same rank); dimensions listed in
    /// `changed_axes` get new coordinates, all others keep their metadata.
    /// `extra` is copied verbatim and markers are carried through.
    pub fn with_replaced(
        &self,
        new_values: ArrayD<f64>,
        changed_axes: Vec<(usize, AxisCoords)>,
    ) -> Result<Data, DataError> {
        let rank = self.rank();
        if new_values.ndim() != rank {
            return Err(DataError::RankMismatch {
                what: "axes",
                rank: new_values.ndim(),
                got: rank,
            });
        }
        let mut axes = self.axes.clone();
        for (d, coords) in changed_axes {
            if d >= rank {
                return Err(DataError::AxisNotFound(format!("axis index {d}")));
            }
            axes[d] = coords;
        }
        Data::with_all(
            new_values,
            axes,
            self.names.clone(),
            self.units.clone(),
            self.extra.clone(),
            self.markers.clone(),
        )
    }
}

impl PartialEq for Data {
    fn eq(&self, other: &Data) -> bool {
        self.data_equal(other)
    }
}

/// Free-function spelling of [`Data::data_equal`].
pub fn data_equal(a: &Data, b: &Data) -> bool {
    a.data_equal(b)
}

/// Largest absolute difference between two equally shaped tensors; `None`
/// when shapes differ. Test helper for tolerance-based comparison.
pub fn max_abs_diff(a: &Data, b: &Data) -> Option<f64> {
    if a.shape() != b.shape() {
        return None;
    }
    Some(
        a.values()
            .iter()
            .zip(b.values().iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max),
    )
}

/// Builds a continuous `(time, channel)` container from rows of samples.
pub fn continuous(
    rows: Vec<Vec<f64>>,
    timestamps: Vec<f64>,
    channels: &[&str],
) -> Result<Data, DataError> {
    let n = rows.len();
    let c = channels.len();
    let mut flat = Vec::with_capacity(n * c);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != c {
            return Err(DataError::DimensionMismatch {
                axis: 1,
                expected: c,
                got: rows[i].len(),
            });
        }
        flat.extend_from_slice(row);
    }
    let values = ArrayD::from_shape_vec(ndarray::IxDyn(&[n, c]), flat)
        .expect("shape matches by construction");
    Data::new(
        values,
        vec![AxisCoords::Numeric(timestamps), AxisCoords::text(channels)],
        vec![TIME_AXIS, CHANNEL_AXIS],
        vec![UNIT_MS, UNIT_ENUM],
    )
}

/// Evenly spaced timestamps `0, 1000/fs, 2*1000/fs, ...` in milliseconds.
pub fn time_axis_ms(n_samples: usize, fs_hz: f64) -> Vec<f64> {
    (0..n_samples).map(|i| i as f64 * 1000.0 / fs_hz).collect()
}
