//! BCI signal processing toolkit.
//!
//! Everything revolves around [`Data`], an n-dimensional `f64` tensor with
//! named, labeled axes. Modules cover the stages of a brain-computer
//! interface pipeline:
//!
//! - [`data`] — the labeled container, markers, and the purity contract
//! - [`buffers`] — ring and block buffers for online chunked processing
//! - [`sigproc`] — channel selection, Butterworth IIR filters, subsampling,
//!   epoching, baseline removal, spectra and spectrograms
//! - [`features`] — classwise averages, jumping means, signed r², CSP, SPoC
//! - [`ml`] — linear discriminant analysis with and without shrinkage
//! - [`io`] — the on-disk container format, ASCII import, electrode layouts
//! - [`viz`] — scalp topographies, time courses, signed-r² maps
//! - [`online`] — the replay amplifier, the online pipeline runner, and the
//!   two end-to-end example pipelines (ERP speller, CSP motor imagery)
//! - [`synth`] — synthetic recordings with known ground truth
//!
//! The `examples/` directory contains one runnable example per capability;
//! start with `cargo run --example data_container`.

pub mod buffers;
pub mod data;
pub mod features;
pub mod io;
pub mod ml;
pub mod online;
pub mod sigproc;
pub mod synth;
pub mod viz;

pub use data::{
    data_equal, max_abs_diff, AxisCoords, Data, DataError, ExtraMap, ExtraValue, Marker,
    MarkerList,
};
