//! Post-processing and evaluation toolkit for voice conversion output.
//!
//! The centre of the crate is [`warp`]: a first-order all-pass frequency
//! warp applied to mel cepstra, whose warp factor is learned by minimising
//! the squared difference between the warped converted spectrum and the
//! reference spectrum. Around it sit the pieces needed to use it on real
//! audio: WAV and feature-file I/O ([`audio_io`]), STFT and Griffin-Lim
//! ([`dsp`]), mel cepstra and F0 ([`features`]), DTW ([`align`]), MCD and
//! normalised F0 RMSE ([`metrics`]) and a synthetic oracle ([`testkit`]).

// `!(x < y)` is used deliberately so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod align;
pub mod audio_io;
pub mod dsp;
mod error;
pub mod features;
pub mod metrics;
pub mod pipeline;
pub mod profile;
pub mod testkit;
pub mod warp;

pub use error::{Error, Result};
pub use profile::Profile;
