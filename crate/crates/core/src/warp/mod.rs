//! Learned all-pass frequency warping of mel cepstra.
//!
//! A warp factor `alpha` bends the frequency axis through the first-order
//! all-pass map [`phase_warp`]. The warp matrix `D` evaluates the cepstral
//! cosine basis at warped frequencies and the reference matrix `D*` at the
//! original ones, so `D c` is the converted envelope read through the warp
//! and `D* c*` the reference envelope. Learning picks the `alpha` that makes
//! the two agree over DTW-aligned frames; applying it rewrites the spectral
//! envelope of the converted audio and resynthesises with Griffin-Lim.

mod allpass;
mod apply;
mod basis;
mod learn;
mod model;
mod objective;

pub use allpass::{alpha_from_freqs, phase_warp, phase_warp_dalpha, warp_frequency};
pub use apply::{apply_warp, apply_warp_to_cepstra, warped_log_spectrogram, ApplyOptions};
pub use basis::{build_reference_matrix, build_warp_matrix, fold_phase, Basis, WarpFactor, WarpGeometry};
pub use learn::{learn_warp, learn_warp_along, LearnOptions, WarpMode, ALPHA_LIMIT};
pub use model::WarpModel;
pub use objective::{warp_cost, WarpObjective};
