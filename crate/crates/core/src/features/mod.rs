//! Mel cepstra and F0 contours.

mod cepstra;
mod dct;
mod f0;

pub use cepstra::{extract_mel_cepstra, extract_with_spectrum, MelCepstra, LOG_FLOOR};
pub use dct::Dct;
pub use f0::{estimate_f0, F0Contour, F0Range};
