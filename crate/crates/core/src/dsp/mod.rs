//! Short-time spectral analysis and synthesis.

mod griffin_lim;
mod mel;
pub(crate) mod stft;

pub use griffin_lim::{griffin_lim, griffin_lim_with_history, spectral_convergence, InitPhase};
pub use mel::{hz_to_mel, mel_filterbank, mel_to_hz, MelFilterbank};
pub use stft::{hann_window, istft, stft, ComplexSpectrogram, Spectrogram, StftConfig};
