//! C ABI for `vcwarp`.
//!
//! Objects cross the boundary as opaque handles created by `vcw_*` functions
//! and released with the matching `*_free`. Every fallible call returns a
//! [`VcwStatus`]; on failure, [`vcw_last_error`] describes the error on the
//! calling thread. Panics are caught and reported as `VCW_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use vcwarp::audio_io::{read_wav, write_wav, Waveform};
use vcwarp::features::extract_mel_cepstra;
use vcwarp::metrics::evaluate_pair;
use vcwarp::warp::{apply_warp, learn_warp, ApplyOptions, LearnOptions, WarpMode, WarpModel};
use vcwarp::{Error, Profile};

/// Result of a fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VcwStatus {
    Ok = 0,
    /// Null pointer, bad UTF-8, out-of-range value or mismatched inputs.
    InvalidArgument = 1,
    /// The file system refused a read or write.
    Io = 2,
    /// A file was readable but not a valid WAV, feature file or warp JSON.
    Format = 3,
    /// The inputs produced a degenerate or non-finite computation.
    Numerical = 4,
    /// The library panicked; this is a bug.
    Panic = 5,
}

/// Warp-learning mode.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VcwMode {
    Scalar = 0,
    PerBand = 1,
}

/// Evaluation summary filled in by `vcw_evaluate`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VcwEvalReport {
    pub mcd_db: f64,
    pub f0_rmse_norm: f64,
    pub n_aligned_frames: usize,
    pub n_covoiced_frames: usize,
    /// Non-zero when no aligned frame pair was voiced on both sides.
    pub f0_degenerate: u8,
    pub dtw_cost: f64,
}

/// Opaque mono waveform.
pub struct VcwWaveform {
    inner: Waveform,
}

/// Opaque learned warp.
pub struct VcwWarpModel {
    inner: WarpModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

fn status_of(e: &Error) -> VcwStatus {
    match e {
        Error::Io(_) => VcwStatus::Io,
        Error::MalformedWav(_)
        | Error::UnsupportedEncoding(_)
        | Error::BadMagic(_)
        | Error::TruncatedFile { .. }
        | Error::Json(_) => VcwStatus::Format,
        e if e.is_numerical() => VcwStatus::Numerical,
        _ => VcwStatus::InvalidArgument,
    }
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Error>) -> VcwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            VcwStatus::Ok
        }
        Ok(Err(e)) => {
            set_last_error(&format!("{}: {e}", e.kind()));
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic");
            VcwStatus::Panic
        }
    }
}

fn null_error(what: &str) -> Error {
    Error::InvalidArgument(format!("{what} is null"))
}

/// # Safety
/// `p` must be null or point to a NUL-terminated string.
unsafe fn path_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Error> {
    if p.is_null() {
        return Err(null_error(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Error::InvalidArgument(format!("{what} is not UTF-8")))
}

/// # Safety
/// `p` must be null or point to a live handle.
unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Error> {
    p.as_ref().ok_or_else(|| null_error(what))
}

fn out_arg<T>(out: *mut *mut T) -> Result<(), Error> {
    if out.is_null() {
        Err(null_error("output pointer"))
    } else {
        Ok(())
    }
}

/// Description of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next `vcw_*` call on the same thread.
#[no_mangle]
pub extern "C" fn vcw_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn vcw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Reads a mono 16-bit PCM or 32-bit float WAV file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vcw_waveform_read(path: *const c_char, out: *mut *mut VcwWaveform) -> VcwStatus {
    guard(|| {
        out_arg(out)?;
        let w = read_wav(path_arg(path, "path")?)?;
        *out = Box::into_raw(Box::new(VcwWaveform { inner: w }));
        Ok(())
    })
}

/// Copies `len` samples into a new waveform.
///
/// # Safety
/// `samples` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vcw_waveform_from_samples(
    samples: *const f64,
    len: usize,
    sample_rate_hz: u32,
    out: *mut *mut VcwWaveform,
) -> VcwStatus {
    guard(|| {
        out_arg(out)?;
        if samples.is_null() && len > 0 {
            return Err(null_error("samples"));
        }
        let data = if len == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(samples, len).to_vec()
        };
        *out = Box::into_raw(Box::new(VcwWaveform {
            inner: Waveform::new(data, sample_rate_hz)?,
        }));
        Ok(())
    })
}

/// Writes the waveform as 16-bit PCM.
///
/// # Safety
/// `w` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn vcw_waveform_write(w: *const VcwWaveform, path: *const c_char) -> VcwStatus {
    guard(|| write_wav(&handle(w, "waveform")?.inner, path_arg(path, "path")?))
}

/// Number of samples, or 0 for a null handle.
///
/// # Safety
/// `w` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vcw_waveform_len(w: *const VcwWaveform) -> usize {
    w.as_ref().map_or(0, |w| w.inner.len())
}

/// Sample rate in Hz, or 0 for a null handle.
///
/// # Safety
/// `w` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vcw_waveform_sample_rate(w: *const VcwWaveform) -> u32 {
    w.as_ref().map_or(0, |w| w.inner.sample_rate_hz())
}

/// Copies up to `capacity` samples into `dst`; returns the number copied.
///
/// # Safety
/// `w` must be null or a live handle; `dst` must have room for `capacity`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn vcw_waveform_copy_samples(w: *const VcwWaveform, dst: *mut f64, capacity: usize) -> usize {
    let (Some(w), false) = (w.as_ref(), dst.is_null()) else {
        return 0;
    };
    let n = capacity.min(w.inner.len());
    ptr::copy_nonoverlapping(w.inner.samples().as_ptr(), dst, n);
    n
}

/// Releases a waveform. Null is ignored.
///
/// # Safety
/// `w` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vcw_waveform_free(w: *mut VcwWaveform) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Learns a warp from converted towards reference speech with the
/// `warp80` analysis (both signals are resampled to 16 kHz).
///
/// # Safety
/// `conv` and `reference` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vcw_learn_warp(
    conv: *const VcwWaveform,
    reference: *const VcwWaveform,
    mode: VcwMode,
    out: *mut *mut VcwWarpModel,
) -> VcwStatus {
    guard(|| {
        out_arg(out)?;
        let p = Profile::warp80();
        let cfg = p.stft_config();
        let load = |w: &VcwWaveform| {
            let w = vcwarp::audio_io::resample_linear(&w.inner, p.sample_rate_hz)?;
            extract_mel_cepstra(&w, p.n_coeffs, &cfg)
        };
        let a = load(handle(conv, "converted waveform")?)?;
        let b = load(handle(reference, "reference waveform")?)?;
        let opts = LearnOptions {
            mode: match mode {
                VcwMode::Scalar => WarpMode::Scalar,
                VcwMode::PerBand => WarpMode::PerBand,
            },
            ..LearnOptions::default()
        };
        *out = Box::into_raw(Box::new(VcwWarpModel {
            inner: learn_warp(&a, &b, &opts)?,
        }));
        Ok(())
    })
}

/// Loads a warp model from its JSON file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vcw_warp_model_load(path: *const c_char, out: *mut *mut VcwWarpModel) -> VcwStatus {
    guard(|| {
        out_arg(out)?;
        let model = WarpModel::load(path_arg(path, "path")?)?;
        *out = Box::into_raw(Box::new(VcwWarpModel { inner: model }));
        Ok(())
    })
}

/// Saves a warp model as JSON.
///
/// # Safety
/// `model` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn vcw_warp_model_save(model: *const VcwWarpModel, path: *const c_char) -> VcwStatus {
    guard(|| handle(model, "model")?.inner.save(path_arg(path, "path")?))
}

/// Number of warp factors: 1 for a scalar model, one per coefficient
/// otherwise; 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vcw_warp_model_alpha_count(model: *const VcwWarpModel) -> usize {
    model.as_ref().map_or(0, |m| m.inner.factor().values().len())
}

/// Warp factor acting on coefficient `band` (any band for scalar models).
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vcw_warp_model_alpha(model: *const VcwWarpModel, band: usize, out: *mut f64) -> VcwStatus {
    guard(|| {
        let m = &handle(model, "model")?.inner;
        if out.is_null() {
            return Err(null_error("output pointer"));
        }
        if band >= m.n_coeffs() {
            return Err(Error::InvalidArgument(format!("band {band} >= {}", m.n_coeffs())));
        }
        *out = m.alpha(band);
        Ok(())
    })
}

/// Releases a warp model. Null is ignored.
///
/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vcw_warp_model_free(model: *mut VcwWarpModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Applies a warp and resynthesises with `gl_iters` Griffin-Lim iterations
/// from zero phase, keeping the excitation fine structure.
///
/// # Safety
/// `model` and `input` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vcw_apply_warp(
    model: *const VcwWarpModel,
    input: *const VcwWaveform,
    gl_iters: usize,
    out: *mut *mut VcwWaveform,
) -> VcwStatus {
    guard(|| {
        out_arg(out)?;
        let opts = ApplyOptions {
            gl_iters,
            ..ApplyOptions::default()
        };
        let w = apply_warp(&handle(model, "model")?.inner, &handle(input, "waveform")?.inner, &opts)?;
        *out = Box::into_raw(Box::new(VcwWaveform { inner: w }));
        Ok(())
    })
}

/// MCD and normalised F0 RMSE with the `mcd36` analysis.
///
/// # Safety
/// `conv` and `reference` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vcw_evaluate(
    conv: *const VcwWaveform,
    reference: *const VcwWaveform,
    out: *mut VcwEvalReport,
) -> VcwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_error("output pointer"));
        }
        let r = evaluate_pair(
            &handle(conv, "converted waveform")?.inner,
            &handle(reference, "reference waveform")?.inner,
            &Profile::mcd36(),
        )?;
        *out = VcwEvalReport {
            mcd_db: r.mcd_db,
            f0_rmse_norm: r.f0_rmse_norm,
            n_aligned_frames: r.n_aligned_frames,
            n_covoiced_frames: r.n_covoiced_frames,
            f0_degenerate: u8::from(r.f0_degenerate),
            dtw_cost: r.dtw_cost,
        };
        Ok(())
    })
}
