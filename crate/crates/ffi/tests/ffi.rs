use std::ffi::{CStr, CString};
use std::ptr;

use vcwarp::testkit::{gen_warped_pair, SynthSpec};
use vcwarp_ffi::*;

fn c(s: &std::path::Path) -> CString {
    CString::new(s.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(vcw_last_error()) }.to_str().unwrap().to_owned()
}

fn waveform(samples: &[f64], rate: u32) -> *mut VcwWaveform {
    let mut w = ptr::null_mut();
    let st = unsafe { vcw_waveform_from_samples(samples.as_ptr(), samples.len(), rate, &mut w) };
    assert_eq!(st, VcwStatus::Ok, "{}", last_error());
    w
}

fn samples(w: *const VcwWaveform) -> Vec<f64> {
    unsafe {
        let mut out = vec![0.0; vcw_waveform_len(w)];
        let n = vcw_waveform_copy_samples(w, out.as_mut_ptr(), out.len());
        assert_eq!(n, out.len());
        out
    }
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(vcw_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn waveform_round_trips_through_wav() {
    let dir = tempfile::tempdir().unwrap();
    let path = c(&dir.path().join("x.wav"));
    let data: Vec<f64> = (0..400).map(|n| ((n as f64) * 0.05).sin() * 0.5).collect();
    let w = waveform(&data, 16_000);
    unsafe {
        assert_eq!(vcw_waveform_write(w, path.as_ptr()), VcwStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(vcw_waveform_read(path.as_ptr(), &mut back), VcwStatus::Ok);
        assert_eq!(vcw_waveform_sample_rate(back), 16_000);
        let got = samples(back);
        assert_eq!(got.len(), data.len());
        for (a, b) in got.iter().zip(&data) {
            assert!((a - b).abs() <= 1.0 / 32768.0, "{a} vs {b}");
        }
        let mut head = [0.0; 3];
        assert_eq!(vcw_waveform_copy_samples(back, head.as_mut_ptr(), 3), 3);
        vcw_waveform_free(back);
        vcw_waveform_free(w);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = c(&dir.path().join("missing.wav"));
    let garbage_path = dir.path().join("garbage.wav");
    std::fs::write(&garbage_path, b"not a wav file at all").unwrap();
    let garbage = c(&garbage_path);
    let mut w = ptr::null_mut();
    unsafe {
        assert_eq!(vcw_waveform_read(missing.as_ptr(), &mut w), VcwStatus::Io);
        assert!(!last_error().is_empty());
        assert_eq!(vcw_waveform_read(garbage.as_ptr(), &mut w), VcwStatus::Format);
        assert_eq!(vcw_waveform_read(ptr::null(), &mut w), VcwStatus::InvalidArgument);
        assert_eq!(
            vcw_waveform_read(missing.as_ptr(), ptr::null_mut()),
            VcwStatus::InvalidArgument
        );
        assert!(w.is_null());
        assert_eq!(
            vcw_warp_model_load(garbage.as_ptr(), &mut ptr::null_mut()),
            VcwStatus::Format
        );

        let nan = [0.0, f64::NAN, 0.0];
        let mut bad = ptr::null_mut();
        assert_ne!(
            vcw_waveform_from_samples(nan.as_ptr(), 3, 16_000, &mut bad),
            VcwStatus::Ok
        );

        // Null handles are tolerated by the accessors and destructors.
        assert_eq!(vcw_waveform_len(ptr::null()), 0);
        assert_eq!(vcw_warp_model_alpha_count(ptr::null()), 0);
        vcw_waveform_free(ptr::null_mut());
        vcw_warp_model_free(ptr::null_mut());
    }
    let ok = waveform(&[0.0; 10], 16_000);
    assert!(last_error().is_empty());
    unsafe { vcw_waveform_free(ok) };
}

#[test]
fn learn_save_load_apply_evaluate() {
    let pair = gen_warped_pair(&SynthSpec::vowel(5), 0.1).unwrap();
    let src = waveform(pair.source.samples(), pair.source.sample_rate_hz());
    let tgt = waveform(pair.target.samples(), pair.target.sample_rate_hz());
    let dir = tempfile::tempdir().unwrap();
    let model_path = c(&dir.path().join("warp.json"));
    unsafe {
        let mut model = ptr::null_mut();
        assert_eq!(
            vcw_learn_warp(src, tgt, VcwMode::Scalar, &mut model),
            VcwStatus::Ok,
            "{}",
            last_error()
        );
        assert_eq!(vcw_warp_model_alpha_count(model), 1);
        let mut alpha = f64::NAN;
        assert_eq!(vcw_warp_model_alpha(model, 0, &mut alpha), VcwStatus::Ok);
        assert!((alpha - 0.1).abs() <= 0.02, "alpha {alpha}");
        assert_eq!(
            vcw_warp_model_alpha(model, 10_000, &mut alpha),
            VcwStatus::InvalidArgument
        );

        assert_eq!(vcw_warp_model_save(model, model_path.as_ptr()), VcwStatus::Ok);
        let mut loaded = ptr::null_mut();
        assert_eq!(vcw_warp_model_load(model_path.as_ptr(), &mut loaded), VcwStatus::Ok);
        let mut reloaded = f64::NAN;
        vcw_warp_model_alpha(loaded, 3, &mut reloaded);
        assert_eq!(reloaded.to_bits(), vcw_alpha(model).to_bits());

        let mut warped = ptr::null_mut();
        assert_eq!(
            vcw_apply_warp(loaded, src, 30, &mut warped),
            VcwStatus::Ok,
            "{}",
            last_error()
        );
        assert_eq!(vcw_waveform_len(warped), vcw_waveform_len(src));

        let mut before = VcwEvalReport::default();
        let mut after = VcwEvalReport::default();
        assert_eq!(vcw_evaluate(src, tgt, &mut before), VcwStatus::Ok);
        assert_eq!(vcw_evaluate(warped, tgt, &mut after), VcwStatus::Ok);
        assert!(before.n_aligned_frames > 0);
        assert!(after.mcd_db < before.mcd_db, "{} -> {}", before.mcd_db, after.mcd_db);
        assert_eq!(vcw_evaluate(src, tgt, ptr::null_mut()), VcwStatus::InvalidArgument);

        let mut per_band = ptr::null_mut();
        assert_eq!(vcw_learn_warp(src, tgt, VcwMode::PerBand, &mut per_band), VcwStatus::Ok);
        assert_eq!(vcw_warp_model_alpha_count(per_band), 80);

        for m in [model, loaded, per_band] {
            vcw_warp_model_free(m);
        }
        for w in [src, tgt, warped] {
            vcw_waveform_free(w);
        }
    }
}

unsafe fn vcw_alpha(model: *const VcwWarpModel) -> f64 {
    let mut a = f64::NAN;
    assert_eq!(vcw_warp_model_alpha(model, 0, &mut a), VcwStatus::Ok);
    a
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/vcwarp.h")).unwrap();
    for name in [
        "vcw_last_error",
        "vcw_version",
        "vcw_waveform_read",
        "vcw_waveform_from_samples",
        "vcw_waveform_write",
        "vcw_waveform_len",
        "vcw_waveform_sample_rate",
        "vcw_waveform_copy_samples",
        "vcw_waveform_free",
        "vcw_learn_warp",
        "vcw_warp_model_load",
        "vcw_warp_model_save",
        "vcw_warp_model_alpha_count",
        "vcw_warp_model_alpha",
        "vcw_warp_model_free",
        "vcw_apply_warp",
        "vcw_evaluate",
        "typedef struct VcwWaveform VcwWaveform",
        "typedef struct VcwWarpModel VcwWarpModel",
        "VCW_STATUS_PANIC = 5",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// Compiles and runs a C program against the generated header and the
/// static library. Skipped (with a note) when no C compiler is on PATH.
#[test]
fn c_program_links_and_runs() {
    let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    // The test binary lives in target/<profile>/deps; the libraries one level up.
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap();
    let staticlib = lib_dir.join("libvcwarp_ffi.a");
    if !staticlib.exists() {
        eprintln!("skipping: {} not built", staticlib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let compiled = std::process::Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&staticlib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status();
    let Ok(status) = compiled else {
        eprintln!("skipping: no C compiler");
        return;
    };
    assert!(status.success(), "C compilation failed");
    let out = std::process::Command::new(&bin)
        .arg(dir.path().join("smoke.wav"))
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.trim(), format!("{} 1600", env!("CARGO_PKG_VERSION")));
}
