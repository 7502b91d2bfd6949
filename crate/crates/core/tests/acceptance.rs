//! Acceptance suite: one PASS/FAIL line per criterion, with runtime limits.
//!
//! Runs as a plain binary (`harness = false`) so the criteria execute one
//! after another, their timings are not distorted by other tests, and the
//! report is printed even when everything passes.

mod common;

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vcwarp::align::dtw;
use vcwarp::audio_io::{read_features, write_features, FeatureFile, Waveform};
use vcwarp::dsp::{griffin_lim_with_history, istft, mel_filterbank, stft, InitPhase, StftConfig};
use vcwarp::features::{estimate_f0, extract_mel_cepstra, F0Range};
use vcwarp::metrics::{mcd, mcd_frame};
use vcwarp::pipeline::{run_pipeline, PipelineOptions};
use vcwarp::testkit::{gen_warped_pair, SynthSpec};
use vcwarp::warp::{
    build_reference_matrix, build_warp_matrix, learn_warp, phase_warp, Basis, LearnOptions, WarpFactor, WarpGeometry,
    WarpModel, WarpObjective,
};
use vcwarp::Profile;

const PLANTED: [f64; 5] = [-0.2, -0.1, 0.05, 0.1, 0.2];

type Outcome = Result<String, String>;

/// Name, time limit and check of one acceptance criterion.
type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn geometry(basis: Basis, fft_size: usize, n_coeffs: usize) -> WarpGeometry {
    let n_mels = n_coeffs.max(80);
    let cfg = StftConfig::new(fft_size, 1.0, 1.0);
    WarpGeometry {
        basis,
        fft_size,
        n_coeffs,
        sample_rate_hz: 16_000,
        mel_center_freqs: mel_filterbank(n_mels, &cfg, 16_000).unwrap().center_freqs,
    }
}

fn identity_reduction() -> Outcome {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for basis in [Basis::MelAxis, Basis::BandCenter] {
        for fft_size in [16, 256, 2048] {
            for n_coeffs in [2, 36, 128] {
                let g = geometry(basis, fft_size, n_coeffs);
                let d = build_warp_matrix(&g, &WarpFactor::Scalar(0.0)).map_err(|e| e.to_string())?;
                let d_star = build_reference_matrix(&g).map_err(|e| e.to_string())?;
                let diff = (&d - &d_star).iter().fold(0.0f64, |a, v| a.max(v.abs()));
                worst = worst.max(diff);
                cases += 1;
            }
        }
    }
    check(
        worst <= 1e-12,
        format!("{cases} (N, M, basis) cases, max |D - D*| = {worst:e}"),
    )
}

fn phase_warp_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut compared = 0;
    for _ in 0..1000 {
        let theta = rng.random_range(0.0..=PI);
        let alpha = rng.random_range(-0.9..=0.9);
        let w = phase_warp(theta, alpha);
        if w.cos().abs() <= 1e-6 {
            continue;
        }
        let ratio = ((1.0 - alpha * alpha) * theta.sin()) / ((1.0 + alpha * alpha) * theta.cos() - 2.0 * alpha);
        worst = worst.max((w.tan() - ratio).abs() / ratio.abs().max(1.0));
        compared += 1;
    }
    let mut monotone = true;
    for i in 0..=36 {
        let alpha = -0.9 + 0.05 * i as f64;
        let values: Vec<f64> = (0..=2000).map(|k| phase_warp(PI * k as f64 / 2000.0, alpha)).collect();
        monotone &= values.windows(2).all(|w| w[1] > w[0]);
    }
    check(
        worst <= 1e-8 && monotone,
        format!("{compared} points, max scaled tan error {worst:e}, strictly increasing: {monotone}"),
    )
}

fn planted_recovery() -> Outcome {
    let profile = Profile::warp80();
    let cfg = profile.stft_config();
    let mut lines = Vec::new();
    let mut ok = true;
    for &alpha_star in &PLANTED {
        let pair = gen_warped_pair(&SynthSpec::vowel(7), alpha_star).map_err(|e| e.to_string())?;
        let conv = extract_mel_cepstra(&pair.source, profile.n_coeffs, &cfg).map_err(|e| e.to_string())?;
        let reference = extract_mel_cepstra(&pair.target, profile.n_coeffs, &cfg).map_err(|e| e.to_string())?;
        let model = learn_warp(&conv, &reference, &LearnOptions::default()).map_err(|e| e.to_string())?;
        let alpha = model.alpha(0);
        ok &= (alpha - alpha_star).abs() <= 0.02;
        lines.push(format!("{alpha_star:+.2}->{alpha:+.4}"));
    }
    check(ok, lines.join(" "))
}

fn pipeline_direction() -> Outcome {
    let opts = PipelineOptions::default();
    let mut ok = true;
    let mut reductions = Vec::new();
    let mut lines = Vec::new();
    for &alpha_star in &PLANTED {
        let pair = gen_warped_pair(&SynthSpec::vowel(7), alpha_star).map_err(|e| e.to_string())?;
        let out = run_pipeline(&pair.source, &pair.target, &opts).map_err(|e| e.to_string())?;
        let (before, after) = (out.report.mcd_before, out.report.mcd_after);
        if alpha_star.abs() >= 0.05 {
            ok &= after < before;
        }
        reductions.push((before - after) / before);
        lines.push(format!("{alpha_star:+.2}: {before:.2}->{after:.2} dB"));
    }
    let mean = reductions.iter().sum::<f64>() / reductions.len() as f64;
    ok &= mean >= 0.03;
    check(
        ok,
        format!("{}; mean relative reduction {:.1}%", lines.join(", "), 100.0 * mean),
    )
}

fn gradient_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_norm = 0.0f64;
    let mut worst_component = 0.0f64;
    let h = 1e-5;
    for instance in 0..20u64 {
        let basis = if instance % 4 == 3 {
            Basis::BandCenter
        } else {
            Basis::MelAxis
        };
        let n_coeffs = rng.random_range(4..=24);
        let cfg = StftConfig::new(512, 25.0, 10.0);
        let conv = common::random_cepstra(100 + instance, rng.random_range(3..=8), n_coeffs, cfg);
        let reference = common::random_cepstra(200 + instance, rng.random_range(3..=8), n_coeffs, cfg);
        let path = vcwarp::align::dtw_align(&conv, &reference, true).map_err(|e| e.to_string())?;
        let g = WarpGeometry {
            basis,
            fft_size: 512,
            n_coeffs,
            sample_rate_hz: 16_000,
            mel_center_freqs: conv.center_freqs.clone(),
        };
        let obj =
            WarpObjective::new(g, conv.coeffs.view(), reference.coeffs.view(), &path).map_err(|e| e.to_string())?;
        let alphas: Vec<f64> = (0..n_coeffs).map(|_| rng.random_range(-0.4..0.4)).collect();
        let analytic = obj
            .gradient(&WarpFactor::PerBand(alphas.clone()))
            .map_err(|e| e.to_string())?;
        let cost = |a: Vec<f64>| obj.cost(&WarpFactor::PerBand(a)).unwrap();
        let numeric: Vec<f64> = (0..n_coeffs)
            .map(|b| {
                let (mut up, mut down) = (alphas.clone(), alphas.clone());
                up[b] += h;
                down[b] -= h;
                (cost(up) - cost(down)) / (2.0 * h)
            })
            .collect();
        let norm = numeric.iter().map(|v| v * v).sum::<f64>().sqrt();
        let diff = analytic
            .iter()
            .zip(&numeric)
            .map(|(a, n)| (a - n).powi(2))
            .sum::<f64>()
            .sqrt();
        worst_norm = worst_norm.max(diff / norm);
        let scale = numeric.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, n) in analytic.iter().zip(&numeric) {
            if n.abs() >= 1e-3 * scale {
                worst_component = worst_component.max((a - n).abs() / n.abs());
            }
        }
    }
    check(
        worst_norm <= 1e-4 && worst_component <= 1e-4,
        format!("20 instances, max relative error {worst_norm:.2e} (norm), {worst_component:.2e} (component)"),
    )
}

fn metric_oracles() -> Outcome {
    let cfg = StftConfig::new(512, 25.0, 10.0);
    let x = common::random_cepstra(1, 20, 36, cfg);
    let self_mcd = mcd(&x, &x).map_err(|e| e.to_string())?;
    let mut a = vec![0.0; 36];
    a[0] = 4.0;
    a[1] = 1.0;
    let unit = mcd_frame(&a, &[0.0; 36]).map_err(|e| e.to_string())?;

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let dim = rng.random_range(2..=5);
        let (ta, tb) = (rng.random_range(1..=8), rng.random_range(1..=8));
        let ma = common::random_matrix(&mut rng, ta, dim);
        let mb = common::random_matrix(&mut rng, tb, dim);
        let exclude_c0 = trial % 2 == 0;
        let path = dtw(ma.view(), mb.view(), exclude_c0).map_err(|e| e.to_string())?;
        let oracle = common::brute_force_dtw(&ma, &mb, exclude_c0);
        worst = worst.max((path.cost - oracle).abs());
    }
    check(
        self_mcd == 0.0 && (unit - 6.1421).abs() <= 1e-3 && worst <= 1e-12,
        format!(
            "mcd(x,x) = {self_mcd}, unit frame = {unit:.6} dB, DTW vs brute force max diff {worst:e} over 100 trials"
        ),
    )
}

fn dsp_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let fs = 16_000;
    let x: Vec<f64> = (0..16_000).map(|_| rng.random_range(-0.5..0.5)).collect();
    let cfg = StftConfig::new(512, 32.0, 8.0);
    let y = istft(&stft(&Waveform::new(x.clone(), fs).unwrap(), &cfg).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let win = cfg.window_len(fs);
    let cola = (win..y.len() - win).fold(0.0f64, |m, n| m.max((y.samples()[n] - x[n]).abs()));

    let profile = Profile::mcd36();
    let mut f0_worst = 0.0f64;
    let mut f0_ok = true;
    for freq in [100.0, 200.0, 350.0] {
        let tone: Vec<f64> = (0..fs)
            .map(|n| 0.5 * (2.0 * PI * freq * n as f64 / fs as f64).sin())
            .collect();
        let contour = estimate_f0(
            &Waveform::new(tone, fs).unwrap(),
            F0Range::default(),
            &profile.stft_config(),
        )
        .map_err(|e| e.to_string())?;
        let voiced: Vec<f64> = contour.voiced_values().collect();
        f0_ok &= voiced.len() * 10 >= contour.len() * 9;
        for v in voiced {
            f0_worst = f0_worst.max((v - freq).abs());
        }
    }

    let tone: Vec<f64> = (0..8000)
        .map(|n| 0.5 * (2.0 * PI * 440.0 * n as f64 / fs as f64).sin())
        .collect();
    let mag = stft(&Waveform::new(tone, fs).unwrap(), &cfg)
        .map_err(|e| e.to_string())?
        .magnitude();
    let mut monotone = true;
    for init in [InitPhase::Zero, InitPhase::Random { seed: 4 }] {
        let (_, history) = griffin_lim_with_history(&mag, 60, init).map_err(|e| e.to_string())?;
        monotone &= history.windows(2).all(|w| w[1] <= w[0] + 1e-6);
    }
    check(
        cola <= 1e-4 && f0_ok && f0_worst <= 2.0 && monotone,
        format!(
            "COLA interior error {cola:.2e}, F0 max error {f0_worst:.3} Hz (voiced coverage ok: {f0_ok}), Griffin-Lim monotone: {monotone}"
        ),
    )
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_vcwarp"))
        .current_dir(dir)
        .args(args)
        .env_remove("VCWARP_PROFILE")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("vcwarp {args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn determinism_and_formats() -> Outcome {
    let golden = common::golden_dir();
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run_dir = |n: usize| tmp.path().join(format!("run{n}"));
    let spec = golden.join("vowel_spec.json");
    let mut artefacts: Vec<Vec<Vec<u8>>> = Vec::new();
    for n in 0..2 {
        let dir = run_dir(n);
        std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
        // relative paths, so the reports (which name their inputs) match
        let cli = |args: &[&str]| run_cli(&dir, args);
        cli(&["gen-test", spec.to_str().unwrap(), "--alpha", "0.1", "-o", "pair"])?;
        cli(&["extract", "pair_source.wav", "-o", "source.vcf"])?;
        cli(&["f0", "pair_source.wav", "-o", "source_f0.vcf"])?;
        cli(&["learn-warp", "pair_source.wav", "pair_target.wav", "-o", "warp.json"])?;
        cli(&["apply-warp", "warp.json", "pair_source.wav", "-o", "warped.wav"])?;
        let report = cli(&["evaluate", "pair_source.wav", "pair_target.wav"])?;
        let mut files: Vec<Vec<u8>> = [
            "pair_source.wav",
            "pair_target.wav",
            "pair_alpha.json",
            "source.vcf",
            "source_f0.vcf",
            "warp.json",
            "warped.wav",
        ]
        .iter()
        .map(|f| std::fs::read(dir.join(f)).unwrap())
        .collect();
        files.push(report);
        artefacts.push(files);
    }
    let identical = artefacts[0] == artefacts[1];

    let vcf_path = golden.join("features_3x4.vcf");
    let vcf_bytes = std::fs::read(&vcf_path).map_err(|e| e.to_string())?;
    let vcf = read_features(&vcf_path).map_err(|e| e.to_string())?;
    let rewritten = tmp.path().join("again.vcf");
    write_features(&vcf, &rewritten).map_err(|e| e.to_string())?;
    let vcf_round_trip = std::fs::read(&rewritten).unwrap() == vcf_bytes
        && FeatureFile::from_bytes(&vcf.to_bytes())
            .map(|f| f == vcf)
            .unwrap_or(false);

    let json_path = golden.join("warp_scalar.json");
    let json_text = std::fs::read_to_string(&json_path).map_err(|e| e.to_string())?;
    let model = WarpModel::from_json(&json_text).map_err(|e| e.to_string())?;
    let json_round_trip = model.to_json() == json_text
        && WarpModel::from_json(&model.to_json())
            .map(|m| m == model)
            .unwrap_or(false);
    let goldens = ["features_3x4.vcf", "warp_scalar.json", "vowel_spec.json"]
        .iter()
        .all(|f| Path::new(&golden.join(f)).is_file());
    check(
        identical && vcf_round_trip && json_round_trip && goldens,
        format!(
            "repeated CLI runs identical: {identical}, VCF1 round trip: {vcf_round_trip}, warp JSON round trip: {json_round_trip}, goldens present: {goldens}"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "1 identity-warp reduction",
            Some(Duration::from_secs(1)),
            identity_reduction,
        ),
        (
            "2 phase-warp consistency",
            Some(Duration::from_secs(1)),
            phase_warp_consistency,
        ),
        (
            "3 planted-alpha recovery",
            Some(Duration::from_secs(30)),
            planted_recovery,
        ),
        (
            "4 pipeline lowers MCD",
            Some(Duration::from_secs(60)),
            pipeline_direction,
        ),
        (
            "5 per-band gradient check",
            Some(Duration::from_secs(10)),
            gradient_check,
        ),
        ("6 metric oracles", Some(Duration::from_secs(10)), metric_oracles),
        ("7 DSP correctness", Some(Duration::from_secs(20)), dsp_correctness),
        ("8 determinism and formats", None, determinism_and_formats),
    ];
    let mut failures = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed < l);
        let (pass, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        let limit_text = limit
            .map(|l| format!(" / limit {:.0} s", l.as_secs_f64()))
            .unwrap_or_default();
        println!(
            "[{}] {name}: {detail} ({:.2} s{limit_text})",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        if !pass {
            failures += 1;
        }
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
