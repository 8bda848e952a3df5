//! Release gate: ten checks covering tensor shapes, normalization algebra,
//! smoother frequency response, streaming parity, distribution shaping,
//! augmentation physics, metric arithmetic, bootstrap determinism, and the
//! end-to-end binary.
//!
//! Runs without the standard harness so each check prints exactly one
//! `[PASS]`/`[FAIL]` line; any failure makes the process exit nonzero.
//! Tolerances are pinned inline next to each check.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mrpcen_cli::config::{PipelineConfig, Representation};
use mrpcen_cli::features::featurize_clip;
use mrpcen_core::audio::AudioClip;
use mrpcen_core::augment::{
    brown_noise, convolve_reverb, pitch_shift, synth_impulse_response, ImpulseResponse,
};
use mrpcen_core::eval::{
    bootstrap_evaluate, compute_metrics, segment_counts, Event, EventList, SegmentCounts,
    Vocabulary,
};
use mrpcen_core::frame::FrameSpec;
use mrpcen_core::mel::{log_compress, mel_spectrogram, MelSpectrogram, DEFAULT_TOP_DB};
use mrpcen_core::pcen::{
    ar1_magnitude_response, ar1_smooth, measured_cutoff_frequency, pcen_transform,
    smoothing_coefficient, PcenParams,
};
use mrpcen_core::stats::gaussianization_score;
use mrpcen_core::stream::{pcen_stream_step, SmootherState};

fn main() {
    let criteria: &[(usize, &str, fn() -> Result<(), String>)] = &[
        (1, "feature tensor shapes and runtime", shapes_and_runtime),
        (2, "smoother matches scalar reference bitwise", smoother_bitwise),
        (3, "normalization limiting cases", limiting_cases),
        (4, "smoother cutoff and sidelobe falloff", cutoff_relation),
        (5, "streaming equals batch bitwise", streaming_equals_batch),
        (6, "normalization reduces skewness on brown noise", gaussianization),
        (7, "reverb, impulse-response decay, pitch shift", augmentation),
        (8, "segment metrics oracle", metrics_oracle),
        (9, "bootstrap determinism", bootstrap_protocol),
        (10, "end-to-end pipeline on the bundled dataset", end_to_end),
    ];

    let mut failures = 0;
    for (n, name, check) in criteria {
        match check() {
            Ok(()) => println!("[PASS] criterion {n}: {name}"),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] criterion {n}: {name}");
                for line in detail.lines() {
                    println!("       {line}");
                }
            }
        }
    }
    if failures > 0 {
        eprintln!("{failures} criteria failed");
        std::process::exit(1);
    }
}

// ===== shared helpers =====

fn err(msg: impl Into<String>) -> String {
    msg.into()
}

fn random_energy(rows: usize, cols: usize, seed: u64) -> MelSpectrogram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = Array2::from_shape_fn((rows, cols), |_| rng.gen_range(1e-6..1.0));
    let spec = FrameSpec::new(44_100, 1024, 512, rows, 0.0, 22_050.0).expect("valid spec");
    MelSpectrogram::from_values(values, spec).expect("valid energy")
}

// ===== criterion 1 =====

/// A 10 s, 44.1 kHz clip at the default configuration must yield log-mel
/// (128, 862, 1) and the 10-rate stack (128, 862, 10), each in < 5 s
/// single-threaded.
fn shapes_and_runtime() -> Result<(), String> {
    let sr = 44_100u32;
    let n = 10 * sr as usize;
    let samples: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / f64::from(sr);
            0.3 * (2.0 * PI * 440.0 * t).sin() + 0.1 * (2.0 * PI * 3000.0 * t).sin()
        })
        .collect();
    let clip = AudioClip::new(samples, sr).map_err(|e| e.to_string())?;

    let mut logmel_config = PipelineConfig::default();
    logmel_config.representation = Representation::Logmel;
    let mrpcen_config = PipelineConfig::default();

    let t0 = Instant::now();
    let logmel = featurize_clip(&clip, &logmel_config).map_err(|e| e.to_string())?;
    let logmel_time = t0.elapsed();
    let t1 = Instant::now();
    let stack = featurize_clip(&clip, &mrpcen_config).map_err(|e| e.to_string())?;
    let mrpcen_time = t1.elapsed();

    if logmel.shape() != [128, 862, 1] {
        return Err(err(format!("log-mel shape {:?} != [128, 862, 1]", logmel.shape())));
    }
    if stack.shape() != [128, 862, 10] {
        return Err(err(format!("stack shape {:?} != [128, 862, 10]", stack.shape())));
    }
    let budget = std::time::Duration::from_secs(5);
    if logmel_time > budget || mrpcen_time > budget {
        return Err(err(format!(
            "too slow: log-mel {logmel_time:?}, 10-rate stack {mrpcen_time:?} (budget 5 s each)"
        )));
    }
    Ok(())
}

// ===== criterion 2 =====

/// The vectorized first-order smoother must equal a direct per-band scalar
/// loop bitwise on 20 seeded random spectrograms.
fn smoother_bitwise() -> Result<(), String> {
    let rates = [2.0, 8.0, 64.0, 512.0];
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let rows = rng.gen_range(4..96);
        let cols = rng.gen_range(10..300);
        let energy = random_energy(rows, cols, seed);
        let s = smoothing_coefficient(rates[seed as usize % rates.len()])
            .map_err(|e| e.to_string())?;

        let fast = ar1_smooth(&energy, s).map_err(|e| e.to_string())?;
        let e = energy.values();
        for b in 0..rows {
            let mut m = e[(b, 0)];
            for t in 0..cols {
                if t > 0 {
                    m = s * e[(b, t)] + (1.0 - s) * m;
                }
                if fast[(b, t)].to_bits() != m.to_bits() {
                    return Err(err(format!(
                        "seed {seed}, band {b}, frame {t}: {} != {} (bitwise)",
                        fast[(b, t)],
                        m
                    )));
                }
            }
        }
    }
    Ok(())
}

// ===== criterion 3 =====

/// Limiting cases of the normalization: zero in, zero out; zero gain turns
/// it into pure compression (within 1e-12); unit gain with no floor is
/// scale-invariant to 1e-12 relative for k in {0.1, 10, 1000}.
fn limiting_cases() -> Result<(), String> {
    let spec = FrameSpec::new(44_100, 1024, 512, 16, 0.0, 22_050.0).map_err(|e| e.to_string())?;

    let zeros = MelSpectrogram::from_values(Array2::zeros((16, 40)), spec)
        .map_err(|e| e.to_string())?;
    let out = pcen_transform(&zeros, &PcenParams::with_rate(64.0).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    if let Some(v) = out.iter().find(|v| **v != 0.0) {
        return Err(err(format!("zero input produced nonzero output {v}")));
    }

    let energy = random_energy(16, 60, 77);
    let (bias, power) = (2.0, 0.5);
    let zero_gain = PcenParams::new(1e-6, 0.0, bias, power, 64.0).map_err(|e| e.to_string())?;
    let out = pcen_transform(&energy, &zero_gain).map_err(|e| e.to_string())?;
    for (o, &e) in out.iter().zip(energy.values().iter()) {
        let expected = (e + bias).powf(power) - bias.powf(power);
        if (o - expected).abs() > 1e-12 {
            return Err(err(format!(
                "zero-gain output {o} differs from compression-only {expected}"
            )));
        }
    }

    let unit_gain = PcenParams::new(0.0, 1.0, bias, power, 16.0).map_err(|e| e.to_string())?;
    let base = pcen_transform(&energy, &unit_gain).map_err(|e| e.to_string())?;
    for k in [0.1, 10.0, 1000.0] {
        let scaled_energy = MelSpectrogram::from_values(
            energy.values().mapv(|v| v * k),
            *energy.spec(),
        )
        .map_err(|e| e.to_string())?;
        let scaled = pcen_transform(&scaled_energy, &unit_gain).map_err(|e| e.to_string())?;
        for (a, b) in base.iter().zip(scaled.iter()) {
            if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
                return Err(err(format!("k={k}: {a} vs {b} breaks scale invariance")));
            }
        }
    }
    Ok(())
}

// ===== criterion 4 =====

/// For every window length T in {2, 4, ..., 512} the numerically measured
/// half-power point of the smoother must match acos(1 - s^2 / (2(1-s)))
/// within 1% relative; the falloff between 2 and 20 times the cutoff must
/// land in [8, 12] dB/decade for T = 64.
fn cutoff_relation() -> Result<(), String> {
    let mut t = 2.0;
    while t <= 512.0 {
        let s = smoothing_coefficient(t).map_err(|e| e.to_string())?;
        // At T = 2 the argument is exactly -1 analytically; clamp the
        // floating-point residue so acos stays defined.
        let arg = (1.0 - s * s / (2.0 * (1.0 - s))).clamp(-1.0, 1.0);
        let predicted = arg.acos();
        let measured = measured_cutoff_frequency(s);
        let rel = ((measured - predicted) / predicted).abs();
        if rel > 0.01 {
            return Err(err(format!(
                "T={t}: measured {measured} vs predicted {predicted} ({rel:.2e} relative)"
            )));
        }
        t *= 2.0;
    }

    let s = smoothing_coefficient(64.0).map_err(|e| e.to_string())?;
    let cutoff = measured_cutoff_frequency(s);
    let h2 = ar1_magnitude_response(s, 2.0 * cutoff);
    let h20 = ar1_magnitude_response(s, 20.0 * cutoff);
    let falloff = 10.0 * (h2 / h20).log10();
    if !(8.0..=12.0).contains(&falloff) {
        return Err(err(format!("T=64 falloff {falloff:.3} dB/decade outside [8, 12]")));
    }
    Ok(())
}

// ===== criterion 5 =====

/// Feeding frames one at a time through the streaming state must reproduce
/// the batch transform bitwise, on 20 seeded spectrograms x 3 rates.
fn streaming_equals_batch() -> Result<(), String> {
    for seed in 0..20u64 {
        let energy = random_energy(24, 80, 5000 + seed);
        for rate in [2.0, 64.0, 512.0] {
            let params = PcenParams::with_rate(rate).map_err(|e| e.to_string())?;
            let batch = pcen_transform(&energy, &params).map_err(|e| e.to_string())?;

            let mut state = SmootherState::new(24).map_err(|e| e.to_string())?;
            for t in 0..energy.n_frames() {
                let frame: Vec<f64> = energy.values().column(t).to_vec();
                let out = pcen_stream_step(&frame, &mut state, &params)
                    .map_err(|e| e.to_string())?;
                for (b, v) in out.iter().enumerate() {
                    if v.to_bits() != batch[(b, t)].to_bits() {
                        return Err(err(format!(
                            "seed {seed}, rate {rate}, band {b}, frame {t}: \
                             streaming {v} != batch {} (bitwise)",
                            batch[(b, t)]
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

// ===== criterion 6 =====

/// On 50 seeded Brownian-noise clips, the normalized features must be less
/// skewed than log compression in at least 45 cases (rate T = 64).
fn gaussianization() -> Result<(), String> {
    let spec = FrameSpec::default_44k();
    let params = PcenParams::with_rate(64.0).map_err(|e| e.to_string())?;
    let mut wins = 0;
    for seed in 0..50u64 {
        // 4 s gives the 64-frame smoother enough frames past its time
        // constant that the steady-state distribution dominates the
        // initialization transient.
        let clip = brown_noise(4.0, 44_100, seed).map_err(|e| e.to_string())?;
        let energy = mel_spectrogram(&clip, &spec).map_err(|e| e.to_string())?;
        let logmel = log_compress(energy.values(), DEFAULT_TOP_DB).map_err(|e| e.to_string())?;
        let pcen = pcen_transform(&energy, &params).map_err(|e| e.to_string())?;
        let skew_log = gaussianization_score(&logmel)
            .map_err(|e| e.to_string())?
            .skewness;
        let skew_pcen = gaussianization_score(&pcen)
            .map_err(|e| e.to_string())?
            .skewness;
        if skew_pcen.abs() < skew_log.abs() {
            wins += 1;
        }
    }
    if wins < 45 {
        return Err(err(format!(
            "normalization less skewed than log compression in only {wins}/50 clips (need 45)"
        )));
    }
    Ok(())
}

// ===== criterion 7 =====

/// Convolving with a unit impulse must be the identity within 1e-12; the
/// synthetic impulse responses must decay with log-RMS slope -1/tau_c within
/// 5%; shifting up one octave must double a 440 Hz tone's FFT peak within
/// one bin.
fn augmentation() -> Result<(), String> {
    let sr = 44_100u32;
    let samples: Vec<f64> = (0..sr as usize)
        .map(|i| 0.5 * (2.0 * PI * 440.0 * i as f64 / f64::from(sr)).sin())
        .collect();
    let clip = AudioClip::new(samples.clone(), sr).map_err(|e| e.to_string())?;

    let unit = ImpulseResponse {
        samples: vec![1.0],
        sample_rate: sr,
        label: "unit".into(),
    };
    let out = convolve_reverb(&clip, &unit).map_err(|e| e.to_string())?;
    for (i, (a, b)) in clip.samples().iter().zip(out.samples()).enumerate() {
        if (a - b).abs() > 1e-12 {
            return Err(err(format!("unit impulse changed sample {i}: {a} vs {b}")));
        }
    }

    for tau in [0.1, 0.3, 0.5] {
        let ir = synth_impulse_response(tau, 5.0 * tau, sr, 11).map_err(|e| e.to_string())?;
        let win = 1024;
        let (mut ts, mut logs) = (Vec::new(), Vec::new());
        let mut start = 0;
        while start + win <= ir.samples.len() {
            let rms = (ir.samples[start..start + win]
                .iter()
                .map(|v| v * v)
                .sum::<f64>()
                / win as f64)
                .sqrt();
            ts.push((start + win / 2) as f64 / f64::from(sr));
            logs.push(rms.ln());
            start += win;
        }
        let slope = least_squares_slope(&ts, &logs);
        let expected = -1.0 / tau;
        let rel = ((slope - expected) / expected).abs();
        if rel > 0.05 {
            return Err(err(format!(
                "tau={tau}: decay slope {slope:.3} vs {expected:.3} ({rel:.3} relative)"
            )));
        }
    }

    let shifted = pitch_shift(&clip, 12.0).map_err(|e| e.to_string())?;
    let b0 = fft_peak_bin(&samples[8192..16384]);
    let b1 = fft_peak_bin(&shifted.samples()[8192..16384]);
    if (b1 as i64 - 2 * b0 as i64).abs() > 1 {
        return Err(err(format!(
            "octave shift moved the peak to bin {b1}, expected 2*{b0} within one bin"
        )));
    }
    Ok(())
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

/// Argmax bin of the Hann-windowed 8192-point FFT magnitude.
fn fft_peak_bin(samples: &[f64]) -> usize {
    let n = samples.len();
    let mut buf: Vec<rustfft::num_complex::Complex<f64>> = samples
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let w = 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos();
            rustfft::num_complex::Complex::new(v * w, 0.0)
        })
        .collect();
    rustfft::FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf[..n / 2]
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

// ===== criterion 8 =====

/// Hand-enumerated counts must give exact metric values, a perfect match
/// must score F1 = 1 with error rate 0, and micro-F1 must equal
/// 2PR/(P+R) on 100 random count tables.
fn metrics_oracle() -> Result<(), String> {
    let vocab = Vocabulary::new(["a"]).map_err(|e| e.to_string())?;
    let seg_events = |segs: &[usize]| -> Vec<Event> {
        segs.iter()
            .map(|&k| Event::new(k as f64 + 0.1, k as f64 + 0.9, "a").expect("valid event"))
            .collect()
    };
    let reference = EventList::new(seg_events(&[0, 1, 2]), 10.0, vocab.clone())
        .map_err(|e| e.to_string())?;
    let estimate = EventList::new(seg_events(&[1, 2, 3]), 10.0, vocab.clone())
        .map_err(|e| e.to_string())?;
    let counts = segment_counts(&reference, &estimate, 1.0).map_err(|e| e.to_string())?;
    let report = compute_metrics(&counts);
    let class = &report.per_class[0];
    let expect = 2.0 / 3.0;
    if class.precision != expect || class.recall != expect || class.f1 != expect {
        return Err(err(format!(
            "2 hits / 1 false alarm / 1 miss gave P={} R={} F1={}, expected 2/3 each",
            class.precision, class.recall, class.f1
        )));
    }

    let perfect = segment_counts(&reference, &reference, 1.0).map_err(|e| e.to_string())?;
    let report = compute_metrics(&perfect);
    if report.micro.f1 != 1.0 || report.error_rate != Some(0.0) {
        return Err(err(format!(
            "perfect match gave F1={} ER={:?}",
            report.micro.f1, report.error_rate
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let vocab3 = Vocabulary::new(["a", "b", "c"]).map_err(|e| e.to_string())?;
    for table in 0..100 {
        let random_list = |rng: &mut ChaCha8Rng| -> Result<EventList, String> {
            let mut events = Vec::new();
            for k in 0..20usize {
                for label in ["a", "b", "c"] {
                    if rng.gen_bool(0.3) {
                        events.push(
                            Event::new(k as f64 + 0.2, k as f64 + 0.8, label)
                                .map_err(|e| e.to_string())?,
                        );
                    }
                }
            }
            EventList::new(events, 20.0, vocab3.clone()).map_err(|e| e.to_string())
        };
        let reference = random_list(&mut rng)?;
        let estimate = random_list(&mut rng)?;
        let counts = segment_counts(&reference, &estimate, 1.0).map_err(|e| e.to_string())?;
        let report = compute_metrics(&counts);
        let (p, r) = (report.micro.precision, report.micro.recall);
        let expected = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
        if report.micro.f1 != expected {
            return Err(err(format!(
                "table {table}: micro F1 {} != 2PR/(P+R) = {expected}",
                report.micro.f1
            )));
        }
    }
    Ok(())
}

// ===== criterion 9 =====

/// Bootstrapping 100 replicates of 100 draws must be deterministic per
/// seed, and a single-clip dataset must yield identical replicates.
fn bootstrap_protocol() -> Result<(), String> {
    let vocab = Vocabulary::new(["a", "b"]).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let mut clips: Vec<SegmentCounts> = Vec::new();
    for _ in 0..10 {
        let mut random_list = |salt: f64| -> Result<EventList, String> {
            let mut events = Vec::new();
            for k in 0..8usize {
                for label in ["a", "b"] {
                    if rng.gen_bool(0.4 + 0.1 * salt) {
                        events.push(
                            Event::new(k as f64 + 0.2, k as f64 + 0.8, label)
                                .map_err(|e| e.to_string())?,
                        );
                    }
                }
            }
            EventList::new(events, 8.0, vocab.clone()).map_err(|e| e.to_string())
        };
        let reference = random_list(0.0)?;
        let estimate = random_list(1.0)?;
        clips.push(segment_counts(&reference, &estimate, 1.0).map_err(|e| e.to_string())?);
    }

    let a = bootstrap_evaluate(&clips, 100, 100, 31).map_err(|e| e.to_string())?;
    let b = bootstrap_evaluate(&clips, 100, 100, 31).map_err(|e| e.to_string())?;
    let c = bootstrap_evaluate(&clips, 100, 100, 32).map_err(|e| e.to_string())?;
    if a.len() != 100 {
        return Err(err(format!("expected 100 replicates, got {}", a.len())));
    }
    if a != b {
        return Err(err("same seed produced different replicates"));
    }
    if a == c {
        return Err(err("different seeds produced identical replicates"));
    }

    let single = bootstrap_evaluate(&clips[..1], 100, 100, 31).map_err(|e| e.to_string())?;
    if single.windows(2).any(|w| w[0] != w[1]) {
        return Err(err("single-clip dataset produced varying replicates"));
    }
    Ok(())
}

// ===== criterion 10 =====

/// The binary must run synth-dataset -> featurize -> detect -> evaluate on
/// the bundled miniature dataset in under 60 s, produce parseable NPY and
/// JSON outputs, and score tone-class F1 > 0 with the multi-rate features.
fn end_to_end() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = dir.path().join("demo");
    let features = dir.path().join("features");
    let preds = dir.path().join("preds");
    let eval_out = dir.path().join("eval");
    let t0 = Instant::now();

    run_bin(&["synth-dataset", "--out", path_str(&root)?])?;
    let manifest = root.join("manifest.json");
    let config = root.join("config.json");
    run_bin(&[
        "featurize",
        "--manifest",
        path_str(&manifest)?,
        "--config",
        path_str(&config)?,
        "--out",
        path_str(&features)?,
    ])?;
    run_bin(&[
        "detect",
        "--manifest",
        path_str(&manifest)?,
        "--config",
        path_str(&config)?,
        "--features",
        path_str(&features)?,
        "--out",
        path_str(&preds)?,
    ])?;
    run_bin(&[
        "evaluate",
        "--manifest",
        path_str(&manifest)?,
        "--config",
        path_str(&config)?,
        "--predictions",
        path_str(&preds)?,
        "--out",
        path_str(&eval_out)?,
    ])?;
    let elapsed = t0.elapsed();
    if elapsed > std::time::Duration::from_secs(60) {
        return Err(err(format!("pipeline took {elapsed:?}, budget 60 s")));
    }

    // The features really are the multi-rate representation.
    let config_json: serde_json::Value = read_json(&config)?;
    if config_json["representation"] != "mrpcen" {
        return Err(err(format!(
            "bundled config uses representation {}, expected mrpcen",
            config_json["representation"]
        )));
    }

    let tensor = mrpcen_core::npy::read_npy_f32(&features.join("clip_00.npy"))
        .map_err(|e| format!("feature file invalid: {e}"))?;
    if tensor.ndim() != 3 || tensor.shape()[0] != 128 || tensor.shape()[2] != 10 {
        return Err(err(format!("feature tensor shape {:?}", tensor.shape())));
    }
    let sidecar: serde_json::Value = read_json(&features.join("clip_00.json"))?;
    for field in ["clip_id", "config_hash", "schedule", "frame_rate"] {
        if sidecar.get(field).is_none() {
            return Err(err(format!("sidecar is missing {field}")));
        }
    }

    let metrics: serde_json::Value = read_json(&eval_out.join("metrics.json"))?;
    let tone_f1 = metrics["per_class"]
        .as_array()
        .and_then(|classes| {
            classes
                .iter()
                .find(|c| c["label"] == "tone")
                .and_then(|c| c["f1"].as_f64())
        })
        .ok_or_else(|| err("metrics.json has no tone class"))?;
    if !(tone_f1 > 0.0) {
        return Err(err(format!("tone-class F1 is {tone_f1}, expected > 0")));
    }
    Ok(())
}

fn path_str(path: &Path) -> Result<&str, String> {
    path.to_str().ok_or_else(|| err("non-UTF-8 temp path"))
}

fn run_bin(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_mrpcen"))
        .args(args)
        .output()
        .map_err(|e| format!("spawning mrpcen: {e}"))?;
    if !out.status.success() {
        return Err(format!(
            "mrpcen {} exited with {:?}\n{}",
            args.first().unwrap_or(&""),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(())
}

fn read_json(path: &Path) -> Result<serde_json::Value, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("reading {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("parsing {}: {e}", path.display()))
}
