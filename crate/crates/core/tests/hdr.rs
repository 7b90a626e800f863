use hybridrt::hdr::io::{read_bracket, read_crf_csv, write_bracket, write_crf_csv};
use hybridrt::hdr::{
    merge_hdr, normalize_radiance, recover_crf, synthesize_bracket, CrfTable, ExposureBracket,
    DEFAULT_LAMBDA, DEFAULT_SAMPLES, GAUGE_CODE,
};
use hybridrt::image::HdrImage;
use hybridrt::render::{render, RenderSettings};
use hybridrt::rng::Rng;
use hybridrt::scenes::{gamma_response, hdr_toy, HDR_TOY_TIMES};

fn toy_radiance(res: usize) -> HdrImage<f64> {
    let s = RenderSettings {
        spp: 4,
        seed: 2,
        ..RenderSettings::default()
    };
    let p = hdr_toy::<f64>(res, res, s);
    render(&p.scene, &p.camera, None).unwrap()
}

/// Inverse of the gamma camera at code `z`, gauged so code 128 maps to 0.
fn true_g(z: usize) -> f64 {
    2.2 * (z as f64 / GAUGE_CODE as f64).ln()
}

fn log_rmse(crf: &CrfTable<f64>, c: usize) -> f64 {
    let se: f64 = (20..=235).map(|z| (crf.g[c][z] - true_g(z)).powi(2)).sum();
    (se / 216.0).sqrt()
}

fn recover(bracket: &ExposureBracket) -> CrfTable<f64> {
    recover_crf(bracket, DEFAULT_LAMBDA, DEFAULT_SAMPLES, &mut Rng::new(0)).unwrap()
}

#[test]
fn gamma_bracket_round_trips() {
    let radiance = toy_radiance(64);
    let bracket = synthesize_bracket(&radiance, &HDR_TOY_TIMES, gamma_response).unwrap();
    let crf = recover(&bracket);
    assert!(crf.is_monotone());
    for c in 0..3 {
        let e = log_rmse(&crf, c);
        assert!(e < 0.05, "channel {c}: {e}");
    }
    // g(128) = 0 ties radiance 1 to exposure (128/255)^2.2 at unit time.
    let scale = (255.0f64 / 128.0).powf(2.2);
    let merged = merge_hdr(&bracket, &crf);
    let reference = bracket.images()[2].clone();
    let mut checked = 0;
    for (i, (m, e)) in merged.pixels().iter().zip(radiance.pixels()).enumerate() {
        for c in 0..3 {
            if !(48..=207).contains(&reference.data[i][c]) {
                continue;
            }
            let truth = e.channel(c) * scale;
            let rel = (m.channel(c) - truth).abs() / truth;
            assert!(rel < 0.02, "pixel {i} channel {c}: {rel}");
            checked += 1;
        }
    }
    assert!(checked > merged.pixels().len(), "{checked}");
}

#[test]
fn scaling_every_exposure_time_scales_radiance_inversely() {
    let radiance = toy_radiance(32);
    let bracket = synthesize_bracket(&radiance, &HDR_TOY_TIMES, gamma_response).unwrap();
    let crf = recover(&bracket);
    let c = 8.0;
    let scaled = bracket.scaled_times(c).unwrap();
    let crf_scaled = recover(&scaled);
    // The gauge absorbs the constant shift ln c.
    for ch in 0..3 {
        for z in 0..256 {
            assert!(
                (crf.g[ch][z] - crf_scaled.g[ch][z]).abs() < 1e-8,
                "code {z}"
            );
        }
    }
    let a = merge_hdr(&bracket, &crf);
    let b = merge_hdr(&scaled, &crf);
    for (p, q) in a.pixels().iter().zip(b.pixels()) {
        for ch in 0..3 {
            let (x, y) = (p.channel(ch), q.channel(ch));
            assert!((x - c * y).abs() <= 1e-12 * x, "{x} vs {c}·{y}");
        }
    }
}

#[test]
fn normalized_merge_peaks_at_255_and_keeps_ratios() {
    let radiance = toy_radiance(24);
    let bracket = synthesize_bracket(&radiance, &HDR_TOY_TIMES, gamma_response).unwrap();
    let merged = merge_hdr(&bracket, &recover(&bracket));
    let n = normalize_radiance(&merged);
    assert_eq!(n.max_value(), 255.0);
    let k = 255.0 / merged.max_value();
    for (p, q) in merged.pixels().iter().zip(n.pixels()) {
        for ch in 0..3 {
            assert!((q.channel(ch) - k * p.channel(ch)).abs() <= 1e-12 * q.channel(ch).max(1e-300));
        }
    }
}

#[test]
fn bracket_and_response_survive_disk() {
    let dir = tempfile::tempdir().unwrap();
    let radiance = toy_radiance(16);
    let bracket = synthesize_bracket(&radiance, &HDR_TOY_TIMES, gamma_response).unwrap();
    let manifest = write_bracket(dir.path(), &bracket).unwrap();
    assert_eq!(read_bracket(&manifest).unwrap(), bracket);
    let crf = recover(&bracket);
    let csv = dir.path().join("crf.csv");
    write_crf_csv(&csv, &crf).unwrap();
    let back: CrfTable<f64> = read_crf_csv(&csv).unwrap();
    for ch in 0..3 {
        for z in 0..256 {
            assert!((back.g[ch][z] - crf.g[ch][z]).abs() <= 1e-12 * crf.g[ch][z].abs().max(1.0));
        }
    }
}
