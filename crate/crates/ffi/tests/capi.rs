use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use nle_core::harness::{make_noise, mix_at_snr, pad_speech, synthetic_utterance, NoiseKind, Pipeline};
use nle_core::{NleConfig, StftParams};
use nle_ffi::*;

fn new_enhancer() -> *mut NleEnhancer {
    let settings = nle_settings_default();
    let mut handle = ptr::null_mut();
    assert_eq!(unsafe { nle_enhancer_new(&settings, &mut handle) }, NleStatus::Ok);
    assert!(!handle.is_null());
    handle
}

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let len = unsafe { nle_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(len > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn speech_and_noise(snr_db: f64) -> (Vec<f64>, Vec<f64>) {
    let speech = pad_speech(&synthetic_utterance(4, 1.5, 0.05));
    let noise = make_noise(&NoiseKind::White, speech.len(), 8, None, &StftParams::speech_16k()).unwrap();
    let (noise, _) = mix_at_snr(&speech, &noise, snr_db).unwrap();
    (speech.samples, noise.samples)
}

#[test]
fn dimensions_match_defaults() {
    let h = new_enhancer();
    unsafe {
        assert_eq!(nle_enhancer_num_bins(h), 257);
        assert_eq!(nle_enhancer_num_bands(h), 30);
        nle_enhancer_free(h);
        assert_eq!(nle_enhancer_num_bins(ptr::null()), 0);
        nle_enhancer_free(ptr::null_mut());
    }
}

#[test]
fn process_matches_core_pipeline() {
    let (speech, noise) = speech_and_noise(-10.0);
    let h = new_enhancer();
    let mut out = vec![0.0; speech.len()];
    let mut gains = vec![0.0; 257];
    unsafe {
        let status = nle_enhancer_process(h, speech.as_ptr(), noise.as_ptr(), speech.len(), out.as_mut_ptr());
        assert_eq!(status, NleStatus::Ok);
        let status = nle_enhancer_bin_gains(h, speech.as_ptr(), noise.as_ptr(), speech.len(), gains.as_mut_ptr(), gains.len());
        assert_eq!(status, NleStatus::Ok);
        nle_enhancer_free(h);
    }

    let pipeline = Pipeline::new(NleConfig::default()).unwrap();
    let to_signal = |x: &[f64]| nle_core::TimeSignal::new(x.to_vec(), 16_000);
    let (plan, processed) = pipeline
        .enhance(&to_signal(&speech), &to_signal(&noise), &pipeline.config)
        .unwrap();
    assert_eq!(out, processed.samples);
    assert_eq!(gains, plan.bin_gains);
    assert!(gains.iter().any(|g| *g > 1.0));
}

#[test]
fn gains_from_powers_follow_target() {
    let h = new_enhancer();
    let speech = vec![1e-6; 257];
    let noise = vec![1e-6; 257];
    let mut low = vec![0.0; 257];
    let mut high = vec![0.0; 257];
    unsafe {
        assert_eq!(nle_enhancer_set_target(h, 0.3), NleStatus::Ok);
        assert_eq!(nle_enhancer_gains_from_powers(h, speech.as_ptr(), noise.as_ptr(), 257, low.as_mut_ptr()), NleStatus::Ok);
        assert_eq!(nle_enhancer_set_target(h, 0.9), NleStatus::Ok);
        assert_eq!(nle_enhancer_gains_from_powers(h, speech.as_ptr(), noise.as_ptr(), 257, high.as_mut_ptr()), NleStatus::Ok);
        nle_enhancer_free(h);
    }
    assert!(low.iter().zip(&high).all(|(l, h)| h >= l));
    assert!(high.iter().any(|g| *g > 1.0));
}

#[test]
fn errors_are_reported() {
    let h = new_enhancer();
    let short = vec![0.1; 100];
    let mut out = vec![0.0; 100];
    unsafe {
        assert_eq!(nle_enhancer_set_target(h, 1.5), NleStatus::InvalidArgument);
        assert!(last_error().contains("target"));

        let status = nle_enhancer_process(h, short.as_ptr(), short.as_ptr(), short.len(), out.as_mut_ptr());
        assert_eq!(status, NleStatus::InsufficientSamples);
        assert!(last_error().contains("insufficient samples"));

        let status = nle_enhancer_process(h, ptr::null(), short.as_ptr(), short.len(), out.as_mut_ptr());
        assert_eq!(status, NleStatus::NullPointer);

        let (speech, noise) = speech_and_noise(0.0);
        let mut gains = vec![0.0; 10];
        let status = nle_enhancer_bin_gains(h, speech.as_ptr(), noise.as_ptr(), speech.len(), gains.as_mut_ptr(), 10);
        assert_eq!(status, NleStatus::DimensionMismatch);

        let gamma = [0.5, 0.5];
        assert_eq!(nle_enhancer_set_band_importance(h, gamma.as_ptr(), 2), NleStatus::DimensionMismatch);
        assert_eq!(nle_enhancer_set_band_importance(h, ptr::null(), 0), NleStatus::Ok);
        nle_enhancer_free(h);

        let mut settings = nle_settings_default();
        settings.num_bands = 0;
        let mut handle = ptr::null_mut();
        assert_eq!(nle_enhancer_new(&settings, &mut handle), NleStatus::InvalidArgument);
        assert!(handle.is_null());
        assert_eq!(nle_enhancer_new(ptr::null(), &mut handle), NleStatus::NullPointer);
    }
}

#[test]
fn status_strings() {
    let s = unsafe { CStr::from_ptr(nle_status_string(NleStatus::Infeasible)) };
    assert_eq!(s.to_str().unwrap(), "infeasible target");
    let s = unsafe { CStr::from_ptr(nle_status_string(NleStatus::Ok)) };
    assert_eq!(s.to_str().unwrap(), "ok");
}

#[test]
fn header_declares_api_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/nle.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "nle_settings_default",
        "nle_enhancer_new",
        "nle_enhancer_free",
        "nle_enhancer_process",
        "nle_enhancer_bin_gains",
        "nle_last_error",
        "typedef struct NleEnhancer NleEnhancer",
        "NLE_STATUS_OK = 0",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler; skipping syntax check");
        return;
    };
    assert!(status.success());
}
