//! Shared fixtures for the criterion benches.

use secperc_core::geom::{sample_ppp, PppSample, Window};
use secperc_core::RngStream;

/// A legitimate/eavesdropper sample pair on matching windows.
pub fn sample_pair(lambda: f64, lambda_e: f64, half: f64, seed: u64) -> (PppSample, PppSample) {
    let root = RngStream::new(seed);
    let window = Window::square(half).expect("positive half-width");
    let legit = sample_ppp(lambda, window, &root.substream(0)).expect("valid intensity");
    let eaves = sample_ppp(lambda_e, window.padded(2.0), &root.substream(1)).expect("valid");
    (legit, eaves)
}
