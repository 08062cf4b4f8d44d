//! Synthetic one-second EEG windows with the same layout as the real
//! recognition dataset. Useful for demos, benchmarks and tests when the
//! real file is not at hand; the numbers it produces say nothing about
//! performance on real recordings.
//!
//! Seizure windows (label 1) are high-amplitude rhythmic discharges with
//! spikes. The other four classes are lower-amplitude mixtures of
//! background rhythms and noise. Every window gets a random phase, so the
//! class signal lives in amplitude rather than in the sign of any one
//! sample, as with real EEG.

use std::f64::consts::TAU;

use rand::Rng as _;
use rand_distr::{Distribution, Normal};

use crate::dataset::{RawDataset, FEATURE_COUNT};
use crate::matrix::Matrix;
use crate::rng::{seeded, Rng};

const SAMPLE_RATE: f64 = 178.0;

fn rhythm(rng: &mut Rng, out: &mut [f64], amplitude: f64, freq_range: (f64, f64)) {
    let freq = rng.random_range(freq_range.0..freq_range.1);
    let phase = rng.random_range(0.0..TAU);
    for (t, v) in out.iter_mut().enumerate() {
        *v += amplitude * (TAU * freq * t as f64 / SAMPLE_RATE + phase).sin();
    }
}

fn noise(rng: &mut Rng, out: &mut [f64], sd: f64) {
    let normal = Normal::new(0.0, sd).expect("positive standard deviation");
    for v in out.iter_mut() {
        *v += normal.sample(rng);
    }
}

fn window(rng: &mut Rng, label: u8) -> Vec<f64> {
    let mut w = vec![0.0; FEATURE_COUNT];
    match label {
        1 => {
            let amp = rng.random_range(150.0..550.0);
            rhythm(rng, &mut w, amp, (2.5, 7.0));
            rhythm(rng, &mut w, amp * 0.4, (7.0, 14.0));
            let spikes = rng.random_range(2..7);
            for _ in 0..spikes {
                let at = rng.random_range(0..FEATURE_COUNT - 3);
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let height = rng.random_range(0.5..1.5) * amp;
                w[at + 1] += sign * height;
                w[at] += sign * height * 0.4;
                w[at + 2] += sign * height * 0.4;
            }
            noise(rng, &mut w, 30.0);
        }
        2 | 3 => {
            let a = rng.random_range(20.0..70.0);
            rhythm(rng, &mut w, a, (1.0, 4.0));
            let a = rng.random_range(10.0..40.0);
            rhythm(rng, &mut w, a, (4.0, 8.0));
            noise(rng, &mut w, 18.0);
        }
        4 => {
            let a = rng.random_range(25.0..80.0);
            rhythm(rng, &mut w, a, (8.0, 12.0));
            noise(rng, &mut w, 15.0);
        }
        _ => {
            let a = rng.random_range(10.0..30.0);
            rhythm(rng, &mut w, a, (13.0, 30.0));
            noise(rng, &mut w, 22.0);
        }
    }
    // slow baseline drift and an occasional electrode artifact
    let offset = rng.random_range(-25.0..25.0);
    w.iter_mut().for_each(|v| *v += offset);
    if label != 1 && rng.random_bool(0.04) {
        let at = rng.random_range(0..FEATURE_COUNT);
        w[at] += rng.random_range(-400.0..400.0);
    }
    w.iter_mut().for_each(|v| *v = v.round());
    w
}

/// `rows_per_class` windows for each of the five labels, interleaved
/// label 1..=5 so any prefix is roughly balanced.
pub fn generate(rows_per_class: usize, seed: u64) -> RawDataset {
    let mut rng = seeded(seed);
    let n = rows_per_class * 5;
    let mut data = Vec::with_capacity(n * FEATURE_COUNT);
    let mut labels = Vec::with_capacity(n);
    let mut row_ids = Vec::with_capacity(n);
    for i in 0..rows_per_class {
        for label in 1..=5u8 {
            data.extend(window(&mut rng, label));
            labels.push(label);
            row_ids.push(format!("S{}.L{label}.{i}", row_ids.len()));
        }
    }
    RawDataset {
        row_ids,
        features: Matrix::new(n, FEATURE_COUNT, data).expect("consistent shape"),
        labels,
    }
}
