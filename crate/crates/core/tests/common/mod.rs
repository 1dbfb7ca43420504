#![allow(dead_code)]

use islm_core::analysis::{analyze, Analysis};
use islm_core::normal_form::E1Variant;
use islm_core::{CoeffForm, ModelParams, ParamValues};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Draws a parameter set around the reference example. Draws whose
/// equilibrium rate falls below the floor are rejected by the caller.
pub fn draw_values<R: Rng>(rng: &mut R) -> ParamValues {
    ParamValues {
        a: rng.gen_range(0.1..1.0),
        alpha: rng.gen_range(0.2..2.0),
        beta: rng.gen_range(0.2..2.0),
        alpha1: rng.gen_range(0.2..0.9),
        alpha2: rng.gen_range(0.3..1.5),
        gamma0: rng.gen_range(0.5..2.0),
        r2: rng.gen_range(0.001..0.01),
        m: rng.gen_range(0.001..0.02),
        d: rng.gen_range(0.05..0.3),
        s: rng.gen_range(0.1..0.5),
        epsilon: rng.gen_range(0.05..0.95),
        delta: rng.gen_range(0.05..0.5),
        g: rng.gen_range(10.0..100.0),
    }
}

pub fn params_strategy() -> impl Strategy<Value = ModelParams> {
    any::<u64>().prop_filter_map("equilibrium rate below floor", |seed| {
        ModelParams::new(draw_values(&mut ChaCha8Rng::seed_from_u64(seed))).ok()
    })
}

/// Deterministic list of `count` parameter sets with a stability switch
/// and a computable normal form under the given coefficient form.
pub fn hopf_bearing(count: usize, form: CoeffForm, seed: u64) -> Vec<Analysis> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..100_000 {
        if out.len() == count {
            break;
        }
        let Ok(p) = ModelParams::new(draw_values(&mut rng)) else { continue };
        let Ok(a) = analyze(&p, form, E1Variant::DoubleFrequency) else { continue };
        if matches!(a.normal_form, Some(Ok(_))) {
            out.push(a);
        }
    }
    assert_eq!(out.len(), count, "not enough Hopf-bearing draws");
    out
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
