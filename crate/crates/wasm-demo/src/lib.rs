//! Browser bindings: three scenarios sampled on a uniform time grid and
//! returned as flat `Float64Array`s for plotting.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use decolab::eid::{spin_bath_scenario, BlochAngles, SpinBathParams};
use decolab::master_eq::DissipativeToy;
use decolab::sid::SidScenario;
use decolab::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

// Dense state is 2^(n+1) amplitudes; keep the page responsive.
const MAX_BROWSER_SPINS: usize = 10;
const SID_GRID_POINTS: usize = 200;

fn times(t_max: f64, samples: usize) -> Result<Vec<f64>, String> {
    if samples < 2 || !(t_max > 0.0) || !t_max.is_finite() {
        return Err(format!(
            "need samples >= 2 and t_max > 0, got {samples} and {t_max}"
        ));
    }
    let dt = t_max / (samples - 1) as f64;
    Ok((0..samples).map(|k| k as f64 * dt).collect())
}

fn js(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// Gaussian SID kernel of width `sigma`: per sample `[⟨O⟩(t), off-diagonal
/// part, ⟨O⟩*]`, flattened.
#[wasm_bindgen]
pub fn sid_decay(sigma: f64, t_max: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    let s = SidScenario::gaussian(sigma, SID_GRID_POINTS).map_err(js)?;
    let limit = s.limit().map_err(js)?;
    let mut out = Vec::with_capacity(3 * samples);
    for t in times(t_max, samples).map_err(js)? {
        let e = s.expectation(t).map_err(js)?;
        out.extend([e.value, e.offdiagonal.re, limit]);
    }
    Ok(out)
}

/// Qubit coupled to `n_spins` bath spins in `|+⟩`, couplings drawn from
/// `[0.5, 1.5)` with `seed`: per sample `[|ρ01| simulated, |ρ01| closed form]`.
#[wasm_bindgen]
pub fn spin_bath_coherence(
    n_spins: usize,
    seed: u32,
    t_max: f64,
    samples: usize,
) -> Result<Vec<f64>, JsError> {
    if n_spins == 0 || n_spins > MAX_BROWSER_SPINS {
        return Err(js(format!("bath size must be 1..={MAX_BROWSER_SPINS}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
    let couplings: Vec<f64> = (0..n_spins).map(|_| rng.random_range(0.5..1.5)).collect();
    let amp = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let params = SpinBathParams::new(couplings, (amp, amp), vec![BlochAngles::PLUS; n_spins]);
    let bath = spin_bath_scenario(params).map_err(js)?;
    let mut out = Vec::with_capacity(2 * samples);
    for t in times(t_max, samples).map_err(js)? {
        out.push(bath.reduced_state(t).matrix()[(0, 1)].norm());
        out.push(bath.offdiag_closed_form(t).norm());
    }
    Ok(out)
}

/// Three-level dissipative model: per sample `[coherence norm, distance of
/// populations from equilibrium]`, each scaled to 1 at t = 0.
#[wasm_bindgen]
pub fn dissipative_channels(
    gamma_d: f64,
    gamma_r: f64,
    t_max: f64,
    samples: usize,
) -> Result<Vec<f64>, JsError> {
    let toy = DissipativeToy {
        gamma_d,
        gamma_r,
        ..DissipativeToy::default()
    };
    toy.validate().map_err(js)?;
    let rho0 = toy.initial_state().matrix().clone();
    let (c0, d0) = toy.channels(&rho0);
    let mut out = Vec::with_capacity(2 * samples);
    for t in times(t_max, samples).map_err(js)? {
        let (c, d) = toy.channels(&toy.state_at(&rho0, t));
        out.push(c / c0);
        out.push(d / d0);
    }
    Ok(out)
}
