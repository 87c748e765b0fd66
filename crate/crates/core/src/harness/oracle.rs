//! Brute-force reference computations exposed through the CLI.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::Scenario;
use super::run::build_spin_bath;
use super::series::TimeSeries;
use crate::eid::{eid_projector, evolve_unitary};
use crate::error::{Error, Result};
use crate::linalg::random;
use crate::liouville::{DensityOperator, ObservableOperator};
use crate::sid::{discretized_unitary_oracle, SidScenario, DEFAULT_ORACLE_CAP};
use crate::tolerances::Tolerances;

pub const ORACLE_SCENARIOS: [&str; 3] = ["spin-bath", "sid-gaussian", "master-eq"];

fn grid(t_max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect()
}

/// Runs the named oracle and returns its samples.
///
/// * `spin-bath`: 8-spin bath in `|+⟩`, couplings from the seed; full
///   state-vector simulation next to the closed-form product.
/// * `sid-gaussian`: the dense `N × N` unitary evaluation of the Gaussian
///   SID scenario (`σ = 0.5`, `N = 400`).
/// * `master-eq`: random `2 ⊗ 2` system, unitary evolution followed by the
///   EID projection; one column per real/imaginary entry.
pub fn run_oracle(name: &str, seed: u64, tol: &Tolerances) -> Result<TimeSeries> {
    match name {
        "spin-bath" => {
            let mut s = Scenario::parse(
                "kind = \"eid-spin-bath\"\n[times]\nt_max = 10.0\nsamples = 201\n",
            )?;
            s.seed = seed;
            s.tolerances = tol.clone();
            let bath = build_spin_bath(&s)?;
            let t = s.times.sample_times();
            let full = t
                .iter()
                .map(|&x| bath.reduced_state(x).matrix()[(0, 1)].norm())
                .collect();
            let closed = t
                .iter()
                .map(|&x| bath.offdiag_closed_form(x).norm())
                .collect();
            let mut out = TimeSeries::new(t)?;
            out.push_channel("offdiag_modulus", full)?;
            out.push_channel("closed_form", closed)?;
            Ok(out)
        }
        "sid-gaussian" => {
            let sc = SidScenario::gaussian(0.5, 400)?;
            let t = grid(20.0, 81);
            let v = t
                .iter()
                .map(|&x| {
                    discretized_unitary_oracle(
                        &sc.state,
                        &sc.observable,
                        &sc.grid,
                        x,
                        DEFAULT_ORACLE_CAP,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let mut out = TimeSeries::new(t)?;
            out.push_channel("oracle_expectation", v)?;
            Ok(out)
        }
        "master-eq" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = ObservableOperator::new(random::hermitian(&mut rng, 4))?;
            let rho0 = DensityOperator::with_tolerances(random::density(&mut rng, 4), tol)?;
            let pi = eid_projector(2, 2)?;
            let t = grid(10.0, 101);
            let states = evolve_unitary(&rho0, &h, &t)?;
            let projected: Vec<_> = states
                .iter()
                .map(|r| pi.apply_bra(&r.as_bra()).map(|b| b.to_matrix()))
                .collect::<Result<_>>()?;
            let mut out = TimeSeries::new(t)?;
            for i in 0..4 {
                for j in 0..4 {
                    out.push_channel(
                        &format!("pg_{i}{j}_re"),
                        projected.iter().map(|m| m[(i, j)].re).collect(),
                    )?;
                    out.push_channel(
                        &format!("pg_{i}{j}_im"),
                        projected.iter().map(|m| m[(i, j)].im).collect(),
                    )?;
                }
            }
            Ok(out)
        }
        other => Err(Error::invalid(format!(
            "unknown oracle scenario `{other}`; expected one of {}",
            ORACLE_SCENARIOS.join(", ")
        ))),
    }
}
