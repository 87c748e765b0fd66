use decolab::eid::{eid_projector, evolve_unitary, lift_observable, partial_trace};
use decolab::linalg::{frobenius, hermitian_deviation, max_abs_diff, random};
use decolab::liouville::{build_projector, coarse_grain, pairing};
use decolab::master_eq::{build_liouvillian, evolve_master_exact};
use decolab::matrix_io::{read_matrix, write_matrix};
use decolab::ode::OdeOptions;
use decolab::sid::{smooth_functional, Cutoff, EnergyGrid, Taper, VanHoveState};
use decolab::{
    BiorthogonalPairBasis, CMatrix, DensityOperator, ObservableOperator, SuperOp, Tolerances, C64,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_basis(r: &mut ChaCha8Rng, d: usize, k: usize) -> BiorthogonalPairBasis {
    let obs = (0..k).map(|_| random::complex_matrix(r, d, d)).collect();
    let fun = (0..k).map(|_| random::complex_matrix(r, d, d)).collect();
    BiorthogonalPairBasis::biorthogonalize(d, obs, fun, 1e-9).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projector_is_idempotent_and_keeps_relevant_pairings(seed in any::<u64>(), d in 2usize..5, frac in 0.0f64..1.0) {
        let mut r = rng(seed);
        let k = 1 + ((d * d - 1) as f64 * frac) as usize;
        let basis = random_basis(&mut r, d, k);
        let pi = build_projector(&basis, &Tolerances::default()).unwrap();
        let sq = pi.compose(&pi).unwrap();
        prop_assert!(frobenius(&(sq.matrix() - pi.matrix())) <= 1e-10);
        prop_assert_eq!(pi.projector_rank(), k);

        let rho = DensityOperator::new(random::density(&mut r, d)).unwrap();
        let g = coarse_grain(&rho.as_bra(), &pi).unwrap();
        for o in basis.observables() {
            prop_assert!((rho.as_bra().pair(o).unwrap() - g.pair(o).unwrap()).norm() <= 1e-10);
        }
        // Complement annihilates what the projector keeps.
        let q = pi.complement();
        let pq = pi.compose(&q).unwrap();
        prop_assert!(frobenius(pq.matrix()) <= 1e-10);
    }

    #[test]
    fn pairing_is_linear_in_the_observable(seed in any::<u64>(), d in 1usize..5, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mut r = rng(seed);
        let rho = DensityOperator::new(random::density(&mut r, d)).unwrap();
        let o1 = random::hermitian(&mut r, d);
        let o2 = random::hermitian(&mut r, d);
        let combo = ObservableOperator::new(&o1 * C64::new(a, 0.0) + &o2 * C64::new(b, 0.0)).unwrap();
        let lhs = pairing(&rho, &combo).unwrap();
        let rhs = pairing(&rho, &ObservableOperator::new(o1).unwrap()).unwrap() * a
            + pairing(&rho, &ObservableOperator::new(o2).unwrap()).unwrap() * b;
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
        prop_assert!(lhs.im.abs() <= 1e-12);
    }

    #[test]
    fn eid_reduced_pairing_and_projector(seed in any::<u64>(), ds in 1usize..4, de in 1usize..4) {
        let mut r = rng(seed);
        let rho = DensityOperator::new(random::density(&mut r, ds * de)).unwrap();
        let o = ObservableOperator::new(random::hermitian(&mut r, ds)).unwrap();
        let reduced = partial_trace(&rho, ds, de).unwrap();
        let full = pairing(&rho, &lift_observable(&o, de)).unwrap();
        let part = pairing(reduced.density(), &o).unwrap();
        prop_assert!((full - part).norm() <= 1e-12);
        prop_assert!((reduced.density().trace() - 1.0).abs() <= 1e-12);

        let p = eid_projector(ds, de).unwrap();
        prop_assert!(p.idempotence_defect() <= 1e-12);
        prop_assert!(p.is_self_adjoint(1e-14));
    }

    #[test]
    fn unitary_and_projected_evolution_stay_hermitian(seed in any::<u64>(), t in 0.0f64..5.0) {
        let mut r = rng(seed);
        let h = ObservableOperator::new(random::hermitian(&mut r, 4)).unwrap();
        let rho = DensityOperator::new(random::density(&mut r, 4)).unwrap();
        let evolved = evolve_unitary(&rho, &h, &[t]).unwrap();
        prop_assert!(hermitian_deviation(evolved[0].matrix()) <= 1e-12);
        prop_assert!((evolved[0].purity() - rho.purity()).abs() <= 1e-12);

        let l = build_liouvillian(&h);
        for pi in [eid_projector(2, 2).unwrap(), SuperOp::diagonal_projector(4)] {
            let states = evolve_master_exact(&rho, &pi, &l, &[0.0, t], &OdeOptions::default()).unwrap();
            let m = states[1].to_matrix();
            prop_assert!(hermitian_deviation(&m) <= 1e-8);
            prop_assert!((m.trace().re - 1.0).abs() <= 1e-8);
        }
    }

    #[test]
    fn sid_evolution_invariants(seed in any::<u64>(), t1 in 0.0f64..50.0, t2 in 0.0f64..50.0) {
        let mut r = rng(seed);
        let grid = EnergyGrid::uniform(0.0, 4.0, 24).unwrap();
        let n = grid.len();
        let raw = random::complex_matrix(&mut r, n, n);
        let k = (&raw + raw.adjoint()) * C64::new(0.05, 0.0);
        let diag = vec![1.0 / grid.span(); n];
        let st = VanHoveState::new(&grid, diag, k, 1e-8).unwrap();
        let a = st.evolve(&grid, t1).unwrap().evolve(&grid, t2).unwrap();
        let b = st.evolve(&grid, t1 + t2).unwrap();
        prop_assert_eq!(a.diag(), st.diag());
        prop_assert!(max_abs_diff(a.offdiag(), b.offdiag()) <= 1e-12);
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(b.offdiag()[(i, j)], b.offdiag()[(j, i)].conj());
                prop_assert!((b.offdiag()[(i, j)].norm() - st.offdiag()[(i, j)].norm()).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn hard_cutoff_smoothing_is_idempotent(values in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..40), m in 1usize..40) {
        let samples: Vec<C64> = values.iter().map(|&(a, b)| C64::new(a, b)).collect();
        let once = smooth_functional(&samples, &Cutoff::Count(m), Taper::Hard).unwrap();
        let twice = smooth_functional(&once.as_samples(), &Cutoff::Count(m), Taper::Hard).unwrap();
        prop_assert_eq!(once.as_samples(), twice.as_samples());
        prop_assert!(once.norm_sq() <= samples.iter().map(|z| z.norm_sqr()).sum::<f64>() + 1e-12);
    }

    #[test]
    fn matrix_text_round_trip(seed in any::<u64>(), d in 1usize..6) {
        let mut r = rng(seed);
        let m: CMatrix = random::complex_matrix(&mut r, d, d);
        let back = read_matrix(&write_matrix(&m)).unwrap();
        prop_assert_eq!(back, m);
    }
}
