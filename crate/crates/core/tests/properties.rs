//! Property suites: density bound, magnetization conservation, Bethe kernels
//! and Gibbs weights.

use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;
use spin_corr::bethe::{kernel_k1, kernel_k2, momentum, scattering_phase};
use spin_corr::correlator::pure_correlator;
use spin_corr::eigensolver::{full_spectrum, thermal_weights};
use spin_corr::{
    Basis, ChainSpec, Hamiltonian, LinearOperator, PureState, SignPattern, SpectralDecomposition,
};

fn random_state() -> impl Strategy<Value = PureState> {
    (2usize..=8).prop_flat_map(|n| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_filter_map(
            "zero vector",
            move |amps| {
                let amps = amps.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
                PureState::new(Basis::full(n).unwrap(), amps).ok()
            },
        )
    })
}

fn pattern_for(n: usize) -> impl Strategy<Value = SignPattern> {
    (1..=n).prop_flat_map(move |m| {
        (0u64..1 << m, 1..=n - m + 1)
            .prop_map(move |(idx, start)| SignPattern::nth(m, idx).unwrap().with_start(start).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn correlator_respects_density_bound(
        (state, pattern) in random_state().prop_flat_map(|s| {
            let n = s.n_sites();
            (Just(s), pattern_for(n))
        })
    ) {
        let e = pure_correlator(&state, &pattern).unwrap().e_value;
        prop_assert!((0.0..=0.25 + 1e-12).contains(&e), "E = {}", e);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn xxz_and_mg_conserve_magnetization(
        n in (2usize..=5).prop_map(|h| 2 * h),
        delta in -2.0f64..2.0,
        mg in any::<bool>(),
        n_up_frac in 0.0f64..1.0,
        seed in any::<u64>(),
    ) {
        let spec = if mg {
            ChainSpec::majumdar_ghosh(n).unwrap()
        } else {
            ChainSpec::xxz(n, delta).unwrap()
        };
        let h = Hamiltonian::build(spec, None).unwrap();
        let n_up = (n_up_frac * n as f64) as usize;
        // pseudo-random vector supported on one magnetization sector
        let mut x = vec![0.0; h.dimension()];
        let mut s = seed | 1;
        for (bits, xi) in x.iter_mut().enumerate() {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            if (bits as u32).count_ones() as usize == n_up {
                *xi = (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            }
        }
        let mut y = vec![0.0; h.dimension()];
        h.apply(&x, &mut y);
        for (bits, yi) in y.iter().enumerate() {
            if (bits as u32).count_ones() as usize != n_up {
                prop_assert_eq!(*yi, 0.0);
            }
        }
    }

    #[test]
    fn kernels_are_derivatives(lambda in -4.0f64..4.0, eta in 0.05f64..1.52) {
        let h = 1e-3 * (1.0 / eta.tan()).min(1.0);
        let d = |f: &dyn Fn(f64) -> f64| {
            (f(lambda - 2.0 * h) - 8.0 * f(lambda - h) + 8.0 * f(lambda + h) - f(lambda + 2.0 * h))
                / (12.0 * h)
        };
        prop_assert!((d(&|x| momentum(x, eta)) - kernel_k1(lambda, eta)).abs() <= 1e-8);
        prop_assert!((d(&|x| scattering_phase(x, eta)) - kernel_k2(lambda, eta)).abs() <= 1e-8);
    }
}

fn spectra() -> &'static [SpectralDecomposition] {
    static CELL: OnceLock<Vec<SpectralDecomposition>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut out = Vec::new();
        for d in [-0.8, 0.0, 1.0, 3.0] {
            let h = Hamiltonian::build(ChainSpec::xxz(6, d).unwrap(), None).unwrap();
            out.push(full_spectrum(&h).unwrap());
        }
        for g in [0.3, 1.0] {
            let h = Hamiltonian::build(ChainSpec::ising(6, g, 0.2).unwrap(), None).unwrap();
            out.push(full_spectrum(&h).unwrap());
        }
        out
    })
}

proptest! {
    #[test]
    fn thermal_weights_sum_to_one(which in 0usize..6, beta in prop_oneof![0.0f64..50.0, Just(f64::INFINITY)]) {
        let w = thermal_weights(&spectra()[which], beta).unwrap();
        prop_assert!(w.weights.iter().all(|&x| x >= 0.0));
        prop_assert!((w.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
