//! Formation-probability correlators `C_m = <⊗ σ±>` and `E_m = |C_m|²`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::basis::site_mask;
use crate::eigensolver::{PureState, SpectralDecomposition, ThermalWeights};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};

/// Patterns are searched exhaustively only up to this order.
pub const BEST_PATTERN_MAX_ORDER: usize = 12;

const TAIL_CHUNK: usize = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpinOp {
    /// `σ+ = |↑><↓|`
    Raise,
    /// `σ- = |↓><↑|`
    Lower,
}

/// Contiguous window of raising/lowering operators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignPattern {
    ops: Vec<SpinOp>,
    start_site: usize,
}

impl SignPattern {
    /// `start_site` is 1-based.
    pub fn new(ops: Vec<SpinOp>, start_site: usize) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::arg("a sign pattern needs at least one operator"));
        }
        if start_site == 0 {
            return Err(Error::arg("sites are numbered from 1"));
        }
        Ok(Self { ops, start_site })
    }

    /// `σ+ σ- σ+ …` starting at site 1.
    pub fn alternating(m: usize) -> Result<Self> {
        Self::new(
            (0..m)
                .map(|j| if j % 2 == 0 { SpinOp::Raise } else { SpinOp::Lower })
                .collect(),
            1,
        )
    }

    pub fn all_raise(m: usize) -> Result<Self> {
        Self::new(vec![SpinOp::Raise; m], 1)
    }

    pub fn all_lower(m: usize) -> Result<Self> {
        Self::new(vec![SpinOp::Lower; m], 1)
    }

    /// The `index`-th of the `2^m` patterns at site 1 in lexicographic order
    /// with `Raise < Lower`.
    pub fn nth(m: usize, index: u64) -> Result<Self> {
        Self::new(
            (0..m)
                .map(|j| {
                    if (index >> (m - 1 - j)) & 1 == 1 {
                        SpinOp::Lower
                    } else {
                        SpinOp::Raise
                    }
                })
                .collect(),
            1,
        )
    }

    pub fn with_start(mut self, start_site: usize) -> Result<Self> {
        if start_site == 0 {
            return Err(Error::arg("sites are numbered from 1"));
        }
        self.start_site = start_site;
        Ok(self)
    }

    pub fn ops(&self) -> &[SpinOp] {
        &self.ops
    }

    pub fn order(&self) -> usize {
        self.ops.len()
    }

    pub fn start_site(&self) -> usize {
        self.start_site
    }

    /// Number of raising operators.
    pub fn raises(&self) -> usize {
        self.ops.iter().filter(|&&o| o == SpinOp::Raise).count()
    }

    /// Error unless the window lies inside an `n_sites` chain.
    pub fn check_fits(&self, n_sites: usize) -> Result<()> {
        if self.start_site + self.order() - 1 > n_sites {
            return Err(Error::arg(format!(
                "pattern of length {} at site {} does not fit a {}-site chain",
                self.order(),
                self.start_site,
                n_sites
            )));
        }
        Ok(())
    }

    /// (window mask, source bits inside the window) in bit positions.
    fn window(&self) -> (u32, u32) {
        let shift = self.start_site - 1;
        let mask = site_mask(self.order()) << shift;
        let source = self
            .ops
            .iter()
            .enumerate()
            .filter(|(_, &o)| o == SpinOp::Lower)
            .fold(0u32, |acc, (j, _)| acc | 1 << (shift + j));
        (mask, source)
    }
}

impl fmt::Display for SignPattern {
    /// `+-+-` style, one character per site starting at `start_site`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.ops {
            f.write_str(match op {
                SpinOp::Raise => "+",
                SpinOp::Lower => "-",
            })?;
        }
        Ok(())
    }
}

impl FromStr for SignPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ops = s
            .chars()
            .map(|c| match c {
                '+' => Ok(SpinOp::Raise),
                '-' => Ok(SpinOp::Lower),
                _ => Err(Error::arg(format!("pattern characters must be '+' or '-', got {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ops, 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelatorResult {
    pub c_value: Complex64,
    pub e_value: f64,
    pub order: usize,
    pub pattern: SignPattern,
}

impl CorrelatorResult {
    fn new(c_value: Complex64, pattern: &SignPattern) -> Self {
        Self {
            c_value,
            e_value: c_value.norm_sqr(),
            order: pattern.order(),
            pattern: pattern.clone(),
        }
    }
}

/// All `k`-subsets of `n` bits as ascending bitmasks.
fn fixed_weight_masks(n: usize, k: usize) -> Vec<u32> {
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let limit = 1u64 << n;
    let mut out = Vec::new();
    let mut v: u64 = (1 << k) - 1;
    while v < limit {
        out.push(v as u32);
        let t = v | (v - 1);
        v = (t + 1) | (((!t & (t + 1)) - 1) >> (v.trailing_zeros() + 1));
    }
    out
}

/// `C = Σ_tail ψ*(target ⊗ tail) ψ(source ⊗ tail)`.
pub fn pure_correlator(state: &PureState, pattern: &SignPattern) -> Result<CorrelatorResult> {
    pure_correlator_with(Execution::default(), state, pattern)
}

pub fn pure_correlator_with(
    exec: Execution,
    state: &PureState,
    pattern: &SignPattern,
) -> Result<CorrelatorResult> {
    let n = state.n_sites();
    pattern.check_fits(n)?;
    let m = pattern.order();
    let (window, source) = pattern.window();
    let target = source ^ window;
    let low = pattern.start_site() - 1;
    let low_mask = site_mask(low);
    // Spread a compact (N − m)-bit tail over the sites outside the window.
    let place = move |t: u32| (t & low_mask) | ((t >> low) << (low + m));

    let basis = state.basis();
    let psi = state.amplitudes();
    let term = |t: u32| -> Complex64 {
        let rest = place(t);
        match (basis.index_of(rest | target), basis.index_of(rest | source)) {
            (Some(a), Some(b)) => psi[a].conj() * psi[b],
            _ => Complex64::new(0.0, 0.0),
        }
    };

    let tail_sites = n - m;
    let c = match basis.n_up() {
        None => {
            let count = 1usize << tail_sites;
            exec::tree_sum(exec::map_chunks(exec, count, TAIL_CHUNK, |r| {
                r.map(|t| term(t as u32)).sum::<Complex64>()
            }))
        }
        Some(n_up) => {
            // Only tails that keep both configurations in the sector contribute.
            let (ns, nt) = (source.count_ones() as usize, target.count_ones() as usize);
            if ns != nt || ns > n_up || n_up - ns > tail_sites {
                Complex64::new(0.0, 0.0)
            } else {
                let tails = fixed_weight_masks(tail_sites, n_up - ns);
                exec::tree_sum(exec::map_chunks(exec, tails.len(), TAIL_CHUNK, |r| {
                    tails[r].iter().map(|&t| term(t)).sum::<Complex64>()
                }))
            }
        }
    };
    Ok(CorrelatorResult::new(c, pattern))
}

/// `C = Σ_n w_n <ψ_n|Â|ψ_n>` with signed diagonal elements.
pub fn thermal_correlator(
    spec: &SpectralDecomposition,
    w: &ThermalWeights,
    pattern: &SignPattern,
) -> Result<CorrelatorResult> {
    if w.weights.len() != spec.len() {
        return Err(Error::arg(format!(
            "{} weights for {} levels",
            w.weights.len(),
            spec.len()
        )));
    }
    pattern.check_fits(spec.basis().n_sites())?;
    let mut c = Complex64::new(0.0, 0.0);
    for (n, &wn) in w.weights.iter().enumerate() {
        if wn != 0.0 {
            c += wn * pure_correlator_with(Execution::Serial, &spec.state(n), pattern)?.c_value;
        }
    }
    Ok(CorrelatorResult::new(c, pattern))
}

/// Pattern at site 1 maximizing `E_m`; near-ties (within `1e-14`) resolve to
/// the lexicographically first pattern with `Raise < Lower`.
pub fn best_pattern(state: &PureState, m: usize) -> Result<SignPattern> {
    if m > BEST_PATTERN_MAX_ORDER {
        return Err(Error::Capacity {
            what: "best_pattern order",
            size: m,
            limit: BEST_PATTERN_MAX_ORDER,
        });
    }
    if m == 0 || m > state.n_sites() {
        return Err(Error::arg(format!(
            "order must lie in [1, {}], got {m}",
            state.n_sites()
        )));
    }
    let mut best = (f64::NEG_INFINITY, SignPattern::nth(m, 0)?);
    for idx in 0..1u64 << m {
        let p = SignPattern::nth(m, idx)?;
        let e = pure_correlator(state, &p)?.e_value;
        if e > best.0 + 1e-14 {
            best = (e, p);
        }
    }
    Ok(best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::Basis;
    use crate::eigensolver::ground_state;
    use crate::hamiltonian::{ChainSpec, Hamiltonian};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ghz_saturates_quarter() {
        for n in 2..=8 {
            let r = pure_correlator(&PureState::ghz(n).unwrap(), &SignPattern::all_raise(n).unwrap())
                .unwrap();
            assert!((r.e_value - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn x_polarized_product_gives_quarter_per_site() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let state = PureState::product(&[[c(s, 0.0), c(s, 0.0)]; 6]).unwrap();
        for m in 1..=6 {
            let r = pure_correlator(&state, &SignPattern::all_raise(m).unwrap()).unwrap();
            assert!((r.e_value - 0.25f64.powi(m as i32)).abs() < 1e-15);
        }
    }

    #[test]
    fn polarized_state_is_annihilated() {
        let state = PureState::basis_state(Basis::full(5).unwrap(), 0b11111).unwrap();
        for p in ["+", "+-", "-+--", "+++++"] {
            let r = pure_correlator(&state, &p.parse().unwrap()).unwrap();
            assert_eq!(r.e_value, 0.0);
        }
    }

    #[test]
    fn full_window_is_single_matrix_element() {
        let h = Hamiltonian::build(ChainSpec::ising(6, 0.7, 0.0).unwrap(), None).unwrap();
        let gs = ground_state(&h, 1e-12).unwrap();
        let p = SignPattern::alternating(6).unwrap();
        // σ+ on odd sites: source has ↓ there and ↑ on even sites
        let source = 0b101010;
        let direct = gs.amplitude_of(source ^ 0b111111).conj() * gs.amplitude_of(source);
        assert_eq!(pure_correlator(&gs, &p).unwrap().c_value, direct);
    }

    #[test]
    fn shifted_window_on_translation_invariant_state() {
        let h = Hamiltonian::build(ChainSpec::xxz(8, 0.3).unwrap(), Some(4)).unwrap();
        let gs = ground_state(&h, 1e-12).unwrap();
        let a = pure_correlator(&gs, &SignPattern::alternating(4).unwrap()).unwrap();
        let b = pure_correlator(&gs, &SignPattern::alternating(4).unwrap().with_start(3).unwrap())
            .unwrap();
        assert!((a.e_value - b.e_value).abs() < 1e-12);
    }

    #[test]
    fn sector_and_full_space_agree() {
        let spec = ChainSpec::xxz(8, -0.4).unwrap();
        let gs_sector = ground_state(&Hamiltonian::build(spec, Some(4)).unwrap(), 1e-12).unwrap();
        let gs_full = ground_state(&Hamiltonian::build(spec, None).unwrap(), 1e-12).unwrap();
        for p in ["+-", "+-+-", "++--", "+-+-+-", "-+-+-+-+", "+-+"] {
            let p: SignPattern = p.parse().unwrap();
            let a = pure_correlator(&gs_sector, &p).unwrap().e_value;
            let b = pure_correlator(&gs_full, &p).unwrap().e_value;
            assert!((a - b).abs() < 1e-10, "{p}: {a} vs {b}");
        }
    }

    #[test]
    fn unbalanced_patterns_vanish_in_sector() {
        let h = Hamiltonian::build(ChainSpec::majumdar_ghosh(8).unwrap(), Some(4)).unwrap();
        let gs = ground_state(&h, 1e-12).unwrap();
        for p in ["+-+-+-+", "++", "+++-", "-"] {
            assert_eq!(pure_correlator(&gs, &p.parse().unwrap()).unwrap().e_value, 0.0);
        }
    }

    #[test]
    fn pattern_must_fit() {
        let gs = PureState::ghz(4).unwrap();
        let p = SignPattern::alternating(3).unwrap().with_start(3).unwrap();
        assert!(matches!(pure_correlator(&gs, &p), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn best_pattern_examples() {
        let ghz = PureState::ghz(5).unwrap();
        assert_eq!(best_pattern(&ghz, 5).unwrap(), SignPattern::all_raise(5).unwrap());

        let neel = PureState::basis_state(Basis::full(4).unwrap(), 0b0101).unwrap();
        assert_eq!(best_pattern(&neel, 4).unwrap(), SignPattern::nth(4, 0).unwrap());

        let h = Hamiltonian::build(ChainSpec::ising(6, 0.5, 0.0).unwrap(), None).unwrap();
        let gs = ground_state(&h, 1e-12).unwrap();
        let best = best_pattern(&gs, 6).unwrap();
        assert_eq!(best.to_string(), "+-+-+-");

        assert!(matches!(best_pattern(&ghz, 13), Err(Error::Capacity { .. })));
    }

    #[test]
    fn pattern_text_round_trip() {
        let p: SignPattern = "+--+".parse().unwrap();
        assert_eq!(p.to_string(), "+--+");
        assert_eq!(p.raises(), 2);
        assert!("+x".parse::<SignPattern>().is_err());
        assert_eq!(SignPattern::nth(3, 0b010).unwrap().to_string(), "+-+");
    }

    #[test]
    fn serial_and_parallel_tail_sums_agree_bitwise() {
        let h = Hamiltonian::build(ChainSpec::ising(16, 0.9, 0.1).unwrap(), None).unwrap();
        let gs = ground_state(&h, 1e-8).unwrap();
        let p = SignPattern::alternating(2).unwrap();
        let a = pure_correlator_with(Execution::Serial, &gs, &p).unwrap();
        let b = pure_correlator_with(Execution::Parallel, &gs, &p).unwrap();
        assert_eq!(a.c_value, b.c_value);
    }

    fn random_state(n: usize, re: &[f64], im: &[f64]) -> PureState {
        let basis = Basis::full(n).unwrap();
        let a = (0..basis.dimension()).map(|i| c(re[i], im[i])).collect();
        PureState::new(basis, a).unwrap()
    }

    proptest! {
        #[test]
        fn global_phase_leaves_e_unchanged(
            re in proptest::collection::vec(-1.0f64..1.0, 32),
            im in proptest::collection::vec(-1.0f64..1.0, 32),
            phi in 0.0f64..6.3,
            code in 0u64..32,
        ) {
            let s = random_state(5, &re, &im);
            let p = SignPattern::nth(5, code).unwrap();
            let a = pure_correlator(&s, &p).unwrap().e_value;
            let b = pure_correlator(&s.with_phase(phi), &p).unwrap().e_value;
            prop_assert!((a - b).abs() <= 1e-15);
        }
    }
}
