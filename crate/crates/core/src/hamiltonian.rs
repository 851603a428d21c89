//! Matrix-free chain Hamiltonians in the σ_z product basis.
//!
//! All models are written with Pauli matrices (eigenvalues ±1) and a unit
//! nearest-neighbour σ_zσ_z coupling:
//!
//! * Ising: `Σ_j σz_j σz_{j+1} + g Σ_j σx_j + K Σ_j σz_j σz_{j+2}`, open chain.
//! * XXZ: `Σ_j (σx σx + σy σy + Δ σz σz)_{j,j+1}`, periodic ring.
//! * Majumdar-Ghosh: `Σ_j σ⃗_j·σ⃗_{j+1} + ½ Σ_j σ⃗_j·σ⃗_{j+2}`, periodic ring.
//!
//! `σxσx + σyσy` acting on an antiparallel pair swaps it with amplitude 2.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::{Basis, MAX_SITES};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};

/// Largest dimension for which explicit matrices are formed.
pub const DENSE_LIMIT: usize = 4096;

const ROW_CHUNK: usize = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Model {
    /// Transverse-field Ising chain with an optional next-nearest σzσz term.
    Ising { g: f64, k_next: f64 },
    Xxz { delta: f64 },
    MajumdarGhosh,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainSpec {
    pub model: Model,
    pub n_sites: usize,
    pub boundary: Boundary,
}

impl ChainSpec {
    pub fn new(model: Model, n_sites: usize, boundary: Boundary) -> Result<Self> {
        if !(2..=MAX_SITES).contains(&n_sites) {
            return Err(Error::arg(format!(
                "number of sites must lie in [2, {MAX_SITES}], got {n_sites}"
            )));
        }
        let expected = match model {
            Model::Ising { .. } => Boundary::Open,
            Model::Xxz { .. } | Model::MajumdarGhosh => Boundary::Periodic,
        };
        if boundary != expected {
            return Err(Error::arg(format!(
                "{model:?} is defined with {expected:?} boundary conditions"
            )));
        }
        if model == Model::MajumdarGhosh && (!n_sites.is_multiple_of(2) || n_sites < 4) {
            return Err(Error::arg(format!(
                "Majumdar-Ghosh chain needs an even number of sites ≥ 4, got {n_sites}"
            )));
        }
        Ok(Self {
            model,
            n_sites,
            boundary,
        })
    }

    pub fn ising(n_sites: usize, g: f64, k_next: f64) -> Result<Self> {
        Self::new(Model::Ising { g, k_next }, n_sites, Boundary::Open)
    }

    pub fn xxz(n_sites: usize, delta: f64) -> Result<Self> {
        Self::new(Model::Xxz { delta }, n_sites, Boundary::Periodic)
    }

    pub fn majumdar_ghosh(n_sites: usize) -> Result<Self> {
        Self::new(Model::MajumdarGhosh, n_sites, Boundary::Periodic)
    }

    pub fn conserves_magnetization(&self) -> bool {
        !matches!(self.model, Model::Ising { .. })
    }
}

/// Real symmetric operator applied without storing its matrix.
pub trait LinearOperator: Sync {
    fn dimension(&self) -> usize;

    /// `y = H x`. Every entry of `y` is overwritten.
    fn apply_with(&self, exec: Execution, x: &[f64], y: &mut [f64]);

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.apply_with(Execution::default(), x, y)
    }
}

/// Discrete symmetry used to select a ground state inside a degenerate
/// eigenspace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Symmetry {
    /// Global spin inversion `Π σx` with eigenvalue `parity` (±1).
    SpinFlip { parity: f64 },
    /// One-site translation with eigenvalue +1 (zero momentum).
    Translation,
}

impl Symmetry {
    /// Project `v` onto the symmetric subspace in place.
    pub fn project(&self, basis: &Basis, v: &mut [f64]) {
        let n = basis.n_sites();
        let src = v.to_vec();
        match *self {
            Symmetry::SpinFlip { parity } => {
                for (i, vi) in v.iter_mut().enumerate() {
                    let j = basis
                        .index_of(basis.spin_flip(basis.config(i)))
                        .expect("spin flip leaves the basis");
                    *vi = 0.5 * (src[i] + parity * src[j]);
                }
            }
            Symmetry::Translation => {
                for (i, vi) in v.iter_mut().enumerate() {
                    let mut c = basis.config(i);
                    let mut acc = 0.0;
                    for _ in 0..n {
                        acc += src[basis.index_of(c).expect("translation leaves the basis")];
                        c = basis.translate(c);
                    }
                    *vi = acc / n as f64;
                }
            }
        }
    }

    fn compatible_with(&self, basis: &Basis) -> bool {
        match self {
            Symmetry::SpinFlip { .. } => basis
                .n_up()
                .is_none_or(|k| 2 * k == basis.n_sites()),
            Symmetry::Translation => true,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Bond {
    a: u32,
    b: u32,
    zz: f64,
    /// Amplitude of the flip-flop on an antiparallel pair.
    flip: f64,
}

#[derive(Clone, Debug)]
pub struct Hamiltonian {
    spec: ChainSpec,
    basis: Basis,
    bonds: Vec<Bond>,
    field: f64,
    diag: Vec<f64>,
}

impl Hamiltonian {
    /// Build the operator on the full space (`sector = None`) or on the
    /// sector with `n_up` up spins.
    pub fn build(spec: ChainSpec, sector: Option<usize>) -> Result<Self> {
        let n = spec.n_sites;
        let basis = match sector {
            None => Basis::full(n)?,
            Some(_) if !spec.conserves_magnetization() => {
                return Err(Error::arg(
                    "the transverse field mixes magnetization sectors; Ising needs the full space",
                ))
            }
            Some(n_up) => Basis::sector(n, n_up)?,
        };
        let mut bonds = Vec::new();
        let mut field = 0.0;
        match spec.model {
            Model::Ising { g, k_next } => {
                field = g;
                for j in 0..n - 1 {
                    bonds.push(Bond { a: j as u32, b: j as u32 + 1, zz: 1.0, flip: 0.0 });
                }
                if k_next != 0.0 {
                    for j in 0..n.saturating_sub(2) {
                        bonds.push(Bond { a: j as u32, b: j as u32 + 2, zz: k_next, flip: 0.0 });
                    }
                }
            }
            Model::Xxz { delta } => {
                for j in 0..n {
                    let b = ((j + 1) % n) as u32;
                    bonds.push(Bond { a: j as u32, b, zz: delta, flip: 2.0 });
                }
            }
            Model::MajumdarGhosh => {
                for (range, w) in [(1usize, 1.0), (2, 0.5)] {
                    for j in 0..n {
                        let b = ((j + range) % n) as u32;
                        bonds.push(Bond { a: j as u32, b, zz: w, flip: 2.0 * w });
                    }
                }
            }
        }
        let diag = (0..basis.dimension())
            .map(|i| {
                let c = basis.config(i);
                bonds
                    .iter()
                    .map(|bd| {
                        let anti = ((c >> bd.a) ^ (c >> bd.b)) & 1;
                        bd.zz * (1.0 - 2.0 * anti as f64)
                    })
                    .sum()
            })
            .collect();
        Ok(Self {
            spec,
            basis,
            bonds,
            field,
            diag,
        })
    }

    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn n_sites(&self) -> usize {
        self.spec.n_sites
    }

    pub fn conserves_magnetization(&self) -> bool {
        self.spec.conserves_magnetization()
    }

    /// Symmetry that singles out the physical ground state when the lowest
    /// level is (quasi-)degenerate.
    ///
    /// For the Ising chain with `g > 0` the ground state has spin-flip parity
    /// `(-1)^N` (the sign-flipped model `g → -g` has a positive ground state);
    /// the Majumdar-Ghosh ring's dimer superposition is translation invariant.
    pub fn natural_symmetry(&self) -> Option<Symmetry> {
        let sym = match self.spec.model {
            Model::Ising { g, .. } if g > 0.0 => Symmetry::SpinFlip {
                parity: if self.n_sites().is_multiple_of(2) { 1.0 } else { -1.0 },
            },
            Model::Ising { g, .. } if g < 0.0 => Symmetry::SpinFlip { parity: 1.0 },
            Model::MajumdarGhosh => Symmetry::Translation,
            _ => return None,
        };
        sym.compatible_with(&self.basis).then_some(sym)
    }

    /// Visit the off-diagonal couplings of the row with configuration `c`.
    #[inline]
    fn for_each_offdiag(&self, c: u32, mut f: impl FnMut(usize, f64)) {
        for bd in &self.bonds {
            if bd.flip != 0.0 && ((c >> bd.a) ^ (c >> bd.b)) & 1 == 1 {
                let c2 = c ^ (1 << bd.a) ^ (1 << bd.b);
                if let Some(j) = self.basis.index_of(c2) {
                    f(j, bd.flip);
                }
            }
        }
        if self.field != 0.0 {
            for s in 0..self.spec.n_sites {
                // Only the full space can carry a transverse field.
                f((c ^ (1 << s)) as usize, self.field);
            }
        }
    }

    fn apply_rows(&self, offset: usize, x: &[f64], ys: &mut [f64]) {
        for (r, y) in ys.iter_mut().enumerate() {
            let i = offset + r;
            let mut acc = self.diag[i] * x[i];
            self.for_each_offdiag(self.basis.config(i), |j, amp| acc += amp * x[j]);
            *y = acc;
        }
    }

    /// `H` applied to a complex vector (real and imaginary parts separately).
    pub fn apply_complex(&self, x: &[Complex64]) -> Vec<Complex64> {
        let re: Vec<f64> = x.iter().map(|z| z.re).collect();
        let im: Vec<f64> = x.iter().map(|z| z.im).collect();
        let mut hre = vec![0.0; x.len()];
        let mut him = vec![0.0; x.len()];
        self.apply(&re, &mut hre);
        self.apply(&im, &mut him);
        hre.into_iter()
            .zip(him)
            .map(|(a, b)| Complex64::new(a, b))
            .collect()
    }

    /// Explicit matrix with entry `(i, j) = <e_i|H e_j>`.
    pub fn dense_matrix(&self) -> Result<DMatrix<f64>> {
        let dim = self.dimension();
        if dim > DENSE_LIMIT {
            return Err(Error::Capacity {
                what: "dense matrix dimension",
                size: dim,
                limit: DENSE_LIMIT,
            });
        }
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = self.diag[i];
            self.for_each_offdiag(self.basis.config(i), |j, amp| m[(i, j)] += amp);
        }
        Ok(m)
    }
}

impl LinearOperator for Hamiltonian {
    fn dimension(&self) -> usize {
        self.basis.dimension()
    }

    fn apply_with(&self, exec: Execution, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dimension());
        assert_eq!(y.len(), self.dimension());
        exec::for_each_chunk_mut(exec, y, ROW_CHUNK, |off, ys| self.apply_rows(off, x, ys));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;
    use nalgebra::SymmetricEigen;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sorted_eigenvalues(h: &Hamiltonian) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(h.dense_matrix().unwrap())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    #[test]
    fn ising_two_sites_zero_field_is_diagonal() {
        let h = Hamiltonian::build(ChainSpec::ising(2, 0.0, 0.0).unwrap(), None).unwrap();
        let m = h.dense_matrix().unwrap();
        // basis order ↓↓, ↓↑(site 1 up), ↑↓, ↑↑
        assert_eq!(
            (0..4).map(|i| m[(i, i)]).collect::<Vec<_>>(),
            vec![1.0, -1.0, -1.0, 1.0]
        );
        assert!(m.iter().enumerate().all(|(k, v)| k % 5 == 0 || *v == 0.0));
    }

    #[test]
    fn ising_two_sites_unit_field_couples_single_flips() {
        let h = Hamiltonian::build(ChainSpec::ising(2, 1.0, 0.0).unwrap(), None).unwrap();
        let m = h.dense_matrix().unwrap();
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.0, 1.0, 1.0, 0.0, //
                1.0, -1.0, 0.0, 1.0, //
                1.0, 0.0, -1.0, 1.0, //
                0.0, 1.0, 1.0, 1.0,
            ],
        );
        assert_eq!(m, expected);
    }

    #[test]
    fn xxz_two_site_ring_doubles_the_bond() {
        let h = Hamiltonian::build(ChainSpec::xxz(2, 1.0).unwrap(), None).unwrap();
        let mut x = vec![0.0; 4];
        x[0b01] = 1.0; // site 1 ↑, site 2 ↓
        let mut y = vec![0.0; 4];
        h.apply(&x, &mut y);
        assert_eq!(y, vec![0.0, -2.0, 4.0, 0.0]);
    }

    #[test]
    fn xxz_four_site_sector_matrix_is_six_by_six() {
        let h = Hamiltonian::build(ChainSpec::xxz(4, 0.3).unwrap(), Some(2)).unwrap();
        let m = h.dense_matrix().unwrap();
        assert_eq!(m.shape(), (6, 6));
        assert_eq!(m, m.transpose());
    }

    #[test]
    fn xxz_four_site_levels() {
        // 4 × the spin-½ closed forms: the Hamiltonian uses Pauli matrices.
        for delta in [-0.5, 0.0, 1.0, 2.5] {
            let h = Hamiltonian::build(ChainSpec::xxz(4, delta).unwrap(), None).unwrap();
            let ev = sorted_eigenvalues(&h);
            let s = (8.0 + delta * delta).sqrt();
            for target in [2.0 * (-delta + s), 2.0 * (-delta - s), -4.0 * delta] {
                assert!(
                    ev.iter().any(|e| (e - target).abs() < 1e-10),
                    "Δ={delta}: {target} missing from {ev:?}"
                );
            }
            if delta > -1.0 {
                assert!((ev[0] - 2.0 * (-delta - s)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn majumdar_ghosh_four_sites_has_doubly_degenerate_singlet_ground_level() {
        let h = Hamiltonian::build(ChainSpec::majumdar_ghosh(4).unwrap(), None).unwrap();
        let m = h.dense_matrix().unwrap();
        assert_eq!(m.shape(), (16, 16));
        assert_eq!(m, m.transpose());
        let ev = sorted_eigenvalues(&h);
        assert!((ev[0] + 6.0).abs() < 1e-12 && (ev[1] + 6.0).abs() < 1e-12);
        assert!(ev[2] > -6.0 + 1.0);
    }

    #[test]
    fn ising_at_zero_field_has_neel_pair_lowest() {
        let h = Hamiltonian::build(ChainSpec::ising(6, 0.0, 0.0).unwrap(), None).unwrap();
        let m = h.dense_matrix().unwrap();
        let lowest = (0..64).map(|i| m[(i, i)]).fold(f64::INFINITY, f64::min);
        assert_eq!(lowest, -5.0);
        assert_eq!(m[(0b010101, 0b010101)], -5.0);
        assert_eq!(m[(0b101010, 0b101010)], -5.0);
        let count = (0..64).filter(|&i| m[(i, i)] == -5.0).count();
        assert_eq!(count, 2);
    }

    #[test]
    fn sector_request_for_ising_is_rejected() {
        let spec = ChainSpec::ising(4, 0.5, 0.0).unwrap();
        assert!(matches!(
            Hamiltonian::build(spec, Some(2)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn boundary_and_parity_rules() {
        assert!(ChainSpec::new(Model::Xxz { delta: 1.0 }, 4, Boundary::Open).is_err());
        assert!(ChainSpec::majumdar_ghosh(5).is_err());
        assert!(ChainSpec::ising(25, 1.0, 0.0).is_err());
    }

    #[test]
    fn dense_matrix_refuses_large_dimensions() {
        let h = Hamiltonian::build(ChainSpec::ising(13, 1.0, 0.0).unwrap(), None).unwrap();
        assert!(matches!(h.dense_matrix(), Err(Error::Capacity { .. })));
    }

    #[test]
    fn serial_and_parallel_matvec_agree_bitwise() {
        let h = Hamiltonian::build(ChainSpec::ising(14, 0.7, 0.2).unwrap(), None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..h.dimension()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut a = vec![0.0; x.len()];
        let mut b = vec![0.0; x.len()];
        h.apply_with(Execution::Serial, &x, &mut a);
        h.apply_with(Execution::Parallel, &x, &mut b);
        assert_eq!(a, b);
    }

    fn random_operator(model: u8, n: usize, p: f64) -> Hamiltonian {
        let spec = match model {
            0 => ChainSpec::ising(n, p, 0.5 * p - 0.3).unwrap(),
            1 => ChainSpec::xxz(n, p).unwrap(),
            _ => ChainSpec::majumdar_ghosh(n + n % 2).unwrap(),
        };
        Hamiltonian::build(spec, None).unwrap()
    }

    proptest! {
        #[test]
        fn operator_is_hermitian(model in 0u8..3, n in 4usize..=9, p in -2.0f64..2.0, seed in 0u64..1000) {
            let h = random_operator(model, n, p);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u: Vec<f64> = (0..h.dimension()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..h.dimension()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (mut hu, mut hv) = (vec![0.0; u.len()], vec![0.0; u.len()]);
            h.apply(&u, &mut hu);
            h.apply(&v, &mut hv);
            let (a, b) = (dot(Execution::Serial, &u, &hv), dot(Execution::Serial, &hu, &v));
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0));
        }

        #[test]
        fn conserving_models_stay_in_their_sector(mg in proptest::bool::ANY, n in 2usize..=6, delta in -2.0f64..2.0, seed in 0u64..1000) {
            let n = 2 * n;
            let spec = if mg { ChainSpec::majumdar_ghosh(n) } else { ChainSpec::xxz(n, delta) }.unwrap();
            let h = Hamiltonian::build(spec, None).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = rng.gen_range(0..=n);
            // random vector supported on one sector, in the full space
            let x: Vec<f64> = (0..h.dimension())
                .map(|c| if (c as u32).count_ones() as usize == k { rng.gen_range(-1.0..1.0) } else { 0.0 })
                .collect();
            let mut y = vec![0.0; x.len()];
            h.apply(&x, &mut y);
            for (c, yc) in y.iter().enumerate() {
                if (c as u32).count_ones() as usize != k {
                    prop_assert_eq!(*yc, 0.0);
                }
            }
        }
    }
}
