//! Ground states by restarted Lanczos, dense spectra and Gibbs weights.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::Basis;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::hamiltonian::{Hamiltonian, LinearOperator, Symmetry, DENSE_LIMIT};
use crate::linalg::{axpy, dot, norm, normalize, orthogonalize, scale};

/// Seed of the pseudo-random Lanczos start vector.
pub const DEFAULT_SEED: u64 = 0x5eed_c0de;

/// Levels closer than this are reported as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-10;

const VECTOR_CHUNK: usize = 1 << 14;

/// Normalized state in the product basis.
#[derive(Clone, Debug)]
pub struct PureState {
    basis: Basis,
    amplitudes: Vec<Complex64>,
    energy: Option<f64>,
    degenerate: bool,
    gap: Option<f64>,
    residual: Option<f64>,
    seed: Option<u64>,
}

impl PureState {
    /// Normalize `amplitudes` and wrap them.
    pub fn new(basis: Basis, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dimension() {
            return Err(Error::arg(format!(
                "{} amplitudes for a basis of dimension {}",
                amplitudes.len(),
                basis.dimension()
            )));
        }
        let nrm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(nrm.is_finite() && nrm > 0.0) {
            return Err(Error::arg("state vector has zero or non-finite norm"));
        }
        amplitudes.iter_mut().for_each(|z| *z /= nrm);
        Ok(Self {
            basis,
            amplitudes,
            energy: None,
            degenerate: false,
            gap: None,
            residual: None,
            seed: None,
        })
    }

    pub fn from_real(basis: Basis, amplitudes: &[f64]) -> Result<Self> {
        Self::new(basis, amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// `(|↑…↑> + |↓…↓>)/√2` on the full space.
    pub fn ghz(n_sites: usize) -> Result<Self> {
        let basis = Basis::full(n_sites)?;
        let mut a = vec![Complex64::new(0.0, 0.0); basis.dimension()];
        a[0] = Complex64::new(1.0, 0.0);
        a[basis.dimension() - 1] = Complex64::new(1.0, 0.0);
        Self::new(basis, a)
    }

    /// Product state `⊗_j (a_j |↓> + b_j |↑>)` with one `[a, b]` per site.
    pub fn product(sites: &[[Complex64; 2]]) -> Result<Self> {
        let basis = Basis::full(sites.len())?;
        let a = (0..basis.dimension())
            .map(|c| {
                sites
                    .iter()
                    .enumerate()
                    .map(|(j, s)| s[(c >> j) & 1])
                    .product()
            })
            .collect();
        Self::new(basis, a)
    }

    /// Single product configuration `bits`.
    pub fn basis_state(basis: Basis, bits: u32) -> Result<Self> {
        let i = basis
            .index_of(bits)
            .ok_or_else(|| Error::arg(format!("configuration {bits:#b} is not in the basis")))?;
        let mut a = vec![Complex64::new(0.0, 0.0); basis.dimension()];
        a[i] = Complex64::new(1.0, 0.0);
        Self::new(basis, a)
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn n_sites(&self) -> usize {
        self.basis.n_sites()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Amplitude of configuration `bits`; zero outside the basis.
    pub fn amplitude_of(&self, bits: u32) -> Complex64 {
        self.basis
            .index_of(bits)
            .map_or(Complex64::new(0.0, 0.0), |i| self.amplitudes[i])
    }

    /// Eigenvalue when the state came from a solver.
    pub fn energy(&self) -> Option<f64> {
        self.energy
    }

    /// True when the solver found a second level within [`DEGENERACY_GAP`].
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Distance to the next level, when it was computed.
    pub fn gap(&self) -> Option<f64> {
        self.gap
    }

    pub fn residual(&self) -> Option<f64> {
        self.residual
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Same state times a global phase `e^{iφ}`.
    pub fn with_phase(&self, phi: f64) -> Self {
        let p = Complex64::from_polar(1.0, phi);
        let mut s = self.clone();
        s.amplitudes.iter_mut().for_each(|z| *z *= p);
        s
    }

    /// `|<self|other>|`, for states on the same basis.
    pub fn overlap(&self, other: &PureState) -> Result<f64> {
        if self.amplitudes.len() != other.amplitudes.len() || self.n_sites() != other.n_sites() {
            return Err(Error::arg("overlap between states on different bases"));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm())
    }
}

/// Settings of the restarted Lanczos iteration.
#[derive(Clone, Debug)]
pub struct LanczosConfig {
    /// Relative residual target: `‖Hv − Ev‖ ≤ tol · ‖H‖_est`.
    pub tol: f64,
    /// Krylov vectors kept per restart cycle.
    pub krylov_dim: usize,
    pub max_restarts: usize,
    pub seed: u64,
    /// Restrict the iteration to a symmetry sector.
    pub symmetry: Option<Symmetry>,
    /// Run a second, deflated solve to measure the gap to the next level.
    pub check_degeneracy: bool,
    /// Start vector; a seeded random vector when absent.
    pub start: Option<Vec<f64>>,
    pub exec: Execution,
}

impl LanczosConfig {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            krylov_dim: 40,
            max_restarts: 500,
            seed: DEFAULT_SEED,
            symmetry: None,
            check_degeneracy: true,
            start: None,
            exec: Execution::default(),
        }
    }
}

/// Lowest eigenpair found by [`lowest_eigenpair`].
#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    /// Largest |Ritz value| seen, used as the operator-norm estimate.
    pub norm_estimate: f64,
    pub matvecs: usize,
}

fn random_vector(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn combine(exec: Execution, vectors: &[Vec<f64>], coeffs: &[f64], out: &mut [f64]) {
    exec::for_each_chunk_mut(exec, out, VECTOR_CHUNK, |off, xs| {
        let len = xs.len();
        xs.iter_mut().for_each(|x| *x = 0.0);
        for (v, &c) in vectors.iter().zip(coeffs) {
            for (x, vi) in xs.iter_mut().zip(&v[off..off + len]) {
                *x += c * vi;
            }
        }
    });
}

/// Lowest eigenpair of `op` on the orthogonal complement of `deflate`, with an
/// explicitly restarted Lanczos iteration and full reorthogonalization.
///
/// `project` is applied to every Krylov vector; it must commute with `op`
/// (pass a no-op to search the whole space).
pub fn lowest_eigenpair<O: LinearOperator + ?Sized>(
    op: &O,
    cfg: &LanczosConfig,
    deflate: &[&[f64]],
    project: &dyn Fn(&mut [f64]),
) -> Result<Eigenpair> {
    let dim = op.dimension();
    let exec = cfg.exec;
    if !(cfg.tol > 0.0 && cfg.tol <= 1e-6) {
        return Err(Error::arg(format!("tolerance must lie in (0, 1e-6], got {}", cfg.tol)));
    }
    if dim <= deflate.len() {
        return Err(Error::arg("no space left after deflation"));
    }
    let mut v = match &cfg.start {
        Some(s) if s.len() == dim => s.clone(),
        Some(s) => {
            return Err(Error::arg(format!("start vector has length {}, expected {dim}", s.len())))
        }
        None => random_vector(dim, cfg.seed),
    };
    orthogonalize(exec, deflate, &mut v);
    project(&mut v);
    if normalize(exec, &mut v) == 0.0 {
        return Err(Error::arg("start vector vanishes in the requested subspace"));
    }

    let kmax = cfg.krylov_dim.max(2).min(dim - deflate.len());
    let mut hnorm: f64 = 0.0;
    let mut best = f64::INFINITY;
    let mut matvecs = 0;
    let mut w = vec![0.0; dim];
    for _ in 0..cfg.max_restarts {
        let mut krylov = vec![v];
        let mut alpha = Vec::with_capacity(kmax);
        let mut beta = Vec::with_capacity(kmax);
        loop {
            let j = krylov.len() - 1;
            op.apply_with(exec, &krylov[j], &mut w);
            matvecs += 1;
            let a = dot(exec, &krylov[j], &w);
            alpha.push(a);
            hnorm = hnorm.max(a.abs());
            let refs: Vec<&[f64]> = deflate
                .iter()
                .copied()
                .chain(krylov.iter().map(|q| q.as_slice()))
                .collect();
            orthogonalize(exec, &refs, &mut w);
            project(&mut w);
            let b = norm(exec, &w);
            if krylov.len() == kmax || b <= 1e-13 * hnorm.max(1.0) {
                break;
            }
            beta.push(b);
            hnorm = hnorm.max(b);
            scale(exec, 1.0 / b, &mut w);
            krylov.push(w.clone());
        }

        let k = alpha.len();
        let t = DMatrix::from_fn(k, k, |i, j| match i.abs_diff(j) {
            0 => alpha[i],
            1 => beta[i.min(j)],
            _ => 0.0,
        });
        let eig = SymmetricEigen::new(t);
        let (imin, _) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty tridiagonal");
        hnorm = hnorm.max(eig.eigenvalues.amax());
        let coeffs: Vec<f64> = eig.eigenvectors.column(imin).iter().copied().collect();

        let mut x = vec![0.0; dim];
        combine(exec, &krylov, &coeffs, &mut x);
        drop(krylov);
        project(&mut x);
        normalize(exec, &mut x);
        op.apply_with(exec, &x, &mut w);
        matvecs += 1;
        let theta = dot(exec, &x, &w);
        axpy(exec, -theta, &x, &mut w);
        let residual = norm(exec, &w);
        best = best.min(residual);
        if residual <= cfg.tol * hnorm.max(f64::MIN_POSITIVE) {
            return Ok(Eigenpair {
                value: theta,
                vector: x,
                residual,
                norm_estimate: hnorm,
                matvecs,
            });
        }
        v = x;
    }
    Err(Error::Convergence {
        context: format!("Lanczos (dimension {dim})"),
        residual: best,
    })
}

/// Ground state of `h` with residual `≤ tol · ‖H‖_est`.
///
/// A quasi-degenerate ground level is resolved by the operator's natural
/// symmetry when it has one and reported through [`PureState::is_degenerate`].
pub fn ground_state(h: &Hamiltonian, tol: f64) -> Result<PureState> {
    let mut cfg = LanczosConfig::new(tol);
    cfg.symmetry = h.natural_symmetry();
    ground_state_with(h, &cfg)
}

pub fn ground_state_with(h: &Hamiltonian, cfg: &LanczosConfig) -> Result<PureState> {
    let basis = h.basis().clone();
    if basis.dimension() < 2 {
        return Err(Error::arg("ground_state needs dimension ≥ 2"));
    }
    let project = |v: &mut [f64]| {
        if let Some(sym) = cfg.symmetry {
            sym.project(&basis, v);
        }
    };
    let gs = lowest_eigenpair(h, cfg, &[], &project)?;

    let gap = if cfg.check_degeneracy && basis.dimension() > 1 {
        let mut second = cfg.clone();
        second.seed = cfg.seed.wrapping_add(1);
        second.start = None;
        let next = lowest_eigenpair(h, &second, &[&gs.vector], &|_: &mut [f64]| {})?;
        Some((next.value - gs.value).max(0.0))
    } else {
        None
    };

    let mut state = PureState::from_real(basis, &gs.vector)?;
    state.energy = Some(gs.value);
    state.residual = Some(gs.residual);
    state.seed = Some(cfg.seed);
    state.gap = gap;
    state.degenerate = gap.is_some_and(|g| g < DEGENERACY_GAP);
    Ok(state)
}

/// Complete eigensystem of a small operator.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    basis: Basis,
    eigenvalues: Vec<f64>,
    /// Column `n` is the eigenvector of `eigenvalues[n]`.
    eigenvectors: DMatrix<f64>,
}

impl SpectralDecomposition {
    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn state(&self, n: usize) -> PureState {
        let col: Vec<f64> = self.eigenvectors.column(n).iter().copied().collect();
        let mut s = PureState::from_real(self.basis.clone(), &col).expect("unit eigenvector");
        s.energy = Some(self.eigenvalues[n]);
        s
    }
}

/// Dense diagonalization, limited to dimension [`DENSE_LIMIT`].
pub fn full_spectrum(h: &Hamiltonian) -> Result<SpectralDecomposition> {
    let m = h.dense_matrix()?;
    let dim = m.nrows();
    debug_assert!(dim <= DENSE_LIMIT);
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = DMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(SpectralDecomposition {
        basis: h.basis().clone(),
        eigenvalues,
        eigenvectors,
    })
}

/// Gibbs weights over a spectrum (`k_B = 1`).
#[derive(Clone, Debug)]
pub struct ThermalWeights {
    pub beta: f64,
    pub weights: Vec<f64>,
}

/// `w_n = e^{−β(E_n − E_0)} / Σ_m e^{−β(E_m − E_0)}`; `β = ∞` puts equal
/// weight on the lowest level's members.
pub fn thermal_weights(spec: &SpectralDecomposition, beta: f64) -> Result<ThermalWeights> {
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::arg(format!("inverse temperature must be ≥ 0, got {beta}")));
    }
    let ev = spec.eigenvalues();
    let e0 = ev.first().copied().unwrap_or(0.0);
    let raw: Vec<f64> = ev
        .iter()
        .map(|&e| {
            if beta.is_infinite() {
                if e - e0 <= DEGENERACY_GAP { 1.0 } else { 0.0 }
            } else {
                (-beta * (e - e0)).exp()
            }
        })
        .collect();
    let z: f64 = raw.iter().sum();
    Ok(ThermalWeights {
        beta,
        weights: raw.into_iter().map(|w| w / z).collect(),
    })
}
