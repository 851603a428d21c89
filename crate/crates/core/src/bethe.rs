//! Coordinate Bethe Ansatz for the ground state of the periodic XXZ ring in
//! the gapless regime `|Δ| < 1`.
//!
//! Conventions (fixed against exact diagonalization):
//!
//! * `-Δ = cos 2η`, `η ∈ (0, π/2)`;
//! * `p(λ) = i ln[cosh(λ - iη) / cosh(λ + iη)]`,
//!   `θ(λ) = i ln[sinh(λ + 2iη) / sinh(2iη - λ)]`, both real and continuous
//!   for real `λ`;
//! * Bethe equations `N p(λ_j) = 2π I_j - Σ_k θ(λ_j - λ_k)` with
//!   `I_j = -(M+1)/2 + j`, `M = N/2`;
//! * `χ(m|λ) = |N_M|^{-1} Σ_σ (-1)^{|σ|} exp(-i Σ_j m_j p(λ_{σj}))
//!   exp(-(i/2) Σ_{k>j} θ(λ_{σk} - λ_{σj}))` over ascending down positions
//!   `m`;
//! * `|N_M|² = det G / Π_j K₁(λ_j)` with `G` the Jacobian of the Bethe
//!   equations.
//!
//! `χ` describes the ground state of the Hamiltonian with the opposite sign
//! of the exchange term; the sublattice rotation `(-1)^{Σ m}` maps it onto
//! the ground state of [`crate::hamiltonian::Model::Xxz`]. Correlators of the
//! Néel type are insensitive to that sign.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::basis::Basis;
use crate::eigensolver::PureState;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};

/// Permutation sums run over at most `7! = 5040` terms.
pub const MAX_MAGNONS: usize = 7;

pub const ROOT_TOLERANCE: f64 = 1e-12;

const CONTINUATION_STEP: f64 = 0.05;
const MIN_STEP: f64 = 1e-4;
const NEWTON_ITERATIONS: usize = 50;
const PERMUTATION_CHUNK: usize = 256;

pub fn eta_from_delta(delta: f64) -> f64 {
    0.5 * (-delta).acos()
}

/// Quasi-momentum `p(λ)`.
pub fn momentum(lambda: f64, eta: f64) -> f64 {
    2.0 * (lambda.tanh() * eta.sin()).atan2(eta.cos())
}

/// Two-body scattering phase `θ(λ)`.
pub fn scattering_phase(lambda: f64, eta: f64) -> f64 {
    let e2 = 2.0 * eta;
    2.0 * (lambda.tanh() * e2.cos()).atan2(e2.sin())
}

/// `K₁ = dp/dλ`.
pub fn kernel_k1(lambda: f64, eta: f64) -> f64 {
    let (c, s) = (lambda.cosh(), lambda.sinh());
    (2.0 * eta).sin() / (c * c * eta.cos().powi(2) + s * s * eta.sin().powi(2))
}

/// `K₂ = dθ/dλ`.
pub fn kernel_k2(lambda: f64, eta: f64) -> f64 {
    let (c, s) = (lambda.cosh(), lambda.sinh());
    let e2 = 2.0 * eta;
    (4.0 * eta).sin() / (s * s * e2.cos().powi(2) + c * c * e2.sin().powi(2))
}

/// Ground-state quantum numbers `-(M+1)/2 + j`, `j = 1..M`.
pub fn ground_quantum_numbers(m: usize) -> Vec<f64> {
    (1..=m).map(|j| j as f64 - (m as f64 + 1.0) / 2.0).collect()
}

fn bethe_residual(n: usize, eta: f64, qn: &[f64], roots: &[f64]) -> Vec<f64> {
    roots
        .iter()
        .zip(qn)
        .map(|(&lj, &ij)| {
            let scatter: f64 = roots.iter().map(|&lk| scattering_phase(lj - lk, eta)).sum();
            n as f64 * momentum(lj, eta) - 2.0 * PI * ij + scatter
        })
        .collect()
}

/// Jacobian of the Bethe equations (the Gaudin matrix).
fn jacobian(n: usize, eta: f64, roots: &[f64]) -> DMatrix<f64> {
    let m = roots.len();
    DMatrix::from_fn(m, m, |j, k| {
        let off = -kernel_k2(roots[j] - roots[k], eta);
        if j == k {
            n as f64 * kernel_k1(roots[j], eta)
                + roots.iter().map(|&l| kernel_k2(roots[j] - l, eta)).sum::<f64>()
                + off
        } else {
            off
        }
    })
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Newton iteration from `start`; `None` when it fails to reach the tolerance.
fn newton(n: usize, eta: f64, qn: &[f64], start: &[f64]) -> Option<(Vec<f64>, f64)> {
    let mut roots = start.to_vec();
    let mut res = max_abs(&bethe_residual(n, eta, qn, &roots));
    for _ in 0..NEWTON_ITERATIONS {
        if res <= ROOT_TOLERANCE {
            return Some((roots, res));
        }
        let f = DVector::from_vec(bethe_residual(n, eta, qn, &roots));
        let step = jacobian(n, eta, &roots).lu().solve(&(-f))?;
        roots.iter_mut().zip(step.iter()).for_each(|(r, d)| *r += d);
        res = max_abs(&bethe_residual(n, eta, qn, &roots));
        if !res.is_finite() {
            return None;
        }
    }
    (res <= ROOT_TOLERANCE).then_some((roots, res))
}

/// Solved ground state of the `N`-site ring.
#[derive(Clone, Debug)]
pub struct BetheState {
    n_sites: usize,
    delta: f64,
    eta: f64,
    quantum_numbers: Vec<f64>,
    roots: Vec<f64>,
    residual: f64,
    gaudin_norm_sq: f64,
    momenta: Vec<f64>,
}

/// Ground-state rapidities by continuation in `Δ` from the free-fermion
/// point, where `θ ≡ 0` and the equations decouple.
pub fn solve_ground(n: usize, delta: f64) -> Result<BetheState> {
    if !n.is_multiple_of(2) || !(4..=2 * MAX_MAGNONS).contains(&n) {
        return Err(Error::arg(format!(
            "Bethe solution needs an even N in [4, {}], got {n}",
            2 * MAX_MAGNONS
        )));
    }
    if delta.is_nan() || delta.abs() >= 1.0 {
        return Err(Error::Domain(format!(
            "Bethe roots are real only in the gapless phase |Δ| < 1, got Δ = {delta}"
        )));
    }
    let m = n / 2;
    let qn = ground_quantum_numbers(m);
    let eta0 = eta_from_delta(0.0);
    let mut roots: Vec<f64> = qn
        .iter()
        .map(|&i| ((PI * i / n as f64).tan() / eta0.tan()).atanh())
        .collect();
    let mut at = 0.0;
    let mut residual = max_abs(&bethe_residual(n, eta0, &qn, &roots));
    let mut step = CONTINUATION_STEP;
    while at != delta {
        let next = if (delta - at).abs() <= step {
            delta
        } else {
            at + step * (delta - at).signum()
        };
        match newton(n, eta_from_delta(next), &qn, &roots) {
            Some((r, res)) => {
                roots = r;
                residual = res;
                at = next;
            }
            None => {
                step *= 0.5;
                if step < MIN_STEP {
                    return Err(Error::Convergence {
                        context: format!("Bethe continuation at Δ = {next}"),
                        residual,
                    });
                }
            }
        }
    }
    let eta = eta_from_delta(delta);
    let g = jacobian(n, eta, &roots);
    let gaudin_norm_sq =
        g.determinant() / roots.iter().map(|&l| kernel_k1(l, eta)).product::<f64>();
    let momenta = roots.iter().map(|&l| momentum(l, eta)).collect();
    Ok(BetheState {
        n_sites: n,
        delta,
        eta,
        quantum_numbers: qn,
        roots,
        residual,
        gaudin_norm_sq,
        momenta,
    })
}

/// `n!` permutation of `0..n` with rank `r` in lexicographic order, and its
/// parity.
fn unrank_permutation(mut r: usize, n: usize) -> (Vec<usize>, bool) {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n);
    let mut odd = false;
    for i in (0..n).rev() {
        let f = (1..=i).product::<usize>();
        let d = r / f;
        r %= f;
        odd ^= d % 2 == 1;
        out.push(pool.remove(d));
    }
    (out, odd)
}

impl BetheState {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn m_down(&self) -> usize {
        self.roots.len()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn quantum_numbers(&self) -> &[f64] {
        &self.quantum_numbers
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    /// Largest Bethe-equation residual at the solution.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn gaudin_norm_sq(&self) -> f64 {
        self.gaudin_norm_sq
    }

    pub fn gaudin_matrix(&self) -> DMatrix<f64> {
        jacobian(self.n_sites, self.eta, &self.roots)
    }

    /// Eigenvalue of the Pauli-matrix XXZ Hamiltonian:
    /// `NΔ - 4 Σ_j (cos p_j + Δ)`.
    pub fn energy(&self) -> f64 {
        self.n_sites as f64 * self.delta
            - 4.0 * self.momenta.iter().map(|p| p.cos() + self.delta).sum::<f64>()
    }

    fn check_positions(&self, down: &[usize]) -> Result<Vec<usize>> {
        let m = self.m_down();
        if m > MAX_MAGNONS {
            return Err(Error::Capacity {
                what: "magnon count",
                size: m,
                limit: MAX_MAGNONS,
            });
        }
        let mut sorted = down.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != m || down.len() != m {
            return Err(Error::arg(format!("need {m} distinct down-spin positions")));
        }
        if sorted[0] == 0 || sorted[m - 1] > self.n_sites {
            return Err(Error::arg(format!("positions must lie in 1..={}", self.n_sites)));
        }
        Ok(sorted)
    }

    /// `χ(m|λ)` for 1-based down-spin positions (any order).
    pub fn amplitude(&self, down: &[usize]) -> Result<Complex64> {
        self.amplitude_with(Execution::default(), down)
    }

    pub fn amplitude_with(&self, exec: Execution, down: &[usize]) -> Result<Complex64> {
        let pos = self.check_positions(down)?;
        let m = pos.len();
        let theta = DMatrix::from_fn(m, m, |a, b| {
            scattering_phase(self.roots[a] - self.roots[b], self.eta)
        });
        let count = (1..=m).product::<usize>();
        let term = |r: usize| -> Complex64 {
            let (sigma, odd) = unrank_permutation(r, m);
            let mut phase: f64 = pos
                .iter()
                .zip(&sigma)
                .map(|(&mj, &s)| -(mj as f64) * self.momenta[s])
                .sum();
            for j in 0..m {
                for k in j + 1..m {
                    phase -= 0.5 * theta[(sigma[k], sigma[j])];
                }
            }
            let z = Complex64::from_polar(1.0, phase);
            if odd {
                -z
            } else {
                z
            }
        };
        let sum = exec::tree_sum(exec::map_chunks(exec, count, PERMUTATION_CHUNK, |r| {
            r.map(term).sum::<Complex64>()
        }));
        Ok(sum / self.gaudin_norm_sq.sqrt())
    }

    /// Amplitude in the sign convention of the exact-diagonalization
    /// Hamiltonian: `(-1)^{Σ m} χ(m|λ)`.
    pub fn gauged_amplitude(&self, down: &[usize]) -> Result<Complex64> {
        let chi = self.amplitude(down)?;
        Ok(if down.iter().sum::<usize>() % 2 == 1 { -chi } else { chi })
    }

    /// Down spins on odd sites `1, 3, …, 2k-1`, plus `extra`.
    fn odd_set(k: usize, extra: Option<usize>) -> Vec<usize> {
        (0..k).map(|j| 2 * j + 1).chain(extra).collect()
    }

    /// Down spins on even sites `2, 4, …, 2k`, plus `extra`.
    fn even_set(k: usize, extra: Option<usize>) -> Vec<usize> {
        (0..k).map(|j| 2 * j + 2).chain(extra).collect()
    }

    /// `E_N = |χ(O_N)|² |χ(E_N)|²`.
    pub fn e_n(&self) -> Result<f64> {
        let m = self.m_down();
        let o = self.amplitude(&Self::odd_set(m, None))?;
        let e = self.amplitude(&Self::even_set(m, None))?;
        Ok(o.norm_sqr() * e.norm_sqr())
    }

    /// `E_{N-2} = |Σ_{j ∈ {N-1, N}} χ*(O_{N-2} ∪ j) χ(E_{N-2} ∪ j)|²`.
    pub fn e_n_minus_2(&self) -> Result<f64> {
        let k = self.m_down() - 1;
        let mut c = Complex64::new(0.0, 0.0);
        for j in [self.n_sites - 1, self.n_sites] {
            let o = self.amplitude(&Self::odd_set(k, Some(j)))?;
            let e = self.amplitude(&Self::even_set(k, Some(j)))?;
            c += o.conj() * e;
        }
        Ok(c.norm_sqr())
    }

    /// Gauge-fixed amplitudes on the `N/2` sector basis, without
    /// renormalization.
    pub fn sector_amplitudes(&self) -> Result<(Basis, Vec<Complex64>)> {
        let n = self.n_sites;
        let basis = Basis::sector(n, n - self.m_down())?;
        let amps = (0..basis.dimension())
            .map(|i| {
                let c = basis.config(i);
                let down: Vec<usize> = (0..n).filter(|j| c >> j & 1 == 0).map(|j| j + 1).collect();
                self.gauged_amplitude(&down)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((basis, amps))
    }

    /// The Bethe ground state as a normalized state vector.
    pub fn state_vector(&self) -> Result<PureState> {
        let (basis, amps) = self.sector_amplitudes()?;
        PureState::new(basis, amps)
    }
}
