//! Closed-form correlators: the four-site XXZ ring at any temperature and
//! the Majumdar-Ghosh dimer ground state.

use num_complex::Complex64;

use crate::basis::Basis;
use crate::eigensolver::PureState;
use crate::error::{Error, Result};

/// Ratio between the eigenvalues of the Pauli-matrix Hamiltonians built by
/// [`crate::hamiltonian`] and the spin-½ (`S = σ/2`) energies used for the
/// four-site levels below. Inverse temperatures are conjugate to the former.
pub const PAULI_ENERGY_SCALE: f64 = 4.0;

/// Four-site XXZ levels in spin-½ units, with the diagonal elements of
/// `Â₄ = σ+σ-σ+σ-` on the three states where it does not vanish.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Xxz4Levels {
    pub delta: f64,
    pub e_plus: f64,
    pub e_minus: f64,
    /// Energy of `(|↑↓↑↓> - |↓↑↓↑>)/√2`, equal to `-Δ`.
    pub e_delta_level: f64,
    pub a_plus: f64,
    pub a_minus: f64,
    pub a_delta: f64,
}

impl Xxz4Levels {
    pub fn new(delta: f64) -> Self {
        let s = (8.0 + delta * delta).sqrt();
        Self {
            delta,
            e_plus: 0.5 * (-delta + s),
            e_minus: 0.5 * (-delta - s),
            e_delta_level: -delta,
            a_plus: 0.25 * (1.0 - delta / s),
            a_minus: 0.25 * (1.0 + delta / s),
            a_delta: -0.5,
        }
    }

    /// All 16 levels as `(energy, degeneracy, <n|Â₄|n>)`.
    pub fn spectrum(&self) -> [(f64, u32, f64); 8] {
        [
            (self.e_minus, 1, self.a_minus),
            (self.e_plus, 1, self.a_plus),
            (self.e_delta_level, 1, self.a_delta),
            // remaining S_z = 0 states
            (0.0, 3, 0.0),
            // S_z = ±1 magnons at k = 0, ±π/2, π
            (1.0, 2, 0.0),
            (0.0, 4, 0.0),
            (-1.0, 2, 0.0),
            // S_z = ±2
            (self.delta, 2, 0.0),
        ]
    }

    /// `√(8 + Δ²)`.
    fn root(&self) -> f64 {
        self.e_plus - self.e_minus
    }
}

/// Zero-temperature `E₄ = (1 + Δ/√(8+Δ²))² / 16`, valid while `|E₋>` is the
/// ground state.
pub fn xxz4_zero_t(delta: f64) -> Result<f64> {
    if delta.is_nan() || delta <= -1.0 {
        return Err(Error::Domain(format!(
            "the four-site ground state is |E₋> only for Δ > -1, got Δ = {delta}"
        )));
    }
    let l = Xxz4Levels::new(delta);
    Ok(l.a_minus * l.a_minus)
}

/// Thermal `E₄ = |Σ_n w_n <n|Â₄|n>|²` with Gibbs weights over all 16 levels.
///
/// `beta` multiplies the eigenvalues of the Pauli-matrix Hamiltonian, i.e.
/// `PAULI_ENERGY_SCALE` times the spin-½ levels. `beta = ∞` averages over the
/// lowest level.
pub fn xxz4_thermal(delta: f64, beta: f64) -> Result<f64> {
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::arg(format!("inverse temperature must be ≥ 0, got {beta}")));
    }
    let levels = Xxz4Levels::new(delta).spectrum();
    let e0 = levels.iter().map(|l| l.0).fold(f64::INFINITY, f64::min);
    let weight = |e: f64| {
        if beta.is_infinite() {
            if e - e0 <= 1e-12 { 1.0 } else { 0.0 }
        } else {
            (-beta * PAULI_ENERGY_SCALE * (e - e0)).exp()
        }
    };
    let (mut z, mut c) = (0.0, 0.0);
    for &(e, g, a) in &levels {
        let w = g as f64 * weight(e);
        z += w;
        c += w * a;
    }
    Ok((c / z).powi(2))
}

/// Literal transcription of the printed finite-temperature expression for
/// `E₄` and its partition function, with `beta` applied to the spin-½
/// energies.
///
/// Its bracket and partition function use different level spacings, so it
/// agrees with [`xxz4_thermal`] only as `beta → ∞`; it is kept as a
/// reference for that comparison.
pub fn xxz4_thermal_printed(delta: f64, beta: f64) -> Result<f64> {
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::arg(format!("inverse temperature must be ≥ 0, got {beta}")));
    }
    let l = Xxz4Levels::new(delta);
    let s = l.root();
    let em = l.e_minus;
    let bracket = -0.5 * (-beta * (delta + s)).exp()
        + 0.25 * (1.0 + delta / s)
        + 0.25 * (1.0 - delta / s) * (-2.0 * beta * s).exp();
    let z = 1.0
        + (-beta * (l.e_plus - em)).exp()
        + (-beta * (-delta - em)).exp()
        + 2.0 * (-beta * (-1.0 - em)).exp()
        + 7.0 * (beta * em).exp()
        + 2.0 * (-beta * (1.0 - em)).exp()
        + 2.0 * (-beta * (delta - em)).exp();
    Ok(bracket * bracket / (z * z))
}

/// Ground state `(|ψ₁> + |ψ₂>)/𝒩` of the periodic Majumdar-Ghosh ring, where
/// `ψ₁` pairs sites `(2j+1, 2j+2)` and `ψ₂` pairs `(2j+2, 2j+3)` into
/// singlets `(|↑↓> - |↓↑>)/√2`, the last one being `(N, 1)`. This is the
/// translation-even combination, since `Tψ₁ = ψ₂`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MgGroundState {
    pub n_sites: usize,
    /// `𝒩² = 2 + 2<ψ₁|ψ₂> = 2^{2-N/2} (2^{N/2-1} + (-1)^{N/2})`.
    pub norm_sq: f64,
}

impl MgGroundState {
    pub fn new(n_sites: usize) -> Result<Self> {
        if !n_sites.is_multiple_of(2) || !(4..=crate::basis::MAX_SITES).contains(&n_sites) {
            return Err(Error::arg(format!(
                "Majumdar-Ghosh ring needs an even N in [4, {}], got {n_sites}",
                crate::basis::MAX_SITES
            )));
        }
        let h = (n_sites / 2) as i32;
        let sign = if h % 2 == 0 { 1.0 } else { -1.0 };
        Ok(Self {
            n_sites,
            norm_sq: 2f64.powi(2 - h) * (2f64.powi(h - 1) + sign),
        })
    }

    fn half(&self) -> i32 {
        (self.n_sites / 2) as i32
    }

    fn even_half(&self) -> bool {
        self.half() % 2 == 0
    }

    /// `2^{2-N/2} (1 + 2^{N/2-1})`, the norm written for `N/2` even. For
    /// `N/2` odd the overlap `<ψ₁|ψ₂> = -2^{1-N/2}` is negative and this
    /// overestimates [`Self::norm_sq`].
    pub fn printed_norm_sq(&self) -> f64 {
        let h = self.half();
        2f64.powi(2 - h) * (1.0 + 2f64.powi(h - 1))
    }

    /// `<ψ|Â_N|ψ> = (1 + (-1)^{N/2})/2 · 1/(1 + 2^{N/2-1})`.
    pub fn a_n(&self) -> f64 {
        if self.even_half() {
            1.0 / (1.0 + 2f64.powi(self.half() - 1))
        } else {
            0.0
        }
    }

    /// `<ψ|Â_{N-2}|ψ>`. With `<ψ₁|Â|ψ₁> = (-1/2)^{N/2-1}`,
    /// `<ψ₂|Â|ψ₁> = -(1/2)^{N/2}` (twice, once per ordering) and
    /// `<ψ₂|Â|ψ₂> = 0` the sum is `-1/(1 + 2^{N/2-1})` for `N/2` even and `0`
    /// for `N/2` odd, so `E_{N-2} = E_N`.
    pub fn a_n_minus_2(&self) -> f64 {
        if self.even_half() {
            -1.0 / (1.0 + 2f64.powi(self.half() - 1))
        } else {
            0.0
        }
    }

    /// The printed value `-1/2 · 1/(1 + 2^{N/2-1})`, half of
    /// [`Self::a_n_minus_2`]; exact diagonalization does not reproduce it.
    pub fn a_n_minus_2_printed(&self) -> f64 {
        -0.5 / (1.0 + 2f64.powi(self.half() - 1))
    }

    /// Amplitude of one dimer covering on configuration `bits`.
    fn dimer_amplitude(&self, bits: u32, offset: usize) -> f64 {
        let n = self.n_sites;
        let mut amp = 1.0;
        for j in 0..n / 2 {
            let a = (2 * j + offset) % n;
            let b = (2 * j + 1 + offset) % n;
            let (ua, ub) = (bits >> a & 1, bits >> b & 1);
            if ua == ub {
                return 0.0;
            }
            amp *= if ua == 1 {
                std::f64::consts::FRAC_1_SQRT_2
            } else {
                -std::f64::consts::FRAC_1_SQRT_2
            };
        }
        amp
    }

    /// Explicit state on the zero-magnetization sector, divided by `𝒩`
    /// (not renormalized).
    pub fn amplitudes(&self) -> Result<(Basis, Vec<f64>)> {
        let basis = Basis::sector(self.n_sites, self.n_sites / 2)?;
        let inv = 1.0 / self.norm_sq.sqrt();
        let amps = (0..basis.dimension())
            .map(|i| {
                let c = basis.config(i);
                inv * (self.dimer_amplitude(c, 0) + self.dimer_amplitude(c, 1))
            })
            .collect();
        Ok((basis, amps))
    }

    pub fn state_vector(&self) -> Result<PureState> {
        let (basis, amps) = self.amplitudes()?;
        PureState::new(basis, amps.into_iter().map(|a| Complex64::new(a, 0.0)).collect())
    }
}

/// `E_N = 1/(1 + 2^{N/2-1})²` for `N/2` even; `0` when `N/2` is odd, where
/// the two dimer coverings contribute with opposite signs.
pub fn mg_e_n(n: usize) -> Result<f64> {
    Ok(MgGroundState::new(n)?.a_n().powi(2))
}

/// `E_{N-2}`, equal to [`mg_e_n`] for every even `N`.
pub fn mg_e_n_minus_2(n: usize) -> Result<f64> {
    Ok(MgGroundState::new(n)?.a_n_minus_2().powi(2))
}

/// The printed `E_{N-2} = E_N / 4` (for `N/2` even), kept for comparison.
pub fn mg_e_n_minus_2_printed(n: usize) -> Result<f64> {
    Ok(MgGroundState::new(n)?.a_n_minus_2_printed().powi(2))
}
