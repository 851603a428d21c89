//! Peak of `E_{N/2}(g)` in the long-range Ising chain and its finite-size
//! extrapolation.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::correlator::{pure_correlator_with, SignPattern};
use crate::eigensolver::{ground_state_with, LanczosConfig};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::hamiltonian::{ChainSpec, Hamiltonian};

/// Largest chain handled by [`sweep`].
pub const MAX_SWEEP_SITES: usize = 20;

/// Sampled `E_{N/2}(g)` at fixed `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepCurve {
    pub k_next: f64,
    pub n_sites: usize,
    pub order: usize,
    pub g: Vec<f64>,
    pub e: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub tol: f64,
    /// Start each solve from the previous grid point's ground state. Points
    /// are then processed in order instead of as independent parallel jobs.
    pub warm_start: bool,
    pub exec: Execution,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            warm_start: true,
            exec: Execution::default(),
        }
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::arg("empty g grid"));
    }
    if grid.iter().any(|&g| !(g > 0.0 && g <= 5.0)) {
        return Err(Error::arg("g grid must lie in (0, 5]"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::arg("g grid must be strictly ascending"));
    }
    Ok(())
}

/// `(E, ground state)` at one field value.
fn point(
    k_next: f64,
    n: usize,
    g: f64,
    cfg: &SweepConfig,
    exec: Execution,
    start: Option<Vec<f64>>,
) -> Result<(f64, Vec<f64>)> {
    let h = Hamiltonian::build(ChainSpec::ising(n, g, k_next)?, None)?;
    let mut lc = LanczosConfig::new(cfg.tol);
    lc.symmetry = h.natural_symmetry();
    lc.check_degeneracy = false;
    lc.exec = exec;
    lc.start = start;
    let gs = ground_state_with(&h, &lc).map_err(|e| match e {
        Error::Convergence { context, residual } => Error::Convergence {
            context: format!("{context} at g = {g}"),
            residual,
        },
        other => other,
    })?;
    let e = pure_correlator_with(exec, &gs, &SignPattern::alternating(n / 2)?)?.e_value;
    let v = gs.amplitudes().iter().map(|z| z.re).collect();
    Ok((e, v))
}

/// Alternating-pattern correlator of order `N/2` along `g_grid`.
pub fn sweep(k_next: f64, n: usize, g_grid: &[f64]) -> Result<SweepCurve> {
    sweep_with(k_next, n, g_grid, &SweepConfig::default())
}

pub fn sweep_with(k_next: f64, n: usize, g_grid: &[f64], cfg: &SweepConfig) -> Result<SweepCurve> {
    if !n.is_multiple_of(2) || !(4..=MAX_SWEEP_SITES).contains(&n) {
        return Err(Error::arg(format!(
            "sweeps need an even chain length in [4, {MAX_SWEEP_SITES}], got {n}"
        )));
    }
    check_grid(g_grid)?;
    let e = if cfg.warm_start {
        let mut out = Vec::with_capacity(g_grid.len());
        let mut prev = None;
        for &g in g_grid {
            let (e, v) = point(k_next, n, g, cfg, cfg.exec, prev.take())?;
            out.push(e);
            prev = Some(v);
        }
        out
    } else {
        // Grid points run as parallel jobs, each solve sequential inside.
        exec::map_jobs(cfg.exec, g_grid, |&g| {
            point(k_next, n, g, cfg, Execution::Serial, None).map(|r| r.0)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?
    };
    Ok(SweepCurve {
        k_next,
        n_sites: n,
        order: n / 2,
        g: g_grid.to_vec(),
        e,
    })
}

/// Vertex of the parabola through three points.
pub fn parabola_vertex(p0: (f64, f64), p1: (f64, f64), p2: (f64, f64)) -> f64 {
    let ((x0, y0), (x1, y1), (x2, y2)) = (p0, p1, p2);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curvature = (d12 - d01) / (x2 - x0);
    0.5 * (x0 + x1) - d01 / (2.0 * curvature)
}

fn argmax(v: &[f64]) -> usize {
    (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap_or(0)
}

/// Parabolic refinement of the discrete maximum.
pub fn find_peak(curve: &SweepCurve) -> Result<f64> {
    if curve.e.is_empty() {
        return Err(Error::arg("empty curve"));
    }
    let i = argmax(&curve.e);
    if i == 0 || i + 1 == curve.e.len() {
        return Err(Error::PeakOnBoundary { g: curve.g[i] });
    }
    let p = |j: usize| (curve.g[j], curve.e[j]);
    Ok(parabola_vertex(p(i - 1), p(i), p(i + 1)))
}

/// `points` evenly spaced values on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// Coarse grid followed by one local refinement around its maximum.
#[derive(Clone, Debug)]
pub struct PeakSearch {
    pub coarse: Vec<f64>,
    pub refine_points: usize,
    /// Half-width of the refinement window in coarse grid steps.
    pub refine_span_steps: f64,
}

impl Default for PeakSearch {
    /// 61 points on `[0.2, 2.0]`, then 21 points over ±2 coarse steps.
    fn default() -> Self {
        Self {
            coarse: linspace(0.2, 2.0, 61),
            refine_points: 21,
            refine_span_steps: 2.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PeakEstimate {
    pub n_sites: usize,
    pub g_star: f64,
    pub coarse: SweepCurve,
    pub refined: Option<SweepCurve>,
}

/// Peak position of `E_{N/2}(g)` for one chain length.
pub fn locate_peak(
    k_next: f64,
    n: usize,
    search: &PeakSearch,
    cfg: &SweepConfig,
) -> Result<PeakEstimate> {
    let coarse = sweep_with(k_next, n, &search.coarse, cfg)?;
    let g_coarse = find_peak(&coarse)?;
    if search.refine_points < 3 {
        return Ok(PeakEstimate {
            n_sites: n,
            g_star: g_coarse,
            coarse,
            refined: None,
        });
    }
    let i = argmax(&coarse.e);
    let centre = coarse.g[i];
    let step = 0.5 * (coarse.g[i + 1] - coarse.g[i - 1]);
    let half = search.refine_span_steps * step;
    let fine = linspace(
        (centre - half).max(f64::EPSILON),
        (centre + half).min(5.0),
        search.refine_points,
    );
    let refined = sweep_with(k_next, n, &fine, cfg)?;
    let g_star = find_peak(&refined)?;
    Ok(PeakEstimate {
        n_sites: n,
        g_star,
        coarse,
        refined: Some(refined),
    })
}

/// Linear fit `g*(N) = intercept + slope / N`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingFit {
    pub sizes: Vec<usize>,
    pub peak_positions: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub intercept_stderr: f64,
    /// Half-width of the two-sided 90 % t-interval on the intercept.
    pub confidence: f64,
    pub residuals: Vec<f64>,
    /// Peak positions move monotonically with N and approach the intercept.
    pub monotone: bool,
}

/// Least-squares extrapolation in `1/N`.
pub fn extrapolate(fits: &[(usize, f64)]) -> Result<ScalingFit> {
    if fits.len() < 3 {
        return Err(Error::arg(format!(
            "extrapolation needs at least 3 sizes, got {}",
            fits.len()
        )));
    }
    let mut data = fits.to_vec();
    data.sort_by_key(|p| p.0);
    if data.iter().any(|p| p.0 == 0) {
        return Err(Error::arg("chain length 0"));
    }
    let x: Vec<f64> = data.iter().map(|p| 1.0 / p.0 as f64).collect();
    let y: Vec<f64> = data.iter().map(|p| p.1).collect();
    let n = x.len() as f64;
    let xm = x.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|xi| (xi - xm).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::arg("all sizes are equal; the fit is degenerate"));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(xi, yi)| (xi - xm) * (yi - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let residuals: Vec<f64> = x
        .iter()
        .zip(&y)
        .map(|(xi, yi)| yi - (intercept + slope * xi))
        .collect();
    let dof = n - 2.0;
    let s2 = residuals.iter().map(|r| r * r).sum::<f64>() / dof;
    let sum_x2: f64 = x.iter().map(|xi| xi * xi).sum();
    let intercept_stderr = (s2 * sum_x2 / (n * sxx)).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| Error::arg(e.to_string()))?
        .inverse_cdf(0.95);

    let steps: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let one_direction = steps.iter().all(|&d| d <= 0.0) || steps.iter().all(|&d| d >= 0.0);
    let approaching = y
        .windows(2)
        .all(|w| (w[1] - intercept).abs() <= (w[0] - intercept).abs());

    Ok(ScalingFit {
        sizes: data.iter().map(|p| p.0).collect(),
        peak_positions: y,
        slope,
        intercept,
        intercept_stderr,
        confidence: t * intercept_stderr,
        residuals,
        monotone: one_direction && approaching,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_triple_peaks_in_the_middle() {
        assert_eq!(parabola_vertex((0.9, 1.0), (1.0, 1.5), (1.1, 1.0)), 1.0);
    }

    #[test]
    fn exact_parabola_vertex() {
        let f = |x: f64| -3.0 * (x - 0.734).powi(2) + 2.0;
        let v = parabola_vertex((0.5, f(0.5)), (0.7, f(0.7)), (1.0, f(1.0)));
        assert!((v - 0.734).abs() < 1e-12);
    }

    #[test]
    fn boundary_maximum_is_an_error() {
        let curve = SweepCurve {
            k_next: 0.0,
            n_sites: 8,
            order: 4,
            g: vec![0.1, 0.2, 0.3],
            e: vec![3.0, 2.0, 1.0],
        };
        assert!(matches!(find_peak(&curve), Err(Error::PeakOnBoundary { g }) if g == 0.1));
    }

    #[test]
    fn extrapolation_recovers_exact_line() {
        for k in [0.0, 0.1, 0.2, 0.3] {
            let gc = 1.0 - 2.0 * k;
            let data: Vec<_> = [8, 12, 16, 20].iter().map(|&n| (n, gc + 0.7 / n as f64)).collect();
            let fit = extrapolate(&data).unwrap();
            assert!((fit.intercept - gc).abs() < 1e-12);
            assert!((fit.slope - 0.7).abs() < 1e-12);
            assert!(fit.confidence < 1e-12);
            assert!(fit.monotone);
        }
    }

    #[test]
    fn confidence_band_uses_t_quantile() {
        let data = [(8, 1.10), (12, 1.02), (16, 1.01), (20, 0.995)];
        let fit = extrapolate(&data).unwrap();
        // two-sided 90 % quantile with 2 degrees of freedom
        assert!((fit.confidence / fit.intercept_stderr - 2.919_985_580_4).abs() < 1e-8);
    }

    #[test]
    fn extrapolation_rejects_bad_input() {
        assert!(extrapolate(&[(8, 1.0), (12, 1.0)]).is_err());
        assert!(extrapolate(&[(8, 1.0), (8, 1.1), (8, 0.9)]).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(sweep(0.0, 8, &[0.5, 0.4]).is_err());
        assert!(sweep(0.0, 8, &[0.0, 0.4]).is_err());
        assert!(sweep(0.0, 7, &[0.5]).is_err());
        assert!(sweep(0.0, 22, &[0.5]).is_err());
    }

    #[test]
    fn small_chain_curve_peaks_near_one() {
        let curve = sweep(0.0, 8, &linspace(0.2, 2.0, 19)).unwrap();
        assert!(curve.e.iter().all(|&e| (0.0..=0.25).contains(&e)));
        let g = find_peak(&curve).unwrap();
        assert!((g - 1.0).abs() < 0.15, "{g}");
    }

    #[test]
    fn warm_and_cold_sweeps_agree() {
        let grid = linspace(0.6, 1.4, 5);
        let warm = sweep_with(0.2, 10, &grid, &SweepConfig::default()).unwrap();
        let cold = sweep_with(
            0.2,
            10,
            &grid,
            &SweepConfig {
                warm_start: false,
                ..SweepConfig::default()
            },
        )
        .unwrap();
        for (a, b) in warm.e.iter().zip(&cold.e) {
            assert!((a - b).abs() < 1e-9 * a.max(1e-6));
        }
    }
}
