//! Vector kernels with deterministic reduction order.

use crate::exec::{self, Execution};

const CHUNK: usize = 1 << 14;

pub fn dot(exec: Execution, a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let parts = exec::map_chunks(exec, a.len(), CHUNK, |r| {
        a[r.clone()].iter().zip(&b[r]).map(|(x, y)| x * y).sum::<f64>()
    });
    exec::tree_sum(parts)
}

pub fn norm(exec: Execution, a: &[f64]) -> f64 {
    dot(exec, a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(exec: Execution, alpha: f64, x: &[f64], y: &mut [f64]) {
    exec::for_each_chunk_mut(exec, y, CHUNK, |off, ys| {
        let len = ys.len();
        for (yi, xi) in ys.iter_mut().zip(&x[off..off + len]) {
            *yi += alpha * xi;
        }
    });
}

pub fn scale(exec: Execution, alpha: f64, y: &mut [f64]) {
    exec::for_each_chunk_mut(exec, y, CHUNK, |_, ys| {
        for yi in ys {
            *yi *= alpha;
        }
    });
}

/// Normalize in place and return the original norm.
pub fn normalize(exec: Execution, y: &mut [f64]) -> f64 {
    let n = norm(exec, y);
    if n > 0.0 {
        scale(exec, 1.0 / n, y);
    }
    n
}

/// `[<q_i|w>]` for every `q_i`, with one pass over `w`.
pub fn dots(exec: Execution, qs: &[&[f64]], w: &[f64]) -> Vec<f64> {
    let parts = exec::map_chunks(exec, w.len(), CHUNK, |r| {
        qs.iter()
            .map(|q| q[r.clone()].iter().zip(&w[r.clone()]).map(|(x, y)| x * y).sum::<f64>())
            .collect::<Vec<f64>>()
    });
    let mut parts = parts;
    if parts.is_empty() {
        return vec![0.0; qs.len()];
    }
    while parts.len() > 1 {
        parts = parts
            .chunks(2)
            .map(|p| match p {
                [a, b] => a.iter().zip(b).map(|(x, y)| x + y).collect(),
                [a] => a.clone(),
                _ => unreachable!(),
            })
            .collect();
    }
    parts.pop().unwrap_or_default()
}

/// `w -= Σ_i c_i q_i`
pub fn subtract_combination(exec: Execution, qs: &[&[f64]], coeffs: &[f64], w: &mut [f64]) {
    exec::for_each_chunk_mut(exec, w, CHUNK, |off, ws| {
        let len = ws.len();
        for (q, &c) in qs.iter().zip(coeffs) {
            for (wi, qi) in ws.iter_mut().zip(&q[off..off + len]) {
                *wi -= c * qi;
            }
        }
    });
}

/// Classical Gram-Schmidt of `w` against orthonormal `qs`, repeated once when
/// cancellation shrinks `w` by more than a factor `1/√2`. Returns the norm of
/// the orthogonalized `w`.
pub fn orthogonalize(exec: Execution, qs: &[&[f64]], w: &mut [f64]) -> f64 {
    let mut before = norm(exec, w);
    for _ in 0..2 {
        if qs.is_empty() {
            break;
        }
        let c = dots(exec, qs, w);
        subtract_combination(exec, qs, &c, w);
        let after = norm(exec, w);
        if after > std::f64::consts::FRAC_1_SQRT_2 * before {
            return after;
        }
        before = after;
    }
    before
}
