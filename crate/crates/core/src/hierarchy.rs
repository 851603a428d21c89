//! Entanglement and Bell non-locality depth from a measured `E_N`.
//!
//! A block of spins that is internally entangled (or non-locally correlated)
//! contributes at most `1/4` to `E_N`. An unentangled spin contributes `1/4`
//! as well, while a group of `s` spins described by a local hidden-variable
//! model contributes `2^{-s}`. Bounds for a partition are products over its
//! blocks.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Threshold comparisons use this absolute slack.
pub const TOLERANCE: f64 = 1e-12;

/// Largest chain for which the full partition ladder is enumerated.
pub const LADDER_MAX_SITES: usize = 10;

/// Bounds are computed up to this many sites.
pub const MAX_SITES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockKind {
    /// Entangled or non-locally correlated block.
    Quantum,
    /// Product (entanglement mode) or local hidden-variable (locality mode).
    Classical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundMode {
    Entanglement,
    Locality,
}

/// Partition of sites `1..=N` into labelled blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    kinds: Vec<BlockKind>,
}

impl Partition {
    pub fn new(blocks: Vec<Vec<usize>>, kinds: Vec<BlockKind>) -> Result<Self> {
        if blocks.len() != kinds.len() {
            return Err(Error::arg("one kind per block is required"));
        }
        let n: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; n + 1];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::arg("partition blocks must be non-empty"));
            }
            for &s in b {
                if s == 0 || s > n || std::mem::replace(&mut seen[s], true) {
                    return Err(Error::arg(format!(
                        "blocks must cover sites 1..={n} exactly once (site {s})"
                    )));
                }
            }
        }
        Ok(Self { blocks, kinds })
    }

    /// Every block quantum.
    pub fn quantum(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let kinds = vec![BlockKind::Quantum; blocks.len()];
        Self::new(blocks, kinds)
    }

    pub fn n_sites(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn kinds(&self) -> &[BlockKind] {
        &self.kinds
    }
}

fn check_range(n: usize, k: usize) -> Result<()> {
    if n == 0 || n > MAX_SITES || k == 0 || k > n {
        return Err(Error::arg(format!(
            "need 1 ≤ k ≤ n ≤ {MAX_SITES}, got n = {n}, k = {k}"
        )));
    }
    Ok(())
}

/// Largest `E_N` for states whose entangled blocks have at most `k` spins:
/// `4^{-ceil(n/k)}`.
pub fn entanglement_bound(n: usize, k: usize) -> Result<f64> {
    check_range(n, k)?;
    Ok(0.25f64.powi(n.div_ceil(k) as i32))
}

/// Largest `E_N` for models whose non-local blocks have at most `k` spins.
pub fn nonlocality_bound(n: usize, k: usize) -> Result<f64> {
    check_range(n, k)?;
    let halvings = if k == 1 {
        n
    } else {
        2 * (n / k) + (n % k).min(2)
    };
    Ok(0.5f64.powi(halvings as i32))
}

/// Product of per-block bounds.
pub fn partition_bound(p: &Partition, mode: BoundMode) -> Result<f64> {
    let mut bound = 1.0;
    for (b, kind) in p.blocks.iter().zip(&p.kinds) {
        bound *= match (mode, kind) {
            (_, BlockKind::Quantum) => 0.25,
            (BoundMode::Entanglement, BlockKind::Classical) if b.len() == 1 => 0.25,
            (BoundMode::Entanglement, BlockKind::Classical) => {
                return Err(Error::arg(
                    "in entanglement mode classical blocks are single spins",
                ))
            }
            (BoundMode::Locality, BlockKind::Classical) => 0.5f64.powi(b.len() as i32),
        };
    }
    Ok(bound)
}

/// Distinct partition-bound value with the smallest depth that reaches it.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderRung {
    pub bound: f64,
    pub depth: usize,
    /// Block sizes of one partition attaining `bound` at `depth`, largest
    /// first; classical sites are listed as `1`s after the quantum blocks.
    pub shape: Vec<usize>,
    pub classical_sites: usize,
}

impl LadderRung {
    /// `2x2x1x1` style label.
    pub fn label(&self) -> String {
        self.shape
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join("x")
    }
}

/// Integer partitions of `n` with parts in `[min_part, max_part]`, each in
/// non-increasing order.
fn integer_partitions(n: usize, min_part: usize, max_part: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, min: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (min..=max.min(rest)).rev() {
            cur.push(part);
            rec(rest - part, min, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if min_part >= 1 {
        rec(n, min_part, max_part, &mut Vec::new(), &mut out);
    }
    out
}

/// Every distinct bound over all partition shapes of `n` sites, ascending.
///
/// Entanglement mode: quantum blocks plus unentangled single spins.
/// Locality mode: quantum blocks of two or more spins plus a local remainder
/// (how the local sites are grouped does not change the bound).
pub fn partition_ladder(n: usize, mode: BoundMode) -> Result<Vec<LadderRung>> {
    if n == 0 || n > LADDER_MAX_SITES {
        return Err(Error::Capacity {
            what: "partition ladder size",
            size: n,
            limit: LADDER_MAX_SITES,
        });
    }
    // keyed by the exponent of 1/2 so values compare exactly
    let mut best: BTreeMap<usize, LadderRung> = BTreeMap::new();
    let mut offer = |halvings: usize, rung: LadderRung| {
        let keep = best.get(&halvings).is_none_or(|r| {
            (rung.depth, &rung.shape) < (r.depth, &r.shape)
        });
        if keep {
            best.insert(halvings, rung);
        }
    };
    match mode {
        BoundMode::Entanglement => {
            for shape in integer_partitions(n, 1, n) {
                let rung = LadderRung {
                    bound: 0.25f64.powi(shape.len() as i32),
                    depth: shape[0],
                    classical_sites: 0,
                    shape,
                };
                offer(2 * rung.shape.len(), rung);
            }
        }
        BoundMode::Locality => {
            for classical in 0..=n {
                for quantum in integer_partitions(n - classical, 2, n) {
                    let halvings = 2 * quantum.len() + classical;
                    let mut shape = quantum.clone();
                    shape.extend(std::iter::repeat_n(1, classical));
                    let rung = LadderRung {
                        bound: 0.5f64.powi(halvings as i32),
                        depth: quantum.first().copied().unwrap_or(1),
                        classical_sites: classical,
                        shape,
                    };
                    offer(halvings, rung);
                }
            }
        }
    }
    Ok(best.into_values().rev().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Depth {
    Sites(usize),
    /// Above the density-matrix bound `1/4`; no quantum state reaches it.
    Unexplainable,
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Sites(k) => write!(f, "{k}"),
            Depth::Unexplainable => f.write_str("unexplainable"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DepthCertificate {
    pub e_value: f64,
    pub n_sites: usize,
    pub ent_depth: Depth,
    pub nl_depth: Depth,
    /// `(k, entanglement_bound(n, k))` for `k = 1..=n`.
    pub ent_ladder: Vec<(usize, f64)>,
    pub nl_ladder: Vec<(usize, f64)>,
    /// Partition-level rungs, present for `n ≤ LADDER_MAX_SITES`.
    pub ent_rungs: Vec<LadderRung>,
    pub nl_rungs: Vec<LadderRung>,
}

fn depth_from(ladder: &[(usize, f64)], e: f64) -> Depth {
    ladder
        .iter()
        .find(|(_, b)| e <= b + TOLERANCE)
        .map_or(Depth::Unexplainable, |(k, _)| Depth::Sites(*k))
}

/// Minimal depths able to explain `e_value` on `n` sites. Thresholds are
/// inclusive: a value equal to a bound is explainable at that depth.
pub fn certify(e_value: f64, n: usize) -> Result<DepthCertificate> {
    if !e_value.is_finite() || e_value < 0.0 {
        return Err(Error::arg(format!("E must be a finite value ≥ 0, got {e_value}")));
    }
    check_range(n, 1)?;
    let ent_ladder = (1..=n)
        .map(|k| entanglement_bound(n, k).map(|b| (k, b)))
        .collect::<Result<Vec<_>>>()?;
    let nl_ladder = (1..=n)
        .map(|k| nonlocality_bound(n, k).map(|b| (k, b)))
        .collect::<Result<Vec<_>>>()?;
    let (ent_depth, nl_depth) = if e_value > 0.25 + TOLERANCE {
        (Depth::Unexplainable, Depth::Unexplainable)
    } else {
        (depth_from(&ent_ladder, e_value), depth_from(&nl_ladder, e_value))
    };
    let (ent_rungs, nl_rungs) = if n <= LADDER_MAX_SITES {
        (
            partition_ladder(n, BoundMode::Entanglement)?,
            partition_ladder(n, BoundMode::Locality)?,
        )
    } else {
        (Vec::new(), Vec::new())
    };
    Ok(DepthCertificate {
        e_value,
        n_sites: n,
        ent_depth,
        nl_depth,
        ent_ladder,
        nl_ladder,
        ent_rungs,
        nl_rungs,
    })
}
