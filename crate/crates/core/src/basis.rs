//! Product-state bitmasks and magnetization-sector index maps.
//!
//! Bit `j` of a configuration is set when the spin on site `j + 1` points up.
//! Sites are 0-based internally and 1-based in every user-facing API that
//! takes a site label (`flip_range`, `is_up`, correlator windows).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub const MAX_SITES: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisConfig {
    bits: u32,
    n_sites: u8,
}

/// Which sublattice carries the up spins of a Néel configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NeelKind {
    /// ↑ on sites 1, 3, 5, …
    OddUp,
    /// ↑ on sites 2, 4, 6, …
    EvenUp,
}

fn check_sites(n_sites: usize) -> Result<()> {
    if !(2..=MAX_SITES).contains(&n_sites) {
        return Err(Error::arg(format!(
            "number of sites must lie in [2, {MAX_SITES}], got {n_sites}"
        )));
    }
    Ok(())
}

pub(crate) fn site_mask(n_sites: usize) -> u32 {
    if n_sites >= 32 {
        u32::MAX
    } else {
        (1u32 << n_sites) - 1
    }
}

impl BasisConfig {
    pub fn new(bits: u32, n_sites: usize) -> Result<Self> {
        check_sites(n_sites)?;
        if bits & !site_mask(n_sites) != 0 {
            return Err(Error::arg(format!(
                "bitmask {bits:#b} has bits beyond site {n_sites}"
            )));
        }
        Ok(Self {
            bits,
            n_sites: n_sites as u8,
        })
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn n_sites(self) -> usize {
        self.n_sites as usize
    }

    pub fn count_up(self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Spin orientation on a 1-based site.
    pub fn is_up(self, site: usize) -> bool {
        debug_assert!((1..=self.n_sites()).contains(&site));
        self.bits >> (site - 1) & 1 == 1
    }

    /// Néel configuration of an even-length chain.
    pub fn pattern(kind: NeelKind, n_sites: usize) -> Result<Self> {
        check_sites(n_sites)?;
        if !n_sites.is_multiple_of(2) {
            return Err(Error::arg(format!(
                "Néel pattern needs an even number of sites, got {n_sites}"
            )));
        }
        // 0b…0101 has bit 0 (site 1) set.
        let odd_up = 0x5555_5555 & site_mask(n_sites);
        let bits = match kind {
            NeelKind::OddUp => odd_up,
            NeelKind::EvenUp => !odd_up & site_mask(n_sites),
        };
        Self::new(bits, n_sites)
    }

    /// Invert the spins on 1-based sites `first..=last`.
    pub fn flip_range(self, first: usize, last: usize) -> Result<Self> {
        if first < 1 || first > last || last > self.n_sites() {
            return Err(Error::arg(format!(
                "flip range {first}..={last} outside 1..={}",
                self.n_sites
            )));
        }
        let width = last - first + 1;
        let mask = site_mask(width) << (first - 1);
        Ok(Self {
            bits: self.bits ^ mask,
            n_sites: self.n_sites,
        })
    }
}

/// Prints site N first, so the string reads like the binary literal of `bits`.
impl fmt::Display for BasisConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for site in (1..=self.n_sites()).rev() {
            f.write_str(if self.is_up(site) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// All configurations with a fixed number of up spins, in ascending integer
/// order. Positions are recovered by combinatorial ranking, so no
/// `2^N`-sized lookup table is needed.
#[derive(Clone, Debug)]
pub struct SectorIndex {
    n_sites: usize,
    n_up: usize,
    configs: Vec<u32>,
    // binom[n][k] for n ≤ N, k ≤ n_up
    binom: Vec<Vec<u64>>,
}

impl SectorIndex {
    pub fn enumerate(n_sites: usize, n_up: usize) -> Result<Self> {
        check_sites(n_sites)?;
        if n_up > n_sites {
            return Err(Error::arg(format!(
                "n_up = {n_up} exceeds the number of sites {n_sites}"
            )));
        }
        let size = binomial(n_sites, n_up) as usize;
        let mut configs = Vec::with_capacity(size);
        if n_up == 0 {
            configs.push(0);
        } else {
            // Gosper's hack: next integer with the same popcount.
            let mut c: u64 = (1u64 << n_up) - 1;
            let limit = 1u64 << n_sites;
            while c < limit {
                configs.push(c as u32);
                let lowest = c & c.wrapping_neg();
                let ripple = c + lowest;
                c = (((c ^ ripple) >> 2) / lowest) | ripple;
            }
        }
        debug_assert_eq!(configs.len(), size);
        let binom = (0..=n_sites)
            .map(|n| (0..=n_up).map(|k| binomial(n, k)).collect())
            .collect();
        Ok(Self {
            n_sites,
            n_up,
            configs,
            binom,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn configs(&self) -> &[u32] {
        &self.configs
    }

    pub fn config(&self, index: usize) -> u32 {
        self.configs[index]
    }

    /// Position of `bits` in the sector, or `None` if it has the wrong
    /// popcount or extends past the chain.
    pub fn index_of(&self, bits: u32) -> Option<usize> {
        if bits & !site_mask(self.n_sites) != 0 || bits.count_ones() as usize != self.n_up {
            return None;
        }
        let mut rank = 0u64;
        let mut rest = bits;
        let mut i = 0;
        while rest != 0 {
            let p = rest.trailing_zeros() as usize;
            rank += self.binom[p][i + 1];
            rest &= rest - 1;
            i += 1;
        }
        Some(rank as usize)
    }
}

/// Vector space a state or operator lives on.
#[derive(Clone, Debug)]
pub enum Basis {
    /// All `2^N` configurations; index = bitmask.
    Full { n_sites: usize },
    /// Fixed-magnetization sector.
    Sector(Arc<SectorIndex>),
}

impl Basis {
    pub fn full(n_sites: usize) -> Result<Self> {
        check_sites(n_sites)?;
        Ok(Basis::Full { n_sites })
    }

    pub fn sector(n_sites: usize, n_up: usize) -> Result<Self> {
        Ok(Basis::Sector(Arc::new(SectorIndex::enumerate(n_sites, n_up)?)))
    }

    pub fn n_sites(&self) -> usize {
        match self {
            Basis::Full { n_sites } => *n_sites,
            Basis::Sector(s) => s.n_sites(),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Basis::Full { n_sites } => 1usize << n_sites,
            Basis::Sector(s) => s.len(),
        }
    }

    /// Up-spin count shared by every basis state, if fixed.
    pub fn n_up(&self) -> Option<usize> {
        match self {
            Basis::Full { .. } => None,
            Basis::Sector(s) => Some(s.n_up()),
        }
    }

    #[inline]
    pub fn config(&self, index: usize) -> u32 {
        match self {
            Basis::Full { .. } => index as u32,
            Basis::Sector(s) => s.config(index),
        }
    }

    #[inline]
    pub fn index_of(&self, bits: u32) -> Option<usize> {
        match self {
            Basis::Full { n_sites } => {
                (bits & !site_mask(*n_sites) == 0).then_some(bits as usize)
            }
            Basis::Sector(s) => s.index_of(bits),
        }
    }

    /// Configuration translated by one site (site j → j + 1, periodic).
    #[inline]
    pub fn translate(&self, bits: u32) -> u32 {
        let n = self.n_sites();
        ((bits << 1) | (bits >> (n - 1))) & site_mask(n)
    }

    /// Configuration with every spin inverted.
    #[inline]
    pub fn spin_flip(&self, bits: u32) -> u32 {
        !bits & site_mask(self.n_sites())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_site_single_up_sector() {
        let s = SectorIndex::enumerate(2, 1).unwrap();
        assert_eq!(s.configs(), &[0b01, 0b10]);
    }

    #[test]
    fn four_site_half_filling_order() {
        let s = SectorIndex::enumerate(4, 2).unwrap();
        assert_eq!(s.len(), 6);
        assert_eq!(s.configs().first(), Some(&0b0011));
        assert_eq!(s.configs().last(), Some(&0b1100));
        assert!(s.configs().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn twenty_site_half_filling_size() {
        let s = SectorIndex::enumerate(20, 10).unwrap();
        assert_eq!(s.len(), 184_756);
        assert_eq!(binomial(20, 10), 184_756);
    }

    #[test]
    fn sector_sizes_sum_to_full_space() {
        for n in 2..=12 {
            let total: usize = (0..=n)
                .map(|k| SectorIndex::enumerate(n, k).unwrap().len())
                .sum();
            assert_eq!(total, 1 << n);
        }
    }

    #[test]
    fn out_of_range_arguments_are_rejected() {
        assert!(SectorIndex::enumerate(25, 3).is_err());
        assert!(SectorIndex::enumerate(1, 0).is_err());
        assert!(SectorIndex::enumerate(4, 5).is_err());
        assert!(BasisConfig::new(0b10000, 4).is_err());
    }

    #[test]
    fn neel_patterns() {
        let odd4 = BasisConfig::pattern(NeelKind::OddUp, 4).unwrap();
        assert_eq!(odd4.bits(), 0b0101);
        assert!(odd4.is_up(1) && !odd4.is_up(2) && odd4.is_up(3) && !odd4.is_up(4));
        assert_eq!(BasisConfig::pattern(NeelKind::EvenUp, 4).unwrap().bits(), 0b1010);
        assert_eq!(BasisConfig::pattern(NeelKind::OddUp, 6).unwrap().bits(), 0b010101);
        assert_eq!(odd4.to_string(), "0101");
        assert!(BasisConfig::pattern(NeelKind::OddUp, 5).is_err());
    }

    #[test]
    fn flip_range_examples() {
        let c = BasisConfig::new(0b0101, 4).unwrap();
        assert_eq!(c.flip_range(1, 4).unwrap().bits(), 0b1010);
        let z = BasisConfig::new(0, 4).unwrap();
        assert_eq!(z.flip_range(1, 1).unwrap().bits(), 0b0001);
        let ones = BasisConfig::new(0b111111, 6).unwrap();
        assert_eq!(ones.flip_range(3, 4).unwrap().bits(), 0b110011);
        assert!(c.flip_range(0, 2).is_err());
        assert!(c.flip_range(3, 2).is_err());
        assert!(c.flip_range(2, 5).is_err());
    }

    #[test]
    fn translation_cycles_back() {
        let b = Basis::full(6).unwrap();
        let mut c = 0b000011;
        c = b.translate(c);
        assert_eq!(c, 0b000110);
        let mut d = 0b100001;
        for _ in 0..6 {
            d = b.translate(d);
        }
        assert_eq!(d, 0b100001);
        assert_eq!(b.translate(0b100000), 0b000001);
    }

    proptest! {
        #[test]
        fn rank_round_trips(n in 2usize..=14, frac in 0.0f64..=1.0) {
            let k = ((n as f64) * frac).round() as usize;
            let s = SectorIndex::enumerate(n, k).unwrap();
            for (i, &c) in s.configs().iter().enumerate() {
                prop_assert_eq!(s.index_of(c), Some(i));
            }
        }

        #[test]
        fn flip_range_is_an_involution(bits in 0u32..(1 << 10), a in 1usize..=10, b in 1usize..=10) {
            let (first, last) = (a.min(b), a.max(b));
            let c = BasisConfig::new(bits, 10).unwrap();
            prop_assert_eq!(c.flip_range(first, last).unwrap().flip_range(first, last).unwrap(), c);
        }
    }
}
