//! Brute-force partition enumeration shared by the hierarchy tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use spin_corr::hierarchy::BoundMode;

/// Every set partition of `0..n` as block labels, via restricted growth
/// strings.
pub fn set_partitions(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut a = vec![0usize; n];
    let mut maxes = vec![0usize; n];
    loop {
        visit(&a);
        // advance to the next restricted growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                return;
            }
            let limit = maxes[i - 1] + 1;
            if a[i] < limit {
                a[i] += 1;
                break;
            }
            i -= 1;
        }
        maxes[i] = maxes[i - 1].max(a[i]);
        for j in i + 1..n {
            a[j] = 0;
            maxes[j] = maxes[i];
        }
    }
}

pub fn block_sizes(labels: &[usize]) -> Vec<usize> {
    let mut sizes = vec![0; labels.iter().max().map_or(0, |m| m + 1)];
    for &l in labels {
        sizes[l] += 1;
    }
    sizes
}

/// Per `halvings` of the bound, the smallest depth reaching it.
pub fn brute_force(n: usize, mode: BoundMode) -> BTreeMap<usize, usize> {
    let mut best = BTreeMap::new();
    let mut offer = |halvings: usize, depth: usize| {
        let e = best.entry(halvings).or_insert(depth);
        *e = (*e).min(depth);
    };
    set_partitions(n, |labels| {
        let sizes = block_sizes(labels);
        match mode {
            BoundMode::Entanglement => {
                offer(2 * sizes.len(), *sizes.iter().max().unwrap());
            }
            BoundMode::Locality => {
                // blocks of two or more spins may be non-local
                let multi: Vec<usize> = sizes.iter().copied().filter(|&s| s >= 2).collect();
                let singles = sizes.len() - multi.len();
                for mask in 0u32..1 << multi.len() {
                    let (mut halvings, mut depth) = (singles, 1);
                    for (i, &s) in multi.iter().enumerate() {
                        if mask >> i & 1 == 1 {
                            halvings += 2;
                            depth = depth.max(s);
                        } else {
                            halvings += s;
                        }
                    }
                    offer(halvings, depth);
                }
            }
        }
    });
    best
}

/// Largest bound reachable with every block of at most `k` sites.
pub fn brute_force_bound(n: usize, k: usize, mode: BoundMode) -> f64 {
    let mut best = 0.0f64;
    set_partitions(n, |labels| {
        let sizes = block_sizes(labels);
        if sizes.iter().any(|&s| s > k) {
            return;
        }
        let v: f64 = sizes
            .iter()
            .map(|&s| match mode {
                BoundMode::Entanglement => 0.25,
                BoundMode::Locality => 0.25f64.max(0.5f64.powi(s as i32)),
            })
            .product();
        best = best.max(v);
    });
    best
}

