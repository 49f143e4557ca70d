//! Brute-force enumeration of constrained mappings on `[n]` for small `n`.
//!
//! Every function (or partial function) is visited as a digit vector and
//! the statistics are tallied directly from its graph, without any
//! generating-function reasoning.

use num_bigint::BigUint;
use rayon::prelude::*;
use thiserror::Error;

use crate::constraint::PreimageConstraint;

pub const MAX_ORACLE_SIZE: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("brute force is capped at n = {MAX_ORACLE_SIZE}, got n = {0}")]
    CapExceeded(usize),
}

/// Totals over all constrained mappings on `[n]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSummary {
    pub n: usize,
    pub constraint: PreimageConstraint,
    pub function_count: BigUint,
    pub partial_function_count: BigUint,
    pub tree_count: BigUint,
    pub connected_count: BigUint,
    pub total_cyclic_points: BigUint,
    pub total_components: BigUint,
    /// Index `k` holds the sum of `n - |f^k([n])|` over functions, `k = 0..=k_max`.
    pub total_image_deficiency: Vec<BigUint>,
    /// The same sums over partial functions.
    pub total_partial_image_deficiency: Vec<BigUint>,
}

impl OracleSummary {
    pub fn to_json(&self) -> serde_json::Value {
        let list = |v: &[BigUint]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        serde_json::json!({
            "n": self.n,
            "constraint": self.constraint.to_string(),
            "function_count": self.function_count.to_string(),
            "partial_function_count": self.partial_function_count.to_string(),
            "tree_count": self.tree_count.to_string(),
            "connected_count": self.connected_count.to_string(),
            "total_cyclic_points": self.total_cyclic_points.to_string(),
            "total_components": self.total_components.to_string(),
            "total_image_deficiency": list(&self.total_image_deficiency),
            "total_partial_image_deficiency": list(&self.total_partial_image_deficiency),
        })
    }
}

#[derive(Debug, Clone, Default)]
struct Tally {
    functions: u64,
    connected: u64,
    cyclic: u64,
    components: u64,
    deficiency: Vec<u64>,
}

impl Tally {
    fn new(k_max: usize) -> Self {
        Self {
            deficiency: vec![0; k_max + 1],
            ..Default::default()
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.functions += other.functions;
        self.connected += other.connected;
        self.cyclic += other.cyclic;
        self.components += other.components;
        for (a, b) in self.deficiency.iter_mut().zip(other.deficiency) {
            *a += b;
        }
        self
    }
}

/// Runs `visit` on every digit vector of length `n` over `0..base` whose first
/// digit is `lead`, by odometer increment.
fn for_each_with_lead(n: usize, base: usize, lead: usize, mut visit: impl FnMut(&[usize])) {
    let mut digits = vec![0usize; n];
    digits[0] = lead;
    loop {
        visit(&digits);
        let mut pos = n;
        loop {
            if pos == 1 {
                return;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < base {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Runs `visit` over all digit vectors in parallel over the leading digit
/// and merges the per-thread tallies.
fn fold_mappings<F>(n: usize, base: usize, k_max: usize, visit: F) -> Tally
where
    F: Fn(&[usize], &mut Tally) + Sync,
{
    if n == 0 {
        let mut tally = Tally::new(k_max);
        visit(&[], &mut tally);
        return tally;
    }
    (0..base)
        .into_par_iter()
        .map(|lead| {
            let mut tally = Tally::new(k_max);
            for_each_with_lead(n, base, lead, |digits| visit(digits, &mut tally));
            tally
        })
        .reduce(|| Tally::new(k_max), Tally::merge)
}

/// Every `x ∈ [n]` has a preimage count in `P`; digits equal to `n` mean
/// "undefined" and contribute no preimage.
fn satisfies(constraint: &PreimageConstraint, digits: &[usize]) -> bool {
    let n = digits.len();
    let mut counts = [0u32; MAX_ORACLE_SIZE + 1];
    for &d in digits {
        counts[d] += 1;
    }
    counts[..n].iter().all(|&c| constraint.contains(c))
}

/// Image of a point set under the (partial) mapping.
fn image(digits: &[usize], set: u32) -> u32 {
    let n = digits.len();
    let mut out = 0u32;
    for (x, &y) in digits.iter().enumerate() {
        if set & (1 << x) != 0 && y < n {
            out |= 1 << y;
        }
    }
    out
}

fn add_deficiencies(digits: &[usize], tally: &mut Tally) {
    let n = digits.len();
    let mut set: u32 = if n == 0 { 0 } else { (1u32 << n) - 1 };
    for (k, slot) in tally.deficiency.iter_mut().enumerate() {
        if k > 0 {
            set = image(digits, set);
        }
        *slot += (n - set.count_ones() as usize) as u64;
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn components(digits: &[usize]) -> u64 {
    let n = digits.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut count = n as u64;
    for (x, &y) in digits.iter().enumerate() {
        let (a, b) = (find(&mut parent, x), find(&mut parent, y));
        if a != b {
            parent[a] = b;
            count -= 1;
        }
    }
    count
}

/// Brute-force totals for every constrained function and partial function
/// on `[n]`, with image deficiencies for `k = 0..=k_max`.
pub fn enumerate(constraint: &PreimageConstraint, n: usize, k_max: usize) -> Result<OracleSummary, OracleError> {
    if n > MAX_ORACLE_SIZE {
        return Err(OracleError::CapExceeded(n));
    }
    let functions = fold_mappings(n, n, k_max, |digits, tally| {
        if !satisfies(constraint, digits) {
            return;
        }
        tally.functions += 1;
        let mut cyclic = if n == 0 { 0 } else { (1u32 << n) - 1 };
        for _ in 0..n {
            cyclic = image(digits, cyclic);
        }
        tally.cyclic += cyclic.count_ones() as u64;
        let comps = components(digits);
        tally.components += comps;
        if comps == 1 {
            tally.connected += 1;
        }
        add_deficiencies(digits, tally);
    });
    let partial = fold_mappings(n, n + 1, k_max, |digits, tally| {
        if !satisfies(constraint, digits) {
            return;
        }
        tally.functions += 1;
        add_deficiencies(digits, tally);
    });
    let big = |v: &[u64]| v.iter().map(|&x| BigUint::from(x)).collect();
    Ok(OracleSummary {
        n,
        constraint: constraint.clone(),
        function_count: functions.functions.into(),
        partial_function_count: partial.functions.into(),
        tree_count: enumerate_trees(constraint, n)?,
        connected_count: functions.connected.into(),
        total_cyclic_points: functions.cyclic.into(),
        total_components: functions.components.into(),
        total_image_deficiency: big(&functions.deficiency),
        total_partial_image_deficiency: big(&partial.deficiency),
    })
}

/// Labeled rooted trees on `[n]` whose every vertex has a child count in `P`.
///
/// A tree is a parent map with the root sent to itself in which the root is
/// the only point surviving `n` iterations; the root's self-loop is not a child.
pub fn enumerate_trees(constraint: &PreimageConstraint, n: usize) -> Result<BigUint, OracleError> {
    if n > MAX_ORACLE_SIZE {
        return Err(OracleError::CapExceeded(n));
    }
    if n == 0 {
        return Ok(BigUint::from(0u32));
    }
    let total: u64 = (0..n)
        .into_par_iter()
        .map(|root| {
            let mut found = 0u64;
            let mut digits = vec![0usize; n];
            digits[root] = root;
            loop {
                if is_tree(constraint, &digits, root) {
                    found += 1;
                }
                // Odometer over all positions, the root's digit pinned.
                let mut pos = n;
                loop {
                    if pos == 0 {
                        return found;
                    }
                    pos -= 1;
                    if pos == root {
                        continue;
                    }
                    digits[pos] += 1;
                    if digits[pos] < n {
                        break;
                    }
                    digits[pos] = 0;
                }
            }
        })
        .sum();
    Ok(total.into())
}

fn is_tree(constraint: &PreimageConstraint, parent: &[usize], root: usize) -> bool {
    let n = parent.len();
    let mut set = (1u32 << n) - 1;
    for _ in 0..n {
        set = image(parent, set);
    }
    if set != 1 << root {
        return false;
    }
    let mut children = [0u32; MAX_ORACLE_SIZE];
    for (x, &p) in parent.iter().enumerate() {
        if x != root {
            children[p] += 1;
        }
    }
    children[..n].iter().all(|&c| constraint.contains(c))
}
