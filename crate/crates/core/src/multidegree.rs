//! Multidegrees on dual graphs: uniformity, residuals, the Clifford bound for
//! uniform multidegrees, Dhar subgraphs, stable multidegrees and enumeration.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{leaf_count, BridgeForest, DualGraph};

/// Largest graph accepted by the subset brute force in
/// [`is_stable_multidegree`].
pub const STABILITY_VERTEX_CAP: usize = 16;

/// Integer degrees indexed by vertex index. Entries may be negative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Multidegree(Vec<i64>);

impl Multidegree {
    pub fn new(values: Vec<i64>) -> Self {
        Multidegree(values)
    }

    pub fn zero(len: usize) -> Self {
        Multidegree(vec![0; len])
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn into_values(self) -> Vec<i64> {
        self.0
    }

    pub(crate) fn values_mut(&mut self) -> &mut [i64] {
        &mut self.0
    }

    pub(crate) fn check_len(&self, g: &DualGraph) -> Result<()> {
        if self.len() == g.vertex_count() {
            Ok(())
        } else {
            Err(Error::DegreeLength {
                expected: g.vertex_count(),
                found: self.len(),
            })
        }
    }
}

impl std::ops::Index<usize> for Multidegree {
    type Output = i64;

    fn index(&self, v: usize) -> &i64 {
        &self.0[v]
    }
}

impl fmt::Display for Multidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

fn assert_on(g: &DualGraph, d: &Multidegree) {
    assert_eq!(
        d.len(),
        g.vertex_count(),
        "multidegree length does not match the graph"
    );
}

/// `0 <= d_v <= 2g_v - 2 + val(v)` at every vertex.
pub fn is_uniform(g: &DualGraph, d: &Multidegree) -> bool {
    assert_on(g, d);
    (0..g.vertex_count()).all(|v| 0 <= d[v] && d[v] <= g.canonical_degree(v))
}

/// The multidegree of the dualizing sheaf minus `d`.
pub fn residual(g: &DualGraph, d: &Multidegree) -> Multidegree {
    assert_on(g, d);
    Multidegree(
        (0..g.vertex_count())
            .map(|v| g.canonical_degree(v) - d[v])
            .collect(),
    )
}

/// `total(d)/2 + #l(G^Br)/2`.
pub fn clifford_bound(g: &DualGraph, d: &Multidegree) -> BigRational {
    assert_on(g, d);
    let leaves = leaf_count(&BridgeForest::new(g)) as i64;
    BigRational::new(BigInt::from(d.total() + leaves), BigInt::from(2))
}

/// `total(d)/2 + 1`.
pub fn classic_clifford_bound(d: &Multidegree) -> BigRational {
    BigRational::new(BigInt::from(d.total() + 2), BigInt::from(2))
}

/// The Dhar subgraph `Dh(v, d)` as ascending vertex indices.
pub fn dhar(g: &DualGraph, d: &Multidegree, v: usize) -> Vec<usize> {
    dhar_from(g, d, &[v])
}

/// Runs the Dhar iteration starting from an arbitrary vertex set instead of
/// a single vertex.
pub fn dhar_from(g: &DualGraph, d: &Multidegree, start: &[usize]) -> Vec<usize> {
    dhar_chain_from(g, d, start)
        .pop()
        .expect("chain has at least one stage")
}

/// The full chain `H_0 = {v} ⊂ H_1 ⊂ ... ⊂ H_n`, ending at the fixed point.
pub fn dhar_chain(g: &DualGraph, d: &Multidegree, v: usize) -> Vec<Vec<usize>> {
    dhar_chain_from(g, d, &[v])
}

fn dhar_chain_from(g: &DualGraph, d: &Multidegree, start: &[usize]) -> Vec<Vec<usize>> {
    assert_on(g, d);
    let n = g.vertex_count();
    let mut inside = vec![false; n];
    for &v in start {
        inside[v] = true;
    }
    let collect = |inside: &[bool]| (0..n).filter(|&v| inside[v]).collect::<Vec<_>>();
    let mut chain = vec![collect(&inside)];
    loop {
        // Degree left at each outside vertex after paying one per edge into H.
        let mut reduced: Vec<i64> = d.values().to_vec();
        for e in g.edges() {
            let [a, b] = e.ends;
            if inside[a] && !inside[b] {
                reduced[b] -= 1;
            } else if inside[b] && !inside[a] {
                reduced[a] -= 1;
            }
        }
        let burning: Vec<usize> = (0..n).filter(|&w| !inside[w] && reduced[w] < 0).collect();
        if burning.is_empty() {
            return chain;
        }
        for w in burning {
            inside[w] = true;
        }
        chain.push(collect(&inside));
    }
}

/// Genus of the subgraph induced by the vertices in `mask`, summing
/// `1 - |V_i| + |E_i| + Σ g_v` over its components.
fn subset_genus(g: &DualGraph, mask: u32) -> i64 {
    let n = g.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let inside = |v: usize| mask & (1 << v) != 0;
    let mut vertices = 0i64;
    let mut weights = 0i64;
    for v in (0..n).filter(|&v| inside(v)) {
        vertices += 1;
        weights += g.weight(v) as i64;
    }
    let mut edges = 0i64;
    let mut components = vertices;
    for e in g.edges() {
        let [a, b] = e.ends;
        if inside(a) && inside(b) {
            edges += 1;
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                components -= 1;
            }
        }
    }
    components - vertices + edges + weights
}

/// Whether `d` is stable: on a stable graph with total degree `g - 1` or `g`,
/// every nonempty proper vertex subset `Y` has `Σ_{v∈Y} d_v >= g(Y)`.
///
/// Exponential in the vertex count; graphs above [`STABILITY_VERTEX_CAP`]
/// are rejected.
pub fn is_stable_multidegree(g: &DualGraph, d: &Multidegree) -> Result<bool> {
    d.check_len(g)?;
    check_stable_setting(g, d.total())?;
    let n = g.vertex_count();
    let full: u32 = (1u32 << n) - 1;
    for mask in 1..full {
        let sum: i64 = (0..n).filter(|&v| mask & (1 << v) != 0).map(|v| d[v]).sum();
        if sum < subset_genus(g, mask) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_stable_setting(g: &DualGraph, total: i64) -> Result<()> {
    if g.vertex_count() > STABILITY_VERTEX_CAP {
        return Err(Error::TooManyVertices {
            count: g.vertex_count(),
            cap: STABILITY_VERTEX_CAP,
        });
    }
    if !g.is_stable() {
        return Err(Error::NotStable);
    }
    let genus = g.genus();
    if total != genus - 1 && total != genus {
        return Err(Error::StableDegreeOutOfRange { total, genus });
    }
    Ok(())
}

/// All uniform multidegrees in lexicographic order (vertex 0 most
/// significant). Empty when some vertex has negative canonical degree.
pub fn enumerate_uniform(g: &DualGraph) -> UniformMultidegrees {
    let upper: Vec<i64> = (0..g.vertex_count())
        .map(|v| g.canonical_degree(v))
        .collect();
    let count = if upper.iter().any(|&u| u < 0) {
        0
    } else {
        upper.iter().map(|&u| (u + 1) as u128).product()
    };
    UniformMultidegrees {
        upper,
        next: 0,
        count,
    }
}

/// Iterator over the box `0 <= d_v <= ω_v`. Supports random access by
/// lexicographic index so the space can be split into chunks.
#[derive(Debug, Clone)]
pub struct UniformMultidegrees {
    upper: Vec<i64>,
    next: u128,
    count: u128,
}

impl UniformMultidegrees {
    /// Total number of uniform multidegrees, `Π_v (ω_v + 1)`.
    pub fn count_total(&self) -> u128 {
        self.count
    }

    /// The multidegree at lexicographic position `index`.
    pub fn at(&self, index: u128) -> Option<Multidegree> {
        if index >= self.count {
            return None;
        }
        let mut rest = index;
        let mut values = vec![0; self.upper.len()];
        for (slot, &u) in values.iter_mut().zip(&self.upper).rev() {
            let radix = (u + 1) as u128;
            *slot = (rest % radix) as i64;
            rest /= radix;
        }
        Some(Multidegree(values))
    }
}

impl Iterator for UniformMultidegrees {
    type Item = Multidegree;

    fn next(&mut self) -> Option<Multidegree> {
        let item = self.at(self.next)?;
        self.next += 1;
        Some(item)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = usize::try_from(self.count - self.next.min(self.count)).unwrap_or(usize::MAX);
        (left, Some(left))
    }
}

/// All stable multidegrees of the given total degree, lexicographic.
pub fn enumerate_stable(g: &DualGraph, total: i64) -> Result<std::vec::IntoIter<Multidegree>> {
    check_stable_setting(g, total)?;
    let n = g.vertex_count();
    // Singletons bound each entry from below, complements from above.
    let full = (1u32 << n) - 1;
    let lower: Vec<i64> = (0..n)
        .map(|v| {
            if n == 1 {
                total
            } else {
                subset_genus(g, 1 << v)
            }
        })
        .collect();
    let upper: Vec<i64> = (0..n)
        .map(|v| {
            if n == 1 {
                total
            } else {
                total - subset_genus(g, full & !(1 << v))
            }
        })
        .collect();

    let mut out = Vec::new();
    let mut current = vec![0; n];
    compositions(&lower, &upper, total, 0, &mut current, &mut |values| {
        let d = Multidegree(values.to_vec());
        if is_stable_multidegree(g, &d).unwrap_or(false) {
            out.push(d);
        }
    });
    Ok(out.into_iter())
}

fn compositions(
    lower: &[i64],
    upper: &[i64],
    remaining: i64,
    at: usize,
    current: &mut Vec<i64>,
    visit: &mut dyn FnMut(&[i64]),
) {
    if at == current.len() {
        if remaining == 0 {
            visit(current);
        }
        return;
    }
    let min_rest: i64 = lower[at + 1..].iter().sum();
    let max_rest: i64 = upper[at + 1..].iter().sum();
    let lo = lower[at].max(remaining - max_rest);
    let hi = upper[at].min(remaining - min_rest);
    for x in lo..=hi {
        current[at] = x;
        compositions(lower, upper, remaining - x, at + 1, current, visit);
    }
}
