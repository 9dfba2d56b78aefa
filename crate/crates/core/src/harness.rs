//! Verification campaigns: Clifford bounds over uniform multidegrees, the
//! generic classic bound, lemma-by-lemma identity checks and a Clifford
//! index estimate.
//!
//! Every campaign is a pure function of `(model, parameters, seed)`. Work is
//! sharded by multidegree; shard `i` draws from a ChaCha8 stream selected by
//! `i`, so results do not depend on scheduling.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{integer, rational, Rational};
use crate::constructions::extremal_bundle;
use crate::curve::{
    canonical_bundle, is_base_point, partial_normalization, residual_bundle, restrict_subcurve,
    spanning_forest, stabilize_bundle, twist_point, GluedLineBundle, RationalCurveModel, Twist,
};
use crate::error::{Error, Result};
use crate::graph::{bridge_forest, stabilize, DualGraph, EdgeId};
use crate::multidegree::{
    self, classic_clifford_bound, clifford_bound, dhar, enumerate_stable, enumerate_uniform,
    is_uniform, Multidegree, STABILITY_VERTEX_CAP,
};
use crate::text::write_bundle;

pub const REPORT_VERSION: u32 = 1;

/// Which inequality a report checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `h^0 <= d/2 + #l/2` over sampled and structured gluings.
    Clifford,
    /// `h^0 <= d/2 + 1` over random gluings from a large box.
    Generic,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportEntry {
    pub multidegree: Vec<i64>,
    pub total: i64,
    /// Exact rational, `p/q` or `p`.
    pub bound: String,
    pub max_h0: usize,
    pub sharp: bool,
    pub exceeded: bool,
    /// Number of bundles evaluated for this multidegree.
    pub evaluated: usize,
    pub witness_file: Option<String>,
    /// Bundle realizing `max_h0`.
    #[serde(skip)]
    pub witness: Option<GluedLineBundle>,
}

/// The extremal bundle measured against the classic bound, reported by the
/// generic campaign for contrast.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalContrast {
    pub multidegree: Vec<i64>,
    pub h0: usize,
    pub classic_bound: String,
    pub violates_classic: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub version: u32,
    pub check: Check,
    /// The graph in the text format.
    pub graph: String,
    pub genus: i64,
    pub leaves: usize,
    pub seed: u64,
    pub samples: usize,
    pub entries: Vec<ReportEntry>,
    pub exceedances: usize,
    pub sharp_count: usize,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extremal: Option<ExtremalContrast>,
}

impl VerificationReport {
    fn assemble(
        check: Check,
        model: &RationalCurveModel,
        seed: u64,
        samples: usize,
        entries: Vec<ReportEntry>,
    ) -> Self {
        let g = model.graph();
        let exceedances = entries.iter().filter(|e| e.exceeded).count();
        VerificationReport {
            version: REPORT_VERSION,
            check,
            graph: crate::text::write_graph(g),
            genus: g.genus(),
            leaves: bridge_forest(g).leaf_count(),
            seed,
            samples,
            sharp_count: entries.iter().filter(|e| e.sharp).count(),
            exceedances,
            passed: exceedances == 0,
            entries,
            extremal: None,
        }
    }

    /// Writes the witness of every exceeding entry, and of every sharp one
    /// when `include_sharp`, as `witness-<index>.bundle` under `dir`, and
    /// records the file names.
    pub fn write_witnesses(&mut self, dir: &Path, include_sharp: bool) -> std::io::Result<usize> {
        let mut written = 0;
        for (i, entry) in self.entries.iter_mut().enumerate() {
            if !(entry.exceeded || include_sharp && entry.sharp) {
                continue;
            }
            let Some(witness) = &entry.witness else {
                continue;
            };
            let name = format!("witness-{i}.bundle");
            std::fs::write(dir.join(&name), write_bundle(witness))?;
            entry.witness_file = Some(name);
            written += 1;
        }
        Ok(written)
    }
}

/// A uniformly random nonzero rational with numerator and denominator of
/// absolute value at most `bound`.
fn random_scalar(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    let denom = rng.gen_range(1..=bound);
    loop {
        let numer = rng.gen_range(-bound..=bound);
        if numer != 0 {
            return rational(numer, denom);
        }
    }
}

fn random_integer(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    loop {
        let x = rng.gen_range(-bound..=bound);
        if x != 0 {
            return integer(x);
        }
    }
}

/// A gauge-normalized gluing: `(1, 1)` on the spanning forest and `(1, r)`
/// with `r` from `draw` elsewhere.
fn normalized_gluing(
    g: &DualGraph,
    rng: &mut ChaCha8Rng,
    draw: fn(&mut ChaCha8Rng, i64) -> Rational,
    bound: i64,
) -> Vec<[Rational; 2]> {
    spanning_forest(g)
        .into_iter()
        .map(|tree| {
            if tree {
                [Rational::one(), Rational::one()]
            } else {
                [Rational::one(), draw(rng, bound)]
            }
        })
        .collect()
}

/// Random nonzero scalars on both sides of every edge.
pub fn random_gluing(g: &DualGraph, rng: &mut ChaCha8Rng, bound: i64) -> Vec<[Rational; 2]> {
    (0..g.edge_count())
        .map(|_| [random_scalar(rng, bound), random_scalar(rng, bound)])
        .collect()
}

const SMALL_BOX: i64 = 9;
const GENERIC_BOX: i64 = 1_000_000;

fn shard_rng(seed: u64, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

/// Structured bundles of multidegree `d`: trivial gluing, the residual of
/// the trivial gluing in the mirrored degree, the dualizing sheaf and the
/// extremal bundle when their degrees match.
fn structured(
    model: &Arc<RationalCurveModel>,
    d: &Multidegree,
    extremal: Option<&GluedLineBundle>,
) -> Vec<GluedLineBundle> {
    let g = model.graph();
    let mut out = Vec::new();
    out.push(GluedLineBundle::with_trivial_gluing(model.clone(), d.clone()).expect("valid degree"));
    if g.is_semistable() {
        let mirrored = multidegree::residual(g, d);
        let trivial = GluedLineBundle::with_trivial_gluing(model.clone(), mirrored).expect("valid");
        out.push(residual_bundle(&trivial).expect("semistable"));
        if *d == g.canonical_multidegree() {
            out.push(canonical_bundle(model).expect("semistable"));
        }
    }
    if let Some(b) = extremal.filter(|b| b.degree() == d) {
        out.push(b.clone());
    }
    out
}

struct Best {
    h0: usize,
    witness: Option<GluedLineBundle>,
    evaluated: usize,
}

impl Best {
    fn new() -> Self {
        Best {
            h0: 0,
            witness: None,
            evaluated: 0,
        }
    }

    fn offer(&mut self, b: GluedLineBundle) {
        let h = b.h0();
        self.evaluated += 1;
        if self.witness.is_none() || h > self.h0 {
            self.h0 = h;
            self.witness = Some(b);
        }
    }
}

fn entry(d: Multidegree, bound: Rational, best: Best) -> ReportEntry {
    let max = integer(best.h0 as i64);
    ReportEntry {
        total: d.total(),
        multidegree: d.into_values(),
        bound: bound.to_string(),
        max_h0: best.h0,
        sharp: max == bound,
        exceeded: max > bound,
        evaluated: best.evaluated,
        witness_file: None,
        witness: best.witness,
    }
}

fn uniform_list(g: &DualGraph) -> Vec<Multidegree> {
    enumerate_uniform(g).collect()
}

/// Checks `h^0 <= d/2 + #l/2` for every uniform multidegree, on `samples`
/// random gauge-normalized gluings with small scalars plus the structured
/// gluings.
pub fn verify_clifford(
    model: &Arc<RationalCurveModel>,
    samples: usize,
    seed: u64,
) -> VerificationReport {
    let g = model.graph();
    let extremal = extremal_bundle(model).ok();
    let entries = uniform_list(g)
        .into_par_iter()
        .enumerate()
        .map(|(i, d)| {
            let mut rng = shard_rng(seed, i as u64);
            let mut best = Best::new();
            for b in structured(model, &d, extremal.as_ref()) {
                best.offer(b);
            }
            for _ in 0..samples {
                let gluing = normalized_gluing(g, &mut rng, random_scalar, SMALL_BOX);
                best.offer(GluedLineBundle::new(model.clone(), d.clone(), gluing).expect("valid"));
            }
            let bound = clifford_bound(g, &d);
            entry(d, bound, best)
        })
        .collect();
    VerificationReport::assemble(Check::Clifford, model, seed, samples, entries)
}

/// Checks the classic bound `h^0 <= d/2 + 1` for every uniform multidegree
/// on `trials` random gauge-normalized gluings with integer scalars from
/// `[-10^6, 10^6]`, and records how the extremal bundle fares against the
/// same bound.
pub fn verify_generic(
    model: &Arc<RationalCurveModel>,
    trials: usize,
    seed: u64,
) -> VerificationReport {
    let g = model.graph();
    let entries = uniform_list(g)
        .into_par_iter()
        .enumerate()
        .map(|(i, d)| {
            let mut rng = shard_rng(seed, i as u64);
            let mut best = Best::new();
            for _ in 0..trials {
                let gluing = normalized_gluing(g, &mut rng, random_integer, GENERIC_BOX);
                best.offer(GluedLineBundle::new(model.clone(), d.clone(), gluing).expect("valid"));
            }
            let bound = classic_clifford_bound(&d);
            entry(d, bound, best)
        })
        .collect();
    let mut report = VerificationReport::assemble(Check::Generic, model, seed, trials, entries);
    report.extremal = extremal_bundle(model).ok().map(|b| {
        let bound = classic_clifford_bound(b.degree());
        let h0 = b.h0();
        ExtremalContrast {
            multidegree: b.degree().values().to_vec(),
            h0,
            violates_classic: integer(h0 as i64) > bound,
            classic_bound: bound.to_string(),
        }
    });
    report
}

/// Result of scanning the gluing at one node against the partial
/// normalization there.
#[derive(Debug, Clone)]
pub struct NodeScan {
    pub edge: EdgeId,
    pub h0_normalized: usize,
    /// Whether each preimage of the node is a base point upstairs.
    pub base_points: [bool; 2],
    /// `h^0(L(-p1)) = h^0(L(-p2)) = h^0(L(-p1-p2))` upstairs.
    pub neutral: bool,
    /// The ratio `r` for which gluing `(1, r)` keeps every section, derived
    /// from the evaluation functionals at the two preimages.
    pub equalizing: Option<Rational>,
    pub h0_equalizing: Option<usize>,
    /// `(r, h^0)` with gluing `(1, r)` at the node.
    pub scan: Vec<(Rational, usize)>,
}

impl NodeScan {
    /// Every way the scan contradicts the normalization sandwich and its
    /// neutral-pair characterization; empty when consistent.
    pub fn violations(&self) -> Vec<String> {
        let top = self.h0_normalized;
        let mut out = Vec::new();
        for (r, h) in &self.scan {
            if *h != top && *h + 1 != top {
                out.push(format!("ratio {r}: h0 {h} outside [{}, {top}]", top - 1));
            }
        }
        if self.neutral != self.equalizing.is_some() {
            out.push(format!(
                "neutral = {} but equalizing gluing {}",
                self.neutral,
                if self.equalizing.is_some() {
                    "exists"
                } else {
                    "missing"
                }
            ));
        }
        if let Some(h) = self.h0_equalizing {
            if h != top {
                out.push(format!("equalizing gluing gives h0 {h}, expected {top}"));
            }
        }
        let both_base = self.base_points[0] && self.base_points[1];
        let no_base = !self.base_points[0] && !self.base_points[1];
        for (r, h) in &self.scan {
            let expected = if both_base {
                Some(top)
            } else if !self.neutral || (no_base && self.equalizing.as_ref() != Some(r)) {
                Some(top - 1)
            } else {
                None
            };
            if let Some(want) = expected {
                if *h != want {
                    out.push(format!("ratio {r}: h0 {h}, expected {want}"));
                }
            }
        }
        out
    }
}

/// Scans the gluing at node `edge` over `ratios`, comparing against the
/// pull-back to the partial normalization. Requires the pull-back to have
/// sections.
pub fn scan_node(b: &GluedLineBundle, edge: EdgeId, ratios: &[Rational]) -> Result<NodeScan> {
    let g = b.graph();
    let j = g.edge_index(edge).ok_or(Error::UnknownEdge(edge))?;
    let up = partial_normalization(b, edge)?;
    let top = up.h0();
    if top == 0 {
        return Err(Error::InvalidParameter(
            "pull-back to the normalization has no sections".into(),
        ));
    }
    let e = g.edge(j);
    let (u, w) = (e.ends[0], e.ends[1]);
    let (p1, p2) = (b.model().coord(j, 0).clone(), b.model().coord(j, 1).clone());

    let minus1 = twist_point(&up, u, &p1, Twist::Down)?;
    let minus2 = twist_point(&up, w, &p2, Twist::Down)?;
    let minus12 = twist_point(&minus1, w, &p2, Twist::Down)?;
    let (h1, h2, h12) = (minus1.h0(), minus2.h0(), minus12.h0());
    let neutral = h1 == h2 && h2 == h12;
    let base_points = [h1 == top, h2 == top];

    // Gluing (c0, c1) imposes c0 s(p1) = c1 s(p2) on the sections upstairs;
    // all of them survive iff the two evaluation functionals are
    // proportional in the same ratio.
    let sections = up.sections();
    let e1 = sections.evaluate(u, &p1);
    let e2 = sections.evaluate(w, &p2);
    let zero1 = e1.iter().all(Zero::is_zero);
    let zero2 = e2.iter().all(Zero::is_zero);
    let equalizing = if zero1 && zero2 {
        Some(Rational::one())
    } else if zero1 || zero2 {
        None
    } else {
        let k = e1
            .iter()
            .position(|x| !x.is_zero())
            .expect("nonzero functional");
        let mu = &e2[k] / &e1[k];
        let proportional = e1.iter().zip(&e2).all(|(a, c)| &mu * a == *c);
        (proportional && !mu.is_zero()).then(|| mu.recip())
    };

    let with_ratio = |r: &Rational| -> Result<usize> {
        let mut gluing = b.gluing().to_vec();
        gluing[j] = [Rational::one(), r.clone()];
        Ok(b.with_gluing(gluing)?.h0())
    };
    let h0_equalizing = equalizing.as_ref().map(&with_ratio).transpose()?;
    let scan = ratios
        .iter()
        .map(|r| Ok((r.clone(), with_ratio(r)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(NodeScan {
        edge,
        h0_normalized: top,
        base_points,
        neutral,
        equalizing,
        h0_equalizing,
        scan,
    })
}

/// Outcome of one family of checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LemmaReport {
    pub version: u32,
    pub graph: String,
    pub seed: u64,
    pub checks: Vec<LemmaCheck>,
    pub passed: bool,
}

impl LemmaReport {
    pub fn check(&self, name: &str) -> Option<&LemmaCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Default)]
struct Tally(BTreeMap<&'static str, LemmaCheck>);

impl Tally {
    fn record(&mut self, name: &'static str, ok: bool, detail: impl FnOnce() -> String) {
        let check = self.0.entry(name).or_insert_with(|| LemmaCheck {
            name: name.to_string(),
            cases: 0,
            failures: 0,
            first_failure: None,
        });
        check.cases += 1;
        if !ok {
            check.failures += 1;
            if check.first_failure.is_none() {
                check.first_failure = Some(detail());
            }
        }
    }

    /// Makes sure a check shows up in the report even with zero cases.
    fn touch(&mut self, name: &'static str) {
        self.0.entry(name).or_insert_with(|| LemmaCheck {
            name: name.to_string(),
            cases: 0,
            failures: 0,
            first_failure: None,
        });
    }
}

/// Knobs for [`verify_lemmas_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LemmaConfig {
    /// Random bundles per bundle-level check.
    pub random_bundles: usize,
    /// Gluing ratios tried per node scan.
    pub scan_points: usize,
    /// Largest vertex count for checks over all vertex subsets.
    pub subset_cap: usize,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        LemmaConfig {
            random_bundles: 8,
            scan_points: 6,
            subset_cap: 12,
        }
    }
}

pub const RIEMANN_ROCH: &str = "riemann_roch";
pub const BASE_POINT_DUALITY: &str = "base_point_duality";
pub const CANONICAL_TWIST_BASE_POINT: &str = "canonical_twist_base_point";
pub const RESIDUAL_MIRROR: &str = "residual_mirror";
pub const CANONICAL_H0: &str = "canonical_h0";
pub const NORMALIZATION_SANDWICH: &str = "normalization_sandwich";
pub const SUBCURVE_BOUND: &str = "subcurve_bound";
pub const SUBCURVE_VANISHING: &str = "subcurve_vanishing";
pub const STABILIZATION_PUSHFORWARD: &str = "stabilization_pushforward";
pub const LEAVES_INDUCED: &str = "leaves_induced";
pub const LEAVES_INDUCED_2EC: &str = "leaves_induced_2ec";
pub const LEAVES_EDGE_REMOVAL: &str = "leaves_edge_removal";
pub const LEAVES_STABILIZATION: &str = "leaves_stabilization";
pub const DHAR_RESTRICTION: &str = "dhar_restriction";
pub const DHAR_UNIFORM: &str = "dhar_uniform";
pub const STABLE_UNIFORM: &str = "stable_multidegree_uniform";

/// Groups of checks run by [`verify_lemma_groups`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaGroup {
    /// Leaf counts of induced subgraphs, edge removal and stabilization;
    /// uniformity of stable multidegrees.
    Graph,
    /// Riemann-Roch, the residual mirror, base points under duality and the
    /// dualizing sheaf's sections.
    Residual,
    /// `h^0` against the partial normalization at a node.
    Sandwich,
    /// Restriction to a subcurve and its complement.
    Subcurve,
    /// Dhar lemmas over all uniform multidegrees, and the push-forward to
    /// the stabilization.
    Uniform,
}

impl LemmaGroup {
    pub const ALL: [LemmaGroup; 5] = [
        LemmaGroup::Graph,
        LemmaGroup::Residual,
        LemmaGroup::Sandwich,
        LemmaGroup::Subcurve,
        LemmaGroup::Uniform,
    ];
}

/// [`verify_lemmas_with`] under the default configuration.
pub fn verify_lemmas(model: &Arc<RationalCurveModel>, seed: u64) -> LemmaReport {
    verify_lemmas_with(model, seed, LemmaConfig::default())
}

/// Runs every identity and inequality the bound rests on, each as a named
/// check with exact arithmetic. Graph-level checks are exhaustive over
/// subsets/edges; bundle-level checks use seeded random bundles.
pub fn verify_lemmas_with(
    model: &Arc<RationalCurveModel>,
    seed: u64,
    config: LemmaConfig,
) -> LemmaReport {
    verify_lemma_groups(model, seed, config, &LemmaGroup::ALL)
}

/// Runs the selected groups only. Each group draws from its own stream, so
/// a group's results do not depend on which others run.
pub fn verify_lemma_groups(
    model: &Arc<RationalCurveModel>,
    seed: u64,
    config: LemmaConfig,
    groups: &[LemmaGroup],
) -> LemmaReport {
    let g = model.graph();
    let mut tally = Tally::default();
    for (stream, group) in LemmaGroup::ALL.iter().enumerate() {
        if !groups.contains(group) {
            continue;
        }
        let mut rng = shard_rng(seed, stream as u64);
        match group {
            LemmaGroup::Graph => graph_checks(g, config, &mut tally),
            LemmaGroup::Residual => {
                if g.is_semistable() {
                    residual_checks(model, config, &mut rng, &mut tally)
                }
            }
            LemmaGroup::Sandwich => sandwich_checks(model, config, &mut rng, &mut tally),
            LemmaGroup::Subcurve => subcurve_checks(model, config, &mut rng, &mut tally),
            LemmaGroup::Uniform => uniform_checks(model, config, &mut rng, &mut tally),
        }
    }

    let checks: Vec<LemmaCheck> = tally.0.into_values().collect();
    LemmaReport {
        version: REPORT_VERSION,
        graph: crate::text::write_graph(g),
        seed,
        passed: checks.iter().all(|c| c.failures == 0),
        checks,
    }
}

fn random_degree(g: &DualGraph, rng: &mut ChaCha8Rng) -> Multidegree {
    Multidegree::new(
        (0..g.vertex_count())
            .map(|v| rng.gen_range(-1..=g.canonical_degree(v) + 1))
            .collect(),
    )
}

fn random_bundle(model: &Arc<RationalCurveModel>, rng: &mut ChaCha8Rng) -> GluedLineBundle {
    let g = model.graph();
    let d = random_degree(g, rng);
    let gluing = random_gluing(g, rng, SMALL_BOX);
    GluedLineBundle::new(model.clone(), d, gluing).expect("valid")
}

/// A rational not among the node coordinates of `v`.
fn smooth_point(model: &RationalCurveModel, v: usize, rng: &mut ChaCha8Rng) -> Rational {
    let taken = model.node_coords(v);
    loop {
        let p = random_scalar(rng, SMALL_BOX);
        if !taken.contains(&p) {
            return p;
        }
    }
}

fn graph_checks(g: &DualGraph, config: LemmaConfig, tally: &mut Tally) {
    let n = g.vertex_count();
    let leaves = bridge_forest(g).leaf_count();
    let two_edge_connected = g.is_connected() && crate::graph::bridges(g).is_empty();
    tally.touch(LEAVES_INDUCED);
    if g.is_connected() && n <= config.subset_cap {
        for mask in 1u32..(1 << n) - 1 {
            let set: Vec<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
            let (h, k) = g.induced_subgraph(&set).expect("valid subset");
            let sub_leaves = bridge_forest(&h).leaf_count();
            tally.record(LEAVES_INDUCED, sub_leaves <= leaves + k, || {
                format!("subset {set:?}: #l = {sub_leaves} > {leaves} + {k}")
            });
            if two_edge_connected {
                tally.record(LEAVES_INDUCED_2EC, sub_leaves <= k, || {
                    format!("subset {set:?}: #l = {sub_leaves} > {k}")
                });
            }
        }
    }
    if two_edge_connected {
        for j in 0..g.edge_count() {
            let after = bridge_forest(&g.without_edge(j)).leaf_count();
            tally.record(LEAVES_EDGE_REMOVAL, after == 2 && leaves == 2, || {
                format!("edge {}: #l {leaves} -> {after}", g.edge(j).id)
            });
        }
    }
    if g.is_semistable() && g.genus() >= 2 && g.is_connected() {
        let (stable, _) = stabilize(g).expect("stabilizable");
        let after = bridge_forest(&stable).leaf_count();
        tally.record(LEAVES_STABILIZATION, after == leaves, || {
            format!("#l {leaves} before stabilization, {after} after")
        });
    }
    tally.touch(STABLE_UNIFORM);
    if g.is_stable() && n <= STABILITY_VERTEX_CAP {
        let mut totals = vec![g.genus() - 1];
        if g.weights().iter().all(|&w| w >= 1) {
            totals.push(g.genus());
        }
        for total in totals {
            for d in enumerate_stable(g, total).expect("stable setting") {
                tally.record(STABLE_UNIFORM, is_uniform(g, &d), || {
                    format!("stable multidegree {d} of total {total} is not uniform")
                });
            }
        }
    }
}

fn residual_checks(
    model: &Arc<RationalCurveModel>,
    config: LemmaConfig,
    rng: &mut ChaCha8Rng,
    tally: &mut Tally,
) {
    let g = model.graph();
    let genus = g.arithmetic_genus();
    let canonical = canonical_bundle(model).expect("semistable");
    let h = canonical.h0() as i64;
    tally.record(CANONICAL_H0, h == genus, || {
        format!("h0 of the dualizing sheaf is {h}, genus {genus}")
    });
    let half_leaves = rational(bridge_forest(g).leaf_count() as i64, 2);

    for _ in 0..config.random_bundles {
        let b = random_bundle(model, rng);
        let r = residual_bundle(&b).expect("semistable");
        let (h, hr) = (b.h0() as i64, r.h0() as i64);
        let d = b.total_degree();
        tally.record(RIEMANN_ROCH, h - hr == d - genus + 1, || {
            format!(
                "degree {}: h0 {h}, residual {hr}, genus {genus}",
                b.degree()
            )
        });

        let lhs = integer(h) <= rational(d, 2) + &half_leaves;
        let rhs = integer(hr) <= rational(2 * genus - 2 - d, 2) + &half_leaves;
        tally.record(RESIDUAL_MIRROR, lhs == rhs, || {
            format!(
                "degree {}: bound holds {lhs} for L, {rhs} for residual",
                b.degree()
            )
        });

        if g.vertex_count() > 0 {
            let v = rng.gen_range(0..g.vertex_count());
            let p = smooth_point(model, v, rng);
            let base = is_base_point(&b, v, &p).expect("smooth point");
            let twisted = twist_point(&r, v, &p, Twist::Up).expect("smooth point");
            let dual_base = is_base_point(&twisted, v, &p).expect("smooth point");
            tally.record(BASE_POINT_DUALITY, base != dual_base, || {
                format!(
                    "degree {}, point {p} on {v}: base point on both sides = {base}",
                    b.degree()
                )
            });

            let wp = twist_point(&canonical, v, &p, Twist::Up).expect("smooth point");
            let ok = is_base_point(&wp, v, &p).expect("smooth point");
            tally.record(CANONICAL_TWIST_BASE_POINT, ok, || {
                format!("point {p} on {v} is not a base point of the twisted dualizing sheaf")
            });
        }
    }
}

fn sandwich_checks(
    model: &Arc<RationalCurveModel>,
    config: LemmaConfig,
    rng: &mut ChaCha8Rng,
    tally: &mut Tally,
) {
    let g = model.graph();
    tally.touch(NORMALIZATION_SANDWICH);
    if g.edge_count() == 0 {
        return;
    }
    for _ in 0..config.random_bundles {
        let b = random_bundle(model, rng);
        let j = rng.gen_range(0..g.edge_count());
        let edge = g.edge(j).id;
        let ratios: Vec<Rational> = (0..config.scan_points)
            .map(|_| random_scalar(rng, SMALL_BOX))
            .collect();
        match scan_node(&b, edge, &ratios) {
            Ok(scan) => {
                let problems = scan.violations();
                tally.record(NORMALIZATION_SANDWICH, problems.is_empty(), || {
                    format!(
                        "degree {}, edge {edge}: {}",
                        b.degree(),
                        problems.join("; ")
                    )
                });
            }
            Err(Error::InvalidParameter(_)) => {}
            Err(err) => tally.record(NORMALIZATION_SANDWICH, false, || err.to_string()),
        }
    }
}

fn subcurve_checks(
    model: &Arc<RationalCurveModel>,
    config: LemmaConfig,
    rng: &mut ChaCha8Rng,
    tally: &mut Tally,
) {
    let g = model.graph();
    let n = g.vertex_count();
    tally.touch(SUBCURVE_BOUND);
    tally.touch(SUBCURVE_VANISHING);
    if n < 2 {
        return;
    }
    let mut vertices: Vec<usize> = (0..n).collect();
    for _ in 0..config.random_bundles {
        let b = random_bundle(model, rng);
        vertices.shuffle(rng);
        let size = rng.gen_range(1..n);
        let mut set = vertices[..size].to_vec();
        set.sort_unstable();
        let (inside, outside) = restrict_subcurve(&b, &set).expect("proper subset");
        let (h, hy, hc) = (b.h0(), inside.h0(), outside.h0());
        tally.record(SUBCURVE_BOUND, h <= hy + hc, || {
            format!("degree {}, subset {set:?}: {h} > {hy} + {hc}", b.degree())
        });
        let sections = b.sections();
        if set.iter().all(|&v| sections.vanishes_on(v)) {
            tally.record(SUBCURVE_VANISHING, h == hc, || {
                format!("degree {}, subset {set:?}: {h} != {hc}", b.degree())
            });
        }
    }
}

fn uniform_checks(
    model: &Arc<RationalCurveModel>,
    config: LemmaConfig,
    rng: &mut ChaCha8Rng,
    tally: &mut Tally,
) {
    let g = model.graph();
    let n = g.vertex_count();
    let uniform = uniform_list(g);
    tally.touch(DHAR_RESTRICTION);
    tally.touch(DHAR_UNIFORM);
    for d in &uniform {
        let random = GluedLineBundle::new(
            model.clone(),
            d.clone(),
            normalized_gluing(g, rng, random_scalar, SMALL_BOX),
        )
        .expect("valid");
        let trivial =
            GluedLineBundle::with_trivial_gluing(model.clone(), d.clone()).expect("valid");
        let mut h0s: Option<[usize; 2]> = None;
        for v in 0..n {
            let burnt = dhar(g, d, v);
            if burnt.len() == n {
                let [hr, ht] = *h0s.get_or_insert_with(|| [random.h0(), trivial.h0()]);
                let cap = (d[v] + 1).max(0) as usize;
                tally.record(DHAR_RESTRICTION, hr <= cap && ht <= cap, || {
                    format!("degree {d}, vertex {v}: h0 {hr}/{ht} > {cap}")
                });
                continue;
            }
            let mut inside = vec![false; n];
            for &w in &burnt {
                inside[w] = true;
            }
            let complement: Vec<bool> = inside.iter().map(|&x| !x).collect();
            let sub = g.induced(&complement);
            let mut reduced: Vec<i64> = (0..n).filter(|&w| complement[w]).map(|w| d[w]).collect();
            for &j in &sub.boundary {
                let e = g.edge(j);
                let w = if complement[e.ends[0]] {
                    e.ends[0]
                } else {
                    e.ends[1]
                };
                reduced[sub.vertex_map[w].expect("outside vertex")] -= 1;
            }
            let reduced = Multidegree::new(reduced);
            let ok = sub.graph.is_semistable() && is_uniform(&sub.graph, &reduced);
            tally.record(DHAR_UNIFORM, ok, || {
                format!("degree {d}, vertex {v}: complement degree {reduced} not uniform")
            });
        }
    }

    let exceptional = (0..n).any(|v| g.is_exceptional(v));
    if exceptional && g.is_connected() && g.is_semistable() && g.genus() >= 2 && !uniform.is_empty()
    {
        for _ in 0..config.random_bundles {
            let d = uniform[rng.gen_range(0..uniform.len())].clone();
            let gluing = normalized_gluing(g, rng, random_scalar, SMALL_BOX);
            let b = GluedLineBundle::new(model.clone(), d, gluing).expect("valid");
            let pushed = stabilize_bundle(&b).expect("uniform degree");
            let ok = b.h0() == pushed.h0() && is_uniform(pushed.graph(), pushed.degree());
            tally.record(STABILIZATION_PUSHFORWARD, ok, || {
                format!(
                    "degree {}: h0 {} upstairs, {} downstairs",
                    b.degree(),
                    b.h0(),
                    pushed.h0()
                )
            });
        }
    }
}

/// Upper estimate of the Clifford index with the bundle attaining it.
#[derive(Debug, Clone)]
pub struct IndexEstimate {
    /// `None` when no bundle qualified.
    pub value: Option<i64>,
    pub witness: Option<GluedLineBundle>,
    pub evaluated: usize,
}

/// Minimum of `d - 2 h^0 + 2` over uniform bundles with `h^0 >= 2` and
/// `h^1 >= 2`, taken over the structured gluings plus `samples` random ones
/// per multidegree.
pub fn clifford_index_estimate(
    model: &Arc<RationalCurveModel>,
    samples: usize,
    seed: u64,
) -> Result<IndexEstimate> {
    let g = model.graph();
    let genus = g.arithmetic_genus();
    if genus < 2 {
        return Err(Error::GenusTooSmall { genus });
    }
    let extremal = extremal_bundle(model).ok();
    let shards: Vec<(Option<(i64, GluedLineBundle)>, usize)> = uniform_list(g)
        .into_par_iter()
        .enumerate()
        .map(|(i, d)| {
            let mut rng = shard_rng(seed, i as u64);
            let mut candidates = structured(model, &d, extremal.as_ref());
            for _ in 0..samples {
                let gluing = normalized_gluing(g, &mut rng, random_scalar, SMALL_BOX);
                candidates
                    .push(GluedLineBundle::new(model.clone(), d.clone(), gluing).expect("valid"));
            }
            let evaluated = candidates.len();
            let best = candidates
                .into_iter()
                .filter_map(|b| {
                    let h = b.h0() as i64;
                    let total = b.total_degree();
                    let h1 = h - total + genus - 1;
                    (h >= 2 && h1 >= 2).then(|| (total - 2 * h + 2, b))
                })
                .min_by_key(|(value, _)| *value);
            (best, evaluated)
        })
        .collect();
    let evaluated = shards.iter().map(|(_, n)| n).sum();
    let best = shards
        .into_iter()
        .filter_map(|(best, _)| best)
        .min_by_key(|(value, _)| *value);
    Ok(IndexEstimate {
        value: best.as_ref().map(|(v, _)| *v),
        witness: best.map(|(_, b)| b),
        evaluated,
    })
}
