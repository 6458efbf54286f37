//! Verification campaign: runs every closed-form result against the
//! brute-force engine over a grid of group instances and emits a
//! machine-readable report.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formula::{
    decompose_check, find_standard_pair, find_standard_pair_with, fixture_expected_norm,
    fixture_set, mnp_class_of, mnp_norm_bound, mnp_power, q_class_of, sd_class_of,
    FixtureParams,
};
use crate::group::{
    center, frattini, maximal_proper_normal_subgroups, normal_closure, subgroup_generated,
    Element, Family, Group, GroupSpec, TableGroup,
};
use crate::norm::{
    ball, class_pair_representatives, conjugacy_classes, delta_n, delta_with, group_norm,
    product_set, word_norms, Parallelism,
};

pub const DEFAULT_SEED: u64 = 0x1bd1a5;
pub const REPORT_VERSION: u32 = 1;

/// Sampling volume for randomized suites on groups above the exhaustive cut.
const RANDOM_CASES: usize = 100_000;
const EXHAUSTIVE_ORDER: usize = 64;
const DECOMPOSITION_SEQUENCES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LemmaSuite {
    /// Normal-form multiplication agrees with the verified dense table.
    MultiplicationTable,
    /// Positivity, symmetry, subadditivity, conjugation invariance of ‖·‖_S.
    NormAxioms,
    /// B_S(n)·B_S(m) = B_S(n+m) as product sets.
    BallAdditivity,
    /// Powers of the semidihedral twist a^{-1+2^{n-2}} follow the parity rule.
    TwistPower,
    SdClassFormula,
    QClassFormula,
    MnpClassFormula,
    /// ⟨a⟩, ⟨a²⟩⟨b⟩, ⟨a²⟩⟨ab⟩ are the normal index-2 subgroups of SD_n/Q_n.
    NormalSubgroups,
    /// Every normally generating set contains a two-element normally
    /// generating subset of the stated shape (SD_n/Q_n).
    StructureLemma,
    /// ‖G‖ over the S₁/S₂/S₃ case-analysis sets matches the case tables.
    Fixtures,
    /// b^k a b^{-k} = z^{-k} a in M_n(p).
    BConjugation,
    /// (a^ℓ b^j)^k closed form equals iterated multiplication.
    PowerFormula,
    /// Every normally generating set of M_n(p) contains an element of
    /// order p^{n-1}.
    OrderLemma,
    /// Φ(G) = Z(G) = the maximal subgroup of ⟨a⟩ in M_n(p).
    FrattiniCenter,
    /// Every maximal-order element completes to a standard generator pair.
    StandardPair,
    /// BFS norms stay below the closed-form bounds for S = {a, a^ℓ b^j}.
    NormBounds,
    /// ‖G‖_{{a,b}} equals its exact closed form in M_n(p).
    GroupNormExact,
    /// Random X₁/X₂ factor sequences satisfy the product-decomposition
    /// exponent bounds.
    Decomposition,
}

impl LemmaSuite {
    pub const ALL: [LemmaSuite; 18] = [
        LemmaSuite::MultiplicationTable,
        LemmaSuite::NormAxioms,
        LemmaSuite::BallAdditivity,
        LemmaSuite::TwistPower,
        LemmaSuite::SdClassFormula,
        LemmaSuite::QClassFormula,
        LemmaSuite::MnpClassFormula,
        LemmaSuite::NormalSubgroups,
        LemmaSuite::StructureLemma,
        LemmaSuite::Fixtures,
        LemmaSuite::BConjugation,
        LemmaSuite::PowerFormula,
        LemmaSuite::OrderLemma,
        LemmaSuite::FrattiniCenter,
        LemmaSuite::StandardPair,
        LemmaSuite::NormBounds,
        LemmaSuite::GroupNormExact,
        LemmaSuite::Decomposition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaSuite::MultiplicationTable => "multiplication-table",
            LemmaSuite::NormAxioms => "norm-axioms",
            LemmaSuite::BallAdditivity => "ball-additivity",
            LemmaSuite::TwistPower => "twist-power",
            LemmaSuite::SdClassFormula => "sd-class-formula",
            LemmaSuite::QClassFormula => "q-class-formula",
            LemmaSuite::MnpClassFormula => "mnp-class-formula",
            LemmaSuite::NormalSubgroups => "normal-subgroups",
            LemmaSuite::StructureLemma => "structure-lemma",
            LemmaSuite::Fixtures => "fixtures",
            LemmaSuite::BConjugation => "b-conjugation",
            LemmaSuite::PowerFormula => "power-formula",
            LemmaSuite::OrderLemma => "order-lemma",
            LemmaSuite::FrattiniCenter => "frattini-center",
            LemmaSuite::StandardPair => "standard-pair",
            LemmaSuite::NormBounds => "norm-bounds",
            LemmaSuite::GroupNormExact => "group-norm-exact",
            LemmaSuite::Decomposition => "decomposition",
        }
    }

    pub fn applies_to(self, family: Family) -> bool {
        use Family::*;
        use LemmaSuite::*;
        match self {
            MultiplicationTable | NormAxioms | BallAdditivity | StandardPair => true,
            TwistPower | SdClassFormula => family == Semidihedral,
            QClassFormula => family == Quaternion,
            NormalSubgroups | StructureLemma | Fixtures => {
                family == Semidihedral || family == Quaternion
            }
            MnpClassFormula | BConjugation | PowerFormula | OrderLemma | FrattiniCenter
            | NormBounds | GroupNormExact | Decomposition => family == Modular,
        }
    }
}

/// Outcome of one lemma suite on one group instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: String,
    pub cases: u64,
    pub failures: u64,
    pub first_counterexample: Option<String>,
    pub pass: bool,
}

struct SuiteRun {
    cases: u64,
    failures: u64,
    first_counterexample: Option<String>,
}

impl SuiteRun {
    fn new() -> Self {
        SuiteRun { cases: 0, failures: 0, first_counterexample: None }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_counterexample.is_none() {
                self.first_counterexample = Some(describe());
            }
        }
    }

    fn finish(self, suite: LemmaSuite) -> SuiteResult {
        SuiteResult {
            suite: suite.name().to_string(),
            cases: self.cases,
            failures: self.failures,
            pass: self.failures == 0,
            first_counterexample: self.first_counterexample,
        }
    }
}

fn suite_rng(seed: u64, spec: &GroupSpec, suite: LemmaSuite) -> ChaCha8Rng {
    let mut h = DefaultHasher::new();
    spec.hash(&mut h);
    suite.hash(&mut h);
    ChaCha8Rng::seed_from_u64(seed ^ h.finish())
}

/// Runs one lemma suite against one group; errors if the suite is for a
/// different family.
pub fn run_lemma_suite(g: &Group, suite: LemmaSuite, seed: u64) -> Result<SuiteResult> {
    if !suite.applies_to(g.spec().family) {
        return Err(Error::SuiteNotApplicable {
            suite: suite.name().to_string(),
            family: g.spec().family.to_string(),
        });
    }
    let mut run = SuiteRun::new();
    match suite {
        LemmaSuite::MultiplicationTable => multiplication_table(g, &mut run)?,
        LemmaSuite::NormAxioms => norm_axioms(g, seed, &mut run)?,
        LemmaSuite::BallAdditivity => ball_additivity(g, &mut run),
        LemmaSuite::TwistPower => twist_power(g, &mut run),
        LemmaSuite::SdClassFormula => class_formula(g, &mut run)?,
        LemmaSuite::QClassFormula => class_formula(g, &mut run)?,
        LemmaSuite::MnpClassFormula => class_formula(g, &mut run)?,
        LemmaSuite::NormalSubgroups => normal_subgroups(g, &mut run),
        LemmaSuite::StructureLemma => structure_lemma(g, &mut run),
        LemmaSuite::Fixtures => fixtures(g, &mut run)?,
        LemmaSuite::BConjugation => b_conjugation(g, &mut run),
        LemmaSuite::PowerFormula => power_formula(g, &mut run)?,
        LemmaSuite::OrderLemma => order_lemma(g, &mut run),
        LemmaSuite::FrattiniCenter => frattini_center(g, &mut run)?,
        LemmaSuite::StandardPair => standard_pair(g, &mut run),
        LemmaSuite::NormBounds => norm_bounds(g, &mut run)?,
        LemmaSuite::GroupNormExact => group_norm_exact(g, &mut run)?,
        LemmaSuite::Decomposition => decomposition(g, seed, &mut run),
    }
    Ok(run.finish(suite))
}

fn multiplication_table(g: &Group, run: &mut SuiteRun) -> Result<()> {
    let table = TableGroup::from_group(g)?;
    for x in 0..g.order() {
        for y in 0..g.order() {
            run.check(g.mul_idx(x, y) == table.mul(x, y), || {
                format!(
                    "{} * {}",
                    g.format_element(g.at(x)),
                    g.format_element(g.at(y))
                )
            });
        }
        run.check(g.index(g.inverse(g.at(x))) == table.inv(x), || {
            format!("inverse of {}", g.format_element(g.at(x)))
        });
    }
    Ok(())
}

fn norm_axioms(g: &Group, seed: u64, run: &mut SuiteRun) -> Result<()> {
    let s = [g.gen_a(), g.gen_b()];
    let profile = word_norms(g, &s)?;
    if !profile.is_complete() {
        run.check(false, || "defining generators do not normally generate".to_string());
        return Ok(());
    }
    let d = |i: usize| profile.norm(i).unwrap();
    let order = g.order();
    run.check(d(g.index(g.identity())) == 0, || "norm of identity".to_string());
    for x in 0..order {
        run.check(x == g.index(g.identity()) || d(x) > 0, || {
            format!("positivity at {}", g.format_element(g.at(x)))
        });
        run.check(d(g.index(g.inverse(g.at(x)))) == d(x), || {
            format!("symmetry at {}", g.format_element(g.at(x)))
        });
    }
    let check_pair = |run: &mut SuiteRun, x: usize, y: usize| {
        run.check(d(g.mul_idx(x, y)) <= d(x) + d(y), || {
            format!(
                "subadditivity at ({}, {})",
                g.format_element(g.at(x)),
                g.format_element(g.at(y))
            )
        });
        let conj = g.index(g.conjugate(g.at(x), g.at(y)));
        run.check(d(conj) == d(x), || {
            format!(
                "conjugation invariance at ({}, {})",
                g.format_element(g.at(x)),
                g.format_element(g.at(y))
            )
        });
    };
    if order <= EXHAUSTIVE_ORDER {
        for x in 0..order {
            for y in 0..order {
                check_pair(run, x, y);
            }
        }
    } else {
        let mut rng = suite_rng(seed, g.spec(), LemmaSuite::NormAxioms);
        for _ in 0..RANDOM_CASES {
            let x = rng.gen_range(0..order);
            let y = rng.gen_range(0..order);
            check_pair(run, x, y);
        }
    }
    Ok(())
}

fn ball_additivity(g: &Group, run: &mut SuiteRun) {
    let s = [g.gen_a(), g.gen_b()];
    let balls: Vec<Vec<usize>> = (0..=6u32)
        .map(|k| ball(g, &s, k).iter().map(|&e| g.index(e)).collect())
        .collect();
    for n in 0..=3usize {
        for m in 0..=3usize {
            let product = product_set(g, &balls[n], &balls[m]);
            run.check(product == balls[n + m], || format!("B({n})·B({m}) != B({})", n + m));
        }
    }
}

fn twist_power(g: &Group, run: &mut SuiteRun) {
    let n = g.spec().n;
    let twist = g.element(-1 + (1i64 << (n - 2)), 0);
    let half = 1i64 << (n - 2);
    for m in 0..g.ord_a() as i64 {
        let want = if m % 2 == 0 {
            g.element(-m, 0)
        } else {
            g.element(-m + half, 0)
        };
        run.check(g.power(twist, m) == want, || format!("twist power at m={m}"));
    }
}

fn class_formula(g: &Group, run: &mut SuiteRun) -> Result<()> {
    let spec = g.spec();
    for e in g.elements() {
        let formula = match spec.family {
            Family::Semidihedral => sd_class_of(spec.n, e)?,
            Family::Quaternion => q_class_of(spec.n, e)?,
            Family::Modular => mnp_class_of(spec.p, spec.n, e)?,
            Family::Dihedral => unreachable!("gated by applies_to"),
        };
        let orbit: Vec<Element> = g.conj_orbit(e).into_iter().map(|i| g.at(i)).collect();
        run.check(formula == orbit, || format!("class of {}", g.format_element(e)));
    }
    Ok(())
}

fn normal_subgroups(g: &Group, run: &mut SuiteRun) {
    let half = g.order() / 2;
    let subs = [
        subgroup_generated(g, &[g.gen_a()]),
        subgroup_generated(g, &[g.element(2, 0), g.gen_b()]),
        subgroup_generated(g, &[g.element(2, 0), g.element(1, 1)]),
    ];
    for (name, sub) in ["<a>", "<a^2><b>", "<a^2><ab>"].iter().zip(&subs) {
        run.check(sub.order() == half, || format!("{name} has index 2"));
        run.check(sub.is_normal(g), || format!("{name} is normal"));
    }
    // They are exactly the maximal proper normal subgroups.
    let maximal = maximal_proper_normal_subgroups(g);
    run.check(maximal.len() == 3, || "three maximal normal subgroups".to_string());
    for sub in &subs {
        run.check(
            maximal.iter().any(|m| m.members() == sub.members()),
            || "listed subgroup is maximal".to_string(),
        );
    }
}

/// Enumerates canonical normally generating sets of size ≤ max_size over the
/// class-pair representatives.
fn generating_sets_up_to(g: &Group, max_size: usize) -> Vec<Vec<Element>> {
    let reps = class_pair_representatives(g);
    let mut out = Vec::new();
    let mut chosen: Vec<Element> = Vec::new();
    fn dfs(
        g: &Group,
        reps: &[Element],
        max_size: usize,
        start: usize,
        chosen: &mut Vec<Element>,
        out: &mut Vec<Vec<Element>>,
    ) {
        for i in start..reps.len() {
            chosen.push(reps[i]);
            if normal_closure(g, chosen).is_whole_group(g) {
                out.push(chosen.clone());
            }
            if chosen.len() < max_size {
                dfs(g, reps, max_size, i + 1, chosen, out);
            }
            chosen.pop();
        }
    }
    dfs(g, &reps, max_size, 0, &mut chosen, &mut out);
    out
}

fn structure_lemma(g: &Group, run: &mut SuiteRun) {
    for s in generating_sets_up_to(g, 3) {
        let found = s.iter().any(|&x| {
            x.j == 1
                && s.iter().any(|&y| {
                    let shape = (y.j == 0 && y.i % 2 == 1)
                        || (y.j == 1 && y.i % 2 != x.i % 2);
                    shape && normal_closure(g, &[x, y]).is_whole_group(g)
                })
        });
        run.check(found, || {
            let words: Vec<String> = s.iter().map(|&e| g.format_element(e)).collect();
            format!("no two-element core in {{{}}}", words.join(", "))
        });
    }
}

fn fixtures(g: &Group, run: &mut SuiteRun) -> Result<()> {
    let mut cases: Vec<FixtureParams> = vec![FixtureParams::default()];
    if g.order() <= EXHAUSTIVE_ORDER {
        let evens: Vec<u64> = (0..g.ord_a()).step_by(2).collect();
        let odds: Vec<u64> = (1..g.ord_a()).step_by(2).collect();
        for &v1 in &evens {
            for &o1 in &odds {
                for &o2 in &odds {
                    cases.push(FixtureParams { v1, o1, o2 });
                }
            }
        }
    }
    for params in cases {
        for which in 1..=3u8 {
            let s = fixture_set(g, which, params)?;
            let expected = fixture_expected_norm(g.spec(), which)?;
            let got = group_norm(g, &s)?;
            run.check(got == expected, || {
                format!(
                    "S{which} with (v1, o1, o2) = ({}, {}, {}): norm {got} != {expected}",
                    params.v1, params.o1, params.o2
                )
            });
        }
    }
    Ok(())
}

fn b_conjugation(g: &Group, run: &mut SuiteRun) {
    let z = g.central_z().expect("modular");
    let a = g.gen_a();
    let b = g.gen_b();
    for k in 0..g.spec().p as i64 {
        let lhs = g.multiply(
            g.multiply(g.power(b, k), a),
            g.power(b, -k),
        );
        let rhs = g.multiply(g.power(z, -k), a);
        run.check(lhs == rhs, || format!("b^{k} a b^-{k} at k={k}"));
    }
}

fn power_formula(g: &Group, run: &mut SuiteRun) -> Result<()> {
    let spec = g.spec();
    let (p, n) = (spec.p, spec.n);
    for ell in 0..g.ord_a() {
        for j in 0..p {
            let x = Element { i: ell, j };
            for k in 1..=p * p {
                let closed = mnp_power(p, n, ell as i64, j as i64, k)?;
                run.check(closed == g.power(x, k as i64), || {
                    format!("({})^{k}", g.format_element(x))
                });
            }
        }
    }
    Ok(())
}

fn order_lemma(g: &Group, run: &mut SuiteRun) {
    let max_order = g.ord_a();
    run.check(
        g.elements().any(|e| g.order_of(e) == max_order),
        || format!("no element of order {max_order}"),
    );
    for s in generating_sets_up_to(g, 2) {
        run.check(s.iter().any(|&e| g.order_of(e) == max_order), || {
            let words: Vec<String> = s.iter().map(|&e| g.format_element(e)).collect();
            format!("generating set {{{}}} lacks a maximal-order element", words.join(", "))
        });
    }
}

fn frattini_center(g: &Group, run: &mut SuiteRun) -> Result<()> {
    let phi = frattini(g)?;
    let z = center(g);
    run.check(phi.members() == z.members(), || "frattini equals center".to_string());
    let sub = subgroup_generated(g, &[g.element(g.spec().p as i64, 0)]);
    run.check(z.members() == sub.members(), || "center equals <a^p>".to_string());
    Ok(())
}

fn standard_pair(g: &Group, run: &mut SuiteRun) {
    match find_standard_pair(g) {
        Ok(pair) => run.check(pair.verify(g), || "recovered pair fails its relations".to_string()),
        Err(_) => run.check(false, || "no standard pair found".to_string()),
    }
    let max_order = g.ord_a();
    for x in g.elements() {
        if g.order_of(x) != max_order {
            continue;
        }
        let ok = find_standard_pair_with(g, x).map(|p| p.verify(g)).unwrap_or(false);
        run.check(ok, || format!("no completion for {}", g.format_element(x)));
    }
}

fn norm_bounds(g: &Group, run: &mut SuiteRun) -> Result<()> {
    let spec = g.spec();
    let (p, n) = (spec.p, spec.n);
    let on = mnp_norm_bound(p, n, true)?;
    let off = mnp_norm_bound(p, n, false)?;
    for ell in 0..g.ord_a() {
        for j in 1..p {
            let s = [g.gen_a(), Element { i: ell, j }];
            let profile = word_norms(g, &s)?;
            for x in 0..g.order() {
                let bound = if g.at(x).j == 0 { on } else { off };
                let norm = profile.norm(x);
                run.check(norm.is_some_and(|v| v <= bound), || {
                    format!(
                        "‖{}‖ with S = {{a, {}}} exceeds {bound}",
                        g.format_element(g.at(x)),
                        g.format_element(Element { i: ell, j }),
                    )
                });
            }
        }
    }
    Ok(())
}

fn group_norm_exact(g: &Group, run: &mut SuiteRun) -> Result<()> {
    let spec = g.spec();
    let want = mnp_norm_bound(spec.p, spec.n, false)?;
    let got = group_norm(g, &[g.gen_a(), g.gen_b()])?;
    run.check(got == want, || format!("‖G‖_{{a,b}} = {got}, expected {want}"));
    Ok(())
}

fn decomposition(g: &Group, seed: u64, run: &mut SuiteRun) {
    let p = g.spec().p;
    let z = g.central_z().expect("modular");
    let mut x: Vec<Element> = Vec::new();
    for r in 0..p as i64 {
        let zr = g.power(z, r);
        for base in [g.gen_a(), g.inverse(g.gen_a()), g.gen_b(), g.inverse(g.gen_b())] {
            x.push(g.multiply(zr, base));
        }
    }
    x.sort_by_key(|&e| g.index(e));
    x.dedup();
    let mut rng = suite_rng(seed, g.spec(), LemmaSuite::Decomposition);
    for _ in 0..DECOMPOSITION_SEQUENCES {
        let len = rng.gen_range(0..=12);
        let factors: Vec<Element> = (0..len).map(|_| x[rng.gen_range(0..x.len())]).collect();
        match decompose_check(g, &factors) {
            Ok(w) => run.check(w.bounds_hold(), || {
                let words: Vec<String> =
                    factors.iter().map(|&e| g.format_element(e)).collect();
                format!(
                    "bounds fail for [{}]: s0={}, t0={}, s={}, t={}",
                    words.join(", "),
                    w.s0,
                    w.t0,
                    w.s,
                    w.t
                )
            }),
            Err(e) => run.check(false, || format!("factor rejected: {e}")),
        }
    }
}

/// One verified group instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub spec: GroupSpec,
    pub label: String,
    pub order: u64,
    pub num_classes: u64,
    pub delta: u32,
    pub predicted: u32,
    pub matches: bool,
    pub delta2: u32,
    pub delta2_equals_delta: bool,
    pub suites: Vec<SuiteResult>,
    pub millis: u64,
}

impl InstanceRecord {
    pub fn pass(&self) -> bool {
        self.matches && self.delta2_equals_delta && self.suites.iter().all(|s| s.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub version: u32,
    pub seed: u64,
    pub records: Vec<InstanceRecord>,
    pub pass: bool,
}

impl VerificationReport {
    /// Copy with wall-clock fields zeroed; everything else is a
    /// deterministic function of (grid, seed).
    pub fn with_zeroed_timings(&self) -> VerificationReport {
        let mut r = self.clone();
        for rec in &mut r.records {
            rec.millis = 0;
        }
        r
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    pub mode: Parallelism,
    pub order_cap: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: DEFAULT_SEED,
            mode: Parallelism::default(),
            order_cap: crate::group::DEFAULT_ORDER_CAP,
        }
    }
}

/// The grid covering every theorem branch: both diameter cases per family,
/// both p-regimes of M_n(p), its (3,3) special case, and both dihedral
/// parities.
pub fn default_grid() -> Vec<GroupSpec> {
    let mut grid = vec![
        GroupSpec::semidihedral(4),
        GroupSpec::semidihedral(5),
        GroupSpec::semidihedral(6),
        GroupSpec::quaternion(3),
        GroupSpec::quaternion(4),
        GroupSpec::quaternion(5),
        GroupSpec::quaternion(6),
        GroupSpec::modular(2, 4),
        GroupSpec::modular(2, 5),
        GroupSpec::modular(2, 6),
        GroupSpec::modular(3, 3),
        GroupSpec::modular(3, 4),
        GroupSpec::modular(5, 3),
        GroupSpec::modular(7, 3),
    ];
    grid.extend([3, 4, 5, 6, 8, 9, 10].map(GroupSpec::dihedral));
    grid
}

fn verify_instance(spec: &GroupSpec, config: &VerifyConfig) -> Result<InstanceRecord> {
    let start = Instant::now();
    let g = Group::build_with_cap(*spec, config.order_cap)?;
    let classes = conjugacy_classes(&g);
    let report = delta_with(&g, config.mode)?;
    let d2 = delta_n(&g, 2)?;
    let suites = LemmaSuite::ALL
        .iter()
        .filter(|s| s.applies_to(spec.family))
        .map(|&s| run_lemma_suite(&g, s, config.seed))
        .collect::<Result<Vec<SuiteResult>>>()?;
    Ok(InstanceRecord {
        spec: *spec,
        label: spec.label(),
        order: spec.order(),
        num_classes: classes.num_classes() as u64,
        delta: report.delta.value,
        predicted: report.predicted,
        matches: report.matches,
        delta2: d2.value,
        delta2_equals_delta: d2.value == report.delta.value,
        suites,
        millis: start.elapsed().as_millis() as u64,
    })
}

/// Runs the whole campaign over a grid. Instances run in parallel when
/// enabled; records are sorted canonically so the report is independent of
/// scheduling.
pub fn run_verification(grid: &[GroupSpec], config: &VerifyConfig) -> Result<VerificationReport> {
    let records: Result<Vec<InstanceRecord>> = match config.mode {
        Parallelism::Sequential => grid.iter().map(|s| verify_instance(s, config)).collect(),
        Parallelism::Parallel => {
            #[cfg(feature = "parallel")]
            {
                grid.par_iter().map(|s| verify_instance(s, config)).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                grid.iter().map(|s| verify_instance(s, config)).collect()
            }
        }
    };
    let mut records = records?;
    records.sort_by_key(|r| (r.spec.family, r.spec.p, r.spec.n));
    let pass = records.iter().all(|r| r.pass());
    Ok(VerificationReport { version: REPORT_VERSION, seed: config.seed, records, pass })
}

/// One CSV row per instance.
pub fn report_to_csv(report: &VerificationReport) -> String {
    let mut out = String::from("family,n,p,order,delta,predicted,match,millis\n");
    for r in &report.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.spec.family, r.spec.n, r.spec.p, r.order, r.delta, r.predicted, r.matches, r.millis
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_applicability() {
        let q3 = Group::build(GroupSpec::quaternion(3)).unwrap();
        assert!(matches!(
            run_lemma_suite(&q3, LemmaSuite::SdClassFormula, DEFAULT_SEED),
            Err(Error::SuiteNotApplicable { .. })
        ));
        let r = run_lemma_suite(&q3, LemmaSuite::QClassFormula, DEFAULT_SEED).unwrap();
        assert!(r.pass);
        assert_eq!(r.cases, 8);
    }

    #[test]
    fn single_instance_report() {
        let grid = [GroupSpec::semidihedral(4)];
        let report = run_verification(&grid, &VerifyConfig::default()).unwrap();
        assert!(report.pass);
        let r = &report.records[0];
        assert_eq!(r.delta, 2);
        assert_eq!(r.delta2, 2);
        assert!(r.matches);
    }

    #[test]
    fn empty_grid_passes() {
        let report = run_verification(&[], &VerifyConfig::default()).unwrap();
        assert!(report.pass);
        assert!(report.records.is_empty());
    }

    #[test]
    fn csv_shape() {
        let grid = [GroupSpec::quaternion(3), GroupSpec::dihedral(3)];
        let report = run_verification(&grid, &VerifyConfig::default()).unwrap();
        let csv = report_to_csv(&report);
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("family,n,p,order"));
    }

    #[test]
    fn reports_are_deterministic_modulo_timing() {
        let grid = [GroupSpec::modular(2, 5), GroupSpec::quaternion(4)];
        let config = VerifyConfig::default();
        let a = run_verification(&grid, &config).unwrap();
        let b = run_verification(&grid, &config).unwrap();
        assert_eq!(a.with_zeroed_timings(), b.with_zeroed_timings());
        assert_eq!(
            serde_json::to_string(&a.with_zeroed_timings()).unwrap(),
            serde_json::to_string(&b.with_zeroed_timings()).unwrap()
        );
    }

    #[test]
    fn mutated_multiplication_is_caught() {
        // Break the action exponent of M_3(3); at least one suite must fail.
        let spec = GroupSpec::modular(3, 3);
        let broken = Group::build_with_twist_override(spec, 1, 1 << 16).unwrap();
        let mut any_failure = false;
        for suite in LemmaSuite::ALL {
            if !suite.applies_to(Family::Modular) {
                continue;
            }
            if let Ok(r) = run_lemma_suite(&broken, suite, DEFAULT_SEED) {
                if !r.pass {
                    any_failure = true;
                    assert!(r.first_counterexample.is_some());
                }
            }
        }
        assert!(any_failure);
    }
}
