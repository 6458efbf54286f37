//! Word norms and conjugacy diameters.
//!
//! Norms are computed by breadth-first search over the Cayley graph whose
//! generator set is the conjugation- and inversion-closure of S. Diameters
//! are exact maxima over conjugation-closed symmetric generating unions:
//! the norm depends only on that closure and shrinks as the closure grows,
//! so the maximum is attained on inclusion-minimal generating unions of
//! {class, inverse-class} pairs.

use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formula;
use crate::group::{maximal_proper_normal_subgroups, Element, Group, GroupSpec};

pub const UNREACHABLE: u32 = u32::MAX;

/// Execution mode for the diameter search. Results are identical in both
/// modes; only the wall clock differs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    Parallel,
}

impl Default for Parallelism {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Parallelism::Parallel
        } else {
            Parallelism::Sequential
        }
    }
}

/// Partition of the group into conjugacy classes.
#[derive(Debug, Clone)]
pub struct ClassDecomposition {
    class_of: Vec<u32>,
    reps: Vec<usize>,
    sizes: Vec<usize>,
    inverse_class: Vec<u32>,
}

impl ClassDecomposition {
    pub fn num_classes(&self) -> usize {
        self.reps.len()
    }

    pub fn class_of(&self, idx: usize) -> usize {
        self.class_of[idx] as usize
    }

    pub fn representatives(&self) -> &[usize] {
        &self.reps
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Class id of the inverses of class `cid` (an involution on class ids).
    pub fn inverse_class(&self, cid: usize) -> usize {
        self.inverse_class[cid] as usize
    }

    pub fn class_members(&self, cid: usize) -> Vec<usize> {
        self.class_of
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| (c as usize == cid).then_some(i))
            .collect()
    }
}

/// Orbit partition under conjugation; representatives are least indices.
pub fn conjugacy_classes(g: &Group) -> ClassDecomposition {
    let order = g.order();
    let mut class_of = vec![u32::MAX; order];
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    for idx in 0..order {
        if class_of[idx] != u32::MAX {
            continue;
        }
        let orbit = g.conj_orbit(g.at(idx));
        let cid = reps.len() as u32;
        for &m in &orbit {
            class_of[m] = cid;
        }
        reps.push(idx);
        sizes.push(orbit.len());
    }
    let inverse_class = reps
        .iter()
        .map(|&r| class_of[g.index(g.inverse(g.at(r)))])
        .collect();
    ClassDecomposition { class_of, reps, sizes, inverse_class }
}

/// Conj_G(S^{±1}): all conjugates of the elements of S and their inverses.
#[derive(Debug, Clone)]
pub struct ConjClosedSet {
    source: Vec<Element>,
    members: Vec<usize>,
    mask: Vec<bool>,
}

impl ConjClosedSet {
    pub fn source(&self) -> &[Element] {
        &self.source
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.mask[idx]
    }
}

pub fn conj_set(g: &Group, s: &[Element]) -> Result<ConjClosedSet> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut mask = vec![false; g.order()];
    for &e in s {
        for x in [e, g.inverse(e)] {
            for m in g.conj_orbit(x) {
                mask[m] = true;
            }
        }
    }
    let members = mask
        .iter()
        .enumerate()
        .filter_map(|(i, &m)| m.then_some(i))
        .collect();
    Ok(ConjClosedSet { source: s.to_vec(), members, mask })
}

/// B_S(k): products of at most k factors from Conj_G(S^{±1}).
pub fn ball(g: &Group, s: &[Element], k: u32) -> Vec<Element> {
    let id = g.index(g.identity());
    let mut mask = vec![false; g.order()];
    mask[id] = true;
    if !s.is_empty() && k > 0 {
        let cs = conj_set(g, s).expect("nonempty");
        let mut frontier = vec![id];
        for _ in 0..k {
            let mut next = Vec::new();
            for &x in &frontier {
                for &c in cs.members() {
                    let y = g.mul_idx(x, c);
                    if !mask[y] {
                        mask[y] = true;
                        next.push(y);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
    }
    mask.iter()
        .enumerate()
        .filter_map(|(i, &m)| m.then_some(g.at(i)))
        .collect()
}

/// Product set {xy : x ∈ xs, y ∈ ys} as sorted indices.
pub fn product_set(g: &Group, xs: &[usize], ys: &[usize]) -> Vec<usize> {
    let mut mask = vec![false; g.order()];
    for &x in xs {
        for &y in ys {
            mask[g.mul_idx(x, y)] = true;
        }
    }
    mask.iter()
        .enumerate()
        .filter_map(|(i, &m)| m.then_some(i))
        .collect()
}

/// Full distance table ‖·‖_S for one set S.
#[derive(Debug, Clone)]
pub struct NormProfile {
    set: Vec<Element>,
    distances: Vec<u32>,
    max_finite: u32,
}

impl NormProfile {
    pub fn set(&self) -> &[Element] {
        &self.set
    }

    pub fn distances(&self) -> &[u32] {
        &self.distances
    }

    /// ‖x‖_S, or None when x is outside the normal closure of S.
    pub fn norm(&self, idx: usize) -> Option<u32> {
        (self.distances[idx] != UNREACHABLE).then(|| self.distances[idx])
    }

    pub fn max_finite(&self) -> u32 {
        self.max_finite
    }

    /// True iff every element is reachable, i.e. S normally generates.
    pub fn is_complete(&self) -> bool {
        self.distances.iter().all(|&d| d != UNREACHABLE)
    }
}

fn bfs_over(g: &Group, members: &[usize], source: Vec<Element>) -> NormProfile {
    let order = g.order();
    let mut distances = vec![UNREACHABLE; order];
    let id = g.index(g.identity());
    distances[id] = 0;
    let mut frontier = vec![id];
    let mut depth = 0u32;
    let mut max_finite = 0u32;
    while !frontier.is_empty() {
        depth += 1;
        let mut next = Vec::new();
        for &x in &frontier {
            for &c in members {
                let y = g.mul_idx(x, c);
                if distances[y] == UNREACHABLE {
                    distances[y] = depth;
                    max_finite = depth;
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    NormProfile { set: source, distances, max_finite }
}

/// Single-source BFS from the identity over Conj_G(S^{±1}).
pub fn word_norms(g: &Group, s: &[Element]) -> Result<NormProfile> {
    let cs = conj_set(g, s)?;
    Ok(bfs_over(g, cs.members(), cs.source().to_vec()))
}

pub fn is_normally_generating(g: &Group, s: &[Element]) -> bool {
    if s.is_empty() {
        return g.order() == 1;
    }
    let cs = conj_set(g, s).expect("nonempty");
    closure_is_whole_group(g, cs.members())
}

/// ‖G‖_S. Errors when S does not normally generate.
pub fn group_norm(g: &Group, s: &[Element]) -> Result<u32> {
    let profile = word_norms(g, s)?;
    if !profile.is_complete() {
        return Err(Error::NotNormallyGenerating);
    }
    Ok(profile.max_finite())
}

/// Whether the subgroup generated by a conjugation-closed member list is all
/// of G (i.e. whether the originating set normally generates). Early-exits
/// once the closure reaches |G|.
fn closure_is_whole_group(g: &Group, members: &[usize]) -> bool {
    let order = g.order();
    let mut mask = vec![false; order];
    let id = g.index(g.identity());
    mask[id] = true;
    let mut count = 1;
    let mut stack = vec![id];
    while let Some(x) = stack.pop() {
        for &c in members {
            let y = g.mul_idx(x, c);
            if !mask[y] {
                mask[y] = true;
                count += 1;
                if count == order {
                    return true;
                }
                stack.push(y);
            }
        }
    }
    count == order
}

/// One {class, inverse-class} pair: the atom of the diameter search, since
/// ‖·‖_S depends only on the union of these pairs covered by Conj_G(S^{±1}).
#[derive(Debug, Clone)]
struct ClassPair {
    rep: usize,
    members: Vec<usize>,
}

fn class_pairs(g: &Group, classes: &ClassDecomposition) -> Vec<ClassPair> {
    let id = g.index(g.identity());
    let mut pairs = Vec::new();
    for cid in 0..classes.num_classes() {
        let inv = classes.inverse_class(cid);
        if inv < cid {
            continue;
        }
        let mut members = classes.class_members(cid);
        if inv != cid {
            members.extend(classes.class_members(inv));
            members.sort_unstable();
        }
        // The identity pair never changes a norm profile or a closure.
        if members == [id] {
            continue;
        }
        pairs.push(ClassPair { rep: members[0], members });
    }
    pairs
}

/// Canonical candidate elements for set enumeration: one representative per
/// non-identity {class, inverse-class} pair, in index order.
pub fn class_pair_representatives(g: &Group) -> Vec<Element> {
    let classes = conjugacy_classes(g);
    class_pairs(g, &classes)
        .iter()
        .map(|p| g.at(p.rep))
        .collect()
}

/// A diameter value together with the canonical set attaining it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaValue {
    pub value: u32,
    pub witness: Vec<Element>,
}

/// Δ(G) with the predicted closed-form value for the family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub spec: GroupSpec,
    pub delta: DeltaValue,
    pub predicted: u32,
    pub matches: bool,
    /// Number of minimal generating unions the search evaluated.
    pub candidates: u64,
}

/// Keeps the larger norm; ties go to the shortlex-least witness, so the
/// result is independent of evaluation order.
fn better(best: &Option<(u32, Vec<usize>)>, cand: &(u32, Vec<usize>)) -> bool {
    match best {
        None => true,
        Some((bv, bw)) => {
            cand.0 > *bv
                || (cand.0 == *bv
                    && (cand.1.len() < bw.len()
                        || (cand.1.len() == bw.len() && cand.1 < *bw)))
        }
    }
}

fn union_members(pairs: &[ClassPair], chosen: &[usize]) -> Vec<usize> {
    let mut m: Vec<usize> = chosen
        .iter()
        .flat_map(|&i| pairs[i].members.iter().copied())
        .collect();
    m.sort_unstable();
    m.dedup();
    m
}

/// Δ_n(G): exact maximum of ‖G‖_S over normally generating S with |S| ≤ n,
/// enumerated over canonical class-pair representatives. Supersets of a
/// generating prefix are pruned: enlarging S can only shrink norms, and any
/// generating set contains a minimal generating subset of the same size or
/// less, so the maximum survives the pruning.
pub fn delta_n(g: &Group, n: usize) -> Result<DeltaValue> {
    assert!(n >= 1, "set size bound must be positive");
    let classes = conjugacy_classes(g);
    let pairs = class_pairs(g, &classes);
    let mut best: Option<(u32, Vec<usize>)> = None;

    fn dfs(
        g: &Group,
        pairs: &[ClassPair],
        n: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        best: &mut Option<(u32, Vec<usize>)>,
    ) {
        for i in start..pairs.len() {
            chosen.push(i);
            let members = union_members(pairs, chosen);
            if closure_is_whole_group(g, &members) {
                let profile = bfs_over(g, &members, Vec::new());
                let witness: Vec<usize> = chosen.iter().map(|&k| pairs[k].rep).collect();
                let cand = (profile.max_finite(), witness);
                if better(best, &cand) {
                    *best = Some(cand);
                }
            } else if chosen.len() < n {
                dfs(g, pairs, n, i + 1, chosen, best);
            }
            chosen.pop();
        }
    }

    if g.order() == 1 {
        return Ok(DeltaValue { value: 0, witness: vec![g.identity()] });
    }
    dfs(g, &pairs, n, 0, &mut Vec::new(), &mut best);
    match best {
        Some((value, witness)) => Ok(DeltaValue {
            value,
            witness: witness.into_iter().map(|i| g.at(i)).collect(),
        }),
        None => Err(Error::NoGeneratingSet),
    }
}

/// All inclusion-minimal generating unions of class pairs, encoded as sorted
/// pair-index lists. A union generates iff no maximal proper normal subgroup
/// contains every pair, so minimal generating unions are the minimal hitting
/// sets of the "pairs escaping M" families — there are at most
/// 2^(#maximal subgroups) of them and each has at most that many pairs.
fn minimal_generating_unions(g: &Group, pairs: &[ClassPair]) -> Vec<Vec<usize>> {
    let maximals = maximal_proper_normal_subgroups(g);
    let nbits = maximals.len();
    assert!(nbits <= 64, "group has too many maximal normal subgroups");
    let full: u64 = if nbits == 64 { u64::MAX } else { (1u64 << nbits) - 1 };
    // Bit k set = every member of the pair lies inside maximal subgroup k.
    let masks: Vec<u64> = pairs
        .iter()
        .map(|p| {
            let mut m = 0u64;
            for (k, sub) in maximals.iter().enumerate() {
                if sub.contains_all(&p.members) {
                    m |= 1 << k;
                }
            }
            m
        })
        .collect();

    let mut out: Vec<Vec<usize>> = Vec::new();
    fn dfs(
        masks: &[u64],
        full: u64,
        covered_and: u64,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if covered_and == 0 {
            // Generating; keep only if every chosen pair is necessary.
            let minimal = (0..chosen.len()).all(|skip| {
                chosen
                    .iter()
                    .enumerate()
                    .filter(|&(idx, _)| idx != skip)
                    .fold(full, |acc, (_, &p)| acc & masks[p])
                    != 0
            });
            if minimal {
                let mut key = chosen.clone();
                key.sort_unstable();
                if !out.contains(&key) {
                    out.push(key);
                }
            }
            return;
        }
        // Branch on every pair escaping the lowest still-uncovered maximal.
        let bit = covered_and & covered_and.wrapping_neg();
        for (i, &m) in masks.iter().enumerate() {
            if m & bit == 0 && !chosen.contains(&i) {
                chosen.push(i);
                dfs(masks, full, covered_and & m, chosen, out);
                chosen.pop();
            }
        }
    }
    dfs(&masks, full, full, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Δ(G) with the default execution mode.
pub fn delta(g: &Group) -> Result<DeltaReport> {
    delta_with(g, Parallelism::default())
}

/// Δ(G): exact maximum of ‖G‖_S over all finite normally generating sets.
/// The norm depends only on Conj_G(S^{±1}) and is antitone in it, so the
/// maximum is attained on the inclusion-minimal generating class-pair
/// unions; each is evaluated by BFS.
pub fn delta_with(g: &Group, mode: Parallelism) -> Result<DeltaReport> {
    let classes = conjugacy_classes(g);
    let pairs = class_pairs(g, &classes);
    let unions = minimal_generating_unions(g, &pairs);
    if unions.is_empty() {
        return Err(Error::NoGeneratingSet);
    }
    let eval = |chosen: &Vec<usize>| -> (u32, Vec<usize>) {
        let members = union_members(&pairs, chosen);
        let profile = bfs_over(g, &members, Vec::new());
        let witness: Vec<usize> = chosen.iter().map(|&k| pairs[k].rep).collect();
        (profile.max_finite(), witness)
    };
    let evaluated: Vec<(u32, Vec<usize>)> = match mode {
        Parallelism::Sequential => unions.iter().map(eval).collect(),
        Parallelism::Parallel => {
            #[cfg(feature = "parallel")]
            {
                unions.par_iter().map(eval).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                unions.iter().map(eval).collect()
            }
        }
    };
    let mut best: Option<(u32, Vec<usize>)> = None;
    for cand in &evaluated {
        if better(&best, cand) {
            best = Some(cand.clone());
        }
    }
    let (value, witness) = best.expect("nonempty unions");
    let predicted = formula::predicted_delta(g.spec())?;
    Ok(DeltaReport {
        spec: *g.spec(),
        delta: DeltaValue {
            value,
            witness: witness.into_iter().map(|i| g.at(i)).collect(),
        },
        predicted,
        matches: value == predicted,
        candidates: unions.len() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;

    fn build(spec: GroupSpec) -> Group {
        Group::build(spec).unwrap()
    }

    #[test]
    fn conj_set_examples() {
        let q3 = build(GroupSpec::quaternion(3));
        let cs = conj_set(&q3, &[q3.gen_a()]).unwrap();
        let want = [q3.element(1, 0), q3.element(3, 0)];
        let got: Vec<Element> = cs.members().iter().map(|&i| q3.at(i)).collect();
        assert_eq!(got, want);

        let cs = conj_set(&q3, &[q3.identity()]).unwrap();
        assert_eq!(cs.members(), [q3.index(q3.identity())]);

        let sd4 = build(GroupSpec::semidihedral(4));
        let cs = conj_set(&sd4, &[sd4.element(2, 1)]).unwrap();
        let want: Vec<usize> = [0, 2, 4, 6]
            .into_iter()
            .map(|m| sd4.index(sd4.element(m, 1)))
            .collect();
        let mut want = want;
        want.sort_unstable();
        assert_eq!(cs.members(), want);

        assert!(matches!(conj_set(&q3, &[]), Err(Error::EmptySet)));
    }

    #[test]
    fn ball_examples() {
        let q3 = build(GroupSpec::quaternion(3));
        let s = [q3.gen_a(), q3.gen_b()];
        assert_eq!(ball(&q3, &s, 0), vec![q3.identity()]);
        let cs = conj_set(&q3, &s).unwrap();
        let mut want: Vec<usize> = cs.members().to_vec();
        want.push(q3.index(q3.identity()));
        want.sort_unstable();
        let got: Vec<usize> = ball(&q3, &s, 1).iter().map(|&e| q3.index(e)).collect();
        assert_eq!(got, want);

        let sd4 = build(GroupSpec::semidihedral(4));
        assert_eq!(ball(&sd4, &[sd4.gen_a(), sd4.gen_b()], 2).len(), 16);
    }

    #[test]
    fn ball_is_monotone_in_radius() {
        let g = build(GroupSpec::modular(3, 3));
        let s = [g.gen_a(), g.gen_b()];
        let mut prev = 0;
        for k in 0..5 {
            let b = ball(&g, &s, k).len();
            assert!(b >= prev);
            prev = b;
        }
    }

    #[test]
    fn word_norm_examples() {
        let sd5 = build(GroupSpec::semidihedral(5));
        let profile = word_norms(&sd5, &[sd5.gen_b(), sd5.gen_a()]).unwrap();
        assert_eq!(profile.norm(sd5.index(sd5.identity())), Some(0));
        assert_eq!(profile.norm(sd5.index(sd5.element(3, 0))), Some(3));

        let q4 = build(GroupSpec::quaternion(4));
        let profile = word_norms(&q4, &[q4.element(1, 1), q4.gen_b()]).unwrap();
        assert!(profile.is_complete());
        assert_eq!(profile.max_finite(), 2);
    }

    #[test]
    fn normal_generation() {
        let sd4 = build(GroupSpec::semidihedral(4));
        assert!(!is_normally_generating(&sd4, &[sd4.gen_b()]));
        assert!(is_normally_generating(&sd4, &[sd4.gen_a(), sd4.gen_b()]));
        assert!(!is_normally_generating(&sd4, &[sd4.identity()]));
        assert!(matches!(
            group_norm(&sd4, &[sd4.gen_b()]),
            Err(Error::NotNormallyGenerating)
        ));
    }

    #[test]
    fn group_norm_examples() {
        let m42 = build(GroupSpec::modular(2, 4));
        assert_eq!(group_norm(&m42, &[m42.gen_a(), m42.gen_b()]).unwrap(), 3);

        let q5 = build(GroupSpec::quaternion(5));
        assert_eq!(group_norm(&q5, &[q5.gen_b(), q5.gen_a()]).unwrap(), 3);

        let sd4 = build(GroupSpec::semidihedral(4));
        let all: Vec<Element> = sd4.elements().collect();
        assert_eq!(group_norm(&sd4, &all).unwrap(), 1);
    }

    #[test]
    fn classes_examples() {
        let m33 = build(GroupSpec::modular(3, 3));
        let classes = conjugacy_classes(&m33);
        let a = m33.index(m33.gen_a());
        let cid = classes.class_of(a);
        let mut want: Vec<usize> = (0..3)
            .map(|r| m33.index(m33.element(1 + 3 * r, 0)))
            .collect();
        want.sort_unstable();
        assert_eq!(classes.class_members(cid), want);
        assert_eq!(classes.class_members(classes.class_of(0)), vec![0]);

        let sd4 = build(GroupSpec::semidihedral(4));
        let classes = conjugacy_classes(&sd4);
        let cid = classes.class_of(sd4.index(sd4.gen_a()));
        assert_eq!(
            classes.class_members(cid),
            vec![sd4.index(sd4.element(1, 0)), sd4.index(sd4.element(3, 0))]
        );
    }

    #[test]
    fn delta_matches_theorems_on_small_instances() {
        let sd4 = build(GroupSpec::semidihedral(4));
        let report = delta(&sd4).unwrap();
        assert_eq!(report.delta.value, 2);
        assert!(report.matches);

        let q3 = build(GroupSpec::quaternion(3));
        assert_eq!(delta(&q3).unwrap().delta.value, 2);

        let m35 = build(GroupSpec::modular(5, 3));
        assert_eq!(delta(&m35).unwrap().delta.value, 4);
    }

    #[test]
    fn delta_n_examples() {
        let sd5 = build(GroupSpec::semidihedral(5));
        assert_eq!(delta_n(&sd5, 2).unwrap().value, 3);
        let q3 = build(GroupSpec::quaternion(3));
        assert_eq!(delta_n(&q3, 2).unwrap().value, 2);
        let m33 = build(GroupSpec::modular(3, 3));
        assert_eq!(delta_n(&m33, 2).unwrap().value, 2);
        assert!(matches!(delta_n(&m33, 1), Err(Error::NoGeneratingSet)));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        for spec in [
            GroupSpec::semidihedral(5),
            GroupSpec::quaternion(4),
            GroupSpec::modular(3, 4),
            GroupSpec::dihedral(8),
        ] {
            let g = build(spec);
            let seq = delta_with(&g, Parallelism::Sequential).unwrap();
            let par = delta_with(&g, Parallelism::Parallel).unwrap();
            assert_eq!(seq, par);
        }
    }

    #[test]
    fn norm_depends_only_on_conj_set() {
        let sd4 = build(GroupSpec::semidihedral(4));
        // a and a^3 are conjugate, so these sets induce the same closure.
        let p1 = word_norms(&sd4, &[sd4.gen_a(), sd4.gen_b()]).unwrap();
        let p2 = word_norms(&sd4, &[sd4.element(3, 0), sd4.gen_b()]).unwrap();
        assert_eq!(p1.distances(), p2.distances());
    }
}
