//! Exact arithmetic for the four group families in exponent normal form,
//! plus subgroup machinery and a table-based oracle group.
//!
//! Every element is stored as the reduced pair `a^i b^j`. Multiplication
//! realizes the presentation through the conjugation exponents
//! `b^j a b^{-j} = a^{e_j}`, which unifies all four families under one
//! twisted-product rule.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on group order; overridable via `CONJDIAM_ORDER_CAP`.
pub const DEFAULT_ORDER_CAP: u64 = 1 << 16;

/// Reads the order cap from the environment, falling back to the default.
pub fn order_cap_from_env() -> u64 {
    std::env::var("CONJDIAM_ORDER_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_ORDER_CAP)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Dihedral,
    Semidihedral,
    Quaternion,
    Modular,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Dihedral => "dihedral",
            Family::Semidihedral => "semidihedral",
            Family::Quaternion => "quaternion",
            Family::Modular => "modular",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_u128(base: u64, exp: u32) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

/// Single source of truth for a group's presentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupSpec {
    pub family: Family,
    pub n: u32,
    pub p: u64,
}

impl GroupSpec {
    pub fn dihedral(n: u32) -> Self {
        GroupSpec { family: Family::Dihedral, n, p: 2 }
    }

    pub fn semidihedral(n: u32) -> Self {
        GroupSpec { family: Family::Semidihedral, n, p: 2 }
    }

    pub fn quaternion(n: u32) -> Self {
        GroupSpec { family: Family::Quaternion, n, p: 2 }
    }

    pub fn modular(p: u64, n: u32) -> Self {
        GroupSpec { family: Family::Modular, n, p }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        match self.family {
            Family::Dihedral => {
                if self.n < 3 {
                    return bad(format!("dihedral requires n >= 3, got n={}", self.n));
                }
                if self.p != 2 {
                    return bad("dihedral carries p = 2".into());
                }
            }
            Family::Semidihedral => {
                if self.n < 4 {
                    return bad(format!("semidihedral requires n >= 4, got n={}", self.n));
                }
                if self.p != 2 {
                    return bad("semidihedral carries p = 2".into());
                }
            }
            Family::Quaternion => {
                if self.n < 3 {
                    return bad(format!("quaternion requires n >= 3, got n={}", self.n));
                }
                if self.p != 2 {
                    return bad("quaternion carries p = 2".into());
                }
            }
            Family::Modular => {
                if !is_prime(self.p) {
                    return bad(format!("modular requires prime p, got p={}", self.p));
                }
                if self.p == 2 && self.n < 4 {
                    return bad(format!("modular with p=2 requires n >= 4, got n={}", self.n));
                }
                if self.p != 2 && self.n < 3 {
                    return bad(format!("modular with odd p requires n >= 3, got n={}", self.n));
                }
            }
        }
        Ok(())
    }

    /// Group order: `2n` for dihedral, `p^n` otherwise (saturating).
    pub fn order(&self) -> u64 {
        let o = match self.family {
            Family::Dihedral => 2u128 * self.n as u128,
            _ => pow_u128(self.p, self.n),
        };
        o.min(u64::MAX as u128) as u64
    }

    pub fn label(&self) -> String {
        match self.family {
            Family::Dihedral => format!("D_{}", 2 * self.n),
            Family::Semidihedral => format!("SD_{}", self.n),
            Family::Quaternion => format!("Q_{}", self.n),
            Family::Modular => format!("M_{}({})", self.n, self.p),
        }
    }
}

/// Canonical normal form `a^i b^j` with `0 <= i < ord(a)`, `0 <= j < ord_b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element {
    pub i: u64,
    pub j: u64,
}

impl Element {
    pub const IDENTITY: Element = Element { i: 0, j: 0 };

    pub fn is_identity(self) -> bool {
        self == Element::IDENTITY
    }
}

/// A fully built group: presentation parameters plus the precomputed
/// conjugation exponents used by the twisted-product rule.
#[derive(Debug, Clone)]
pub struct Group {
    spec: GroupSpec,
    ord_a: u64,
    ord_b: u64,
    /// Action exponent t with b^{-1} a b = a^t.
    twist: u64,
    /// conj_pows[j] = e_j with b^j a b^{-j} = a^{e_j}, i.e. t^{-j} mod ord(a).
    conj_pows: Vec<u64>,
    /// a-exponent of b^2 (nonzero only for quaternion).
    fold: u64,
}

impl Group {
    pub fn build(spec: GroupSpec) -> Result<Group> {
        Group::build_with_cap(spec, DEFAULT_ORDER_CAP)
    }

    pub fn build_with_cap(spec: GroupSpec, cap: u64) -> Result<Group> {
        spec.validate()?;
        let order = spec.order();
        if order > cap {
            return Err(Error::OrderCapExceeded { order, cap });
        }
        let (ord_a, ord_b, twist, fold) = match spec.family {
            Family::Dihedral => (spec.n as u64, 2, spec.n as u64 - 1, 0),
            Family::Semidihedral => {
                let ord_a = 1u64 << (spec.n - 1);
                // t = -1 + 2^{n-2} mod 2^{n-1}.
                (ord_a, 2, (ord_a - 1 + (1u64 << (spec.n - 2))) % ord_a, 0)
            }
            Family::Quaternion => {
                let ord_a = 1u64 << (spec.n - 1);
                (ord_a, 2, ord_a - 1, 1u64 << (spec.n - 2))
            }
            Family::Modular => {
                let ord_a = spec.p.pow(spec.n - 1);
                (ord_a, spec.p, 1 + spec.p.pow(spec.n - 2), 0)
            }
        };
        Ok(Group::assemble(spec, ord_a, ord_b, twist, fold))
    }

    /// Mutation-testing hook: builds the group with a perturbed action
    /// exponent. Not part of the public contract.
    #[doc(hidden)]
    pub fn build_with_twist_override(spec: GroupSpec, twist: u64, cap: u64) -> Result<Group> {
        let g = Group::build_with_cap(spec, cap)?;
        Ok(Group::assemble(spec, g.ord_a, g.ord_b, twist % g.ord_a, g.fold))
    }

    fn assemble(spec: GroupSpec, ord_a: u64, ord_b: u64, twist: u64, fold: u64) -> Group {
        // t^{ord_b} = 1 mod ord(a) in every family, so t^{-1} = t^{ord_b - 1}.
        let mut t_inv = 1u64;
        for _ in 0..ord_b - 1 {
            t_inv = t_inv * twist % ord_a;
        }
        let mut conj_pows = Vec::with_capacity(ord_b as usize);
        let mut e = 1u64;
        for _ in 0..ord_b {
            conj_pows.push(e);
            e = e * t_inv % ord_a;
        }
        Group { spec, ord_a, ord_b, twist, conj_pows, fold }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn order(&self) -> usize {
        (self.ord_a * self.ord_b) as usize
    }

    pub fn ord_a(&self) -> u64 {
        self.ord_a
    }

    pub fn ord_b(&self) -> u64 {
        self.ord_b
    }

    /// The action exponent t with b^{-1} a b = a^t.
    pub fn action_exponent(&self) -> u64 {
        self.twist
    }

    pub fn identity(&self) -> Element {
        Element::IDENTITY
    }

    pub fn gen_a(&self) -> Element {
        Element { i: 1, j: 0 }
    }

    pub fn gen_b(&self) -> Element {
        Element { i: 0, j: 1 }
    }

    /// The central element z = a^{p^{n-2}} of a modular group.
    pub fn central_z(&self) -> Option<Element> {
        match self.spec.family {
            Family::Modular => Some(Element { i: self.spec.p.pow(self.spec.n - 2), j: 0 }),
            _ => None,
        }
    }

    /// Builds the normal form of a^i b^j from arbitrary integer exponents.
    pub fn element(&self, i: i64, j: i64) -> Element {
        Element {
            i: i.rem_euclid(self.ord_a as i64) as u64,
            j: j.rem_euclid(self.ord_b as i64) as u64,
        }
    }

    pub fn index(&self, e: Element) -> usize {
        (e.i * self.ord_b + e.j) as usize
    }

    pub fn at(&self, idx: usize) -> Element {
        Element { i: idx as u64 / self.ord_b, j: idx as u64 % self.ord_b }
    }

    pub fn multiply(&self, x: Element, y: Element) -> Element {
        let mut i = (x.i + y.i * self.conj_pows[x.j as usize]) % self.ord_a;
        let mut j = x.j + y.j;
        if self.fold != 0 && j >= 2 {
            i = (i + self.fold) % self.ord_a;
            j -= 2;
        }
        Element { i, j: j % self.ord_b }
    }

    pub fn mul_idx(&self, x: usize, y: usize) -> usize {
        self.index(self.multiply(self.at(x), self.at(y)))
    }

    pub fn inverse(&self, x: Element) -> Element {
        let j = (self.ord_b - x.j) % self.ord_b;
        let fold = if self.fold != 0 && x.j == 1 { self.fold } else { 0 };
        // Solve x.i + i * e_{x.j} + fold = 0 mod ord(a); e_j is invertible
        // with inverse e_{(ord_b - j) mod ord_b}.
        let e_inv = self.conj_pows[j as usize];
        let i = (self.ord_a - (x.i + fold) % self.ord_a) % self.ord_a * e_inv % self.ord_a;
        Element { i, j }
    }

    pub fn power(&self, x: Element, k: i64) -> Element {
        if k < 0 {
            return self.power(self.inverse(x), -k);
        }
        let mut acc = Element::IDENTITY;
        let mut base = x;
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.multiply(acc, base);
            }
            base = self.multiply(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn order_of(&self, x: Element) -> u64 {
        let mut acc = x;
        let mut k = 1;
        while !acc.is_identity() {
            acc = self.multiply(acc, x);
            k += 1;
        }
        k
    }

    /// h^{-1} x h.
    pub fn conjugate(&self, x: Element, h: Element) -> Element {
        self.multiply(self.multiply(self.inverse(h), x), h)
    }

    pub fn commutator(&self, x: Element, y: Element) -> Element {
        self.multiply(
            self.multiply(self.inverse(x), self.inverse(y)),
            self.multiply(x, y),
        )
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.order()).map(|idx| self.at(idx))
    }

    /// The conjugation orbit of `e`, as sorted element indices. Orbits under
    /// the generators a and b coincide with full conjugation orbits.
    pub fn conj_orbit(&self, e: Element) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        let mut stack = vec![self.index(e)];
        seen[self.index(e)] = true;
        let gens = [self.gen_a(), self.gen_b()];
        while let Some(idx) = stack.pop() {
            let x = self.at(idx);
            for h in gens {
                let c = self.index(self.conjugate(x, h));
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        seen.iter()
            .enumerate()
            .filter_map(|(i, &s)| s.then_some(i))
            .collect()
    }

    pub fn format_element(&self, e: Element) -> String {
        if e.is_identity() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        if e.i == 1 {
            parts.push("a".to_string());
        } else if e.i > 1 {
            parts.push(format!("a^{}", e.i));
        }
        if e.j == 1 {
            parts.push("b".to_string());
        } else if e.j > 1 {
            parts.push(format!("b^{}", e.j));
        }
        parts.join(" ")
    }
}

/// A subgroup stored as a sorted list of element indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    members: Vec<usize>,
    mask: Vec<bool>,
    generators: Vec<Element>,
}

impl Subgroup {
    fn from_mask(mask: Vec<bool>, generators: Vec<Element>) -> Subgroup {
        let members = mask
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
            .collect();
        Subgroup { members, mask, generators }
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.mask[idx]
    }

    pub fn contains_all(&self, indices: &[usize]) -> bool {
        indices.iter().all(|&i| self.mask[i])
    }

    pub fn is_whole_group(&self, g: &Group) -> bool {
        self.members.len() == g.order()
    }

    pub fn is_normal(&self, g: &Group) -> bool {
        let gens = [g.gen_a(), g.gen_b()];
        self.members.iter().all(|&idx| {
            gens.iter()
                .all(|&h| self.mask[g.index(g.conjugate(g.at(idx), h))])
        })
    }
}

/// Closure of a seed set under right-multiplication by `gens`
/// (a subgroup whenever the generated sub-semigroup is, i.e. always here).
fn close_under(g: &Group, seed: &[usize], gens: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; g.order()];
    let id = g.index(g.identity());
    let mut stack = vec![id];
    mask[id] = true;
    for &s in seed {
        if !mask[s] {
            mask[s] = true;
            stack.push(s);
        }
    }
    while let Some(x) = stack.pop() {
        for &s in gens {
            let y = g.mul_idx(x, s);
            if !mask[y] {
                mask[y] = true;
                stack.push(y);
            }
        }
    }
    mask
}

/// Smallest subgroup containing `gens`.
pub fn subgroup_generated(g: &Group, gens: &[Element]) -> Subgroup {
    let idxs: Vec<usize> = gens.iter().map(|&e| g.index(e)).collect();
    let mask = close_under(g, &idxs, &idxs);
    let sub = Subgroup::from_mask(mask, gens.to_vec());
    debug_assert_eq!(g.order() % sub.order(), 0);
    sub
}

/// Normal closure: the subgroup generated by all conjugates of `s`.
pub fn normal_closure(g: &Group, s: &[Element]) -> Subgroup {
    let mut conj: Vec<usize> = Vec::new();
    for &e in s {
        conj.extend(g.conj_orbit(e));
    }
    conj.sort_unstable();
    conj.dedup();
    let mask = close_under(g, &conj, &conj);
    Subgroup::from_mask(mask, s.to_vec())
}

pub fn center(g: &Group) -> Subgroup {
    let gens = [g.gen_a(), g.gen_b()];
    let mut mask = vec![false; g.order()];
    let mut members = Vec::new();
    for x in g.elements() {
        if gens
            .iter()
            .all(|&h| g.multiply(x, h) == g.multiply(h, x))
        {
            mask[g.index(x)] = true;
            members.push(x);
        }
    }
    Subgroup::from_mask(mask, members)
}

/// The derived subgroup [G, G] = <<[a, b]>> (G is two-generated).
pub fn commutator_subgroup(g: &Group) -> Subgroup {
    normal_closure(g, &[g.commutator(g.gen_a(), g.gen_b())])
}

/// Maximal proper normal subgroups, computed as preimages of prime-index
/// subgroups of the abelianization (valid for solvable groups, which covers
/// all four families).
pub fn maximal_proper_normal_subgroups(g: &Group) -> Vec<Subgroup> {
    let derived = commutator_subgroup(g);
    // Coset map onto the abelianization: canonical rep = least index.
    let order = g.order();
    let mut coset_of = vec![usize::MAX; order];
    let mut reps = Vec::new();
    for x in 0..order {
        if coset_of[x] != usize::MAX {
            continue;
        }
        let canon = derived
            .members()
            .iter()
            .map(|&d| g.mul_idx(x, d))
            .min()
            .unwrap();
        for &d in derived.members() {
            coset_of[g.mul_idx(x, d)] = canon;
        }
        reps.push(canon);
    }
    let ab_order = reps.len();
    let ab_mul = |x: usize, y: usize| coset_of[g.mul_idx(x, y)];

    // Subgroups of the abelianization generated by pairs (A is 2-generated).
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut maximal = Vec::new();
    for (i, &x) in reps.iter().enumerate() {
        for &y in reps.iter().skip(i) {
            let mut mask = vec![false; order];
            let id = coset_of[g.index(g.identity())];
            mask[id] = true;
            let mut stack = vec![id];
            for s in [x, y] {
                if !mask[s] {
                    mask[s] = true;
                    stack.push(s);
                }
            }
            while let Some(v) = stack.pop() {
                for s in [x, y] {
                    let w = ab_mul(v, s);
                    if !mask[w] {
                        mask[w] = true;
                        stack.push(w);
                    }
                }
            }
            let sub: Vec<usize> = (0..order).filter(|&v| mask[v]).collect();
            let index = ab_order / sub.len();
            if !is_prime(index as u64) || seen.contains(&sub) {
                continue;
            }
            seen.push(sub.clone());
            let mut full = vec![false; order];
            for (e, &c) in coset_of.iter().enumerate() {
                full[e] = mask[c];
            }
            maximal.push(Subgroup::from_mask(full, Vec::new()));
        }
    }
    maximal
}

/// Maximal subgroups of a p-group (index p). Errors for non-prime-power
/// orders; the general maximal-subgroup problem is out of scope.
pub fn maximal_subgroups(g: &Group) -> Result<Vec<Subgroup>> {
    let order = g.order() as u64;
    let mut q = 0;
    for d in 2..=order {
        if order.is_multiple_of(d) {
            q = d;
            break;
        }
    }
    let mut m = order;
    while m.is_multiple_of(q) {
        m /= q;
    }
    if m != 1 {
        return Err(Error::InvalidSpec(format!(
            "maximal subgroups are computed only for p-groups; |G| = {order} is not a prime power"
        )));
    }
    Ok(maximal_proper_normal_subgroups(g))
}

/// Frattini subgroup: intersection of the maximal subgroups.
pub fn frattini(g: &Group) -> Result<Subgroup> {
    let maximal = maximal_subgroups(g)?;
    let mut mask = vec![true; g.order()];
    for sub in &maximal {
        for (i, m) in mask.iter_mut().enumerate() {
            *m = *m && sub.contains(i);
        }
    }
    Ok(Subgroup::from_mask(mask, Vec::new()))
}

/// Independent oracle: a dense multiplication table verified against the
/// group axioms on construction.
#[derive(Debug, Clone)]
pub struct TableGroup {
    order: usize,
    table: Vec<u32>,
    inverse: Vec<u32>,
    identity: usize,
}

/// Triple count for randomized associativity checks above the exhaustive cut.
const ASSOC_SAMPLES: usize = 100_000;
const EXHAUSTIVE_ORDER: usize = 64;

impl TableGroup {
    pub fn from_group(g: &Group) -> Result<TableGroup> {
        let order = g.order();
        let mut table = vec![0u32; order * order];
        for x in 0..order {
            for y in 0..order {
                table[x * order + y] = g.mul_idx(x, y) as u32;
            }
        }
        let identity = g.index(g.identity());
        TableGroup::from_table(order, table, identity)
    }

    /// Builds from a raw table and verifies identity, inverse and
    /// associativity laws (exhaustive for order <= 64, seeded sampling above).
    pub fn from_table(order: usize, table: Vec<u32>, identity: usize) -> Result<TableGroup> {
        assert_eq!(table.len(), order * order);
        let mul = |x: usize, y: usize| table[x * order + y] as usize;
        for x in 0..order {
            if mul(x, identity) != x || mul(identity, x) != x {
                return Err(Error::InvalidSpec(format!("identity law fails at index {x}")));
            }
        }
        let mut inverse = vec![u32::MAX; order];
        for (x, slot) in inverse.iter_mut().enumerate() {
            match (0..order).find(|&y| mul(x, y) == identity && mul(y, x) == identity) {
                Some(y) => *slot = y as u32,
                None => return Err(Error::InvalidSpec(format!("no inverse for index {x}"))),
            }
        }
        let check = |x: usize, y: usize, z: usize| mul(mul(x, y), z) == mul(x, mul(y, z));
        if order <= EXHAUSTIVE_ORDER {
            for x in 0..order {
                for y in 0..order {
                    for z in 0..order {
                        if !check(x, y, z) {
                            return Err(Error::InvalidSpec(format!(
                                "associativity fails at ({x}, {y}, {z})"
                            )));
                        }
                    }
                }
            }
        } else {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x7ab1e);
            for _ in 0..ASSOC_SAMPLES {
                let (x, y, z) = (
                    rng.gen_range(0..order),
                    rng.gen_range(0..order),
                    rng.gen_range(0..order),
                );
                if !check(x, y, z) {
                    return Err(Error::InvalidSpec(format!(
                        "associativity fails at ({x}, {y}, {z})"
                    )));
                }
            }
        }
        Ok(TableGroup { order, table, inverse, identity })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.order + y] as usize
    }

    pub fn inv(&self, x: usize) -> usize {
        self.inverse[x] as usize
    }

    pub fn order_of(&self, x: usize) -> u64 {
        let mut acc = x;
        let mut k = 1;
        while acc != self.identity {
            acc = self.mul(acc, x);
            k += 1;
        }
        k
    }

    pub fn center_indices(&self) -> Vec<usize> {
        (0..self.order)
            .filter(|&x| (0..self.order).all(|y| self.mul(x, y) == self.mul(y, x)))
            .collect()
    }

    pub fn conjugacy_class_sizes(&self) -> Vec<usize> {
        let mut class_of = vec![usize::MAX; self.order];
        let mut sizes = Vec::new();
        for x in 0..self.order {
            if class_of[x] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut count = 0;
            for h in 0..self.order {
                let c = self.mul(self.mul(self.inv(h), x), h);
                if class_of[c] == usize::MAX {
                    class_of[c] = id;
                    count += 1;
                }
            }
            sizes.push(count);
        }
        sizes.sort_unstable();
        sizes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_match_spec() {
        let g = Group::build(GroupSpec::semidihedral(4)).unwrap();
        assert_eq!(g.order(), 16);
        let g = Group::build(GroupSpec::quaternion(3)).unwrap();
        assert_eq!(g.order(), 8);
        let g = Group::build(GroupSpec::dihedral(3)).unwrap();
        assert_eq!(g.order(), 6);
        let g = Group::build(GroupSpec::modular(3, 3)).unwrap();
        assert_eq!(g.order(), 27);
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(matches!(
            Group::build(GroupSpec::modular(2, 3)),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            Group::build(GroupSpec::semidihedral(3)),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            Group::build(GroupSpec::modular(4, 4)),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            Group::build_with_cap(GroupSpec::modular(2, 20), 1 << 16),
            Err(Error::OrderCapExceeded { .. })
        ));
    }

    #[test]
    fn semidihedral_word_products() {
        // a b * a^3 b = a^{1 - 3 + 4*3} = a^2 in SD_4.
        let g = Group::build(GroupSpec::semidihedral(4)).unwrap();
        let x = g.element(1, 1);
        let y = g.element(3, 1);
        assert_eq!(g.multiply(x, y), g.element(2, 0));
    }

    #[test]
    fn quaternion_word_products() {
        // ab * a^3 b = a^{1-3+4} = a^2 in Q_4.
        let g = Group::build(GroupSpec::quaternion(4)).unwrap();
        assert_eq!(g.multiply(g.element(1, 1), g.element(3, 1)), g.element(2, 0));
        // b^2 = a^{2^{n-2}}, b^4 = 1.
        let b = g.gen_b();
        assert_eq!(g.multiply(b, b), g.element(4, 0));
        assert_eq!(g.power(b, 4), g.identity());
        assert_eq!(g.order_of(b), 4);
    }

    #[test]
    fn identity_laws() {
        for spec in [
            GroupSpec::dihedral(5),
            GroupSpec::semidihedral(4),
            GroupSpec::quaternion(3),
            GroupSpec::modular(3, 3),
        ] {
            let g = Group::build(spec).unwrap();
            for x in g.elements() {
                assert_eq!(g.multiply(x, g.identity()), x);
                assert_eq!(g.multiply(g.identity(), x), x);
                assert_eq!(g.multiply(x, g.inverse(x)), g.identity());
            }
        }
    }

    #[test]
    fn modular_inverse_matches_closed_form() {
        // (ab)^{-1} = z^{-1} a^{-1} b^{-1} = a^5 b^2 in M_3(3).
        let g = Group::build(GroupSpec::modular(3, 3)).unwrap();
        assert_eq!(g.inverse(g.element(1, 1)), g.element(5, 2));
    }

    #[test]
    fn semidihedral_inverse_parity() {
        // (a^m b)^{-1} = a^{m'} b with m' of the same parity as m.
        let g = Group::build(GroupSpec::semidihedral(4)).unwrap();
        for m in 0..8 {
            let inv = g.inverse(g.element(m, 1));
            assert_eq!(inv.j, 1);
            assert_eq!(inv.i % 2, m as u64 % 2);
        }
    }

    #[test]
    fn power_and_order() {
        let g = Group::build(GroupSpec::modular(2, 4)).unwrap();
        // (ab)^2 = a^2 b^2 z^{-1} = a^6 and ab has order 8.
        assert_eq!(g.power(g.element(1, 1), 2), g.element(6, 0));
        assert_eq!(g.order_of(g.element(1, 1)), 8);
        let g = Group::build(GroupSpec::modular(3, 3)).unwrap();
        assert_eq!(g.power(g.element(1, 1), 3), g.element(3, 0));
        for x in g.elements() {
            assert_eq!(g.power(x, 0), g.identity());
            assert!(27 % g.order_of(x) as usize == 0);
        }
    }

    #[test]
    fn conjugation_relations() {
        let g = Group::build(GroupSpec::modular(3, 3)).unwrap();
        let z = g.central_z().unwrap();
        assert_eq!(g.conjugate(g.gen_a(), g.gen_b()), g.multiply(z, g.gen_a()));
        let g = Group::build(GroupSpec::quaternion(4)).unwrap();
        for m in 0..8 {
            assert_eq!(g.conjugate(g.element(m, 0), g.gen_b()), g.element(-m, 0));
        }
        let g = Group::build(GroupSpec::semidihedral(5)).unwrap();
        for x in g.elements() {
            assert_eq!(g.conjugate(x, g.identity()), x);
        }
    }

    #[test]
    fn subgroups_and_closures() {
        let g = Group::build(GroupSpec::semidihedral(4)).unwrap();
        let h = subgroup_generated(&g, &[g.element(2, 0), g.gen_b()]);
        assert_eq!(h.order(), 8);
        assert_eq!(subgroup_generated(&g, &[]).order(), 1);

        let g3 = Group::build(GroupSpec::modular(3, 3)).unwrap();
        assert_eq!(subgroup_generated(&g3, &[g3.element(3, 0)]).order(), 3);

        // <<b>> = <a^2><b> of order 8, proper.
        let nc = normal_closure(&g, &[g.gen_b()]);
        assert_eq!(nc.order(), 8);
        assert!(nc.is_normal(&g));
        assert!(!nc.is_whole_group(&g));
        assert_eq!(normal_closure(&g, &[g.identity()]).order(), 1);

        let g5 = Group::build(GroupSpec::semidihedral(5)).unwrap();
        let nc = normal_closure(&g5, &[g5.gen_a(), g5.gen_b()]);
        assert!(nc.is_whole_group(&g5));
    }

    #[test]
    fn center_and_frattini() {
        let g = Group::build(GroupSpec::modular(3, 3)).unwrap();
        let c = center(&g);
        let members: Vec<Element> = c.members().iter().map(|&i| g.at(i)).collect();
        assert_eq!(members, vec![g.identity(), g.element(3, 0), g.element(6, 0)]);

        let g = Group::build(GroupSpec::modular(2, 4)).unwrap();
        let f = frattini(&g).unwrap();
        let c = center(&g);
        assert_eq!(f.members(), c.members());
        assert_eq!(f.order(), 4);
    }

    #[test]
    fn maximal_subgroups_of_sd4() {
        let g = Group::build(GroupSpec::semidihedral(4)).unwrap();
        let maximal = maximal_subgroups(&g).unwrap();
        assert_eq!(maximal.len(), 3);
        for m in &maximal {
            assert_eq!(m.order(), 8);
            assert!(m.is_normal(&g));
        }
        // <a>, <a^2><b>, <a^2><ab> all appear.
        for gens in [
            vec![g.gen_a()],
            vec![g.element(2, 0), g.gen_b()],
            vec![g.element(2, 0), g.element(1, 1)],
        ] {
            let h = subgroup_generated(&g, &gens);
            assert!(maximal.iter().any(|m| m.members() == h.members()));
        }
    }

    #[test]
    fn maximal_subgroups_require_prime_power() {
        let g = Group::build(GroupSpec::dihedral(6)).unwrap();
        assert!(maximal_subgroups(&g).is_err());
    }

    #[test]
    fn table_group_oracle() {
        let g = Group::build(GroupSpec::quaternion(3)).unwrap();
        let t = TableGroup::from_group(&g).unwrap();
        assert_eq!(t.order(), 8);
        for x in 0..8 {
            assert_eq!(t.inv(x), g.index(g.inverse(g.at(x))));
        }
        // D_6 is S_3: class sizes {1, 2, 3}.
        let d6 = Group::build(GroupSpec::dihedral(3)).unwrap();
        let t = TableGroup::from_group(&d6).unwrap();
        assert_eq!(t.conjugacy_class_sizes(), vec![1, 2, 3]);
    }

    #[test]
    fn table_group_rejects_broken_tables() {
        // Z/4 with one corrupted entry.
        let order = 4;
        let mut table: Vec<u32> = (0..order * order)
            .map(|k| ((k / order + k % order) % order) as u32)
            .collect();
        table[2 * order + 2] = 1;
        assert!(TableGroup::from_table(order, table, 0).is_err());
    }

    #[test]
    fn semidihedral_twist_power_remark() {
        // (a^{-1+2^{n-2}})^m = a^{-m} (m even) or a^{-m+2^{n-2}} (m odd).
        for n in 4..=6 {
            let g = Group::build(GroupSpec::semidihedral(n)).unwrap();
            let t = g.element(-1 + (1 << (n - 2)), 0);
            let half = 1i64 << (n - 2);
            for m in 0..(1i64 << (n - 1)) {
                let lhs = g.power(t, m);
                let rhs = if m % 2 == 0 {
                    g.element(-m, 0)
                } else {
                    g.element(-m + half, 0)
                };
                assert_eq!(lhs, rhs);
            }
        }
    }
}
