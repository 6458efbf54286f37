//! Closed-form counterparts of everything the norm engine computes by brute
//! force: predicted diameters, per-family conjugacy-class formulas, the
//! modular power identity, standard-generator-pair recovery, norm bounds,
//! and the X₁/X₂ product-decomposition check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{subgroup_generated, Element, Family, Group, GroupSpec};

/// The theorem value of Δ(G) for each family.
pub fn predicted_delta(spec: &GroupSpec) -> Result<u32> {
    spec.validate()?;
    let value: u128 = match spec.family {
        Family::Semidihedral => {
            if spec.n == 4 {
                2
            } else {
                3
            }
        }
        Family::Quaternion => {
            if spec.n == 3 {
                2
            } else {
                3
            }
        }
        Family::Modular => {
            let pn2 = (spec.p as u128).pow(spec.n - 2);
            if spec.p == 2 {
                pn2 / 2 + 1
            } else {
                (pn2 + spec.p as u128 - 2) / 2
            }
        }
        Family::Dihedral => {
            if spec.n % 2 == 1 || spec.n == 4 {
                2
            } else {
                3
            }
        }
    };
    u32::try_from(value)
        .map_err(|_| Error::InvalidSpec(format!("predicted diameter {value} overflows u32")))
}

fn sorted_dedup(g: &Group, mut v: Vec<Element>) -> Vec<Element> {
    v.sort_by_key(|&e| g.index(e));
    v.dedup();
    v
}

/// Conjugacy class of `e` in SD_n by the closed form: a-powers pair up with
/// their twist image; off-torus elements split into the two b-coset parity
/// classes.
pub fn sd_class_of(n: u32, e: Element) -> Result<Vec<Element>> {
    let spec = GroupSpec::semidihedral(n);
    let g = Group::build(spec)?;
    let e = g.element(e.i as i64, e.j as i64);
    let class = if e.j == 0 {
        let twist = g.element(-1 + (1i64 << (n - 2)), 0);
        vec![e, g.power(twist, e.i as i64)]
    } else {
        (0..g.ord_a())
            .filter(|r| r % 2 == e.i % 2)
            .map(|r| Element { i: r, j: 1 })
            .collect()
    };
    Ok(sorted_dedup(&g, class))
}

/// Conjugacy class of `e` in Q_n: {a^m, a^{-m}} on the torus, parity cosets
/// off it.
pub fn q_class_of(n: u32, e: Element) -> Result<Vec<Element>> {
    let spec = GroupSpec::quaternion(n);
    let g = Group::build(spec)?;
    let e = g.element(e.i as i64, e.j as i64);
    let class = if e.j == 0 {
        vec![e, g.element(-(e.i as i64), 0)]
    } else {
        (0..g.ord_a())
            .filter(|r| r % 2 == e.i % 2)
            .map(|r| Element { i: r, j: 1 })
            .collect()
    };
    Ok(sorted_dedup(&g, class))
}

/// Conjugacy class of `e` in M_n(p): central elements are singletons, every
/// other class is the ⟨z⟩-coset {z^r e | 0 ≤ r < p}.
pub fn mnp_class_of(p: u64, n: u32, e: Element) -> Result<Vec<Element>> {
    let spec = GroupSpec::modular(p, n);
    let g = Group::build(spec)?;
    let e = g.element(e.i as i64, e.j as i64);
    if e.j == 0 && e.i % p == 0 {
        return Ok(vec![e]);
    }
    let z = g.central_z().expect("modular");
    let class = (0..p)
        .map(|r| g.multiply(g.power(z, r as i64), e))
        .collect();
    Ok(sorted_dedup(&g, class))
}

/// (a^ℓ b^j)^k = a^{kℓ} b^{kj} z^{-k(k-1)/2 · jℓ} in M_n(p), evaluated as a
/// closed form. Exponents are reduced before use.
pub fn mnp_power(p: u64, n: u32, ell: i64, j: i64, k: u64) -> Result<Element> {
    let spec = GroupSpec::modular(p, n);
    spec.validate()?;
    let ord_a = (p as i128).pow(n - 1);
    let pn2 = (p as i128).pow(n - 2);
    let pi = p as i128;
    let ell = (ell as i128).rem_euclid(ord_a);
    let j = (j as i128).rem_euclid(pi);
    let k = k as i128;
    // z-exponent only matters mod p; k(k-1)/2 is an exact integer.
    let half = (k * (k - 1) / 2).rem_euclid(pi);
    let zexp = (half * j % pi * (ell % pi)).rem_euclid(pi);
    let i = (k * ell - zexp * pn2).rem_euclid(ord_a);
    Ok(Element { i: i as u64, j: (k * j).rem_euclid(pi) as u64 })
}

/// A pair (x, y) satisfying the family's defining relations, with the
/// verified certificate data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorPair {
    pub x: Element,
    pub y: Element,
    pub ord_x: u64,
    pub ord_y: u64,
    /// Exponent t with y^{-1} x y = x^t.
    pub relation_exponent: u64,
}

impl GeneratorPair {
    /// Re-checks every relation of the certificate against group arithmetic.
    pub fn verify(&self, g: &Group) -> bool {
        if g.order_of(self.x) != self.ord_x || g.order_of(self.y) != self.ord_y {
            return false;
        }
        if self.ord_x != g.ord_a() || self.relation_exponent != g.action_exponent() {
            return false;
        }
        if g.conjugate(self.x, self.y) != g.power(self.x, self.relation_exponent as i64) {
            return false;
        }
        if g.spec().family == Family::Quaternion {
            let n = g.spec().n;
            if g.multiply(self.y, self.y) != g.power(self.x, 1i64 << (n - 2)) {
                return false;
            }
        }
        // ⟨x⟩ is maximal, so y outside it forces ⟨x, y⟩ = G.
        !subgroup_generated(g, &[self.x]).contains(g.index(self.y))
    }
}

fn expected_ord_y(g: &Group) -> u64 {
    match g.spec().family {
        Family::Quaternion => 4,
        Family::Modular => g.spec().p,
        _ => 2,
    }
}

/// Completes a maximal-order element x to a standard generator pair by
/// exhaustive search over the complement of ⟨x⟩.
pub fn find_standard_pair_with(g: &Group, x: Element) -> Result<GeneratorPair> {
    if g.order_of(x) != g.ord_a() {
        return Err(Error::NotFound(format!(
            "element {} does not have maximal order {}",
            g.format_element(x),
            g.ord_a()
        )));
    }
    let torus = subgroup_generated(g, &[x]);
    let t = g.action_exponent();
    let want_y = expected_ord_y(g);
    for idx in 0..g.order() {
        if torus.contains(idx) {
            continue;
        }
        let y = g.at(idx);
        let pair = GeneratorPair {
            x,
            y,
            ord_x: g.ord_a(),
            ord_y: want_y,
            relation_exponent: t,
        };
        if pair.verify(g) {
            return Ok(pair);
        }
    }
    Err(Error::NotFound(format!(
        "no standard-pair completion for {}",
        g.format_element(x)
    )))
}

/// Recovers a standard generator pair, starting from the least-index element
/// of maximal order.
pub fn find_standard_pair(g: &Group) -> Result<GeneratorPair> {
    for idx in 0..g.order() {
        let x = g.at(idx);
        if g.order_of(x) == g.ord_a() {
            return find_standard_pair_with(g, x);
        }
    }
    Err(Error::NotFound("no element of maximal order".to_string()))
}

/// Upper bound on ‖g‖_{{a, a^ℓ b^j}} in M_n(p), split by whether g lies in
/// the cyclic maximal subgroup ⟨a⟩.
pub fn mnp_norm_bound(p: u64, n: u32, on_torus: bool) -> Result<u32> {
    GroupSpec::modular(p, n).validate()?;
    let pn2 = (p as u128).pow(n - 2);
    let value: u128 = if (p, n) == (3, 3) {
        2
    } else if p == 2 {
        pn2 / 2 + if on_torus { 0 } else { 1 }
    } else if on_torus {
        (pn2 - 1) / 2
    } else {
        (pn2 + p as u128 - 2) / 2
    };
    u32::try_from(value)
        .map_err(|_| Error::InvalidSpec(format!("norm bound {value} overflows u32")))
}

/// Outcome of the product-decomposition check for one factor sequence over
/// X₁ = ⟨z⟩·{a, a^{-1}} and X₂ = ⟨z⟩·{b, b^{-1}}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionWitness {
    pub factors: Vec<Element>,
    /// Number of X₁ factors.
    pub s: u64,
    /// Number of X₂ factors.
    pub t: u64,
    pub r: u64,
    pub s0: i64,
    pub t0: i64,
    pub product: Element,
}

impl DecompositionWitness {
    pub fn bounds_hold(&self) -> bool {
        self.s0.unsigned_abs() <= self.s && self.t0.unsigned_abs() <= self.t
    }
}

/// Smallest-magnitude representative of `x` mod `m` (ties go positive).
fn centered(x: u64, m: u64) -> i64 {
    let x = x % m;
    if 2 * x <= m {
        x as i64
    } else {
        x as i64 - m as i64
    }
}

/// Multiplies out a factor sequence over X₁ ∪ X₂ and extracts the
/// z^r a^{s0} b^{t0} normal form with the centered (smallest-magnitude)
/// exponents; if any valid (r, s₀, t₀) meets the lemma's bounds, the
/// centered one does.
pub fn decompose_check(g: &Group, factors: &[Element]) -> Result<DecompositionWitness> {
    if g.spec().family != Family::Modular {
        return Err(Error::InvalidSpec(
            "decomposition is defined for modular groups only".to_string(),
        ));
    }
    let p = g.spec().p;
    let n = g.spec().n;
    let pn2 = p.pow(n - 2);
    let mut s = 0;
    let mut t = 0;
    let mut product = g.identity();
    for &f in factors {
        let f = g.element(f.i as i64, f.j as i64);
        let res = f.i % pn2;
        if f.j == 0 && (res == 1 || res == pn2 - 1) {
            s += 1;
        } else if f.j != 0 && (f.j == 1 || f.j == p - 1) && res == 0 {
            t += 1;
        } else {
            return Err(Error::FactorNotInX(g.format_element(f)));
        }
        product = g.multiply(product, f);
    }
    let s0 = centered(product.i, pn2);
    let t0 = centered(product.j, p);
    let r = ((product.i as i64 - s0).rem_euclid(g.ord_a() as i64) as u64 / pn2) % p;
    // Sanity: the extracted triple reproduces the product.
    let z = g.central_z().expect("modular");
    let rebuilt = g.multiply(
        g.multiply(g.power(z, r as i64), g.element(s0, 0)),
        g.element(0, t0),
    );
    debug_assert_eq!(rebuilt, product);
    Ok(DecompositionWitness { factors: factors.to_vec(), s, t, r, s0, t0, product })
}

/// The two-element sets S₁, S₂, S₃ used in the semidihedral and quaternion
/// case analyses, parameterized by one even and two odd a-exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureParams {
    /// Even exponent v₁.
    pub v1: u64,
    /// Odd exponent ô₁.
    pub o1: u64,
    /// Odd exponent ô₂.
    pub o2: u64,
}

impl Default for FixtureParams {
    fn default() -> Self {
        FixtureParams { v1: 0, o1: 1, o2: 1 }
    }
}

/// S₁ = {a^{v₁} b, a^{ô₁}}, S₂ = {a^{ô₂} b, a^{ô₁}}, S₃ = {a^{ô₂} b, a^{v₁} b}.
pub fn fixture_set(g: &Group, which: u8, params: FixtureParams) -> Result<Vec<Element>> {
    let family = g.spec().family;
    if family != Family::Semidihedral && family != Family::Quaternion {
        return Err(Error::InvalidSpec(format!(
            "fixture sets are defined for semidihedral and quaternion groups, not {family}"
        )));
    }
    let FixtureParams { v1, o1, o2 } = params;
    if v1 % 2 != 0 || v1 >= g.ord_a() {
        return Err(Error::InvalidSpec(format!("v1 = {v1} must be even and < {}", g.ord_a())));
    }
    for o in [o1, o2] {
        if o % 2 != 1 || o == 0 || o >= g.ord_a() {
            return Err(Error::InvalidSpec(format!(
                "odd parameter {o} must lie in (0, {})",
                g.ord_a()
            )));
        }
    }
    let e = |i: u64, j: u64| Element { i, j };
    match which {
        1 => Ok(vec![e(v1, 1), e(o1, 0)]),
        2 => Ok(vec![e(o2, 1), e(o1, 0)]),
        3 => Ok(vec![e(o2, 1), e(v1, 1)]),
        _ => Err(Error::InvalidSpec(format!("fixture index {which} must be 1, 2 or 3"))),
    }
}

/// The case-table value of ‖G‖_{S_j} for the fixture sets.
pub fn fixture_expected_norm(spec: &GroupSpec, which: u8) -> Result<u32> {
    spec.validate()?;
    let small = match spec.family {
        Family::Semidihedral => spec.n == 4,
        Family::Quaternion => spec.n == 3,
        _ => {
            return Err(Error::InvalidSpec(format!(
                "fixture norms are defined for semidihedral and quaternion groups, not {}",
                spec.family
            )))
        }
    };
    match which {
        1 | 2 => Ok(if small { 2 } else { 3 }),
        3 => Ok(2),
        _ => Err(Error::InvalidSpec(format!("fixture index {which} must be 1, 2 or 3"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::TableGroup;
    use crate::norm;

    #[test]
    fn predicted_values() {
        assert_eq!(predicted_delta(&GroupSpec::modular(2, 5)).unwrap(), 5);
        assert_eq!(predicted_delta(&GroupSpec::modular(3, 3)).unwrap(), 2);
        assert_eq!(predicted_delta(&GroupSpec::dihedral(4)).unwrap(), 2);
        assert_eq!(predicted_delta(&GroupSpec::dihedral(6)).unwrap(), 3);
        assert_eq!(predicted_delta(&GroupSpec::semidihedral(4)).unwrap(), 2);
        assert_eq!(predicted_delta(&GroupSpec::semidihedral(7)).unwrap(), 3);
        assert_eq!(predicted_delta(&GroupSpec::quaternion(3)).unwrap(), 2);
        assert_eq!(predicted_delta(&GroupSpec::modular(7, 3)).unwrap(), 6);
        assert!(predicted_delta(&GroupSpec::modular(6, 3)).is_err());
    }

    #[test]
    fn sd_classes() {
        let g = Group::build(GroupSpec::semidihedral(4)).unwrap();
        let class = sd_class_of(4, g.element(2, 1)).unwrap();
        let want: Vec<Element> = [0, 2, 4, 6].iter().map(|&m| g.element(m, 1)).collect();
        assert_eq!(class, want);
        assert_eq!(sd_class_of(4, g.identity()).unwrap(), vec![g.identity()]);
        assert_eq!(
            sd_class_of(4, g.element(2, 0)).unwrap(),
            vec![g.element(2, 0), g.element(6, 0)]
        );
    }

    #[test]
    fn q_classes() {
        let g = Group::build(GroupSpec::quaternion(3)).unwrap();
        assert_eq!(
            q_class_of(3, g.gen_a()).unwrap(),
            vec![g.element(1, 0), g.element(3, 0)]
        );
        assert_eq!(q_class_of(3, g.identity()).unwrap(), vec![g.identity()]);
        let g = Group::build(GroupSpec::quaternion(4)).unwrap();
        let class = q_class_of(4, g.element(1, 1)).unwrap();
        let want: Vec<Element> = [1, 3, 5, 7].iter().map(|&m| g.element(m, 1)).collect();
        assert_eq!(class, want);
    }

    #[test]
    fn mnp_classes() {
        let g = Group::build(GroupSpec::modular(3, 3)).unwrap();
        let class = mnp_class_of(3, 3, g.element(1, 1)).unwrap();
        let want: Vec<Element> = [1, 4, 7].iter().map(|&m| g.element(m, 1)).collect();
        assert_eq!(class, want);
        let z = g.central_z().unwrap();
        assert_eq!(mnp_class_of(3, 3, z).unwrap(), vec![z]);
        let g = Group::build(GroupSpec::modular(2, 4)).unwrap();
        assert_eq!(
            mnp_class_of(2, 4, g.element(-1, 0)).unwrap(),
            vec![g.element(3, 0), g.element(7, 0)]
        );
    }

    #[test]
    fn classes_match_orbits() {
        for (p, n) in [(2u64, 4u32), (3, 3), (5, 3)] {
            let g = Group::build(GroupSpec::modular(p, n)).unwrap();
            for e in g.elements() {
                let formula = mnp_class_of(p, n, e).unwrap();
                let orbit: Vec<Element> =
                    g.conj_orbit(e).into_iter().map(|i| g.at(i)).collect();
                assert_eq!(formula, orbit, "class of {} in M_{n}({p})", g.format_element(e));
            }
        }
    }

    #[test]
    fn power_formula_matches_iteration() {
        for (p, n) in [(2u64, 4u32), (3, 3)] {
            let g = Group::build(GroupSpec::modular(p, n)).unwrap();
            for ell in 0..g.ord_a() {
                for j in 0..p {
                    let x = Element { i: ell, j };
                    for k in 0..=(p * p) {
                        let closed = mnp_power(p, n, ell as i64, j as i64, k).unwrap();
                        assert_eq!(closed, g.power(x, k as i64));
                    }
                }
            }
        }
    }

    #[test]
    fn standard_pairs() {
        let g = Group::build(GroupSpec::modular(3, 3)).unwrap();
        let pair = find_standard_pair_with(&g, g.gen_a()).unwrap();
        assert_eq!(pair.x, g.gen_a());
        assert!(pair.verify(&g));

        let g = Group::build(GroupSpec::modular(2, 4)).unwrap();
        let pair = find_standard_pair_with(&g, g.element(1, 1)).unwrap();
        assert!(pair.verify(&g));
        assert_eq!(g.order_of(g.element(1, 1)), 8);

        let g = Group::build(GroupSpec::modular(5, 3)).unwrap();
        let x = g.element(2, 1);
        assert_eq!(g.order_of(x), 25);
        assert!(find_standard_pair_with(&g, x).unwrap().verify(&g));

        // Low-order starting element is rejected.
        let z = g.central_z().unwrap();
        assert!(matches!(find_standard_pair_with(&g, z), Err(Error::NotFound(_))));

        for spec in [
            GroupSpec::semidihedral(4),
            GroupSpec::quaternion(3),
            GroupSpec::dihedral(5),
        ] {
            let g = Group::build(spec).unwrap();
            assert!(find_standard_pair(&g).unwrap().verify(&g));
        }
    }

    #[test]
    fn norm_bounds() {
        assert_eq!(mnp_norm_bound(2, 5, true).unwrap(), 4);
        assert_eq!(mnp_norm_bound(2, 5, false).unwrap(), 5);
        assert_eq!(mnp_norm_bound(3, 3, true).unwrap(), 2);
        assert_eq!(mnp_norm_bound(3, 3, false).unwrap(), 2);
        assert_eq!(mnp_norm_bound(5, 3, false).unwrap(), 4);
        assert_eq!(mnp_norm_bound(5, 3, true).unwrap(), 2);
    }

    #[test]
    fn decomposition_examples() {
        let g = Group::build(GroupSpec::modular(2, 4)).unwrap();
        let w = decompose_check(&g, &[]).unwrap();
        assert_eq!((w.r, w.s0, w.t0), (0, 0, 0));

        let z = g.central_z().unwrap();
        let zb = g.multiply(z, g.gen_b());
        let w = decompose_check(&g, &[g.gen_a(), zb]).unwrap();
        assert_eq!((w.s, w.t, w.s0, w.t0), (1, 1, 1, 1));
        assert!(w.bounds_hold());

        let g = Group::build(GroupSpec::modular(3, 3)).unwrap();
        let ainv = g.inverse(g.gen_a());
        let w = decompose_check(&g, &[ainv, ainv, g.gen_b()]).unwrap();
        // -2 and the centered representative 1 agree mod p^{n-2} = 3.
        assert_eq!(w.s0.rem_euclid(3), (-2i64).rem_euclid(3));
        assert!(w.s0.unsigned_abs() <= 2);
        assert!(w.bounds_hold());

        // a^2 = z a^{-1} lies in X1, but ab is outside X1 ∪ X2.
        assert!(decompose_check(&g, &[g.element(2, 0)]).is_ok());
        assert!(matches!(
            decompose_check(&g, &[g.element(1, 1)]),
            Err(Error::FactorNotInX(_))
        ));
    }

    #[test]
    fn fixtures() {
        let g = Group::build(GroupSpec::semidihedral(4)).unwrap();
        let params = FixtureParams::default();
        let s1 = fixture_set(&g, 1, params).unwrap();
        assert_eq!(s1, vec![g.gen_b(), g.gen_a()]);
        assert_eq!(fixture_expected_norm(g.spec(), 1).unwrap(), 2);
        assert_eq!(
            norm::group_norm(&g, &s1).unwrap(),
            fixture_expected_norm(g.spec(), 1).unwrap()
        );
        let spec5 = GroupSpec::semidihedral(5);
        assert_eq!(fixture_expected_norm(&spec5, 2).unwrap(), 3);
        assert_eq!(fixture_expected_norm(&spec5, 3).unwrap(), 2);
        assert!(fixture_set(&g, 4, params).is_err());
        assert!(fixture_set(&g, 1, FixtureParams { v1: 1, o1: 1, o2: 1 }).is_err());
        let d = Group::build(GroupSpec::dihedral(5)).unwrap();
        assert!(fixture_set(&d, 1, params).is_err());
    }

    #[test]
    fn mnp_power_against_table_oracle() {
        let g = Group::build(GroupSpec::modular(2, 4)).unwrap();
        let t = TableGroup::from_group(&g).unwrap();
        let ab = g.index(g.element(1, 1));
        assert_eq!(
            g.index(mnp_power(2, 4, 1, 1, 2).unwrap()),
            t.mul(ab, ab)
        );
        let g3 = Group::build(GroupSpec::modular(3, 3)).unwrap();
        let t3 = TableGroup::from_group(&g3).unwrap();
        let ab3 = g3.index(g3.element(1, 1));
        assert_eq!(
            g3.index(mnp_power(3, 3, 1, 1, 3).unwrap()),
            t3.mul(t3.mul(ab3, ab3), ab3)
        );
    }
}
