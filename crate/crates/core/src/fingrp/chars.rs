//! Characters (homomorphisms to the circle, stored as exact phases in Q/Z)
//! and phased basis maps u_g ↦ e^{2πiρ(g)}·u_{δ(g)} on group algebras.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_rational::Ratio;

use super::{
    conjugacy_data, generated_subgroup, quotient_by_normal, same_group, FinGrpError, FiniteGroup,
    Homomorphism,
};

/// Phase in [0, 1): q stands for the root of unity e^{2πiq}.
pub type Phase = Ratio<i64>;

fn mod1(r: Phase) -> Phase {
    r - r.floor()
}

/// A homomorphism to the circle group, as exact phase exponents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Character {
    values: Vec<Phase>,
}

impl Character {
    /// Verifies χ(xy) = χ(x)+χ(y) mod 1 on every pair.
    pub fn new(g: &FiniteGroup, values: Vec<Phase>) -> Result<Character, FinGrpError> {
        if values.len() != g.order() {
            return Err(FinGrpError::OutOfRange(
                values.len() as u32,
                g.order(),
            ));
        }
        let values: Vec<Phase> = values.into_iter().map(mod1).collect();
        for a in 0..g.order() as u32 {
            for b in 0..g.order() as u32 {
                let lhs = values[g.mul(a, b) as usize];
                let rhs = mod1(values[a as usize] + values[b as usize]);
                if lhs != rhs {
                    return Err(FinGrpError::NotAHomomorphism(a, b));
                }
            }
        }
        Ok(Character { values })
    }

    pub fn trivial(g: &FiniteGroup) -> Character {
        Character {
            values: vec![Phase::new(0, 1); g.order()],
        }
    }

    #[inline]
    pub fn value(&self, x: u32) -> Phase {
        self.values[x as usize]
    }

    pub fn values(&self) -> &[Phase] {
        &self.values
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|v| *v == Phase::new(0, 1))
    }
}

/// All characters of G, via the abelianization G/[G,G]; exactly |G^{ab}|
/// maps, sorted by value vector.
pub fn characters(g: &Arc<FiniteGroup>) -> Vec<Character> {
    let mut comms = BTreeSet::new();
    for x in 0..g.order() as u32 {
        for y in 0..g.order() as u32 {
            comms.insert(g.mul(g.mul(x, y), g.mul(g.inv_of(x), g.inv_of(y))));
        }
    }
    // the set of commutators is conjugation-closed, so this subgroup is normal
    let derived = generated_subgroup(g, &comms.into_iter().collect::<Vec<_>>());
    let (q, proj) = quotient_by_normal(g, &derived).expect("derived subgroup is normal");

    // grow a subgroup chain of the abelian quotient, extending characters at
    // each step; e has relative order m, so χ(e) ranges over the m lifts of
    // χ(e^m)/m
    let qn = q.order();
    let mut in_sub = vec![false; qn];
    in_sub[0] = true;
    let mut sub: Vec<u32> = vec![0];
    let mut chars: Vec<Vec<Phase>> = vec![vec![Phase::new(0, 1); qn]];
    for e in 1..qn as u32 {
        if in_sub[e as usize] {
            continue;
        }
        let mut m = 1i64;
        let mut p = e;
        while !in_sub[p as usize] {
            p = q.mul(p, e);
            m += 1;
        }
        let anchor = p; // e^m, already in the subgroup
        let mut powers = Vec::with_capacity(m as usize);
        let mut acc = 0u32;
        for _ in 0..m {
            powers.push(acc);
            acc = q.mul(acc, e);
        }
        let mut next_chars = Vec::with_capacity(chars.len() * m as usize);
        for chi in &chars {
            let base = chi[anchor as usize];
            for j in 0..m {
                let v = mod1((base + Phase::new(j, 1)) / Phase::new(m, 1));
                let mut ext = chi.clone();
                for &h in &sub {
                    for (t, &pw) in powers.iter().enumerate().skip(1) {
                        ext[q.mul(h, pw) as usize] =
                            mod1(chi[h as usize] + Phase::new(t as i64, 1) * v);
                    }
                }
                next_chars.push(ext);
            }
        }
        chars = next_chars;
        let old = sub.clone();
        for &h in &old {
            for &pw in powers.iter().skip(1) {
                let x = q.mul(h, pw);
                in_sub[x as usize] = true;
                sub.push(x);
            }
        }
    }
    debug_assert_eq!(chars.len(), qn);

    let mut out: Vec<Character> = chars
        .into_iter()
        .map(|chi| Character {
            values: (0..g.order() as u32)
                .map(|x| chi[proj.apply(x) as usize])
                .collect(),
        })
        .collect();
    out.sort();
    #[cfg(debug_assertions)]
    for c in &out {
        Character::new(g, c.values.clone()).expect("character by construction");
    }
    out
}

/// The basis map u_g ↦ e^{2πiρ(g)}·u_{δ(g)} of the group algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasedBasisMap {
    pub rho: Character,
    pub delta: Homomorphism,
}

impl PhasedBasisMap {
    pub fn new(rho: Character, delta: Homomorphism) -> Result<PhasedBasisMap, FinGrpError> {
        if !delta.is_automorphism() {
            return Err(FinGrpError::NotBijective);
        }
        if rho.values.len() != delta.source.order() {
            return Err(FinGrpError::GroupMismatch);
        }
        // re-verify the character over this group
        let rho = Character::new(&delta.source, rho.values)?;
        Ok(PhasedBasisMap { rho, delta })
    }

    pub fn identity(g: &Arc<FiniteGroup>) -> PhasedBasisMap {
        PhasedBasisMap {
            rho: Character::trivial(g),
            delta: Homomorphism::identity(g),
        }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.delta.source
    }

    /// Image of the basis vector u_g: its phase and its new index.
    pub fn apply(&self, g: u32) -> (Phase, u32) {
        (self.rho.value(g), self.delta.apply(g))
    }
}

/// Composition m₁ ∘ m₂ of basis maps: (ρ₁∘δ₂ + ρ₂, δ₁∘δ₂), checked against
/// two-step application in debug builds.
pub fn psi_compose(
    m1: &PhasedBasisMap,
    m2: &PhasedBasisMap,
) -> Result<PhasedBasisMap, FinGrpError> {
    if !same_group(m1.group(), m2.group()) {
        return Err(FinGrpError::GroupMismatch);
    }
    let values: Vec<Phase> = (0..m2.group().order() as u32)
        .map(|x| mod1(m1.rho.value(m2.delta.apply(x)) + m2.rho.value(x)))
        .collect();
    let delta = Homomorphism::compose(&m1.delta, &m2.delta)?;
    let out = PhasedBasisMap {
        rho: Character { values },
        delta,
    };
    #[cfg(debug_assertions)]
    for x in 0..m2.group().order() as u32 {
        let (p2, y) = m2.apply(x);
        let (p1, z) = m1.apply(y);
        assert_eq!(out.apply(x), (mod1(p1 + p2), z));
    }
    Ok(out)
}

/// Inner on the group algebra ⇔ the map fixes every conjugacy-class sum with
/// all phases 1, i.e. ρ is trivial and δ preserves every class.
pub fn psi_is_inner(m: &PhasedBasisMap) -> bool {
    if !m.rho.is_trivial() {
        return false;
    }
    let cd = conjugacy_data(m.group());
    (0..m.group().order()).all(|x| cd.class_of[m.delta.apply(x as u32) as usize] == cd.class_of[x])
}

#[cfg(test)]
mod tests {
    use super::super::{automorphisms, FiniteGroup};
    use super::*;

    fn arc(g: FiniteGroup) -> Arc<FiniteGroup> {
        Arc::new(g)
    }

    #[test]
    fn character_counts_match_abelianizations() {
        assert_eq!(characters(&arc(FiniteGroup::symmetric(3))).len(), 2);
        assert_eq!(characters(&arc(FiniteGroup::cyclic(6))).len(), 6);
        assert_eq!(characters(&arc(FiniteGroup::trivial())).len(), 1);
        assert_eq!(characters(&arc(FiniteGroup::dihedral(4))).len(), 4);
        assert_eq!(characters(&arc(FiniteGroup::quaternion8())).len(), 4);
        assert_eq!(characters(&arc(FiniteGroup::alternating4())).len(), 3);
    }

    #[test]
    fn characters_are_homomorphisms_and_distinct() {
        for g in [
            arc(FiniteGroup::cyclic(8)),
            arc(FiniteGroup::symmetric(3)),
            arc(FiniteGroup::quaternion8()),
            arc(FiniteGroup::klein4()),
        ] {
            let chars = characters(&g);
            for c in &chars {
                Character::new(&g, c.values().to_vec()).unwrap();
                assert_eq!(c.value(0), Phase::new(0, 1));
            }
            let set: BTreeSet<&Character> = chars.iter().collect();
            assert_eq!(set.len(), chars.len());
        }
    }

    #[test]
    fn characters_separate_points_iff_abelian() {
        let z6 = arc(FiniteGroup::cyclic(6));
        let chars = characters(&z6);
        for x in 0..6u32 {
            for y in 0..x {
                assert!(chars.iter().any(|c| c.value(x) != c.value(y)));
            }
        }
        let s3 = arc(FiniteGroup::symmetric(3));
        let chars = characters(&s3);
        // two transpositions cannot be separated
        let ts: Vec<u32> = (1..6).filter(|&x| s3.element_order(x) == 2).collect();
        assert!(chars
            .iter()
            .all(|c| c.value(ts[0]) == c.value(ts[1])));
    }

    fn sign_character(s3: &Arc<FiniteGroup>) -> Character {
        characters(s3)
            .into_iter()
            .find(|c| !c.is_trivial())
            .unwrap()
    }

    #[test]
    fn psi_inner_criterion() {
        let s3 = arc(FiniteGroup::symmetric(3));
        let t = (1..6).find(|&x| s3.element_order(x) == 2).unwrap();
        // trivial phase + inner automorphism → inner
        let inner = PhasedBasisMap::new(
            Character::trivial(&s3),
            Homomorphism::inner(&s3, t),
        )
        .unwrap();
        assert!(psi_is_inner(&inner));
        // sign character + identity → moves the transposition class sum's phase
        let signm =
            PhasedBasisMap::new(sign_character(&s3), Homomorphism::identity(&s3)).unwrap();
        assert!(!psi_is_inner(&signm));
        // trivial phase + class-swapping automorphism of Z/2 × Z/2 → not inner
        let klein = arc(FiniteGroup::klein4());
        let auts = automorphisms(&klein).unwrap();
        let id_vec: Vec<u32> = (0..4).collect();
        let swap = auts
            .maps
            .iter()
            .find(|m| m.image_vec() != id_vec)
            .unwrap();
        let m = PhasedBasisMap::new(Character::trivial(&klein), swap.clone()).unwrap();
        assert!(!psi_is_inner(&m));
    }

    #[test]
    fn psi_compose_laws() {
        let s3 = arc(FiniteGroup::symmetric(3));
        let sign = sign_character(&s3);
        let id = PhasedBasisMap::identity(&s3);
        let signm = PhasedBasisMap::new(sign.clone(), Homomorphism::identity(&s3)).unwrap();
        // identity laws
        assert_eq!(psi_compose(&signm, &id).unwrap(), signm);
        assert_eq!(psi_compose(&id, &signm).unwrap(), signm);
        // phases add when both deltas are the identity
        let twice = psi_compose(&signm, &signm).unwrap();
        assert!(twice.rho.is_trivial()); // 1/2 + 1/2 = 0 mod 1
        assert_eq!(twice.delta.image_vec(), id.delta.image_vec());
        // non-commuting inner parts keep the compositions apart
        let ts: Vec<u32> = (1..6).filter(|&x| s3.element_order(x) == 2).collect();
        let m1 = PhasedBasisMap::new(sign, Homomorphism::inner(&s3, ts[0])).unwrap();
        let m2 =
            PhasedBasisMap::new(Character::trivial(&s3), Homomorphism::inner(&s3, ts[1])).unwrap();
        let ab = psi_compose(&m1, &m2).unwrap();
        let ba = psi_compose(&m2, &m1).unwrap();
        assert_ne!(ab, ba);
        assert_ne!(ab.delta.image_vec(), ba.delta.image_vec());
    }

    #[test]
    fn psi_conjugation_realizes_character_twisting() {
        // (0,δ)(ρ,id)(0,δ⁻¹) = (ρ∘δ⁻¹, id) on every element
        let s3 = arc(FiniteGroup::symmetric(3));
        let chars = characters(&s3);
        let auts = automorphisms(&s3).unwrap();
        for rho in &chars {
            for d in &auts.maps {
                let md = PhasedBasisMap::new(Character::trivial(&s3), d.clone()).unwrap();
                let mdi =
                    PhasedBasisMap::new(Character::trivial(&s3), d.inverse().unwrap()).unwrap();
                let mr =
                    PhasedBasisMap::new(rho.clone(), Homomorphism::identity(&s3)).unwrap();
                let conj =
                    psi_compose(&psi_compose(&md, &mr).unwrap(), &mdi).unwrap();
                assert_eq!(conj.delta.image_vec(), (0..6).collect::<Vec<u32>>());
                let dinv = d.inverse().unwrap();
                for g in 0..6u32 {
                    assert_eq!(conj.rho.value(g), rho.value(dinv.apply(g)));
                }
            }
        }
    }

    #[test]
    fn psi_inner_maps_form_a_submonoid() {
        for g in [
            arc(FiniteGroup::symmetric(3)),
            arc(FiniteGroup::dihedral(4)),
            arc(FiniteGroup::quaternion8()),
        ] {
            let auts = automorphisms(&g).unwrap();
            let inner_psis: Vec<PhasedBasisMap> = auts
                .maps
                .iter()
                .enumerate()
                .filter(|(i, _)| auts.inner[*i])
                .map(|(_, d)| PhasedBasisMap::new(Character::trivial(&g), d.clone()).unwrap())
                .collect();
            for a in &inner_psis {
                assert!(psi_is_inner(a));
                for b in &inner_psis {
                    assert!(psi_is_inner(&psi_compose(a, b).unwrap()));
                }
            }
        }
    }

    #[test]
    fn psi_compose_is_associative_on_sampled_triples() {
        let s3 = arc(FiniteGroup::symmetric(3));
        let chars = characters(&s3);
        let auts = automorphisms(&s3).unwrap();
        let mut maps = Vec::new();
        for c in &chars {
            for d in &auts.maps {
                maps.push(PhasedBasisMap::new(c.clone(), d.clone()).unwrap());
            }
        }
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state as usize) % maps.len()
        };
        for _ in 0..200 {
            let (a, b, c) = (&maps[next()], &maps[next()], &maps[next()]);
            let left = psi_compose(&psi_compose(a, b).unwrap(), c).unwrap();
            let right = psi_compose(a, &psi_compose(b, c).unwrap()).unwrap();
            assert_eq!(left, right);
        }
    }

    #[test]
    fn rejects_bad_maps() {
        let s3 = arc(FiniteGroup::symmetric(3));
        let z6 = arc(FiniteGroup::cyclic(6));
        // non-character values
        let mut vals = vec![Phase::new(0, 1); 6];
        vals[1] = Phase::new(1, 3);
        assert!(Character::new(&s3, vals).is_err());
        // mismatched groups in composition
        let a = PhasedBasisMap::identity(&s3);
        let b = PhasedBasisMap::identity(&z6);
        assert!(matches!(
            psi_compose(&a, &b),
            Err(FinGrpError::GroupMismatch)
        ));
    }
}
