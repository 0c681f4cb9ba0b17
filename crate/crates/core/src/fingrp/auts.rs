//! Automorphism enumeration and isomorphism testing by backtracking over
//! generator images, pruned by element order and conjugacy-class size.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{conjugacy_data, FinGrpError, FiniteGroup, Homomorphism};

pub const DEFAULT_AUT_BOUND: usize = 256;

/// The full automorphism group of a finite group, with the inner subgroup
/// and the class-preserving flags.
#[derive(Debug)]
pub struct AutGroup {
    pub group: Arc<FiniteGroup>,
    /// All automorphisms, sorted by image vector.
    pub maps: Vec<Homomorphism>,
    /// Marks maps of the form x ↦ gxg⁻¹.
    pub inner: Vec<bool>,
    /// Marks maps sending every conjugacy class to itself setwise.
    pub class_preserving: Vec<bool>,
    pub inn_order: usize,
    /// Index of each map's coset of the inner subgroup; coset 0 is Inn.
    pub coset_of: Vec<usize>,
}

impl AutGroup {
    pub fn order(&self) -> usize {
        self.maps.len()
    }

    pub fn out_order(&self) -> usize {
        self.maps.len() / self.inn_order
    }

    pub fn index_of(&self, image: &[u32]) -> Option<usize> {
        self.maps
            .binary_search_by(|m| m.image_vec().cmp(image))
            .ok()
    }
}

/// Backtracking search for all injective multiplicative extensions of
/// generator images; `first_only` stops at the first hit (isomorphism test).
fn search(
    src: &FiniteGroup,
    dst: &FiniteGroup,
    gens: &[u32],
    pools: &[Vec<u32>],
    first_only: bool,
) -> Vec<Vec<u32>> {
    let n = src.order();
    let mut results = Vec::new();
    let mut map = vec![u32::MAX; n];
    let mut used = vec![false; dst.order()];
    map[0] = 0;
    used[0] = true;
    let mut mapped: Vec<u32> = vec![0];

    struct Frame<'a> {
        src: &'a FiniteGroup,
        dst: &'a FiniteGroup,
        gens: &'a [u32],
        pools: &'a [Vec<u32>],
        first_only: bool,
    }

    // Extends the partial map over the closure of gens[..=level], checking
    // m(x·g) = m(x)·m(g) for all reached x and g ≤ level. That relation on a
    // right-generating closure forces multiplicativity on the whole subgroup,
    // so surviving full assignments are exactly the injective homomorphisms.
    fn extend(
        f: &Frame,
        level: usize,
        cand: u32,
        map: &mut [u32],
        used: &mut [bool],
        mapped: &mut Vec<u32>,
        results: &mut Vec<Vec<u32>>,
    ) -> bool {
        let g_new = f.gens[level] as usize;
        let trail_start = mapped.len();
        if map[g_new] != u32::MAX || used[cand as usize] {
            return false;
        }
        map[g_new] = cand;
        used[cand as usize] = true;
        mapped.push(g_new as u32);

        let mut consistent = true;
        let mut cursor = 0usize;
        // re-scan the full closure so old elements meet the new generator
        let mut queue: Vec<u32> = mapped.clone();
        'scan: while cursor < queue.len() {
            let x = queue[cursor];
            cursor += 1;
            for &g in &f.gens[..=level] {
                if map[g as usize] == u32::MAX {
                    continue;
                }
                let y = f.src.mul(x, g) as usize;
                let ym = f.dst.mul(map[x as usize], map[g as usize]);
                if map[y] == u32::MAX {
                    if used[ym as usize] {
                        consistent = false;
                        break 'scan;
                    }
                    map[y] = ym;
                    used[ym as usize] = true;
                    mapped.push(y as u32);
                    queue.push(y as u32);
                } else if map[y] != ym {
                    consistent = false;
                    break 'scan;
                }
            }
        }

        let mut hit_limit = false;
        if consistent {
            if level + 1 == f.gens.len() {
                debug_assert_eq!(mapped.len(), f.src.order());
                results.push(map.to_vec());
                hit_limit = f.first_only;
            } else {
                for &next in &f.pools[level + 1] {
                    if extend(f, level + 1, next, map, used, mapped, results) {
                        hit_limit = true;
                        break;
                    }
                }
            }
        }

        for &x in &mapped[trail_start..] {
            used[map[x as usize] as usize] = false;
            map[x as usize] = u32::MAX;
        }
        mapped.truncate(trail_start);
        hit_limit
    }

    let frame = Frame {
        src,
        dst,
        gens,
        pools,
        first_only,
    };
    if gens.is_empty() {
        // trivial group
        results.push(map.iter().map(|&v| if v == u32::MAX { 0 } else { v }).collect());
        return results;
    }
    for &cand in &pools[0] {
        if extend(
            &frame,
            0,
            cand,
            &mut map,
            &mut used,
            &mut mapped,
            &mut results,
        ) {
            break;
        }
    }
    results
}

/// Candidate images in `dst` for each `src` generator: matching element
/// order and conjugacy-class size.
fn candidate_pools(src: &FiniteGroup, dst: &FiniteGroup, gens: &[u32]) -> Vec<Vec<u32>> {
    let cd_src = conjugacy_data(src);
    let cd_dst = conjugacy_data(dst);
    let dst_orders: Vec<usize> = (0..dst.order() as u32)
        .map(|x| dst.element_order(x))
        .collect();
    gens.iter()
        .map(|&g| {
            let ord = src.element_order(g);
            let csize = cd_src.classes[cd_src.class_of[g as usize]].len();
            (0..dst.order() as u32)
                .filter(|&h| {
                    dst_orders[h as usize] == ord
                        && cd_dst.classes[cd_dst.class_of[h as usize]].len() == csize
                })
                .collect()
        })
        .collect()
}

pub fn automorphisms(g: &Arc<FiniteGroup>) -> Result<AutGroup, FinGrpError> {
    automorphisms_bounded(g, DEFAULT_AUT_BOUND)
}

pub fn automorphisms_bounded(g: &Arc<FiniteGroup>, bound: usize) -> Result<AutGroup, FinGrpError> {
    if g.order() > bound {
        return Err(FinGrpError::TooLarge {
            order: g.order(),
            bound,
        });
    }
    let gens = g.greedy_generators();
    let pools = candidate_pools(g, g, &gens);
    let mut images = search(g, g, &gens, &pools, false);
    images.sort_unstable();
    images.dedup();

    let inner_set: BTreeSet<Vec<u32>> = (0..g.order() as u32)
        .map(|h| (0..g.order() as u32).map(|x| g.conj(h, x)).collect())
        .collect();
    let cd = conjugacy_data(g);

    let index: BTreeMap<&[u32], usize> = images
        .iter()
        .enumerate()
        .map(|(i, v)| (&v[..], i))
        .collect();
    let mut coset_of = vec![usize::MAX; images.len()];
    let mut next_coset = 0usize;
    for i in 0..images.len() {
        if coset_of[i] != usize::MAX {
            continue;
        }
        for inn in &inner_set {
            let composed: Vec<u32> = inn.iter().map(|&x| images[i][x as usize]).collect();
            let j = *index
                .get(&composed[..])
                .expect("Aut is closed under composition with inner maps");
            coset_of[j] = next_coset;
        }
        next_coset += 1;
    }

    let inner: Vec<bool> = images.iter().map(|v| inner_set.contains(v)).collect();
    debug_assert!(inner[coset_of.iter().position(|&c| c == 0).unwrap()]);
    let class_preserving: Vec<bool> = images
        .iter()
        .map(|v| {
            (0..g.order()).all(|x| cd.class_of[v[x] as usize] == cd.class_of[x])
        })
        .collect();
    let maps = images
        .into_iter()
        .map(|image| Homomorphism::new(g.clone(), g.clone(), image).expect("verified search hit"))
        .collect();
    Ok(AutGroup {
        group: g.clone(),
        maps,
        inner,
        class_preserving,
        inn_order: inner_set.len(),
        coset_of,
    })
}

/// Decides isomorphism: a cheap invariant screen, then backtracking on
/// generator images.
pub fn is_isomorphic(a: &FiniteGroup, b: &FiniteGroup) -> bool {
    if a.order() != b.order() {
        return false;
    }
    if a.order_histogram() != b.order_histogram() {
        return false;
    }
    let cd_a = conjugacy_data(a);
    let cd_b = conjugacy_data(b);
    let mut sizes_a: Vec<usize> = cd_a.classes.iter().map(|c| c.len()).collect();
    let mut sizes_b: Vec<usize> = cd_b.classes.iter().map(|c| c.len()).collect();
    sizes_a.sort_unstable();
    sizes_b.sort_unstable();
    if sizes_a != sizes_b || cd_a.center.len() != cd_b.center.len() {
        return false;
    }
    if abelianization_histogram(a) != abelianization_histogram(b) {
        return false;
    }
    let gens = a.greedy_generators();
    if gens.is_empty() {
        return true; // both trivial
    }
    let pools = candidate_pools(a, b, &gens);
    !search(a, b, &gens, &pools, true).is_empty()
}

/// Order histogram of G/[G,G]; a complete invariant of the abelianization.
fn abelianization_histogram(g: &FiniteGroup) -> Vec<(usize, usize)> {
    let g = Arc::new(g.clone());
    let mut comms = BTreeSet::new();
    for x in 0..g.order() as u32 {
        for y in 0..g.order() as u32 {
            comms.insert(g.mul(g.mul(x, y), g.mul(g.inv_of(x), g.inv_of(y))));
        }
    }
    let derived = super::generated_subgroup(&g, &comms.into_iter().collect::<Vec<_>>());
    let (q, _) = super::quotient_by_normal(&g, &derived).expect("derived subgroup is normal");
    q.order_histogram()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(g: FiniteGroup) -> Arc<FiniteGroup> {
        Arc::new(g)
    }

    #[test]
    fn aut_orders_match_known_groups() {
        let klein = arc(FiniteGroup::klein4());
        let a = automorphisms(&klein).unwrap();
        assert_eq!(a.order(), 6);
        assert_eq!(a.inn_order, 1);
        assert!(is_isomorphic_aut_s3(&a));

        let s3 = arc(FiniteGroup::symmetric(3));
        let a = automorphisms(&s3).unwrap();
        assert_eq!(a.order(), 6);
        assert_eq!(a.inn_order, 6);
        assert!(a.inner.iter().all(|&b| b));
        assert!(a.class_preserving.iter().all(|&b| b));

        let d4 = arc(FiniteGroup::dihedral(4));
        let a = automorphisms(&d4).unwrap();
        assert_eq!(a.order(), 8);
        assert_eq!(a.inn_order, 4);

        let q8 = arc(FiniteGroup::quaternion8());
        let a = automorphisms(&q8).unwrap();
        assert_eq!(a.order(), 24);
        assert_eq!(a.inn_order, 4);

        let a4 = arc(FiniteGroup::alternating4());
        let a = automorphisms(&a4).unwrap();
        assert_eq!(a.order(), 24);
        assert_eq!(a.inn_order, 12);
    }

    // Aut(Z/2 × Z/2) should be the full symmetric group on the three
    // involutions.
    fn is_isomorphic_aut_s3(a: &AutGroup) -> bool {
        a.order() == 6 && a.maps.iter().filter(|m| {
            let v = m.image_vec();
            // count transposition-like maps: order 2
            let twice: Vec<u32> = v.iter().map(|&x| v[x as usize]).collect();
            twice == (0..4).collect::<Vec<u32>>() && *v != (0..4).collect::<Vec<u32>>()
        }).count() == 3
    }

    #[test]
    fn identity_automorphism_is_class_preserving() {
        let q8 = arc(FiniteGroup::quaternion8());
        let a = automorphisms(&q8).unwrap();
        let id_vec: Vec<u32> = (0..8).collect();
        let idx = a.index_of(&id_vec).unwrap();
        assert!(a.class_preserving[idx]);
        assert!(a.inner[idx]);
        assert_eq!(a.coset_of[idx], 0);
    }

    #[test]
    fn aut_is_a_group_with_normal_inner_subgroup() {
        for g in [
            arc(FiniteGroup::symmetric(3)),
            arc(FiniteGroup::dihedral(4)),
            arc(FiniteGroup::quaternion8()),
            arc(FiniteGroup::klein4()),
        ] {
            let a = automorphisms(&g).unwrap();
            for m1 in &a.maps {
                let inv = m1.inverse().unwrap();
                assert!(a.index_of(inv.image_vec()).is_some());
                for m2 in &a.maps {
                    let c = Homomorphism::compose(m1, m2).unwrap();
                    let ci = a.index_of(c.image_vec()).unwrap();
                    // Inn is normal: conjugating an inner map stays inner
                    if a.inner[a.index_of(m2.image_vec()).unwrap()] {
                        let conj =
                            Homomorphism::compose(&Homomorphism::compose(m1, m2).unwrap(), &inv)
                                .unwrap();
                        let cj = a.index_of(conj.image_vec()).unwrap();
                        assert!(a.inner[cj]);
                    }
                    let _ = ci;
                }
            }
            // inner ⇒ class-preserving
            for i in 0..a.order() {
                if a.inner[i] {
                    assert!(a.class_preserving[i]);
                    assert_eq!(a.coset_of[i], 0);
                }
            }
            // every Inn-coset has the same size
            let mut counts = BTreeMap::new();
            for &c in &a.coset_of {
                *counts.entry(c).or_insert(0usize) += 1;
            }
            assert!(counts.values().all(|&v| v == a.inn_order));
        }
    }

    #[test]
    fn class_preserving_implies_inner_on_corpus() {
        for g in [
            arc(FiniteGroup::symmetric(3)),
            arc(FiniteGroup::dihedral(4)),
            arc(FiniteGroup::quaternion8()),
            arc(FiniteGroup::alternating4()),
            arc(FiniteGroup::cyclic(16)),
            arc(FiniteGroup::klein4()),
            arc(FiniteGroup::direct_product(
                &FiniteGroup::cyclic(2),
                &FiniteGroup::cyclic(8),
            )),
        ] {
            let a = automorphisms(&g).unwrap();
            for i in 0..a.order() {
                assert_eq!(
                    a.class_preserving[i], a.inner[i],
                    "class-preserving and inner must coincide here (order {})",
                    g.order()
                );
            }
        }
    }

    #[test]
    fn bound_is_enforced() {
        let big = arc(FiniteGroup::cyclic(300));
        assert!(matches!(
            automorphisms(&big),
            Err(FinGrpError::TooLarge { .. })
        ));
        assert!(automorphisms_bounded(&big, 512).is_ok());
    }

    #[test]
    fn isomorphism_examples() {
        assert!(!is_isomorphic(
            &FiniteGroup::cyclic(4),
            &FiniteGroup::klein4()
        ));
        assert!(is_isomorphic(
            &FiniteGroup::cyclic(6),
            &FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(3))
        ));
        assert!(!is_isomorphic(
            &FiniteGroup::dihedral(4),
            &FiniteGroup::quaternion8()
        ));
        assert!(is_isomorphic(
            &FiniteGroup::symmetric(3),
            &FiniteGroup::dihedral(3)
        ));
        assert!(is_isomorphic(&FiniteGroup::trivial(), &FiniteGroup::trivial()));
        assert!(!is_isomorphic(
            &FiniteGroup::symmetric(4),
            &FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::alternating4())
        ));
    }
}
