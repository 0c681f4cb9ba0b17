//! Exact finite group theory on multiplication tables: validation, conjugacy
//! data, subgroups and quotients, verified homomorphisms, automorphisms,
//! characters, and phased basis maps on group algebras.

mod auts;
mod chars;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

pub use auts::{
    automorphisms, automorphisms_bounded, is_isomorphic, AutGroup, DEFAULT_AUT_BOUND,
};
pub use chars::{characters, psi_compose, psi_is_inner, Character, PhasedBasisMap};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FinGrpError {
    #[error("not a group: {reason} (witness {witness:?})")]
    NotAGroup {
        reason: &'static str,
        witness: [u32; 3],
    },
    #[error("element set is not a subgroup")]
    NotASubgroup,
    #[error("not normal: conjugating {element} by {by} leaves the subgroup")]
    NotNormal { by: u32, element: u32 },
    #[error("group of order {order} exceeds the supported bound {bound}")]
    TooLarge { order: usize, bound: usize },
    #[error("not a homomorphism: fails on the pair ({0}, {1})")]
    NotAHomomorphism(u32, u32),
    #[error("maps do not live over matching groups")]
    GroupMismatch,
    #[error("homomorphism is not bijective")]
    NotBijective,
    #[error("element {0} out of range for a group of order {1}")]
    OutOfRange(u32, usize),
    #[error("bad group file: {0}")]
    Format(String),
}

/// A finite group as a full multiplication table. Element 0 is the identity;
/// `table[a*n + b]` is the product `a·b`. Construction always validates the
/// group axioms.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    n: usize,
    table: Vec<u32>,
    inv: Vec<u32>,
    names: Option<Vec<String>>,
}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiniteGroup(order {})", self.n)
    }
}

/// Orders up to this bound get the full O(n³) associativity sweep; larger
/// tables use Light's test over a generating set, which is still exact.
const ASSOC_EXHAUSTIVE_MAX: usize = 512;

/// Checks every group axiom on the table and returns the packaged group.
pub fn validate_group(rows: &[Vec<u32>]) -> Result<FiniteGroup, FinGrpError> {
    let n = rows.len();
    if n == 0 {
        return Err(FinGrpError::NotAGroup {
            reason: "empty table",
            witness: [0, 0, 0],
        });
    }
    let mut flat = Vec::with_capacity(n * n);
    for (a, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(FinGrpError::NotAGroup {
                reason: "table is not square",
                witness: [a as u32, row.len() as u32, n as u32],
            });
        }
        flat.extend_from_slice(row);
    }
    FiniteGroup::from_flat(n, flat, None)
}

impl FiniteGroup {
    fn from_flat(
        n: usize,
        table: Vec<u32>,
        names: Option<Vec<String>>,
    ) -> Result<FiniteGroup, FinGrpError> {
        assert_eq!(table.len(), n * n);
        if let Some(ns) = &names {
            if ns.len() != n {
                return Err(FinGrpError::Format(format!(
                    "{} names for {} elements",
                    ns.len(),
                    n
                )));
            }
        }
        let at = |a: usize, b: usize| table[a * n + b];
        for a in 0..n {
            for b in 0..n {
                if at(a, b) as usize >= n {
                    return Err(FinGrpError::NotAGroup {
                        reason: "entry out of range",
                        witness: [a as u32, b as u32, at(a, b)],
                    });
                }
            }
        }
        for b in 0..n {
            if at(0, b) as usize != b {
                return Err(FinGrpError::NotAGroup {
                    reason: "0 is not a left identity",
                    witness: [0, b as u32, at(0, b)],
                });
            }
            if at(b, 0) as usize != b {
                return Err(FinGrpError::NotAGroup {
                    reason: "0 is not a right identity",
                    witness: [b as u32, 0, at(b, 0)],
                });
            }
        }
        // Latin square: every row and column is a permutation.
        let mut seen = vec![false; n];
        for a in 0..n {
            seen.iter_mut().for_each(|s| *s = false);
            for b in 0..n {
                let e = at(a, b) as usize;
                if seen[e] {
                    return Err(FinGrpError::NotAGroup {
                        reason: "row repeats an entry",
                        witness: [a as u32, b as u32, e as u32],
                    });
                }
                seen[e] = true;
            }
        }
        for b in 0..n {
            seen.iter_mut().for_each(|s| *s = false);
            for a in 0..n {
                let e = at(a, b) as usize;
                if seen[e] {
                    return Err(FinGrpError::NotAGroup {
                        reason: "column repeats an entry",
                        witness: [a as u32, b as u32, e as u32],
                    });
                }
                seen[e] = true;
            }
        }
        let mut inv = vec![0u32; n];
        for a in 0..n {
            let b = (0..n).find(|&b| at(a, b) == 0).expect("row is onto");
            if at(b, a) != 0 {
                return Err(FinGrpError::NotAGroup {
                    reason: "one-sided inverse",
                    witness: [a as u32, b as u32, at(b, a)],
                });
            }
            inv[a] = b as u32;
        }
        if n <= ASSOC_EXHAUSTIVE_MAX {
            for a in 0..n {
                for b in 0..n {
                    let ab = at(a, b) as usize;
                    for c in 0..n {
                        if at(ab, c) != at(a, at(b, c) as usize) {
                            return Err(FinGrpError::NotAGroup {
                                reason: "associativity fails",
                                witness: [a as u32, b as u32, c as u32],
                            });
                        }
                    }
                }
            }
        } else {
            // Light's associativity test: with 0 an identity, it suffices to
            // check x·(g·y) = (x·g)·y for g in a set whose left-associated
            // products reach every element.
            let gens = magma_generators(n, &table);
            for &g in &gens {
                let g = g as usize;
                for x in 0..n {
                    let xg = at(x, g) as usize;
                    for y in 0..n {
                        if at(x, at(g, y) as usize) != at(xg, y) {
                            return Err(FinGrpError::NotAGroup {
                                reason: "associativity fails",
                                witness: [x as u32, g as u32, y as u32],
                            });
                        }
                    }
                }
            }
        }
        Ok(FiniteGroup {
            n,
            table,
            inv,
            names,
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.n + b as usize]
    }

    #[inline]
    pub fn inv_of(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    /// g·a·g⁻¹.
    #[inline]
    pub fn conj(&self, g: u32, a: u32) -> u32 {
        self.mul(self.mul(g, a), self.inv_of(g))
    }

    pub fn pow(&self, a: u32, e: i64) -> u32 {
        let (mut base, mut e) = if e < 0 {
            (self.inv_of(a), (-e) as u64)
        } else {
            (a, e as u64)
        };
        let mut acc = 0u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn element_order(&self, a: u32) -> usize {
        let mut p = a;
        let mut k = 1;
        while p != 0 {
            p = self.mul(p, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        for a in 0..self.n as u32 {
            for b in 0..a {
                if self.mul(a, b) != self.mul(b, a) {
                    return false;
                }
            }
        }
        true
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Count of elements of each order, as (order, count) pairs.
    pub fn order_histogram(&self) -> Vec<(usize, usize)> {
        let mut h: BTreeMap<usize, usize> = BTreeMap::new();
        for a in 0..self.n as u32 {
            *h.entry(self.element_order(a)).or_default() += 1;
        }
        h.into_iter().collect()
    }

    /// A small generating set, chosen greedily by ascending element id.
    pub fn greedy_generators(&self) -> Vec<u32> {
        let mut gens: Vec<u32> = Vec::new();
        let mut closed = vec![false; self.n];
        closed[0] = true;
        let mut count = 1;
        for e in 1..self.n as u32 {
            if closed[e as usize] {
                continue;
            }
            gens.push(e);
            // close under right multiplication by the new generator set
            let mut queue: Vec<u32> = (0..self.n as u32).filter(|&x| closed[x as usize]).collect();
            while let Some(x) = queue.pop() {
                for &g in &gens {
                    let y = self.mul(x, g);
                    if !closed[y as usize] {
                        closed[y as usize] = true;
                        count += 1;
                        queue.push(y);
                    }
                }
            }
            if count == self.n {
                break;
            }
        }
        gens
    }

    // ---- constructors ----

    pub fn trivial() -> FiniteGroup {
        validate_group(&[vec![0]]).expect("trivial group")
    }

    pub fn cyclic(n: usize) -> FiniteGroup {
        assert!(n >= 1);
        let mut table = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                table.push(((a + b) % n) as u32);
            }
        }
        FiniteGroup::from_flat(n, table, None).expect("cyclic group")
    }

    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> FiniteGroup {
        let (na, nb) = (a.n, b.n);
        let n = na * nb;
        let id = |x: usize, y: usize| (x * nb + y) as u32;
        let mut table = vec![0u32; n * n];
        for xa in 0..na {
            for xb in 0..nb {
                for ya in 0..na {
                    for yb in 0..nb {
                        let x = id(xa, xb);
                        let y = id(ya, yb);
                        table[x as usize * n + y as usize] = id(
                            a.mul(xa as u32, ya as u32) as usize,
                            b.mul(xb as u32, yb as u32) as usize,
                        );
                    }
                }
            }
        }
        FiniteGroup::from_flat(n, table, None).expect("direct product")
    }

    pub fn klein4() -> FiniteGroup {
        let c2 = FiniteGroup::cyclic(2);
        FiniteGroup::direct_product(&c2, &c2)
    }

    /// Dihedral group of order 2m: element 2i+j is rᶦsʲ with sr = r⁻¹s.
    pub fn dihedral(m: usize) -> FiniteGroup {
        assert!(m >= 1);
        let n = 2 * m;
        let id = |i: usize, j: usize| (2 * i + j) as u32;
        let mut table = vec![0u32; n * n];
        let mut names = Vec::with_capacity(n);
        for i in 0..m {
            names.push(format!("r{i}"));
            names.push(format!("r{i}s"));
        }
        for i1 in 0..m {
            for j1 in 0..2 {
                for i2 in 0..m {
                    for j2 in 0..2 {
                        let i = if j1 == 0 {
                            (i1 + i2) % m
                        } else {
                            (i1 + m - i2 % m) % m
                        };
                        let x = id(i1, j1) as usize;
                        let y = id(i2, j2) as usize;
                        table[x * n + y] = id(i, (j1 + j2) % 2);
                    }
                }
            }
        }
        FiniteGroup::from_flat(n, table, Some(names)).expect("dihedral group")
    }

    /// The quaternion group {±1, ±i, ±j, ±k}.
    pub fn quaternion8() -> FiniteGroup {
        // axis products in {1,i,j,k}: (sign flip, axis)
        const AXIS: [[(u32, usize); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        let names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let n = 8;
        let mut table = vec![0u32; n * n];
        for a1 in 0..4 {
            for s1 in 0..2u32 {
                for a2 in 0..4 {
                    for s2 in 0..2u32 {
                        let (ds, axis) = AXIS[a1][a2];
                        let x = 2 * a1 + s1 as usize;
                        let y = 2 * a2 + s2 as usize;
                        table[x * n + y] = 2 * axis as u32 + (s1 ^ s2 ^ ds);
                    }
                }
            }
        }
        FiniteGroup::from_flat(n, table, Some(names)).expect("quaternion group")
    }

    /// Symmetric group on `m` points (m ≤ 6), permutations in lexicographic
    /// order so the identity gets id 0; product p·q acts by x ↦ p(q(x)).
    pub fn symmetric(m: usize) -> FiniteGroup {
        assert!((1..=6).contains(&m), "symmetric(m) supports 1 ≤ m ≤ 6");
        let perms = all_permutations(m);
        FiniteGroup::from_perms(perms)
    }

    /// Alternating group on 4 points (even permutations, lex order).
    pub fn alternating4() -> FiniteGroup {
        let perms: Vec<Vec<usize>> = all_permutations(4)
            .into_iter()
            .filter(|p| permutation_parity(p) == 0)
            .collect();
        FiniteGroup::from_perms(perms)
    }

    fn from_perms(perms: Vec<Vec<usize>>) -> FiniteGroup {
        let n = perms.len();
        let index: BTreeMap<&[usize], usize> =
            perms.iter().enumerate().map(|(i, p)| (&p[..], i)).collect();
        let mut table = vec![0u32; n * n];
        for (x, p) in perms.iter().enumerate() {
            for (y, q) in perms.iter().enumerate() {
                let comp: Vec<usize> = (0..p.len()).map(|t| p[q[t]]).collect();
                table[x * n + y] = index[&comp[..]] as u32;
            }
        }
        let names = perms
            .iter()
            .map(|p| {
                p.iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join("")
            })
            .collect();
        FiniteGroup::from_flat(n, table, Some(names)).expect("permutation group")
    }
}

/// Generators reaching every element by left-associated products, for Light's
/// test; works on any latin square with identity 0.
fn magma_generators(n: usize, table: &[u32]) -> Vec<u32> {
    let at = |a: usize, b: usize| table[a * n + b];
    let mut gens: Vec<u32> = Vec::new();
    let mut closed = vec![false; n];
    closed[0] = true;
    let mut count = 1;
    for e in 1..n {
        if closed[e] {
            continue;
        }
        gens.push(e as u32);
        let mut queue: Vec<usize> = (0..n).filter(|&x| closed[x]).collect();
        while let Some(x) = queue.pop() {
            for &g in &gens {
                let y = at(x, g as usize) as usize;
                if !closed[y] {
                    closed[y] = true;
                    count += 1;
                    queue.push(y);
                }
            }
        }
        if count == n {
            break;
        }
    }
    gens
}

fn all_permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    let mut used = vec![false; m];
    fn rec(m: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for v in 0..m {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(m, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    rec(m, &mut cur, &mut used, &mut out);
    out
}

fn permutation_parity(p: &[usize]) -> u32 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2
}

// ---- conjugacy ----

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacyData {
    /// Conjugacy classes, each sorted ascending, ordered by least element.
    pub classes: Vec<Vec<u32>>,
    pub class_of: Vec<usize>,
    /// Union of the singleton classes, ascending.
    pub center: Vec<u32>,
}

pub fn conjugacy_data(g: &FiniteGroup) -> ConjugacyData {
    let n = g.order();
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<u32>> = Vec::new();
    for e in 0..n as u32 {
        if class_of[e as usize] != usize::MAX {
            continue;
        }
        let idx = classes.len();
        let mut members = BTreeSet::new();
        for h in 0..n as u32 {
            members.insert(g.conj(h, e));
        }
        let members: Vec<u32> = members.into_iter().collect();
        for &m in &members {
            class_of[m as usize] = idx;
        }
        classes.push(members);
    }
    let center: Vec<u32> = classes
        .iter()
        .filter(|c| c.len() == 1)
        .map(|c| c[0])
        .collect();
    ConjugacyData {
        classes,
        class_of,
        center,
    }
}

pub fn centralizer(g: &FiniteGroup, x: u32) -> Vec<u32> {
    (0..g.order() as u32)
        .filter(|&h| g.mul(h, x) == g.mul(x, h))
        .collect()
}

/// Subgroup generated by `gens`, as a sorted element list.
pub fn generated_subgroup(g: &FiniteGroup, gens: &[u32]) -> Vec<u32> {
    let mut member = vec![false; g.order()];
    member[0] = true;
    let mut queue = vec![0u32];
    while let Some(x) = queue.pop() {
        for &s in gens {
            let y = g.mul(x, s);
            if !member[y as usize] {
                member[y as usize] = true;
                queue.push(y);
            }
        }
    }
    (0..g.order() as u32)
        .filter(|&x| member[x as usize])
        .collect()
}

/// Smallest normal subgroup containing `s`: the subgroup generated by all
/// conjugates of `s` (that generating set is conjugation-closed).
pub fn normal_closure(g: &FiniteGroup, s: &[u32]) -> Vec<u32> {
    let mut conjugates = BTreeSet::new();
    for &x in s {
        for h in 0..g.order() as u32 {
            conjugates.insert(g.conj(h, x));
        }
    }
    let conjugates: Vec<u32> = conjugates.into_iter().collect();
    generated_subgroup(g, &conjugates)
}

/// True iff the sorted element list is a subgroup.
pub fn is_subgroup(g: &FiniteGroup, elems: &[u32]) -> bool {
    if elems.is_empty() || elems.binary_search(&0).is_err() {
        return false;
    }
    if elems.windows(2).any(|w| w[0] >= w[1]) {
        return false;
    }
    if elems.iter().any(|&x| x as usize >= g.order()) {
        return false;
    }
    for &a in elems {
        for &b in elems {
            if elems.binary_search(&g.mul(a, b)).is_err() {
                return false;
            }
        }
    }
    true
}

fn check_normal(g: &FiniteGroup, sub: &[u32]) -> Result<(), FinGrpError> {
    if !is_subgroup(g, sub) {
        return Err(FinGrpError::NotASubgroup);
    }
    for &x in sub {
        for h in 0..g.order() as u32 {
            if sub.binary_search(&g.conj(h, x)).is_err() {
                return Err(FinGrpError::NotNormal { by: h, element: x });
            }
        }
    }
    Ok(())
}

/// Quotient by a normal subgroup; cosets are numbered by their least element
/// in ascending order, so the identity coset is element 0. Returns the
/// quotient and the verified projection.
pub fn quotient_by_normal(
    g: &Arc<FiniteGroup>,
    sub: &[u32],
) -> Result<(Arc<FiniteGroup>, Homomorphism), FinGrpError> {
    check_normal(g, sub)?;
    let n = g.order();
    let mut coset_of = vec![u32::MAX; n];
    let mut reps: Vec<u32> = Vec::new();
    for x in 0..n as u32 {
        if coset_of[x as usize] != u32::MAX {
            continue;
        }
        let id = reps.len() as u32;
        reps.push(x);
        for &s in sub {
            coset_of[g.mul(x, s) as usize] = id;
        }
    }
    let m = reps.len();
    let mut table = vec![0u32; m * m];
    for (i, &a) in reps.iter().enumerate() {
        for (j, &b) in reps.iter().enumerate() {
            table[i * m + j] = coset_of[g.mul(a, b) as usize];
        }
    }
    let q = Arc::new(FiniteGroup::from_flat(m, table, None)?);
    let proj = Homomorphism::new(g.clone(), q.clone(), coset_of)?;
    Ok((q, proj))
}

/// Reindexes a subgroup as a standalone group; returns it with the embedding
/// list (new id → old id, ascending, so the identity stays at 0).
pub fn subgroup_group(
    g: &FiniteGroup,
    elems: &[u32],
) -> Result<(FiniteGroup, Vec<u32>), FinGrpError> {
    if !is_subgroup(g, elems) {
        return Err(FinGrpError::NotASubgroup);
    }
    let k = elems.len();
    let pos: BTreeMap<u32, u32> = elems
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i as u32))
        .collect();
    let mut table = vec![0u32; k * k];
    for (i, &a) in elems.iter().enumerate() {
        for (j, &b) in elems.iter().enumerate() {
            table[i * k + j] = pos[&g.mul(a, b)];
        }
    }
    Ok((FiniteGroup::from_flat(k, table, None)?, elems.to_vec()))
}

/// True when the two handles denote the same group (same table).
pub fn same_group(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> bool {
    Arc::ptr_eq(a, b) || (a.n == b.n && a.table == b.table)
}

// ---- homomorphisms ----

/// A map between finite groups, verified multiplicative on every pair at
/// construction time.
#[derive(Clone)]
pub struct Homomorphism {
    pub source: Arc<FiniteGroup>,
    pub target: Arc<FiniteGroup>,
    image: Vec<u32>,
}

impl std::fmt::Debug for Homomorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Homomorphism({} -> {}, {:?})",
            self.source.order(),
            self.target.order(),
            self.image
        )
    }
}

impl PartialEq for Homomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.image == other.image
            && same_group(&self.source, &other.source)
            && same_group(&self.target, &other.target)
    }
}
impl Eq for Homomorphism {}

impl Homomorphism {
    pub fn new(
        source: Arc<FiniteGroup>,
        target: Arc<FiniteGroup>,
        image: Vec<u32>,
    ) -> Result<Homomorphism, FinGrpError> {
        if image.len() != source.order() {
            return Err(FinGrpError::OutOfRange(
                image.len() as u32,
                source.order(),
            ));
        }
        for &v in &image {
            if v as usize >= target.order() {
                return Err(FinGrpError::OutOfRange(v, target.order()));
            }
        }
        let n = source.order() as u32;
        for a in 0..n {
            for b in 0..n {
                if image[source.mul(a, b) as usize]
                    != target.mul(image[a as usize], image[b as usize])
                {
                    return Err(FinGrpError::NotAHomomorphism(a, b));
                }
            }
        }
        Ok(Homomorphism {
            source,
            target,
            image,
        })
    }

    /// For maps that are homomorphisms by construction; verified in debug.
    fn new_unchecked(
        source: Arc<FiniteGroup>,
        target: Arc<FiniteGroup>,
        image: Vec<u32>,
    ) -> Homomorphism {
        #[cfg(debug_assertions)]
        {
            Homomorphism::new(source, target, image).expect("homomorphism by construction")
        }
        #[cfg(not(debug_assertions))]
        {
            Homomorphism {
                source,
                target,
                image,
            }
        }
    }

    pub fn identity(g: &Arc<FiniteGroup>) -> Homomorphism {
        Homomorphism::new_unchecked(g.clone(), g.clone(), (0..g.order() as u32).collect())
    }

    /// The inner automorphism x ↦ g·x·g⁻¹.
    pub fn inner(g: &Arc<FiniteGroup>, by: u32) -> Homomorphism {
        let image = (0..g.order() as u32).map(|x| g.conj(by, x)).collect();
        Homomorphism::new_unchecked(g.clone(), g.clone(), image)
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.image[x as usize]
    }

    pub fn image_vec(&self) -> &[u32] {
        &self.image
    }

    pub fn is_bijective(&self) -> bool {
        if self.source.order() != self.target.order() {
            return false;
        }
        let mut seen = vec![false; self.target.order()];
        for &v in &self.image {
            if seen[v as usize] {
                return false;
            }
            seen[v as usize] = true;
        }
        true
    }

    pub fn is_automorphism(&self) -> bool {
        same_group(&self.source, &self.target) && self.is_bijective()
    }

    /// outer ∘ inner (apply `inner` first).
    pub fn compose(outer: &Homomorphism, inner: &Homomorphism) -> Result<Homomorphism, FinGrpError> {
        if !same_group(&inner.target, &outer.source) {
            return Err(FinGrpError::GroupMismatch);
        }
        let image = inner
            .image
            .iter()
            .map(|&x| outer.image[x as usize])
            .collect();
        Ok(Homomorphism::new_unchecked(
            inner.source.clone(),
            outer.target.clone(),
            image,
        ))
    }

    pub fn inverse(&self) -> Result<Homomorphism, FinGrpError> {
        if !self.is_bijective() {
            return Err(FinGrpError::NotBijective);
        }
        let mut image = vec![0u32; self.source.order()];
        for (x, &v) in self.image.iter().enumerate() {
            image[v as usize] = x as u32;
        }
        Ok(Homomorphism::new_unchecked(
            self.target.clone(),
            self.source.clone(),
            image,
        ))
    }

    pub fn kernel(&self) -> Vec<u32> {
        (0..self.source.order() as u32)
            .filter(|&x| self.image[x as usize] == 0)
            .collect()
    }

    pub fn image_set(&self) -> Vec<u32> {
        let set: BTreeSet<u32> = self.image.iter().copied().collect();
        set.into_iter().collect()
    }
}

// ---- group files ----

/// Canonical `.grp.json` serialization: sorted keys, ids as integers, id 0
/// the identity. Parses back bit-exactly.
pub fn to_grp_json(g: &FiniteGroup) -> String {
    let mut root = serde_json::Map::new();
    if let Some(names) = &g.names {
        root.insert(
            "names".to_string(),
            serde_json::Value::Array(
                names
                    .iter()
                    .map(|s| serde_json::Value::String(s.clone()))
                    .collect(),
            ),
        );
    }
    root.insert("order".to_string(), serde_json::Value::from(g.n));
    let rows: Vec<serde_json::Value> = (0..g.n)
        .map(|a| {
            serde_json::Value::Array(
                (0..g.n)
                    .map(|b| serde_json::Value::from(g.table[a * g.n + b]))
                    .collect(),
            )
        })
        .collect();
    root.insert("table".to_string(), serde_json::Value::Array(rows));
    serde_json::Value::Object(root).to_string()
}

pub fn from_grp_json(text: &str) -> Result<FiniteGroup, FinGrpError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| FinGrpError::Format(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| FinGrpError::Format("top level must be an object".into()))?;
    let order = obj
        .get("order")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| FinGrpError::Format("missing integer \"order\"".into()))? as usize;
    let table_rows = obj
        .get("table")
        .and_then(|v| v.as_array())
        .ok_or_else(|| FinGrpError::Format("missing array \"table\"".into()))?;
    if table_rows.len() != order {
        return Err(FinGrpError::Format(format!(
            "table has {} rows for order {}",
            table_rows.len(),
            order
        )));
    }
    let mut flat = Vec::with_capacity(order * order);
    for row in table_rows {
        let row = row
            .as_array()
            .ok_or_else(|| FinGrpError::Format("table rows must be arrays".into()))?;
        if row.len() != order {
            return Err(FinGrpError::Format("table is not square".into()));
        }
        for v in row {
            let v = v
                .as_u64()
                .ok_or_else(|| FinGrpError::Format("table entries must be integers".into()))?;
            flat.push(v as u32);
        }
    }
    let names = match obj.get("names") {
        None => None,
        Some(serde_json::Value::Array(arr)) => {
            let mut names = Vec::with_capacity(arr.len());
            for v in arr {
                names.push(
                    v.as_str()
                        .ok_or_else(|| FinGrpError::Format("names must be strings".into()))?
                        .to_string(),
                );
            }
            Some(names)
        }
        Some(_) => return Err(FinGrpError::Format("\"names\" must be an array".into())),
    };
    FiniteGroup::from_flat(order, flat, names)
}
