//! Wreath-like products: a finite group W together with a decomposition
//! ⊕ᵢ Aᵢ = ker ε whose summands pairwise commute, intersect trivially, and
//! are permuted by conjugation along a B-action on the index set I. The
//! module builds ordinary wreath products, verifies candidate data, and
//! implements the calculus on them: supports, coset projections π_X, the
//! N_R subgroups, untwisting quotients, subgroup restriction, and base
//! quotients.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use serde_json::Value;
use thiserror::Error;

use crate::fingrp::{
    from_grp_json, generated_subgroup, is_subgroup, normal_closure, quotient_by_normal,
    subgroup_group, to_grp_json, validate_group, FinGrpError, FiniteGroup,
    Homomorphism,
};

/// Above this order the conjugation rule is spot-checked on seeded triples
/// instead of exhaustively.
pub const EXHAUSTIVE_VERIFY_MAX: usize = 10_000;
/// Cap on |A|^|I|·|B| for ordinary wreath construction (table is quadratic).
pub const WREATH_ORDER_MAX: usize = 5_000;

#[derive(Debug, Error)]
pub enum WlpError {
    #[error(transparent)]
    Group(#[from] FinGrpError),
    #[error("element {0} is not in the base subgroup ker ε")]
    NotInBase(u32),
    #[error("operation requires abelian base summands")]
    RequiresAbelianBase,
    #[error("operation requires the regular form: I = B with left-multiplication action")]
    RequiresRegularForm,
    #[error("operation requires the B-action on I to be transitive")]
    ActionNotTransitive,
    #[error("the subgroup does not contain the base")]
    BaseNotContained,
    #[error("malformed wreath-like data: {0}")]
    Shape(String),
    #[error("wreath-like axioms fail: {0}")]
    Violation(WlpViolation),
}

/// First-failure witness from `verify_wreath_like`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WlpViolation {
    #[error("section[{b}] does not map to {b} under ε")]
    SectionMismatch { b: u32 },
    #[error("action row of {b} is not a permutation of I")]
    NotAPermutation { b: u32 },
    #[error("action violates (b₁b₂)·i = b₁·(b₂·i) at b₁={b1}, b₂={b2}, i={i}")]
    NotAnAction { b1: u32, b2: u32, i: usize },
    #[error("summand {i} is not a subgroup")]
    SummandNotSubgroup { i: usize },
    #[error("summand {i} contains {x}, which is outside ker ε")]
    SummandOutsideKernel { i: usize, x: u32 },
    #[error("summands {i} and {j} share the nontrivial element {x}")]
    SummandsOverlap { i: usize, j: usize, x: u32 },
    #[error("summand elements {x} (index {i}) and {y} (index {j}) do not commute")]
    SummandsDontCommute { i: usize, j: usize, x: u32, y: u32 },
    #[error("summands do not generate ker ε")]
    KernelNotGenerated,
    #[error("Π|Aᵢ| = {product} but |ker ε| = {kernel}: the sum is not direct")]
    KernelSizeMismatch { product: u128, kernel: usize },
    #[error("conjugation by {w} does not carry summand {i} onto summand {target}")]
    ConjugationRule { w: u32, i: usize, target: usize },
}

/// Wreath-like product data: ε: W → B, summands Aᵢ indexed by 0..|I|, a
/// B-action on I, and a set-theoretic section of ε. Constructors in this
/// module produce verified instances; `from_parts` only checks shape, so
/// candidates can be fed to `verify_wreath_like` for a witness.
#[derive(Debug, Clone, PartialEq)]
pub struct WreathLikeProduct {
    eps: Homomorphism,
    summands: Vec<Vec<u32>>,
    action: Vec<Vec<u32>>,
    section: Vec<u32>,
}

impl WreathLikeProduct {
    pub fn from_parts(
        eps: Homomorphism,
        summands: Vec<Vec<u32>>,
        action: Vec<Vec<u32>>,
        section: Vec<u32>,
    ) -> Result<WreathLikeProduct, WlpError> {
        let nw = eps.source.order();
        let nb = eps.target.order();
        let k = summands.len();
        if k == 0 {
            return Err(WlpError::Shape("no summands".into()));
        }
        for (i, s) in summands.iter().enumerate() {
            if s.windows(2).any(|w| w[0] >= w[1]) || s.first() != Some(&0) {
                return Err(WlpError::Shape(format!(
                    "summand {i} must be sorted, unique, and contain the identity"
                )));
            }
            if s.iter().any(|&x| x as usize >= nw) {
                return Err(WlpError::Shape(format!("summand {i} has an element out of range")));
            }
        }
        if action.len() != nb {
            return Err(WlpError::Shape(format!(
                "action has {} rows but |B| = {nb}",
                action.len()
            )));
        }
        if action.iter().any(|row| row.len() != k || row.iter().any(|&t| t as usize >= k)) {
            return Err(WlpError::Shape("action rows must map I into I".into()));
        }
        if section.len() != nb || section.iter().any(|&w| w as usize >= nw) {
            return Err(WlpError::Shape("section must pick one W element per B element".into()));
        }
        Ok(WreathLikeProduct { eps, summands, action, section })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.eps.source
    }

    pub fn acting_group(&self) -> &Arc<FiniteGroup> {
        &self.eps.target
    }

    pub fn epsilon(&self) -> &Homomorphism {
        &self.eps
    }

    pub fn index_count(&self) -> usize {
        self.summands.len()
    }

    pub fn summand(&self, i: usize) -> &[u32] {
        &self.summands[i]
    }

    pub fn summands(&self) -> &[Vec<u32>] {
        &self.summands
    }

    /// Action of the B-element `b` on index `i`.
    pub fn act(&self, b: u32, i: usize) -> usize {
        self.action[b as usize][i] as usize
    }

    pub fn action(&self) -> &[Vec<u32>] {
        &self.action
    }

    pub fn section(&self) -> &[u32] {
        &self.section
    }

    /// Sorted element list of the base ⊕Aᵢ = ker ε.
    pub fn base_elements(&self) -> Vec<u32> {
        self.eps.kernel()
    }

    /// True when I = B acted on by left multiplication (the setting of the
    /// π/N_R calculus).
    pub fn is_regular(&self) -> bool {
        let b = self.acting_group();
        self.index_count() == b.order()
            && (0..b.order() as u32).all(|x| {
                (0..b.order() as u32).all(|i| self.act(x, i as usize) == b.mul(x, i) as usize)
            })
    }

    fn base_is_abelian(&self) -> bool {
        // pairwise commutation is a wlp axiom, so the base is abelian iff
        // each summand is
        self.summands.iter().all(|s| {
            s.iter().all(|&x| {
                s.iter().all(|&y| self.group().mul(x, y) == self.group().mul(y, x))
            })
        })
    }

    /// Canonical section: least element id in each ε-fiber.
    fn canonical_section(eps: &Homomorphism) -> Vec<u32> {
        let mut section = vec![u32::MAX; eps.target.order()];
        for w in 0..eps.source.order() as u32 {
            let b = eps.apply(w) as usize;
            if section[b] == u32::MAX {
                section[b] = w;
            }
        }
        section
    }

    /// Serializes to the `.wlp.json` bundle: the W table plus ε, summands,
    /// action, and section. B is not stored; it is recovered from ε and the
    /// section (b₁b₂ = ε(σ(b₁)σ(b₂))).
    pub fn to_wlp_json(&self) -> String {
        let group: Value = serde_json::from_str(&to_grp_json(self.group()))
            .expect("group serialization is valid JSON");
        let summands: BTreeMap<String, Value> = self
            .summands
            .iter()
            .enumerate()
            .map(|(i, s)| (i.to_string(), Value::from(s.clone())))
            .collect();
        let action: BTreeMap<String, Value> = self
            .action
            .iter()
            .enumerate()
            .map(|(b, row)| (b.to_string(), Value::from(row.clone())))
            .collect();
        let bundle = serde_json::json!({
            "action": action,
            "epsilon": self.eps.image_vec(),
            "group": group,
            "section": self.section,
            "summands": summands,
        });
        serde_json::to_string(&bundle).expect("bundle serializes")
    }

    /// Parses and fully re-verifies a `.wlp.json` bundle.
    pub fn from_wlp_json(text: &str) -> Result<WreathLikeProduct, WlpError> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| WlpError::Shape(format!("invalid JSON: {e}")))?;
        let obj = v.as_object().ok_or_else(|| WlpError::Shape("expected an object".into()))?;
        let group_v = obj.get("group").ok_or_else(|| WlpError::Shape("missing group".into()))?;
        let w = Arc::new(from_grp_json(
            &serde_json::to_string(group_v).expect("reserializes"),
        )?);
        let epsilon = read_u32_array(obj.get("epsilon"), "epsilon")?;
        let section = read_u32_array(obj.get("section"), "section")?;
        let nb = section.len();
        if nb == 0 {
            return Err(WlpError::Shape("empty section".into()));
        }
        let summands = read_indexed_lists(obj.get("summands"), "summands")?;
        let action = read_indexed_lists(obj.get("action"), "action")?;
        if action.len() != nb {
            return Err(WlpError::Shape("action size disagrees with section".into()));
        }
        // recover B from ε and the section
        if epsilon.len() != w.order() {
            return Err(WlpError::Shape("epsilon length disagrees with the group".into()));
        }
        if epsilon.iter().any(|&b| b as usize >= nb)
            || section.iter().any(|&x| x as usize >= w.order())
        {
            return Err(WlpError::Shape("epsilon/section value out of range".into()));
        }
        let rows: Vec<Vec<u32>> = (0..nb)
            .map(|b1| {
                (0..nb)
                    .map(|b2| epsilon[w.mul(section[b1], section[b2]) as usize])
                    .collect()
            })
            .collect();
        let b = Arc::new(validate_group(&rows)?);
        let eps = Homomorphism::new(w, b, epsilon)?;
        let wlp = WreathLikeProduct::from_parts(eps, summands, action, section)?;
        verify_wreath_like(&wlp).map_err(WlpError::Violation)?;
        Ok(wlp)
    }
}

fn read_u32_array(v: Option<&Value>, what: &str) -> Result<Vec<u32>, WlpError> {
    v.and_then(Value::as_array)
        .ok_or_else(|| WlpError::Shape(format!("missing array {what}")))?
        .iter()
        .map(|x| {
            x.as_u64()
                .filter(|&n| n <= u32::MAX as u64)
                .map(|n| n as u32)
                .ok_or_else(|| WlpError::Shape(format!("{what} holds a non-integer")))
        })
        .collect()
}

/// Reads {"0": [...], "1": [...], …} with contiguous keys into a Vec.
fn read_indexed_lists(v: Option<&Value>, what: &str) -> Result<Vec<Vec<u32>>, WlpError> {
    let obj = v
        .and_then(Value::as_object)
        .ok_or_else(|| WlpError::Shape(format!("missing object {what}")))?;
    let mut out = vec![None; obj.len()];
    for (key, val) in obj {
        let idx: usize = key
            .parse()
            .map_err(|_| WlpError::Shape(format!("{what} key {key} is not an index")))?;
        if idx >= out.len() {
            return Err(WlpError::Shape(format!("{what} keys are not contiguous")));
        }
        out[idx] = Some(read_u32_array(Some(val), what)?);
    }
    out.into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| WlpError::Shape(format!("{what} missing index {i}"))))
        .collect()
}

/// Exhaustively checks every wreath-like axiom, reporting the first failure:
/// section validity (hence ε surjectivity), the action axioms, summand
/// subgroup/commutation/intersection clauses, ⊕Aᵢ = ker ε, and the
/// conjugation rule wAᵢw⁻¹ = A_{ε(w)·i} (sampled above
/// `EXHAUSTIVE_VERIFY_MAX`).
pub fn verify_wreath_like(wlp: &WreathLikeProduct) -> Result<(), WlpViolation> {
    let w = wlp.group();
    let b = wlp.acting_group();
    let k = wlp.index_count();

    for x in 0..b.order() as u32 {
        if wlp.eps.apply(wlp.section[x as usize]) != x {
            return Err(WlpViolation::SectionMismatch { b: x });
        }
    }

    for x in 0..b.order() as u32 {
        let row = &wlp.action[x as usize];
        let mut seen = vec![false; k];
        for &t in row {
            if seen[t as usize] {
                return Err(WlpViolation::NotAPermutation { b: x });
            }
            seen[t as usize] = true;
        }
    }
    for b1 in 0..b.order() as u32 {
        for b2 in 0..b.order() as u32 {
            let prod = b.mul(b1, b2);
            for i in 0..k {
                if wlp.act(prod, i) != wlp.act(b1, wlp.act(b2, i)) {
                    return Err(WlpViolation::NotAnAction { b1, b2, i });
                }
            }
        }
    }

    for (i, s) in wlp.summands.iter().enumerate() {
        if !is_subgroup(w, s) {
            return Err(WlpViolation::SummandNotSubgroup { i });
        }
        if let Some(&x) = s.iter().find(|&&x| wlp.eps.apply(x) != 0) {
            return Err(WlpViolation::SummandOutsideKernel { i, x });
        }
    }
    for i in 0..k {
        for j in (i + 1)..k {
            for &x in &wlp.summands[i] {
                if x != 0 && wlp.summands[j].binary_search(&x).is_ok() {
                    return Err(WlpViolation::SummandsOverlap { i, j, x });
                }
                for &y in &wlp.summands[j] {
                    if w.mul(x, y) != w.mul(y, x) {
                        return Err(WlpViolation::SummandsDontCommute { i, j, x, y });
                    }
                }
            }
        }
    }

    let kernel = wlp.eps.kernel();
    let union: Vec<u32> = {
        let mut u: Vec<u32> = wlp.summands.iter().flatten().copied().collect();
        u.sort_unstable();
        u.dedup();
        u
    };
    if generated_subgroup(w, &union) != kernel {
        return Err(WlpViolation::KernelNotGenerated);
    }
    let product: u128 = wlp.summands.iter().map(|s| s.len() as u128).product();
    if product != kernel.len() as u128 {
        return Err(WlpViolation::KernelSizeMismatch { product, kernel: kernel.len() });
    }

    let sets: Vec<HashSet<u32>> = wlp
        .summands
        .iter()
        .map(|s| s.iter().copied().collect())
        .collect();
    let check_conj = |x: u32, i: usize| -> Result<(), WlpViolation> {
        let target = wlp.act(wlp.eps.apply(x), i);
        for &a in &wlp.summands[i] {
            let c = w.mul(w.mul(x, a), w.inv_of(x));
            if !sets[target].contains(&c) {
                return Err(WlpViolation::ConjugationRule { w: x, i, target });
            }
        }
        // |A_i| = |conjugate set| = |A_target| is forced by injectivity of
        // conjugation plus the size product check, so containment suffices
        if wlp.summands[i].len() != wlp.summands[target].len() {
            return Err(WlpViolation::ConjugationRule { w: x, i, target });
        }
        Ok(())
    };
    if w.order() <= EXHAUSTIVE_VERIFY_MAX {
        for x in 0..w.order() as u32 {
            for i in 0..k {
                check_conj(x, i)?;
            }
        }
    } else {
        let mut state = 0x853c49e6748fea9bu64;
        let mut next = |m: usize| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % m as u64) as usize
        };
        for _ in 0..1_000 {
            let x = next(w.order()) as u32;
            let i = next(k);
            check_conj(x, i)?;
        }
    }
    Ok(())
}

/// Left-multiplication action of B on itself (indices = element ids).
pub fn regular_action(b: &FiniteGroup) -> Vec<Vec<u32>> {
    (0..b.order() as u32)
        .map(|x| (0..b.order() as u32).map(|i| b.mul(x, i)).collect())
        .collect()
}

/// The ordinary wreath product A^{(I)} ⋊ B for a B-action on I: elements are
/// (tuple, b) pairs with id = tuple_index·|B| + b, multiplication
/// (f;b)(g;c) = (f·(b▸g); bc) where (b▸g)(i) = g(b⁻¹·i). Summand Aᵢ is the
/// tuples supported at i, and σ(b) = (1,…,1;b) is also the least id per
/// fiber.
pub fn ordinary_wreath(
    a: &Arc<FiniteGroup>,
    b: &Arc<FiniteGroup>,
    action: Vec<Vec<u32>>,
) -> Result<WreathLikeProduct, WlpError> {
    let nb = b.order();
    let na = a.order();
    if action.len() != nb || action.is_empty() {
        return Err(WlpError::Shape("action must have one row per B element".into()));
    }
    let k = action[0].len();
    if k == 0 || action.iter().any(|r| r.len() != k) {
        return Err(WlpError::Shape("action rows must share a nonempty index set".into()));
    }
    for row in &action {
        let mut seen = vec![false; k];
        for &t in row {
            if t as usize >= k || seen[t as usize] {
                return Err(WlpError::Shape("action rows must be permutations of I".into()));
            }
            seen[t as usize] = true;
        }
    }
    for b1 in 0..nb as u32 {
        for b2 in 0..nb as u32 {
            let prod = b.mul(b1, b2) as usize;
            for i in 0..k {
                if action[prod][i] != action[b1 as usize][action[b2 as usize][i] as usize] {
                    return Err(WlpError::Shape("action rows violate the action axiom".into()));
                }
            }
        }
    }

    let mut order: usize = nb;
    for _ in 0..k {
        order = order
            .checked_mul(na)
            .filter(|&o| o <= WREATH_ORDER_MAX)
            .ok_or(WlpError::Group(FinGrpError::TooLarge {
                order: usize::MAX,
                bound: WREATH_ORDER_MAX,
            }))?;
    }
    if order > WREATH_ORDER_MAX {
        return Err(WlpError::Group(FinGrpError::TooLarge { order, bound: WREATH_ORDER_MAX }));
    }

    // digit tables: element id = (Σ f(i)·|A|^i)·|B| + b
    let mut digits = vec![0u32; order * k];
    let mut b_of = vec![0u32; order];
    for id in 0..order {
        b_of[id] = (id % nb) as u32;
        let mut t = id / nb;
        for i in 0..k {
            digits[id * k + i] = (t % na) as u32;
            t /= na;
        }
    }
    let mut pow = vec![1usize; k];
    for i in 1..k {
        pow[i] = pow[i - 1] * na;
    }

    let rows: Vec<Vec<u32>> = (0..order)
        .map(|x| {
            let bx = b_of[x];
            let binv = b.inv_of(bx);
            let twist = &action[binv as usize];
            (0..order)
                .map(|y| {
                    let mut tuple = 0usize;
                    for i in 0..k {
                        let gi = digits[y * k + twist[i] as usize];
                        let hi = a.mul(digits[x * k + i], gi);
                        tuple += hi as usize * pow[i];
                    }
                    (tuple * nb + b.mul(bx, b_of[y]) as usize) as u32
                })
                .collect()
        })
        .collect();
    let w = Arc::new(validate_group(&rows)?);

    let eps = Homomorphism::new(w.clone(), b.clone(), b_of)?;
    let summands: Vec<Vec<u32>> = (0..k)
        .map(|i| (0..na).map(|v| (v * pow[i] * nb) as u32).collect())
        .collect();
    let section: Vec<u32> = (0..nb as u32).collect();
    let wlp = WreathLikeProduct::from_parts(eps, summands, action, section)?;
    debug_assert_eq!(verify_wreath_like(&wlp), Ok(()));
    Ok(wlp)
}

/// Product of all summands except `skip` (or all when skip is None), as a
/// membership set. Used to split base elements into their components.
fn complement_set(wlp: &WreathLikeProduct, skip: usize) -> HashSet<u32> {
    let gens: Vec<u32> = wlp
        .summands
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != skip)
        .flat_map(|(_, s)| s.iter().copied())
        .collect();
    generated_subgroup(wlp.group(), &gens).into_iter().collect()
}

/// The unique element of summand `i` occurring in the decomposition of the
/// base element `a`.
fn component(wlp: &WreathLikeProduct, complement: &HashSet<u32>, i: usize, a: u32) -> u32 {
    let w = wlp.group();
    let mut found = None;
    for &x in &wlp.summands[i] {
        if complement.contains(&w.mul(w.inv_of(x), a)) {
            debug_assert!(found.is_none(), "direct sum decomposition is unique");
            found = Some(x);
            #[cfg(not(debug_assertions))]
            break;
        }
    }
    found.expect("verified base decomposes over the summands")
}

/// Support of a base element: the summand indices with nontrivial component.
pub fn support(wlp: &WreathLikeProduct, a: u32) -> Result<Vec<usize>, WlpError> {
    if a as usize >= wlp.group().order() {
        return Err(WlpError::Group(FinGrpError::OutOfRange(a, wlp.group().order())));
    }
    if wlp.eps.apply(a) != 0 {
        return Err(WlpError::NotInBase(a));
    }
    let mut supp = Vec::new();
    for i in 0..wlp.index_count() {
        let complement = complement_set(wlp, i);
        if component(wlp, &complement, i, a) != 0 {
            supp.push(i);
        }
    }
    Ok(supp)
}

fn require_regular_abelian(wlp: &WreathLikeProduct) -> Result<(), WlpError> {
    if !wlp.base_is_abelian() {
        return Err(WlpError::RequiresAbelianBase);
    }
    if !wlp.is_regular() {
        return Err(WlpError::RequiresRegularForm);
    }
    Ok(())
}

fn pi_with_section(
    wlp: &WreathLikeProduct,
    section: &[u32],
    complement: &HashSet<u32>,
    xs: &[u32],
    a: u32,
) -> u32 {
    let w = wlp.group();
    let mut acc = 0u32;
    for &x in xs {
        let s = section[x as usize];
        let conj = w.mul(w.mul(w.inv_of(s), a), s);
        acc = w.mul(acc, component(wlp, complement, 0, conj));
    }
    acc
}

/// π_X(a) = Π_{x∈X} (σ(x)⁻¹ a σ(x))(1): the product over the coset X ⊆ B of
/// the reference components of the conjugates. Lives in the reference
/// summand A₀ (the copy at the identity index); section-independent, which
/// debug builds re-check with a second section.
pub fn pi_over_coset(wlp: &WreathLikeProduct, xs: &[u32], a: u32) -> Result<u32, WlpError> {
    require_regular_abelian(wlp)?;
    if wlp.eps.apply(a) != 0 {
        return Err(WlpError::NotInBase(a));
    }
    let nb = wlp.acting_group().order();
    let mut xs: Vec<u32> = xs.to_vec();
    xs.sort_unstable();
    xs.dedup();
    if xs.iter().any(|&x| x as usize >= nb) {
        return Err(WlpError::Shape("coset element outside B".into()));
    }
    let complement = complement_set(wlp, 0);
    let value = pi_with_section(wlp, &wlp.section, &complement, &xs, a);
    #[cfg(debug_assertions)]
    {
        // any other section must give the same answer
        let mut alt = wlp.section.clone();
        for b in 0..nb {
            for w in 0..wlp.group().order() as u32 {
                if wlp.eps.apply(w) == b as u32 && w != wlp.section[b] {
                    alt[b] = w;
                    break;
                }
            }
        }
        assert_eq!(value, pi_with_section(wlp, &alt, &complement, &xs, a));
    }
    Ok(value)
}

/// N_R = {a ∈ base : π_{bR}(a) = 1 for every b ∈ B}, for R ≤ B; verified
/// normal in W before returning.
pub fn n_r_subgroup(wlp: &WreathLikeProduct, r: &[u32]) -> Result<Vec<u32>, WlpError> {
    require_regular_abelian(wlp)?;
    let b = wlp.acting_group();
    if !is_subgroup(b, r) {
        return Err(WlpError::Group(FinGrpError::NotASubgroup));
    }
    let cosets = left_cosets(b, r);
    let complement = complement_set(wlp, 0);
    let mut n = Vec::new();
    'outer: for a in wlp.eps.kernel() {
        for coset in &cosets {
            if pi_with_section(wlp, &wlp.section, &complement, coset, a) != 0 {
                continue 'outer;
            }
        }
        n.push(a);
    }
    let w = wlp.group();
    assert!(is_subgroup(w, &n), "N_R is a subgroup by construction");
    for &x in &n {
        for g in 0..w.order() as u32 {
            assert!(
                n.binary_search(&w.conj(g, x)).is_ok(),
                "N_R is normal by the equivariance of the projections"
            );
        }
    }
    Ok(n)
}

/// Left cosets bR in min-representative order; each coset sorted.
fn left_cosets(b: &FiniteGroup, r: &[u32]) -> Vec<Vec<u32>> {
    let mut seen = vec![false; b.order()];
    let mut cosets = Vec::new();
    for x in 0..b.order() as u32 {
        if seen[x as usize] {
            continue;
        }
        let mut coset: Vec<u32> = r.iter().map(|&s| b.mul(x, s)).collect();
        coset.sort_unstable();
        for &c in &coset {
            seen[c as usize] = true;
        }
        cosets.push(coset);
    }
    cosets
}

/// W/N_R as a wreath-like product over I = B/R: summand at the coset bR is
/// the image of A^{(bR)} = ⊕_{x∈bR} A_x, each isomorphic to A; ε descends
/// since N_R lies in the base. The result is untwisted.
pub fn untwisted_quotient(
    wlp: &WreathLikeProduct,
    r: &[u32],
) -> Result<WreathLikeProduct, WlpError> {
    let n = n_r_subgroup(wlp, r)?;
    let w = wlp.group();
    let b = wlp.acting_group();
    let (q, proj) = quotient_by_normal(w, &n)?;
    let cosets = left_cosets(b, r);
    let mut coset_of = vec![usize::MAX; b.order()];
    for (idx, c) in cosets.iter().enumerate() {
        for &x in c {
            coset_of[x as usize] = idx;
        }
    }

    let summands: Vec<Vec<u32>> = cosets
        .iter()
        .map(|coset| {
            // product set of the summands across the coset, then its image
            let mut prod: Vec<u32> = vec![0];
            for &x in coset {
                let mut next = Vec::with_capacity(prod.len() * wlp.summands[x as usize].len());
                for &p in &prod {
                    for &a in &wlp.summands[x as usize] {
                        next.push(w.mul(p, a));
                    }
                }
                prod = next;
            }
            let mut img: Vec<u32> = prod.iter().map(|&p| proj.apply(p)).collect();
            img.sort_unstable();
            img.dedup();
            img
        })
        .collect();

    // ε factors through the quotient because N_R ⊆ ker ε
    let mut image = vec![u32::MAX; q.order()];
    for x in 0..w.order() as u32 {
        let qx = proj.apply(x) as usize;
        let bx = wlp.eps.apply(x);
        if image[qx] == u32::MAX {
            image[qx] = bx;
        } else {
            assert_eq!(image[qx], bx, "N_R lies inside ker ε");
        }
    }
    let eps = Homomorphism::new(q, b.clone(), image)?;

    let action: Vec<Vec<u32>> = (0..b.order() as u32)
        .map(|x| {
            cosets
                .iter()
                .map(|c| coset_of[b.mul(x, c[0]) as usize] as u32)
                .collect()
        })
        .collect();
    let section = WreathLikeProduct::canonical_section(&eps);
    let out = WreathLikeProduct::from_parts(eps, summands, action, section)?;
    debug_assert_eq!(verify_wreath_like(&out), Ok(()));
    debug_assert!(is_untwisted(&out));
    Ok(out)
}

/// Untwisted: every w whose ε-image stabilizes i centralizes Aᵢ.
pub fn is_untwisted(wlp: &WreathLikeProduct) -> bool {
    let w = wlp.group();
    for i in 0..wlp.index_count() {
        for x in 0..w.order() as u32 {
            if wlp.act(wlp.eps.apply(x), i) != i {
                continue;
            }
            for &a in &wlp.summands[i] {
                if w.mul(x, a) != w.mul(a, x) {
                    return false;
                }
            }
        }
    }
    true
}

/// Restricts to a subgroup V ≤ W containing the base. Without regrouping the
/// result is V ∈ WR(A, ε(V) ↷ I) with the same summands; with `regroup` (the
/// regular case) the summands over each right ε(V)-coset of B are bundled
/// into one, giving a regular wreath-like product of ε(V) with summand
/// A^{(T)} for a right transversal T.
pub fn restrict_to_subgroup(
    wlp: &WreathLikeProduct,
    v: &[u32],
    regroup: bool,
) -> Result<WreathLikeProduct, WlpError> {
    let w = wlp.group();
    let b = wlp.acting_group();
    if !is_subgroup(w, v) {
        return Err(WlpError::Group(FinGrpError::NotASubgroup));
    }
    let kernel = wlp.eps.kernel();
    if kernel.iter().any(|k| v.binary_search(k).is_err()) {
        return Err(WlpError::BaseNotContained);
    }
    let (vg, emb) = subgroup_group(w, v)?;
    let vg = Arc::new(vg);
    let mut pos = vec![u32::MAX; w.order()];
    for (new, &old) in emb.iter().enumerate() {
        pos[old as usize] = new as u32;
    }
    let mut e_set: Vec<u32> = v.iter().map(|&x| wlp.eps.apply(x)).collect();
    e_set.sort_unstable();
    e_set.dedup();
    let (eg, bemb) = subgroup_group(b, &e_set)?;
    let eg = Arc::new(eg);
    let mut bpos = vec![u32::MAX; b.order()];
    for (new, &old) in bemb.iter().enumerate() {
        bpos[old as usize] = new as u32;
    }
    let image: Vec<u32> = emb.iter().map(|&x| bpos[wlp.eps.apply(x) as usize]).collect();
    let eps = Homomorphism::new(vg.clone(), eg.clone(), image)?;
    let section = WreathLikeProduct::canonical_section(&eps);

    let out = if !regroup {
        let summands: Vec<Vec<u32>> = wlp
            .summands
            .iter()
            .map(|s| s.iter().map(|&x| pos[x as usize]).collect())
            .collect();
        let action: Vec<Vec<u32>> = bemb.iter().map(|&be| wlp.action[be as usize].clone()).collect();
        WreathLikeProduct::from_parts(eps, summands, action, section)?
    } else {
        if !wlp.is_regular() {
            return Err(WlpError::RequiresRegularForm);
        }
        // right cosets Et partition B = I; E acts regularly on each
        let mut coset_rep = vec![u32::MAX; b.order()];
        let mut reps = Vec::new();
        for x in 0..b.order() as u32 {
            if coset_rep[x as usize] != u32::MAX {
                continue;
            }
            reps.push(x);
            for &e in &e_set {
                coset_rep[b.mul(e, x) as usize] = x;
            }
        }
        let summands: Vec<Vec<u32>> = e_set
            .iter()
            .map(|&e| {
                let mut prod: Vec<u32> = vec![0];
                for &t in &reps {
                    let i = b.mul(e, t) as usize;
                    let mut next = Vec::with_capacity(prod.len() * wlp.summands[i].len());
                    for &p in &prod {
                        for &a in &wlp.summands[i] {
                            next.push(w.mul(p, a));
                        }
                    }
                    prod = next;
                }
                let mut s: Vec<u32> = prod.iter().map(|&x| pos[x as usize]).collect();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        let action = regular_action(&eg);
        WreathLikeProduct::from_parts(eps, summands, action, section)?
    };
    debug_assert_eq!(verify_wreath_like(&out), Ok(()));
    Ok(out)
}

/// W/⟨⟨N⟩⟩ for N normal in the reference summand A₀, propagated to every
/// summand through the W-conjugation identifications (the action must be
/// transitive so every summand is reached). Summands map to their images.
pub fn quotient_base_by_normal(
    wlp: &WreathLikeProduct,
    n_ref: &[u32],
) -> Result<WreathLikeProduct, WlpError> {
    let w = wlp.group();
    let b = wlp.acting_group();
    let ref_summand = &wlp.summands[0];
    if !is_subgroup(w, n_ref) || n_ref.iter().any(|x| ref_summand.binary_search(x).is_err()) {
        return Err(WlpError::Group(FinGrpError::NotASubgroup));
    }
    for &a in ref_summand {
        for &x in n_ref {
            if n_ref.binary_search(&w.conj(a, x)).is_err() {
                return Err(WlpError::Group(FinGrpError::NotNormal { by: a, element: x }));
            }
        }
    }
    // transitivity: every index reachable from 0
    let mut reached = vec![false; wlp.index_count()];
    for x in 0..b.order() as u32 {
        reached[wlp.act(x, 0)] = true;
    }
    if !reached.iter().all(|&r| r) {
        return Err(WlpError::ActionNotTransitive);
    }

    let closure = normal_closure(w, n_ref);
    let (q, proj) = quotient_by_normal(w, &closure)?;
    let summands: Vec<Vec<u32>> = wlp
        .summands
        .iter()
        .map(|s| {
            let mut img: Vec<u32> = s.iter().map(|&x| proj.apply(x)).collect();
            img.sort_unstable();
            img.dedup();
            img
        })
        .collect();
    let mut image = vec![u32::MAX; q.order()];
    for x in 0..w.order() as u32 {
        let qx = proj.apply(x) as usize;
        let bx = wlp.eps.apply(x);
        if image[qx] == u32::MAX {
            image[qx] = bx;
        } else {
            assert_eq!(image[qx], bx, "⟨⟨N⟩⟩ lies inside ker ε");
        }
    }
    let eps = Homomorphism::new(q, b.clone(), image)?;
    let section = WreathLikeProduct::canonical_section(&eps);
    let out = WreathLikeProduct::from_parts(eps, summands, wlp.action.clone(), section)?;
    debug_assert_eq!(verify_wreath_like(&out), Ok(()));
    Ok(out)
}
