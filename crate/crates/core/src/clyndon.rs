//! Cohen–Lyndon constructions: the W(G,H) relator scheme over free products
//! of finite groups, the f-generator families with free-factor certificates,
//! coset labels modulo the normal closure of a free factor, bounded
//! malnormality checks, and transversal composition.

use std::collections::HashMap;
use std::sync::Arc;

use num_rational::Ratio;
use thiserror::Error;

use crate::cosetenum::{quotient_group, todd_coxeter, CosetEnumError};
use crate::fingrp::{generated_subgroup, is_subgroup, FinGrpError, FiniteGroup, Homomorphism};
use crate::smallcanc::{
    check_small_cancellation, tietze_eliminate, Presentation, SmallCancError,
};
use crate::stallings::{is_basis_of_ambient, rewrite_in_basis, StallingsError};
use crate::wlp::{regular_action, verify_wreath_like, WlpError, WreathLikeProduct};
use crate::words::{letter_gen, Alphabet, Letter, Word, WordError};

#[derive(Debug, Error)]
pub enum ClyndonError {
    #[error(transparent)]
    Words(#[from] WordError),
    #[error(transparent)]
    SmallCanc(#[from] SmallCancError),
    #[error(transparent)]
    Coset(#[from] CosetEnumError),
    #[error(transparent)]
    Stallings(#[from] StallingsError),
    #[error(transparent)]
    Group(#[from] FinGrpError),
    #[error(transparent)]
    Wlp(#[from] WlpError),
    #[error("factor {factor} did not close within {budget} cosets; finite factors required")]
    RequiresFiniteFactors { factor: usize, budget: usize },
    #[error("enumeration inconclusive within {budget} cosets")]
    EnumerationInconclusive { budget: usize },
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("the given words do not split the ambient free group")]
    InvalidSplit,
    #[error("products ({i},{j}) and ({k},{l}) land in the same coset")]
    NotATransversal { i: usize, j: usize, k: usize, l: usize },
}

/// A free product A∗B of two finitely presented finite groups, with the
/// factors enumerated: the combined presentation uses the disjoint union of
/// the generator names and exactly the factor relators, and every factor
/// element carries a representative word over the combined alphabet.
#[derive(Debug, Clone)]
pub struct FreeProductPresentation {
    factors: [Presentation; 2],
    combined: Presentation,
    groups: [Arc<FiniteGroup>; 2],
    gen_images: [Vec<u32>; 2],
    /// element id → representative word over the combined alphabet
    element_words: [Vec<Word>; 2],
    offsets: [usize; 2],
}

fn shift_word(w: &Word, offset: usize) -> Word {
    let off = offset as i32;
    Word::from_reduced(
        w.letters()
            .iter()
            .map(|&l| if l > 0 { l + off } else { l - off })
            .collect(),
    )
}

/// Representative words for every element: breadth-first over the generator
/// images, slots in generator order, so ids get the shortest, earliest word.
fn bfs_element_words(g: &FiniteGroup, images: &[u32]) -> Vec<Word> {
    let mut words: Vec<Option<Word>> = vec![None; g.order()];
    words[0] = Some(Word::empty());
    let mut queue = std::collections::VecDeque::from([0u32]);
    while let Some(x) = queue.pop_front() {
        for (j, &img) in images.iter().enumerate() {
            for sign in [1i32, -1] {
                let l = sign * (j as i32 + 1);
                let y = if sign > 0 {
                    g.mul(x, img)
                } else {
                    g.mul(x, g.inv_of(img))
                };
                if words[y as usize].is_none() {
                    let w = words[x as usize].clone().unwrap().product(&Word::single(l));
                    words[y as usize] = Some(w);
                    queue.push_back(y);
                }
            }
        }
    }
    words
        .into_iter()
        .map(|w| w.expect("generator images generate the quotient"))
        .collect()
}

impl FreeProductPresentation {
    /// Builds A∗B, enumerating both factors with the given coset budget.
    pub fn new(
        a: Presentation,
        b: Presentation,
        budget: usize,
    ) -> Result<FreeProductPresentation, ClyndonError> {
        let mut names: Vec<String> = a.alphabet().names().to_vec();
        names.extend(b.alphabet().names().iter().cloned());
        let combined_alphabet = Alphabet::new(&names)?;
        let offsets = [0usize, a.alphabet().rank()];
        let mut relators: Vec<Word> = a.relators().to_vec();
        relators.extend(b.relators().iter().map(|r| shift_word(r, offsets[1])));
        let combined = Presentation::new(combined_alphabet, relators)?;

        let mut groups = Vec::with_capacity(2);
        let mut gen_images = Vec::with_capacity(2);
        let mut element_words = Vec::with_capacity(2);
        for (idx, f) in [&a, &b].into_iter().enumerate() {
            let table = todd_coxeter(f, &[], budget)?;
            if !table.is_closed() {
                return Err(ClyndonError::RequiresFiniteFactors { factor: idx, budget });
            }
            let (g, images) = quotient_group(&table)?;
            let words = bfs_element_words(&g, &images)
                .into_iter()
                .map(|w| shift_word(&w, offsets[idx]))
                .collect();
            groups.push(g);
            gen_images.push(images);
            element_words.push(words);
        }
        let groups: [Arc<FiniteGroup>; 2] = [groups.remove(0), groups.remove(0)];
        let gen_images: [Vec<u32>; 2] = [gen_images.remove(0), gen_images.remove(0)];
        let element_words: [Vec<Word>; 2] = [element_words.remove(0), element_words.remove(0)];
        Ok(FreeProductPresentation {
            factors: [a, b],
            combined,
            groups,
            gen_images,
            element_words,
            offsets,
        })
    }

    pub fn combined(&self) -> &Presentation {
        &self.combined
    }

    pub fn factor(&self, i: usize) -> &Presentation {
        &self.factors[i]
    }

    pub fn factor_group(&self, i: usize) -> &Arc<FiniteGroup> {
        &self.groups[i]
    }

    pub fn factor_gen_images(&self, i: usize) -> &[u32] {
        &self.gen_images[i]
    }

    /// Generator id offset of factor i inside the combined alphabet.
    pub fn factor_offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    /// Representative of a factor element over the combined alphabet.
    pub fn element_word(&self, factor: usize, element: u32) -> &Word {
        &self.element_words[factor][element as usize]
    }
}

/// The W(G,H) presentation for G = A∗B and H = A: the factor relators plus
/// commutators [h_p, t h_q t⁻¹] over all ordered generator pairs of A and
/// all nontrivial elements t of B. The normal closure of the finite
/// commutator list equals the closure of the full conjugation-closed family,
/// since G/⟨⟨H⟩⟩ ≅ B makes the t's a transversal.
pub fn wgh_presentation(fp: &FreeProductPresentation) -> Presentation {
    let mut relators = fp.combined.relators().to_vec();
    let a_rank = fp.factors[0].alphabet().rank();
    for p in 0..a_rank {
        let hp = Word::single(p as i32 + 1);
        for q in 0..a_rank {
            let hq = Word::single(q as i32 + 1);
            for t in 1..fp.groups[1].order() as u32 {
                let tw = fp.element_word(1, t);
                let conj = tw.product(&hq).product(&tw.inverse());
                let comm = hp
                    .product(&conj)
                    .product(&hp.inverse())
                    .product(&conj.inverse());
                relators.push(comm);
            }
        }
    }
    Presentation::new(fp.combined.alphabet().clone(), relators)
        .expect("commutator relators are valid words")
}

/// Enumerates W(A∗B, A) and extracts its wreath-like structure: ε kills the
/// A-generators, the reference summand is the image of A, and the other
/// summands are its section conjugates. The result is fully verified.
pub fn wgh_wreath_like(
    fp: &FreeProductPresentation,
    budget: usize,
) -> Result<WreathLikeProduct, ClyndonError> {
    let p = wgh_presentation(fp);
    let table = todd_coxeter(&p, &[], budget)?;
    if !table.is_closed() {
        return Err(ClyndonError::EnumerationInconclusive { budget });
    }
    let (w, images) = quotient_group(&table)?;
    let b = fp.groups[1].clone();
    let a_rank = fp.factors[0].alphabet().rank();

    // ε by breadth-first propagation along generator multiplication
    let mut eps = vec![u32::MAX; w.order()];
    eps[0] = 0;
    let mut queue = std::collections::VecDeque::from([0u32]);
    while let Some(x) = queue.pop_front() {
        for (j, &img) in images.iter().enumerate() {
            let y = w.mul(x, img);
            if eps[y as usize] == u32::MAX {
                let bj = if j < a_rank {
                    0
                } else {
                    fp.gen_images[1][j - a_rank]
                };
                eps[y as usize] = b.mul(eps[x as usize], bj);
                queue.push_back(y);
            }
        }
    }
    let eps = Homomorphism::new(w.clone(), b.clone(), eps)?;

    let mut section = vec![u32::MAX; b.order()];
    for x in 0..w.order() as u32 {
        let bx = eps.apply(x) as usize;
        if section[bx] == u32::MAX {
            section[bx] = x;
        }
    }
    let a0 = generated_subgroup(&w, &images[..a_rank]);
    let summands: Vec<Vec<u32>> = (0..b.order())
        .map(|i| {
            let s = section[i];
            let mut conj: Vec<u32> = a0
                .iter()
                .map(|&x| w.mul(w.mul(s, x), w.inv_of(s)))
                .collect();
            conj.sort_unstable();
            conj
        })
        .collect();
    let action = regular_action(&b);
    let wlp = WreathLikeProduct::from_parts(eps, summands, action, section)?;
    verify_wreath_like(&wlp).map_err(WlpError::Violation)?;
    Ok(wlp)
}

/// The generator family r_i = f_{(i−1)k+1}·f_{(i−1)k+2}^m ⋯ f_{(i−1)k+k}^m
/// over the free group on k·n generators f1..f{kn}.
#[derive(Debug, Clone)]
pub struct F7nFamily {
    pub alphabet: Alphabet,
    pub relators: Vec<Word>,
    /// k < 7 is allowed for negative tests but flagged.
    pub small_k_warning: bool,
}

pub fn f7n_generators(k: usize, n: usize, m: u32) -> Result<F7nFamily, ClyndonError> {
    if k < 2 {
        return Err(ClyndonError::BadParams(format!("k must be at least 2, got {k}")));
    }
    if n < 1 {
        return Err(ClyndonError::BadParams("n must be at least 1".into()));
    }
    if m < 2 {
        return Err(ClyndonError::BadParams(format!("m must be at least 2, got {m}")));
    }
    let names: Vec<String> = (1..=k * n).map(|i| format!("f{i}")).collect();
    let alphabet = Alphabet::new(&names)?;
    let relators = (0..n)
        .map(|i| {
            let mut w = Word::single((i * k) as i32 + 1);
            for j in 1..k {
                w = w.product(&Word::single((i * k + j) as i32 + 1).pow(m));
            }
            debug_assert_eq!(w.len(), 1 + (k - 1) * m as usize);
            w
        })
        .collect();
    Ok(F7nFamily { alphabet, relators, small_k_warning: k < 7 })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct F7nReport {
    /// strict C'(1/6) for the presentation ⟨f1..fkn | r1..rn⟩
    pub c16: bool,
    /// {rᵢ} ∪ {f_{(i−1)k+j} : j = 2..k} is a basis of the ambient free group
    pub free_factor: bool,
    /// rank of F_{kn}/⟨⟨r₁..r_n⟩⟩ after eliminating each rᵢ's lead generator
    pub quotient_free_rank: usize,
    pub small_k_warning: bool,
}

/// Checks the three claims about the family: small cancellation, free-factor
/// membership, and the free quotient of rank (k−1)n.
pub fn verify_f7n(k: usize, n: usize, m: u32) -> Result<F7nReport, ClyndonError> {
    let family = f7n_generators(k, n, m)?;
    let p = Presentation::new(family.alphabet.clone(), family.relators.clone())?;
    let c16 = check_small_cancellation(&p, Ratio::new(1, 6)).satisfied;

    let rank = k * n;
    let mut candidate = family.relators.clone();
    for i in 0..n {
        for j in 1..k {
            candidate.push(Word::single((i * k + j) as i32 + 1));
        }
    }
    let free_factor = is_basis_of_ambient(rank, &candidate)?;

    // each rᵢ contains its lead generator exactly once and no other relator
    // mentions it, so n eliminations empty the relator list
    let mut q = p;
    for i in 0..n {
        q = tietze_eliminate(&q, &format!("f{}", i * k + 1))?;
    }
    debug_assert!(q.relators().is_empty());
    let quotient_free_rank = q.alphabet().rank();
    Ok(F7nReport { c16, free_factor, quotient_free_rank, small_k_warning: family.small_k_warning })
}

/// A certified splitting F = H ∗ L of the free group of the given rank: the
/// concatenation of the two bases is verified to be a basis of the ambient
/// group, so killing H computes the quotient map F → F/⟨⟨H⟩⟩ ≅ L.
#[derive(Debug, Clone)]
pub struct NormalClosureContext {
    rank: usize,
    h_basis: Vec<Word>,
    l_basis: Vec<Word>,
}

impl NormalClosureContext {
    pub fn new(
        rank: usize,
        h_basis: Vec<Word>,
        l_basis: Vec<Word>,
    ) -> Result<NormalClosureContext, ClyndonError> {
        let mut all = h_basis.clone();
        all.extend(l_basis.iter().cloned());
        if !is_basis_of_ambient(rank, &all)? {
            return Err(ClyndonError::InvalidSplit);
        }
        Ok(NormalClosureContext { rank, h_basis, l_basis })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn h_basis(&self) -> &[Word] {
        &self.h_basis
    }

    pub fn l_basis(&self) -> &[Word] {
        &self.l_basis
    }

    /// The coset label of w modulo ⟨⟨H⟩⟩: rewrite w over the split basis,
    /// delete the H-letters, and read the rest as a word over L's own
    /// alphabet (letter j ↔ l_basis[j]).
    pub fn coset_label(&self, w: &Word) -> Result<Word, ClyndonError> {
        let mut basis = self.h_basis.clone();
        basis.extend(self.l_basis.iter().cloned());
        let rewritten = rewrite_in_basis(self.rank, &basis, w)?;
        let h = self.h_basis.len() as i32;
        let letters: Vec<Letter> = rewritten
            .letters()
            .iter()
            .filter(|&&l| letter_gen(l) >= self.h_basis.len())
            .map(|&l| if l > 0 { l - h } else { l + h })
            .collect();
        Ok(Word::normalize(&letters)?)
    }

    /// Membership in ⟨⟨H⟩⟩: the coset label is trivial.
    pub fn in_normal_closure(&self, w: &Word) -> Result<bool, ClyndonError> {
        Ok(self.coset_label(w)?.is_empty())
    }
}

/// Backwards-compatible functional form of the coset computation.
pub fn coset_of_normal_closure(
    rank: usize,
    h_basis: &[Word],
    l_basis: &[Word],
    w: &Word,
) -> Result<Word, ClyndonError> {
    NormalClosureContext::new(rank, h_basis.to_vec(), l_basis.to_vec())?.coset_label(w)
}

/// Free product element in syllable normal form: alternating (factor, elem)
/// pairs with nontrivial elements.
type Syllables = Vec<(usize, u32)>;

fn syllable_mul(groups: &[Arc<FiniteGroup>; 2], u: &[(usize, u32)], v: &[(usize, u32)]) -> Syllables {
    let mut out: Syllables = u.to_vec();
    for &(f, e) in v {
        match out.last().copied() {
            Some((lf, le)) if lf == f => {
                let prod = groups[f].mul(le, e);
                out.pop();
                if prod != 0 {
                    out.push((f, prod));
                }
            }
            _ => out.push((f, e)),
        }
    }
    out
}

fn syllable_inverse(groups: &[Arc<FiniteGroup>; 2], u: &[(usize, u32)]) -> Syllables {
    u.iter()
        .rev()
        .map(|&(f, e)| (f, groups[f].inv_of(e)))
        .collect()
}

/// All normal forms with at most `radius` syllables.
fn short_elements(groups: &[Arc<FiniteGroup>; 2], radius: usize) -> Vec<Syllables> {
    let mut out: Vec<Syllables> = vec![Vec::new()];
    let mut frontier: Vec<Syllables> = vec![Vec::new()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for u in &frontier {
            for f in 0..2 {
                if u.last().is_some_and(|&(lf, _)| lf == f) {
                    continue;
                }
                for e in 1..groups[f].order() as u32 {
                    let mut v = u.clone();
                    v.push((f, e));
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Bounded malnormality of H = the first factor in A∗B: checks
/// H ∩ gHg⁻¹ = {1} for every normal form g of at most `radius` syllables
/// outside H. True is a certificate only up to the radius.
pub fn check_malnormal_bounded(fp: &FreeProductPresentation, radius: usize) -> bool {
    let groups = &fp.groups;
    for g in short_elements(groups, radius) {
        // elements of H itself are exempt
        if g.is_empty() || (g.len() == 1 && g[0].0 == 0) {
            continue;
        }
        let ginv = syllable_inverse(groups, &g);
        for h in 1..groups[0].order() as u32 {
            let conj = syllable_mul(groups, &syllable_mul(groups, &g, &[(0, h)]), &ginv);
            let in_h = conj.len() == 1 && conj[0].0 == 0;
            if in_h {
                return false;
            }
        }
    }
    true
}

/// Exhaustive malnormality for a subgroup of a finite group.
pub fn check_malnormal_finite(g: &FiniteGroup, h: &[u32]) -> Result<bool, ClyndonError> {
    if !is_subgroup(g, h) {
        return Err(ClyndonError::Group(FinGrpError::NotASubgroup));
    }
    for x in 0..g.order() as u32 {
        if h.binary_search(&x).is_ok() {
            continue;
        }
        for &e in h {
            if e != 0 && h.binary_search(&g.conj(x, e)).is_ok() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Composes transversals along a chain: the products t·s (t outer, s inner)
/// are returned once all pairs are verified to lie in distinct cosets of the
/// context's normal closure; the first collision (in product order) is the
/// witness.
pub fn compose_transversals(
    ctx: &NormalClosureContext,
    t: &[Word],
    s: &[Word],
) -> Result<Vec<Word>, ClyndonError> {
    let mut seen: HashMap<Vec<Letter>, (usize, usize)> = HashMap::new();
    let mut out = Vec::with_capacity(t.len() * s.len());
    for (i, tw) in t.iter().enumerate() {
        for (j, sw) in s.iter().enumerate() {
            let prod = tw.product(sw);
            let label = ctx.coset_label(&prod)?;
            if let Some(&(k, l)) = seen.get(label.letters()) {
                return Err(ClyndonError::NotATransversal { i: k, j: l, k: i, l: j });
            }
            seen.insert(label.letters().to_vec(), (i, j));
            out.push(prod);
        }
    }
    Ok(out)
}
