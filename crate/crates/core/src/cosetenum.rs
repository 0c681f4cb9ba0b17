//! Todd–Coxeter coset enumeration: turns a presentation plus a subgroup into
//! a coset action, and a closed regular table into a `FiniteGroup`.

use std::collections::VecDeque;
use std::sync::Arc;

use thiserror::Error;

use crate::fingrp::{validate_group, FinGrpError, FiniteGroup};
use crate::smallcanc::Presentation;
use crate::words::{letter_gen, letter_is_positive, Word};

const UNDEF: u32 = u32::MAX;

#[derive(Debug, Error)]
pub enum CosetEnumError {
    #[error("coset budget must be at least 1")]
    BadBudget,
    #[error("word uses generator index {0} but the presentation has rank {1}")]
    AlphabetMismatch(usize, usize),
    #[error("coset table is not closed")]
    NotClosed,
    #[error("operation requires a table enumerated over the trivial subgroup")]
    NotRegular,
    #[error(transparent)]
    Group(#[from] FinGrpError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableStatus {
    Closed,
    /// Budget ran out. Inconclusive: says nothing about the true index.
    Exceeded { budget: usize },
}

/// Right action of the generators on cosets. Closed tables are standardized
/// (cosets renumbered by breadth-first order from coset 0), so equal
/// enumeration problems produce byte-identical tables regardless of budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetTable {
    rank: usize,
    rows: Vec<Vec<u32>>,
    regular: bool,
    status: TableStatus,
}

impl CosetTable {
    pub fn status(&self) -> &TableStatus {
        &self.status
    }

    pub fn is_closed(&self) -> bool {
        self.status == TableStatus::Closed
    }

    /// Subgroup index; defined only for closed tables.
    pub fn index(&self) -> Option<usize> {
        self.is_closed().then_some(self.rows.len())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of live cosets tracked (for Exceeded tables: at abort time).
    pub fn coset_count(&self) -> usize {
        self.rows.len()
    }

    fn slot(&self, coset: u32, s: usize) -> Option<u32> {
        let e = self.rows[coset as usize][s];
        (e != UNDEF).then_some(e)
    }

    /// Coset reached from `from` by reading `w` left to right.
    pub fn trace(&self, from: u32, w: &Word) -> Option<u32> {
        let mut c = from;
        for &l in w.letters() {
            let g = letter_gen(l);
            if g >= self.rank {
                return None;
            }
            c = self.slot(c, 2 * g + usize::from(!letter_is_positive(l)))?;
        }
        Some(c)
    }

    /// One permutation per generator (its action on cosets); closed only.
    pub fn generator_permutations(&self) -> Option<Vec<Vec<u32>>> {
        if !self.is_closed() {
            return None;
        }
        Some(
            (0..self.rank)
                .map(|g| self.rows.iter().map(|r| r[2 * g]).collect())
                .collect(),
        )
    }
}

struct Enumerator {
    width: usize,
    max_cosets: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    alive: usize,
    pending: VecDeque<(u32, u32)>,
    relators: Vec<Vec<usize>>,
    subgens: Vec<Vec<usize>>,
}

enum Scan {
    Done,
    BudgetHit,
}

impl Enumerator {
    fn new(rank: usize, relators: Vec<Vec<usize>>, subgens: Vec<Vec<usize>>, max_cosets: usize) -> Enumerator {
        let width = 2 * rank.max(1);
        Enumerator {
            width,
            max_cosets,
            table: vec![UNDEF; width],
            parent: vec![0],
            alive: 1,
            pending: VecDeque::new(),
            relators,
            subgens,
        }
    }

    fn count(&self) -> usize {
        self.parent.len()
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    /// Entry with lazy rewriting: stale coset ids resolve through find().
    fn entry(&mut self, c: u32, s: usize) -> u32 {
        let raw = self.table[c as usize * self.width + s];
        if raw == UNDEF {
            return UNDEF;
        }
        let rep = self.find(raw);
        self.table[c as usize * self.width + s] = rep;
        rep
    }

    /// Sets c·s = d together with the reverse edge d·s⁻¹ = c.
    fn set(&mut self, c: u32, s: usize, d: u32) {
        self.table[c as usize * self.width + s] = d;
        self.table[d as usize * self.width + (s ^ 1)] = c;
    }

    fn define(&mut self, c: u32, s: usize) -> Option<u32> {
        if self.alive >= self.max_cosets {
            return None;
        }
        let id = self.count() as u32;
        self.table.extend(std::iter::repeat(UNDEF).take(self.width));
        self.parent.push(id);
        self.alive += 1;
        self.set(c, s, id);
        Some(id)
    }

    fn coincide(&mut self, a: u32, b: u32) {
        self.pending.push_back((a, b));
        while let Some((x, y)) = self.pending.pop_front() {
            let x = self.find(x);
            let y = self.find(y);
            if x == y {
                continue;
            }
            // keep the smaller id so numbering stays definition-ordered
            let (surv, dead) = if x < y { (x, y) } else { (y, x) };
            self.parent[dead as usize] = surv;
            self.alive -= 1;
            for s in 0..self.width {
                let raw = self.table[dead as usize * self.width + s];
                if raw == UNDEF {
                    continue;
                }
                let d = self.find(raw);
                let g = self.table[surv as usize * self.width + s];
                if g == UNDEF {
                    // reverse edge already resolves to surv through find()
                    self.table[surv as usize * self.width + s] = d;
                } else {
                    let g = self.find(g);
                    if g != d {
                        self.pending.push_back((g, d));
                    }
                }
            }
        }
    }

    /// Traces `rel` from both ends of coset c. A closed gap of width 0 forces
    /// a coincidence, width 1 a deduction; wider gaps are filled with new
    /// cosets when `fill` is set and left alone otherwise.
    fn scan(&mut self, c: u32, rel: &[usize], fill: bool) -> Scan {
        let mut f = self.find(c);
        let mut b = f;
        let mut i = 0;
        let mut j = rel.len();
        loop {
            while i < j {
                let t = self.entry(f, rel[i]);
                if t == UNDEF {
                    break;
                }
                f = t;
                i += 1;
            }
            while j > i {
                let t = self.entry(b, rel[j - 1] ^ 1);
                if t == UNDEF {
                    break;
                }
                b = t;
                j -= 1;
            }
            if i == j {
                if f != b {
                    self.coincide(f, b);
                }
                return Scan::Done;
            }
            if i + 1 == j {
                // both facing slots are undefined, so this cannot clobber
                self.set(f, rel[i], b);
                return Scan::Done;
            }
            if !fill {
                return Scan::Done;
            }
            match self.define(f, rel[i]) {
                Some(t) => {
                    f = t;
                    i += 1;
                }
                None => return Scan::BudgetHit,
            }
        }
    }

    /// Deduction-only pass over every live coset; returns cosets freed.
    fn lookahead(&mut self) -> usize {
        let before = self.alive;
        let mut c = 0u32;
        while (c as usize) < self.count() {
            if self.find(c) == c {
                let rels = std::mem::take(&mut self.relators);
                for rel in &rels {
                    self.scan(c, rel, false);
                    if self.find(c) != c {
                        break;
                    }
                }
                self.relators = rels;
            }
            c += 1;
        }
        before - self.alive
    }

    /// Scan retry loop: on budget pressure run a lookahead and retry once
    /// space was reclaimed; dead scan targets are simply dropped.
    fn scan_to_done(&mut self, c: u32, rel: &[usize]) -> Result<(), ()> {
        loop {
            if self.find(c) != c {
                return Ok(());
            }
            match self.scan(c, rel, true) {
                Scan::Done => return Ok(()),
                Scan::BudgetHit => {
                    if self.lookahead() == 0 {
                        return Err(());
                    }
                }
            }
        }
    }

    fn compact(&mut self, cursor: &mut u32) {
        debug_assert!(self.pending.is_empty());
        let count = self.count();
        let mut map = vec![UNDEF; count];
        let mut next = 0u32;
        for old in 0..count as u32 {
            if self.find(old) == old {
                map[old as usize] = next;
                next += 1;
            }
        }
        let mut nt = vec![UNDEF; next as usize * self.width];
        for old in 0..count as u32 {
            let new = map[old as usize];
            if new == UNDEF {
                continue;
            }
            for s in 0..self.width {
                let e = self.table[old as usize * self.width + s];
                if e != UNDEF {
                    let rep = self.find(e);
                    nt[new as usize * self.width + s] = map[rep as usize];
                }
            }
        }
        *cursor = map[self.find(*cursor) as usize];
        self.table = nt;
        self.parent = (0..next).collect();
        debug_assert_eq!(self.alive, next as usize);
    }

    fn run(&mut self) -> Result<TableStatus, TableStatus> {
        let subgens = std::mem::take(&mut self.subgens);
        for w in &subgens {
            if self.scan_to_done(0, w).is_err() {
                self.subgens = subgens;
                return Err(TableStatus::Exceeded { budget: self.max_cosets });
            }
        }
        self.subgens = subgens;

        let mut c = 0u32;
        while (c as usize) < self.count() {
            if self.find(c) != c {
                c += 1;
                continue;
            }
            if self.count() >= 2 * self.max_cosets {
                self.compact(&mut c);
            }
            let rels = std::mem::take(&mut self.relators);
            for rel in &rels {
                if self.scan_to_done(c, rel).is_err() {
                    self.relators = rels;
                    return Err(TableStatus::Exceeded { budget: self.max_cosets });
                }
                if self.find(c) != c {
                    break;
                }
            }
            self.relators = rels;
            // row filling: every slot of a surviving cursor row gets defined
            if self.find(c) == c {
                for s in 0..self.width {
                    if self.find(c) != c {
                        break;
                    }
                    if self.entry(c, s) == UNDEF {
                        loop {
                            match self.define(c, s) {
                                Some(_) => break,
                                None => {
                                    if self.lookahead() == 0 {
                                        return Err(TableStatus::Exceeded { budget: self.max_cosets });
                                    }
                                    if self.find(c) != c || self.entry(c, s) != UNDEF {
                                        break;
                                    }
                                }
                            }
                        }
                    }
                }
            }
            c += 1;
        }

        // re-verify to a fixpoint: every relator fixes every coset, every
        // subgroup generator fixes coset 0, every live row is total
        loop {
            let root = self.find(0);
            debug_assert_eq!(root, 0, "coset 0 always has the least id");
            let mut changes = 0usize;
            let subgens = std::mem::take(&mut self.subgens);
            for w in &subgens {
                let end = self.trace_rep(root, w);
                assert_ne!(end, UNDEF, "closed table must trace subgroup generators");
                if end != self.find(root) {
                    changes += 1;
                    let r = self.find(root);
                    self.coincide(end, r);
                }
            }
            self.subgens = subgens;
            let mut c = 0u32;
            while (c as usize) < self.count() {
                if self.find(c) != c {
                    c += 1;
                    continue;
                }
                for s in 0..self.width {
                    assert_ne!(self.entry(c, s), UNDEF, "closed table must be total");
                }
                let rels = std::mem::take(&mut self.relators);
                for rel in &rels {
                    let end = self.trace_rep(c, rel);
                    debug_assert_ne!(end, UNDEF);
                    if end != self.find(c) {
                        changes += 1;
                        let cc = self.find(c);
                        self.coincide(end, cc);
                    }
                    if self.find(c) != c {
                        break;
                    }
                }
                self.relators = rels;
                c += 1;
            }
            if changes == 0 {
                break;
            }
        }
        Ok(TableStatus::Closed)
    }

    fn trace_rep(&mut self, from: u32, slots: &[usize]) -> u32 {
        let mut c = self.find(from);
        for &s in slots {
            let t = self.entry(c, s);
            if t == UNDEF {
                return UNDEF;
            }
            c = t;
        }
        c
    }

    /// Standardized rows: breadth-first relabeling from coset 0, slots in
    /// generator order. Canonical for a given enumeration problem.
    fn standardized_rows(&mut self) -> Vec<Vec<u32>> {
        let count = self.count();
        let mut label = vec![UNDEF; count];
        let root = self.find(0);
        label[root as usize] = 0;
        let mut order = vec![root];
        let mut head = 0;
        while head < order.len() {
            let c = order[head];
            head += 1;
            for s in 0..self.width {
                let t = self.entry(c, s);
                if t != UNDEF && label[t as usize] == UNDEF {
                    label[t as usize] = order.len() as u32;
                    order.push(t);
                }
            }
        }
        debug_assert_eq!(order.len(), self.alive, "closed action is transitive");
        order
            .iter()
            .map(|&c| {
                (0..self.width)
                    .map(|s| label[self.entry(c, s) as usize])
                    .collect()
            })
            .collect()
    }

    /// Live rows in definition order, for inconclusive tables.
    fn partial_rows(&mut self) -> Vec<Vec<u32>> {
        let count = self.count();
        let mut map = vec![UNDEF; count];
        let mut next = 0u32;
        for old in 0..count as u32 {
            if self.find(old) == old {
                map[old as usize] = next;
                next += 1;
            }
        }
        let mut rows = Vec::with_capacity(next as usize);
        for old in 0..count as u32 {
            if map[old as usize] == UNDEF {
                continue;
            }
            rows.push(
                (0..self.width)
                    .map(|s| {
                        let e = self.entry(old, s);
                        if e == UNDEF {
                            UNDEF
                        } else {
                            map[e as usize]
                        }
                    })
                    .collect(),
            );
        }
        rows
    }
}

fn word_slots(w: &Word, rank: usize) -> Result<Vec<usize>, CosetEnumError> {
    w.letters()
        .iter()
        .map(|&l| {
            let g = letter_gen(l);
            if g >= rank {
                Err(CosetEnumError::AlphabetMismatch(g, rank))
            } else {
                Ok(2 * g + usize::from(!letter_is_positive(l)))
            }
        })
        .collect()
}

/// HLT-style enumeration of the cosets of ⟨subgroup_gens⟩ in the presented
/// group. `max_cosets` bounds live cosets; exhausting it yields an Exceeded
/// table, which is inconclusive rather than a proof of infinite index.
pub fn todd_coxeter(
    p: &Presentation,
    subgroup_gens: &[Word],
    max_cosets: usize,
) -> Result<CosetTable, CosetEnumError> {
    if max_cosets == 0 {
        return Err(CosetEnumError::BadBudget);
    }
    let rank = p.alphabet().rank();
    let relators: Vec<Vec<usize>> = p
        .relators()
        .iter()
        .map(|r| word_slots(r, rank))
        .collect::<Result<_, _>>()?;
    let subgens: Vec<Vec<usize>> = subgroup_gens
        .iter()
        .map(|w| word_slots(w, rank))
        .collect::<Result<_, _>>()?;
    let mut e = Enumerator::new(rank, relators, subgens, max_cosets);
    let (status, rows) = match e.run() {
        Ok(TableStatus::Closed) => (TableStatus::Closed, e.standardized_rows()),
        Ok(st) | Err(st) => {
            let rows = e.partial_rows();
            (st, rows)
        }
    };
    Ok(CosetTable {
        rank,
        rows,
        regular: subgroup_gens.is_empty(),
        status,
    })
}

/// The finite quotient itself, from a closed regular table: elements are
/// cosets, multiplication is induced by the right action, and the i-th
/// generator maps to the returned image element.
pub fn quotient_group(
    table: &CosetTable,
) -> Result<(Arc<FiniteGroup>, Vec<u32>), CosetEnumError> {
    if !table.is_closed() {
        return Err(CosetEnumError::NotClosed);
    }
    if !table.regular {
        return Err(CosetEnumError::NotRegular);
    }
    let n = table.rows.len();
    // breadth-first words: coset b = coset 0 · word_to[b]
    let mut word_to: Vec<Option<Vec<usize>>> = vec![None; n];
    word_to[0] = Some(Vec::new());
    let mut queue = VecDeque::from([0u32]);
    while let Some(c) = queue.pop_front() {
        for s in 0..2 * table.rank {
            let t = table.rows[c as usize][s];
            if word_to[t as usize].is_none() {
                let mut w = word_to[c as usize].clone().unwrap();
                w.push(s);
                word_to[t as usize] = Some(w);
                queue.push_back(t);
            }
        }
    }
    let words: Vec<Vec<usize>> = word_to
        .into_iter()
        .map(|w| w.expect("closed action is transitive"))
        .collect();
    let rows: Vec<Vec<u32>> = (0..n as u32)
        .map(|a| {
            words
                .iter()
                .map(|w| w.iter().fold(a, |c, &s| table.rows[c as usize][s]))
                .collect()
        })
        .collect();
    let g = validate_group(&rows)?;
    let images = (0..table.rank).map(|i| table.rows[0][2 * i]).collect();
    Ok((Arc::new(g), images))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingrp::is_isomorphic;
    use crate::stallings::SubgroupGraph;
    use crate::words::Alphabet;

    fn pres(gens: &[&str], rels: &[&str]) -> Presentation {
        let alpha = Alphabet::new(gens).unwrap();
        let relators = rels.iter().map(|t| Word::parse(&alpha, t).unwrap()).collect();
        Presentation::new(alpha, relators).unwrap()
    }

    fn words(p: &Presentation, ws: &[&str]) -> Vec<Word> {
        ws.iter().map(|t| Word::parse(p.alphabet(), t).unwrap()).collect()
    }

    fn higman() -> Presentation {
        pres(
            &["a", "b", "c", "d"],
            &[
                "b a b^-1 a^-2",
                "c b c^-1 b^-2",
                "d c d^-1 c^-2",
                "a d a^-1 d^-2",
            ],
        )
    }

    #[test]
    fn s3_presentation_closes_and_lifts() {
        let p = pres(&["a", "b"], &["a^2", "b^3", "a b a b"]);
        let t = todd_coxeter(&p, &[], 100).unwrap();
        assert_eq!(t.index(), Some(6));
        let (g, images) = quotient_group(&t).unwrap();
        assert_eq!(g.order(), 6);
        assert!(is_isomorphic(&g, &Arc::new(FiniteGroup::symmetric(3))));
        // generator images satisfy every relator
        for r in p.relators() {
            let mut acc = 0u32;
            for &l in r.letters() {
                let img = images[letter_gen(l)];
                let img = if letter_is_positive(l) { img } else { g.inv_of(img) };
                acc = g.mul(acc, img);
            }
            assert_eq!(acc, 0);
        }
        // relators fix every coset; action is transitive
        for c in 0..6 {
            for r in p.relators() {
                assert_eq!(t.trace(c, r), Some(c));
            }
        }
    }

    #[test]
    fn subgroup_enumeration_counts_cosets() {
        let p = pres(&["a"], &["a^5"]);
        let whole = todd_coxeter(&p, &words(&p, &["a"]), 10).unwrap();
        assert_eq!(whole.index(), Some(1));
        let trivial = todd_coxeter(&p, &[], 10).unwrap();
        assert_eq!(trivial.index(), Some(5));
        // index 1 works even with the minimum budget
        let tight = todd_coxeter(&p, &words(&p, &["a"]), 1).unwrap();
        assert_eq!(tight.index(), Some(1));
    }

    #[test]
    fn z2_quotient_table() {
        let p = pres(&["a"], &["a^2"]);
        let t = todd_coxeter(&p, &[], 10).unwrap();
        let (g, images) = quotient_group(&t).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(images, vec![1]);
        assert!(is_isomorphic(&g, &Arc::new(FiniteGroup::cyclic(2))));
    }

    #[test]
    fn higman_budget_exhaustion_is_inconclusive() {
        let t = todd_coxeter(&higman(), &[], 100_000).unwrap();
        assert_eq!(*t.status(), TableStatus::Exceeded { budget: 100_000 });
        assert_eq!(t.index(), None);
        assert!(matches!(quotient_group(&t), Err(CosetEnumError::NotClosed)));
    }

    #[test]
    fn infinite_group_exceeds_small_budget() {
        // Klein bottle group is infinite
        let p = pres(&["a", "b"], &["a b a b^-1"]);
        let t = todd_coxeter(&p, &[], 200).unwrap();
        assert!(!t.is_closed());
    }

    #[test]
    fn free_group_subgroup_index_matches_stallings() {
        let p = pres(&["a", "b"], &[]);
        for gens in [
            vec!["a", "b^2", "b a b^-1"],
            vec!["a^2", "a b", "b a"],
            vec!["a", "b"],
        ] {
            let ws = words(&p, &gens);
            let graph = SubgroupGraph::fold(2, &ws).unwrap();
            let idx = graph.index().unwrap();
            let t = todd_coxeter(&p, &ws, 100).unwrap();
            assert_eq!(t.index(), Some(idx));
        }
    }

    #[test]
    fn closed_tables_are_budget_independent_and_deterministic() {
        let p = pres(&["a", "b"], &["a^2", "b^3", "a b a b"]);
        let t1 = todd_coxeter(&p, &[], 50).unwrap();
        let t2 = todd_coxeter(&p, &[], 100).unwrap();
        let t3 = todd_coxeter(&p, &[], 100_000).unwrap();
        assert_eq!(t1, t2);
        assert_eq!(t2, t3);
        let again = todd_coxeter(&p, &[], 50).unwrap();
        assert_eq!(t1, again);
    }

    #[test]
    fn quotient_rejects_subgroup_tables() {
        let p = pres(&["a"], &["a^4"]);
        let t = todd_coxeter(&p, &words(&p, &["a^2"]), 10).unwrap();
        assert_eq!(t.index(), Some(2));
        assert!(matches!(quotient_group(&t), Err(CosetEnumError::NotRegular)));
    }

    #[test]
    fn collapse_to_trivial_group() {
        // b kills a, a kills b: the group is trivial
        let p = pres(&["a", "b"], &["b a b^-1 a^-2", "a b a^-1 b^-2"]);
        let t = todd_coxeter(&p, &[], 1000).unwrap();
        assert_eq!(t.index(), Some(1));
        let (g, images) = quotient_group(&t).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(images, vec![0, 0]);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let p = pres(&["a"], &["a^3"]);
        assert!(matches!(todd_coxeter(&p, &[], 0), Err(CosetEnumError::BadBudget)));
        let q = pres(&["a", "b"], &[]);
        let foreign = words(&q, &["b"]);
        assert!(matches!(
            todd_coxeter(&p, &foreign, 10),
            Err(CosetEnumError::AlphabetMismatch(1, 1))
        ));
    }

    #[test]
    fn quaternion_presentation() {
        let p = pres(&["a", "b"], &["a^4", "a^2 b^-2", "b^-1 a b a"]);
        let t = todd_coxeter(&p, &[], 100).unwrap();
        assert_eq!(t.index(), Some(8));
        let (g, _) = quotient_group(&t).unwrap();
        assert!(is_isomorphic(&g, &Arc::new(FiniteGroup::quaternion8())));
    }
}
