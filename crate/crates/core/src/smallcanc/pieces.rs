//! Piece enumeration over symmetrized relator sets.
//!
//! The symmetrized set of a presentation is the closure of its relators under
//! rotation and inversion. Occurrences of subwords are counted per cyclic
//! slot: a necklace of length L and period d has d distinct slots, and a word
//! is a piece when it occurs at two different slots anywhere in the family.
//!
//! The engine builds one generalized suffix array over all necklace readers
//! (the cyclic word unrolled far enough that every slot sees a full window of
//! length L) and, for every slot, finds the longest common prefix against any
//! slot with a different identity, capping lengths by both windows involved.

use std::collections::BTreeMap;

use crate::words::{cyclic_period, least_rotation, Letter, Word};

#[derive(Debug, Clone)]
pub(crate) struct Necklace {
    /// Canonical rotation of the cyclic word.
    pub cyc: Vec<Letter>,
    pub period: usize,
    /// Input relator indices whose symmetrization produced this necklace.
    pub owners: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct SymmetrizedFamily {
    pub necklaces: Vec<Necklace>,
    /// Per input relator: indices of its necklaces (one or two).
    pub relator_necklaces: Vec<Vec<usize>>,
    /// Count of distinct linear words in the symmetrized set.
    pub symmetrized_size: usize,
}

pub(crate) fn build_family(relators: &[Word]) -> SymmetrizedFamily {
    let mut index: BTreeMap<Vec<Letter>, usize> = BTreeMap::new();
    let mut necklaces: Vec<Necklace> = Vec::new();
    let mut relator_necklaces = vec![Vec::new(); relators.len()];
    for (ri, r) in relators.iter().enumerate() {
        for w in [r.clone(), r.inverse()] {
            let letters = w.letters().to_vec();
            debug_assert!(w.is_cyclically_reduced());
            let rot = least_rotation(&letters);
            let mut cyc = letters.clone();
            cyc.rotate_left(rot);
            let id = match index.get(&cyc) {
                Some(&id) => id,
                None => {
                    let id = necklaces.len();
                    let period = cyclic_period(&cyc);
                    index.insert(cyc.clone(), id);
                    necklaces.push(Necklace {
                        cyc,
                        period,
                        owners: Vec::new(),
                    });
                    id
                }
            };
            if !necklaces[id].owners.contains(&ri) {
                necklaces[id].owners.push(ri);
            }
            if !relator_necklaces[ri].contains(&id) {
                relator_necklaces[ri].push(id);
            }
        }
    }
    let symmetrized_size = necklaces.iter().map(|n| n.period).sum();
    SymmetrizedFamily {
        necklaces,
        relator_necklaces,
        symmetrized_size,
    }
}

/// Identity of one occurrence slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Slot {
    pub necklace: usize,
    pub offset: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct FamilyAnswers {
    /// Per necklace, per slot: length of the longest piece starting there.
    pub slot_max: Vec<Vec<u32>>,
    /// Matching partner slot (a different slot sharing that prefix).
    pub slot_witness: Vec<Vec<Option<Slot>>>,
}

impl FamilyAnswers {
    pub fn necklace_max(&self, n: usize) -> u32 {
        self.slot_max[n].iter().copied().max().unwrap_or(0)
    }
}

struct SaEntry {
    key: Option<u32>,
    window: u32,
    slot: Slot,
}

/// Computes, for every slot, the longest common prefix with any
/// different-identity slot, capped at both windows.
pub(crate) fn analyze(family: &SymmetrizedFamily) -> FamilyAnswers {
    // build the concatenated reader text with unique sentinels
    let mut text: Vec<i64> = Vec::new();
    let mut entries: Vec<Option<SaEntry>> = Vec::new();
    let mut key_counter: u32 = 0;
    let mut sentinel: i64 = i64::MIN;
    for (ni, n) in family.necklaces.iter().enumerate() {
        let ln = n.cyc.len();
        let d = n.period;
        let reader_len = d + ln - 1;
        for p in 0..reader_len {
            text.push(n.cyc[p % ln] as i64);
            if p < d {
                entries.push(Some(SaEntry {
                    key: Some(key_counter + p as u32),
                    window: ln as u32,
                    slot: Slot {
                        necklace: ni,
                        offset: p,
                    },
                }));
            } else {
                entries.push(None);
            }
        }
        key_counter += d as u32;
        text.push(sentinel);
        entries.push(None);
        sentinel += 1;
    }
    let mut answers = FamilyAnswers {
        slot_max: family
            .necklaces
            .iter()
            .map(|n| vec![0u32; n.period])
            .collect(),
        slot_witness: family
            .necklaces
            .iter()
            .map(|n| vec![None; n.period])
            .collect(),
    };
    if text.is_empty() {
        return answers;
    }
    let sa = suffix_array(&text);
    let lcp = lcp_kasai(&text, &sa);

    // two sweeps over suffix-array order; each maintains the best and
    // second-best per-key maxima of "cap clamped by path minimum"
    let mut best: [Option<(u32, u32, Slot)>; 2] = [None, None];
    let mut scan = |order: &mut dyn Iterator<Item = usize>,
                    edge: &dyn Fn(usize) -> u32,
                    answers: &mut FamilyAnswers| {
        best = [None, None];
        for t in order {
            let e = edge(t);
            for b in best.iter_mut().flatten() {
                b.0 = b.0.min(e);
            }
            let Some(entry) = &entries[sa[t] as usize] else {
                continue;
            };
            let my_key = entry.key.unwrap();
            // query: best value among keys different from mine
            let hit = match best[0] {
                Some((v, k, s)) if k != my_key => Some((v, s)),
                _ => best[1].as_ref().map(|&(v, _, s)| (v, s)),
            };
            if let Some((v, s)) = hit {
                let v = v.min(entry.window);
                let cell = &mut answers.slot_max[entry.slot.necklace][entry.slot.offset];
                if v > *cell {
                    *cell = v;
                    answers.slot_witness[entry.slot.necklace][entry.slot.offset] = Some(s);
                }
            }
            // insert self as a source with value = own window cap
            insert_top2(&mut best, entry.window, my_key, entry.slot);
        }
    };

    let n = sa.len();
    scan(
        &mut (0..n),
        &|t| if t == 0 { 0 } else { lcp[t] },
        &mut answers,
    );
    scan(
        &mut (0..n).rev(),
        &|t| if t + 1 >= n { 0 } else { lcp[t + 1] },
        &mut answers,
    );
    answers
}

/// Maintains the two largest per-key maxima with distinct keys.
fn insert_top2(top: &mut [Option<(u32, u32, Slot)>; 2], v: u32, key: u32, slot: Slot) {
    if let Some(b) = &mut top[0] {
        if b.1 == key {
            if v > b.0 {
                *b = (v, key, slot);
            }
            return;
        }
    }
    if let Some(s) = &mut top[1] {
        if s.1 == key {
            if v > s.0 {
                *s = (v, key, slot);
                if top[1].unwrap().0 > top[0].unwrap().0 {
                    top.swap(0, 1);
                }
            }
            return;
        }
    }
    match top[0] {
        None => top[0] = Some((v, key, slot)),
        Some((bv, _, _)) => {
            if v > bv {
                top[1] = top[0].take();
                top[0] = Some((v, key, slot));
            } else {
                match top[1] {
                    None => top[1] = Some((v, key, slot)),
                    Some((sv, _, _)) => {
                        if v > sv {
                            top[1] = Some((v, key, slot));
                        }
                    }
                }
            }
        }
    }
}

/// Rank-doubling suffix array; O(n log² n), adequate at this crate's scales.
fn suffix_array(text: &[i64]) -> Vec<u32> {
    let n = text.len();
    let mut sa: Vec<u32> = (0..n as u32).collect();
    let mut rank: Vec<u32> = vec![0; n];
    // initial ranks from raw symbols
    sa.sort_unstable_by_key(|&i| text[i as usize]);
    let mut r = 0u32;
    for t in 0..n {
        if t > 0 && text[sa[t] as usize] != text[sa[t - 1] as usize] {
            r += 1;
        }
        rank[sa[t] as usize] = r;
    }
    let mut tmp: Vec<u32> = vec![0; n];
    let mut k = 1usize;
    while k < n {
        let pair = |i: u32| -> (u32, u32) {
            let i = i as usize;
            let second = if i + k < n { rank[i + k] + 1 } else { 0 };
            (rank[i], second)
        };
        sa.sort_unstable_by_key(|&i| pair(i));
        tmp[sa[0] as usize] = 0;
        for t in 1..n {
            let inc = (pair(sa[t]) != pair(sa[t - 1])) as u32;
            tmp[sa[t] as usize] = tmp[sa[t - 1] as usize] + inc;
        }
        rank.copy_from_slice(&tmp);
        if rank[sa[n - 1] as usize] as usize == n - 1 {
            break;
        }
        k *= 2;
    }
    sa
}

/// Kasai's algorithm: lcp[t] = lcp(sa[t−1], sa[t]) for t ≥ 1.
fn lcp_kasai(text: &[i64], sa: &[u32]) -> Vec<u32> {
    let n = text.len();
    let mut rank = vec![0u32; n];
    for (t, &i) in sa.iter().enumerate() {
        rank[i as usize] = t as u32;
    }
    let mut lcp = vec![0u32; n];
    let mut h = 0usize;
    for i in 0..n {
        let t = rank[i] as usize;
        if t == 0 {
            h = 0;
            continue;
        }
        let j = sa[t - 1] as usize;
        while i + h < n && j + h < n && text[i + h] == text[j + h] {
            h += 1;
        }
        lcp[t] = h as u32;
        h = h.saturating_sub(1);
    }
    lcp
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;

    fn w(alpha: &Alphabet, text: &str) -> Word {
        Word::parse(alpha, text).unwrap()
    }

    #[test]
    fn power_relator_has_no_pieces() {
        let alpha = Alphabet::new(&["a"]).unwrap();
        let fam = build_family(&[w(&alpha, "a^3")]);
        assert_eq!(fam.necklaces.len(), 2);
        assert_eq!(fam.symmetrized_size, 2);
        let ans = analyze(&fam);
        assert_eq!(ans.necklace_max(0), 0);
        assert_eq!(ans.necklace_max(1), 0);
    }

    #[test]
    fn commutator_pieces_are_single_letters() {
        let alpha = Alphabet::new(&["a", "b"]).unwrap();
        let fam = build_family(&[w(&alpha, "a b a^-1 b^-1")]);
        assert_eq!(fam.symmetrized_size, 8);
        let ans = analyze(&fam);
        assert_eq!(ans.necklace_max(0), 1);
        assert_eq!(ans.necklace_max(1), 1);
    }

    #[test]
    fn run_overlaps_make_pieces() {
        // f₁ f₂²: the run f₂² yields the piece f₂ at two slots
        let alpha = Alphabet::new(&["f1", "f2"]).unwrap();
        let fam = build_family(&[w(&alpha, "f1 f2^2")]);
        let ans = analyze(&fam);
        assert_eq!(ans.necklace_max(0), 1);
    }

    #[test]
    fn windows_cap_piece_lengths() {
        // necklaces ab and abab: "ab" occurs at slots in both, but nothing
        // longer than 2 fits the shorter window
        let alpha = Alphabet::new(&["a", "b"]).unwrap();
        let fam = build_family(&[w(&alpha, "a b"), w(&alpha, "a b a b")]);
        let ans = analyze(&fam);
        let nk_ab = fam.relator_necklaces[0][0];
        let nk_abab = fam.relator_necklaces[1][0];
        assert_eq!(ans.necklace_max(nk_ab), 2);
        assert_eq!(ans.necklace_max(nk_abab), 2);
    }

    #[test]
    fn engine_matches_naive_on_randoms() {
        let mut state = 0xabcdef12345u64;
        let mut next = move |m: u64| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state % m
        };
        for _ in 0..300 {
            let nrel = 1 + next(3) as usize;
            let mut relators = Vec::new();
            for _ in 0..nrel {
                // random cyclically reduced word, length 1..10
                let len = 1 + next(9) as usize;
                let mut letters: Vec<Letter> = Vec::new();
                for _ in 0..len {
                    let mut l = loop {
                        let g = 1 + next(3) as i32;
                        let l = if next(2) == 0 { g } else { -g };
                        if letters.last() != Some(&-l) {
                            break l;
                        }
                    };
                    if letters.len() == len - 1 && letters.first() == Some(&-l) {
                        // avoid cyclic cancellation at the seam
                        l = *letters.first().unwrap();
                    }
                    letters.push(l);
                }
                let word = Word::normalize(&letters).expect("valid letters");
                if word.is_empty() || !word.is_cyclically_reduced() {
                    continue;
                }
                relators.push(word);
            }
            if relators.is_empty() {
                continue;
            }
            let fam = build_family(&relators);
            let fast = analyze(&fam);
            let slow = naive::analyze(&fam);
            assert_eq!(fast.slot_max, slow, "family {:?}", fam.necklaces);
        }
    }

    #[test]
    fn witness_points_at_real_occurrence() {
        let alpha = Alphabet::new(&["a", "b"]).unwrap();
        let fam = build_family(&[w(&alpha, "a b a b^-1")]);
        let ans = analyze(&fam);
        for (ni, n) in fam.necklaces.iter().enumerate() {
            for o in 0..n.period {
                let len = ans.slot_max[ni][o] as usize;
                if len == 0 {
                    continue;
                }
                let witness = ans.slot_witness[ni][o].unwrap();
                assert_ne!(
                    (ni, o),
                    (witness.necklace, witness.offset),
                    "witness must be a different slot"
                );
                let here: Vec<Letter> =
                    (0..len).map(|t| n.cyc[(o + t) % n.cyc.len()]).collect();
                let there = &fam.necklaces[witness.necklace];
                let other: Vec<Letter> = (0..len)
                    .map(|t| there.cyc[(witness.offset + t) % there.cyc.len()])
                    .collect();
                assert_eq!(here, other);
            }
        }
    }
}
