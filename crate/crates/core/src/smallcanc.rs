//! Presentations, symmetrized relator sets, pieces, the C'(λ) metric
//! condition, Dehn's algorithm, Tietze elimination, and abelianization.

mod pieces;
pub mod snf;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::Ratio;
use thiserror::Error;

use crate::words::{letter_gen, Alphabet, Word, WordError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SmallCancError {
    #[error("relator {index} is empty after reduction")]
    EmptyRelator { index: usize },
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("no relator uses {0} exactly once")]
    CannotEliminate(String),
    #[error("presentation is not C'(1/6), Dehn's algorithm does not apply")]
    PreconditionViolated,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Word(#[from] WordError),
}

/// A presentation ⟨alphabet | relators⟩ with cyclically reduced relators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    alphabet: Alphabet,
    relators: Vec<Word>,
}

impl Presentation {
    /// Cyclically reduces every relator; empty relators are rejected.
    pub fn new(alphabet: Alphabet, relators: Vec<Word>) -> Result<Self, SmallCancError> {
        let mut reduced = Vec::with_capacity(relators.len());
        for (index, r) in relators.into_iter().enumerate() {
            for &l in r.letters() {
                if letter_gen(l) >= alphabet.rank() {
                    return Err(WordError::AlphabetMismatch {
                        letter: l,
                        rank: alphabet.rank(),
                    }
                    .into());
                }
            }
            let core = r.cyclic_core();
            if core.is_empty() {
                return Err(SmallCancError::EmptyRelator { index });
            }
            reduced.push(core);
        }
        Ok(Presentation {
            alphabet,
            relators: reduced,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Parses the line-oriented `.pres` text: one `gens` line, then `rel`
    /// lines; `#` comments and blank lines are ignored. Returns warnings for
    /// relators that needed reduction.
    pub fn parse_pres(text: &str) -> Result<(Self, Vec<String>), SmallCancError> {
        let mut alphabet: Option<Alphabet> = None;
        let mut raw: Vec<(usize, Vec<i32>)> = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (head, rest) = match line.split_once(char::is_whitespace) {
                Some((h, r)) => (h, r.trim()),
                None => (line, ""),
            };
            match head {
                "gens" => {
                    if alphabet.is_some() {
                        return Err(SmallCancError::Parse {
                            line: no + 1,
                            message: "duplicate gens line".into(),
                        });
                    }
                    let names: Vec<&str> = rest.split_whitespace().collect();
                    alphabet = Some(Alphabet::new(&names)?);
                }
                "rel" => {
                    let Some(alpha) = &alphabet else {
                        return Err(SmallCancError::Parse {
                            line: no + 1,
                            message: "rel before gens".into(),
                        });
                    };
                    raw.push((no + 1, Word::parse_raw(alpha, rest)?));
                }
                other => {
                    return Err(SmallCancError::Parse {
                        line: no + 1,
                        message: format!("unknown directive {other}"),
                    });
                }
            }
        }
        let Some(alphabet) = alphabet else {
            return Err(SmallCancError::Parse {
                line: 0,
                message: "missing gens line".into(),
            });
        };
        let mut warnings = Vec::new();
        let mut relators = Vec::with_capacity(raw.len());
        for (line, letters) in raw {
            let w = Word::normalize(&letters).expect("parse produced valid letters");
            if w.letters() != &letters[..] || !w.is_cyclically_reduced() {
                warnings.push(format!(
                    "line {line}: relator was not cyclically reduced; reduced form is used"
                ));
            }
            relators.push(w);
        }
        let p = Presentation::new(alphabet, relators)?;
        Ok((p, warnings))
    }

    /// Serializes to canonical `.pres` text; parsing it back reproduces
    /// generator and relator order exactly.
    pub fn to_pres(&self) -> String {
        let mut out = String::new();
        out.push_str("gens");
        for name in self.alphabet.names() {
            let _ = write!(out, " {name}");
        }
        out.push('\n');
        for r in &self.relators {
            let _ = writeln!(out, "rel {}", r.display(&self.alphabet).unwrap());
        }
        out
    }
}

/// Distinct elements of the symmetrized closure (rotations of every relator
/// and its inverse), listed deterministically: relators in input order, the
/// relator before its inverse, rotations from the canonical one onward.
pub fn symmetrize(p: &Presentation) -> Vec<Word> {
    let mut seen: BTreeMap<Vec<i32>, ()> = BTreeMap::new();
    let mut out = Vec::new();
    for r in &p.relators {
        for w in [r.clone(), r.inverse()] {
            let (_, canon) = w.cyclic_normalize();
            for shift in canon.cyclic_shifts().expect("relators are cyclically reduced") {
                if seen.insert(shift.letters().to_vec(), ()).is_none() {
                    out.push(shift);
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceReport {
    /// Number of distinct words in the symmetrized set.
    pub symmetrized_size: usize,
    /// Longest piece occurring in each relator (or its inverse).
    pub per_relator_max: Vec<usize>,
    /// max over relators of (max piece length)/(relator length), exact.
    pub max_ratio: Ratio<u64>,
}

pub fn pieces(p: &Presentation) -> PieceReport {
    let family = pieces::build_family(&p.relators);
    let answers = pieces::analyze(&family);
    let mut per_relator_max = Vec::with_capacity(p.relators.len());
    let mut max_ratio = Ratio::new(0u64, 1u64);
    for (ri, r) in p.relators.iter().enumerate() {
        let m = family.relator_necklaces[ri]
            .iter()
            .map(|&n| answers.necklace_max(n) as usize)
            .max()
            .unwrap_or(0);
        per_relator_max.push(m);
        if m > 0 {
            max_ratio = max_ratio.max(Ratio::new(m as u64, r.len() as u64));
        }
    }
    PieceReport {
        symmetrized_size: family.symmetrized_size,
        per_relator_max,
        max_ratio,
    }
}

/// A failing piece: it occurs at two distinct slots and is too long for the
/// named relator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceWitness {
    pub piece: Word,
    pub relator_a: usize,
    pub relator_b: usize,
    pub piece_len: usize,
    pub relator_len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub satisfied: bool,
    pub lambda: Ratio<u64>,
    pub report: PieceReport,
    pub witness: Option<PieceWitness>,
}

/// Checks the metric condition C'(λ): every piece p of every symmetrized
/// relator r has |p| < λ·|r| strictly. Empty relator lists pass vacuously.
pub fn check_small_cancellation(p: &Presentation, lambda: Ratio<u64>) -> CheckResult {
    assert!(*lambda.numer() > 0, "lambda must be positive");
    let family = pieces::build_family(&p.relators);
    let answers = pieces::analyze(&family);
    let mut per_relator_max = Vec::with_capacity(p.relators.len());
    let mut max_ratio = Ratio::new(0u64, 1u64);
    let mut witness: Option<PieceWitness> = None;
    for (ri, r) in p.relators.iter().enumerate() {
        let mut best: u32 = 0;
        let mut best_slot: Option<(usize, usize)> = None;
        for &n in &family.relator_necklaces[ri] {
            for (o, &v) in answers.slot_max[n].iter().enumerate() {
                if v > best {
                    best = v;
                    best_slot = Some((n, o));
                }
            }
        }
        per_relator_max.push(best as usize);
        if best > 0 {
            max_ratio = max_ratio.max(Ratio::new(best as u64, r.len() as u64));
        }
        // strict violation: |piece| ≥ λ|r| ⟺ |p|·den ≥ num·|r|
        let violates =
            (best as u128) * (*lambda.denom() as u128) >= (*lambda.numer() as u128) * (r.len() as u128);
        if violates && witness.is_none() {
            let (n, o) = best_slot.expect("violating piece has positive length");
            let neck = &family.necklaces[n];
            let letters: Vec<i32> = (0..best as usize)
                .map(|t| neck.cyc[(o + t) % neck.cyc.len()])
                .collect();
            let partner = answers.slot_witness[n][o].expect("piece has a partner slot");
            let other = &family.necklaces[partner.necklace];
            witness = Some(PieceWitness {
                piece: Word::normalize(&letters).expect("valid letters"),
                relator_a: ri,
                relator_b: other.owners.first().copied().unwrap_or(ri),
                piece_len: best as usize,
                relator_len: r.len(),
            });
        }
    }
    CheckResult {
        satisfied: witness.is_none(),
        lambda,
        report: PieceReport {
            symmetrized_size: family.symmetrized_size,
            per_relator_max,
            max_ratio,
        },
        witness,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DehnVerdict {
    Trivial,
    Nontrivial,
}

/// Dehn's algorithm: repeatedly replace any cyclic subword that is more than
/// half of a symmetrized relator by the shorter complement. Sound and
/// complete for C'(1/6) presentations (which is enforced up front).
pub fn dehn_word_problem(p: &Presentation, w: &Word) -> Result<DehnVerdict, SmallCancError> {
    let sixth = Ratio::new(1u64, 6u64);
    if !check_small_cancellation(p, sixth).satisfied {
        return Err(SmallCancError::PreconditionViolated);
    }
    let symmetrized = symmetrize(p);
    // bucket symmetrized relators by first letter, preserving order
    let mut buckets: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (i, s) in symmetrized.iter().enumerate() {
        buckets.entry(s.letters()[0]).or_default().push(i);
    }
    let mut current = w.cyclic_core();
    'outer: loop {
        if current.is_empty() {
            return Ok(DehnVerdict::Trivial);
        }
        let letters = current.letters();
        let n = letters.len();
        let at = |i: usize| letters[i % n];
        for pos in 0..n {
            let Some(cands) = buckets.get(&at(pos)) else {
                continue;
            };
            for &si in cands {
                let s = symmetrized[si].letters();
                let mut cp = 0usize;
                while cp < s.len() && cp < n && at(pos + cp) == s[cp] {
                    cp += 1;
                }
                if 2 * cp > s.len() {
                    // rotate so the matched subword is a prefix, then replace
                    // t by the inverse of the relator's complement
                    let mut rotated: Vec<i32> = (0..n).map(|t| at(pos + t)).collect();
                    let tail = rotated.split_off(cp);
                    let u = Word::normalize(&s[cp..]).expect("valid letters");
                    let replaced = u.inverse().product(&Word::normalize(&tail).expect("valid letters"));
                    debug_assert!(replaced.len() < n);
                    current = replaced.cyclic_core();
                    continue 'outer;
                }
            }
        }
        return Ok(DehnVerdict::Nontrivial);
    }
}

/// Removes `gen` using the first relator where it occurs exactly once,
/// substituting the solved expression into all other relators. Relators that
/// become empty are dropped.
pub fn tietze_eliminate(p: &Presentation, gen: &str) -> Result<Presentation, SmallCancError> {
    let gid = p
        .alphabet
        .id_of(gen)
        .ok_or_else(|| SmallCancError::UnknownGenerator(gen.to_string()))?;
    let target = (gid as i32) + 1;
    let used = p.relators.iter().position(|r| {
        r.letters().iter().filter(|&&l| letter_gen(l) == gid).count() == 1
    });
    let Some(used) = used else {
        return Err(SmallCancError::CannotEliminate(gen.to_string()));
    };
    let r = &p.relators[used];
    let pos = r
        .letters()
        .iter()
        .position(|&l| letter_gen(l) == gid)
        .expect("occurrence located above");
    let prefix = Word::normalize(&r.letters()[..pos]).expect("valid letters");
    let suffix = Word::normalize(&r.letters()[pos + 1..]).expect("valid letters");
    // r = prefix·g^ε·suffix = 1 solves to g^ε = prefix⁻¹·suffix⁻¹
    let solved_power = prefix.inverse().product(&suffix.inverse());
    let expr = if r.letters()[pos] == target {
        solved_power
    } else {
        solved_power.inverse()
    };
    debug_assert!(expr.letters().iter().all(|&l| letter_gen(l) != gid));

    let remap = |w: &Word| -> Word {
        let letters: Vec<i32> = w
            .letters()
            .iter()
            .map(|&l| {
                let g = letter_gen(l);
                debug_assert_ne!(g, gid);
                if g > gid {
                    if l > 0 {
                        l - 1
                    } else {
                        l + 1
                    }
                } else {
                    l
                }
            })
            .collect();
        Word::normalize(&letters).expect("valid letters")
    };

    let mut new_relators = Vec::new();
    for (i, rel) in p.relators.iter().enumerate() {
        if i == used {
            continue;
        }
        let mut out = Word::empty();
        for &l in rel.letters() {
            let piece = if letter_gen(l) == gid {
                if l > 0 {
                    expr.clone()
                } else {
                    expr.inverse()
                }
            } else {
                Word::single(l)
            };
            out = out.product(&piece);
        }
        let out = remap(&out).cyclic_core();
        if !out.is_empty() {
            new_relators.push(out);
        }
    }
    let names: Vec<&str> = p
        .alphabet
        .names()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != gid)
        .map(|(_, n)| n.as_str())
        .collect();
    Presentation::new(Alphabet::new(&names)?, new_relators)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianInvariants {
    /// Nonzero elementary divisors d₁ | d₂ | …, 1s included.
    pub divisors: Vec<BigInt>,
    pub free_rank: usize,
}

/// Abelianization via Smith normal form of the relator exponent-sum matrix.
pub fn presentation_abelianization(p: &Presentation) -> AbelianInvariants {
    let cols = p.alphabet.rank();
    let matrix: Vec<Vec<BigInt>> = p
        .relators
        .iter()
        .map(|r| {
            r.exponent_sums(&p.alphabet)
                .expect("relators fit the alphabet")
                .into_iter()
                .map(BigInt::from)
                .collect()
        })
        .collect();
    let form = snf::smith_normal_form(&matrix, cols);
    AbelianInvariants {
        free_rank: form.free_rank(),
        divisors: form.divisors,
    }
}

/// True iff the presentation is verified C'(1/6) and no relator is a proper
/// power, which together certify torsion-freeness.
pub fn torsion_free_certificate(p: &Presentation) -> bool {
    if !check_small_cancellation(p, Ratio::new(1, 6)).satisfied {
        return false;
    }
    p.relators.iter().all(|r| r.is_proper_power().is_none())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pres(gens: &[&str], rels: &[&str]) -> Presentation {
        let alpha = Alphabet::new(gens).unwrap();
        let relators = rels.iter().map(|t| Word::parse(&alpha, t).unwrap()).collect();
        Presentation::new(alpha, relators).unwrap()
    }

    /// f₁ f₂^m … f_k^m over generators f_{(i-1)k+1} … f_{ik}, one per block.
    fn f7n(k: usize, n: usize, m: u32) -> Presentation {
        let names: Vec<String> = (1..=k * n).map(|i| format!("f{i}")).collect();
        let alpha = Alphabet::new(&names).unwrap();
        let mut relators = Vec::new();
        for block in 0..n {
            let mut w = Word::empty();
            for j in 0..k {
                let letter = (block * k + j) as i32 + 1;
                let e = if j == 0 { 1 } else { m };
                w = w.product(&Word::single(letter).pow(e));
            }
            relators.push(w);
        }
        Presentation::new(alpha, relators).unwrap()
    }

    #[test]
    fn symmetrize_sizes() {
        assert_eq!(symmetrize(&pres(&["a"], &["a^3"])).len(), 2);
        assert_eq!(symmetrize(&pres(&["a", "b"], &["a b"])).len(), 4);
        assert_eq!(
            symmetrize(&pres(&["a", "b"], &["a b a^-1 b^-1"])).len(),
            8
        );
    }

    #[test]
    fn piece_reports_match_frozen_values() {
        let cube = pieces(&pres(&["a"], &["a^3"]));
        assert_eq!(cube.symmetrized_size, 2);
        assert_eq!(cube.per_relator_max, vec![0]);
        assert_eq!(cube.max_ratio, Ratio::new(0, 1));

        let comm = pieces(&pres(&["a", "b"], &["a b a^-1 b^-1"]));
        assert_eq!(comm.symmetrized_size, 8);
        assert_eq!(comm.per_relator_max, vec![1]);
        assert_eq!(comm.max_ratio, Ratio::new(1, 4));

        let family = pieces(&f7n(7, 2, 10));
        assert_eq!(family.per_relator_max, vec![9, 9]);
        assert_eq!(family.max_ratio, Ratio::new(9, 61));
    }

    #[test]
    fn small_cancellation_check() {
        let sixth = Ratio::new(1, 6);
        assert!(check_small_cancellation(&f7n(7, 2, 10), sixth).satisfied);
        assert!(check_small_cancellation(&f7n(8, 1, 2), sixth).satisfied);
        let bad = check_small_cancellation(&f7n(2, 1, 10), sixth);
        assert!(!bad.satisfied);
        let w = bad.witness.unwrap();
        assert_eq!(w.piece_len, 9);
        assert_eq!(w.relator_len, 11);
        // the commutator fails: the length-1 piece meets 1 ≥ 4/6
        let comm = check_small_cancellation(&pres(&["a", "b"], &["a b a^-1 b^-1"]), sixth);
        assert!(!comm.satisfied);
        // vacuous on the empty relator list
        assert!(check_small_cancellation(&pres(&["a"], &[]), sixth).satisfied);
    }

    #[test]
    fn dehn_decides_relator_products() {
        let p = f7n(7, 2, 10);
        let alpha = p.alphabet().clone();
        let r1 = p.relators()[0].clone();
        let r2 = p.relators()[1].clone();
        // a relator is trivial
        assert_eq!(dehn_word_problem(&p, &r1).unwrap(), DehnVerdict::Trivial);
        // conjugated products of relators are trivial
        let g = Word::parse(&alpha, "f3 f9^-1 f1").unwrap();
        let h = Word::parse(&alpha, "f14 f2^2").unwrap();
        let w = g
            .product(&r1)
            .product(&g.inverse())
            .product(&h.product(&r2.inverse()).product(&h.inverse()));
        assert_eq!(dehn_word_problem(&p, &w).unwrap(), DehnVerdict::Trivial);
        // single generators and random short words are not
        let f1 = Word::parse(&alpha, "f1").unwrap();
        assert_eq!(dehn_word_problem(&p, &f1).unwrap(), DehnVerdict::Nontrivial);
        let short = Word::parse(&alpha, "f1 f2 f3^-1").unwrap();
        assert_eq!(
            dehn_word_problem(&p, &short).unwrap(),
            DehnVerdict::Nontrivial
        );
        // precondition is enforced
        let bad = pres(&["a", "b"], &["a b a^-1 b^-1"]);
        let probe = Word::parse(bad.alphabet(), "a").unwrap();
        assert_eq!(
            dehn_word_problem(&bad, &probe),
            Err(SmallCancError::PreconditionViolated)
        );
    }

    #[test]
    fn tietze_elimination() {
        // F7n k=7, n=1, m=2: eliminating f1 leaves six free generators
        let p = f7n(7, 1, 2);
        let q = tietze_eliminate(&p, "f1").unwrap();
        assert_eq!(q.alphabet().rank(), 6);
        assert!(q.relators().is_empty());
        // ⟨a | a⟩ → empty presentation
        let t = tietze_eliminate(&pres(&["a"], &["a"]), "a").unwrap();
        assert_eq!(t.alphabet().rank(), 0);
        assert!(t.relators().is_empty());
        // a generator occurring twice in every relator cannot be eliminated
        let err = tietze_eliminate(&pres(&["a", "b"], &["a b a b^-2"]), "a");
        assert_eq!(err, Err(SmallCancError::CannotEliminate("a".into())));
        // abelianization is preserved as a group: nontrivial divisors and
        // free rank agree (the count of unit divisors tracks matrix shape)
        let nontrivial = |inv: &AbelianInvariants| -> Vec<BigInt> {
            inv.divisors
                .iter()
                .filter(|d| **d != BigInt::from(1))
                .cloned()
                .collect()
        };
        let p = pres(&["a", "b", "c"], &["a b c^-2", "b^3 c"]);
        let before = presentation_abelianization(&p);
        let after = presentation_abelianization(&tietze_eliminate(&p, "a").unwrap());
        assert_eq!(nontrivial(&before), nontrivial(&after));
        assert_eq!(before.free_rank, after.free_rank);
        let p2 = pres(&["a", "b"], &["a^4 b^6", "b^2"]);
        let before2 = presentation_abelianization(&p2);
        assert_eq!(before2.divisors, vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn abelianization_invariants() {
        let five = presentation_abelianization(&pres(&["a"], &["a^5"]));
        assert_eq!(five.divisors, vec![BigInt::from(5)]);
        assert_eq!(five.free_rank, 0);
        let free2 = presentation_abelianization(&pres(&["a", "b"], &[]));
        assert!(free2.divisors.is_empty());
        assert_eq!(free2.free_rank, 2);
    }

    #[test]
    fn torsion_free_certificates() {
        assert!(torsion_free_certificate(&f7n(7, 2, 10)));
        // a³ is a proper power even though it has no pieces
        assert!(!torsion_free_certificate(&pres(&["a"], &["a^3"])));
        // the commutator fails the metric condition itself
        assert!(!torsion_free_certificate(&pres(
            &["a", "b"],
            &["a b a^-1 b^-1"]
        )));
    }

    #[test]
    fn pres_round_trip() {
        let text = "gens a b\nrel a b a^-1 b^-1\nrel b^3\n";
        let (p, warnings) = Presentation::parse_pres(text).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(p.to_pres(), text);
        // comments and blank lines are ignored; reduction warns
        let noisy = "# header\n\ngens a b\nrel a a^-1 b\n";
        let (q, warnings) = Presentation::parse_pres(noisy).unwrap();
        assert_eq!(warnings.len(), 1);
        assert_eq!(q.relators()[0], Word::parse(q.alphabet(), "b").unwrap());
        // error paths
        assert!(Presentation::parse_pres("rel a\n").is_err());
        assert!(Presentation::parse_pres("gens a\nrel eps\n").is_err());
        assert!(Presentation::parse_pres("gens a\nbogus x\n").is_err());
    }

    #[test]
    fn symmetrize_rejects_nothing_but_keeps_duplicates_out() {
        // duplicate relators symmetrize to the same necklace set
        let p = pres(&["a", "b"], &["a b", "b a"]);
        assert_eq!(symmetrize(&p).len(), 4);
    }
}
