//! Explicit presentation families: the Higman group, the 44-generator S0
//! presentation with its injective slot-word assignment, the Z_t run words,
//! the interleaved P_n relators, and the two subword conditions used to keep
//! those families inside the small-cancellation regime.

use std::collections::HashSet;

use num_rational::Ratio;
use thiserror::Error;

use crate::smallcanc::{check_small_cancellation, CheckResult, Presentation, SmallCancError};
use crate::words::{letter_gen, Alphabet, Letter, Word, WordError};

#[derive(Debug, Error)]
pub enum BuildersError {
    #[error(transparent)]
    Words(#[from] WordError),
    #[error(transparent)]
    SmallCanc(#[from] SmallCancError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("slots {slot_a} and {slot_b} share exponent {value}")]
    DuplicateSlotWord { slot_a: usize, slot_b: usize, value: u32 },
    #[error("letter at position {position} is outside the required class")]
    WrongLetterClass { position: usize },
}

pub const A_COUNT: usize = 4;
pub const X_COUNT: usize = 20;
pub const Y_COUNT: usize = 20;
/// 4·20 S-rows + 4·20 T-rows + 20 U-rows + 4 V-rows.
pub const S0_SLOTS: usize = 2 * A_COUNT * X_COUNT + Y_COUNT + A_COUNT;

/// ⟨a1..a4 | a_ℓ⁻¹ a_{ℓ+1} a_ℓ a_{ℓ+1}⁻²⟩ with indices mod 4.
pub fn higman_presentation() -> Presentation {
    let names: Vec<String> = (1..=A_COUNT).map(|i| format!("a{i}")).collect();
    let alphabet = Alphabet::new(&names).unwrap();
    let relators = (0..A_COUNT)
        .map(|l| {
            let cur = l as i32 + 1;
            let next = (l + 1) % A_COUNT + 1;
            let next = next as i32;
            Word::from_reduced(vec![-cur, next, cur, -next, -next])
        })
        .collect();
    Presentation::new(alphabet, relators).unwrap()
}

/// The standalone alphabet y1..y20 that Z_t words live on.
pub fn y_alphabet() -> Alphabet {
    let names: Vec<String> = (1..=Y_COUNT).map(|i| format!("y{i}")).collect();
    Alphabet::new(&names).unwrap()
}

/// a1..a4, x1..x20, y1..y20: the alphabet of S0 and the P_n relators.
pub fn s0_alphabet() -> Alphabet {
    let mut names: Vec<String> = (1..=A_COUNT).map(|i| format!("a{i}")).collect();
    names.extend((1..=X_COUNT).map(|i| format!("x{i}")));
    names.extend((1..=Y_COUNT).map(|i| format!("y{i}")));
    Alphabet::new(&names).unwrap()
}

/// Generator-index classes of the S0 alphabet: (a- and x-letters, y-letters).
pub fn s0_letter_classes() -> (Vec<usize>, Vec<usize>) {
    (
        (0..A_COUNT + X_COUNT).collect(),
        (A_COUNT + X_COUNT..A_COUNT + X_COUNT + Y_COUNT).collect(),
    )
}

fn zt_letters(t: u32, offset: usize) -> Vec<Letter> {
    let mut letters = Vec::with_capacity(Y_COUNT * t as usize);
    for i in 0..Y_COUNT {
        let l = (offset + i) as i32 + 1;
        letters.extend(std::iter::repeat(l).take(t as usize));
    }
    letters
}

/// Z_t = y1^t y2^t … y20^t over the y-alphabet.
pub fn zt_word(t: u32) -> Result<Word, BuildersError> {
    if t < 1 {
        return Err(BuildersError::InvalidParameter("t must be at least 1".into()));
    }
    Ok(Word::from_reduced(zt_letters(t, 0)))
}

/// An injective assignment of slot-word exponents to the 184 relator slots,
/// in the fixed order: S rows, T rows, U rows, V rows, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct S0Params {
    pub exponents: Vec<u32>,
}

impl Default for S0Params {
    fn default() -> S0Params {
        S0Params { exponents: (1..=S0_SLOTS as u32).collect() }
    }
}

impl S0Params {
    /// Every exponent multiplied by 10, preserving injectivity.
    pub fn escalate(&self) -> S0Params {
        S0Params { exponents: self.exponents.iter().map(|&e| e * 10).collect() }
    }

    fn validate(&self) -> Result<(), BuildersError> {
        if self.exponents.len() != S0_SLOTS {
            return Err(BuildersError::InvalidParameter(format!(
                "expected {} slot exponents, got {}",
                S0_SLOTS,
                self.exponents.len()
            )));
        }
        if let Some(i) = self.exponents.iter().position(|&e| e == 0) {
            return Err(BuildersError::InvalidParameter(format!(
                "slot {i} has exponent 0; exponents must be positive"
            )));
        }
        let mut seen = std::collections::HashMap::new();
        for (i, &e) in self.exponents.iter().enumerate() {
            if let Some(&j) = seen.get(&e) {
                return Err(BuildersError::DuplicateSlotWord { slot_a: j, slot_b: i, value: e });
            }
            seen.insert(e, i);
        }
        Ok(())
    }
}

/// Slot word x1^n x2^n … x20^n over the S0 alphabet.
fn slot_letters(n: u32) -> Vec<Letter> {
    let mut letters = Vec::with_capacity(X_COUNT * n as usize);
    for i in 0..X_COUNT {
        let l = (A_COUNT + i) as i32 + 1;
        letters.extend(std::iter::repeat(l).take(n as usize));
    }
    letters
}

/// The 44-generator, 184-relator presentation: rows a_i⁻¹x_ja_i·S_ij,
/// a_ix_ja_i⁻¹·T_ij, y_k·U_k, and a_ℓ⁻¹a_{ℓ+1}a_ℓa_{ℓ+1}⁻²·V_ℓ, each slot
/// word x1^n…x20^n at its assigned exponent.
pub fn s0_presentation(params: &S0Params) -> Result<Presentation, BuildersError> {
    params.validate()?;
    let alphabet = s0_alphabet();
    let mut relators = Vec::with_capacity(S0_SLOTS);
    let mut slot = 0..S0_SLOTS;
    let mut next_slot = || params.exponents[slot.next().unwrap()];
    for i in 0..A_COUNT {
        let a = i as i32 + 1;
        for j in 0..X_COUNT {
            let x = (A_COUNT + j) as i32 + 1;
            let mut letters = vec![-a, x, a];
            letters.extend(slot_letters(next_slot()));
            relators.push(Word::from_reduced(letters));
        }
    }
    for i in 0..A_COUNT {
        let a = i as i32 + 1;
        for j in 0..X_COUNT {
            let x = (A_COUNT + j) as i32 + 1;
            let mut letters = vec![a, x, -a];
            letters.extend(slot_letters(next_slot()));
            relators.push(Word::from_reduced(letters));
        }
    }
    for k in 0..Y_COUNT {
        let y = (A_COUNT + X_COUNT + k) as i32 + 1;
        let mut letters = vec![y];
        letters.extend(slot_letters(next_slot()));
        relators.push(Word::from_reduced(letters));
    }
    for l in 0..A_COUNT {
        let cur = l as i32 + 1;
        let next = ((l + 1) % A_COUNT) as i32 + 1;
        let mut letters = vec![-cur, next, cur, -next, -next];
        letters.extend(slot_letters(next_slot()));
        relators.push(Word::from_reduced(letters));
    }
    Ok(Presentation::new(alphabet, relators)?)
}

/// S0 with a small-cancellation certificate: the default assignment is
/// checked against C'(1/6) and escalated ×10 (up to `max_escalations`
/// rounds) while the check fails.
#[derive(Debug, Clone)]
pub struct S0Certificate {
    pub presentation: Presentation,
    pub params: S0Params,
    pub escalations: u32,
    pub check: CheckResult,
}

pub fn s0_certified(max_escalations: u32) -> Result<S0Certificate, BuildersError> {
    s0_certified_with(S0Params::default(), max_escalations)
}

pub fn s0_certified_with(
    start: S0Params,
    max_escalations: u32,
) -> Result<S0Certificate, BuildersError> {
    let mut params = start;
    let mut escalations = 0;
    loop {
        let presentation = s0_presentation(&params)?;
        let check = check_small_cancellation(&presentation, Ratio::new(1, 6));
        if check.satisfied || escalations == max_escalations {
            return Ok(S0Certificate { presentation, params, escalations, check });
        }
        params = params.escalate();
        escalations += 1;
    }
}

/// P_n = ℓ₁ Z_m ℓ₂ Z_{2m} ⋯ ℓ_{r+s} Z_{(r+s)m}, where ℓ₁..ℓ_{r+s} are the
/// letters of `rn` (a-letters) followed by `x_word` (x-letters) and the
/// Z-blocks run over the y-letters of the S0 alphabet.
pub fn pn_relator(rn: &Word, x_word: &Word, m: u32) -> Result<Word, BuildersError> {
    if m < 1 {
        return Err(BuildersError::InvalidParameter("m must be at least 1".into()));
    }
    for (position, &l) in rn.letters().iter().enumerate() {
        if letter_gen(l) >= A_COUNT {
            return Err(BuildersError::WrongLetterClass { position });
        }
    }
    for (i, &l) in x_word.letters().iter().enumerate() {
        let g = letter_gen(l);
        if !(A_COUNT..A_COUNT + X_COUNT).contains(&g) {
            return Err(BuildersError::WrongLetterClass { position: rn.len() + i });
        }
    }
    let mut letters = Vec::new();
    let interleaved: Vec<Letter> =
        rn.letters().iter().chain(x_word.letters()).copied().collect();
    let count = interleaved.len();
    for (idx, &l) in interleaved.iter().enumerate() {
        letters.push(l);
        letters.extend(zt_letters((idx as u32 + 1) * m, A_COUNT + X_COUNT));
    }
    let word = Word::from_reduced(letters);
    debug_assert_eq!(
        word.len(),
        count + Y_COUNT * (m as usize) * count * (count + 1) / 2
    );
    // the window condition needs at least two interleaved letters: with a
    // single letter, windows straddling it can miss every flanked y-run
    if count >= 2 {
        let (ax, ys) = s0_letter_classes();
        debug_assert!(check_condition_b(&word, &ax, &ys));
    }
    Ok(word)
}

/// Condition (b): every cyclic subword of R or R⁻¹ of length ≥ ‖R‖/6
/// contains two consecutive a/x-letters or a flanked y-run u v^q w (u, v, w
/// y-letters, q ≠ 0, flanks of equal sign and different generator than the
/// run). Windows of length ⌈‖R‖/6⌉ suffice: longer subwords contain one.
pub fn check_condition_b(r: &Word, a_x_gens: &[usize], y_gens: &[usize]) -> bool {
    let ax: HashSet<usize> = a_x_gens.iter().copied().collect();
    let ys: HashSet<usize> = y_gens.iter().copied().collect();
    let l = r.len();
    if l == 0 {
        return true;
    }
    let w0 = l.div_ceil(6);
    for word in [r.clone(), r.inverse()] {
        let mut d = word.letters().to_vec();
        d.extend(word.letters().iter().copied());
        // feature intervals: any window containing one qualifies
        let mut feats: Vec<(usize, usize)> = Vec::new();
        for p in 0..d.len() - 1 {
            if ax.contains(&letter_gen(d[p])) && ax.contains(&letter_gen(d[p + 1])) {
                feats.push((p, p + 1));
            }
        }
        let mut p = 0;
        while p < d.len() {
            let mut q = p + 1;
            while q < d.len() && d[q] == d[p] {
                q += 1;
            }
            if ys.contains(&letter_gen(d[p])) && p > 0 && q < d.len() {
                let (lf, rf) = (d[p - 1], d[q]);
                let flank_ok = |f: Letter| {
                    ys.contains(&letter_gen(f)) && letter_gen(f) != letter_gen(d[p])
                };
                if flank_ok(lf) && flank_ok(rf) && (lf > 0) == (rf > 0) {
                    feats.push((p - 1, q));
                }
            }
            p = q;
        }
        // min feature end over all features starting at or after each index
        feats.sort_unstable();
        let mut min_end = vec![usize::MAX; d.len() + 1];
        let mut it = feats.iter().rev().peekable();
        for a in (0..d.len()).rev() {
            min_end[a] = min_end[a + 1];
            while let Some(&&(fa, fb)) = it.peek() {
                if fa == a {
                    min_end[a] = min_end[a].min(fb);
                    it.next();
                } else {
                    break;
                }
            }
        }
        for s in 0..l {
            if min_end[s] > s + w0 - 1 {
                return false;
            }
        }
    }
    true
}

/// Condition (++): no cyclic shift of any relator contains y_i^{±m}; y-gens
/// are the generators whose name starts with "y". Requires m ≥ 2.
pub fn check_condition_pp(p: &Presentation, m: u32) -> bool {
    assert!(m >= 2, "condition (++) needs m at least 2");
    let ys: HashSet<usize> = p
        .alphabet()
        .names()
        .iter()
        .enumerate()
        .filter(|(_, n)| n.starts_with('y'))
        .map(|(i, _)| i)
        .collect();
    for r in p.relators() {
        let l = r.len();
        if l == 0 {
            continue;
        }
        let mut d = r.letters().to_vec();
        d.extend(r.letters().iter().copied());
        let mut p0 = 0;
        while p0 < d.len() {
            let mut q = p0 + 1;
            while q < d.len() && d[q] == d[p0] {
                q += 1;
            }
            let run = (q - p0).min(l);
            if ys.contains(&letter_gen(d[p0])) && run >= m as usize {
                return false;
            }
            p0 = q;
        }
    }
    true
}
