//! End-to-end acceptance checks: one test per shipped guarantee, each
//! printing a single summary line on success. Sampled checks use a fixed
//! seed so every run exercises the same cases.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;
use std::time::Instant;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wreathkit::builders::{
    check_condition_b, check_condition_pp, higman_presentation, pn_relator, s0_alphabet,
    s0_certified, s0_letter_classes,
};
use wreathkit::clyndon::{f7n_generators, verify_f7n, wgh_wreath_like, FreeProductPresentation};
use wreathkit::cosetenum::{todd_coxeter, TableStatus};
use wreathkit::fingrp::{
    automorphisms, characters, generated_subgroup, is_isomorphic, psi_compose, psi_is_inner,
    Character, FiniteGroup, Homomorphism, PhasedBasisMap,
};
use wreathkit::smallcanc::{
    dehn_word_problem, presentation_abelianization, DehnVerdict, Presentation,
};
use wreathkit::stallings::SubgroupGraph;
use wreathkit::wlp::{
    is_untwisted, n_r_subgroup, ordinary_wreath, pi_over_coset, quotient_base_by_normal,
    regular_action, untwisted_quotient, verify_wreath_like,
};
use wreathkit::words::{Alphabet, Word};

fn budget(start: Instant, limit: f64, label: &str) -> f64 {
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < limit, "{label} took {secs:.1}s, budget {limit}s");
    secs
}

fn cyclic_pres(name: &str, n: u32) -> Presentation {
    let alphabet = Alphabet::new(&[name]).unwrap();
    let r = Word::parse(&alphabet, name).unwrap().pow(n);
    Presentation::new(alphabet, vec![r]).unwrap()
}

/// Uniform reduced word of exactly `len` letters over `rank` generators.
fn random_reduced_word(rng: &mut ChaCha8Rng, rank: usize, len: usize) -> Word {
    let mut letters: Vec<i32> = Vec::with_capacity(len);
    while letters.len() < len {
        let gen = rng.gen_range(1..=rank as i32);
        let lit = if rng.gen_bool(0.5) { gen } else { -gen };
        if letters.last() == Some(&-lit) {
            continue;
        }
        letters.push(lit);
    }
    Word::from_reduced(letters)
}

#[test]
fn ac01_regular_wreath_products_verify() {
    let start = Instant::now();
    let bases = [
        Arc::new(FiniteGroup::trivial()),
        Arc::new(FiniteGroup::cyclic(2)),
        Arc::new(FiniteGroup::cyclic(3)),
    ];
    let tops = [
        Arc::new(FiniteGroup::cyclic(2)),
        Arc::new(FiniteGroup::cyclic(3)),
        Arc::new(FiniteGroup::cyclic(6)),
        Arc::new(FiniteGroup::symmetric(3)),
    ];
    let mut built = 0;
    for a in &bases {
        for b in &tops {
            let w = ordinary_wreath(a, b, regular_action(b)).expect("within the order bound");
            verify_wreath_like(&w).expect("wreath-like axioms");
            assert_eq!(w.group().order(), a.order().pow(b.order() as u32) * b.order());
            assert_eq!(w.index_count(), b.order());
            built += 1;
        }
    }
    assert_eq!(built, 12);
    let secs = budget(start, 30.0, "AC1");
    println!("AC1 pass: 12 regular wreath products built and verified in {secs:.2}s");
}

#[test]
fn ac02_wgh_quotients_recover_wreath_products() {
    let start = Instant::now();
    for &(na, nb, expected) in &[(2u32, 2u32, 8usize), (2, 3, 24), (3, 2, 18)] {
        let fp = FreeProductPresentation::new(cyclic_pres("a", na), cyclic_pres("b", nb), 5000)
            .expect("finite factors");
        let wlp = wgh_wreath_like(&fp, 5000).expect("closed enumeration");
        verify_wreath_like(&wlp).expect("wreath-like axioms");
        assert_eq!(wlp.group().order(), expected);
        let a = Arc::new(FiniteGroup::cyclic(na as usize));
        let b = Arc::new(FiniteGroup::cyclic(nb as usize));
        let plain = ordinary_wreath(&a, &b, regular_action(&b)).unwrap();
        assert!(is_isomorphic(wlp.group(), plain.group()));
    }
    let secs = budget(start, 60.0, "AC2");
    println!("AC2 pass: three commuting-copies quotients match wreath products in {secs:.2}s");
}

#[test]
fn ac03_f7n_family_reports() {
    let start = Instant::now();
    let report = verify_f7n(7, 2, 10).expect("family in range");
    assert!(report.c16);
    assert!(report.free_factor);
    assert_eq!(report.quotient_free_rank, 12);
    assert!(!report.small_k_warning);
    let small = verify_f7n(2, 1, 10).expect("degenerate family still checkable");
    assert!(!small.c16);
    assert!(small.small_k_warning);
    let secs = budget(start, 10.0, "AC3");
    println!("AC3 pass: generator family verified (and the k=2 family rejected) in {secs:.2}s");
}

#[test]
fn ac04_dehn_decides_sampled_words() {
    let start = Instant::now();
    let family = f7n_generators(7, 2, 10).unwrap();
    let p = Presentation::new(family.alphabet.clone(), family.relators.clone()).unwrap();
    let rank = p.alphabet().rank();
    let mut rng = ChaCha8Rng::seed_from_u64(0x00ac_0401);

    // products of up to three conjugated relators must come back trivial
    for _ in 0..200 {
        let mut letters: Vec<i32> = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            let ulen = rng.gen_range(0..=8);
            let u = random_reduced_word(&mut rng, rank, ulen);
            let j = rng.gen_range(0..p.relators().len());
            let r = if rng.gen_bool(0.5) {
                p.relators()[j].clone()
            } else {
                p.relators()[j].inverse()
            };
            letters.extend_from_slice(u.letters());
            letters.extend_from_slice(r.letters());
            letters.extend_from_slice(u.inverse().letters());
        }
        let w = Word::normalize(&letters).unwrap();
        assert_eq!(dehn_word_problem(&p, &w).unwrap(), DehnVerdict::Trivial);
    }

    // words of at most 10 letters cannot contain more than half of a
    // 61-letter relator, so every one of them must come back nontrivial;
    // exponent sums into Z/3 (f1, f8 -> 1 and f2, f9 -> 2 kill both
    // relators) certify a sample of them independently of the engine
    let mut certified = 0;
    for _ in 0..200 {
        let wlen = rng.gen_range(1..=10);
        let w = random_reduced_word(&mut rng, rank, wlen);
        let image: i64 = w
            .letters()
            .iter()
            .map(|&l| {
                let v = match l.unsigned_abs() {
                    1 | 8 => 1i64,
                    2 | 9 => 2,
                    _ => 0,
                };
                if l > 0 {
                    v
                } else {
                    -v
                }
            })
            .sum();
        if image.rem_euclid(3) != 0 {
            certified += 1;
        }
        assert_eq!(dehn_word_problem(&p, &w).unwrap(), DehnVerdict::Nontrivial);
    }
    assert!(certified > 50, "only {certified} words had independent certificates");
    let secs = budget(start, 60.0, "AC4");
    println!(
        "AC4 pass: 200 trivial and 200 nontrivial sampled words decided \
         ({certified} certified independently) in {secs:.2}s"
    );
}

#[test]
fn ac05_higman_presentation_resists_enumeration() {
    let start = Instant::now();
    let p = higman_presentation();
    assert_eq!(p.alphabet().rank(), 4);
    assert_eq!(p.relators().len(), 4);
    let name = |i: usize| format!("a{}", i % 4 + 1);
    for l in 0..4usize {
        let text = format!(
            "{}^-1 {} {} {}^-2",
            name(l),
            name(l + 1),
            name(l),
            name(l + 1)
        );
        let expect = Word::parse(p.alphabet(), &text).unwrap().cyclic_core();
        assert_eq!(p.relators()[l], expect);
    }
    let ab = presentation_abelianization(&p);
    assert_eq!(ab.free_rank, 0);
    assert_eq!(ab.divisors.len(), 4);
    assert!(ab.divisors.iter().all(|d| d.to_string() == "1"));
    let table = todd_coxeter(&p, &[], 100_000).unwrap();
    assert!(matches!(table.status(), TableStatus::Exceeded { budget: 100_000 }));
    let secs = budget(start, 30.0, "AC5");
    println!("AC5 pass: trivial abelianization and a 100000-coset blowup in {secs:.2}s");
}

#[test]
fn ac06_untwisted_quotient_over_an_order_two_subgroup() {
    let start = Instant::now();
    let a = Arc::new(FiniteGroup::cyclic(2));
    let b = Arc::new(FiniteGroup::symmetric(3));
    let w = ordinary_wreath(&a, &b, regular_action(&b)).unwrap();
    let bg = w.acting_group().clone();
    let t = (1..6).find(|&x| bg.mul(x, x) == 0).unwrap();
    let r = generated_subgroup(&bg, &[t]);
    assert_eq!(r.len(), 2);

    let n = n_r_subgroup(&w, &r).unwrap();
    assert_eq!(n.len(), 8);
    let wr = untwisted_quotient(&w, &r).unwrap();
    verify_wreath_like(&wr).unwrap();
    assert_eq!(wr.group().order(), 48);
    assert_eq!(wr.index_count(), 3);
    assert!(is_untwisted(&wr));

    // coset sums transform under conjugation by translating the coset
    let wg = w.group().clone();
    let eps = w.epsilon().clone();
    let base: Vec<u32> = (0..wg.order() as u32).filter(|&x| eps.apply(x) == 0).collect();
    assert_eq!(base.len(), 64);
    let mut cosets: Vec<Vec<u32>> = Vec::new();
    for x in 0..bg.order() as u32 {
        let mut c: Vec<u32> = r.iter().map(|&y| bg.mul(x, y)).collect();
        c.sort_unstable();
        if !cosets.contains(&c) {
            cosets.push(c);
        }
    }
    assert_eq!(cosets.len(), 3);
    let mut rng = ChaCha8Rng::seed_from_u64(0x00ac_0601);
    for _ in 0..1000 {
        let g = rng.gen_range(0..wg.order() as u32);
        let aelt = base[rng.gen_range(0..base.len())];
        let coset = &cosets[rng.gen_range(0..cosets.len())];
        let conj = wg.mul(wg.mul(wg.inv_of(g), aelt), g);
        let mut shifted: Vec<u32> = coset.iter().map(|&y| bg.mul(eps.apply(g), y)).collect();
        shifted.sort_unstable();
        let lhs = pi_over_coset(&w, coset, conj).unwrap();
        let rhs = pi_over_coset(&w, &shifted, aelt).unwrap();
        assert_eq!(lhs, rhs);
    }
    let secs = budget(start, 60.0, "AC6");
    println!("AC6 pass: untwisted quotient of order 48 and 1000 equivariant samples in {secs:.2}s");
}

#[test]
fn ac07_base_quotient_of_z4_wreath_z2() {
    let start = Instant::now();
    let a = Arc::new(FiniteGroup::cyclic(4));
    let b = Arc::new(FiniteGroup::cyclic(2));
    let w = ordinary_wreath(&a, &b, regular_action(&b)).unwrap();
    assert_eq!(w.group().order(), 32);
    let wg = w.group().clone();
    let n_ref: Vec<u32> = w.summands()[0]
        .iter()
        .copied()
        .filter(|&x| wg.mul(x, x) == 0)
        .collect();
    assert_eq!(n_ref.len(), 2);
    let q = quotient_base_by_normal(&w, &n_ref).unwrap();
    verify_wreath_like(&q).unwrap();
    assert_eq!(q.group().order(), 8);
    assert!(q.summands().iter().all(|s| s.len() == 2));
    let z2 = Arc::new(FiniteGroup::cyclic(2));
    let plain = ordinary_wreath(&z2, &z2, regular_action(&z2)).unwrap();
    assert!(is_isomorphic(q.group(), plain.group()));
    let secs = budget(start, 5.0, "AC7");
    println!("AC7 pass: base quotient collapses to the order-8 wreath product in {secs:.2}s");
}

/// Coset transversal words and the resulting generators for the kernel of
/// the map sending generator i+1 to `images[i]`.
fn schreier_kernel_generators(sym: &FiniteGroup, images: &[u32]) -> (usize, Vec<Word>) {
    let elements = generated_subgroup(sym, images);
    let pos: HashMap<u32, usize> = elements.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut coset_word: Vec<Option<Vec<i32>>> = vec![None; elements.len()];
    coset_word[pos[&0]] = Some(Vec::new());
    let mut queue = VecDeque::from([0u32]);
    while let Some(e) = queue.pop_front() {
        let stem = coset_word[pos[&e]].clone().unwrap();
        for (i, &x) in images.iter().enumerate() {
            let f = sym.mul(e, x);
            if coset_word[pos[&f]].is_none() {
                let mut v = stem.clone();
                v.push(i as i32 + 1);
                coset_word[pos[&f]] = Some(v);
                queue.push_back(f);
            }
        }
    }
    let mut gens = Vec::new();
    for &e in &elements {
        let stem = coset_word[pos[&e]].as_ref().unwrap();
        for (i, &x) in images.iter().enumerate() {
            let f = sym.mul(e, x);
            let back = coset_word[pos[&f]].as_ref().unwrap();
            let mut letters = stem.clone();
            letters.push(i as i32 + 1);
            letters.extend(back.iter().rev().map(|&l| -l));
            gens.push(Word::normalize(&letters).unwrap());
        }
    }
    (elements.len(), gens)
}

#[test]
fn ac08_schreier_index_formula_and_fold_stability() {
    let start = Instant::now();
    let syms: Vec<Arc<FiniteGroup>> =
        (2..=5).map(|d| Arc::new(FiniteGroup::symmetric(d))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x00ac_0801);
    for trial in 0..100usize {
        let rank = 2 + trial % 2;
        let sym = &syms[rng.gen_range(0..syms.len())];
        let images: Vec<u32> =
            (0..rank).map(|_| rng.gen_range(0..sym.order() as u32)).collect();
        let (index, gens) = schreier_kernel_generators(sym, &images);
        let graph = SubgroupGraph::fold(rank, &gens).unwrap();
        assert_eq!(graph.index(), Some(index));
        assert_eq!(graph.subgroup_rank(), 1 + index * (rank - 1));
        // a single letter lies in the kernel exactly when its image is the identity
        for (i, &x) in images.iter().enumerate() {
            let single = Word::from_reduced(vec![i as i32 + 1]);
            assert_eq!(graph.membership(&single), x == 0);
        }
    }

    // folding is insensitive to the order the generators arrive in
    for _ in 0..50 {
        let rank = rng.gen_range(2..=3);
        let count = rng.gen_range(2..=6);
        let mut gens: Vec<Word> = Vec::new();
        for _ in 0..count {
            let glen = rng.gen_range(1..=8);
            gens.push(random_reduced_word(&mut rng, rank, glen));
        }
        let reference = SubgroupGraph::fold(rank, &gens).unwrap();
        gens.shuffle(&mut rng);
        let reordered = SubgroupGraph::fold(rank, &gens).unwrap();
        assert_eq!(reference.summary(), reordered.summary());
        assert_eq!(reference.graph_basis(), reordered.graph_basis());
        for _ in 0..10 {
            let plen = rng.gen_range(0..=6);
            let probe = random_reduced_word(&mut rng, rank, plen);
            assert_eq!(reference.membership(&probe), reordered.membership(&probe));
        }
    }
    let secs = budget(start, 60.0, "AC8");
    println!("AC8 pass: 100 kernel graphs match the index formula, 50 fold orders agree, in {secs:.2}s");
}

#[test]
fn ac09_automorphisms_characters_and_phased_maps() {
    let start = Instant::now();
    let cases: [(Arc<FiniteGroup>, usize, usize); 4] = [
        (Arc::new(FiniteGroup::symmetric(3)), 6, 6),
        (Arc::new(FiniteGroup::dihedral(4)), 8, 4),
        (Arc::new(FiniteGroup::quaternion8()), 24, 4),
        (Arc::new(FiniteGroup::alternating4()), 24, 12),
    ];
    for (g, aut_order, inn_order) in &cases {
        let aut = automorphisms(g).unwrap();
        assert_eq!(aut.maps.len(), *aut_order);
        assert_eq!(aut.inn_order, *inn_order);
        // for these groups an automorphism preserves every conjugacy class
        // exactly when it is inner
        for i in 0..aut.maps.len() {
            assert_eq!(aut.inner[i], aut.class_preserving[i]);
        }
        for rho in &characters(g) {
            for (i, delta) in aut.maps.iter().enumerate() {
                let m = PhasedBasisMap::new(rho.clone(), delta.clone()).unwrap();
                assert_eq!(
                    psi_is_inner(&m),
                    rho.is_trivial() && aut.class_preserving[i]
                );
            }
        }
    }

    // conjugating a pure phase map by a pure basis change twists the phase
    let g = cases[0].0.clone();
    let aut = automorphisms(&g).unwrap();
    let id = Homomorphism::identity(&g);
    for rho in &characters(&g) {
        for delta in &aut.maps {
            let dinv = delta.inverse().unwrap();
            let lhs = psi_compose(
                &psi_compose(
                    &PhasedBasisMap::new(Character::trivial(&g), delta.clone()).unwrap(),
                    &PhasedBasisMap::new(rho.clone(), id.clone()).unwrap(),
                )
                .unwrap(),
                &PhasedBasisMap::new(Character::trivial(&g), dinv.clone()).unwrap(),
            )
            .unwrap();
            let twisted = Character::new(
                &g,
                (0..g.order() as u32).map(|x| rho.value(dinv.apply(x))).collect(),
            )
            .unwrap();
            let rhs = PhasedBasisMap::new(twisted, id.clone()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
    let secs = budget(start, 60.0, "AC9");
    println!("AC9 pass: four symmetry groups, the inner criterion, and the twisting law in {secs:.2}s");
}

#[test]
fn ac10_s0_certificate_and_pn_window_condition() {
    let start = Instant::now();
    let cert = s0_certified(3).unwrap();
    assert_eq!(cert.presentation.alphabet().rank(), 44);
    assert_eq!(cert.presentation.relators().len(), 184);
    assert!(cert.check.satisfied);
    assert_eq!(cert.escalations, 0);
    assert_eq!(cert.check.report.max_ratio, Ratio::new(3u64, 23u64));
    let (ax, ys) = s0_letter_classes();
    for r in cert.presentation.relators() {
        assert!(check_condition_b(r, &ax, &ys));
    }
    assert!(check_condition_pp(&cert.presentation, 300));

    let alphabet = s0_alphabet();
    let rn = Word::parse(&alphabet, "a1 a2").unwrap();
    let xw = Word::parse(&alphabet, "x1 x2").unwrap();
    let rel = pn_relator(&rn, &xw, 6).unwrap();
    assert_eq!(rel.len(), 1204);
    assert!(check_condition_b(&rel, &ax, &ys));
    let secs = budget(start, 120.0, "AC10");
    println!("AC10 pass: certified 184-relator presentation and a 1204-letter window check in {secs:.2}s");
}
