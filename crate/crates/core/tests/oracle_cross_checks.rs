//! Cross-validation of the table algebra against the windowed index-map
//! oracle. The two sides share no arithmetic beyond Phase, so agreement on
//! every window entry is real evidence that both encode the same operators.

use qdiag_core::canrep::{apply_word, verify_identity, Applied, GenSym, GenWord, Isometry};
use qdiag_core::diagonal::DiagonalUnitary;
use qdiag_core::extend::{decide_extendible, Decision, Obstruction};
use qdiag_core::phase::Phase;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_table(rng: &mut StdRng, level: u32) -> DiagonalUnitary {
    let table = (0..1usize << level)
        .map(|_| Phase::dyadic(rng.random_range(0..16), 4).unwrap())
        .collect();
    DiagonalUnitary::from_table(level, table).unwrap()
}

fn diag(d: &DiagonalUnitary) -> GenSym {
    GenSym::Diag(d.clone())
}

#[test]
fn intertwining_s_i_d_equals_phi_d_s_i() {
    let mut rng = StdRng::seed_from_u64(0xA11CE);
    for _ in 0..40 {
        let level = rng.random_range(0..=5);
        let d = random_table(&mut rng, level);
        let window = 1i64 << (level + 4);
        for iso in [GenSym::S1, GenSym::S2] {
            let lhs = GenWord::new(vec![iso.clone(), diag(&d)]);
            let rhs = GenWord::new(vec![diag(&d.phi()), iso]);
            let report = verify_identity(&lhs, &rhs, window).unwrap();
            assert!(report.passed(), "{:?}", report.mismatches.first());
        }
    }
}

#[test]
fn ad_u_matches_conjugation_words() {
    let mut rng = StdRng::seed_from_u64(0xBEA7);
    for _ in 0..40 {
        let level = rng.random_range(0..=4);
        let d = random_table(&mut rng, level);
        let j = rng.random_range(-3..=3i64);
        let mut syms = Vec::new();
        syms.extend(std::iter::repeat_n(
            if j >= 0 { GenSym::U } else { GenSym::UStar },
            j.unsigned_abs() as usize,
        ));
        syms.push(diag(&d));
        syms.extend(std::iter::repeat_n(
            if j >= 0 { GenSym::UStar } else { GenSym::U },
            j.unsigned_abs() as usize,
        ));
        let word = GenWord::new(syms);
        let shifted = d.ad_u(j);
        for m in -40..40i64 {
            let Applied::Vector { index, amplitude } = apply_word(&word, m, 64) else {
                panic!("conjugation word left the window at m = {m}");
            };
            assert_eq!(index, m);
            assert!(amplitude.agrees(&shifted.eval_at(m)), "j = {j}, m = {m}");
        }
    }
}

#[test]
fn compress_matches_corner_words() {
    let mut rng = StdRng::seed_from_u64(0xC0DE);
    for _ in 0..40 {
        let level = rng.random_range(0..=4);
        let d = random_table(&mut rng, level);
        for i in 0..=level + 1 {
            let mut syms = vec![GenSym::S2Star; i as usize];
            syms.push(diag(&d));
            syms.extend(std::iter::repeat_n(GenSym::S2, i as usize));
            let word = GenWord::new(syms);
            let compressed = d.compress(i);
            let window = 1i64 << 11;
            for m in -16..16i64 {
                let Applied::Vector { index, amplitude } = apply_word(&word, m, window) else {
                    panic!("corner word fell out of the window");
                };
                assert_eq!(index, m);
                assert!(amplitude.agrees(&compressed.eval_at(m)), "i = {i}, m = {m}");
            }
        }
    }
}

#[test]
fn phi_is_the_two_corner_sum() {
    // phi(d) = S1 d S1* + S2 d S2*: on each basis vector exactly one summand
    // survives and it carries phi(d)'s entry.
    let mut rng = StdRng::seed_from_u64(0xF1);
    for _ in 0..40 {
        let level = rng.random_range(0..=4);
        let d = random_table(&mut rng, level);
        let ph = d.phi();
        let odd = GenWord::new(vec![GenSym::S1, diag(&d), GenSym::S1Star]);
        let even = GenWord::new(vec![GenSym::S2, diag(&d), GenSym::S2Star]);
        for m in -32..32i64 {
            let (hit, miss) = if m.rem_euclid(2) == 1 {
                (&odd, &even)
            } else {
                (&even, &odd)
            };
            assert_eq!(apply_word(miss, m, 128), Applied::Annihilated);
            let Applied::Vector { index, amplitude } = apply_word(hit, m, 128) else {
                panic!("surviving corner fell out of the window");
            };
            assert_eq!(index, m);
            assert!(amplitude.agrees(&ph.eval_at(m)), "m = {m}");
        }
    }
}

#[test]
fn gauge_coboundary_hits_the_requested_constant_check_image() {
    use qdiag_core::diagonal::{gauge_coboundary, GaugeCoboundary};
    for (num, exp) in [(0, 0), (1, 1), (1, 2), (3, 3), (5, 4)] {
        let z = Phase::dyadic(num, exp).unwrap();
        let GaugeCoboundary::Localized(d) = gauge_coboundary(z).unwrap() else {
            panic!("2-power roots give localized tables");
        };
        let Decision::Extendible(cert) = decide_extendible(&d) else {
            panic!("the candidate must be extendible");
        };
        assert_eq!(cert.check, DiagonalUnitary::constant(z));
    }
}

#[test]
fn running_products_agree_with_algebra_chain() {
    use qdiag_core::canrep::partial_products;
    let mut rng = StdRng::seed_from_u64(0x9A9A);
    for _ in 0..20 {
        let level = rng.random_range(1..=4);
        let d = random_table(&mut rng, level);
        let pp = partial_products(&d, 4, 32).unwrap();
        let mut chain = d.clone().canonicalize();
        let mut power = d.phi();
        for k in 2..=4usize {
            chain = chain.mul(&power);
            power = power.phi();
            assert_eq!(pp.tables[k - 1], chain, "k = {k}");
        }
    }
}

#[test]
fn point_spectrum_split_matches_the_decision_gate() {
    let mut rng = StdRng::seed_from_u64(0x5157);
    let mut mismatches = 0;
    for _ in 0..200 {
        let level = rng.random_range(0..=4);
        let d = random_table(&mut rng, level);
        let s1 = qdiag_core::canrep::point_spectrum(&d, Isometry::S1, 64).unwrap();
        let s2 = qdiag_core::canrep::point_spectrum(&d, Isometry::S2, 64).unwrap();
        let gate_mismatch = matches!(
            decide_extendible(&d),
            Decision::NotExtendible(Obstruction::PointSpectrumMismatch { .. })
        );
        assert_eq!(s1 != s2, gate_mismatch);
        mismatches += gate_mismatch as u32;
    }
    // The sample must exercise both branches.
    assert!(mismatches > 10 && mismatches < 200);
}

#[test]
fn defining_relations_on_a_wide_window() {
    use GenSym::*;
    let r = verify_identity(
        &GenWord::new(vec![S2, U]),
        &GenWord::new(vec![U, U, S2]),
        1 << 12,
    )
    .unwrap();
    assert!(r.passed());
    assert!(r.safe_count >= 1 << 11);
}
