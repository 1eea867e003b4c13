use qstkit::exact::{cq_i, cq_int, Poly};
use qstkit::hopf::{Conventions, Elem, KappaPoincare, Mono, Tensor, E, EI, J, K, P, P0};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn eng() -> KappaPoincare {
    KappaPoincare::new(Conventions::consistent())
}

fn m(letters: &[u8], e: i32) -> Mono {
    Mono { letters: letters.to_vec(), e }
}

#[test]
fn randomized_rewrite_order_agrees() {
    let k = eng();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let terms: Vec<(Vec<u8>, Poly)> = (0..rng.gen_range(1..=3))
            .map(|_| (KappaPoincare::random_word(&mut rng, 4), Poly::constant(cq_int(rng.gen_range(-3..=3)))))
            .collect();
        let det = k.normal_elem(&terms);
        let mut rnd = Elem::zero();
        for (w, c) in &terms {
            rnd = rnd.add(&k.normal_random(w, &mut rng).scale(c));
        }
        assert_eq!(det, rnd);
    }
}

#[test]
fn normal_form_is_idempotent_and_k_degree_bounded() {
    let k = eng();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let w = KappaPoincare::random_word(&mut rng, 4);
        let kcount = w.iter().filter(|l| **l <= 2).count();
        let nf = k.normal(&w);
        for (mono, _) in &nf.terms {
            assert!(mono.letters.iter().filter(|l| **l <= 2).count() <= kcount);
            assert!(mono.letters.windows(2).all(|p| p[0] <= p[1]));
            assert_eq!(k.normal(&{
                let mut v = mono.letters.clone();
                let l = if mono.e >= 0 { E } else { EI };
                v.extend(std::iter::repeat(l).take(mono.e.unsigned_abs() as usize));
                v
            }), Elem::mono(mono.clone(), Poly::one()));
        }
    }
}

#[test]
fn full_suite_passes_for_all_generators() {
    let report = eng().hopf_suite();
    assert_eq!(report.len(), 11);
    for (g, r) in &report {
        assert!(r.pass(), "{g}: {r:?}");
    }
}

#[test]
fn printed_tables_fail_somewhere() {
    let report = KappaPoincare::new(Conventions::printed()).hopf_suite();
    assert!(report.values().any(|r| !r.pass()));
}

#[test]
fn pj_coassociativity_expansion() {
    let k = eng();
    let d = k.coproduct(&k.gen(P[0]));
    let mut want = Tensor::zero(3);
    want.add_term(vec![m(&[P[0]], 0), Mono::one(), Mono::one()], Poly::one());
    want.add_term(vec![m(&[], 1), m(&[P[0]], 0), Mono::one()], Poly::one());
    want.add_term(vec![m(&[], 1), m(&[], 1), m(&[P[0]], 0)], Poly::one());
    let mut l = Tensor::zero(3);
    for (key, c) in &d.terms {
        let dd = k.coproduct_mono(&key[0]);
        for (k2, c2) in &dd.terms {
            l.add_term(vec![k2[0].clone(), k2[1].clone(), key[1].clone()], c * c2);
        }
    }
    assert_eq!(l, want);
    assert!(k.check_coassociativity(&k.gen(P[0])).pass);
}

#[test]
fn antipode_examples() {
    let k = eng();
    assert_eq!(k.antipode(&Elem::one()), Elem::one());
    assert_eq!(k.counit(&Elem::one()), Poly::one());
    assert_eq!(k.antipode(&k.gen(P0)), k.gen(P0).scale(&Poly::constant(cq_int(-1))));
    assert_eq!(k.mul(&k.antipode(&k.gen(E)), &k.gen(E)), Elem::one());
}

#[test]
fn k_e_relation_and_headline_relation() {
    let k = eng();
    for j in 0..3 {
        let b = k.bracket(K[j], E);
        let want = Elem::mono(m(&[P[j]], 1), Poly::monomial(-cq_i(), -1));
        assert_eq!(b, want);
        for l in 0..3 {
            assert!(k.check_relation(P[j], K[l]).pass);
            assert!(k.check_relation(K[j], K[l]).pass || j == l);
            assert!(k.check_relation(P[j], J[l]).pass);
        }
    }
    assert!(k.bracket(P[0], P[1]).is_zero());
}

#[test]
fn generic_elements_satisfy_axioms() {
    let k = eng();
    let x = k.normal_elem(&[(vec![P[0], E], Poly::one()), (vec![K[1], P[2]], Poly::one())]);
    assert!(k.check_coassociativity(&x).pass);
    assert!(k.check_counit(&x).pass);
    assert!(k.check_antipode(&x).pass);
}

#[test]
fn e_series_consistency() {
    let k = eng();
    for n in 1..=6 {
        for j in 0..3 {
            assert!(k.series_consistency(j, n).pass);
        }
    }
}

#[test]
fn overlaps_resolve_under_consistent_tables() {
    let k = eng();
    for c in 0..=11u8 {
        for b in 0..=11u8 {
            for a in 0..=11u8 {
                assert!(k.jacobi(c, b, a).is_zero(), "{c} {b} {a}");
            }
        }
    }
}
