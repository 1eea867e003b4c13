//! Exact κ-Poincaré Hopf algebra (bicrossproduct basis, d = 3) on a
//! normal-ordering rewrite system with coefficients in ℚ(i)[κ, κ⁻¹].
//!
//! Letters and ranks: K₁..K₃ (0–2), J₁..J₃ (3–5), P₀ (6), P₁..P₃ (7–9),
//! E and E⁻¹ (10). Any adjacent pair ab with rank(a) > rank(b) rewrites to
//! ba + [a,b]; EE⁻¹ and E⁻¹E cancel. Each rewrite either removes a
//! K-letter from the bracket term or strictly lowers the number of
//! misordered pairs, so rewriting terminates.

use crate::exact::{cq, cq_i, cq_int, q, Poly, CQ};
use rand::Rng;
use serde::Serialize;
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

pub const K: [u8; 3] = [0, 1, 2];
pub const J: [u8; 3] = [3, 4, 5];
pub const P0: u8 = 6;
pub const P: [u8; 3] = [7, 8, 9];
pub const E: u8 = 10;
pub const EI: u8 = 11;

fn rank(l: u8) -> u8 {
    l.min(10)
}

fn eps(a: usize, b: usize, c: usize) -> i64 {
    crate::lie::levi_civita(a, b, c) as i64
}

pub fn letter_name(l: u8) -> String {
    match l {
        0..=2 => format!("K{}", l + 1),
        3..=5 => format!("J{}", l - 2),
        6 => "P0".into(),
        7..=9 => format!("P{}", l - 6),
        10 => "E".into(),
        _ => "E⁻¹".into(),
    }
}

/// Sign choices in the generator tables. `printed()` reproduces the tables
/// literally; `consistent()` is the unique choice passing every check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Conventions {
    /// [P_j, J_k] = s·iε_jkl P_l
    pub pj_sign: i8,
    /// η_jk = s·δ_jk in [P_j, K_k]
    pub eta_sign: i8,
    /// P_l P^l = s·Σ P_l²
    pub plpl_sign: i8,
    /// ΔK_j = K_j⊗1 + E⊗K_j + s·(1/κ)ε_jkl P_k⊗J_l
    pub dk_sign: i8,
    /// S(K_j) = −E⁻¹(K_j − (1/κ)ε_jkl X_kl), X = P_kJ_l if true else J_lP_k
    pub s_p_first: bool,
}

impl Conventions {
    pub fn printed() -> Self {
        Conventions {
            pj_sign: -1,
            eta_sign: -1,
            plpl_sign: -1,
            dk_sign: -1,
            s_p_first: true,
        }
    }

    pub fn consistent() -> Self {
        Conventions {
            pj_sign: 1,
            eta_sign: -1,
            plpl_sign: 1,
            dk_sign: 1,
            s_p_first: true,
        }
    }

    pub fn all() -> Vec<Conventions> {
        let mut out = Vec::new();
        for pj in [-1, 1] {
            for eta in [-1, 1] {
                for pl in [-1, 1] {
                    for dk in [-1, 1] {
                        for sp in [true, false] {
                            out.push(Conventions {
                                pj_sign: pj,
                                eta_sign: eta,
                                plpl_sign: pl,
                                dk_sign: dk,
                                s_p_first: sp,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

/// Normal-ordered monomial: sorted K/J/P letters followed by E^e.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mono {
    pub letters: Vec<u8>,
    pub e: i32,
}

impl Mono {
    pub fn one() -> Self {
        Mono { letters: Vec::new(), e: 0 }
    }

    fn word(&self) -> Vec<u8> {
        let mut w = self.letters.clone();
        let (l, n) = if self.e >= 0 { (E, self.e) } else { (EI, -self.e) };
        w.extend(std::iter::repeat(l).take(n as usize));
        w
    }

    pub fn degree(&self) -> usize {
        self.letters.len() + self.e.unsigned_abs() as usize
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.letters.iter().map(|&l| letter_name(l)).collect();
        match self.e {
            0 => {}
            1 => parts.push("E".into()),
            e => parts.push(format!("E^{e}")),
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("·"))
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Elem {
    pub terms: BTreeMap<Mono, Poly>,
}

impl Elem {
    pub fn zero() -> Self {
        Elem::default()
    }

    pub fn one() -> Self {
        Elem::mono(Mono::one(), Poly::one())
    }

    pub fn mono(m: Mono, c: Poly) -> Self {
        let mut e = Elem::zero();
        e.add_term(m, c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Mono, c: Poly) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m.clone()).or_default();
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, o: &Elem) -> Elem {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Elem) -> Elem {
        self.add(&o.scale(&Poly::constant(cq_int(-1))))
    }

    pub fn scale(&self, c: &Poly) -> Elem {
        let mut out = Elem::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    /// Keeps powers of κ not below `min`.
    pub fn truncate_below(&self, min: i32) -> Elem {
        let mut out = Elem::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::zero();
            for (k, v) in c.terms() {
                if k >= min {
                    t = &t + &Poly::monomial(v.clone(), k);
                }
            }
            out.add_term(m.clone(), t);
        }
        out
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(Mono::degree).max().unwrap_or(0)
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("[{}]·{}", c.render("κ"), m))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Element of a tensor power; keys hold one monomial per slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    pub arity: usize,
    pub terms: BTreeMap<Vec<Mono>, Poly>,
}

impl Tensor {
    pub fn zero(arity: usize) -> Self {
        Tensor { arity, terms: BTreeMap::new() }
    }

    pub fn one(arity: usize) -> Self {
        let mut t = Tensor::zero(arity);
        t.add_term(vec![Mono::one(); arity], Poly::one());
        t
    }

    pub fn pure(slots: Vec<Mono>, c: Poly) -> Self {
        let mut t = Tensor::zero(slots.len());
        t.add_term(slots, c);
        t
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, k: Vec<Mono>, c: Poly) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(k.clone()).or_default();
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn add(&self, o: &Tensor) -> Tensor {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Tensor) -> Tensor {
        self.add(&o.scale(&Poly::constant(cq_int(-1))))
    }

    pub fn scale(&self, c: &Poly) -> Tensor {
        let mut out = Tensor::zero(self.arity);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * c);
        }
        out
    }

    /// a₁⊗…⊗a_n built from elements.
    pub fn from_elems(parts: &[Elem]) -> Tensor {
        let mut acc = Tensor::one(0);
        for p in parts {
            let mut next = Tensor::zero(acc.arity + 1);
            for (k, c) in &acc.terms {
                for (m, d) in &p.terms {
                    let mut kk = k.clone();
                    kk.push(m.clone());
                    next.add_term(kk, c * d);
                }
            }
            acc = next;
        }
        acc
    }
}

impl fmt::Display for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let s: Vec<String> = k.iter().map(|m| m.to_string()).collect();
                format!("[{}]·{}", c.render("κ"), s.join("⊗"))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn pc(c: CQ, power: i32) -> Poly {
    Poly::monomial(c, power)
}

fn ci(re: (i64, i64), im: (i64, i64)) -> CQ {
    cq(q(re.0, re.1), q(im.0, im.1))
}

pub struct KappaPoincare {
    pub conv: Conventions,
    memo: RefCell<HashMap<Vec<u8>, Elem>>,
}

impl KappaPoincare {
    pub fn new(conv: Conventions) -> Self {
        KappaPoincare {
            conv,
            memo: RefCell::new(HashMap::new()),
        }
    }

    pub fn generators() -> Vec<u8> {
        (0..=10).collect()
    }

    pub fn gen(&self, l: u8) -> Elem {
        self.normal(&[l])
    }

    /// [a,b] for rank(a) > rank(b), as words with coefficients.
    pub fn bracket_table(&self, a: u8, b: u8) -> Vec<(Vec<u8>, Poly)> {
        let c = &self.conv;
        let i = cq_i();
        let mut out = Vec::new();
        let idx = |l: u8, base: u8| (l - base) as usize;
        match (a, b) {
            // [K_a, K_b] = −iε_abl J_l
            (0..=2, 0..=2) => {
                for l in 0..3 {
                    let e = eps(idx(a, 0), idx(b, 0), l);
                    if e != 0 {
                        out.push((vec![J[l]], pc(ci((0, 1), (-e, 1)), 0)));
                    }
                }
            }
            // [J_a, K_b] = iε_abl K_l
            (3..=5, 0..=2) => {
                for l in 0..3 {
                    let e = eps(idx(a, 3), idx(b, 0), l);
                    if e != 0 {
                        out.push((vec![K[l]], pc(ci((0, 1), (e, 1)), 0)));
                    }
                }
            }
            // [J_a, J_b] = iε_abl J_l
            (3..=5, 3..=5) => {
                for l in 0..3 {
                    let e = eps(idx(a, 3), idx(b, 3), l);
                    if e != 0 {
                        out.push((vec![J[l]], pc(ci((0, 1), (e, 1)), 0)));
                    }
                }
            }
            // [P₀, K_j] = −iP_j
            (6, 0..=2) => out.push((vec![P[idx(b, 0)]], pc(ci((0, 1), (-1, 1)), 0))),
            (6, 3..=5) => {}
            // [P_j, K_k]
            (7..=9, 0..=2) => {
                let (j, k) = (idx(a, 7), idx(b, 0));
                if j == k {
                    let h = ci((0, 1), (c.eta_sign as i64, 2));
                    out.push((vec![], pc(h.clone(), 1)));
                    out.push((vec![E, E], pc(-h.clone(), 1)));
                    for l in 0..3 {
                        out.push((vec![P[l], P[l]], pc(&h * cq_int(c.plpl_sign as i64), -1)));
                    }
                }
                out.push((vec![P[j], P[k]], pc(i.clone(), -1)));
            }
            // [P_j, J_k] = s·iε_jkl P_l
            (7..=9, 3..=5) => {
                for l in 0..3 {
                    let e = eps(idx(a, 7), idx(b, 3), l);
                    if e != 0 {
                        out.push((vec![P[l]], pc(ci((0, 1), (e * c.pj_sign as i64, 1)), 0)));
                    }
                }
            }
            (7..=9, 6..=9) => {}
            // [E, K_j] = (i/κ)P_jE, [E⁻¹, K_j] = −(i/κ)P_jE⁻¹
            (10, 0..=2) => out.push((vec![P[idx(b, 0)], E], pc(i.clone(), -1))),
            (11, 0..=2) => out.push((vec![P[idx(b, 0)], EI], pc(-i.clone(), -1))),
            (10 | 11, 3..=9) => {}
            _ => {}
        }
        out
    }

    /// [a,b] for any pair of letters as an element.
    pub fn bracket(&self, a: u8, b: u8) -> Elem {
        self.normal(&[a, b]).sub(&self.normal(&[b, a]))
    }

    fn find_redex(w: &[u8]) -> Option<usize> {
        (0..w.len().saturating_sub(1)).find(|&k| Self::is_redex(w[k], w[k + 1]))
    }

    fn is_redex(a: u8, b: u8) -> bool {
        (a == E && b == EI) || (a == EI && b == E) || rank(a) > rank(b)
    }

    fn settle(w: &[u8]) -> Mono {
        let mut letters = Vec::new();
        let mut e = 0;
        for &l in w {
            match l {
                E => e += 1,
                EI => e -= 1,
                _ => letters.push(l),
            }
        }
        Mono { letters, e }
    }

    fn rewrite_at(&self, w: &[u8], k: usize) -> Vec<(Vec<u8>, Poly)> {
        let (a, b) = (w[k], w[k + 1]);
        if (a == E && b == EI) || (a == EI && b == E) {
            let mut v = w[..k].to_vec();
            v.extend_from_slice(&w[k + 2..]);
            return vec![(v, Poly::one())];
        }
        let mut out = Vec::new();
        let mut swapped = w.to_vec();
        swapped.swap(k, k + 1);
        out.push((swapped, Poly::one()));
        for (t, c) in self.bracket_table(a, b) {
            let mut v = w[..k].to_vec();
            v.extend_from_slice(&t);
            v.extend_from_slice(&w[k + 2..]);
            out.push((v, c));
        }
        out
    }

    /// Normal form of a word, leftmost-redex strategy with memoization.
    pub fn normal(&self, w: &[u8]) -> Elem {
        if let Some(e) = self.memo.borrow().get(w) {
            return e.clone();
        }
        let res = match Self::find_redex(w) {
            None => Elem::mono(Self::settle(w), Poly::one()),
            Some(k) => {
                let mut acc = Elem::zero();
                for (v, c) in self.rewrite_at(w, k) {
                    acc = acc.add(&self.normal(&v).scale(&c));
                }
                acc
            }
        };
        self.memo.borrow_mut().insert(w.to_vec(), res.clone());
        res
    }

    /// Normal form with redexes chosen at random and no memoization.
    pub fn normal_random<R: Rng>(&self, w: &[u8], rng: &mut R) -> Elem {
        let redexes: Vec<usize> = (0..w.len().saturating_sub(1)).filter(|&k| Self::is_redex(w[k], w[k + 1])).collect();
        if redexes.is_empty() {
            return Elem::mono(Self::settle(w), Poly::one());
        }
        let k = redexes[rng.gen_range(0..redexes.len())];
        let mut acc = Elem::zero();
        for (v, c) in self.rewrite_at(w, k) {
            acc = acc.add(&self.normal_random(&v, rng).scale(&c));
        }
        acc
    }

    pub fn normal_elem(&self, words: &[(Vec<u8>, Poly)]) -> Elem {
        let mut acc = Elem::zero();
        for (w, c) in words {
            acc = acc.add(&self.normal(w).scale(c));
        }
        acc
    }

    pub fn mul_mono(&self, a: &Mono, b: &Mono) -> Elem {
        let mut w = a.word();
        w.extend(b.word());
        self.normal(&w)
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let mut out = Elem::zero();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                out = out.add(&self.mul_mono(ma, mb).scale(&(ca * cb)));
            }
        }
        out
    }

    pub fn commutator(&self, a: &Elem, b: &Elem) -> Elem {
        self.mul(a, b).sub(&self.mul(b, a))
    }

    pub fn tmul(&self, a: &Tensor, b: &Tensor) -> Tensor {
        assert_eq!(a.arity, b.arity);
        let mut out = Tensor::zero(a.arity);
        for (ka, ca) in &a.terms {
            for (kb, cb) in &b.terms {
                let slots: Vec<Elem> = ka.iter().zip(kb).map(|(x, y)| self.mul_mono(x, y)).collect();
                let t = Tensor::from_elems(&slots).scale(&(ca * cb));
                out = out.add(&t);
            }
        }
        out
    }

    fn g(&self, l: u8) -> Mono {
        Self::settle(&[l])
    }

    pub fn coproduct_letter(&self, l: u8) -> Tensor {
        let one = Mono::one();
        let e = Mono { letters: vec![], e: 1 };
        let mut t = Tensor::zero(2);
        match l {
            6 | 3..=5 => {
                t.add_term(vec![self.g(l), one.clone()], Poly::one());
                t.add_term(vec![one, self.g(l)], Poly::one());
            }
            7..=9 => {
                t.add_term(vec![self.g(l), one], Poly::one());
                t.add_term(vec![e, self.g(l)], Poly::one());
            }
            E => t.add_term(vec![e.clone(), e], Poly::one()),
            EI => {
                let ei = Mono { letters: vec![], e: -1 };
                t.add_term(vec![ei.clone(), ei], Poly::one());
            }
            0..=2 => {
                let j = l as usize;
                t.add_term(vec![self.g(l), one], Poly::one());
                t.add_term(vec![e, self.g(l)], Poly::one());
                for k in 0..3 {
                    for m in 0..3 {
                        let s = eps(j, k, m);
                        if s != 0 {
                            t.add_term(
                                vec![self.g(P[k]), self.g(J[m])],
                                pc(cq_int(s * self.conv.dk_sign as i64), -1),
                            );
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
        t
    }

    pub fn coproduct_mono(&self, m: &Mono) -> Tensor {
        let mut acc = Tensor::one(2);
        for l in m.word() {
            acc = self.tmul(&acc, &self.coproduct_letter(l));
        }
        acc
    }

    pub fn coproduct(&self, x: &Elem) -> Tensor {
        let mut out = Tensor::zero(2);
        for (m, c) in &x.terms {
            out = out.add(&self.coproduct_mono(m).scale(c));
        }
        out
    }

    pub fn counit_mono(m: &Mono) -> bool {
        m.letters.is_empty()
    }

    pub fn counit(&self, x: &Elem) -> Poly {
        let mut acc = Poly::zero();
        for (m, c) in &x.terms {
            if Self::counit_mono(m) {
                acc = &acc + c;
            }
        }
        acc
    }

    pub fn antipode_letter(&self, l: u8) -> Elem {
        let m1 = Poly::constant(cq_int(-1));
        match l {
            6 | 3..=5 => self.gen(l).scale(&m1),
            7..=9 => self.normal(&[EI, l]).scale(&m1),
            E => self.gen(EI),
            EI => self.gen(E),
            0..=2 => {
                let j = l as usize;
                let mut words = vec![(vec![EI, l], m1.clone())];
                for k in 0..3 {
                    for m in 0..3 {
                        let s = eps(j, k, m);
                        if s != 0 {
                            let w = if self.conv.s_p_first { vec![EI, P[k], J[m]] } else { vec![EI, J[m], P[k]] };
                            words.push((w, pc(cq_int(s), -1)));
                        }
                    }
                }
                self.normal_elem(&words)
            }
            _ => unreachable!(),
        }
    }

    pub fn antipode_mono(&self, m: &Mono) -> Elem {
        let mut acc = Elem::one();
        for l in m.word().into_iter().rev() {
            acc = self.mul(&acc, &self.antipode_letter(l));
        }
        acc
    }

    pub fn antipode(&self, x: &Elem) -> Elem {
        let mut out = Elem::zero();
        for (m, c) in &x.terms {
            out = out.add(&self.antipode_mono(m).scale(c));
        }
        out
    }

    /// Applies a map slot-wise to one slot of a tensor, raising the arity.
    fn expand_slot(&self, t: &Tensor, slot: usize) -> Tensor {
        let mut out = Tensor::zero(t.arity + 1);
        for (k, c) in &t.terms {
            let d = self.coproduct_mono(&k[slot]);
            for (dk, dc) in &d.terms {
                let mut kk = k[..slot].to_vec();
                kk.extend(dk.iter().cloned());
                kk.extend(k[slot + 1..].iter().cloned());
                out.add_term(kk, c * dc);
            }
        }
        out
    }

    fn counit_slot(&self, t: &Tensor, slot: usize) -> Elem {
        let mut out = Elem::zero();
        for (k, c) in &t.terms {
            if Self::counit_mono(&k[slot]) {
                out.add_term(k[1 - slot].clone(), c.clone());
            }
        }
        out
    }

    fn antipode_mult(&self, t: &Tensor, left: bool) -> Elem {
        let mut out = Elem::zero();
        for (k, c) in &t.terms {
            let prod = if left {
                self.mul(&self.antipode_mono(&k[0]), &Elem::mono(k[1].clone(), Poly::one()))
            } else {
                self.mul(&Elem::mono(k[0].clone(), Poly::one()), &self.antipode_mono(&k[1]))
            };
            out = out.add(&prod.scale(c));
        }
        out
    }

    pub fn check_coassociativity(&self, x: &Elem) -> CheckResult {
        let d = self.coproduct(x);
        let l = self.expand_slot(&d, 0);
        let r = self.expand_slot(&d, 1);
        CheckResult::from_tensor(l.sub(&r))
    }

    pub fn check_counit(&self, x: &Elem) -> CheckResult {
        let d = self.coproduct(x);
        let a = self.counit_slot(&d, 0).sub(x);
        let b = self.counit_slot(&d, 1).sub(x);
        CheckResult::from_elem(if a.is_zero() { b } else { a })
    }

    pub fn check_antipode(&self, x: &Elem) -> CheckResult {
        let d = self.coproduct(x);
        let target = Elem::one().scale(&self.counit(x));
        let l = self.antipode_mult(&d, true).sub(&target);
        let r = self.antipode_mult(&d, false).sub(&target);
        CheckResult::from_elem(if l.is_zero() { r } else { l })
    }

    /// Δ, ε and S compatibility of the relation [a,b] = rhs.
    pub fn check_relation(&self, a: u8, b: u8) -> CheckResult {
        let rhs = self.bracket(a, b);
        let (ea, eb) = (self.gen(a), self.gen(b));
        let da = self.coproduct(&ea);
        let db = self.coproduct(&eb);
        let lhs = self.tmul(&da, &db).sub(&self.tmul(&db, &da));
        let delta = lhs.sub(&self.coproduct(&rhs));
        if !delta.is_zero() {
            return CheckResult::from_tensor(delta);
        }
        let eps_res = self.counit(&rhs);
        if !eps_res.is_zero() {
            return CheckResult {
                pass: false,
                residual: format!("ε: {}", eps_res.render("κ")),
            };
        }
        let sa = self.antipode(&ea);
        let sb = self.antipode(&eb);
        let s_res = self.commutator(&sb, &sa).sub(&self.antipode(&rhs));
        CheckResult::from_elem(s_res)
    }

    /// Jacobiator of three letters computed with the normal-ordered product.
    pub fn jacobi(&self, a: u8, b: u8, c: u8) -> Elem {
        let (x, y, z) = (self.gen(a), self.gen(b), self.gen(c));
        let t1 = self.commutator(&self.commutator(&x, &y), &z);
        let t2 = self.commutator(&self.commutator(&y, &z), &x);
        let t3 = self.commutator(&self.commutator(&z, &x), &y);
        t1.add(&t2).add(&t3)
    }

    /// Overlap ambiguities cba (c > b > a in rank) resolved both ways.
    pub fn overlap_residual(&self, c: u8, b: u8, a: u8) -> Elem {
        let w = [c, b, a];
        let mut left = Elem::zero();
        for (v, k) in self.rewrite_at(&w, 0) {
            left = left.add(&self.normal(&v).scale(&k));
        }
        let mut right = Elem::zero();
        for (v, k) in self.rewrite_at(&w, 1) {
            right = right.add(&self.normal(&v).scale(&k));
        }
        left.sub(&right)
    }

    pub fn hopf_suite(&self) -> BTreeMap<String, GeneratorReport> {
        let mut out = BTreeMap::new();
        for l in Self::generators() {
            let x = self.gen(l);
            let mut bialg = CheckResult::ok();
            for m in 0..=11u8 {
                if m == l || (l == E && m == EI) {
                    continue;
                }
                let r = self.check_relation(l, m);
                if !r.pass {
                    bialg = r;
                    break;
                }
            }
            out.insert(
                letter_name(l),
                GeneratorReport {
                    coassoc: self.check_coassociativity(&x),
                    counit: self.check_counit(&x),
                    antipode: self.check_antipode(&x),
                    bialgebra: bialg,
                },
            );
        }
        out
    }

    /// [K_j, Σ_{n≤N}(−P₀/κ)ⁿ/n!] against −(i/κ)P_j·series, truncated at κ^{−N}.
    pub fn series_consistency(&self, j: usize, order: u32) -> CheckResult {
        let mut series = Elem::zero();
        for n in 0..=order {
            let w = vec![P0; n as usize];
            let c = ci((if n % 2 == 0 { 1 } else { -1 }, 1), (0, 1));
            let f = crate::exact::factorial(n);
            let coeff = cq(&c.re / crate::exact::Q::from_integer(f), num_traits::Zero::zero());
            series = series.add(&self.normal(&w).scale(&pc(coeff, -(n as i32))));
        }
        let kj = self.gen(K[j]);
        let lhs = self.commutator(&kj, &series);
        let rhs = self.mul(&self.gen(P[j]), &series).scale(&pc(-cq_i(), -1));
        let diff = lhs.sub(&rhs).truncate_below(-(order as i32));
        CheckResult::from_elem(diff)
    }

    pub fn random_word<R: Rng>(rng: &mut R, max_degree: usize) -> Vec<u8> {
        let n = rng.gen_range(0..=max_degree);
        (0..n).map(|_| rng.gen_range(0..=11u8)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub pass: bool,
    pub residual: String,
}

impl CheckResult {
    pub fn ok() -> Self {
        CheckResult {
            pass: true,
            residual: "0".into(),
        }
    }

    pub fn from_elem(e: Elem) -> Self {
        CheckResult {
            pass: e.is_zero(),
            residual: e.to_string(),
        }
    }

    pub fn from_tensor(t: Tensor) -> Self {
        CheckResult {
            pass: t.is_zero(),
            residual: t.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorReport {
    pub coassoc: CheckResult,
    pub counit: CheckResult,
    pub antipode: CheckResult,
    pub bialgebra: CheckResult,
}

impl GeneratorReport {
    pub fn pass(&self) -> bool {
        self.coassoc.pass && self.counit.pass && self.antipode.pass && self.bialgebra.pass
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub conventions: Conventions,
    pub overlaps: bool,
    pub hopf: bool,
}

/// Runs the consistency checks for every sign choice.
pub fn convention_scan() -> Vec<ScanRow> {
    Conventions::all()
        .into_iter()
        .map(|conv| {
            let eng = KappaPoincare::new(conv);
            let mut overlaps = true;
            'o: for c in 0..=11u8 {
                for b in 0..=11u8 {
                    for a in 0..=11u8 {
                        if KappaPoincare::is_redex(c, b) && KappaPoincare::is_redex(b, a) && !eng.overlap_residual(c, b, a).is_zero() {
                            overlaps = false;
                            break 'o;
                        }
                    }
                }
            }
            let hopf = eng.hopf_suite().values().all(GeneratorReport::pass);
            ScanRow { conventions: conv, overlaps, hopf }
        })
        .collect()
}
