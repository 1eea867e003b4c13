//! Plane-wave packets, their star product and involution, the diagonal
//! action of translations, and the symbolic delta calculus used for trace
//! identities.

use crate::group::GroupDescriptor;
use crate::{Error, Result, C64};
use rand::Rng;
use serde_json::{json, Value};
use std::cmp::Ordering as CmpOrdering;
use std::collections::BTreeMap;
use std::sync::Arc;

pub const MERGE_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct WavePacket {
    group: Arc<GroupDescriptor>,
    terms: Vec<(Vec<C64>, C64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    P(usize),
    E(i32),
    X(usize),
}

fn same_point(a: &[C64], b: &[C64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= MERGE_TOL)
}

fn cmp_c64(a: &C64, b: &C64) -> CmpOrdering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn cmp_point(a: &[C64], b: &[C64]) -> CmpOrdering {
    for (x, y) in a.iter().zip(b) {
        let c = cmp_c64(x, y);
        if c != CmpOrdering::Equal {
            return c;
        }
    }
    a.len().cmp(&b.len())
}

fn same_group(a: &Arc<GroupDescriptor>, b: &Arc<GroupDescriptor>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::GroupMismatch(a.name(), b.name()))
    }
}

impl WavePacket {
    pub fn new(group: Arc<GroupDescriptor>) -> Self {
        WavePacket { group, terms: Vec::new() }
    }

    pub fn plane(group: Arc<GroupDescriptor>, p: &[f64]) -> Result<Self> {
        let mut w = WavePacket::new(group);
        w.insert(p.iter().map(|&x| C64::new(x, 0.0)).collect(), C64::new(1.0, 0.0))?;
        Ok(w)
    }

    pub fn group(&self) -> &Arc<GroupDescriptor> {
        &self.group
    }

    /// Terms sorted by momentum.
    pub fn terms(&self) -> &[(Vec<C64>, C64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn insert(&mut self, p: Vec<C64>, amp: C64) -> Result<()> {
        if p.len() != self.group.dim() {
            return Err(Error::DimMismatch {
                expected: self.group.dim(),
                got: p.len(),
            });
        }
        if let Some(t) = self.terms.iter_mut().find(|t| same_point(&t.0, &p)) {
            t.1 += amp;
        } else {
            self.terms.push((p, amp));
        }
        self.terms.retain(|t| t.1 != C64::new(0.0, 0.0));
        self.terms.sort_by(|a, b| cmp_point(&a.0, &b.0));
        Ok(())
    }

    fn with_terms(&self, terms: impl IntoIterator<Item = (Vec<C64>, C64)>) -> Result<Self> {
        let mut out = WavePacket::new(self.group.clone());
        for (p, a) in terms {
            out.insert(p, a)?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: C64) -> Result<Self> {
        self.with_terms(self.terms.iter().map(|(p, a)| (p.clone(), a * s)))
    }

    pub fn add(&self, other: &WavePacket) -> Result<Self> {
        same_group(&self.group, &other.group)?;
        self.with_terms(self.terms.iter().chain(&other.terms).cloned())
    }

    pub fn star(&self, other: &WavePacket) -> Result<Self> {
        same_group(&self.group, &other.group)?;
        let mut out = Vec::with_capacity(self.len() * other.len());
        for (p, a) in &self.terms {
            for (q, b) in &other.terms {
                out.push((self.group.add(p, q)?, a * b));
            }
        }
        self.with_terms(out)
    }

    pub fn dagger(&self) -> Result<Self> {
        let mut out = Vec::with_capacity(self.len());
        for (p, a) in &self.terms {
            out.push((self.group.inv(p)?, a.conj()));
        }
        self.with_terms(out)
    }

    pub fn eigenvalue(&self, gen: Generator, p: &[C64]) -> Result<C64> {
        let kappa = match (&self.group.law, self.group.ordering()) {
            (_, Some(crate::group::Ordering::Right)) => self.group.kappa().unwrap(),
            _ => {
                return Err(Error::UndefinedGenerator(format!("{gen:?}"), self.group.name()));
            }
        };
        let n = p.len();
        Ok(match gen {
            Generator::P(mu) if mu < n => p[mu],
            Generator::E(k) => (-p[0] * k as f64 / kappa).exp(),
            Generator::X(0) => (C64::new(1.0, 0.0) - (-p[0] / kappa).exp()) * kappa,
            Generator::X(j) if j < n => p[j],
            _ => return Err(Error::UndefinedGenerator(format!("{gen:?}"), self.group.name())),
        })
    }

    pub fn act(&self, gen: Generator) -> Result<Self> {
        let mut out = Vec::with_capacity(self.len());
        for (p, a) in &self.terms {
            out.push((p.clone(), a * self.eigenvalue(gen, p)?));
        }
        self.with_terms(out)
    }

    /// Value at a point of the commutative representative; phase slots
    /// beyond the coordinate count multiply as e^{ip}.
    pub fn eval(&self, x: &[f64]) -> C64 {
        let i = C64::new(0.0, 1.0);
        self.terms
            .iter()
            .map(|(p, a)| {
                let mut ph = C64::new(0.0, 0.0);
                for (k, pk) in p.iter().enumerate() {
                    ph += *pk * x.get(k).copied().unwrap_or(1.0);
                }
                a * (i * ph).exp()
            })
            .sum()
    }

    pub fn integral(&self) -> DeltaSum {
        let mut ds = DeltaSum::new(self.group.clone());
        for (p, a) in &self.terms {
            ds.push(*a, BTreeMap::new(), vec![(Letter(p.clone()), false)]);
        }
        ds
    }

    /// ∫ f⋆g = Σ a_p b_q δ(p⊞q), with the word kept unevaluated.
    pub fn integral_star(&self, other: &WavePacket) -> Result<DeltaSum> {
        same_group(&self.group, &other.group)?;
        let mut ds = DeltaSum::new(self.group.clone());
        for (p, a) in &self.terms {
            for (q, b) in &other.terms {
                ds.push(a * b, BTreeMap::new(), vec![(Letter(p.clone()), false), (Letter(q.clone()), false)]);
            }
        }
        Ok(ds)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(p, a)| {
                let mut t = json!({
                    "p": p.iter().map(|z| z.re).collect::<Vec<_>>(),
                    "re": a.re,
                    "im": a.im,
                });
                if p.iter().any(|z| z.im != 0.0) {
                    t["p_im"] = json!(p.iter().map(|z| z.im).collect::<Vec<_>>());
                }
                t
            })
            .collect();
        json!({"group": self.group.name(), "terms": terms})
    }

    pub fn from_json(group: Arc<GroupDescriptor>, v: &Value) -> Result<Self> {
        let cfg = |path: &str, msg: &str| Error::Config {
            path: path.into(),
            msg: msg.into(),
        };
        let name = v.get("group").and_then(Value::as_str).ok_or_else(|| cfg("/group", "missing string"))?;
        if name != group.name() && name != group.structure.name {
            return Err(Error::GroupMismatch(name.into(), group.name()));
        }
        let terms = v.get("terms").and_then(Value::as_array).ok_or_else(|| cfg("/terms", "missing array"))?;
        let mut out = WavePacket::new(group);
        for (k, t) in terms.iter().enumerate() {
            let path = format!("/terms/{k}");
            let p = t
                .get("p")
                .and_then(Value::as_array)
                .ok_or_else(|| cfg(&format!("{path}/p"), "missing array"))?;
            let im = t.get("p_im").and_then(Value::as_array);
            let mut mom = Vec::with_capacity(p.len());
            for (j, x) in p.iter().enumerate() {
                let re = x.as_f64().ok_or_else(|| cfg(&format!("{path}/p/{j}"), "not a number"))?;
                let ii = im.and_then(|a| a.get(j)).and_then(Value::as_f64).unwrap_or(0.0);
                mom.push(C64::new(re, ii));
            }
            let re = t.get("re").and_then(Value::as_f64).ok_or_else(|| cfg(&format!("{path}/re"), "not a number"))?;
            let imv = t.get("im").and_then(Value::as_f64).unwrap_or(0.0);
            out.insert(mom, C64::new(re, imv))?;
        }
        Ok(out)
    }
}

impl PartialEq for WavePacket {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.terms == other.terms
    }
}

/// A concrete momentum used as a letter of a delta word.
#[derive(Clone, Debug)]
pub struct Letter(pub Vec<C64>);

impl PartialEq for Letter {
    fn eq(&self, o: &Self) -> bool {
        cmp_point(&self.0, &o.0) == CmpOrdering::Equal
    }
}
impl Eq for Letter {}
impl PartialOrd for Letter {
    fn partial_cmp(&self, o: &Self) -> Option<CmpOrdering> {
        Some(self.cmp(o))
    }
}
impl Ord for Letter {
    fn cmp(&self, o: &Self) -> CmpOrdering {
        cmp_point(&self.0, &o.0)
    }
}

impl Letter {
    fn is_zero(&self) -> bool {
        self.0.iter().all(|z| *z == C64::new(0.0, 0.0))
    }
}

/// `(letter, inverted)`: the word ⊞ of its letters, inverted ones as ⊟.
pub type Word = Vec<(Letter, bool)>;
/// Exponents of symbolic modular factors Δ(letter)^n.
pub type Powers = BTreeMap<Letter, i32>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TermKey {
    pub word: Word,
    pub powers: Vec<(Letter, i32)>,
}

#[derive(Clone, Debug)]
pub struct DeltaSum {
    group: Arc<GroupDescriptor>,
    raw: Vec<(C64, Powers, Word)>,
}

fn invert_word(w: &Word) -> Word {
    w.iter().rev().map(|(l, inv)| (l.clone(), !inv)).collect()
}

/// δ(u⊞v) = Δ(⊟v) δ(v⊞u)
fn rotate(w: &Word, k: usize, powers: &mut Powers) -> Word {
    for (l, inv) in &w[k..] {
        *powers.entry(l.clone()).or_insert(0) += if *inv { 1 } else { -1 };
    }
    let mut out = w[k..].to_vec();
    out.extend_from_slice(&w[..k]);
    out
}

fn free_reduce(w: &mut Word) {
    let mut out: Word = Vec::with_capacity(w.len());
    for t in w.drain(..) {
        if let Some(last) = out.last() {
            if last.0 == t.0 && last.1 != t.1 {
                out.pop();
                continue;
            }
        }
        out.push(t);
    }
    *w = out;
}

impl DeltaSum {
    pub fn new(group: Arc<GroupDescriptor>) -> Self {
        DeltaSum { group, raw: Vec::new() }
    }

    pub fn push(&mut self, amp: C64, powers: Powers, word: Word) {
        self.raw.push((amp, powers, word));
    }

    pub fn extend(&mut self, other: &DeltaSum) {
        self.raw.extend(other.raw.iter().cloned());
    }

    pub fn raw_len(&self) -> usize {
        self.raw.len()
    }

    fn normalize_term(&self, mut powers: Powers, mut word: Word) -> TermKey {
        word.retain(|(l, _)| !l.is_zero());
        free_reduce(&mut word);
        // cyclic reduction: δ(a⊞w⊟a) = Δ(…)δ(w) handled through a rotation
        while word.len() >= 2 && word[0].0 == word[word.len() - 1].0 && word[0].1 != word[word.len() - 1].1 {
            word = rotate(&word, 1, &mut powers);
            free_reduce(&mut word);
        }
        if !word.is_empty() {
            let mut best: Option<(Word, Powers)> = None;
            for w in [word.clone(), invert_word(&word)] {
                for k in 0..w.len() {
                    let mut pw = powers.clone();
                    let r = rotate(&w, k, &mut pw);
                    if best.as_ref().map_or(true, |(b, _)| r < *b) {
                        best = Some((r, pw));
                    }
                }
            }
            let (w, p) = best.unwrap();
            word = w;
            powers = p;
            // on the support Π Δ(l)^{σ_l} = 1: eliminate the largest letter
            let mut net: BTreeMap<Letter, i32> = BTreeMap::new();
            for (l, inv) in &word {
                *net.entry(l.clone()).or_insert(0) += if *inv { -1 } else { 1 };
            }
            if let Some((top, sigma)) = net.iter().rev().find(|(_, s)| **s != 0) {
                if sigma.abs() == 1 {
                    let e = powers.remove(top).unwrap_or(0);
                    if e != 0 {
                        for (l, s) in &net {
                            if l != top && *s != 0 {
                                *powers.entry(l.clone()).or_insert(0) -= e * s * sigma;
                            }
                        }
                    }
                }
            }
        }
        if self.group.is_unimodular() {
            powers.clear();
        }
        powers.retain(|l, e| *e != 0 && !l.is_zero());
        TermKey {
            word,
            powers: powers.into_iter().collect(),
        }
    }

    /// Canonical form: exact amplitudes summed in a fixed order per key.
    pub fn normal_form(&self) -> BTreeMap<TermKey, C64> {
        let mut buckets: BTreeMap<TermKey, Vec<C64>> = BTreeMap::new();
        for (a, p, w) in &self.raw {
            let key = self.normalize_term(p.clone(), w.clone());
            buckets.entry(key).or_default().push(*a);
        }
        buckets
            .into_iter()
            .filter_map(|(k, mut amps)| {
                amps.sort_by(cmp_c64);
                let s: C64 = amps.iter().sum();
                (s != C64::new(0.0, 0.0)).then_some((k, s))
            })
            .collect()
    }

    /// An equivalent sum obtained by random applications of the rewrite
    /// rules, each carrying its modular factor.
    pub fn scrambled<R: Rng>(&self, rng: &mut R) -> DeltaSum {
        let mut out = DeltaSum::new(self.group.clone());
        for (a, p, w) in &self.raw {
            let mut powers = p.clone();
            let mut word = w.clone();
            for _ in 0..rng.gen_range(0..6) {
                match rng.gen_range(0..3) {
                    0 if !word.is_empty() => {
                        let k = rng.gen_range(0..word.len());
                        word = rotate(&word, k, &mut powers);
                    }
                    1 => word = invert_word(&word),
                    _ if !word.is_empty() => {
                        // insert l⊟l at a random position
                        let l = word[rng.gen_range(0..word.len())].0.clone();
                        let at = rng.gen_range(0..=word.len());
                        let inv = rng.gen_bool(0.5);
                        word.insert(at, (l.clone(), !inv));
                        word.insert(at, (l, inv));
                    }
                    _ => {}
                }
            }
            out.push(*a, powers, word);
        }
        out
    }

    /// Numeric value as a multiple of the formal volume δ(0): words that
    /// evaluate to a non-zero momentum vanish.
    pub fn collapse(&self, tol: f64) -> Result<C64> {
        let mut parts = Vec::new();
        for (k, a) in self.normal_form() {
            let n = self.group.dim();
            let mut m = vec![C64::new(0.0, 0.0); n];
            for (l, inv) in &k.word {
                let x = if *inv { self.group.inv(&l.0)? } else { l.0.clone() };
                m = self.group.add(&m, &x)?;
            }
            if crate::group::norm(&m) <= tol {
                let mut f = a;
                for (l, e) in &k.powers {
                    f *= self.group.modular(&l.0).powi(*e);
                }
                parts.push(f);
            }
        }
        parts.sort_by(cmp_c64);
        Ok(parts.iter().sum())
    }

    pub fn render(&self) -> String {
        let nf = self.normal_form();
        if nf.is_empty() {
            return "0".into();
        }
        let fmt_l = |l: &Letter| {
            let v: Vec<String> = l.0.iter().map(|z| format!("{}", z.re)).collect();
            format!("({})", v.join(","))
        };
        nf.iter()
            .map(|(k, a)| {
                let w = if k.word.is_empty() {
                    "0".to_string()
                } else {
                    k.word
                        .iter()
                        .map(|(l, inv)| format!("{}{}", if *inv { "⊟" } else { "" }, fmt_l(l)))
                        .collect::<Vec<_>>()
                        .join("⊞")
                };
                let d: String = k.powers.iter().map(|(l, e)| format!("Δ{}^{} ", fmt_l(l), e)).collect();
                format!("({}{:+}i) {}δ({})", a.re, a.im, d, w)
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl PartialEq for DeltaSum {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.normal_form() == other.normal_form()
    }
}

/// ∫ f⋆g against ∫ (E^d▷g)⋆f, with E^d▷e_q = Δ(q)⁻¹ e_q kept symbolic.
pub fn twisted_trace_sides(f: &WavePacket, g: &WavePacket) -> Result<(DeltaSum, DeltaSum)> {
    let lhs = f.integral_star(g)?;
    let mut rhs = DeltaSum::new(f.group.clone());
    for (q, b) in &g.terms {
        for (p, a) in &f.terms {
            let mut pw = Powers::new();
            if !f.group.is_unimodular() {
                pw.insert(Letter(q.clone()), -1);
            }
            rhs.push(b * a, pw, vec![(Letter(q.clone()), false), (Letter(p.clone()), false)]);
        }
    }
    Ok((lhs, rhs))
}

pub fn twisted_trace_check(f: &WavePacket, g: &WavePacket) -> Result<bool> {
    let (l, r) = twisted_trace_sides(f, g)?;
    Ok(l == r)
}

pub fn plain_cyclicity_check(f: &WavePacket, g: &WavePacket) -> Result<bool> {
    Ok(f.integral_star(g)? == g.integral_star(f)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::MoyalConvention;

    fn kappa1() -> Arc<GroupDescriptor> {
        Arc::new(GroupDescriptor::kappa_minkowski(1.0, 1).unwrap())
    }

    #[test]
    fn star_and_dagger_examples() {
        let g = kappa1();
        let a = WavePacket::plane(g.clone(), &[2f64.ln(), 1.0]).unwrap();
        let b = WavePacket::plane(g.clone(), &[0.0, 2.0]).unwrap();
        let s = a.star(&b).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.terms()[0].0[1].re - 2.0).abs() < 1e-15);
        let d = a.dagger().unwrap();
        assert!((d.terms()[0].0[1].re + 2.0).abs() < 1e-15);
        let e0 = WavePacket::plane(g, &[0.0, 0.0]).unwrap();
        assert_eq!(a.star(&e0).unwrap(), a);
    }

    #[test]
    fn x0_eigenvalue() {
        let a = WavePacket::plane(kappa1(), &[2f64.ln(), 1.0]).unwrap();
        let x = a.act(Generator::X(0)).unwrap();
        assert!((x.terms()[0].1.re - 0.5).abs() < 1e-15);
        let e = WavePacket::plane(kappa1(), &[0.0, 3.0]).unwrap().act(Generator::E(1)).unwrap();
        assert_eq!(e.terms()[0].1, C64::new(1.0, 0.0));
    }

    #[test]
    fn generators_need_kappa() {
        let m = Arc::new(GroupDescriptor::moyal(1.0, 4, MoyalConvention::Bch).unwrap());
        let a = WavePacket::plane(m, &[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(a.act(Generator::E(1)), Err(Error::UndefinedGenerator(..))));
    }

    #[test]
    fn group_mismatch_is_rejected() {
        let a = WavePacket::plane(kappa1(), &[0.0, 1.0]).unwrap();
        let b = WavePacket::plane(Arc::new(GroupDescriptor::kappa_minkowski(2.0, 1).unwrap()), &[0.0, 1.0]).unwrap();
        assert!(matches!(a.star(&b), Err(Error::GroupMismatch(..))));
    }

    #[test]
    fn merge_and_prune() {
        let mut w = WavePacket::new(kappa1());
        w.insert(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)], C64::new(1.0, 0.0)).unwrap();
        w.insert(vec![C64::new(1.0 + 1e-13, 0.0), C64::new(0.0, 0.0)], C64::new(-1.0, 0.0)).unwrap();
        assert!(w.is_empty());
    }

    #[test]
    fn delta_rotation_rule() {
        let g = kappa1();
        let p = vec![C64::new(0.5, 0.0), C64::new(1.0, 0.0)];
        let q = vec![C64::new(-0.5, 0.0), C64::new(2.0, 0.0)];
        let mut a = DeltaSum::new(g.clone());
        a.push(C64::new(1.0, 0.0), Powers::new(), vec![(Letter(p.clone()), false), (Letter(q.clone()), false)]);
        let mut b = DeltaSum::new(g);
        let mut pw = Powers::new();
        pw.insert(Letter(q.clone()), -1);
        b.push(C64::new(1.0, 0.0), pw, vec![(Letter(q), false), (Letter(p), false)]);
        assert_eq!(a, b);
    }

    #[test]
    fn volume_and_inverse_rule() {
        let g = kappa1();
        let e0 = WavePacket::plane(g.clone(), &[0.0, 0.0]).unwrap();
        let nf = e0.integral().normal_form();
        assert!(nf.keys().next().unwrap().word.is_empty());
        let p = vec![C64::new(0.5, 0.0), C64::new(1.0, 0.0)];
        let mut a = DeltaSum::new(g.clone());
        a.push(C64::new(1.0, 0.0), Powers::new(), vec![(Letter(p.clone()), true)]);
        let mut b = DeltaSum::new(g);
        b.push(C64::new(1.0, 0.0), Powers::new(), vec![(Letter(p), false)]);
        assert_eq!(a, b);
    }

    #[test]
    fn kappa_trace_is_not_plainly_cyclic() {
        let g = kappa1();
        let f = WavePacket::plane(g.clone(), &[0.5, 1.0]).unwrap();
        let h = WavePacket::plane(g, &[-0.5, 3.0]).unwrap();
        assert!(!plain_cyclicity_check(&f, &h).unwrap());
        assert!(twisted_trace_check(&f, &h).unwrap());
    }
}
