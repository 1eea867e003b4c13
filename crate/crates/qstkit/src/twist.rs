//! Drinfel'd twists over the universal enveloping algebra of an abelian Lie
//! algebra with generators X_1..X_r, as tensor series in κ̄ truncated at
//! order N with exact coefficients.

use crate::exact::{binomial, cq, cq_i, cq_int, cq_inv, factorial, Poly, Q, CQ};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

pub const MAX_ORDER: usize = 6;
pub const DEFAULT_ORDER: usize = 4;

/// Exponent vector per tensor slot.
pub type Key = Vec<Vec<u32>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TSeries {
    pub arity: usize,
    pub rank: usize,
    pub order: i32,
    pub terms: BTreeMap<Key, Poly>,
}

impl TSeries {
    pub fn zero(arity: usize, rank: usize, order: usize) -> Self {
        TSeries {
            arity,
            rank,
            order: order as i32,
            terms: BTreeMap::new(),
        }
    }

    fn unit_key(&self) -> Key {
        vec![vec![0; self.rank]; self.arity]
    }

    pub fn one(arity: usize, rank: usize, order: usize) -> Self {
        let mut t = TSeries::zero(arity, rank, order);
        let k = t.unit_key();
        t.add_term(k, Poly::one());
        t
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, k: Key, c: Poly) {
        let c = c.truncate(self.order);
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(k.clone()).or_default();
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn add(&self, o: &TSeries) -> TSeries {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &TSeries) -> TSeries {
        self.add(&o.scale(&Poly::constant(cq_int(-1))))
    }

    pub fn scale(&self, c: &Poly) -> TSeries {
        let mut out = TSeries::zero(self.arity, self.rank, self.order as usize);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.mul_truncated(c, Some(self.order)));
        }
        out
    }

    pub fn mul(&self, o: &TSeries) -> TSeries {
        let mut out = TSeries::zero(self.arity, self.rank, self.order as usize);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &o.terms {
                let k: Key = ka
                    .iter()
                    .zip(kb)
                    .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                    .collect();
                out.add_term(k, ca.mul_truncated(cb, Some(self.order)));
            }
        }
        out
    }

    pub fn pow(&self, n: usize) -> TSeries {
        let mut acc = TSeries::one(self.arity, self.rank, self.order as usize);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// exp(κ̄·c·T) for a κ̄-free T, truncated.
    pub fn exp_of(t: &TSeries, c: CQ) -> TSeries {
        let gen = t.scale(&Poly::monomial(c, 1));
        let mut acc = TSeries::one(t.arity, t.rank, t.order as usize);
        let mut power = TSeries::one(t.arity, t.rank, t.order as usize);
        for n in 1..=t.order as u32 {
            power = power.mul(&gen);
            let inv = Poly::constant(cq(Q::new(BigInt::one(), factorial(n)), Q::zero()));
            acc = acc.add(&power.scale(&inv));
        }
        acc
    }

    /// κ̄⁰ part.
    pub fn order_zero(&self) -> TSeries {
        let mut out = TSeries::zero(self.arity, self.rank, self.order as usize);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), Poly::constant(c.coeff(0)));
        }
        out
    }

    /// Inverse of a series whose κ̄⁰ part is a non-zero multiple of 1.
    pub fn inverse(&self) -> Result<TSeries> {
        let zero = self.order_zero();
        let uk = self.unit_key();
        let c0 = zero.terms.get(&uk).map(|p| p.coeff(0)).unwrap_or_else(CQ::zero);
        if zero.terms.len() != usize::from(!c0.is_zero()) || c0.is_zero() {
            return Err(Error::NotInvertible("order-zero term is not a non-zero multiple of 1⊗1".into()));
        }
        let ci = cq_inv(&c0).unwrap();
        let normed = self.scale(&Poly::constant(ci.clone()));
        let g = TSeries::one(self.arity, self.rank, self.order as usize).sub(&normed);
        let mut acc = TSeries::one(self.arity, self.rank, self.order as usize);
        let mut power = acc.clone();
        for _ in 1..=self.order {
            power = power.mul(&g);
            acc = acc.add(&power);
        }
        Ok(acc.scale(&Poly::constant(ci)))
    }

    /// Coproduct applied to one slot: X^a ↦ Σ_b C(a,b) X^b ⊗ X^{a−b}.
    pub fn coproduct_slot(&self, slot: usize) -> TSeries {
        let mut out = TSeries::zero(self.arity + 1, self.rank, self.order as usize);
        for (k, c) in &self.terms {
            let a = &k[slot];
            let mut splits: Vec<(Vec<u32>, Vec<u32>, BigInt)> = vec![(vec![], vec![], BigInt::one())];
            for &ai in a {
                let mut next = Vec::new();
                for (l, r, m) in &splits {
                    for b in 0..=ai {
                        let mut l2 = l.clone();
                        l2.push(b);
                        let mut r2 = r.clone();
                        r2.push(ai - b);
                        next.push((l2, r2, m * binomial(ai, b)));
                    }
                }
                splits = next;
            }
            for (l, r, m) in splits {
                let mut kk = k[..slot].to_vec();
                kk.push(l);
                kk.push(r);
                kk.extend(k[slot + 1..].iter().cloned());
                out.add_term(kk, c.scale(&cq(Q::from_integer(m), Q::zero())));
            }
        }
        out
    }

    pub fn counit_slot(&self, slot: usize) -> TSeries {
        let mut out = TSeries::zero(self.arity - 1, self.rank, self.order as usize);
        for (k, c) in &self.terms {
            if k[slot].iter().all(|&e| e == 0) {
                let mut kk = k.clone();
                kk.remove(slot);
                out.add_term(kk, c.clone());
            }
        }
        out
    }

    pub fn antipode_slot(&self, slot: usize) -> TSeries {
        let mut out = TSeries::zero(self.arity, self.rank, self.order as usize);
        for (k, c) in &self.terms {
            let deg: u32 = k[slot].iter().sum();
            let s = if deg % 2 == 0 { 1 } else { -1 };
            out.add_term(k.clone(), c.scale(&cq_int(s)));
        }
        out
    }

    /// Multiplies slots `a` and `a+1` together.
    pub fn multiply_slots(&self, a: usize) -> TSeries {
        let mut out = TSeries::zero(self.arity - 1, self.rank, self.order as usize);
        for (k, c) in &self.terms {
            let mut kk = k[..a].to_vec();
            kk.push(k[a].iter().zip(&k[a + 1]).map(|(x, y)| x + y).collect());
            kk.extend(k[a + 2..].iter().cloned());
            out.add_term(kk, c.clone());
        }
        out
    }

    /// Reorders slots: new slot i holds old slot perm[i].
    pub fn permute(&self, perm: &[usize]) -> TSeries {
        let mut out = TSeries::zero(self.arity, self.rank, self.order as usize);
        for (k, c) in &self.terms {
            out.add_term(perm.iter().map(|&i| k[i].clone()).collect(), c.clone());
        }
        out
    }

    /// Places a 2-tensor into slots (i, j) of an `arity`-fold tensor.
    pub fn embed(&self, arity: usize, i: usize, j: usize) -> TSeries {
        let mut out = TSeries::zero(arity, self.rank, self.order as usize);
        for (k, c) in &self.terms {
            let mut kk = vec![vec![0; self.rank]; arity];
            kk[i] = k[0].clone();
            kk[j] = k[1].clone();
            out.add_term(kk, c.clone());
        }
        out
    }

    /// a ⊗ 1 or 1 ⊗ a style padding: inserts an identity slot at `at`.
    pub fn pad(&self, at: usize) -> TSeries {
        let mut out = TSeries::zero(self.arity + 1, self.rank, self.order as usize);
        for (k, c) in &self.terms {
            let mut kk = k.clone();
            kk.insert(at, vec![0; self.rank]);
            out.add_term(kk, c.clone());
        }
        out
    }

    /// Value on exponentials: X_μ in slot s acts as λ_s[μ].
    pub fn eval(&self, lambdas: &[Vec<CQ>]) -> Poly {
        let mut acc = Poly::zero();
        for (k, c) in &self.terms {
            let mut f = cq_int(1);
            for (s, exps) in k.iter().enumerate() {
                for (mu, &e) in exps.iter().enumerate() {
                    for _ in 0..e {
                        f = &f * &lambdas[s][mu];
                    }
                }
            }
            acc = &acc + &c.scale(&f);
        }
        acc.truncate(self.order)
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(k, c)| {
                let slots: Vec<String> = k
                    .iter()
                    .map(|e| {
                        let parts: Vec<String> = e
                            .iter()
                            .enumerate()
                            .filter(|(_, &x)| x > 0)
                            .map(|(i, &x)| if x == 1 { format!("X{i}") } else { format!("X{i}^{x}") })
                            .collect();
                        if parts.is_empty() {
                            "1".into()
                        } else {
                            parts.join("")
                        }
                    })
                    .collect();
                format!("[{}]{}", c.render("κ̄"), slots.join("⊗"))
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Bilinear generator Σ c_{μν} X_μ ⊗ X_ν.
pub fn bilinear(rank: usize, order: usize, coeffs: &[(usize, usize, CQ)]) -> TSeries {
    let mut t = TSeries::zero(2, rank, order);
    for (mu, nu, c) in coeffs {
        let mut a = vec![0; rank];
        let mut b = vec![0; rank];
        a[*mu] += 1;
        b[*nu] += 1;
        t.add_term(vec![a, b], Poly::constant(c.clone()));
    }
    t
}

#[derive(Clone, Debug, PartialEq)]
pub enum TwistSpec {
    /// F = exp(iκ̄ X⊗Y)
    Abelian,
    /// F = exp(iκ̄ Θ^{μν} X_μ⊗X_ν), Θ given by exact entries
    Moyal { theta: Vec<Vec<Q>> },
    Custom(TSeries),
}

impl TwistSpec {
    pub fn moyal_canonical(dim: usize) -> TwistSpec {
        let mut th = vec![vec![Q::zero(); dim]; dim];
        for b in 0..dim / 2 {
            th[2 * b][2 * b + 1] = Q::one();
            th[2 * b + 1][2 * b] = -Q::one();
        }
        TwistSpec::Moyal { theta: th }
    }

    fn generator(&self, order: usize) -> Option<TSeries> {
        match self {
            TwistSpec::Abelian => Some(bilinear(2, order, &[(0, 1, cq_int(1))])),
            TwistSpec::Moyal { theta } => {
                let n = theta.len();
                let mut coeffs = Vec::new();
                for (mu, row) in theta.iter().enumerate() {
                    for (nu, v) in row.iter().enumerate() {
                        if !v.is_zero() {
                            coeffs.push((mu, nu, cq(v.clone(), Q::zero())));
                        }
                    }
                }
                Some(bilinear(n, order, &coeffs))
            }
            TwistSpec::Custom(_) => None,
        }
    }

    pub fn build(&self, order: usize) -> Result<TSeries> {
        if order > MAX_ORDER {
            return Err(Error::DegreeOverflow { degree: order, limit: MAX_ORDER });
        }
        match self {
            TwistSpec::Custom(f) => Ok(f.clone()),
            _ => Ok(TSeries::exp_of(&self.generator(order).unwrap(), cq_i())),
        }
    }

    /// exp(iκ̄(T₁₂ + T₁₃ + T₂₃)), the common value of both cocycle sides.
    pub fn cocycle_closed_form(&self, order: usize) -> Option<TSeries> {
        let t = self.generator(order)?;
        let s = t.embed(3, 0, 1).add(&t.embed(3, 0, 2)).add(&t.embed(3, 1, 2));
        Some(TSeries::exp_of(&s, cq_i()))
    }

    /// exp(iκ̄(T₂₁ − T)), the closed form of F₂₁F⁻¹.
    pub fn r_closed_form(&self, order: usize) -> Option<TSeries> {
        let t = self.generator(order)?;
        Some(TSeries::exp_of(&t.permute(&[1, 0]).sub(&t), cq_i()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwistReport {
    pub order: usize,
    pub cocycle: bool,
    pub cocycle_closed_form: Option<bool>,
    pub normalization: bool,
    pub semiclassical: bool,
    pub residual: String,
}

impl TwistReport {
    pub fn pass(&self) -> bool {
        self.cocycle && self.cocycle_closed_form.unwrap_or(true) && self.normalization && self.semiclassical
    }
}

pub fn twist_check(spec: &TwistSpec, order: usize) -> Result<TwistReport> {
    let f = spec.build(order)?;
    f.inverse()?;
    let lhs = f.pad(2).mul(&f.coproduct_slot(0));
    let rhs = f.pad(0).mul(&f.coproduct_slot(1));
    let diff = lhs.sub(&rhs);
    let closed = spec.cocycle_closed_form(order).map(|c| c == lhs && c == rhs);
    let one1 = TSeries::one(1, f.rank, order);
    let normalization = f.counit_slot(0) == one1 && f.counit_slot(1) == one1;
    let semiclassical = f.order_zero() == TSeries::one(2, f.rank, order);
    Ok(TwistReport {
        order,
        cocycle: diff.is_zero(),
        cocycle_closed_form: closed,
        normalization,
        semiclassical,
        residual: diff.render(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwistedReport {
    pub order: usize,
    pub coproduct_unchanged: bool,
    pub antipode_unchanged: bool,
    pub r_closed_form: Option<bool>,
    pub triangular: bool,
    pub yang_baxter: bool,
    pub braided_commutative: bool,
}

impl TwistedReport {
    pub fn pass(&self) -> bool {
        self.coproduct_unchanged
            && self.antipode_unchanged
            && self.r_closed_form.unwrap_or(true)
            && self.triangular
            && self.yang_baxter
            && self.braided_commutative
    }
}

pub struct TwistedStructures {
    pub f: TSeries,
    pub f_inv: TSeries,
    pub chi: TSeries,
    pub chi_inv: TSeries,
    pub r: TSeries,
}

pub fn twisted_structures(spec: &TwistSpec, order: usize) -> Result<TwistedStructures> {
    let f = spec.build(order)?;
    let f_inv = f.inverse()?;
    let chi = f.antipode_slot(1).multiply_slots(0);
    let chi_inv = chi.inverse()?;
    let r = f.permute(&[1, 0]).mul(&f_inv);
    Ok(TwistedStructures { f, f_inv, chi, chi_inv, r })
}

/// Checks on Δ^F, S^F and R; `samples` are eigenvalue vectors of the
/// exponentials used for braided commutativity.
pub fn twisted_check(spec: &TwistSpec, order: usize, samples: &[Vec<CQ>]) -> Result<TwistedReport> {
    let ts = twisted_structures(spec, order)?;
    let rank = ts.f.rank;
    let mut coproduct_unchanged = true;
    let mut antipode_unchanged = true;
    for mu in 0..rank {
        let mut e = vec![0; rank];
        e[mu] = 1;
        let mut x = TSeries::zero(1, rank, order);
        x.add_term(vec![e], Poly::one());
        let dx = x.coproduct_slot(0);
        let df = ts.f.mul(&dx).mul(&ts.f_inv);
        coproduct_unchanged &= df == dx;
        let sx = x.antipode_slot(0);
        antipode_unchanged &= ts.chi.mul(&sx).mul(&ts.chi_inv) == sx;
    }
    let one2 = TSeries::one(2, rank, order);
    let triangular = ts.r.permute(&[1, 0]).mul(&ts.r) == one2;
    let r12 = ts.r.embed(3, 0, 1);
    let r13 = ts.r.embed(3, 0, 2);
    let r23 = ts.r.embed(3, 1, 2);
    let yang_baxter = r12.mul(&r13).mul(&r23) == r23.mul(&r13).mul(&r12);
    let r_inv = ts.r.inverse()?;
    let mut braided_commutative = true;
    for a in samples {
        for b in samples {
            // e_a ⋆ e_b = F⁻¹(a,b) e_{a+b};  (R̄^α▷e_b)⋆(R̄_α▷e_a) = R⁻¹(b,a)F⁻¹(b,a) e_{a+b}
            let lhs = ts.f_inv.eval(&[a.clone(), b.clone()]);
            let rhs = r_inv
                .eval(&[b.clone(), a.clone()])
                .mul_truncated(&ts.f_inv.eval(&[b.clone(), a.clone()]), Some(order as i32));
            braided_commutative &= lhs == rhs;
        }
    }
    Ok(TwistedReport {
        order,
        coproduct_unchanged,
        antipode_unchanged,
        r_closed_form: spec.r_closed_form(order).map(|c| c == ts.r),
        triangular,
        yang_baxter,
        braided_commutative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn abelian_cocycle_order_three() {
        let r = twist_check(&TwistSpec::Abelian, 3).unwrap();
        assert!(r.pass(), "{r:?}");
        assert_eq!(r.cocycle_closed_form, Some(true));
    }

    #[test]
    fn trivial_twist() {
        let one = TSeries::one(2, 2, 4);
        let ts = twisted_structures(&TwistSpec::Custom(one.clone()), 4).unwrap();
        assert_eq!(ts.r, one);
    }

    #[test]
    fn zero_constant_term_is_rejected() {
        let t = bilinear(2, 4, &[(0, 1, cq_int(1))]);
        assert!(matches!(twist_check(&TwistSpec::Custom(t), 4), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn order_limit() {
        assert!(matches!(twist_check(&TwistSpec::Abelian, 7), Err(Error::DegreeOverflow { .. })));
    }

    #[test]
    fn inverse_round_trip() {
        let f = TwistSpec::Abelian.build(5).unwrap();
        assert_eq!(f.mul(&f.inverse().unwrap()), TSeries::one(2, 2, 5));
    }

    #[test]
    fn abelian_r_matrix_and_braiding() {
        let samples = vec![
            vec![cq(q(1, 2), q(0, 1)), cq(q(0, 1), q(-1, 3))],
            vec![cq(q(2, 1), q(1, 1)), cq(q(-3, 4), q(0, 1))],
        ];
        let r = twisted_check(&TwistSpec::Abelian, 4, &samples).unwrap();
        assert!(r.pass(), "{r:?}");
    }
}
