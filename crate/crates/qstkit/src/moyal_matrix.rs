//! Matrix basis f_{mn} of the Moyal plane at finite truncation N.

use crate::{Error, Result, C64};
use serde::Serialize;
use std::f64::consts::PI;

pub const TOL: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedElement {
    pub n: usize,
    pub theta: f64,
    /// Row-major coefficients g_{mn}.
    pub coeffs: Vec<C64>,
}

impl TruncatedElement {
    pub fn zero(n: usize, theta: f64) -> Self {
        TruncatedElement {
            n,
            theta,
            coeffs: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    /// Σ_m f_{mm}
    pub fn unit(n: usize, theta: f64) -> Self {
        let mut e = Self::zero(n, theta);
        for m in 0..n {
            e.coeffs[m * n + m] = C64::new(1.0, 0.0);
        }
        e
    }

    pub fn basis(n: usize, theta: f64, m: usize, k: usize) -> Result<Self> {
        check_index(m, n)?;
        check_index(k, n)?;
        let mut e = Self::zero(n, theta);
        e.coeffs[m * n + k] = C64::new(1.0, 0.0);
        Ok(e)
    }

    pub fn from_matrix(n: usize, theta: f64, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != n * n {
            return Err(Error::DimMismatch { expected: n * n, got: coeffs.len() });
        }
        if coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::BadParameter("non-finite matrix entry".into()));
        }
        Ok(TruncatedElement { n, theta, coeffs })
    }

    pub fn get(&self, m: usize, k: usize) -> C64 {
        self.coeffs[m * self.n + k]
    }

    fn same_space(&self, o: &Self) -> Result<()> {
        if self.n != o.n {
            return Err(Error::DimMismatch { expected: self.n, got: o.n });
        }
        Ok(())
    }

    pub fn star(&self, o: &Self) -> Result<Self> {
        self.same_space(o)?;
        let n = self.n;
        let mut out = Self::zero(n, self.theta);
        for i in 0..n {
            for k in 0..n {
                let a = self.coeffs[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.coeffs[i * n + j] += a * o.coeffs[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn dagger(&self) -> Self {
        let n = self.n;
        let mut out = Self::zero(n, self.theta);
        for i in 0..n {
            for j in 0..n {
                out.coeffs[j * n + i] = self.coeffs[i * n + j].conj();
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_space(o)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&o.coeffs) {
            *a += b;
        }
        Ok(out)
    }

    pub fn max_diff(&self, o: &Self) -> f64 {
        self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

fn check_index(i: usize, n: usize) -> Result<()> {
    if i >= n {
        return Err(Error::OutsideTruncation { index: i, n });
    }
    Ok(())
}

/// f_{mn} ⋆ f_{kl} = δ_{nk} f_{ml}; `None` stands for zero.
pub fn basis_product(n_trunc: usize, m: usize, n: usize, k: usize, l: usize) -> Result<Option<(usize, usize)>> {
    for i in [m, n, k, l] {
        check_index(i, n_trunc)?;
    }
    Ok((n == k).then_some((m, l)))
}

/// ∫a†⋆b = 2πθ Σ conj(a_{mn}) b_{mn}
pub fn trace_pairing(a: &TruncatedElement, b: &TruncatedElement) -> Result<C64> {
    a.same_space(b)?;
    let s: C64 = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x.conj() * y).sum();
    Ok(s * (2.0 * PI * a.theta))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionReport {
    pub n: usize,
    pub self_adjoint: f64,
    pub positivity: f64,
    pub unity: f64,
    pub commutation: f64,
    pub orthogonality: f64,
    pub pass: bool,
}

/// Partition-of-unity axioms for {f_{mm}} within the truncation. `probes`
/// are the g used for Σ f_{mm}⋆g = g; local finiteness holds trivially.
pub fn partition_check(n: usize, theta: f64, probes: &[TruncatedElement]) -> Result<PartitionReport> {
    let f = |m: usize, k: usize| TruncatedElement::basis(n, theta, m, k);
    let mut self_adjoint: f64 = 0.0;
    let mut positivity: f64 = 0.0;
    for m in 0..n {
        let fmm = f(m, m)?;
        self_adjoint = self_adjoint.max(fmm.dagger().max_diff(&fmm));
        let fm0 = f(m, 0)?;
        positivity = positivity.max(fm0.star(&fm0.dagger())?.max_diff(&fmm));
        positivity = positivity.max(fm0.star(&f(0, m)?)?.max_diff(&fmm));
    }
    let mut sum = TruncatedElement::zero(n, theta);
    for m in 0..n {
        sum = sum.add(&f(m, m)?)?;
    }
    let mut unity: f64 = sum.max_diff(&TruncatedElement::unit(n, theta));
    for g in probes {
        unity = unity.max(sum.star(g)?.max_diff(g));
    }
    let mut commutation: f64 = 0.0;
    let mut orthogonality: f64 = 0.0;
    for a in 0..n {
        let fa = f(a, a)?;
        for b in 0..n {
            let fb = f(b, b)?;
            let ab = fa.star(&fb)?;
            commutation = commutation.max(ab.max_diff(&fb.star(&fa)?));
            if a != b {
                orthogonality = orthogonality.max(ab.max_diff(&TruncatedElement::zero(n, theta)));
            }
        }
    }
    let pass = [self_adjoint, positivity, unity, commutation, orthogonality].iter().all(|&r| r < TOL);
    Ok(PartitionReport {
        n,
        self_adjoint,
        positivity,
        unity,
        commutation,
        orthogonality,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_rules() {
        assert_eq!(basis_product(3, 0, 1, 1, 2).unwrap(), Some((0, 2)));
        assert_eq!(basis_product(3, 0, 1, 0, 2).unwrap(), None);
        assert!(matches!(basis_product(3, 0, 3, 3, 1), Err(Error::OutsideTruncation { .. })));
        let f01 = TruncatedElement::basis(3, 1.0, 0, 1).unwrap();
        assert_eq!(f01.dagger(), TruncatedElement::basis(3, 1.0, 1, 0).unwrap());
    }

    #[test]
    fn pairing_examples() {
        let th = 0.7;
        let f01 = TruncatedElement::basis(4, th, 0, 1).unwrap();
        let f10 = TruncatedElement::basis(4, th, 1, 0).unwrap();
        assert!((trace_pairing(&f01, &f01).unwrap() - C64::new(2.0 * PI * th, 0.0)).norm() < 1e-15);
        assert_eq!(trace_pairing(&f01, &f10).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn star_rejects_mismatch() {
        let a = TruncatedElement::unit(3, 1.0);
        let b = TruncatedElement::unit(4, 1.0);
        assert!(matches!(a.star(&b), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn diagonal_family() {
        let f11 = TruncatedElement::basis(4, 1.0, 1, 1).unwrap();
        let f22 = TruncatedElement::basis(4, 1.0, 2, 2).unwrap();
        let z = TruncatedElement::zero(4, 1.0);
        assert_eq!(f11.star(&f22).unwrap(), z);
        assert_eq!(f22.star(&f11).unwrap(), z);
        let r = partition_check(8, 1.0, &[TruncatedElement::basis(8, 1.0, 3, 5).unwrap()]).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
