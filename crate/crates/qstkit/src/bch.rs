//! Truncated Baker–Campbell–Hausdorff series log(e^X e^Y) for an arbitrary
//! finite-dimensional Lie algebra given by a bracket closure.
//!
//! The series is computed once in the free associative algebra on {X, Y}
//! with exact rational coefficients, then converted to nested brackets with
//! the Dynkin–Specht–Wever projection: a homogeneous Lie polynomial of
//! degree n equals (1/n) Σ_w c_w [w₁,[w₂,[…,w_n]]].

use crate::exact::{factorial, Q};
use crate::C64;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

pub const DEFAULT_ORDER: usize = 8;
pub const MAX_ORDER: usize = 12;

type Word = Vec<u8>;
type Series = BTreeMap<Word, Q>;

fn mul(a: &Series, b: &Series, order: usize) -> Series {
    let mut out = Series::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            if wa.len() + wb.len() > order {
                continue;
            }
            let mut w = wa.clone();
            w.extend_from_slice(wb);
            let e = out.entry(w).or_insert_with(Q::zero);
            *e += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn exp_letter(letter: u8, order: usize) -> Series {
    let mut s = Series::new();
    for n in 0..=order {
        let w = vec![letter; n];
        s.insert(w, Q::new(BigInt::from(1), factorial(n as u32)));
    }
    s
}

/// Coefficients (per degree) of the bracket-word expansion of log(e^X e^Y).
fn dsw_table(order: usize) -> Vec<Vec<(Word, f64)>> {
    let ex = exp_letter(0, order);
    let ey = exp_letter(1, order);
    let mut w = mul(&ex, &ey, order);
    w.remove(&Vec::new());
    let mut log = Series::new();
    let mut power = w.clone();
    for k in 1..=order {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        for (word, c) in &power {
            let e = log.entry(word.clone()).or_insert_with(Q::zero);
            *e += c * Q::new(BigInt::from(sign), BigInt::from(k));
        }
        power = mul(&power, &w, order);
    }
    let mut table = vec![Vec::new(); order + 1];
    for (word, c) in log {
        if c.is_zero() {
            continue;
        }
        let n = word.len();
        let coeff = (c / Q::from_integer(BigInt::from(n))).to_f64().unwrap_or(f64::NAN);
        table[n].push((word, coeff));
    }
    table
}

fn table(order: usize) -> &'static Vec<Vec<(Word, f64)>> {
    static CACHE: [OnceLock<Vec<Vec<(Word, f64)>>>; MAX_ORDER + 1] = [const { OnceLock::new() }; MAX_ORDER + 1];
    let order = order.min(MAX_ORDER);
    CACHE[order].get_or_init(|| dsw_table(order))
}

/// Bracket words folded into a suffix DAG: node i is [letter, node child]
/// or a bare letter, and every child precedes its parent.
struct Plan {
    nodes: Vec<(u8, Option<usize>)>,
    terms: Vec<(usize, f64)>,
}

fn intern(word: &[u8], nodes: &mut Vec<(u8, Option<usize>)>, index: &mut HashMap<Word, usize>) -> usize {
    if let Some(&i) = index.get(word) {
        return i;
    }
    let child = (word.len() > 1).then(|| intern(&word[1..], nodes, index));
    nodes.push((word[0], child));
    index.insert(word.to_vec(), nodes.len() - 1);
    nodes.len() - 1
}

fn plan(order: usize) -> &'static Plan {
    static CACHE: [OnceLock<Plan>; MAX_ORDER + 1] = [const { OnceLock::new() }; MAX_ORDER + 1];
    let order = order.min(MAX_ORDER);
    CACHE[order].get_or_init(|| {
        let mut nodes = Vec::new();
        let mut index = HashMap::new();
        let terms = table(order)
            .iter()
            .flatten()
            .map(|(w, c)| (intern(w, &mut nodes, &mut index), *c))
            .collect();
        Plan { nodes, terms }
    })
}

/// log(e^a e^b) truncated at total degree `order`, with `bracket` the Lie
/// bracket of the algebra in which a and b live.
pub fn bch<F>(a: &[C64], b: &[C64], order: usize, bracket: F) -> Vec<C64>
where
    F: Fn(&[C64], &[C64]) -> Vec<C64>,
{
    let n = a.len();
    let p = plan(order);
    let mut values: Vec<Vec<C64>> = Vec::with_capacity(p.nodes.len());
    for &(l, child) in &p.nodes {
        let letter = if l == 0 { a } else { b };
        values.push(match child {
            None => letter.to_vec(),
            Some(c) => bracket(letter, &values[c]),
        });
    }
    let mut out = vec![C64::new(0.0, 0.0); n];
    for &(node, c) in &p.terms {
        for (o, v) in out.iter_mut().zip(&values[node]) {
            *o += v * c;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cross(u: &[C64], v: &[C64]) -> Vec<C64> {
        vec![
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ]
    }

    #[test]
    fn low_order_terms_match_known_expansion() {
        let t = table(4);
        let deg2: BTreeMap<Word, f64> = t[2].iter().cloned().collect();
        assert!((deg2[&vec![0, 1]] - 0.25).abs() < 1e-15);
        assert!((deg2[&vec![1, 0]] + 0.25).abs() < 1e-15);
    }

    #[test]
    fn abelian_bracket_gives_sum() {
        let a = [C64::new(0.3, 0.0), C64::new(-1.0, 0.0), C64::new(2.0, 0.0)];
        let b = [C64::new(1.0, 0.0), C64::new(0.5, 0.0), C64::new(0.0, 0.0)];
        let z = bch(&a, &b, 8, |_, _| vec![C64::new(0.0, 0.0); 3]);
        for i in 0..3 {
            assert!((z[i] - a[i] - b[i]).norm() < 1e-15);
        }
    }

    #[test]
    fn so3_rotations_compose() {
        // rotation vectors about the same axis add
        let a = [C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.2, 0.0)];
        let b = [C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.3, 0.0)];
        let z = bch(&a, &b, 8, cross);
        assert!((z[2].re - 0.5).abs() < 1e-15);
        // second-order term is ½ a×b
        let a = [C64::new(1e-3, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        let b = [C64::new(0.0, 0.0), C64::new(1e-3, 0.0), C64::new(0.0, 0.0)];
        let z = bch(&a, &b, 8, cross);
        assert!((z[2].re - 0.5e-6).abs() < 1e-15);
    }
}
