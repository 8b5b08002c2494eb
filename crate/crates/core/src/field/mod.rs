//! Exact arithmetic in GF(q) for prime powers q ≤ 64.
//!
//! Elements are stored by their integer label: the base-p encoding of the
//! coefficient vector of the polynomial residue, lowest coefficient first.
//! For a prime field the label is the residue itself. Addition and
//! multiplication are table-driven; the tables are built once per field.

mod linalg;
mod poly;

pub use linalg::FqMatrix;
pub use poly::{find_irreducible, is_irreducible, Poly};

use crate::combin::prime_power;
use crate::error::{Error, Result};
use std::fmt;

pub const MAX_ORDER: u32 = 64;

/// An element of GF(q), identified by its label in `0..q`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElem(u8);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn label(self) -> u32 {
        self.0 as u32
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Coefficients of the polynomial residue over GF(p), low to high.
    pub fn coeffs(self, spec: &FieldSpec) -> Vec<u32> {
        let mut rest = self.0 as u32;
        (0..spec.e)
            .map(|_| {
                let c = rest % spec.p;
                rest /= spec.p;
                c
            })
            .collect()
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Characteristic, degree and defining polynomial of a finite field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u32,
    pub e: u32,
    pub q: u32,
    /// Monic irreducible polynomial over GF(p), low to high, degree `e`.
    pub modulus: Vec<u32>,
}

/// A finite field with precomputed operation tables.
#[derive(Clone, Debug)]
pub struct Field {
    spec: FieldSpec,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Field {}

/// Builds GF(q). See [`Field::new`].
pub fn make_field(q: u32) -> Result<Field> {
    Field::new(q)
}

impl Field {
    /// Builds GF(q). For `q = p^e` with `e > 1` the modulus is the smallest
    /// monic irreducible polynomial of degree `e`, ordering candidates by the
    /// base-p label of their lower coefficients.
    pub fn new(q: u32) -> Result<Self> {
        let (p, e) = prime_power(q as u64).ok_or(Error::NotPrimePower(q as u64))?;
        if q > MAX_ORDER {
            return Err(Error::UnsupportedOrder(q as u64));
        }
        let p = p as u32;
        let prime = Self::prime(p);
        if e == 1 {
            return Ok(prime);
        }
        let modulus = find_irreducible(&prime, e as usize)
            .expect("an irreducible polynomial exists for every degree");
        debug_assert!(is_irreducible(&prime, &modulus));
        let modulus = modulus.coeffs().iter().map(|c| c.label()).collect();
        Ok(Self::extension(p, e, modulus))
    }

    fn prime(p: u32) -> Self {
        let spec = FieldSpec {
            p,
            e: 1,
            q: p,
            modulus: vec![0, 1],
        };
        let n = p as usize;
        let mut add = vec![0u8; n * n];
        let mut mul = vec![0u8; n * n];
        for a in 0..n {
            for b in 0..n {
                add[a * n + b] = ((a + b) % n) as u8;
                mul[a * n + b] = ((a * b) % n) as u8;
            }
        }
        Self::finish(spec, add, mul)
    }

    fn extension(p: u32, e: u32, modulus: Vec<u32>) -> Self {
        let q = p.pow(e);
        let spec = FieldSpec { p, e, q, modulus };
        let n = q as usize;
        let to_coeffs = |x: usize| FieldElem(x as u8).coeffs(&spec);
        let from_coeffs = |c: &[u32]| c.iter().rev().fold(0u32, |acc, &d| acc * p + d) as u8;
        let mut add = vec![0u8; n * n];
        let mut mul = vec![0u8; n * n];
        for a in 0..n {
            let ca = to_coeffs(a);
            for b in 0..n {
                let cb = to_coeffs(b);
                let sum: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % p).collect();
                add[a * n + b] = from_coeffs(&sum);
                mul[a * n + b] = from_coeffs(&mul_mod(&ca, &cb, &spec.modulus, p));
            }
        }
        Self::finish(spec, add, mul)
    }

    fn finish(spec: FieldSpec, add: Vec<u8>, mul: Vec<u8>) -> Self {
        let n = spec.q as usize;
        let neg = (0..n)
            .map(|a| (0..n).find(|&b| add[a * n + b] == 0).unwrap() as u8)
            .collect();
        let inv = (0..n)
            .map(|a| {
                if a == 0 {
                    0
                } else {
                    (1..n).find(|&b| mul[a * n + b] == 1).unwrap() as u8
                }
            })
            .collect();
        Field {
            spec,
            add,
            mul,
            neg,
            inv,
        }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn order(&self) -> u32 {
        self.spec.q
    }

    pub fn characteristic(&self) -> u32 {
        self.spec.p
    }

    /// Element with the given label; `None` if `label >= q`.
    pub fn elem(&self, label: u32) -> Option<FieldElem> {
        (label < self.spec.q).then_some(FieldElem(label as u8))
    }

    /// All elements in label order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.spec.q).map(|x| FieldElem(x as u8))
    }

    /// Element whose coefficient vector over GF(p) is `coeffs` (low to high).
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Option<FieldElem> {
        if coeffs.len() > self.spec.e as usize || coeffs.iter().any(|&c| c >= self.spec.p) {
            return None;
        }
        let label = coeffs.iter().rev().fold(0u32, |acc, &d| acc * self.spec.p + d);
        self.elem(label)
    }

    #[inline]
    fn idx(&self, a: FieldElem, b: FieldElem) -> usize {
        a.0 as usize * self.spec.q as usize + b.0 as usize
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.add[self.idx(a, b)])
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.mul[self.idx(a, b)])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero { q: self.spec.q });
        }
        Ok(FieldElem(self.inv[a.0 as usize]))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElem, mut exp: u64) -> FieldElem {
        let mut base = a;
        let mut acc = FieldElem::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

/// Polynomial product over GF(p) reduced by a monic modulus.
fn mul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let e = modulus.len() - 1;
    let mut prod = vec![0u32; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for deg in (e..prod.len()).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        // subtract c * x^(deg-e) * modulus
        for (k, &m) in modulus.iter().enumerate() {
            let slot = deg - e + k;
            prod[slot] = (prod[slot] + p * p - (c * m) % p) % p;
        }
    }
    prod.truncate(e);
    prod.resize(e, 0);
    prod
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field() {
        let f = Field::new(3).unwrap();
        assert_eq!((f.spec().p, f.spec().e), (3, 1));
        assert_eq!(f.spec().modulus, vec![0, 1]);
        let two = f.elem(2).unwrap();
        assert_eq!(f.mul(two, two), FieldElem::ONE);
        let f5 = Field::new(5).unwrap();
        assert_eq!(f5.inv(f5.elem(3).unwrap()).unwrap().label(), 2);
    }

    #[test]
    fn gf4_reduction() {
        let f = Field::new(4).unwrap();
        assert_eq!(f.spec().modulus, vec![1, 1, 1]);
        let x = f.from_coeffs(&[0, 1]).unwrap();
        let x_plus_1 = f.from_coeffs(&[1, 1]).unwrap();
        assert_eq!(f.mul(x, x), x_plus_1);
        assert_eq!(x_plus_1.coeffs(f.spec()), vec![1, 1]);
    }

    #[test]
    fn order_errors() {
        assert_eq!(Field::new(6).unwrap_err(), Error::NotPrimePower(6));
        assert_eq!(Field::new(1).unwrap_err(), Error::NotPrimePower(1));
        assert_eq!(Field::new(128).unwrap_err(), Error::UnsupportedOrder(128));
        assert_eq!(Field::new(67).unwrap_err(), Error::UnsupportedOrder(67));
    }

    #[test]
    fn division_by_zero() {
        let f = Field::new(8).unwrap();
        assert_eq!(
            f.inv(FieldElem::ZERO).unwrap_err(),
            Error::DivisionByZero { q: 8 }
        );
    }

    #[test]
    fn smallest_moduli() {
        assert_eq!(Field::new(8).unwrap().spec().modulus, vec![1, 1, 0, 1]);
        assert_eq!(Field::new(9).unwrap().spec().modulus, vec![1, 0, 1]);
        assert_eq!(Field::new(16).unwrap().spec().modulus, vec![1, 1, 0, 0, 1]);
    }

    #[test]
    fn label_bijection() {
        for q in [4u32, 8, 9, 25, 27, 32, 64] {
            let f = Field::new(q).unwrap();
            for a in f.elements() {
                let c = a.coeffs(f.spec());
                assert!(c.iter().all(|&x| x < f.spec().p));
                assert_eq!(f.from_coeffs(&c), Some(a));
            }
        }
    }

    #[test]
    fn axioms_exhaustive() {
        for q in [2u32, 3, 4, 5, 7, 8, 9] {
            let f = Field::new(q).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.add(f.sub(a, b), b), a);
                    for c in f.elements() {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn fermat_little_theorem() {
        for q in [2u32, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let f = Field::new(q).unwrap();
            for a in f.elements().skip(1) {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElem::ONE);
                assert_eq!(f.pow(a, (q - 1) as u64), FieldElem::ONE);
            }
        }
    }
}
