use super::{Field, FieldElem};

/// Polynomial over a finite field, coefficients low to high, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(Vec<FieldElem>);

impl Poly {
    pub fn new(mut coeffs: Vec<FieldElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.0
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    /// Monic polynomial of degree `deg` whose lower coefficients are the
    /// base-q digits of `index`, least significant first.
    pub fn monic_from_index(field: &Field, deg: usize, mut index: u64) -> Self {
        let q = field.order() as u64;
        let mut coeffs: Vec<FieldElem> = (0..deg)
            .map(|_| {
                let c = field.elem((index % q) as u32).unwrap();
                index /= q;
                c
            })
            .collect();
        coeffs.push(FieldElem::ONE);
        Poly(coeffs)
    }

    pub fn rem(&self, field: &Field, divisor: &Poly) -> Poly {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = field.inv(divisor.0[dd]).unwrap();
        let mut r = self.0.clone();
        while r.len() > dd {
            let top = r.len() - 1;
            let factor = field.mul(r[top], lead_inv);
            if !factor.is_zero() {
                for (k, &d) in divisor.0.iter().enumerate() {
                    let slot = top - dd + k;
                    r[slot] = field.sub(r[slot], field.mul(factor, d));
                }
            }
            r.pop();
        }
        Poly::new(r)
    }

    pub fn eval(&self, field: &Field, x: FieldElem) -> FieldElem {
        self.0
            .iter()
            .rev()
            .fold(FieldElem::ZERO, |acc, &c| field.add(field.mul(acc, x), c))
    }
}

/// Irreducibility by trial division with every monic polynomial of degree
/// at most half the degree.
pub fn is_irreducible(field: &Field, poly: &Poly) -> bool {
    let Some(deg) = poly.degree() else {
        return false;
    };
    if deg == 0 {
        return false;
    }
    let q = field.order() as u64;
    for d in 1..=deg / 2 {
        for idx in 0..q.pow(d as u32) {
            let divisor = Poly::monic_from_index(field, d, idx);
            if poly.rem(field, &divisor).degree().is_none() {
                return false;
            }
        }
    }
    true
}

/// Smallest monic irreducible polynomial of degree `deg` over `field`.
pub fn find_irreducible(field: &Field, deg: usize) -> Option<Poly> {
    let q = field.order() as u64;
    (0..q.pow(deg as u32))
        .map(|idx| Poly::monic_from_index(field, deg, idx))
        .find(|p| is_irreducible(field, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trial_division() {
        let f2 = Field::new(2).unwrap();
        let e = |v: &[u32]| Poly::new(v.iter().map(|&x| f2.elem(x).unwrap()).collect());
        assert!(is_irreducible(&f2, &e(&[1, 1, 1])));
        assert!(!is_irreducible(&f2, &e(&[1, 0, 1])));
        assert!(is_irreducible(&f2, &e(&[1, 1, 0, 1])));
        assert!(!is_irreducible(&f2, &e(&[1, 0, 0, 0, 1])));
    }

    #[test]
    fn irreducible_over_extension() {
        // degree-2 irreducibles over GF(4) have no root in GF(4)
        let f4 = Field::new(4).unwrap();
        let p = find_irreducible(&f4, 2).unwrap();
        assert!(f4.elements().all(|x| !p.eval(&f4, x).is_zero()));
    }
}
