//! Finite field arithmetic for GF(p^e).
//!
//! An element is stored as its coefficient vector over GF(p), packed into a
//! single integer in base `p` with the constant term as the least significant
//! digit. That integer is the element's canonical index, so enumerating
//! `0..q` gives the fixed element order used to number points.

use crate::error::{Error, Result};

/// Conway polynomials, monic, low-order coefficients first, leading 1 omitted.
const CONWAY: &[(u64, u32, &[u64])] = &[
    (2, 2, &[1, 1]),
    (2, 3, &[1, 1, 0]),
    (2, 4, &[1, 1, 0, 0]),
    (2, 5, &[1, 0, 1, 0, 0]),
    (2, 6, &[1, 1, 0, 1, 1, 0]),
    (2, 7, &[1, 1, 0, 0, 0, 0, 0]),
    (2, 8, &[1, 0, 1, 1, 1, 0, 0, 0]),
    (2, 9, &[1, 0, 0, 0, 1, 0, 0, 0, 0]),
    (2, 10, &[1, 1, 1, 1, 0, 1, 1, 0, 0, 0]),
    (2, 11, &[1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0]),
    (2, 12, &[1, 1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 0]),
    (3, 2, &[2, 2]),
    (3, 3, &[1, 2, 0]),
    (3, 4, &[2, 0, 0, 2]),
    (3, 5, &[1, 2, 0, 0, 0]),
    (3, 6, &[2, 2, 1, 0, 2, 0]),
    (3, 7, &[1, 0, 2, 0, 0, 0, 0]),
    (5, 2, &[2, 4]),
    (5, 3, &[3, 3, 0]),
    (5, 4, &[2, 4, 4, 0]),
    (5, 5, &[3, 4, 0, 0, 0]),
    (7, 2, &[3, 6]),
    (7, 3, &[4, 0, 6]),
    (7, 4, &[3, 4, 5, 0]),
    (11, 2, &[2, 7]),
    (11, 3, &[9, 2, 0]),
    (13, 2, &[2, 12]),
    (13, 3, &[11, 2, 0]),
    (17, 2, &[3, 16]),
    (19, 2, &[2, 18]),
    (23, 2, &[5, 21]),
    (29, 2, &[2, 24]),
    (31, 2, &[3, 29]),
    (37, 2, &[2, 33]),
    (41, 2, &[6, 38]),
    (43, 2, &[3, 42]),
    (47, 2, &[5, 45]),
    (53, 2, &[2, 49]),
    (59, 2, &[2, 58]),
    (61, 2, &[2, 60]),
];

/// Writes `q = p^e` with `p` prime, if possible.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            break;
        }
        p += 1;
    }
    if !q.is_multiple_of(p) {
        // q itself is prime
        return Some((q, 1));
    }
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

/// Element of a [`GaloisField`], identified by its canonical index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(pub u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisField {
    p: u64,
    e: u32,
    q: u64,
    /// Low-order coefficients of the monic modulus (degree `e`).
    modulus: Vec<u64>,
}

impl GaloisField {
    pub fn new(q: u64) -> Result<Self> {
        let (p, e) = prime_power(q).ok_or(Error::NotAPrimePower(q))?;
        let modulus = if e == 1 {
            vec![0]
        } else {
            CONWAY
                .iter()
                .find(|(tp, te, _)| *tp == p && *te == e)
                .map(|(_, _, coeffs)| coeffs.to_vec())
                .ok_or(Error::UnsupportedDegree { p, e })?
        };
        Ok(GaloisField { p, e, q, modulus })
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    /// Modulus coefficients, constant term first, including the leading 1.
    pub fn modulus(&self) -> Vec<u64> {
        let mut m = self.modulus.clone();
        m.push(1);
        m
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    pub fn element(&self, index: u64) -> FieldElement {
        assert!(
            index < self.q,
            "element index {index} outside GF({})",
            self.q
        );
        FieldElement(index)
    }

    fn digits(&self, a: FieldElement) -> Vec<u64> {
        let mut x = a.0;
        (0..self.e)
            .map(|_| {
                let d = x % self.p;
                x /= self.p;
                d
            })
            .collect()
    }

    fn pack(&self, digits: &[u64]) -> FieldElement {
        FieldElement(digits.iter().rev().fold(0, |acc, &d| acc * self.p + d))
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.e == 1 {
            return FieldElement((a.0 + b.0) % self.p);
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let sum: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.pack(&sum)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.e == 1 {
            return FieldElement((self.p - a.0) % self.p);
        }
        let d: Vec<u64> = self
            .digits(a)
            .iter()
            .map(|x| (self.p - x) % self.p)
            .collect();
        self.pack(&d)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.p;
        if self.e == 1 {
            return FieldElement(a.0 * b.0 % p);
        }
        let e = self.e as usize;
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; 2 * e - 1];
        for (i, x) in da.iter().enumerate() {
            for (j, y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        // x^e = -(m_0 + m_1 x + ... + m_{e-1} x^{e-1})
        for deg in (e..prod.len()).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for (t, m) in self.modulus.iter().enumerate() {
                let slot = deg - e + t;
                prod[slot] = (prod[slot] + (p - c) * m) % p;
            }
        }
        self.pack(&prod[..e])
    }

    pub fn pow(&self, a: FieldElement, mut exp: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        (a != FieldElement::ZERO).then(|| self.pow(a, self.q - 2))
    }

    /// Quadratic character: 0 for zero, 1 for nonzero squares, -1 otherwise.
    pub fn quadratic_character(&self, a: FieldElement) -> i8 {
        if a == FieldElement::ZERO {
            return 0;
        }
        if self.p == 2 {
            return 1;
        }
        if self.pow(a, (self.q - 1) / 2) == FieldElement::ONE {
            1
        } else {
            -1
        }
    }
}

/// Every built-in `(p, e)` with `e >= 2`.
pub fn builtin_extension_degrees() -> impl Iterator<Item = (u64, u32)> {
    CONWAY.iter().map(|(p, e, _)| (*p, *e))
}
