//! Sylvester and Paley (type I) Hadamard matrices.

use crate::error::{Error, Result};
use crate::field::{prime_power, GaloisField};

/// A square ±1 matrix with `H Hᵀ = nI`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HadamardMatrix {
    rows: Vec<Vec<i8>>,
}

impl HadamardMatrix {
    /// Order `2^t` by repeated doubling `[[H, H], [H, -H]]`.
    pub fn sylvester(order: usize) -> Option<Self> {
        if !order.is_power_of_two() {
            return None;
        }
        let mut rows = vec![vec![1i8]];
        while rows.len() < order {
            let n = rows.len();
            let mut next = vec![vec![0i8; 2 * n]; 2 * n];
            for i in 0..n {
                for j in 0..n {
                    let h = rows[i][j];
                    next[i][j] = h;
                    next[i][j + n] = h;
                    next[i + n][j] = h;
                    next[i + n][j + n] = -h;
                }
            }
            rows = next;
        }
        Some(HadamardMatrix { rows })
    }

    /// Order `q + 1` from the quadratic character of GF(q), `q ≡ 3 (mod 4)`.
    pub fn paley(q: u64) -> Result<Option<Self>> {
        if q % 4 != 3 || prime_power(q).is_none() {
            return Ok(None);
        }
        let field = GaloisField::new(q)?;
        let n = q as usize + 1;
        let mut rows = vec![vec![0i8; n]; n];
        // H = I + S with S = [[0, 1ᵀ], [-1, Q]], Q the Jacobsthal matrix.
        rows[0][1..].fill(1);
        rows[1..].iter_mut().for_each(|row| row[0] = -1);
        for a in field.elements() {
            for b in field.elements() {
                rows[a.index() + 1][b.index() + 1] = field.quadratic_character(field.sub(a, b));
            }
        }
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] += 1;
        }
        Ok(Some(HadamardMatrix { rows }))
    }

    /// Sylvester when the order is a power of two, otherwise Paley type I.
    pub fn of_order(order: usize) -> Result<Option<Self>> {
        if let Some(h) = Self::sylvester(order) {
            return Ok(Some(h));
        }
        if order < 4 {
            return Ok(None);
        }
        Self::paley(order as u64 - 1)
    }

    pub fn order(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<i8>] {
        &self.rows
    }

    pub fn is_hadamard(&self) -> bool {
        let n = self.rows.len();
        self.rows
            .iter()
            .all(|row| row.len() == n && row.iter().all(|&x| x == 1 || x == -1))
            && (0..n).all(|i| {
                (0..n).all(|j| {
                    let dot: i64 = self.rows[i]
                        .iter()
                        .zip(&self.rows[j])
                        .map(|(&a, &b)| (a * b) as i64)
                        .sum();
                    dot == if i == j { n as i64 } else { 0 }
                })
            })
    }

    /// Negates columns, then rows, so the first row and column are all +1.
    pub fn normalized(mut self) -> Self {
        let n = self.rows.len();
        for j in 0..n {
            if self.rows[0][j] < 0 {
                for row in self.rows.iter_mut() {
                    row[j] = -row[j];
                }
            }
        }
        for row in self.rows.iter_mut() {
            if row[0] < 0 {
                row.iter_mut().for_each(|x| *x = -*x);
            }
        }
        self
    }
}

pub(crate) fn hadamard_for(m: usize) -> Result<HadamardMatrix> {
    let order = 4 * m;
    let h = if m == 0 {
        None
    } else {
        HadamardMatrix::of_order(order)?
    };
    h.filter(HadamardMatrix::is_hadamard)
        .map(HadamardMatrix::normalized)
        .ok_or(Error::NoConstructionAvailable { m, order })
}
