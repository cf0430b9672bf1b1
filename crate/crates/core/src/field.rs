//! Prime field arithmetic and small dense linear algebra over GF(q).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest vector length handled (the parabolic quadric lives in a 7-space).
pub const MAX_DIM: usize = 7;

/// Field orders supported by the engine.
pub const SUPPORTED_Q: [u8; 3] = [2, 3, 5];

/// A prime field GF(q) with precomputed operation tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeField {
    q: u8,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl PrimeField {
    pub fn new(q: u8) -> Result<Self> {
        if !SUPPORTED_Q.contains(&q) {
            return Err(Error::UnsupportedField(q));
        }
        let n = q as usize;
        let mut add = vec![0u8; n * n];
        let mut mul = vec![0u8; n * n];
        for a in 0..n {
            for b in 0..n {
                add[a * n + b] = ((a + b) % n) as u8;
                mul[a * n + b] = ((a * b) % n) as u8;
            }
        }
        let neg = (0..n).map(|a| ((n - a) % n) as u8).collect();
        let mut inv = vec![0u8; n];
        for a in 1..n {
            inv[a] = (1..n).find(|&b| (a * b) % n == 1).unwrap() as u8;
        }
        let field = Self { q, add, mul, neg, inv };
        field.check_axioms()?;
        Ok(field)
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    /// Multiplicative inverse; `a` must be nonzero.
    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        debug_assert!(a != 0);
        self.inv[a as usize]
    }

    /// Reduce an arbitrary integer into the field.
    pub fn from_i64(&self, v: i64) -> u8 {
        v.rem_euclid(self.q as i64) as u8
    }

    pub fn elements(&self) -> impl Iterator<Item = u8> {
        0..self.q
    }

    /// Exhaustive check of the field axioms on the tables.
    pub fn check_axioms(&self) -> Result<()> {
        let els: Vec<u8> = self.elements().collect();
        let fail = |what: &str| Err(Error::FieldAxiom(format!("GF({}): {what}", self.q)));
        for &a in &els {
            if self.add(a, 0) != a || self.mul(a, 1) != a {
                return fail("identity");
            }
            if self.add(a, self.neg(a)) != 0 {
                return fail("additive inverse");
            }
            if a != 0 && self.mul(a, self.inv(a)) != 1 {
                return fail("multiplicative inverse");
            }
            for &b in &els {
                if self.add(a, b) != self.add(b, a) || self.mul(a, b) != self.mul(b, a) {
                    return fail("commutativity");
                }
                for &c in &els {
                    if self.add(self.add(a, b), c) != self.add(a, self.add(b, c)) {
                        return fail("additive associativity");
                    }
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return fail("multiplicative associativity");
                    }
                    if self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c)) {
                        return fail("distributivity");
                    }
                }
            }
        }
        Ok(())
    }
}

/// A coordinate vector of length at most [`MAX_DIM`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vector {
    len: u8,
    c: [u8; MAX_DIM],
}

impl Vector {
    pub fn zero(len: usize) -> Self {
        assert!(len <= MAX_DIM);
        Self {
            len: len as u8,
            c: [0; MAX_DIM],
        }
    }

    pub fn from_slice(s: &[u8]) -> Self {
        let mut v = Self::zero(s.len());
        v.c[..s.len()].copy_from_slice(s);
        v
    }

    /// Unit vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zero(len);
        v.c[i] = 1;
        v
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.c[..self.len as usize]
    }

    pub fn get(&self, i: usize) -> u8 {
        self.c[i]
    }

    pub fn set(&mut self, i: usize, v: u8) {
        self.c[i] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.as_slice().iter().all(|&x| x == 0)
    }

    pub fn add(&self, f: &PrimeField, o: &Vector) -> Vector {
        let mut r = *self;
        for i in 0..self.len() {
            r.c[i] = f.add(self.c[i], o.c[i]);
        }
        r
    }

    pub fn scale(&self, f: &PrimeField, s: u8) -> Vector {
        let mut r = *self;
        for i in 0..self.len() {
            r.c[i] = f.mul(self.c[i], s);
        }
        r
    }

    /// `self + s * o`.
    pub fn axpy(&self, f: &PrimeField, s: u8, o: &Vector) -> Vector {
        let mut r = *self;
        for i in 0..self.len() {
            r.c[i] = f.add(self.c[i], f.mul(s, o.c[i]));
        }
        r
    }

    /// Scale so the first nonzero coordinate is 1. Zero stays zero.
    pub fn normalized(&self, f: &PrimeField) -> Vector {
        match self.as_slice().iter().find(|&&x| x != 0) {
            Some(&lead) => self.scale(f, f.inv(lead)),
            None => *self,
        }
    }

    pub fn is_normalized(&self) -> bool {
        matches!(self.as_slice().iter().find(|&&x| x != 0), Some(1))
    }

    /// Base-q integer code with the first coordinate most significant.
    pub fn code(&self, q: u8) -> usize {
        self.as_slice().iter().fold(0usize, |acc, &x| acc * q as usize + x as usize)
    }

    pub fn from_code(mut code: usize, q: u8, len: usize) -> Vector {
        let mut v = Vector::zero(len);
        for i in (0..len).rev() {
            v.c[i] = (code % q as usize) as u8;
            code /= q as usize;
        }
        v
    }
}

/// Iterate over all vectors of length `len` in lexicographic order.
pub fn all_vectors(q: u8, len: usize) -> impl Iterator<Item = Vector> {
    let total = (q as usize).pow(len as u32);
    (0..total).map(move |c| Vector::from_code(c, q, len))
}

/// Rank of a list of vectors.
pub fn rank(f: &PrimeField, vs: &[Vector]) -> usize {
    echelon(f, vs).len()
}

/// Reduced row echelon basis of the span of `vs` (nonzero rows only).
pub fn echelon(f: &PrimeField, vs: &[Vector]) -> Vec<Vector> {
    let mut rows: Vec<Vector> = vs.to_vec();
    let Some(len) = rows.first().map(|v| v.len()) else {
        return rows;
    };
    let mut r = 0;
    for col in 0..len {
        let Some(piv) = (r..rows.len()).find(|&i| rows[i].get(col) != 0) else {
            continue;
        };
        rows.swap(r, piv);
        let lead = rows[r].get(col);
        rows[r] = rows[r].scale(f, f.inv(lead));
        for i in 0..rows.len() {
            if i != r && rows[i].get(col) != 0 {
                let s = f.neg(rows[i].get(col));
                rows[i] = rows[i].axpy(f, s, &rows[r]);
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    rows
}

/// All nonzero vectors of the span of `basis`, normalized and deduplicated.
pub fn projective_span(f: &PrimeField, basis: &[Vector]) -> Vec<Vector> {
    let basis = echelon(f, basis);
    let k = basis.len();
    if k == 0 {
        return Vec::new();
    }
    let len = basis[0].len();
    let mut out = Vec::new();
    for coeffs in all_vectors(f.q(), k) {
        if !coeffs.is_normalized() {
            continue;
        }
        let mut v = Vector::zero(len);
        for (i, b) in basis.iter().enumerate() {
            v = v.axpy(f, coeffs.get(i), b);
        }
        out.push(v.normalized(f));
    }
    out.sort();
    out.dedup();
    out
}

/// Coordinates of `v` with respect to an independent list `basis`, if `v` lies in its span.
pub fn coordinates(f: &PrimeField, basis: &[Vector], v: &Vector) -> Option<Vec<u8>> {
    let k = basis.len();
    let len = v.len();
    // Augmented system: columns are basis vectors, right-hand side v.
    let mut m: Vec<Vec<u8>> = (0..len)
        .map(|r| {
            let mut row: Vec<u8> = basis.iter().map(|b| b.get(r)).collect();
            row.push(v.get(r));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..k {
        let Some(piv) = (r..len).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(r, piv);
        let inv = f.inv(m[r][col]);
        for x in m[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for i in 0..len {
            if i != r && m[i][col] != 0 {
                let s = f.neg(m[i][col]);
                for j in 0..=k {
                    let add = f.mul(s, m[r][j]);
                    m[i][j] = f.add(m[i][j], add);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if m[r..].iter().any(|row| row[k] != 0) {
        return None;
    }
    if pivots.len() < k {
        return None;
    }
    Some((0..k).map(|i| m[i][k]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unsupported_orders_rejected() {
        for q in [0u8, 1, 4, 7, 9] {
            assert!(PrimeField::new(q).is_err());
        }
    }

    #[test]
    fn inverses_by_brute_force() {
        for q in SUPPORTED_Q {
            let f = PrimeField::new(q).unwrap();
            for a in 1..q {
                let b = (1..q).find(|&b| (a as u32 * b as u32) % q as u32 == 1).unwrap();
                assert_eq!(f.inv(a), b);
            }
        }
    }

    #[test]
    fn code_round_trip() {
        for v in all_vectors(3, 4) {
            assert_eq!(Vector::from_code(v.code(3), 3, 4), v);
        }
    }

    #[test]
    fn span_sizes() {
        let f = PrimeField::new(3).unwrap();
        let b = [Vector::unit(6, 0), Vector::unit(6, 3), Vector::from_slice(&[1, 0, 0, 1, 0, 0])];
        assert_eq!(rank(&f, &b), 2);
        assert_eq!(projective_span(&f, &b).len(), 4);
    }

    proptest! {
        #[test]
        fn coordinates_reconstruct(q_idx in 0usize..3, seed in proptest::collection::vec(0u8..5, 12), coeff in proptest::collection::vec(0u8..5, 2)) {
            let q = SUPPORTED_Q[q_idx];
            let f = PrimeField::new(q).unwrap();
            let a = Vector::from_slice(&seed[..6].iter().map(|x| x % q).collect::<Vec<_>>());
            let b = Vector::from_slice(&seed[6..].iter().map(|x| x % q).collect::<Vec<_>>());
            prop_assume!(rank(&f, &[a, b]) == 2);
            let v = a.scale(&f, coeff[0] % q).axpy(&f, coeff[1] % q, &b);
            let c = coordinates(&f, &[a, b], &v).unwrap();
            prop_assert_eq!(c, vec![coeff[0] % q, coeff[1] % q]);
        }

        #[test]
        fn normalization_is_projective(q_idx in 0usize..3, raw in proptest::collection::vec(0u8..5, 7), s in 1u8..5) {
            let q = SUPPORTED_Q[q_idx];
            let f = PrimeField::new(q).unwrap();
            let s = s % q;
            prop_assume!(s != 0);
            let v = Vector::from_slice(&raw.iter().map(|x| x % q).collect::<Vec<_>>());
            prop_assert_eq!(v.normalized(&f), v.scale(&f, s).normalized(&f));
        }
    }
}
