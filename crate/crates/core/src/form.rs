//! Alternating and quadratic forms defining the polar space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{all_vectors, echelon, PrimeField, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormKind {
    /// Alternating form on a 6-space, giving W(5,q).
    Alternating,
    /// Parabolic quadric on a 7-space, giving Q(6,q).
    QuadraticParabolic,
}

/// Coefficient data of a form. For the alternating kind `coeffs` is the Gram matrix;
/// for the quadric it is upper triangular with `coeffs[i][j]` the coefficient of `x_i x_j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormSpec {
    pub kind: FormKind,
    pub q: u8,
    pub coeffs: Vec<Vec<u8>>,
}

impl FormSpec {
    /// Gram matrix antidiag(1,1,1,-1,-1,-1).
    pub fn symplectic(q: u8) -> Self {
        let mut g = vec![vec![0u8; 6]; 6];
        for i in 0..6 {
            g[i][5 - i] = if i < 3 { 1 } else { (q - 1) % q };
        }
        Self {
            kind: FormKind::Alternating,
            q,
            coeffs: g,
        }
    }

    /// x0^2 + x1x2 + x3x4 + x5x6.
    pub fn parabolic(q: u8) -> Self {
        let mut c = vec![vec![0u8; 7]; 7];
        c[0][0] = 1;
        c[1][2] = 1;
        c[3][4] = 1;
        c[5][6] = 1;
        Self {
            kind: FormKind::QuadraticParabolic,
            q,
            coeffs: c,
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// Validate shape and nondegeneracy, returning the evaluator.
    pub fn compile(&self) -> Result<Form> {
        let field = PrimeField::new(self.q)?;
        let n = self.dim();
        let expected = match self.kind {
            FormKind::Alternating => 6,
            FormKind::QuadraticParabolic => 7,
        };
        if n != expected || self.coeffs.iter().any(|r| r.len() != n) {
            return Err(Error::DegenerateForm(format!("expected a {expected}x{expected} coefficient matrix")));
        }
        if self.coeffs.iter().flatten().any(|&c| c >= self.q) {
            return Err(Error::DegenerateForm("coefficient out of field range".into()));
        }
        let mut gram = vec![vec![0u8; n]; n];
        match self.kind {
            FormKind::Alternating => {
                for i in 0..n {
                    if self.coeffs[i][i] != 0 {
                        return Err(Error::DegenerateForm("alternating form with nonzero diagonal".into()));
                    }
                    for j in 0..n {
                        if self.coeffs[i][j] != field.neg(self.coeffs[j][i]) {
                            return Err(Error::DegenerateForm("Gram matrix is not skew".into()));
                        }
                        gram[i][j] = self.coeffs[i][j];
                    }
                }
            }
            FormKind::QuadraticParabolic => {
                for i in 0..n {
                    for j in 0..i {
                        if self.coeffs[i][j] != 0 {
                            return Err(Error::DegenerateForm("quadric coefficients must be upper triangular".into()));
                        }
                    }
                }
                for i in 0..n {
                    for j in 0..n {
                        gram[i][j] = if i == j {
                            field.add(self.coeffs[i][i], self.coeffs[i][i])
                        } else if i < j {
                            self.coeffs[i][j]
                        } else {
                            self.coeffs[j][i]
                        };
                    }
                }
            }
        }
        let form = Form {
            spec: self.clone(),
            field,
            gram,
        };
        form.check_nondegenerate()?;
        Ok(form)
    }
}

/// A validated form with its polarization.
#[derive(Debug, Clone)]
pub struct Form {
    spec: FormSpec,
    field: PrimeField,
    gram: Vec<Vec<u8>>,
}

impl Form {
    pub fn spec(&self) -> &FormSpec {
        &self.spec
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn kind(&self) -> FormKind {
        self.spec.kind
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    /// The bilinear form (alternating form or polarization of the quadric).
    pub fn bilinear(&self, x: &Vector, y: &Vector) -> u8 {
        let f = &self.field;
        let mut acc = 0u8;
        for i in 0..self.dim() {
            let xi = x.get(i);
            if xi == 0 {
                continue;
            }
            for j in 0..self.dim() {
                let g = self.gram[i][j];
                if g != 0 {
                    acc = f.add(acc, f.mul(xi, f.mul(g, y.get(j))));
                }
            }
        }
        acc
    }

    /// Quadratic form value; identically zero for the alternating kind.
    pub fn quadratic(&self, x: &Vector) -> u8 {
        if self.kind() == FormKind::Alternating {
            return 0;
        }
        let f = &self.field;
        let mut acc = 0u8;
        for i in 0..self.dim() {
            for j in i..self.dim() {
                let c = self.spec.coeffs[i][j];
                if c != 0 {
                    acc = f.add(acc, f.mul(c, f.mul(x.get(i), x.get(j))));
                }
            }
        }
        acc
    }

    pub fn is_singular(&self, x: &Vector) -> bool {
        self.quadratic(x) == 0
    }

    /// Radical of the bilinear form.
    pub fn radical(&self) -> Vec<Vector> {
        let basis: Vec<Vector> = all_vectors(self.field.q(), self.dim())
            .filter(|v| !v.is_zero() && (0..self.dim()).all(|i| self.bilinear(v, &Vector::unit(self.dim(), i)) == 0))
            .collect();
        echelon(&self.field, &basis)
    }

    fn check_nondegenerate(&self) -> Result<()> {
        let rad = self.radical();
        match self.kind() {
            FormKind::Alternating => {
                if !rad.is_empty() {
                    return Err(Error::DegenerateForm(format!("radical of dimension {}", rad.len())));
                }
            }
            FormKind::QuadraticParabolic => {
                // Nondegenerate iff Q is anisotropic on the radical of its polarization.
                let singular_in_radical = crate::field::projective_span(&self.field, &rad).into_iter().any(|v| self.quadratic(&v) == 0);
                if singular_in_radical || rad.len() > 1 {
                    return Err(Error::DegenerateForm(format!("singular radical of dimension {}", rad.len())));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_forms_compile() {
        for q in [2u8, 3, 5] {
            FormSpec::symplectic(q).compile().unwrap();
            FormSpec::parabolic(q).compile().unwrap();
        }
    }

    #[test]
    fn symplectic_pairs_antidiagonal() {
        let form = FormSpec::symplectic(3).compile().unwrap();
        let e = |i| Vector::unit(6, i);
        assert_eq!(form.bilinear(&e(0), &e(5)), 1);
        assert_eq!(form.bilinear(&e(5), &e(0)), 2);
        assert_eq!(form.bilinear(&e(0), &e(4)), 0);
    }

    #[test]
    fn parabolic_at_two_has_radical_but_is_nondegenerate() {
        let form = FormSpec::parabolic(2).compile().unwrap();
        assert_eq!(form.radical(), vec![Vector::unit(7, 0)]);
    }

    #[test]
    fn degenerate_forms_rejected() {
        let mut g = FormSpec::symplectic(3);
        g.coeffs[0][5] = 0;
        g.coeffs[5][0] = 0;
        assert!(matches!(g.compile(), Err(Error::DegenerateForm(_))));

        let mut c = FormSpec::parabolic(3);
        c.coeffs[0][0] = 0;
        assert!(matches!(c.compile(), Err(Error::DegenerateForm(_))));

        let mut skew = FormSpec::symplectic(5);
        skew.coeffs[1][4] = 2;
        assert!(matches!(skew.compile(), Err(Error::DegenerateForm(_))));
    }
}
