//! Square matrices over a finite field.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::poly::Poly;

/// Row-major `n × n` matrix. The field is passed to each operation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    n: usize,
    data: Vec<Fe>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<Fe>>::deserialize(d)?;
        Matrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

impl Matrix {
    pub fn zero(n: usize) -> Matrix {
        Matrix { n, data: vec![Fe::ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.data[i * n + i] = Fe::ONE;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Fe>>) -> Result<Matrix> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("matrix rows must all have length n".into()));
        }
        Ok(Matrix { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_raw(rows: &[&[u32]]) -> Result<Matrix> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&c| Fe(c)).collect()).collect())
    }

    pub fn diagonal(d: &[Fe]) -> Matrix {
        let mut m = Self::zero(d.len());
        for (i, &c) in d.iter().enumerate() {
            m.set(i, i, c);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Fe) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<Fe>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn mul(&self, b: &Matrix, k: &Field) -> Matrix {
        assert_eq!(self.n, b.n, "matrix dimension mismatch");
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for l in 0..n {
                let a = self.data[i * n + l];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let c = b.data[l * n + j];
                    if !c.is_zero() {
                        out.data[i * n + j] = k.add(out.data[i * n + j], k.mul(a, c));
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64, k: &Field) -> Matrix {
        let mut base = self.clone();
        let mut r = Self::identity(self.n);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base, k);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, k);
            }
        }
        r
    }

    /// Apply `g` entrywise.
    pub fn map(&self, g: impl Fn(Fe) -> Fe) -> Matrix {
        Matrix { n: self.n, data: self.data.iter().map(|&x| g(x)).collect() }
    }

    /// Determinant by Gaussian elimination.
    pub fn det(&self, k: &Field) -> Fe {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = Fe::ONE;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r * n + col].is_zero()) else {
                return Fe::ZERO;
            };
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                }
                det = k.neg(det);
            }
            let p = a[col * n + col];
            det = k.mul(det, p);
            let inv = k.inv(p).unwrap();
            for r in col + 1..n {
                let f = k.mul(a[r * n + col], inv);
                if f.is_zero() {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] = k.sub(a[r * n + j], k.mul(f, a[col * n + j]));
                }
            }
        }
        det
    }

    pub fn inverse(&self, k: &Field) -> Result<Matrix> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut b = Self::identity(n).data;
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r * n + col].is_zero()).ok_or(Error::Singular)?;
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                    b.swap(piv * n + j, col * n + j);
                }
            }
            let inv = k.inv(a[col * n + col]).unwrap();
            for j in 0..n {
                a[col * n + j] = k.mul(a[col * n + j], inv);
                b[col * n + j] = k.mul(b[col * n + j], inv);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] = k.sub(a[r * n + j], k.mul(f, a[col * n + j]));
                    b[r * n + j] = k.sub(b[r * n + j], k.mul(f, b[col * n + j]));
                }
            }
        }
        Ok(Matrix { n, data: b })
    }

    /// Characteristic polynomial `det(X·I - M)`, via reduction to upper
    /// Hessenberg form and the standard recurrence.
    pub fn charpoly(&self, k: &Field) -> Poly {
        let n = self.n;
        let mut h = self.data.clone();
        let at = |i: usize, j: usize| i * n + j;
        for j in 0..n.saturating_sub(2) {
            let Some(piv) = (j + 1..n).find(|&i| !h[at(i, j)].is_zero()) else { continue };
            if piv != j + 1 {
                for c in 0..n {
                    h.swap(at(piv, c), at(j + 1, c));
                }
                for r in 0..n {
                    h.swap(at(r, piv), at(r, j + 1));
                }
            }
            let inv = k.inv(h[at(j + 1, j)]).unwrap();
            for r in j + 2..n {
                let u = k.mul(h[at(r, j)], inv);
                if u.is_zero() {
                    continue;
                }
                for c in 0..n {
                    h[at(r, c)] = k.sub(h[at(r, c)], k.mul(u, h[at(j + 1, c)]));
                }
                for rr in 0..n {
                    h[at(rr, j + 1)] = k.add(h[at(rr, j + 1)], k.mul(u, h[at(rr, r)]));
                }
            }
        }
        // 1-indexed access into the Hessenberg matrix
        let hh = |i: usize, j: usize| h[at(i - 1, j - 1)];
        let mut p: Vec<Poly> = vec![Poly::one()];
        for m in 1..=n {
            let lin = Poly::from_coeffs(vec![k.neg(hh(m, m)), Fe::ONE]);
            let mut pm = lin.mul(&p[m - 1], k);
            let mut t = Fe::ONE;
            for i in (1..m).rev() {
                t = k.mul(t, hh(i + 1, i));
                let c = k.mul(hh(i, m), t);
                if !c.is_zero() {
                    pm = pm.sub(&p[i - 1].scale(c, k), k);
                }
            }
            p.push(pm);
        }
        p.pop().unwrap()
    }

    /// Multiplicative order, searching up to `cap`; `None` if not found.
    pub fn order(&self, k: &Field, cap: u64) -> Option<u64> {
        let id = Self::identity(self.n);
        let mut x = self.clone();
        for i in 1..=cap {
            if x == id {
                return Some(i);
            }
            x = x.mul(self, k);
        }
        None
    }

    /// The `rows × cols` block with top-left corner `(r0, c0)`, as a flat row-major list.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Vec<Fe> {
        let mut v = Vec::with_capacity(rows * cols);
        for i in r0..r0 + rows {
            for j in c0..c0 + cols {
                v.push(self.get(i, j));
            }
        }
        v
    }

    /// Square sub-block starting at `(r0, r0)` of size `s`.
    pub fn square_block(&self, r0: usize, s: usize) -> Matrix {
        Matrix { n: s, data: self.block(r0, r0, s, s) }
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let n = self.n + other.n;
        let mut m = Self::zero(n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, self.get(i, j));
            }
        }
        for i in 0..other.n {
            for j in 0..other.n {
                m.set(self.n + i, self.n + j, other.get(i, j));
            }
        }
        m
    }
}
