//! Dense univariate polynomials over a [`Field`], and bivariate polynomials in `F_q[t][X]`.
//!
//! Polynomials do not carry their field; every operation takes it explicitly.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, Field};

/// Coefficients low-to-high with no trailing zeros. The zero polynomial is empty.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    coeffs: Vec<Fe>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

impl Poly {
    pub fn from_coeffs(mut coeffs: Vec<Fe>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// From raw element encodings; values are not range-checked.
    pub fn from_raw(raw: &[u32]) -> Poly {
        Self::from_coeffs(raw.iter().map(|&c| Fe(c)).collect())
    }

    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly { coeffs: vec![Fe::ONE] }
    }

    /// The variable.
    pub fn x() -> Poly {
        Poly { coeffs: vec![Fe::ZERO, Fe::ONE] }
    }

    pub fn constant(c: Fe) -> Poly {
        Self::from_coeffs(vec![c])
    }

    /// `c·X^d`.
    pub fn monomial(c: Fe, d: usize) -> Poly {
        let mut v = vec![Fe::ZERO; d + 1];
        v[d] = c;
        Self::from_coeffs(v)
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Fe> {
        self.coeffs
    }

    pub fn raw(&self) -> Vec<u32> {
        self.coeffs.iter().map(|c| c.0).collect()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    #[inline]
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with `deg 0 = 0`; convenient where the zero case is harmless.
    #[inline]
    pub fn deg0(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    #[inline]
    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(Fe::ZERO)
    }

    pub fn lead(&self) -> Fe {
        self.coeffs.last().copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == Fe::ONE
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Fe::ONE
    }

    pub fn add(&self, b: &Poly, k: &Field) -> Poly {
        let n = self.coeffs.len().max(b.coeffs.len());
        Self::from_coeffs((0..n).map(|i| k.add(self.coeff(i), b.coeff(i))).collect())
    }

    pub fn sub(&self, b: &Poly, k: &Field) -> Poly {
        let n = self.coeffs.len().max(b.coeffs.len());
        Self::from_coeffs((0..n).map(|i| k.sub(self.coeff(i), b.coeff(i))).collect())
    }

    pub fn neg(&self, k: &Field) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|&c| k.neg(c)).collect() }
    }

    pub fn scale(&self, c: Fe, k: &Field) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { coeffs: self.coeffs.iter().map(|&a| k.mul(a, c)).collect() }
    }

    pub fn mul(&self, b: &Poly, k: &Field) -> Poly {
        if self.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Fe::ZERO; self.coeffs.len() + b.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &c) in b.coeffs.iter().enumerate() {
                out[i + j] = k.add(out[i + j], k.mul(a, c));
            }
        }
        Self::from_coeffs(out)
    }

    /// Multiply by `X^s`.
    pub fn shift(&self, s: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Fe::ZERO; s];
        v.extend_from_slice(&self.coeffs);
        Poly { coeffs: v }
    }

    pub fn pow(&self, mut e: u64, k: &Field) -> Poly {
        let mut base = self.clone();
        let mut r = Poly::one();
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

    /// Quotient and remainder; errors on a zero divisor.
    pub fn div_rem(&self, b: &Poly, k: &Field) -> Result<(Poly, Poly)> {
        let db = b.degree().ok_or(Error::ZeroPolynomial)?;
        if self.coeffs.len() <= db {
            return Ok((Poly::zero(), self.clone()));
        }
        let inv = k.inv(b.lead()).expect("nonzero leading coefficient");
        let mut r = self.coeffs.clone();
        let mut q = vec![Fe::ZERO; r.len() - db];
        for i in (0..q.len()).rev() {
            let c = k.mul(r[i + db], inv);
            if c.is_zero() {
                continue;
            }
            q[i] = c;
            for (j, &bj) in b.coeffs.iter().enumerate() {
                r[i + j] = k.sub(r[i + j], k.mul(c, bj));
            }
        }
        r.truncate(db);
        Ok((Self::from_coeffs(q), Self::from_coeffs(r)))
    }

    pub fn rem(&self, b: &Poly, k: &Field) -> Result<Poly> {
        Ok(self.div_rem(b, k)?.1)
    }

    /// Quotient when the division is exact.
    pub fn exact_div(&self, b: &Poly, k: &Field) -> Result<Poly> {
        let (q, r) = self.div_rem(b, k)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::NotDivisible)
        }
    }

    pub fn divides(&self, f: &Poly, k: &Field) -> bool {
        matches!(f.div_rem(self, k), Ok((_, r)) if r.is_zero())
    }

    /// Monic normalization; zero stays zero.
    pub fn monic(&self, k: &Field) -> Poly {
        match k.inv(self.lead()) {
            Some(inv) if self.lead() != Fe::ONE => self.scale(inv, k),
            _ => self.clone(),
        }
    }

    /// Monic greatest common divisor; errors if both inputs are zero.
    pub fn gcd(&self, b: &Poly, k: &Field) -> Result<Poly> {
        if self.is_zero() && b.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let (mut a, mut b) = (self.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(&b, k)?;
            a = b;
            b = r;
        }
        Ok(a.monic(k))
    }

    /// Horner evaluation.
    pub fn eval(&self, x: Fe, k: &Field) -> Fe {
        self.coeffs.iter().rev().fold(Fe::ZERO, |acc, &c| k.add(k.mul(acc, x), c))
    }

    pub fn derivative(&self, k: &Field) -> Poly {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| k.mul(k.from_int(i as i64), c))
                .collect(),
        )
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, mut e: u64, m: &Poly, k: &Field) -> Result<Poly> {
        let mut base = self.rem(m, k)?;
        let mut r = Poly::one().rem(m, k)?;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base, k).rem(m, k)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, k).rem(m, k)?;
            }
        }
        Ok(r)
    }

    pub fn mul_mod(&self, b: &Poly, m: &Poly, k: &Field) -> Result<Poly> {
        self.mul(b, k).rem(m, k)
    }

    /// Apply `g` to every coefficient (e.g. a field embedding or Frobenius).
    pub fn map(&self, g: impl Fn(Fe) -> Fe) -> Poly {
        Self::from_coeffs(self.coeffs.iter().map(|&c| g(c)).collect())
    }

    /// Substitute `X ↦ X^s`.
    pub fn inflate(&self, s: usize) -> Poly {
        if self.is_zero() || s == 1 {
            return self.clone();
        }
        let mut v = vec![Fe::ZERO; (self.coeffs.len() - 1) * s + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            v[i * s] = c;
        }
        Poly { coeffs: v }
    }

    /// Number of `X` factors: the smallest index with a nonzero coefficient.
    pub fn x_valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Divide by `X^s` (the low `s` coefficients must be zero).
    pub fn unshift(&self, s: usize) -> Poly {
        Self::from_coeffs(self.coeffs.iter().skip(s).copied().collect())
    }

    /// Monic polynomial from `coeffs` of a degree-`n` polynomial below the leading one.
    pub fn monic_from_lower(lower: &[Fe]) -> Poly {
        let mut v = lower.to_vec();
        v.push(Fe::ONE);
        Poly { coeffs: v }
    }
}

/// An element `Σ_j c_j(t) X^j` of `F_q[t][X]`, stored X-major.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BiPoly {
    rows: Vec<Poly>,
}

impl BiPoly {
    /// `rows[j]` is the coefficient of `X^j`, a polynomial in `t`.
    pub fn from_rows(mut rows: Vec<Poly>) -> BiPoly {
        while rows.last().is_some_and(|r| r.is_zero()) {
            rows.pop();
        }
        BiPoly { rows }
    }

    /// Lift a polynomial in `X` with constant coefficients.
    pub fn from_x_poly(p: &Poly) -> BiPoly {
        Self::from_rows(p.coeffs().iter().map(|&c| Poly::constant(c)).collect())
    }

    pub fn rows(&self) -> &[Poly] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn degree_x(&self) -> Option<usize> {
        self.rows.len().checked_sub(1)
    }

    pub fn degree_t(&self) -> Option<usize> {
        self.rows.iter().filter_map(|r| r.degree()).max()
    }

    /// The t-major view: `c_i(X)` with `f = Σ_i c_i(X) t^i`.
    pub fn t_slices(&self) -> Vec<Poly> {
        let dt = self.degree_t().map_or(0, |d| d + 1);
        (0..dt)
            .map(|i| Poly::from_coeffs(self.rows.iter().map(|r| r.coeff(i)).collect()))
            .collect()
    }

    /// Rebuild from t-major slices.
    pub fn from_t_slices(slices: &[Poly]) -> BiPoly {
        let dx = slices.iter().map(|s| s.coeffs().len()).max().unwrap_or(0);
        Self::from_rows(
            (0..dx)
                .map(|j| Poly::from_coeffs(slices.iter().map(|s| s.coeff(j)).collect()))
                .collect(),
        )
    }

    /// Swap the roles of `t` and `X`.
    pub fn transpose(&self) -> BiPoly {
        Self::from_rows(self.t_slices())
    }

    pub fn add(&self, b: &BiPoly, k: &Field) -> BiPoly {
        let n = self.rows.len().max(b.rows.len());
        let z = Poly::zero();
        Self::from_rows(
            (0..n)
                .map(|j| self.rows.get(j).unwrap_or(&z).add(b.rows.get(j).unwrap_or(&z), k))
                .collect(),
        )
    }

    pub fn mul(&self, b: &BiPoly, k: &Field) -> BiPoly {
        if self.is_zero() || b.is_zero() {
            return BiPoly::default();
        }
        let mut out = vec![Poly::zero(); self.rows.len() + b.rows.len() - 1];
        for (i, a) in self.rows.iter().enumerate() {
            for (j, c) in b.rows.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(c, k), k);
            }
        }
        Self::from_rows(out)
    }

    /// Specialize `t ↦ τ`.
    pub fn eval_t(&self, tau: Fe, k: &Field) -> Poly {
        Poly::from_coeffs(self.rows.iter().map(|r| r.eval(tau, k)).collect())
    }

    /// `con_t f`: monic gcd in `X` of the t-slices.
    pub fn content_t(&self, k: &Field) -> Result<Poly> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut g = Poly::zero();
        for s in self.t_slices() {
            if s.is_zero() {
                continue;
            }
            g = if g.is_zero() { s.monic(k) } else { g.gcd(&s, k)? };
            if g.is_one() {
                break;
            }
        }
        Ok(g)
    }
}
