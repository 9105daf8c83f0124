//! Companion matrices and Frobenius data of additive polynomials at specializations `t ↦ τ`.

use serde::{Deserialize, Serialize};

use crate::additive::AdditivePoly;
use crate::error::{Error, Result};
use crate::field::{Fe, Field, Tower};
use crate::matrix::Matrix;
use crate::poly::Poly;

/// Companion matrix of a monic `p = X^n + p_{n-1}X^{n-1} + … + p_0`: ones on the
/// subdiagonal and `-p_i` down the last column. Degree 0 gives the empty matrix.
pub fn companion_matrix(p: &Poly, k: &Field) -> Result<Matrix> {
    if !p.is_monic() {
        return Err(Error::NotMonic);
    }
    let n = p.deg0();
    let mut m = Matrix::zero(n);
    for i in 0..n {
        if i + 1 < n {
            m.set(i + 1, i, Fe::ONE);
        }
        m.set(i, n - 1, k.neg(p.coeff(i)));
    }
    Ok(m)
}

/// `B = D · D^{(q)} ⋯ D^{(q^{s-1})}` for `f` with ground coefficients in the top field
/// of `tower`, where `D` is the companion matrix of `f̃` and `s` defaults to the tower degree.
pub fn frobenius_matrix(f: &AdditivePoly, tower: &Tower) -> Result<Matrix> {
    frobenius_matrix_of_degree(f, tower, tower.r())
}

/// As [`frobenius_matrix`] for coefficients in the subfield `F_{q^s}` of the top field.
pub fn frobenius_matrix_of_degree(f: &AdditivePoly, tower: &Tower, s: u32) -> Result<Matrix> {
    if !f.is_separable() {
        return Err(Error::NotSeparable);
    }
    if !f.is_monic() {
        return Err(Error::NotMonic);
    }
    let top = tower.top();
    let d = companion_matrix(&f.tilde()?, top)?;
    let mut b = d.clone();
    for i in 1..s {
        b = b.mul(&d.map(|x| tower.frobenius_power(x, i)), top);
    }
    Ok(b)
}

/// Re-express a polynomial over the top field with `Fr_q`-fixed coefficients over the base.
pub fn descend_poly(p: &Poly, tower: &Tower) -> Result<Poly> {
    let coeffs = p
        .coeffs()
        .iter()
        .map(|&c| {
            if tower.frobenius_power(c, 1) != c {
                return Err(Error::Internal(format!(
                    "characteristic polynomial coefficient {c:?} is not fixed by Frobenius"
                )));
            }
            tower.descend(c).ok_or_else(|| Error::Internal("descent failed".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Poly::from_coeffs(coeffs))
}

/// Frobenius data of `f ∈ F_q[t][X]` at one specialization.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpecializationReport {
    /// `τ` as an element of the tower's top field.
    pub tau: Fe,
    /// `[F_q(τ):F_q]`.
    pub r: u32,
    /// `a_0(τ) ≠ 0`.
    pub separable: bool,
    /// Frobenius matrix over the top field, when separable.
    pub frob_matrix: Option<Matrix>,
    /// Characteristic polynomial over `F_q`, when separable.
    pub charpoly: Option<Poly>,
    /// `(-1)^{rn} N(a_0(τ))`, when separable.
    pub det: Option<Fe>,
}

/// Evaluate every coefficient of `f` at `τ` and, when `a_0(τ) ≠ 0`, compute the
/// Frobenius matrix, its characteristic polynomial over `F_q` and the closed-form determinant.
pub fn specialize(f: &AdditivePoly, tower: &Tower, tau: Fe) -> Result<SpecializationReport> {
    if !f.is_monic() {
        return Err(Error::NotMonic);
    }
    let r = tower.degree_over_base(tau);
    let coeffs = f.specialize_coeffs(tower, tau);
    let a0 = coeffs[0];
    if a0.is_zero() {
        return Ok(SpecializationReport {
            tau,
            r,
            separable: false,
            frob_matrix: None,
            charpoly: None,
            det: None,
        });
    }
    let ft = AdditivePoly::from_ground(f.q, &coeffs);
    let top = tower.top();
    let b = frobenius_matrix_of_degree(&ft, tower, r)?;
    let cp = descend_poly(&b.charpoly(top), tower)?;
    let n = f.n() as u64;
    let norm = tower.norm_from_subfield(a0, r);
    let base = tower.base();
    let det = if (r as u64 * n) % 2 == 1 { base.neg(norm) } else { norm };
    Ok(SpecializationReport {
        tau,
        r,
        separable: true,
        frob_matrix: Some(b),
        charpoly: Some(cp),
        det: Some(det),
    })
}

/// Characteristic polynomial only, skipping the report; `None` when `a_0(τ) = 0`.
pub fn specialization_charpoly(f: &AdditivePoly, tower: &Tower, tau: Fe) -> Result<Option<Poly>> {
    Ok(specialize(f, tower, tau)?.charpoly)
}

/// `f̃(0, X) = X^k g` with `g(0) ≠ 0`, for `f ∈ F_q[t][X]` monic.
pub fn charpoly_divisor_at_zero(f: &AdditivePoly, k: &Field) -> Result<(usize, Poly)> {
    let at0 = Poly::from_coeffs(f.coeffs().iter().map(|a| a.eval(Fe::ZERO, k)).collect());
    let v = at0.x_valuation().ok_or(Error::ZeroPolynomial)?;
    Ok((v, at0.unshift(v)))
}

/// JSON-friendly rendering of a [`SpecializationReport`] with field elements as
/// residue coefficient arrays.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpecializationJson {
    pub tau: Vec<u32>,
    pub r: u32,
    pub separable: bool,
    pub frob_matrix: Option<Vec<Vec<Vec<u32>>>>,
    pub charpoly: Option<Vec<Vec<u32>>>,
    pub det: Option<Vec<u32>>,
}

impl SpecializationReport {
    pub fn to_json(&self, tower: &Tower) -> SpecializationJson {
        let (base, top) = (tower.base(), tower.top());
        SpecializationJson {
            tau: top.coeffs(self.tau),
            r: self.r,
            separable: self.separable,
            frob_matrix: self.frob_matrix.as_ref().map(|m| {
                m.rows().iter().map(|row| row.iter().map(|&x| top.coeffs(x)).collect()).collect()
            }),
            charpoly: self
                .charpoly
                .as_ref()
                .map(|p| p.coeffs().iter().map(|&c| base.coeffs(c)).collect()),
            det: self.det.map(|d| base.coeffs(d)),
        }
    }
}
