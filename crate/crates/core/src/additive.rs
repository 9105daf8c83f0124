//! q-additive polynomials `f = Σ a_i X^{q^i}`.
//!
//! Coefficients are polynomials in `t` over some field `K ⊇ F_q`; constant
//! polynomials model ground-field coefficients. Under `X^{q^i} ↦ X^i` (the
//! associated polynomial), composition over `F_q` becomes multiplication.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, Field, Tower};
use crate::poly::{BiPoly, Poly};
use crate::util::{checked_pow, floor_log};

/// Hard cap on candidates examined by [`find_additive_divisors`].
pub const DIVISOR_SEARCH_CAP: u128 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AdditivePoly {
    pub q: u64,
    coeffs: Vec<Poly>,
}

/// `ã = Σ a_i X^i`, coefficients in `K[t]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AssociatedPoly {
    coeffs: Vec<Poly>,
}

impl AssociatedPoly {
    pub fn new(mut coeffs: Vec<Poly>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        AssociatedPoly { coeffs }
    }

    /// View a polynomial in `X` over `K` as an associated polynomial.
    pub fn from_ground(p: &Poly) -> Self {
        Self::new(p.coeffs().iter().map(|&c| Poly::constant(c)).collect())
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    /// The polynomial in `X` over `K`, when every coefficient is constant in `t`.
    pub fn as_ground(&self) -> Result<Poly> {
        if self.coeffs.iter().any(|c| !c.is_constant()) {
            return Err(Error::NonConstantCoefficients);
        }
        Ok(Poly::from_coeffs(self.coeffs.iter().map(|c| c.coeff(0)).collect()))
    }
}

/// `b(t)^{q^i}`: Frobenius on the coefficients and `t ↦ t^{q^i}`.
fn twist(b: &Poly, q: u64, i: u32, k: &Field) -> Poly {
    if i == 0 {
        return b.clone();
    }
    let s = checked_pow(q, i).expect("twist exponent overflow") as usize;
    b.map(|c| k.frobenius(c, q, i)).inflate(s)
}

impl AdditivePoly {
    pub fn new(q: u64, mut coeffs: Vec<Poly>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        AdditivePoly { q, coeffs }
    }

    /// `X^{q^n} + Σ_{i<n} lower[i] X^{q^i}` with `n = lower.len()`.
    pub fn monic_from_lower(q: u64, lower: Vec<Poly>) -> Self {
        let mut c = lower;
        c.push(Poly::one());
        Self::new(q, c)
    }

    /// Ground-field coefficients `a_0..a_n`.
    pub fn from_ground(q: u64, coeffs: &[Fe]) -> Self {
        Self::new(q, coeffs.iter().map(|&c| Poly::constant(c)).collect())
    }

    /// The additive polynomial `X`.
    pub fn x(q: u64) -> Self {
        Self::new(q, vec![Poly::one()])
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Poly {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `n` with `f = a_n X^{q^n} + …`, `None` for zero.
    pub fn additive_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Additive degree treating zero as 0.
    pub fn n(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_separable(&self) -> bool {
        self.coeffs.first().is_some_and(|a| !a.is_zero())
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|a| a.is_one())
    }

    /// Largest t-degree among the coefficients.
    pub fn deg_t(&self) -> usize {
        self.coeffs.iter().map(|c| c.deg0()).max().unwrap_or(0)
    }

    /// All coefficients constant in `t`.
    pub fn is_ground(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_constant())
    }

    pub fn to_associated(&self) -> AssociatedPoly {
        AssociatedPoly::new(self.coeffs.clone())
    }

    pub fn from_associated(q: u64, p: &AssociatedPoly) -> Self {
        Self::new(q, p.coeffs.clone())
    }

    /// `ã` as a polynomial over `K`; requires ground coefficients.
    pub fn tilde(&self) -> Result<Poly> {
        self.to_associated().as_ground()
    }

    pub fn from_tilde(q: u64, p: &Poly) -> Self {
        Self::from_associated(q, &AssociatedPoly::from_ground(p))
    }

    /// The ground coefficients `a_i ∈ K`.
    pub fn ground_coeffs(&self) -> Result<Vec<Fe>> {
        Ok(self.tilde()?.into_coeffs())
    }

    /// Expansion as an element of `K[t][X]`.
    pub fn expand(&self) -> BiPoly {
        let Some(n) = self.additive_degree() else { return BiPoly::default() };
        let top = checked_pow(self.q, n as u32).expect("expansion too large") as usize;
        let mut rows = vec![Poly::zero(); top + 1];
        let mut e = 1usize;
        for a in &self.coeffs {
            rows[e] = a.clone();
            e = e.saturating_mul(self.q as usize);
        }
        BiPoly::from_rows(rows)
    }

    /// Parse an expanded polynomial; errors if it is not q-additive.
    pub fn from_expansion(q: u64, f: &BiPoly) -> Result<Self> {
        let mut coeffs = Vec::new();
        let mut e = 1usize;
        for (j, row) in f.rows().iter().enumerate() {
            if j == e {
                coeffs.push(row.clone());
                e = e.saturating_mul(q as usize);
            } else if !row.is_zero() {
                return Err(Error::InvalidArgument(format!("term X^{j} is not a q-power")));
            }
        }
        Ok(Self::new(q, coeffs))
    }

    fn check_q(&self, other: &AdditivePoly) -> Result<()> {
        if self.q != other.q {
            Err(Error::ContextMismatch)
        } else {
            Ok(())
        }
    }

    pub fn add(&self, g: &AdditivePoly, k: &Field) -> Result<Self> {
        self.check_q(g)?;
        let n = self.coeffs.len().max(g.coeffs.len());
        Ok(Self::new(self.q, (0..n).map(|i| self.coeff(i).add(&g.coeff(i), k)).collect()))
    }

    pub fn sub(&self, g: &AdditivePoly, k: &Field) -> Result<Self> {
        self.check_q(g)?;
        let n = self.coeffs.len().max(g.coeffs.len());
        Ok(Self::new(self.q, (0..n).map(|i| self.coeff(i).sub(&g.coeff(i), k)).collect()))
    }

    /// Multiply every coefficient by `c ∈ K[t]` (i.e. `c·f`).
    pub fn scale(&self, c: &Poly, k: &Field) -> Self {
        Self::new(self.q, self.coeffs.iter().map(|a| a.mul(c, k)).collect())
    }

    /// `f ∘ g`, with `(f∘g)_s = Σ_{i+j=s} a_i · b_j^{q^i}`.
    pub fn compose(&self, g: &AdditivePoly, k: &Field) -> Result<Self> {
        self.check_q(g)?;
        if self.is_zero() || g.is_zero() {
            return Ok(Self::new(self.q, Vec::new()));
        }
        let mut out = vec![Poly::zero(); self.coeffs.len() + g.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in g.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let term = a.mul(&twist(b, self.q, i as u32, k), k);
                out[i + j] = out[i + j].add(&term, k);
            }
        }
        Ok(Self::new(self.q, out))
    }

    /// Value at `x ∈ K` for ground coefficients.
    pub fn eval_ground(&self, x: Fe, k: &Field) -> Result<Fe> {
        let mut acc = Fe::ZERO;
        let mut xp = x;
        for a in &self.coeffs {
            if !a.is_constant() {
                return Err(Error::NonConstantCoefficients);
            }
            acc = k.add(acc, k.mul(a.coeff(0), xp));
            xp = k.pow(xp, self.q);
        }
        Ok(acc)
    }

    /// Coefficients `a_i(τ)` in the top field of `tower`, for `a_i ∈ F_q[t]`.
    pub fn specialize_coeffs(&self, tower: &Tower, tau: Fe) -> Vec<Fe> {
        let top = tower.top();
        self.coeffs
            .iter()
            .map(|a| {
                a.coeffs()
                    .iter()
                    .rev()
                    .fold(Fe::ZERO, |acc, &c| top.add(top.mul(acc, tau), tower.embed(c)))
            })
            .collect()
    }

    /// Monic normalization by the leading coefficient, which must be a unit of `K`.
    pub fn monic(&self, k: &Field) -> Result<Self> {
        let lead = self.coeffs.last().ok_or(Error::ZeroPolynomial)?;
        if !lead.is_constant() {
            return Err(Error::NotMonic);
        }
        let inv = k.inv(lead.coeff(0)).expect("nonzero constant");
        Ok(self.scale(&Poly::constant(inv), k))
    }

    /// Right division `f = u ∘ g` by a monic `g`; `None` if `g` does not divide `f`.
    ///
    /// Because `g` is monic the cofactor has coefficients in `K[t]`, so
    /// divisibility over `K(t)` is decided without denominators.
    pub fn right_divide(&self, g: &AdditivePoly, k: &Field) -> Result<Option<AdditivePoly>> {
        self.check_q(g)?;
        if !g.is_monic() {
            return Err(Error::NotMonic);
        }
        let m = g.n();
        let Some(n) = self.additive_degree() else {
            return Ok(Some(Self::new(self.q, Vec::new())));
        };
        if n < m {
            return Ok(None);
        }
        let span = n - m;
        // twisted[j][l] = b_l^{q^j}, filled lazily per j
        let twisted: Vec<Vec<Poly>> = (0..=span)
            .map(|j| g.coeffs.iter().map(|b| twist(b, self.q, j as u32, k)).collect())
            .collect();
        let mut u = vec![Poly::zero(); span + 1];
        for s in (m..=n).rev() {
            let j0 = s - m;
            let mut c = self.coeff(s);
            for j in (j0 + 1)..=span {
                if s >= j && s - j <= m {
                    c = c.sub(&u[j].mul(&twisted[j][s - j], k), k);
                }
            }
            u[j0] = c;
        }
        for s in 0..m {
            let mut c = Poly::zero();
            for j in 0..=s.min(span) {
                c = c.add(&u[j].mul(&twisted[j][s - j], k), k);
            }
            if c != self.coeff(s) {
                return Ok(None);
            }
        }
        Ok(Some(Self::new(self.q, u)))
    }
}

/// Whether `g` divides `f` as ordinary polynomials in `X` over `K(t)`, by long
/// division of the expansions. `g` must be monic, so the quotient stays in `K[t][X]`.
pub fn divides_by_expansion(f: &AdditivePoly, g: &AdditivePoly, k: &Field) -> Result<bool> {
    if !g.is_monic() {
        return Err(Error::NotMonic);
    }
    let gx = g.expand();
    let dg = gx.degree_x().ok_or(Error::ZeroPolynomial)?;
    let mut r: Vec<Poly> = f.expand().rows().to_vec();
    while r.len() > dg {
        let c = r.pop().unwrap();
        if c.is_zero() {
            continue;
        }
        let shift = r.len() - dg;
        for (j, b) in gx.rows()[..dg].iter().enumerate() {
            if !b.is_zero() {
                r[shift + j] = r[shift + j].sub(&c.mul(b, k), k);
            }
        }
    }
    Ok(r.iter().all(|c| c.is_zero()))
}

fn require_base_field(q: u64, k: &Field) -> Result<()> {
    if k.order() != q {
        return Err(Error::InvalidArgument(format!(
            "coefficients must lie in F_{q}, got a field of order {}",
            k.order()
        )));
    }
    Ok(())
}

/// Monic additive gcd of additive polynomials over `F_q`, computed on associated polynomials.
pub fn additive_gcd(fs: &[AdditivePoly], k: &Field) -> Result<AdditivePoly> {
    let q = fs.first().ok_or(Error::ZeroPolynomial)?.q;
    require_base_field(q, k)?;
    let mut g = Poly::zero();
    for f in fs {
        if f.q != q {
            return Err(Error::ContextMismatch);
        }
        let t = f.tilde()?;
        if t.is_zero() {
            continue;
        }
        g = if g.is_zero() { t.monic(k) } else { g.gcd(&t, k)? };
    }
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(AdditivePoly::from_tilde(q, &g))
}

/// Same gcd computed from the expanded polynomials in `X`.
pub fn additive_gcd_by_expansion(fs: &[AdditivePoly], k: &Field) -> Result<AdditivePoly> {
    let q = fs.first().ok_or(Error::ZeroPolynomial)?.q;
    let mut g = Poly::zero();
    for f in fs {
        if !f.is_ground() {
            return Err(Error::NonConstantCoefficients);
        }
        let e = Poly::from_coeffs(f.expand().rows().iter().map(|r| r.coeff(0)).collect());
        if e.is_zero() {
            continue;
        }
        g = if g.is_zero() { e.monic(k) } else { g.gcd(&e, k)? };
    }
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    AdditivePoly::from_expansion(q, &BiPoly::from_x_poly(&g))
        .map_err(|_| Error::Internal("gcd of additive polynomials is not additive".into()))
}

/// `con_t f` as a monic additive polynomial over `F_q`: the gcd of the
/// associated t-slices.
pub fn con_t_additive(f: &AdditivePoly, k: &Field) -> Result<AdditivePoly> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    require_base_field(f.q, k)?;
    let slices = BiPoly::from_rows(f.coeffs.clone()).t_slices();
    let mut g = Poly::zero();
    for s in slices {
        if s.is_zero() {
            continue;
        }
        g = if g.is_zero() { s.monic(k) } else { g.gcd(&s, k)? };
        if g.is_one() {
            break;
        }
    }
    Ok(AdditivePoly::from_tilde(f.q, &g))
}

/// Result of the bounded additive-divisor search.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DivisorSearch {
    /// Monic divisors `g` with `0 < m < n`, `deg_t g ≥ 1`, sorted by `(m, coefficients)`.
    pub divisors: Vec<AdditivePoly>,
    pub m_min: usize,
    pub coeff_degree_bound: usize,
    pub candidates_examined: u64,
    /// True when `q^{n-η} ≤ d²`: divisors whose coefficients lie only in an
    /// extension of `F_q` are not excluded by the search.
    pub closure_divisors_possible: bool,
}

/// Every monic additive divisor of `f` with coefficients in `F_q[t]`, additive
/// degree `m ∈ [max(1, n - ⌊log_q d⌋), n-1]`, coefficient t-degree at most
/// `⌊d/q⌋` and `deg_t g ≥ 1`.
pub fn find_additive_divisors(f: &AdditivePoly, d: usize, k: &Field) -> Result<DivisorSearch> {
    if !f.is_monic() {
        return Err(Error::NotMonic);
    }
    if !f.is_separable() {
        return Err(Error::NotSeparable);
    }
    require_base_field(f.q, k)?;
    if f.deg_t() > d {
        return Err(Error::InvalidArgument(format!("deg_t f = {} exceeds d = {d}", f.deg_t())));
    }
    let q = f.q;
    let n = f.n();
    let eta = con_t_additive(f, k)?.n();
    let closure_divisors_possible = match checked_pow(q, (n - eta) as u32) {
        Some(v) => (v as u128) <= (d as u128) * (d as u128),
        None => false,
    };
    let tb = d / q as usize;
    let m_min = if d == 0 { n } else { n.saturating_sub(floor_log(q, d as u64) as usize).max(1) };
    let mut out = DivisorSearch {
        divisors: Vec::new(),
        m_min,
        coeff_degree_bound: tb,
        candidates_examined: 0,
        closure_divisors_possible,
    };
    if tb == 0 || n < 2 {
        return Ok(out);
    }
    // All polynomials of t-degree ≤ tb, in lexicographic order of their coefficient vectors.
    let per = q.pow(tb as u32 + 1);
    let all_coeffs: Vec<Poly> = (0..per)
        .map(|mut code| {
            let v: Vec<Fe> = (0..=tb)
                .map(|_| {
                    let c = Fe((code % q) as u32);
                    code /= q;
                    c
                })
                .collect();
            Poly::from_coeffs(v)
        })
        .collect();
    let a0 = f.coeff(0);
    let b0_choices: Vec<&Poly> =
        all_coeffs.iter().filter(|b| !b.is_zero() && b.divides(&a0, k)).collect();
    for m in m_min..n {
        let space = (b0_choices.len() as u128) * (per as u128).pow(m as u32 - 1);
        if space > DIVISOR_SEARCH_CAP {
            return Err(Error::SearchTooLarge(format!("{space} candidates at m = {m}")));
        }
        let mut idx = vec![0usize; m];
        'outer: loop {
            let mut coeffs: Vec<Poly> = Vec::with_capacity(m + 1);
            coeffs.push(b0_choices[idx[0]].clone());
            for &i in &idx[1..] {
                coeffs.push(all_coeffs[i].clone());
            }
            coeffs.push(Poly::one());
            let g = AdditivePoly::new(q, coeffs);
            out.candidates_examined += 1;
            if g.deg_t() >= 1 && f.right_divide(&g, k)?.is_some() {
                out.divisors.push(g);
            }
            // advance the odometer, last position fastest
            let mut pos = m;
            loop {
                if pos == 0 {
                    break 'outer;
                }
                pos -= 1;
                idx[pos] += 1;
                let limit = if pos == 0 { b0_choices.len() } else { all_coeffs.len() };
                if idx[pos] < limit {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
    out.divisors.sort_by(|a, b| a.n().cmp(&b.n()).then_with(|| a.coeffs.cmp(&b.coeffs)));
    Ok(out)
}

/// Checks `deg_t f ≥ q^{n-m} deg_t g` for a monic separable divisor `g` of `f`.
pub fn check_height_inequality(f: &AdditivePoly, g: &AdditivePoly, k: &Field) -> Result<bool> {
    for p in [f, g] {
        if !p.is_monic() {
            return Err(Error::NotMonic);
        }
        if !p.is_separable() {
            return Err(Error::NotSeparable);
        }
    }
    if f.right_divide(g, k)?.is_none() {
        return Err(Error::NotDivisible);
    }
    let (n, m) = (f.n(), g.n());
    let factor = checked_pow(f.q, (n - m) as u32).map(|v| v as u128).unwrap_or(u128::MAX);
    Ok(f.deg_t() as u128 >= factor.saturating_mul(g.deg_t() as u128))
}
