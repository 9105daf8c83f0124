//! The predicted Galois group `Γ_{n,h,c,k} ≤ GL_n(q)`.
//!
//! With `h` the t-content of `f` (additive degree `η`), `D` the companion matrix
//! of `h̃`, and `a_0 = c·u^k`, the group consists of the block upper-triangular
//! matrices `(D^i A; 0 B)` with `B ∈ GL_{n-η}(q)` and
//! `det B ∈ μ^i · F_q^{×k}`, where `μ = (-1)^{n-η} c / h_0`.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::additive::{con_t_additive, AdditivePoly};
use crate::error::{Error, Result};
use crate::factor::factor;
use crate::field::{in_power_coset, Fe, Field};
use crate::frobenius::companion_matrix;
use crate::matrix::Matrix;
use crate::poly::Poly;
use crate::util::{gcd_u64, lcm_u64};

/// Seed for the equal-degree splitting used when factoring `a_0`.
const FACTOR_SEED: u64 = 0x5eed;

#[derive(Clone, Debug, Serialize)]
pub struct GammaParams {
    pub q: u64,
    pub n: usize,
    /// Monic separable additive polynomial over `F_q`.
    pub h: AdditivePoly,
    pub eta: usize,
    /// Companion matrix of `h̃`.
    pub d: Matrix,
    pub c: Fe,
    pub k: u64,
    /// Present iff `k ≥ 1`.
    pub u: Option<Poly>,
    /// `h_0 = h̃(0)`.
    pub h0: Fe,
    /// `μ = (-1)^{n-η} c / h_0`.
    pub multiplier: Fe,
    /// Order of `D` in `GL_η(q)`.
    pub ord_d: u64,
    /// Order of `[μ]` in `F_q^× / F_q^{×k}`.
    pub ord_coset: u64,
    /// `lcm(ord_d, ord_coset)`: the index `i` only matters modulo this.
    pub period: u64,
    #[serde(skip)]
    d_powers: Vec<Matrix>,
    #[serde(skip)]
    d_charpolys: Vec<Poly>,
}

impl GammaParams {
    pub fn new(
        field: &Field,
        n: usize,
        h: AdditivePoly,
        c: Fe,
        k: u64,
        u: Option<Poly>,
    ) -> Result<GammaParams> {
        let q = field.order();
        if h.q != q {
            return Err(Error::ContextMismatch);
        }
        if !h.is_monic() || !h.is_ground() {
            return Err(Error::InvalidArgument("h must be monic over F_q".into()));
        }
        if !h.is_separable() {
            return Err(Error::NotSeparable);
        }
        let eta = h.n();
        if eta > n {
            return Err(Error::InvalidArgument(format!("eta = {eta} exceeds n = {n}")));
        }
        if c.is_zero() {
            return Err(Error::InvalidArgument("c must be nonzero".into()));
        }
        let ht = h.tilde()?;
        let h0 = ht.coeff(0);
        let d = companion_matrix(&ht, field)?;
        let cap = q.checked_pow(eta as u32).unwrap_or(u64::MAX).max(2);
        let ord_d = d.order(field, cap).ok_or(Error::Internal("companion matrix order".into()))?;
        let sign = if (n - eta) % 2 == 1 { field.neg(Fe::ONE) } else { Fe::ONE };
        let multiplier = field.mul(sign, field.div(c, h0));
        let g = gcd_u64(k, q - 1);
        let ord_coset = (1..=g)
            .find(|&j| in_power_coset(field, field.pow(multiplier, j), Fe::ONE, 0, k).unwrap())
            .unwrap_or(g);
        let period = lcm_u64(ord_d, ord_coset);
        let mut d_powers = Vec::with_capacity(ord_d as usize);
        let mut x = Matrix::identity(eta);
        for _ in 0..ord_d {
            d_powers.push(x.clone());
            x = x.mul(&d, field);
        }
        let d_charpolys = d_powers.iter().map(|m| m.charpoly(field)).collect();
        Ok(GammaParams {
            q,
            n,
            h,
            eta,
            d,
            c,
            k,
            u,
            h0,
            multiplier,
            ord_d,
            ord_coset,
            period,
            d_powers,
            d_charpolys,
        })
    }

    /// `D^i`.
    pub fn d_power(&self, i: u64) -> &Matrix {
        &self.d_powers[(i % self.ord_d) as usize]
    }

    /// Characteristic polynomial of `D^i`.
    pub fn d_charpoly(&self, i: u64) -> &Poly {
        &self.d_charpolys[(i % self.ord_d) as usize]
    }
}

/// Split `a_0 = c·u^k` with `u` monic and `k` maximal; `k = 0` for constant `a_0`.
pub fn decompose_a0(a0: &Poly, field: &Field) -> Result<(Fe, u64, Option<Poly>)> {
    if a0.is_zero() {
        return Err(Error::NotSeparable);
    }
    let c = a0.lead();
    if a0.is_constant() {
        return Ok((c, 0, None));
    }
    let fs = factor(field, a0, FACTOR_SEED)?;
    let k = fs.iter().fold(0u64, |g, (_, e)| gcd_u64(g, *e as u64));
    let u = fs
        .iter()
        .fold(Poly::one(), |acc, (p, e)| acc.mul(&p.pow(*e as u64 / k, field), field));
    Ok((c, k, Some(u)))
}

/// Whether `u` is `v^l` for some `l ≥ 2` (up to a unit).
pub fn is_proper_power(u: &Poly, field: &Field) -> Result<bool> {
    if u.is_constant() {
        return Ok(false);
    }
    let fs = factor(field, u, FACTOR_SEED)?;
    Ok(fs.iter().fold(0u64, |g, (_, e)| gcd_u64(g, *e as u64)) >= 2)
}

/// The data `(h, η, c, k, u)` of a monic separable `f ∈ F_q[t][X]`.
pub fn extract_params(f: &AdditivePoly, field: &Field) -> Result<GammaParams> {
    if !f.is_separable() {
        return Err(Error::NotSeparable);
    }
    if !f.is_monic() {
        return Err(Error::NotMonic);
    }
    let h = con_t_additive(f, field)?;
    let (c, k, u) = decompose_a0(&f.coeff(0), field)?;
    GammaParams::new(field, f.n(), h, c, k, u)
}

/// Membership of an `n × n` matrix over `F_q` in `Γ`.
pub fn gamma_contains(params: &GammaParams, m: &Matrix, field: &Field) -> Result<bool> {
    let (n, eta) = (params.n, params.eta);
    if m.dim() != n {
        return Err(Error::DimensionMismatch(format!("expected {n}×{n}, got {0}×{0}", m.dim())));
    }
    if m.block(eta, 0, n - eta, eta).iter().any(|x| !x.is_zero()) {
        return Ok(false);
    }
    let top = m.square_block(0, eta);
    let det_b = m.square_block(eta, n - eta).det(field);
    if det_b.is_zero() {
        return Ok(false);
    }
    for i in 0..params.period {
        if *params.d_power(i) == top
            && in_power_coset(field, det_b, params.multiplier, i as i64, params.k)?
        {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `|GL_m(q)|`.
pub fn gl_order(q: u64, m: usize) -> u128 {
    let qm = (q as u128).pow(m as u32);
    (0..m as u32).map(|i| qm - (q as u128).pow(i)).product()
}

/// `|Γ|`.
pub fn gamma_order(params: &GammaParams) -> u128 {
    let (n, eta, q) = (params.n, params.eta, params.q);
    if n == eta {
        // B is empty with determinant 1, so i must be a multiple of ord_coset.
        return (params.ord_d / gcd_u64(params.ord_d, params.ord_coset)) as u128;
    }
    let g = gcd_u64(params.k, q - 1) as u128;
    params.period as u128
        * (q as u128).pow((eta * (n - eta)) as u32)
        * gl_order(q, n - eta)
        / g
}

/// Whether some element of `Γ` has characteristic polynomial `p`.
pub fn is_charpoly_of_gamma(params: &GammaParams, p: &Poly, field: &Field) -> Result<bool> {
    if !p.is_monic() || p.deg0() != params.n {
        return Ok(false);
    }
    let sign_odd = (params.n - params.eta) % 2 == 1;
    for i in 0..params.period {
        let cp = params.d_charpoly(i);
        let (p2, rem) = p.div_rem(cp, field)?;
        if !rem.is_zero() {
            continue;
        }
        let c0 = p2.coeff(0);
        if c0.is_zero() {
            continue;
        }
        let det_b = if sign_odd { field.neg(c0) } else { c0 };
        if in_power_coset(field, det_b, params.multiplier, i as i64, params.k)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// A subgroup of `Z_m × F_q^×`, stored as its sorted element list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaImage {
    pub m: u64,
    pub generators: Vec<(u64, Fe)>,
    pub elements: Vec<(u64, Fe)>,
}

impl DeltaImage {
    /// Subgroup generated by `generators`.
    pub fn generated(m: u64, generators: Vec<(u64, Fe)>, field: &Field) -> DeltaImage {
        let mut seen: BTreeSet<(u64, Fe)> = BTreeSet::new();
        let start = (0u64, Fe::ONE);
        seen.insert(start);
        let mut queue = VecDeque::from([start]);
        while let Some((r, s)) = queue.pop_front() {
            for &(gr, gs) in &generators {
                let next = ((r + gr) % m, field.mul(s, gs));
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        DeltaImage { m, generators, elements: seen.into_iter().collect() }
    }

    pub fn contains(&self, pair: (u64, Fe)) -> bool {
        self.elements.binary_search(&pair).is_ok()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// The subgroup generated by `(1, μ)` and `{(0, x^k)}`.
pub fn predicted_delta_image(params: &GammaParams, field: &Field) -> DeltaImage {
    let m = params.ord_d;
    let mut gens = vec![(1 % m, params.multiplier)];
    let mut powers: BTreeSet<Fe> = BTreeSet::new();
    if params.k > 0 {
        for x in 1..field.order() as u32 {
            powers.insert(field.pow(Fe(x), params.k));
        }
    }
    gens.extend(powers.into_iter().filter(|&s| s != Fe::ONE).map(|s| (0, s)));
    DeltaImage::generated(m, gens, field)
}
