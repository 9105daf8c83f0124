//! Factorization over finite fields: squarefree decomposition, distinct-degree
//! and equal-degree (Cantor–Zassenhaus) splitting, Rabin's irreducibility test,
//! and the count of monic irreducibles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::poly::Poly;
use crate::util::{divisors, mobius, prime_factors};

/// Multiset of `(degree, multiplicity)` pairs, sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FactorizationType(pub Vec<(usize, usize)>);

impl FactorizationType {
    pub fn from_pairs(mut v: Vec<(usize, usize)>) -> Self {
        v.sort_unstable();
        FactorizationType(v)
    }

    /// Type of a squarefree polynomial with the given factor degrees.
    pub fn squarefree(degrees: &[usize]) -> Self {
        Self::from_pairs(degrees.iter().map(|&d| (d, 1)).collect())
    }

    pub fn total_degree(&self) -> usize {
        self.0.iter().map(|(d, m)| d * m).sum()
    }

    pub fn is_squarefree(&self) -> bool {
        self.0.iter().all(|&(_, m)| m == 1)
    }

    pub fn is_irreducible(&self) -> bool {
        self.0.len() == 1 && self.0[0].1 == 1
    }

    /// Sum of two types (the type of a product of coprime polynomials).
    pub fn merge(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self::from_pairs(v)
    }
}

/// `c^{1/p}` in a field of characteristic `p`.
fn pth_root(k: &Field, c: Fe) -> Fe {
    k.pow(c, k.order() / k.characteristic() as u64)
}

/// Squarefree decomposition of a nonzero polynomial into monic, pairwise coprime
/// squarefree parts with multiplicities. Constants yield an empty list.
pub fn squarefree_decomposition(k: &Field, f: &Poly) -> Result<Vec<(Poly, usize)>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let f = f.monic(k);
    let mut out = Vec::new();
    if f.is_constant() {
        return Ok(out);
    }
    let p = k.characteristic() as usize;
    let mut c = f.gcd(&f.derivative(k), k)?;
    let mut w = f.exact_div(&c, k)?;
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c, k)?;
        let fac = w.exact_div(&y, k)?;
        if !fac.is_constant() {
            out.push((fac, i));
        }
        w = y;
        c = c.exact_div(&w, k)?;
        i += 1;
    }
    if !c.is_one() {
        // c is a polynomial in X^p.
        let root = Poly::from_coeffs(
            c.coeffs().iter().step_by(p).map(|&a| pth_root(k, a)).collect(),
        );
        for (g, m) in squarefree_decomposition(k, &root)? {
            out.push((g, m * p));
        }
    }
    Ok(out)
}

/// Distinct-degree factorization of a monic squarefree polynomial:
/// pairs `(g_d, d)` where `g_d` is the product of all degree-`d` irreducible factors.
pub fn distinct_degree(k: &Field, f: &Poly) -> Result<Vec<(Poly, usize)>> {
    let q = k.order();
    let mut rest = f.monic(k);
    let mut out = Vec::new();
    let mut h = Poly::x().rem(&rest, k)?;
    let mut d = 1;
    while rest.deg0() >= 2 * d {
        h = h.pow_mod(q, &rest, k)?;
        let g = rest.gcd(&h.sub(&Poly::x(), k), k)?;
        if !g.is_one() {
            rest = rest.exact_div(&g, k)?;
            h = h.rem(&rest, k)?;
            out.push((g, d));
        }
        d += 1;
    }
    if !rest.is_constant() {
        let deg = rest.deg0();
        out.push((rest, deg));
    }
    Ok(out)
}

/// Split a monic product of distinct irreducibles, all of degree `d`.
pub fn equal_degree(k: &Field, f: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Poly>> {
    let n = f.deg0();
    if d == 0 || n % d != 0 {
        return Err(Error::InvalidArgument(format!("degree {n} is not a multiple of {d}")));
    }
    let count = n / d;
    let mut parts = vec![f.monic(k)];
    let q = k.order();
    while parts.len() < count {
        let a = Poly::from_coeffs((0..n).map(|_| Fe(rng.gen_range(0..q) as u32)).collect());
        if a.is_constant() {
            continue;
        }
        let b = splitting_element(k, &a, f, d)?;
        let mut next = Vec::with_capacity(parts.len() + 1);
        for u in parts {
            if u.deg0() == d {
                next.push(u);
                continue;
            }
            let g = u.gcd(&b.rem(&u, k)?, k)?;
            if g.is_constant() || g.deg0() == u.deg0() {
                next.push(u);
            } else {
                let other = u.exact_div(&g, k)?;
                next.push(g);
                next.push(other);
            }
        }
        parts = next;
    }
    parts.sort();
    Ok(parts)
}

/// For odd `Q`: `a^{(Q^d-1)/2} - 1`; for even `Q`: the absolute trace `Σ a^{2^i}`,
/// `0 ≤ i < d·log_2 Q`. Both reduced modulo `f`.
fn splitting_element(k: &Field, a: &Poly, f: &Poly, d: usize) -> Result<Poly> {
    let q = k.order();
    if k.characteristic() == 2 {
        let steps = d * k.degree() as usize;
        let mut x = a.rem(f, k)?;
        let mut acc = x.clone();
        for _ in 1..steps {
            x = x.mul_mod(&x, f, k)?;
            acc = acc.add(&x, k);
        }
        Ok(acc)
    } else {
        // a^{1+Q+...+Q^{d-1}} then raise to (Q-1)/2.
        let mut x = a.rem(f, k)?;
        let mut acc = x.clone();
        for _ in 1..d {
            x = x.pow_mod(q, f, k)?;
            acc = acc.mul_mod(&x, f, k)?;
        }
        let b = acc.pow_mod((q - 1) / 2, f, k)?;
        Ok(b.sub(&Poly::one(), k))
    }
}

/// Full factorization into monic irreducibles with multiplicities, sorted.
/// The leading coefficient is dropped. Randomness comes from `seed` only.
pub fn factor(k: &Field, f: &Poly, seed: u64) -> Result<Vec<(Poly, usize)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (part, m) in squarefree_decomposition(k, f)? {
        for (g, d) in distinct_degree(k, &part)? {
            for h in equal_degree(k, &g, d, &mut rng)? {
                out.push((h, m));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Factor degrees and multiplicities, from squarefree and distinct-degree
/// decomposition alone (no randomness needed).
pub fn factorization_type(k: &Field, f: &Poly) -> Result<FactorizationType> {
    let mut v = Vec::new();
    for (part, m) in squarefree_decomposition(k, f)? {
        for (g, d) in distinct_degree(k, &part)? {
            for _ in 0..g.deg0() / d {
                v.push((d, m));
            }
        }
    }
    Ok(FactorizationType::from_pairs(v))
}

/// Rabin's test. Errors on zero or constant input.
pub fn is_irreducible(k: &Field, f: &Poly) -> Result<bool> {
    let n = f.degree().ok_or(Error::ZeroPolynomial)?;
    if n == 0 {
        return Err(Error::ConstantPolynomial);
    }
    if n == 1 {
        return Ok(true);
    }
    let f = f.monic(k);
    let q = k.order();
    let x = Poly::x();
    // powers[i] = X^{q^i} mod f
    let mut powers = vec![x.rem(&f, k)?];
    for i in 1..=n {
        let next = powers[i - 1].pow_mod(q, &f, k)?;
        powers.push(next);
    }
    if powers[n] != x.rem(&f, k)? {
        return Ok(false);
    }
    for l in prime_factors(n as u64) {
        let g = f.gcd(&powers[n / l as usize].sub(&x, k), k)?;
        if !g.is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `f` is squarefree (nonzero input).
pub fn is_squarefree(k: &Field, f: &Poly) -> Result<bool> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(f.gcd(&f.derivative(k), k)?.is_one())
}

/// Number of monic irreducible polynomials of degree `d` over `F_q`.
pub fn count_irreducibles(q: u64, d: u32) -> Result<u128> {
    if d < 1 {
        return Err(Error::InvalidArgument("degree must be at least 1".into()));
    }
    let q = q as i128;
    let mut s: i128 = 0;
    for e in divisors(d as u64) {
        let mu = mobius(e) as i128;
        if mu != 0 {
            s += mu * q.pow(d / e as u32);
        }
    }
    Ok((s / d as i128) as u128)
}
