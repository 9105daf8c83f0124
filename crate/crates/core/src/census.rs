//! Counting characteristic polynomials attached to classes of maximal subgroups of `GL_n(q)`.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::count_irreducibles;
use crate::field::{Fe, Field, Tower};
use crate::matrix::Matrix;
use crate::poly::Poly;
use crate::util::{is_prime, prime_factors};

/// Default cap on the closure size in [`charpoly_set_bruteforce`].
pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;

/// Number of monic degree-`n` polynomials over `F_q` in which every irreducible
/// factor of degree not divisible by `b` has multiplicity divisible by `b`;
/// optionally only those not divisible by `X`.
pub fn count_c3_charpolys(q: u64, n: usize, b: usize, exclude_x_multiples: bool) -> Result<u128> {
    if !is_prime(b as u64) {
        return Err(Error::InvalidArgument(format!("b = {b} is not prime")));
    }
    if n == 0 || n % b != 0 {
        return Err(Error::InvalidArgument(format!("b = {b} does not divide n = {n}")));
    }
    let overflow = || Error::InvalidArgument("count exceeds 128 bits".into());
    // series[j] = coefficient of x^j in the generating function
    let mut series = vec![0u128; n + 1];
    series[0] = 1;
    for d in 1..=n {
        let mut irr = count_irreducibles(q, d as u32)?;
        if d == 1 && exclude_x_multiples {
            irr -= 1;
        }
        let step = if d % b == 0 { d } else { d * b };
        if irr == 0 || step > n {
            continue;
        }
        // (1 - x^step)^{-irr} = Σ_j C(irr + j - 1, j) x^{step·j}
        let terms = n / step;
        let mut binom = vec![1u128; terms + 1];
        for j in 1..=terms {
            let num = binom[j - 1].checked_mul(irr + j as u128 - 1).ok_or_else(overflow)?;
            binom[j] = num / j as u128;
        }
        let mut next = vec![0u128; n + 1];
        for (i, &s) in series.iter().enumerate() {
            if s == 0 {
                continue;
            }
            for (j, &c) in binom.iter().enumerate() {
                let deg = i + j * step;
                if deg > n {
                    break;
                }
                let add = s.checked_mul(c).ok_or_else(overflow)?;
                next[deg] = next[deg].checked_add(add).ok_or_else(overflow)?;
            }
        }
        series = next;
    }
    Ok(series[n])
}

/// Characteristic polynomials of every element of the group generated by `generators`.
pub fn charpoly_set_bruteforce(
    generators: &[Matrix],
    field: &Field,
    cap: usize,
) -> Result<BTreeSet<Poly>> {
    let n = generators.first().map(|g| g.dim()).ok_or(Error::InvalidArgument(
        "at least one generator is required".into(),
    ))?;
    if generators.iter().any(|g| g.dim() != n) {
        return Err(Error::DimensionMismatch("generators differ in size".into()));
    }
    if generators.iter().any(|g| g.det(field).is_zero()) {
        return Err(Error::Singular);
    }
    let id = Matrix::identity(n);
    let mut seen: HashSet<Matrix> = HashSet::new();
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(m) = queue.pop_front() {
        for g in generators {
            let next = m.mul(g, field);
            if seen.insert(next.clone()) {
                if seen.len() > cap {
                    return Err(Error::SearchTooLarge(format!("closure exceeds {cap} elements")));
                }
                queue.push_back(next);
            }
        }
    }
    Ok(seen.iter().map(|m| m.charpoly(field)).collect())
}

/// Regular representation of `F_{q^b}` over `F_q` in the basis `1, θ, …, θ^{b-1}`.
pub struct RegularRep {
    tower: Tower,
    basis: Vec<Fe>,
    coords: Vec<Vec<Fe>>,
}

impl RegularRep {
    pub fn new(base: std::sync::Arc<Field>, b: u32) -> Result<RegularRep> {
        let tower = Tower::new(base, b)?;
        let top = tower.top();
        let theta = (0..top.order() as u32)
            .map(Fe)
            .filter(|&x| tower.degree_over_base(x) == b)
            .min_by(|x, y| top.cmp_canonical(*x, *y))
            .ok_or(Error::Internal("no element of full degree".into()))?;
        let basis: Vec<Fe> = (0..b as u64).map(|i| top.pow(theta, i)).collect();
        let q = tower.q();
        let mut coords = vec![Vec::new(); top.order() as usize];
        for code in 0..q.pow(b) {
            let mut c = code;
            let digits: Vec<Fe> = (0..b)
                .map(|_| {
                    let d = Fe((c % q) as u32);
                    c /= q;
                    d
                })
                .collect();
            let x = digits
                .iter()
                .zip(&basis)
                .fold(Fe::ZERO, |acc, (&d, &e)| top.add(acc, top.mul(tower.embed(d), e)));
            coords[x.0 as usize] = digits;
        }
        Ok(RegularRep { tower, basis, coords })
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    /// Matrix of multiplication by `x`, column `j` holding the coordinates of `x·θ^j`.
    pub fn rep(&self, x: Fe) -> Matrix {
        let b = self.basis.len();
        let top = self.tower.top();
        let mut m = Matrix::zero(b);
        for (j, &e) in self.basis.iter().enumerate() {
            for (i, &c) in self.coords[top.mul(x, e).0 as usize].iter().enumerate() {
                m.set(i, j, c);
            }
        }
        m
    }

    /// Replace each entry of an `m × m` matrix over `F_{q^b}` by its `b × b` block.
    pub fn embed_matrix(&self, m: &Matrix) -> Matrix {
        let b = self.basis.len();
        let n = m.dim() * b;
        let mut out = Matrix::zero(n);
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                let blk = self.rep(m.get(i, j));
                for a in 0..b {
                    for c in 0..b {
                        out.set(i * b + a, j * b + c, blk.get(a, c));
                    }
                }
            }
        }
        out
    }
}

/// Generators of `GL_{n/b}(q^b)` embedded in `GL_n(q)`: `diag(ζ, 1, …)` for a
/// primitive `ζ`, and the elementary matrices `I + λE_ij` for `λ` running over an
/// additive basis of `F_{q^b}`.
pub fn embedded_gl_generators(q: u64, n: usize, b: usize) -> Result<(std::sync::Arc<Field>, Vec<Matrix>)> {
    if b == 0 || n % b != 0 {
        return Err(Error::InvalidArgument(format!("b = {b} does not divide n = {n}")));
    }
    let base = Field::of_order(q)?;
    let reg = RegularRep::new(base.clone(), b as u32)?;
    let top = reg.tower().top().clone();
    let m = n / b;
    let mut gens = Vec::new();
    let mut diag = vec![Fe::ONE; m];
    diag[0] = top.primitive_element();
    gens.push(reg.embed_matrix(&Matrix::diagonal(&diag)));
    let p = top.characteristic();
    let additive_basis: Vec<Fe> = (0..top.degree()).map(|i| Fe(p.pow(i))).collect();
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            for &lam in &additive_basis {
                let mut e = Matrix::identity(m);
                e.set(i, j, lam);
                gens.push(reg.embed_matrix(&e));
            }
        }
    }
    Ok((base, gens))
}

/// Upper bounds on numbers of characteristic polynomials, per class of maximal subgroups.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassBoundReport {
    pub q: u64,
    pub n: usize,
    pub c_universal: f64,
    /// `Σ_{ml = n, l > 1} 28·l·q^m`.
    pub c2: f64,
    /// Exact identity-coset counts `(b, count)` for each prime `b | n`, excluding multiples of `X`.
    pub c3_identity: Vec<(usize, u128)>,
    /// `2·q^{n/2}·#{prime b | n}`.
    pub c3_cosets: f64,
    /// `C·q^{(n+1)/2}·(8n ln n + n ln ln q)`.
    pub c4_c8: f64,
    pub class_s: String,
}

pub fn maximal_class_bound(q: u64, n: usize, c_universal: f64) -> Result<ClassBoundReport> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2".into()));
    }
    let qf = q as f64;
    let nf = n as f64;
    let c2 = (1..n)
        .filter(|m| n % m == 0)
        .map(|m| 28.0 * (n / m) as f64 * qf.powi(m as i32))
        .sum();
    let primes = prime_factors(n as u64);
    let c3_identity = primes
        .iter()
        .map(|&b| Ok((b as usize, count_c3_charpolys(q, n, b as usize, true)?)))
        .collect::<Result<Vec<_>>>()?;
    let c3_cosets = 2.0 * qf.powf(nf / 2.0) * primes.len() as f64;
    let c4_c8 = c_universal * qf.powf((nf + 1.0) / 2.0) * (8.0 * nf * nf.ln() + nf * qf.ln().ln());
    Ok(ClassBoundReport {
        q,
        n,
        c_universal,
        c2,
        c3_identity,
        c3_cosets,
        c4_c8,
        class_s: "not bounded by this artifact".into(),
    })
}

/// Monic reducible polynomials of degree `n` with nonzero constant term.
pub fn count_reducible_charpolys(q: u64, n: usize) -> Result<u128> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let total = (q as u128).pow(n as u32 - 1) * (q as u128 - 1);
    let irreducible_nonzero_constant = count_irreducibles(q, n as u32)? - u128::from(n == 1);
    Ok(total - irreducible_nonzero_constant)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c3_examples() {
        assert_eq!(count_c3_charpolys(2, 2, 2, true).unwrap(), 2);
        assert_eq!(count_c3_charpolys(2, 2, 2, false).unwrap(), 3);
        assert_eq!(count_c3_charpolys(3, 2, 2, true).unwrap(), 5);
        assert!(count_c3_charpolys(2, 3, 2, true).is_err());
        assert!(count_c3_charpolys(2, 4, 4, true).is_err());
    }

    #[test]
    fn bruteforce_examples() {
        let k = Field::new(2, 1).unwrap();
        let set = charpoly_set_bruteforce(&[Matrix::identity(2)], &k, 10).unwrap();
        assert_eq!(set.into_iter().collect::<Vec<_>>(), vec![Poly::from_raw(&[1, 0, 1])]);
        let gens = [
            Matrix::from_raw(&[&[1, 1], &[0, 1]]).unwrap(),
            Matrix::from_raw(&[&[0, 1], &[1, 0]]).unwrap(),
        ];
        let set = charpoly_set_bruteforce(&gens, &k, 10).unwrap();
        assert_eq!(set.len(), 2);
        let k3 = Field::new(3, 1).unwrap();
        let set = charpoly_set_bruteforce(&[Matrix::diagonal(&[Fe(2), Fe(1)])], &k3, 10).unwrap();
        assert_eq!(set.len(), 2);
        assert!(charpoly_set_bruteforce(&gens, &k, 3).is_err());
    }

    #[test]
    fn class_bounds() {
        let r = maximal_class_bound(2, 4, 100.0).unwrap();
        assert_eq!(r.c2, 448.0);
        let r = maximal_class_bound(2, 6, 100.0).unwrap();
        assert_eq!(r.c3_cosets, 32.0);
        let r = maximal_class_bound(3, 5, 100.0).unwrap();
        assert_eq!(r.c2, 28.0 * 5.0 * 3.0);
        assert!(maximal_class_bound(2, 1, 100.0).is_err());
    }

    #[test]
    fn reducible_counts() {
        assert_eq!(count_reducible_charpolys(2, 2).unwrap(), 1);
        assert_eq!(count_reducible_charpolys(2, 1).unwrap(), 0);
        assert_eq!(count_reducible_charpolys(3, 2).unwrap(), 3);
    }
}
