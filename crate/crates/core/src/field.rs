//! Exact arithmetic in `F_{p^e}` and in extension towers `F_q ⊂ F_{q^r}`.
//!
//! Elements are stored as [`Fe`], the integer `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`
//! of their residue coefficients modulo the defining polynomial. Every field
//! carries discrete-log tables, so multiplication, inversion and powering are
//! table lookups. Addition is XOR in characteristic 2, plain modular addition
//! for prime fields, and a Zech-logarithm lookup otherwise.
//!
//! Field orders are limited to [`MAX_FIELD_ORDER`].

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::{is_prime, mod_pow_u64, prime_factors};

/// Largest supported field order (`p^e`). Tables cost about 16 bytes per element.
pub const MAX_FIELD_ORDER: u64 = 1 << 22;

const NO_LOG: u32 = u32::MAX;

/// A field element, encoded as `Σ c_i p^i` over its residue coefficients.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Serializable descriptor of a field: `{"p":2,"e":2,"modulus":[1,1,1]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub e: u32,
    /// Monic modulus, coefficients low-to-high (length `e + 1`).
    pub modulus: Vec<u32>,
}

/// The finite field `F_p[Y]/(m(Y))` with `m` monic irreducible of degree `e`.
pub struct Field {
    p: u32,
    e: u32,
    order: u32,
    modulus: Vec<u32>,
    /// `exp[i] = g^i` for `i < 2(order - 1)`.
    exp: Vec<u32>,
    log: Vec<u32>,
    /// `zech[n] = log(1 + g^n)`, only for odd `p` with `e > 1`.
    zech: Vec<u32>,
    neg: Vec<u32>,
    pow_p: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for Field {}

impl Field {
    /// `F_{p^e}` with the canonical modulus: the lexicographically smallest
    /// monic irreducible of degree `e`, coefficients compared from `c_0` upward.
    pub fn new(p: u32, e: u32) -> Result<Arc<Field>> {
        check_order(p, e)?;
        let modulus = canonical_modulus(p, e)?;
        Ok(Arc::new(Self::build(p, e, modulus)))
    }

    /// The field of order `q`, which must be a prime power.
    pub fn of_order(q: u64) -> Result<Arc<Field>> {
        let (p, e) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Self::new(p, e)
    }

    /// `F_p[Y]/(modulus)`; the modulus must be monic and irreducible.
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Arc<Field>> {
        if modulus.len() < 2 {
            return Err(Error::InvalidModulus("degree must be at least 1".into()));
        }
        let e = (modulus.len() - 1) as u32;
        check_order(p, e)?;
        if *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidModulus("modulus must be monic".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidModulus("coefficient out of range".into()));
        }
        if !is_irreducible_over_prime(p, &modulus) {
            return Err(Error::InvalidModulus("modulus is reducible".into()));
        }
        Ok(Arc::new(Self::build(p, e, modulus)))
    }

    pub fn from_descriptor(d: &FieldDescriptor) -> Result<Arc<Field>> {
        let f = Self::with_modulus(d.p, d.modulus.clone())?;
        if f.e != d.e {
            return Err(Error::InvalidModulus("degree does not match e".into()));
        }
        Ok(f)
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor { p: self.p, e: self.e, modulus: self.modulus.clone() }
    }

    fn build(p: u32, e: u32, modulus: Vec<u32>) -> Field {
        let order = p.pow(e);
        let slow = SlowArith { p, e: e as usize, modulus: &modulus };
        let gen = slow.primitive_element(order);
        let m1 = (order - 1) as usize;
        let mut exp = vec![0u32; 2 * m1.max(1)];
        let mut log = vec![NO_LOG; order as usize];
        let mut x = 1u32;
        for i in 0..m1 {
            exp[i] = x;
            log[x as usize] = i as u32;
            x = slow.mul(x, gen);
        }
        for i in m1..exp.len() {
            exp[i] = exp[i - m1];
        }
        let neg: Vec<u32> = (0..order).map(|a| slow.neg(a)).collect();
        let zech = if p != 2 && e > 1 {
            (0..m1)
                .map(|n| {
                    let s = slow.add(1, exp[n]);
                    if s == 0 {
                        NO_LOG
                    } else {
                        log[s as usize]
                    }
                })
                .collect()
        } else {
            Vec::new()
        };
        let pow_p: Vec<u32> = (0..e).map(|i| p.pow(i)).collect();
        Field { p, e, order, modulus, exp, log, zech, neg, pow_p }
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.e
    }

    /// Number of elements `p^e`.
    #[inline]
    pub fn order(&self) -> u64 {
        self.order as u64
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The embedded prime-field element `c mod p`.
    #[inline]
    pub fn from_int(&self, c: i64) -> Fe {
        Fe(c.rem_euclid(self.p as i64) as u32)
    }

    /// Element with residue coefficients `coeffs` (low-to-high, at most `e` of them).
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Fe> {
        if coeffs.len() > self.e as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidElement(format!("{coeffs:?} in F_{}", self.order)));
        }
        Ok(Fe(coeffs.iter().zip(&self.pow_p).map(|(c, w)| c * w).sum()))
    }

    /// Parse the integer encoding, checking range.
    pub fn element(&self, raw: u64) -> Result<Fe> {
        if raw >= self.order as u64 {
            return Err(Error::InvalidElement(format!("{raw} in F_{}", self.order)));
        }
        Ok(Fe(raw as u32))
    }

    /// Residue coefficients of `a`, always exactly `e` of them.
    pub fn coeffs(&self, a: Fe) -> Vec<u32> {
        let mut x = a.0;
        (0..self.e)
            .map(|_| {
                let d = x % self.p;
                x /= self.p;
                d
            })
            .collect()
    }

    /// Canonical total order: lexicographic on the coefficient vector, `c_0` first.
    pub fn cmp_canonical(&self, a: Fe, b: Fe) -> Ordering {
        let (mut x, mut y) = (a.0, b.0);
        for _ in 0..self.e {
            let o = (x % self.p).cmp(&(y % self.p));
            if o != Ordering::Equal {
                return o;
            }
            x /= self.p;
            y /= self.p;
        }
        Ordering::Equal
    }

    /// All elements sorted by the canonical order.
    pub fn elements_canonical(&self) -> Vec<Fe> {
        let mut v: Vec<Fe> = (0..self.order).map(Fe).collect();
        v.sort_by(|a, b| self.cmp_canonical(*a, *b));
        v
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        if self.e == 1 {
            let s = a.0 + b.0;
            return Fe(if s >= self.p { s - self.p } else { s });
        }
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let m1 = self.order - 1;
        let i = self.log[a.0 as usize];
        let j = self.log[b.0 as usize];
        let d = if j >= i { j - i } else { j + m1 - i };
        let z = self.zech[d as usize];
        if z == NO_LOG {
            Fe::ZERO
        } else {
            Fe(self.exp[(i + z) as usize])
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        Fe(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    #[inline]
    pub fn inv(&self, a: Fe) -> Option<Fe> {
        if a.0 == 0 {
            return None;
        }
        let l = self.log[a.0 as usize];
        let m1 = self.order - 1;
        Some(Fe(self.exp[((m1 - l) % m1.max(1)) as usize]))
    }

    /// `a / b`; panics on division by zero.
    #[inline]
    pub fn div(&self, a: Fe, b: Fe) -> Fe {
        self.mul(a, self.inv(b).expect("division by zero in finite field"))
    }

    pub fn pow(&self, a: Fe, n: u64) -> Fe {
        if n == 0 {
            return Fe::ONE;
        }
        if a.0 == 0 {
            return Fe::ZERO;
        }
        let m1 = (self.order - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        Fe(self.exp[((l as u128 * (n % m1) as u128) % m1 as u128) as usize])
    }

    /// `a^n` for a possibly negative exponent; `a` must be nonzero when `n < 0`.
    pub fn pow_signed(&self, a: Fe, n: i64) -> Fe {
        if n >= 0 {
            self.pow(a, n as u64)
        } else {
            let inv = self.inv(a).expect("negative power of zero");
            self.pow(inv, n.unsigned_abs())
        }
    }

    /// Discrete logarithm to the table generator; `None` for zero.
    #[inline]
    pub fn log(&self, a: Fe) -> Option<u32> {
        if a.0 == 0 {
            None
        } else {
            Some(self.log[a.0 as usize])
        }
    }

    /// `g^i` for the table generator `g`.
    #[inline]
    pub fn exp(&self, i: u64) -> Fe {
        Fe(self.exp[(i % (self.order as u64 - 1).max(1)) as usize])
    }

    /// The generator used by the log tables.
    pub fn primitive_element(&self) -> Fe {
        self.exp(1)
    }

    /// `x^{s^i}` for an arbitrary integer `s` (typically the order of a subfield).
    pub fn frobenius(&self, a: Fe, s: u64, i: u32) -> Fe {
        if a.0 == 0 || i == 0 {
            return a;
        }
        let m1 = self.order as u64 - 1;
        if m1 == 0 {
            return a;
        }
        let exp = mod_pow_u64(s % m1, i as u64, m1);
        let exp = if exp == 0 { m1 } else { exp };
        self.pow(a, exp)
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: Fe) -> Option<u64> {
        let l = self.log(a)? as u64;
        let m1 = self.order as u64 - 1;
        Some(m1 / crate::util::gcd_u64(l, m1))
    }

    /// Whether `a` lies in the subfield of order `p^s` (`s` must divide `e`).
    pub fn in_subfield(&self, a: Fe, s: u32) -> bool {
        match self.log(a) {
            None => true,
            Some(l) => {
                let sub = (self.p as u64).pow(s) - 1;
                let m1 = self.order as u64 - 1;
                (l as u64) % (m1 / sub) == 0
            }
        }
    }
}

/// Whether `s ∈ base^i · F_q^{×k}`, where `F_q^{×0} = {1}`.
///
/// Decided as `(s·base^{-i})^{(q-1)/g} = 1` with `g = gcd(k, q-1)`.
pub fn in_power_coset(k: &Field, s: Fe, base: Fe, i: i64, kpow: u64) -> Result<bool> {
    if s.is_zero() || base.is_zero() {
        return Err(Error::InvalidElement("power coset test needs nonzero elements".into()));
    }
    let m1 = k.order() - 1;
    let g = crate::util::gcd_u64(kpow, m1);
    let x = k.mul(s, k.pow_signed(base, -i));
    Ok(k.pow(x, m1 / g) == Fe::ONE)
}

fn check_order(p: u32, e: u32) -> Result<()> {
    if !is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    if e == 0 {
        return Err(Error::InvalidModulus("extension degree must be at least 1".into()));
    }
    let mut q: u64 = 1;
    for _ in 0..e {
        q = q.saturating_mul(p as u64);
        if q > MAX_FIELD_ORDER {
            return Err(Error::FieldTooLarge(q));
        }
    }
    Ok(())
}

/// Decompose `q = p^e`.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let primes = prime_factors(q);
    if primes.len() != 1 {
        return None;
    }
    let p = primes[0];
    let mut e = 0;
    let mut x = q;
    while x % p == 0 {
        x /= p;
        e += 1;
    }
    Some((p as u32, e))
}

/// Arithmetic on raw residue vectors, used only while building tables.
struct SlowArith<'a> {
    p: u32,
    e: usize,
    modulus: &'a [u32],
}

impl SlowArith<'_> {
    fn digits(&self, mut a: u32) -> Vec<u32> {
        (0..self.e)
            .map(|_| {
                let d = a % self.p;
                a /= self.p;
                d
            })
            .collect()
    }

    fn undigits(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (self.digits(a), self.digits(b));
        let s: Vec<u32> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        self.undigits(&s)
    }

    fn neg(&self, a: u32) -> u32 {
        let s: Vec<u32> = self.digits(a).iter().map(|&u| (self.p - u) % self.p).collect();
        self.undigits(&s)
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let (x, y) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; 2 * self.e];
        for (i, &u) in x.iter().enumerate() {
            for (j, &v) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u as u64 * v as u64) % p;
            }
        }
        for deg in (self.e..prod.len()).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for (k, &m) in self.modulus[..self.e].iter().enumerate() {
                let idx = deg - self.e + k;
                prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
            }
        }
        let d: Vec<u32> = prod[..self.e].iter().map(|&c| c as u32).collect();
        self.undigits(&d)
    }

    fn pow(&self, mut a: u32, mut n: u64) -> u32 {
        let mut r = 1u32;
        while n > 0 {
            if n & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            n >>= 1;
        }
        r
    }

    fn primitive_element(&self, order: u32) -> u32 {
        let m1 = (order - 1) as u64;
        if m1 <= 1 {
            return 1;
        }
        let primes = prime_factors(m1);
        (2..order)
            .find(|&g| primes.iter().all(|&l| self.pow(g, m1 / l) != 1))
            .expect("multiplicative group of a finite field is cyclic")
    }
}

/// Rabin irreducibility test over the prime field, on raw coefficient vectors.
fn is_irreducible_over_prime(p: u32, modulus: &[u32]) -> bool {
    let fp = Field::build(p, 1, vec![0, 1]);
    let poly = crate::poly::Poly::from_coeffs(modulus.iter().map(|&c| Fe(c)).collect());
    crate::factor::is_irreducible(&fp, &poly).unwrap_or(false)
}

fn canonical_modulus(p: u32, e: u32) -> Result<Vec<u32>> {
    if e == 1 {
        return Ok(vec![0, 1]);
    }
    // Counter over (c_0, ..., c_{e-1}) with c_0 most significant.
    let mut c = vec![0u32; e as usize];
    loop {
        let mut m = c.clone();
        m.push(1);
        if m[0] != 0 && is_irreducible_over_prime(p, &m) {
            return Ok(m);
        }
        let mut i = e as usize;
        loop {
            if i == 0 {
                return Err(Error::InvalidModulus("no irreducible found".into()));
            }
            i -= 1;
            c[i] += 1;
            if c[i] < p {
                break;
            }
            c[i] = 0;
        }
    }
}

/// The tower `F_q ⊂ F_{q^r}` with an explicit embedding of the base field.
///
/// For `r ≥ 2` the top field carries its own canonical modulus of degree `e·r`
/// over `F_p`, and the base field is embedded by sending its generator `Y` to
/// the canonically smallest root of the base modulus in the top field. For
/// `r = 1` the top field is the base field itself with the identity embedding.
pub struct Tower {
    base: Arc<Field>,
    top: Arc<Field>,
    r: u32,
    embed: Vec<Fe>,
    descend: HashMap<u32, Fe>,
}

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tower")
            .field("base", &self.base)
            .field("top", &self.top)
            .field("r", &self.r)
            .finish()
    }
}

impl Tower {
    pub fn new(base: Arc<Field>, r: u32) -> Result<Tower> {
        if r == 0 {
            return Err(Error::InvalidModulus("tower degree must be at least 1".into()));
        }
        if r == 1 {
            return Ok(Self::identity(base));
        }
        let top = Field::new(base.characteristic(), base.degree() * r)?;
        Self::with_top(base, top, r)
    }

    /// Tower over an explicitly supplied top field of order `q^r`.
    pub fn with_top(base: Arc<Field>, top: Arc<Field>, r: u32) -> Result<Tower> {
        if top.characteristic() != base.characteristic() || top.degree() != base.degree() * r {
            return Err(Error::ContextMismatch);
        }
        let q = base.order();
        // Roots of the base modulus lie in the copy of F_q: zero and the powers of g^((Q-1)/(q-1)).
        let step = (top.order() - 1) / (q - 1);
        let mut subfield: Vec<Fe> = vec![Fe::ZERO];
        subfield.extend((0..q - 1).map(|i| top.exp(i * step)));
        let modulus = base.modulus();
        let eval = |x: Fe| {
            modulus
                .iter()
                .rev()
                .fold(Fe::ZERO, |acc, &c| top.add(top.mul(acc, x), Fe(c)))
        };
        let root = subfield
            .iter()
            .copied()
            .filter(|&x| eval(x).is_zero())
            .min_by(|a, b| top.cmp_canonical(*a, *b))
            .ok_or(Error::ContextMismatch)?;
        let mut embed = Vec::with_capacity(q as usize);
        let mut descend = HashMap::with_capacity(q as usize);
        for a in 0..q as u32 {
            let img = base
                .coeffs(Fe(a))
                .iter()
                .rev()
                .fold(Fe::ZERO, |acc, &c| top.add(top.mul(acc, root), Fe(c)));
            embed.push(img);
            descend.insert(img.0, Fe(a));
        }
        Ok(Tower { base, top, r, embed, descend })
    }

    fn identity(base: Arc<Field>) -> Tower {
        let embed: Vec<Fe> = (0..base.order() as u32).map(Fe).collect();
        let descend = embed.iter().map(|x| (x.0, *x)).collect();
        Tower { top: base.clone(), base, r: 1, embed, descend }
    }

    pub fn base(&self) -> &Arc<Field> {
        &self.base
    }

    pub fn top(&self) -> &Arc<Field> {
        &self.top
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// Order `q` of the base field.
    pub fn q(&self) -> u64 {
        self.base.order()
    }

    #[inline]
    pub fn embed(&self, a: Fe) -> Fe {
        self.embed[a.0 as usize]
    }

    /// Inverse of the embedding; `None` if `x` is not in the image of `F_q`.
    #[inline]
    pub fn descend(&self, x: Fe) -> Option<Fe> {
        self.descend.get(&x.0).copied()
    }

    /// `x^{q^i}` in the top field.
    pub fn frobenius_power(&self, x: Fe, i: u32) -> Fe {
        self.top.frobenius(x, self.q(), i)
    }

    /// `N_{F_{q^r}/F_q}(x) = x^{(q^r - 1)/(q - 1)}`, as a base field element.
    pub fn norm_to_base(&self, x: Fe) -> Fe {
        self.norm_from_subfield(x, self.r)
    }

    /// Norm from the intermediate field `F_{q^s}` (`s | r`, `x ∈ F_{q^s}`) down to `F_q`.
    pub fn norm_from_subfield(&self, x: Fe, s: u32) -> Fe {
        if x.is_zero() {
            return Fe::ZERO;
        }
        let q = self.q() as u128;
        let exp = (q.pow(s) - 1) / (q - 1);
        let m1 = (self.top.order() - 1) as u128;
        let n = self.top.pow(x, (exp % m1) as u64);
        self.descend(n).expect("norm lands in the base field")
    }

    /// Smallest `s ≥ 1` with `x^{q^s} = x`, i.e. `[F_q(x):F_q]`.
    pub fn degree_over_base(&self, x: Fe) -> u32 {
        let Some(l) = self.top.log(x) else { return 1 };
        let q = self.q();
        let m1 = self.top.order() - 1;
        (1..=self.r)
            .filter(|s| self.r % s == 0)
            .find(|&s| (l as u64) % (m1 / (q.pow(s) - 1)) == 0)
            .unwrap_or(self.r)
    }

    /// One representative (the canonically smallest) of each Frobenius orbit of
    /// elements of exact degree `r` over the base field.
    pub fn orbit_representatives(&self) -> Vec<Fe> {
        let mut reps = Vec::new();
        for x in (0..self.top.order() as u32).map(Fe) {
            if self.degree_over_base(x) != self.r {
                continue;
            }
            let is_min = (1..self.r).all(|i| {
                self.top.cmp_canonical(x, self.frobenius_power(x, i)) == Ordering::Less
            });
            if is_min {
                reps.push(x);
            }
        }
        reps.sort_by(|a, b| self.top.cmp_canonical(*a, *b));
        reps
    }

    /// All elements of exact degree `r` over the base field, canonical order.
    pub fn exact_degree_elements(&self) -> Vec<Fe> {
        let mut v: Vec<Fe> = (0..self.top.order() as u32)
            .map(Fe)
            .filter(|&x| self.degree_over_base(x) == self.r)
            .collect();
        v.sort_by(|a, b| self.top.cmp_canonical(*a, *b));
        v
    }
}
