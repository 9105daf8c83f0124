use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{all_polys, sample_additive, trial_rng, ExperimentConfig};
use crate::additive::{con_t_additive, AdditivePoly};
use crate::error::{Error, Result};
use crate::factor::factorization_type;
use crate::field::{Fe, Field};
use crate::poly::Poly;
use crate::stats::Proportion;
use crate::util::checked_pow;

pub const LEMMA_CONSTANT_NOTE: &str =
    "P(con_t f = h | a_0) ~ C q^{-(d+1)eta} with C = (1 - q^{-d}) / (1 - q^{-d-1})";

/// Exact cell probabilities are computed when `q^{n}` is at most this.
const EXACT_LIMIT: u64 = 1 << 16;

/// `C = (1 - q^{-d}) / (1 - q^{-d-1})`.
pub fn lemma_constant(q: u64, d: usize) -> f64 {
    let q = q as f64;
    (1.0 - q.powi(-(d as i32))) / (1.0 - q.powi(-(d as i32) - 1))
}

/// Number of monic separable additive `h` over `F_q` of additive degree `eta`.
pub fn content_class_size(q: u64, eta: usize) -> f64 {
    if eta == 0 {
        1.0
    } else {
        (q - 1) as f64 * (q as f64).powi(eta as i32 - 1)
    }
}

/// Asymptotic probability that the content has additive degree `eta`.
pub fn asymptotic_cell(q: u64, d: usize, eta: usize) -> f64 {
    lemma_constant(q, d) * content_class_size(q, eta) * (q as f64).powi(-(((d + 1) * eta) as i32))
}

/// Möbius sums over monic `D` with `D(0) ≠ 0`: `by_degree[e]` for `e < top` and,
/// at degree `top`, the sum split by the value of `D(0)`.
struct MobiusSums {
    q: u64,
    by_degree: Vec<i64>,
    top_by_constant: Vec<i64>,
}

impl MobiusSums {
    fn new(field: &Field, top: usize) -> Result<MobiusSums> {
        let q = field.order();
        // Π_{P ≠ X} (1 - z^{deg P}) = (1 - qz)/(1 - z)
        let by_degree = (0..top).map(|e| if e == 0 { 1 } else { 1 - q as i64 }).collect();
        let mut top_by_constant = vec![0i64; q as usize];
        if top == 0 {
            top_by_constant[1] = 1;
        } else {
            let count = checked_pow(q, top as u32)
                .filter(|&c| c <= EXACT_LIMIT)
                .ok_or_else(|| Error::SearchTooLarge(format!("q^{top} monic polynomials")))?;
            for code in 0..count {
                let mut c = code;
                let lower: Vec<Fe> = (0..top)
                    .map(|_| {
                        let x = Fe((c % q) as u32);
                        c /= q;
                        x
                    })
                    .collect();
                if lower[0].is_zero() {
                    continue;
                }
                let dpoly = Poly::monic_from_lower(&lower);
                let ty = factorization_type(field, &dpoly)?;
                if ty.is_squarefree() {
                    let sign = if ty.0.len() % 2 == 0 { 1 } else { -1 };
                    top_by_constant[lower[0].0 as usize] += sign;
                }
            }
        }
        Ok(MobiusSums { q, by_degree, top_by_constant })
    }

    /// `#{(T_0, …, T_d) : T_0 monic of degree top, deg T_j < top, T_j(0) = c_j, gcd = 1}`.
    fn coprime_count(&self, c: &[Fe]) -> i128 {
        let top = self.by_degree.len();
        let q = self.q as i128;
        let mut total = 0i128;
        for e in 0..=top {
            let rest: i128 = c[1..]
                .iter()
                .map(|cj| if e < top { q.pow((top - 1 - e) as u32) } else { i128::from(cj.is_zero()) })
                .product();
            if e < top {
                total += self.by_degree[e] as i128 * q.pow((top - e - 1) as u32) * rest;
            } else if !c[0].is_zero() {
                total += self.top_by_constant[c[0].0 as usize] as i128 * rest;
            }
        }
        total
    }
}

/// Exact number of `f` with the given `a_0`, remaining coefficients in `F_q[t]_{≤d}`,
/// and `con_t f = h`, by Möbius inversion over the common divisor of the cofactors.
pub fn exact_family_count(
    field: &Field,
    d: usize,
    n: usize,
    h: &AdditivePoly,
    a0: &Poly,
) -> Result<u128> {
    let sums = family_sums(field, n, h)?;
    family_count_with(&sums, field, d, h, a0)
}

fn family_sums(field: &Field, n: usize, h: &AdditivePoly) -> Result<MobiusSums> {
    if !h.is_monic() || !h.is_separable() || !h.is_ground() {
        return Err(Error::InvalidArgument("h must be monic separable over F_q".into()));
    }
    if h.n() > n {
        return Err(Error::InvalidArgument("deg h exceeds n".into()));
    }
    MobiusSums::new(field, n - h.n())
}

fn family_count_with(
    sums: &MobiusSums,
    field: &Field,
    d: usize,
    h: &AdditivePoly,
    a0: &Poly,
) -> Result<u128> {
    if a0.is_zero() {
        return Err(Error::NotSeparable);
    }
    if a0.deg0() > d {
        return Err(Error::InvalidArgument("deg a_0 exceeds d".into()));
    }
    let h0 = h.coeff(0).coeff(0);
    let c: Vec<Fe> = (0..=d).map(|j| field.div(a0.coeff(j), h0)).collect();
    let v = sums.coprime_count(&c);
    u128::try_from(v).map_err(|_| Error::Internal(format!("negative family count {v}")))
}

/// The same count by enumerating all `(a_1, …, a_{n-1})`.
pub fn family_count_bruteforce(
    field: &Field,
    d: usize,
    n: usize,
    h: &AdditivePoly,
    a0: &Poly,
) -> Result<u128> {
    let q = field.order();
    let per = checked_pow(q, d as u32 + 1).ok_or(Error::SearchTooLarge("q^(d+1)".into()))?;
    let total = checked_pow(per, n as u32 - 1)
        .filter(|&t| t <= 1 << 24)
        .ok_or_else(|| Error::SearchTooLarge("coefficient tuples".into()))?;
    let polys = all_polys(q, d);
    let mut count = 0u128;
    for code in 0..total {
        let mut c = code;
        let mut lower = vec![a0.clone()];
        for _ in 1..n {
            lower.push(polys[(c % per) as usize].clone());
            c /= per;
        }
        let f = AdditivePoly::monic_from_lower(q, lower);
        if &con_t_additive(&f, field)? == h {
            count += 1;
        }
    }
    Ok(count)
}

/// Exact `P(deg con_t f = eta | a_0 ≠ 0)` for each `eta ≤ n`, or `None` when too large.
pub fn exact_cell_probabilities(field: &Field, d: usize, n: usize) -> Result<Option<Vec<f64>>> {
    let q = field.order();
    if checked_pow(q, n as u32).map_or(true, |v| v > EXACT_LIMIT)
        || checked_pow(q, d as u32 + 1).map_or(true, |v| v > EXACT_LIMIT)
    {
        return Ok(None);
    }
    let a0s: Vec<Poly> = all_polys(q, d).into_iter().skip(1).collect();
    let per_a0 = (q as f64).powi(((d + 1) * (n - 1)) as i32);
    let mut cells = Vec::with_capacity(n + 1);
    for eta in 0..=n {
        // the count depends on h only through h_0
        let h0s: Vec<Fe> = if eta == 0 { vec![Fe::ONE] } else { (1..q as u32).map(Fe).collect() };
        let multiplicity = if eta == 0 { 1.0 } else { (q as f64).powi(eta as i32 - 1) };
        let mut lower = vec![Fe::ZERO; eta];
        if eta > 0 {
            lower[0] = Fe::ONE;
        }
        let probe = AdditivePoly::from_tilde(q, &Poly::monic_from_lower(&lower));
        let sums = family_sums(field, n, &probe)?;
        let mut total = 0.0;
        for &h0 in &h0s {
            let mut lower = vec![Fe::ZERO; eta];
            if eta > 0 {
                lower[0] = h0;
            }
            let h = AdditivePoly::from_tilde(q, &Poly::monic_from_lower(&lower));
            for a0 in &a0s {
                total += family_count_with(&sums, field, d, &h, a0)? as f64;
            }
        }
        cells.push(multiplicity * total / (per_a0 * a0s.len() as f64));
    }
    Ok(Some(cells))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContentRow {
    pub n: usize,
    pub eta: usize,
    /// Samples with `a_0 ≠ 0`.
    pub conditioned: u64,
    pub observed: Proportion,
    pub asymptotic: f64,
    /// Asymptotic cells for `eta ≤ n`, rescaled to sum to one.
    pub normalized: f64,
    pub exact: Option<f64>,
    /// `(observed - normalized) / SE` with the SE taken at the normalized prediction.
    pub z_normalized: f64,
    /// `eta = n` forces `f = h` up to the leading coefficient.
    pub degenerate: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContentReport {
    pub config: ExperimentConfig,
    pub constant: f64,
    pub note: String,
    pub rows: Vec<ContentRow>,
    /// Largest `|observed - normalized|` over all cells.
    pub max_abs_deviation: f64,
    /// Observed frequency of each individual content `h` (by its `h̃` coefficients), per `n`.
    pub by_content: Vec<(usize, Vec<u32>, u64)>,
}

/// Frequency of each content degree among samples with `a_0 ≠ 0`, against the predictions.
pub fn content_distribution(cfg: &ExperimentConfig) -> Result<ContentReport> {
    cfg.validate()?;
    let field = Field::of_order(cfg.q)?;
    let mut rows = Vec::new();
    let mut by_content = Vec::new();
    let mut max_dev: f64 = 0.0;
    // an empty run reports an empty table
    let n_values = if cfg.trials == 0 { &[][..] } else { &cfg.n_values[..] };
    for &n in n_values {
        let contents: Vec<Option<AdditivePoly>> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let f = sample_additive(cfg.q, cfg.d, n, &mut trial_rng(cfg.seed, n, t));
                if f.is_separable() {
                    con_t_additive(&f, &field).map(Some)
                } else {
                    Ok(None)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let mut cells = vec![0u64; n + 1];
        let mut per_h: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for h in contents.iter().flatten() {
            cells[h.n()] += 1;
            *per_h.entry(h.tilde()?.raw()).or_default() += 1;
        }
        let conditioned: u64 = cells.iter().sum();
        let asym: Vec<f64> = (0..=n).map(|e| asymptotic_cell(cfg.q, cfg.d, e)).collect();
        let mass: f64 = asym.iter().sum();
        let exact = exact_cell_probabilities(&field, cfg.d, n)?;
        for eta in 0..=n {
            let normalized = asym[eta] / mass;
            let observed = Proportion::new(cells[eta], conditioned);
            let se = Proportion::standard_error(normalized, conditioned);
            let dev = observed.estimate - normalized;
            if conditioned > 0 {
                max_dev = max_dev.max(dev.abs());
            }
            rows.push(ContentRow {
                n,
                eta,
                conditioned,
                observed,
                asymptotic: asym[eta],
                normalized,
                exact: exact.as_ref().map(|e| e[eta]),
                z_normalized: if se > 0.0 { dev / se } else { 0.0 },
                degenerate: eta == n,
            });
        }
        by_content.extend(per_h.into_iter().map(|(h, c)| (n, h, c)));
    }
    Ok(ContentReport {
        config: cfg.clone(),
        constant: lemma_constant(cfg.q, cfg.d),
        note: LEMMA_CONSTANT_NOTE.into(),
        rows,
        max_abs_deviation: max_dev,
        by_content,
    })
}
