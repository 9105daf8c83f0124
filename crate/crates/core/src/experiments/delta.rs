use std::collections::BTreeSet;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::certificate::SweepContext;
use super::config::{random_poly, trial_rng, ExperimentConfig};
use crate::additive::AdditivePoly;
use crate::error::{Error, Result};
use crate::field::{Fe, Field, Tower, MAX_FIELD_ORDER};
use crate::frobenius::specialize;
use crate::gamma::{extract_params, is_proper_power, predicted_delta_image, DeltaImage};
use crate::poly::Poly;
use crate::util::checked_pow;

/// Attempts at drawing a composite `g∘h` whose content is exactly `h`.
const CONSTRUCTION_ATTEMPTS: usize = 64;

/// Norm searches run at least through this degree.
pub const NORM_SEARCH_MIN_DEGREE: u32 = 8;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaComparison {
    pub predicted: DeltaImage,
    pub observed: DeltaImage,
    pub matches: bool,
    /// Every observed pair lies in the predicted image.
    pub contained: bool,
    pub separable_specializations: u64,
}

/// Subgroup generated by the pairs `(r mod ord D, det B / det(D)^r)` over the sweep.
pub fn delta_image_empirical(f: &AdditivePoly, ctx: &SweepContext) -> Result<DeltaComparison> {
    let field = &*ctx.field;
    let params = extract_params(f, field)?;
    let det_d = if params.eta % 2 == 1 { field.neg(params.h0) } else { params.h0 };
    let mut pairs = BTreeSet::new();
    let mut separable = 0;
    for (tower, tau) in ctx.iter() {
        let rep = specialize(f, tower, tau)?;
        let Some(det) = rep.det else { continue };
        separable += 1;
        let s = field.div(det, field.pow(det_d, rep.r as u64));
        pairs.insert((rep.r as u64 % params.ord_d, s));
    }
    let observed = DeltaImage::generated(params.ord_d, pairs.into_iter().collect(), field);
    let predicted = predicted_delta_image(&params, field);
    let matches = observed.elements == predicted.elements;
    let contained = observed.elements.iter().all(|&p| predicted.contains(p));
    Ok(DeltaComparison { predicted, observed, matches, contained, separable_specializations: separable })
}

/// `t`, `t + 1`, `c(t + 1)^2` with `c = 2` in odd characteristic and a primitive
/// element in characteristic 2, and the constants `1` and a primitive element.
pub fn default_delta_a0s(field: &Field) -> Vec<Poly> {
    let g = field.primitive_element();
    let c = if field.characteristic() == 2 { g } else { field.from_int(2) };
    let sq = Poly::from_raw(&[1, 1]).pow(2, field).scale(c, field);
    vec![Poly::from_raw(&[0, 1]), Poly::from_raw(&[1, 1]), sq, Poly::one(), Poly::constant(g)]
}

/// Random `g∘h` with `deg h = eta`, `h̃(0)·g̃(0) = a_0`, and content exactly `h`.
pub fn construct_with_content(
    field: &Field,
    d: usize,
    n: usize,
    eta: usize,
    a0: &Poly,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<Option<AdditivePoly>> {
    if eta > n || a0.is_zero() {
        return Err(Error::InvalidArgument("need eta <= n and a_0 != 0".into()));
    }
    // g has a single coefficient when n - eta = 1, so a constant a_0 makes f
    // constant in t and its content all of f
    if (eta == n && !a0.is_constant()) || (a0.is_constant() && n - eta == 1) {
        return Ok(None);
    }
    let q = field.order();
    for _ in 0..CONSTRUCTION_ATTEMPTS {
        let mut lower: Vec<Fe> = (0..eta).map(|_| Fe(rng.gen_range(0..q) as u32)).collect();
        if eta == n {
            // f = h, so h_0 = a_0
            lower[0] = a0.coeff(0);
        } else if eta > 0 {
            lower[0] = Fe(rng.gen_range(1..q) as u32);
        }
        let h = AdditivePoly::from_tilde(q, &Poly::monic_from_lower(&lower));
        let h0 = lower.first().copied().unwrap_or(Fe::ONE);
        let h0_inv = field.inv(h0).expect("h_0 is nonzero");
        let mut g_lower = vec![a0.scale(h0_inv, field)];
        g_lower.extend((1..n - eta).map(|_| random_poly(q, d, rng)));
        let g = if n == eta {
            AdditivePoly::x(q)
        } else {
            AdditivePoly::monic_from_lower(q, g_lower)
        };
        let f = g.compose(&h, field)?;
        if extract_params(&f, field)?.eta == eta {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaRow {
    pub a0: Vec<u32>,
    pub n: usize,
    pub eta: usize,
    pub trials: u64,
    pub constructed: u64,
    pub matches: u64,
    /// Observed pairs outside the predicted image.
    pub violations: u64,
    pub predicted_size: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaReport {
    pub config: ExperimentConfig,
    pub rows: Vec<DeltaRow>,
}

impl DeltaReport {
    pub fn mismatches(&self) -> u64 {
        self.rows.iter().map(|r| r.constructed - r.matches).sum()
    }

    pub fn violations(&self) -> u64 {
        self.rows.iter().map(|r| r.violations).sum()
    }
}

/// Empirical vs predicted δ images for composites with prescribed `a_0` and `eta ∈ {0, 1}`.
pub fn delta_experiment(cfg: &ExperimentConfig) -> Result<DeltaReport> {
    cfg.validate()?;
    let ctx = SweepContext::new(cfg.q, cfg.r_max, cfg.tau_budget, cfg.seed)?;
    let field = ctx.field.clone();
    let mut rows = Vec::new();
    // an empty run reports an empty table
    let n_values = if cfg.trials == 0 { &[][..] } else { &cfg.n_values[..] };
    for &n in n_values {
        for (ai, a0) in default_delta_a0s(&field).iter().enumerate() {
            for eta in 0..=1usize.min(n) {
                let cell = ((ai as u64) << 1 | eta as u64) << 32;
                let results: Vec<Option<(bool, bool, usize)>> = (0..cfg.trials)
                    .into_par_iter()
                    .map(|t| {
                        let mut rng = trial_rng(cfg.seed, n, cell | t);
                        let Some(f) = construct_with_content(&field, cfg.d, n, eta, a0, &mut rng)?
                        else {
                            return Ok(None);
                        };
                        let cmp = delta_image_empirical(&f, &ctx)?;
                        Ok(Some((cmp.matches, cmp.contained, cmp.predicted.len())))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let done: Vec<_> = results.iter().flatten().collect();
                rows.push(DeltaRow {
                    a0: a0.raw(),
                    n,
                    eta,
                    trials: cfg.trials,
                    constructed: done.len() as u64,
                    matches: done.iter().filter(|x| x.0).count() as u64,
                    violations: done.iter().filter(|x| !x.1).count() as u64,
                    predicted_size: done.first().map_or(0, |x| x.2),
                });
            }
        }
    }
    Ok(DeltaReport { config: cfg.clone(), rows })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormCheck {
    pub r: u32,
    /// `(b, #τ of exact degree r with N(u(τ)) = b)` for every `b ∈ F_q^×`.
    pub counts: Vec<(Fe, u64)>,
    pub all_witnessed: bool,
}

fn check_norm_input(u: &Poly, field: &Field) -> Result<()> {
    if u.is_constant() {
        return Err(Error::ConstantPolynomial);
    }
    if !u.is_monic() {
        return Err(Error::NotMonic);
    }
    if is_proper_power(u, field)? {
        return Err(Error::InvalidArgument(format!("{:?} is a proper power", u.raw())));
    }
    Ok(())
}

/// Witness counts of `N_{F_{q^r}/F_q}(u(τ)) = b` over `τ` of exact degree `r`.
pub fn norm_surjectivity_check(u: &Poly, field: &Arc<Field>, r: u32) -> Result<NormCheck> {
    check_norm_input(u, field)?;
    let tower = Tower::new(field.clone(), r)?;
    Ok(norm_counts(u, &tower))
}

fn norm_counts(u: &Poly, tower: &Tower) -> NormCheck {
    let base = tower.base();
    let top = tower.top();
    let coeffs: Vec<Fe> = u.coeffs().iter().map(|&c| tower.embed(c)).collect();
    let mut counts = vec![0u64; base.order() as usize];
    for tau in tower.exact_degree_elements() {
        let v = coeffs.iter().rev().fold(Fe::ZERO, |acc, &c| top.add(top.mul(acc, tau), c));
        if !v.is_zero() {
            counts[tower.norm_to_base(v).0 as usize] += 1;
        }
    }
    let counts: Vec<(Fe, u64)> =
        (1..base.order() as u32).map(|b| (Fe(b), counts[b as usize])).collect();
    let all_witnessed = counts.iter().all(|&(_, c)| c > 0);
    NormCheck { r: tower.r(), counts, all_witnessed }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormSearch {
    pub u: Vec<u32>,
    pub q: u64,
    pub checks: Vec<NormCheck>,
    /// Smallest `r` from which every later computed degree witnesses every `b`.
    pub r0: Option<u32>,
    /// Values of `b` with no witness at any computed degree.
    pub never_witnessed: Vec<Fe>,
}

impl NormSearch {
    pub fn max_degree(&self) -> u32 {
        self.checks.last().map_or(0, |c| c.r)
    }
}

/// Checks for `r = 1, 2, …` through at least `max(min_degree, r0 + 2)`, as far as
/// the field order limit allows.
pub fn norm_r0_search(u: &Poly, field: &Arc<Field>, min_degree: u32) -> Result<NormSearch> {
    check_norm_input(u, field)?;
    let q = field.order();
    let fits = |r: u32| checked_pow(q, r).is_some_and(|v| v <= MAX_FIELD_ORDER);
    let mut checks: Vec<NormCheck> = Vec::new();
    let mut r = 1;
    loop {
        if !fits(r) {
            break;
        }
        checks.push(norm_counts(u, &Tower::new(field.clone(), r)?));
        let r0 = first_stable(&checks);
        if r >= min_degree && r0.is_some_and(|r0| r >= r0 + 2) {
            break;
        }
        r += 1;
    }
    let never_witnessed = (1..q as u32)
        .map(Fe)
        .filter(|&b| {
            checks.iter().all(|c| c.counts.iter().any(|&(x, n)| x == b && n == 0))
        })
        .collect();
    Ok(NormSearch { u: u.raw(), q, r0: first_stable(&checks), checks, never_witnessed })
}

fn first_stable(checks: &[NormCheck]) -> Option<u32> {
    let tail = checks.iter().rev().take_while(|c| c.all_witnessed).count();
    (tail > 0).then(|| checks[checks.len() - tail].r)
}
