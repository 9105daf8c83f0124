use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{sample_additive, trial_rng, ExperimentConfig, Mode, FULL_SWEEP_LIMIT};
use crate::additive::{con_t_additive, find_additive_divisors, AdditivePoly};
use crate::error::{Error, Result};
use crate::factor::{factorization_type, FactorizationType};
use crate::field::{Fe, Field, Tower};
use crate::frobenius::specialize;
use crate::gamma::{extract_params, is_charpoly_of_gamma, predicted_delta_image, DeltaImage};
use crate::poly::Poly;
use crate::stats::Proportion;

/// Towers `F_q ⊂ F_{q^r}` for `r ≤ r_max` with the specialization points to sweep:
/// one representative per place of degree `r`, or a seeded sample of them when
/// `q^r` exceeds the enumeration limit.
pub struct SweepContext {
    pub field: Arc<Field>,
    pub towers: Vec<Tower>,
    pub places: Vec<Vec<Fe>>,
    /// Whether the sweep at each degree is exhaustive.
    pub exhaustive: Vec<bool>,
}

impl SweepContext {
    pub fn new(q: u64, r_max: u32, tau_budget: u64, seed: u64) -> Result<SweepContext> {
        let field = Field::of_order(q)?;
        let mut towers = Vec::new();
        let mut places = Vec::new();
        let mut exhaustive = Vec::new();
        for r in 1..=r_max {
            let tower = Tower::new(field.clone(), r)?;
            let size = tower.top().order();
            if size <= FULL_SWEEP_LIMIT {
                places.push(tower.orbit_representatives());
                exhaustive.push(true);
            } else {
                places.push(sample_places(&tower, tau_budget, seed ^ r as u64));
                exhaustive.push(false);
            }
            towers.push(tower);
        }
        Ok(SweepContext { field, towers, places, exhaustive })
    }

    pub fn r_max(&self) -> u32 {
        self.towers.len() as u32
    }

    /// `(tower, τ)` for every place in the sweep, by increasing degree.
    pub fn iter(&self) -> impl Iterator<Item = (&Tower, Fe)> + '_ {
        self.towers
            .iter()
            .zip(&self.places)
            .flat_map(|(t, ps)| ps.iter().map(move |&tau| (t, tau)))
    }
}

fn sample_places(tower: &Tower, budget: u64, seed: u64) -> Vec<Fe> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = tower.top();
    let r = tower.r();
    let mut reps = BTreeSet::new();
    let mut attempts = 0;
    while (reps.len() as u64) < budget && attempts < budget * 8 {
        attempts += 1;
        let x = Fe(rng.gen_range(0..top.order()) as u32);
        if tower.degree_over_base(x) != r {
            continue;
        }
        let rep = (0..r)
            .map(|i| tower.frobenius_power(x, i))
            .min_by(|a, b| top.cmp_canonical(*a, *b))
            .unwrap();
        reps.insert(rep);
    }
    let mut v: Vec<Fe> = reps.into_iter().collect();
    v.sort_by(|a, b| top.cmp_canonical(*a, *b));
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    EvidenceGamma,
    Inconclusive,
    Violation,
}

/// Specialization evidence that the Galois group of `f` is the full predicted group.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub n: usize,
    pub eta: usize,
    pub k: u64,
    /// No additive divisor with nonconstant coefficients was found.
    pub no_divisor: bool,
    pub closure_divisors_possible: bool,
    /// Some quotient characteristic polynomial is irreducible.
    pub irreducible_found: bool,
    /// Some quotient characteristic polynomial has type `(n-η-1, 1)`; when
    /// `n - η = 2` this asks for a separable reducible one instead.
    pub type_n11_found: bool,
    pub delta_match: bool,
    /// Every specialization passed the containment audit.
    pub upper_bound_ok: bool,
    pub verdict: Verdict,
    pub separable_specializations: u64,
    pub audit_failures: Vec<String>,
    pub diagnostics: Vec<String>,
}

/// Sweep the places of `ctx`, collecting evidence and auditing each separable
/// specialization against the predicted group.
pub fn largeness_certificate(f: &AdditivePoly, d: usize, ctx: &SweepContext) -> Result<Certificate> {
    let field = &*ctx.field;
    let params = extract_params(f, field)?;
    let (n, eta) = (params.n, params.eta);
    let quotient_degree = n - eta;
    let mut diagnostics = Vec::new();
    let mut audit_failures = Vec::new();

    let (no_divisor, closure_divisors_possible) = match find_additive_divisors(f, d, field) {
        Ok(s) => (s.divisors.is_empty(), s.closure_divisors_possible),
        Err(Error::SearchTooLarge(m)) => {
            diagnostics.push(format!("divisor search skipped: {m}"));
            (false, true)
        }
        Err(e) => return Err(e),
    };

    let predicted = predicted_delta_image(&params, field);
    let sign_eta = if eta % 2 == 1 { field.neg(params.h0) } else { params.h0 };
    let target_pair = FactorizationType::squarefree(&[1, quotient_degree.saturating_sub(1)]);
    let mut irreducible_found = quotient_degree <= 1;
    let mut type_n11_found = quotient_degree <= 1;
    let mut observed: BTreeSet<(u64, Fe)> = BTreeSet::new();
    let mut separable = 0u64;

    for (tower, tau) in ctx.iter() {
        let rep = specialize(f, tower, tau)?;
        if !rep.separable {
            continue;
        }
        separable += 1;
        let r = rep.r;
        let cp = rep.charpoly.as_ref().expect("separable report has a charpoly");
        let det = rep.det.expect("separable report has a determinant");
        let b = rep.frob_matrix.as_ref().expect("separable report has a matrix");
        if tower.descend(b.det(tower.top())) != Some(det) {
            audit_failures.push(format!("r={r} tau={tau:?}: determinant closed form mismatch"));
        }
        let (quot, rem) = cp.div_rem(params.d_charpoly(r as u64), field)?;
        if !rem.is_zero() {
            audit_failures.push(format!("r={r} tau={tau:?}: charpoly(D^r) does not divide {cp:?}"));
            continue;
        }
        if !is_charpoly_of_gamma(&params, cp, field)? {
            audit_failures.push(format!("r={r} tau={tau:?}: {cp:?} is not a charpoly of Gamma"));
        }
        let s = field.div(det, field.pow(sign_eta, r as u64));
        let pair = (r as u64 % params.ord_d, s);
        if !predicted.contains(pair) {
            audit_failures.push(format!("r={r} tau={tau:?}: delta pair {pair:?} not predicted"));
        }
        observed.insert(pair);
        if quotient_degree >= 2 && !(irreducible_found && type_n11_found) {
            let ty = factorization_type(field, &quot)?;
            irreducible_found |= ty.is_irreducible();
            type_n11_found |= if quotient_degree == 2 {
                ty == FactorizationType::squarefree(&[1, 1])
            } else {
                ty == target_pair
            };
        }
    }

    if separable == 0 {
        diagnostics.push("no separable specialization within r_max".into());
    }
    let empirical = DeltaImage::generated(params.ord_d, observed.into_iter().collect(), field);
    let delta_match = empirical.elements == predicted.elements;
    let upper_bound_ok = audit_failures.is_empty();
    let verdict = if !upper_bound_ok {
        Verdict::Violation
    } else if separable > 0 && no_divisor && irreducible_found && type_n11_found && delta_match {
        Verdict::EvidenceGamma
    } else {
        Verdict::Inconclusive
    };
    Ok(Certificate {
        n,
        eta,
        k: params.k,
        no_divisor,
        closure_divisors_possible,
        irreducible_found,
        type_n11_found,
        delta_match,
        upper_bound_ok,
        verdict,
        separable_specializations: separable,
        audit_failures,
        diagnostics,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TheoremRow {
    pub n: usize,
    pub samples: u64,
    /// Samples with `a_0 ≠ 0`.
    pub separable: u64,
    /// Samples entering the statistic (`con_t f = X` in `theorem1` mode, all separable in `theorem2`).
    pub conditioned: u64,
    pub evidence: Proportion,
    /// Conditioned samples with an additive divisor.
    pub divisor_failures: Proportion,
    pub inconclusive: u64,
    pub violations: u64,
    pub closure_flagged: u64,
    pub content_mismatches: u64,
    /// Number of conditioned samples missing each evidence bit.
    pub missing_irreducible: u64,
    pub missing_type_n11: u64,
    pub missing_delta: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TheoremReport {
    pub config: ExperimentConfig,
    pub rows: Vec<TheoremRow>,
    /// Up to ten audit failure messages, for debugging.
    pub violation_examples: Vec<String>,
}

impl TheoremReport {
    pub fn violations(&self) -> u64 {
        self.rows.iter().map(|r| r.violations + r.content_mismatches).sum()
    }
}

struct TrialOutcome {
    separable: bool,
    conditioned: bool,
    content_mismatch: bool,
    certificate: Option<Certificate>,
}

fn run_trial(
    cfg: &ExperimentConfig,
    ctx: &SweepContext,
    n: usize,
    trial: u64,
) -> Result<TrialOutcome> {
    let f = sample_additive(cfg.q, cfg.d, n, &mut trial_rng(cfg.seed, n, trial));
    if !f.is_separable() {
        return Ok(TrialOutcome {
            separable: false,
            conditioned: false,
            content_mismatch: false,
            certificate: None,
        });
    }
    let field = &*ctx.field;
    let h = con_t_additive(&f, field)?;
    let content_mismatch = cfg.cross_check && {
        let direct = f.expand().content_t(field)?;
        let via_slices = Poly::from_coeffs(h.expand().rows().iter().map(|r| r.coeff(0)).collect());
        direct != via_slices
    };
    let conditioned = match cfg.mode {
        Mode::Theorem1 => h.n() == 0,
        _ => true,
    };
    let certificate =
        if conditioned { Some(largeness_certificate(&f, cfg.d, ctx)?) } else { None };
    Ok(TrialOutcome { separable: true, conditioned, content_mismatch, certificate })
}

/// Frequency of evidence certificates per `n`.
pub fn run_theorem_experiment(cfg: &ExperimentConfig) -> Result<TheoremReport> {
    cfg.validate()?;
    let ctx = SweepContext::new(cfg.q, cfg.r_max, cfg.tau_budget, cfg.seed)?;
    let mut rows = Vec::new();
    let mut violation_examples = Vec::new();
    // an empty run reports an empty table
    let n_values = if cfg.trials == 0 { &[][..] } else { &cfg.n_values[..] };
    for &n in n_values {
        let outcomes: Vec<TrialOutcome> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_trial(cfg, &ctx, n, t))
            .collect::<Result<Vec<_>>>()?;
        let mut row = TheoremRow {
            n,
            samples: cfg.trials,
            separable: 0,
            conditioned: 0,
            evidence: Proportion::new(0, 0),
            divisor_failures: Proportion::new(0, 0),
            inconclusive: 0,
            violations: 0,
            closure_flagged: 0,
            content_mismatches: 0,
            missing_irreducible: 0,
            missing_type_n11: 0,
            missing_delta: 0,
        };
        let (mut evidence, mut div_fail) = (0, 0);
        for o in &outcomes {
            row.separable += o.separable as u64;
            row.conditioned += o.conditioned as u64;
            row.content_mismatches += o.content_mismatch as u64;
            let Some(c) = &o.certificate else { continue };
            match c.verdict {
                Verdict::EvidenceGamma => evidence += 1,
                Verdict::Inconclusive => row.inconclusive += 1,
                Verdict::Violation => {
                    row.violations += 1;
                    for m in &c.audit_failures {
                        if violation_examples.len() < 10 {
                            violation_examples.push(format!("n={n}: {m}"));
                        }
                    }
                }
            }
            div_fail += (!c.no_divisor) as u64;
            row.closure_flagged += c.closure_divisors_possible as u64;
            row.missing_irreducible += (!c.irreducible_found) as u64;
            row.missing_type_n11 += (!c.type_n11_found) as u64;
            row.missing_delta += (!c.delta_match) as u64;
        }
        row.evidence = Proportion::new(evidence, row.conditioned);
        row.divisor_failures = Proportion::new(div_fail, row.conditioned);
        rows.push(row);
    }
    Ok(TheoremReport { config: cfg.clone(), rows, violation_examples })
}
