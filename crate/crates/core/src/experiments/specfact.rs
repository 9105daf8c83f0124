use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{all_polys, random_poly, trial_rng, ExperimentConfig};
use crate::error::{Error, Result};
use crate::factor::{factorization_type, FactorizationType};
use crate::field::{Fe, Field};
use crate::poly::Poly;
use crate::stats::Proportion;
use crate::util::checked_pow;

/// Coefficient tuples are enumerated exhaustively when there are at most this many.
pub const SPECFACT_EXHAUSTIVE_LIMIT: u64 = 10_000;

/// Partitions of `n` with parts in non-increasing order, in reverse lexicographic order.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=n.min(max)).rev() {
            prefix.push(part);
            go(n - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Smallest `τ ∈ F_q` (canonical order) with `a_0(τ) ≠ 0` such that
/// `X^n + Σ a_i(τ) X^i` is squarefree with irreducible factors of the given degrees.
pub fn spec_fact_search(coeffs: &[Poly], partition: &[usize], field: &Field) -> Result<Option<Fe>> {
    let n = coeffs.len();
    if partition.contains(&0) || partition.iter().sum::<usize>() != n || n == 0 {
        return Err(Error::InvalidArgument(format!("{partition:?} is not a partition of {n}")));
    }
    let target = FactorizationType::squarefree(partition);
    for tau in field.elements_canonical() {
        let lower: Vec<Fe> = coeffs.iter().map(|a| a.eval(tau, field)).collect();
        if lower[0].is_zero() {
            continue;
        }
        if factorization_type(field, &Poly::monic_from_lower(&lower))? == target {
            return Ok(Some(tau));
        }
    }
    Ok(None)
}

/// Factorization types realized by some `τ ∈ F_q` with `a_0(τ) ≠ 0`.
fn realized_types(coeffs: &[Poly], field: &Field) -> Result<Vec<FactorizationType>> {
    let mut types = Vec::new();
    for tau in field.elements_canonical() {
        let lower: Vec<Fe> = coeffs.iter().map(|a| a.eval(tau, field)).collect();
        if lower[0].is_zero() {
            continue;
        }
        let ty = factorization_type(field, &Poly::monic_from_lower(&lower))?;
        if ty.is_squarefree() && !types.contains(&ty) {
            types.push(ty);
        }
    }
    Ok(types)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpecFactRow {
    pub n: usize,
    pub exhaustive: bool,
    pub tuples: u64,
    /// Tuples for which every partition of `n` is realized by some `τ ∈ F_q`.
    pub all_partitions: Proportion,
    /// `q · (1 - fraction)`: the constant `A` with fraction `= 1 - A/q`.
    pub a_estimate: f64,
    /// `(partition, #tuples missing it)`.
    pub missing: Vec<(Vec<usize>, u64)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpecFactReport {
    pub config: ExperimentConfig,
    pub rows: Vec<SpecFactRow>,
}

/// How often random `(a_0, …, a_{n-1})` admit every factorization pattern at a
/// rational specialization; exhaustive when small, else `cfg.trials` samples.
pub fn spec_fact_statistics(cfg: &ExperimentConfig) -> Result<SpecFactReport> {
    cfg.validate()?;
    let field = Field::of_order(cfg.q)?;
    let mut rows = Vec::new();
    // an empty run reports an empty table
    let n_values = if cfg.trials == 0 { &[][..] } else { &cfg.n_values[..] };
    for &n in n_values {
        let per = checked_pow(cfg.q, cfg.d as u32 + 1).expect("validated");
        let total = checked_pow(per, n as u32);
        let exhaustive = total.is_some_and(|t| t <= SPECFACT_EXHAUSTIVE_LIMIT);
        let tuples = if exhaustive { total.unwrap() } else { cfg.trials };
        let polys = if exhaustive { all_polys(cfg.q, cfg.d) } else { Vec::new() };
        let parts = partitions(n);
        let targets: Vec<FactorizationType> =
            parts.iter().map(|p| FactorizationType::squarefree(p)).collect();
        let hits: Vec<Vec<bool>> = (0..tuples)
            .into_par_iter()
            .map(|i| {
                let coeffs: Vec<Poly> = if exhaustive {
                    (0..n).map(|j| polys[(i / per.pow(j as u32) % per) as usize].clone()).collect()
                } else {
                    let mut rng = trial_rng(cfg.seed, n, i);
                    (0..n).map(|_| random_poly(cfg.q, cfg.d, &mut rng)).collect()
                };
                let types = realized_types(&coeffs, &field)?;
                Ok(targets.iter().map(|t| types.contains(t)).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        let good = hits.iter().filter(|h| h.iter().all(|&b| b)).count() as u64;
        let all_partitions = Proportion::new(good, tuples);
        let missing = parts
            .iter()
            .enumerate()
            .map(|(j, p)| (p.clone(), hits.iter().filter(|h| !h[j]).count() as u64))
            .collect();
        rows.push(SpecFactRow {
            n,
            exhaustive,
            tuples,
            a_estimate: cfg.q as f64 * (1.0 - all_partitions.estimate),
            all_partitions,
            missing,
        });
    }
    Ok(SpecFactReport { config: cfg.clone(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_lists() {
        assert_eq!(partitions(1), vec![vec![1]]);
        assert_eq!(partitions(3), vec![vec![3], vec![2, 1], vec![1, 1, 1]]);
        assert_eq!(partitions(6).len(), 11);
    }

    #[test]
    fn worked_example() {
        let k = Field::of_order(5).unwrap();
        let coeffs = [Poly::from_raw(&[0, 1]), Poly::zero()];
        assert_eq!(spec_fact_search(&coeffs, &[1, 1], &k).unwrap(), Some(Fe(1)));
        assert_eq!(spec_fact_search(&coeffs, &[2], &k).unwrap(), Some(Fe(2)));
        assert!(spec_fact_search(&coeffs, &[1], &k).is_err());
        let one = [Poly::from_raw(&[0, 1])];
        assert_eq!(spec_fact_search(&one, &[1], &k).unwrap(), Some(Fe(1)));
    }
}
