//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p qadditive --test acceptance`.

use std::collections::{BTreeSet, HashSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qadditive::additive::{additive_gcd, check_height_inequality};
use qadditive::census::{charpoly_set_bruteforce, count_c3_charpolys, embedded_gl_generators};
use qadditive::experiments::{
    construct_with_content, content_distribution, delta_image_empirical, exact_family_count,
    family_count_bruteforce, norm_r0_search, run_theorem_experiment, spec_fact_search,
    spec_fact_statistics, ExperimentConfig, SweepContext, NORM_SEARCH_MIN_DEGREE,
};
use qadditive::frobenius::frobenius_matrix;
use qadditive::gamma::{gamma_contains, gamma_order, is_charpoly_of_gamma, GammaParams};
use qadditive::{AdditivePoly, Fe, Field, Matrix, Poly, Tower};

/// Wall-clock limits.
const CRIT1_LIMIT: Duration = Duration::from_secs(10);
const CRIT4_LIMIT: Duration = Duration::from_secs(120);
const CRIT7_LIMIT: Duration = Duration::from_secs(15 * 60);

/// Largest specialization degree for the trend experiment; places of degree up to 8
/// are needed before the `(n-1, 1)` pattern is reliably seen at `n = 8`.
const CRIT7_R_MAX: u32 = 8;

/// Constants `A(n)` in `fraction ≥ 1 - A/q`, pinned above the largest measured
/// `q(1 - fraction)` over `q ∈ {5, 7, 8}` (1.64 for `n = 2`, 5.36 for `n = 3`).
const SPECFACT_A: [(usize, f64); 2] = [(2, 2.0), (3, 6.0)];

/// Monte Carlo cells must lie within this many standard errors.
const CONTENT_Z: f64 = 3.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rand_fe(k: &Field, rng: &mut ChaCha8Rng) -> Fe {
    Fe(rng.gen_range(0..k.order()) as u32)
}

fn rand_nonzero(k: &Field, rng: &mut ChaCha8Rng) -> Fe {
    Fe(rng.gen_range(1..k.order()) as u32)
}

fn rand_tpoly(k: &Field, d: usize, rng: &mut ChaCha8Rng) -> Poly {
    Poly::from_coeffs((0..=d).map(|_| rand_fe(k, rng)).collect())
}

/// Monic separable additive polynomial of additive degree `n`, coefficients of t-degree ≤ `d`.
fn rand_additive(k: &Field, n: usize, d: usize, rng: &mut ChaCha8Rng) -> AdditivePoly {
    if n == 0 {
        return AdditivePoly::x(k.order());
    }
    loop {
        let lower: Vec<Poly> = (0..n).map(|_| rand_tpoly(k, d, rng)).collect();
        if !lower[0].is_zero() {
            return AdditivePoly::monic_from_lower(k.order(), lower);
        }
    }
}

/// The expansion of a ground additive polynomial as an ordinary polynomial.
fn expansion(f: &AdditivePoly) -> Poly {
    Poly::from_coeffs(f.expand().rows().iter().map(|r| r.coeff(0)).collect())
}

fn crit1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = Vec::new();
    let mut checked = 0;
    for (q, r) in [(2u64, 1u32), (2, 2), (2, 3), (3, 1), (3, 2), (4, 2)] {
        let base = Field::of_order(q).unwrap();
        let tower = Tower::new(base.clone(), r).unwrap();
        let top = tower.top().clone();
        for _ in 0..500 {
            let n = rng.gen_range(1..=6usize);
            let mut coeffs: Vec<Fe> = (0..n).map(|_| rand_fe(&top, &mut rng)).collect();
            coeffs[0] = rand_nonzero(&top, &mut rng);
            coeffs.push(Fe::ONE);
            let f = AdditivePoly::from_ground(q, &coeffs);
            let b = frobenius_matrix(&f, &tower).unwrap();
            // N(a_0) as the product of the conjugates
            let norm = (0..r).fold(Fe::ONE, |acc, i| top.mul(acc, tower.frobenius_power(coeffs[0], i)));
            let sign = if (r as usize * n) % 2 == 1 { top.neg(Fe::ONE) } else { Fe::ONE };
            if b.det(&top) != top.mul(sign, norm) {
                failures.push(format!("det q={q} r={r} n={n}"));
            }
            let cp = b.charpoly(&top);
            if cp.coeffs().iter().any(|&c| tower.frobenius_power(c, 1) != c) {
                failures.push(format!("charpoly not Frobenius-fixed q={q} r={r} n={n}"));
            }
            if r == 1 && cp != f.tilde().unwrap() {
                failures.push(format!("charpoly != tilde q={q} n={n}"));
            }
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed < CRIT1_LIMIT;
    outcome(pass, format!("{checked} polynomials, {} failures{}, {elapsed:.2?}", failures.len(), first(&failures)))
}

fn crit2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut bad = 0;
    let mut nontrivial = 0;
    for q in [2u64, 3, 4] {
        let k = Field::of_order(q).unwrap();
        for _ in 0..200 {
            let common = rand_additive(&k, rng.gen_range(0..=2), 0, &mut rng);
            let count = rng.gen_range(2..=3);
            let fs: Vec<AdditivePoly> = (0..count)
                .map(|_| {
                    let m = rng.gen_range(0..=2usize);
                    let lower = (0..m).map(|_| Poly::constant(rand_fe(&k, &mut rng))).collect();
                    let outer = AdditivePoly::monic_from_lower(q, lower)
                        .scale(&Poly::constant(rand_nonzero(&k, &mut rng)), &k);
                    outer.compose(&common, &k).unwrap()
                })
                .collect();
            let oracle = fs
                .iter()
                .map(expansion)
                .fold(Poly::zero(), |g, p| if g.is_zero() { p.monic(&k) } else { g.gcd(&p, &k).unwrap() });
            let got = expansion(&additive_gcd(&fs, &k).unwrap());
            bad += (got != oracle) as u32;
            nontrivial += (oracle.deg0() > 1) as u32;
        }
    }
    outcome(bad == 0, format!("600 tuples, {nontrivial} with nontrivial gcd, {bad} mismatches"))
}

fn crit3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut fails, mut equalities, mut total) = (0, 0, 0);
    for q in [2u64, 3] {
        let k = Field::of_order(q).unwrap();
        for i in 0..200 {
            let inner = loop {
                let h = rand_additive(&k, rng.gen_range(1..=2), 2, &mut rng);
                if h.deg_t() >= 1 {
                    break h;
                }
            };
            let outer = if i % 5 == 0 { inner.clone() } else { rand_additive(&k, rng.gen_range(1..=2), 2, &mut rng) };
            let f = outer.compose(&inner, &k).unwrap();
            total += 1;
            if !check_height_inequality(&f, &inner, &k).unwrap() {
                fails += 1;
            }
            let factor = q.pow((f.n() - inner.n()) as u32) as usize;
            equalities += (f.deg_t() == factor * inner.deg_t()) as u32;
        }
    }
    outcome(fails == 0 && equalities > 0, format!("{total} composed pairs, {fails} failures, {equalities} equality witnesses"))
}

/// All `m × m` matrices over `F_q`.
fn all_matrices(q: u64, m: usize) -> Vec<Vec<Fe>> {
    let total = q.pow((m * m) as u32);
    (0..total)
        .map(|code| (0..m * m).map(|i| Fe((code / q.pow(i as u32) % q) as u32)).collect())
        .collect()
}

fn to_matrix(entries: &[Fe], m: usize) -> Matrix {
    Matrix::from_rows(entries.chunks(m.max(1)).take(m).map(|r| r.to_vec()).collect()).unwrap()
}

/// Γ built from its definition: top-left `D^i`, any `A`, and `B` invertible with
/// `det B ∈ μ^i · F_q^{×k}`, `μ = (-1)^{n-η} c / h_0`.
fn gamma_by_construction(k: &Field, n: usize, h0: Option<Fe>, c: Fe, kk: u64) -> HashSet<Vec<Fe>> {
    let q = k.order();
    let eta = h0.map_or(0, |_| 1);
    let m = n - eta;
    let powers: BTreeSet<Fe> = if kk == 0 {
        [Fe::ONE].into()
    } else {
        (1..q as u32).map(|x| k.pow(Fe(x), kk)).collect()
    };
    let sign = if m % 2 == 1 { k.neg(Fe::ONE) } else { Fe::ONE };
    let h0v = h0.unwrap_or(Fe::ONE);
    let mu = k.mul(sign, k.div(c, h0v));
    // D is the 1×1 companion matrix of X + h_0
    let d = k.neg(h0v);
    let lower: Vec<(Vec<Fe>, Fe)> = all_matrices(q, m)
        .into_iter()
        .map(|b| {
            let det = if m == 0 { Fe::ONE } else { to_matrix(&b, m).det(k) };
            (b, det)
        })
        .filter(|(_, det)| !det.is_zero())
        .collect();
    let mut out = HashSet::new();
    for i in 0..(q - 1) * (q - 1) {
        let target = k.pow(mu, i);
        for (b, det) in &lower {
            if !powers.contains(&k.div(*det, target)) {
                continue;
            }
            let a_count = if eta == 1 { q.pow(m as u32) } else { 1 };
            for a in 0..a_count {
                let mut e = vec![Fe::ZERO; n * n];
                if eta == 1 {
                    e[0] = k.pow(d, i);
                    for j in 0..m {
                        e[j + 1] = Fe((a / q.pow(j as u32) % q) as u32);
                    }
                }
                for r in 0..m {
                    for s in 0..m {
                        e[(r + eta) * n + s + eta] = b[r * m + s];
                    }
                }
                out.insert(e);
            }
        }
    }
    out
}

fn crit4() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    let mut failures = Vec::new();
    for q in [2u64, 3] {
        let k = Field::of_order(q).unwrap();
        let all_n: Vec<Vec<Vec<Fe>>> = (0..=3).map(|n| all_matrices(q, n)).collect();
        for n in 1..=3usize {
            let monic_polys: Vec<Poly> = (0..q.pow(n as u32))
                .map(|code| {
                    let lower: Vec<Fe> = (0..n).map(|i| Fe((code / q.pow(i as u32) % q) as u32)).collect();
                    Poly::monic_from_lower(&lower)
                })
                .collect();
            for eta in 0..=1usize.min(n) {
                let h0s: Vec<Option<Fe>> =
                    if eta == 0 { vec![None] } else { (1..q as u32).map(|x| Some(Fe(x))).collect() };
                for h0 in h0s {
                    let h = match h0 {
                        None => AdditivePoly::x(q),
                        Some(a) => AdditivePoly::from_tilde(q, &Poly::from_coeffs(vec![a, Fe::ONE])),
                    };
                    for kk in 0..=2u64 {
                        for c in (1..q as u32).map(Fe) {
                            cases += 1;
                            let params = GammaParams::new(&k, n, h.clone(), c, kk, None).unwrap();
                            let gamma = gamma_by_construction(&k, n, h0, c, kk);
                            let tag = format!("q={q} n={n} eta={eta} h0={h0:?} k={kk} c={c:?}");
                            if gamma_order(&params) != gamma.len() as u128 {
                                failures.push(format!("{tag}: order {} vs {}", gamma_order(&params), gamma.len()));
                            }
                            let cps: HashSet<Poly> =
                                gamma.iter().map(|e| to_matrix(e, n).charpoly(&k)).collect();
                            for p in &monic_polys {
                                if is_charpoly_of_gamma(&params, p, &k).unwrap() != cps.contains(p) {
                                    failures.push(format!("{tag}: charpoly {:?}", p.raw()));
                                }
                            }
                            for e in &all_n[n] {
                                let mtx = to_matrix(e, n);
                                if mtx.det(&k).is_zero() {
                                    continue;
                                }
                                if gamma_contains(&params, &mtx, &k).unwrap() != gamma.contains(e) {
                                    failures.push(format!("{tag}: membership"));
                                    break;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures.is_empty() && elapsed < CRIT4_LIMIT,
        format!("{cases} parameter sets, {} failures{}, {elapsed:.2?}", failures.len(), first(&failures)),
    )
}

fn crit5() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for (q, n, b) in [(2u64, 2usize, 2usize), (3, 2, 2), (2, 4, 2)] {
        let count = count_c3_charpolys(q, n, b, true).unwrap();
        let (k, gens) = embedded_gl_generators(q, n, b).unwrap();
        let brute = charpoly_set_bruteforce(&gens, &k, 1_000_000).unwrap();
        let brute_nonzero = brute.iter().filter(|p| !p.coeff(0).is_zero()).count() as u128;
        pass &= count == brute_nonzero;
        if (q, n, b) == (2, 2, 2) {
            pass &= count == 2;
        }
        lines.push(format!("({q},{n},{b}): {count} vs {brute_nonzero}"));
    }
    outcome(pass, lines.join(", "))
}

fn crit6() -> Outcome {
    let mut samples = 0;
    let mut audited = 0;
    let mut violations = 0;
    let mut mismatches = 0;
    let mut examples = Vec::new();
    for d in [1usize, 2] {
        let cfg = ExperimentConfig::from_json(&format!(
            r#"{{"q":2,"d":{d},"n_values":[3,4,5,6,7,8],"trials":600,"r_max":3,"seed":6,"mode":"theorem2","cross_check":true}}"#
        ))
        .unwrap();
        let rep = run_theorem_experiment(&cfg).unwrap();
        for row in &rep.rows {
            samples += row.samples;
            audited += row.conditioned;
            violations += row.violations;
            mismatches += row.content_mismatches;
        }
        examples.extend(rep.violation_examples);
    }
    outcome(
        audited >= 5000 && violations == 0 && mismatches == 0,
        format!("{samples} samples, {audited} separable audited, {violations} violations, {mismatches} content mismatches{}", first(&examples)),
    )
}

fn crit7() -> Outcome {
    let start = Instant::now();
    let cfg = ExperimentConfig::from_json(&format!(
        r#"{{"q":2,"d":1,"n_values":[4,8],"trials":2000,"r_max":{CRIT7_R_MAX},"seed":7,"mode":"theorem1"}}"#
    ))
    .unwrap();
    let rep = run_theorem_experiment(&cfg).unwrap();
    let (r4, r8) = (&rep.rows[0], &rep.rows[1]);
    let trend = r8.evidence.estimate > r4.evidence.estimate;
    let q2 = 0.25;
    let decay = r8.divisor_failures.ci_low <= q2 * r4.divisor_failures.ci_high;
    let elapsed = start.elapsed();
    outcome(
        trend && decay && rep.violations() == 0 && elapsed < CRIT7_LIMIT,
        format!(
            "r_max={CRIT7_R_MAX}: evidence n=4 {:.4} [{:.4},{:.4}] ({} cond), n=8 {:.4} [{:.4},{:.4}] ({} cond); divisor failures {}/{} vs {}/{}; {elapsed:.2?}",
            r4.evidence.estimate, r4.evidence.ci_low, r4.evidence.ci_high, r4.conditioned,
            r8.evidence.estimate, r8.evidence.ci_low, r8.evidence.ci_high, r8.conditioned,
            r4.divisor_failures.successes, r4.divisor_failures.trials,
            r8.divisor_failures.successes, r8.divisor_failures.trials,
        ),
    )
}

fn crit8() -> Outcome {
    let k = Field::of_order(3).unwrap();
    let ctx = SweepContext::new(3, 6, 1, 0).unwrap();
    assert!(ctx.exhaustive.iter().all(|&e| e));
    let a0s = [
        Poly::from_raw(&[0, 1]),
        Poly::from_raw(&[1, 1]),
        Poly::from_raw(&[2, 1, 2]),
        Poly::from_raw(&[1]),
        Poly::from_raw(&[2]),
    ];
    let (mut cells, mut checked, mut mismatches) = (0, 0, Vec::new());
    for (ai, a0) in a0s.iter().enumerate() {
        for n in 1..=5usize {
            for eta in 0..=1usize.min(n) {
                // η = n needs f = h, so a_0 constant; a constant a_0 with n - η = 1
                // makes g, hence f, constant in t and forces η = n
                if (eta == n && !a0.is_constant()) || (a0.is_constant() && n - eta == 1) {
                    continue;
                }
                cells += 1;
                let mut built = 0;
                for trial in 0..3u64 {
                    let mut rng = ChaCha8Rng::seed_from_u64((ai as u64) << 16 | (n as u64) << 8 | (eta as u64) << 4 | trial);
                    let Some(f) = construct_with_content(&k, 2, n, eta, a0, &mut rng).unwrap() else { continue };
                    built += 1;
                    checked += 1;
                    let cmp = delta_image_empirical(&f, &ctx).unwrap();
                    if !cmp.matches {
                        mismatches.push(format!("a0={:?} n={n} eta={eta}", a0.raw()));
                    }
                }
                if built == 0 {
                    mismatches.push(format!("a0={:?} n={n} eta={eta}: no construction", a0.raw()));
                }
            }
        }
    }
    outcome(mismatches.is_empty(), format!("{cells} cells, {checked} polynomials, {} mismatches{}", mismatches.len(), first(&mismatches)))
}

fn crit9() -> Outcome {
    let mut pass = true;
    let mut lines = Vec::new();
    for q in [2u64, 3, 4, 5] {
        let k = Field::of_order(q).unwrap();
        for (name, raw) in [("t", vec![0u32, 1]), ("t+1", vec![1, 1]), ("t^2+t+1", vec![1, 1, 1])] {
            let u = Poly::from_raw(&raw);
            match norm_r0_search(&u, &k, NORM_SEARCH_MIN_DEGREE) {
                Ok(s) => {
                    let ok = s.r0.is_some_and(|r0| {
                        (r0..=r0 + 2).all(|r| s.checks.iter().any(|c| c.r == r && c.all_witnessed))
                    }) && s.never_witnessed.is_empty()
                        && s.max_degree() >= NORM_SEARCH_MIN_DEGREE;
                    pass &= ok;
                    lines.push(format!("q={q} u={name}: r0={:?} (through r={})", s.r0, s.max_degree()));
                }
                Err(e) => lines.push(format!("q={q} u={name}: skipped ({e})")),
            }
        }
    }
    outcome(pass, lines.join("; "))
}

fn crit10() -> Outcome {
    let k5 = Field::of_order(5).unwrap();
    let coeffs = [Poly::from_raw(&[0, 1]), Poly::zero()];
    let worked = spec_fact_search(&coeffs, &[1, 1], &k5).unwrap() == Some(Fe(1))
        && spec_fact_search(&coeffs, &[2], &k5).unwrap() == Some(Fe(2));
    let mut pass = worked;
    let mut lines = vec![format!("worked example {}", if worked { "ok" } else { "wrong" })];
    for q in [5u64, 7, 8] {
        let cfg = ExperimentConfig::from_json(&format!(
            r#"{{"q":{q},"d":1,"n_values":[2,3],"trials":10000,"r_max":1,"seed":10,"mode":"specfact"}}"#
        ))
        .unwrap();
        for row in spec_fact_statistics(&cfg).unwrap().rows {
            let a = SPECFACT_A.iter().find(|(n, _)| *n == row.n).unwrap().1;
            let bound = 1.0 - a / q as f64;
            pass &= row.all_partitions.estimate >= bound;
            lines.push(format!(
                "q={q} n={} {} {:.4} (A_obs={:.3}, A={a})",
                row.n,
                if row.exhaustive { "exhaustive" } else { "sampled" },
                row.all_partitions.estimate,
                row.a_estimate
            ));
        }
    }
    outcome(pass, lines.join("; "))
}

fn crit11() -> Outcome {
    let (q, d, n) = (2u64, 1usize, 3usize);
    let k = Field::of_order(q).unwrap();
    let mut hs = vec![AdditivePoly::x(q)];
    for eta in 1..=n {
        for code in 0..q.pow(eta as u32 - 1) {
            let mut lower = vec![Fe::ONE];
            lower.extend((1..eta).map(|i| Fe((code / q.pow(i as u32 - 1) % q) as u32)));
            hs.push(AdditivePoly::from_tilde(q, &Poly::monic_from_lower(&lower)));
        }
    }
    let mut exhaustive_ok = true;
    let mut cells = 0;
    for a0 in [Poly::from_raw(&[1]), Poly::from_raw(&[0, 1]), Poly::from_raw(&[1, 1])] {
        let mut total = 0;
        for h in &hs {
            let brute = family_count_bruteforce(&k, d, n, h, &a0).unwrap();
            exhaustive_ok &= brute == exact_family_count(&k, d, n, h, &a0).unwrap();
            total += brute;
            cells += 1;
        }
        exhaustive_ok &= total == 1 << ((d + 1) * (n - 1));
    }
    let cfg = ExperimentConfig::from_json(
        r#"{"q":2,"d":1,"n_values":[8],"trials":20000,"r_max":1,"seed":13,"mode":"content"}"#,
    )
    .unwrap();
    let rep = content_distribution(&cfg).unwrap();
    let worst = rep
        .rows
        .iter()
        .filter(|r| !r.degenerate)
        .map(|r| r.z_normalized.abs())
        .fold(0.0, f64::max);
    let degenerate = rep.rows.iter().find(|r| r.degenerate).unwrap();
    outcome(
        exhaustive_ok && worst <= CONTENT_Z,
        format!(
            "{cells} exhaustive cells {}; n=8 max |z| = {worst:.2} over {} conditioned (degenerate eta=8 cell z = {:.2}, flagged)",
            if exhaustive_ok { "agree" } else { "DISAGREE" },
            degenerate.conditioned,
            degenerate.z_normalized
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("Frobenius matrix determinant and characteristic polynomial", crit1),
        ("additive gcd via associated polynomials", crit2),
        ("height inequality on composites", crit3),
        ("Gamma order and characteristic polynomials vs enumeration", crit4),
        ("field-extension class characteristic polynomial count", crit5),
        ("upper containment audit", crit6),
        ("evidence trend in n", crit7),
        ("determinant image", crit8),
        ("norm surjectivity", crit9),
        ("specialized factorization patterns", crit10),
        ("content distribution", crit11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        println!("criterion {:>2} [{}] {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += (!o.pass) as u32;
    }
    println!("{} of {} criteria passed", criteria.len() as u32 - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn first<T: std::fmt::Debug>(v: &[T]) -> String {
    v.first().map_or(String::new(), |x| format!(" (first: {x:?})"))
}
