use qadditive::additive::find_additive_divisors;
use qadditive::experiments::{
    largeness_certificate, run_experiment, sample_additive, trial_rng, ExperimentConfig,
    SweepContext, Verdict,
};
use qadditive::{AdditivePoly, Field, Poly};

fn p(raw: &[u32]) -> Poly {
    Poly::from_raw(raw)
}

fn config(mode: &str, trials: u64) -> ExperimentConfig {
    ExperimentConfig::from_json(&format!(
        r#"{{"q":2,"d":1,"n_values":[3,4],"trials":{trials},"r_max":3,"seed":42,"mode":"{mode}"}}"#
    ))
    .unwrap()
}

#[test]
fn reports_are_reproducible() {
    for mode in ["theorem1", "theorem2", "content", "delta", "specfact"] {
        let a = run_experiment(&config(mode, 20)).unwrap();
        let b = run_experiment(&config(mode, 20)).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap(), "{mode}");
        assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap(), "{mode}");
        assert_eq!(a.violations(), 0, "{mode}");
    }
}

#[test]
fn empty_runs_have_headers_only() {
    for mode in ["theorem1", "content", "delta", "specfact"] {
        let rep = run_experiment(&config(mode, 0)).unwrap();
        assert_eq!(rep.to_csv().unwrap().lines().count(), 1, "{mode}");
    }
}

#[test]
fn sampling_respects_degree_bound() {
    for t in 0..50 {
        let f = sample_additive(3, 2, 4, &mut trial_rng(1, 4, t));
        assert!(f.is_monic() && f.n() == 4);
        assert!(f.deg_t() <= 2);
    }
}

#[test]
fn irreducible_reduction_at_zero() {
    // a(0, X) = X^3 + X + 1 is irreducible over F_2
    let k = Field::of_order(2).unwrap();
    let f = AdditivePoly::monic_from_lower(2, vec![p(&[1, 1]), p(&[1]), p(&[0, 1])]);
    let ctx = SweepContext::new(2, 1, 16, 0).unwrap();
    let cert = largeness_certificate(&f, 1, &ctx).unwrap();
    assert_eq!(cert.eta, 0);
    assert!(cert.irreducible_found);
    assert!(cert.upper_bound_ok);
    assert!(find_additive_divisors(&f, 1, &k).unwrap().divisors.is_empty());
}

#[test]
fn composite_has_divisor() {
    let k = Field::of_order(2).unwrap();
    let inner = AdditivePoly::monic_from_lower(2, vec![p(&[0, 1])]);
    let outer = AdditivePoly::monic_from_lower(2, vec![p(&[0, 1])]);
    let f = outer.compose(&inner, &k).unwrap();
    assert_eq!(f, AdditivePoly::monic_from_lower(2, vec![p(&[0, 0, 1]), p(&[0, 1, 1])]));
    let ctx = SweepContext::new(2, 4, 16, 0).unwrap();
    let cert = largeness_certificate(&f, 2, &ctx).unwrap();
    assert!(!cert.no_divisor);
    assert_ne!(cert.verdict, Verdict::EvidenceGamma);
    assert!(cert.upper_bound_ok);
    let found = find_additive_divisors(&f, 2, &k).unwrap().divisors;
    assert_eq!(found, vec![inner]);
}

#[test]
fn sampled_sweeps_are_deterministic() {
    // 2^17 exceeds the enumeration limit, so degree 17 is sampled
    let a = SweepContext::new(2, 17, 64, 5).unwrap();
    let b = SweepContext::new(2, 17, 64, 5).unwrap();
    assert!(!a.exhaustive[16] && a.exhaustive[15]);
    assert_eq!(a.places[16], b.places[16]);
    assert_eq!(a.places[16].len(), 64);
}
