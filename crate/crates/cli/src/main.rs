use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qadditive::additive::{con_t_additive, find_additive_divisors};
use qadditive::census::maximal_class_bound;
use qadditive::experiments::{
    delta_image_empirical, largeness_certificate, norm_r0_search, norm_surjectivity_check,
    partitions, run_experiment, spec_fact_search, write_reports, ExperimentConfig, SweepContext,
    Verdict, DEFAULT_TAU_BUDGET, NORM_SEARCH_MIN_DEGREE,
};
use qadditive::frobenius::charpoly_divisor_at_zero;
use qadditive::gamma::{extract_params, gamma_order, predicted_delta_image};
use qadditive::{AdditivePoly, Error, Field, Poly};

const EXIT_VIOLATION: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "qadd", version, about = "Galois groups of q-additive polynomials over F_q[t]")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Field order used by the compact polynomial syntax and by census/norms.
    #[arg(long, global = true)]
    q: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the trial count of an experiment config.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Largest specialization degree swept.
    #[arg(long, global = true)]
    rmax: Option<u32>,
    /// Output directory for experiment reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Content, group parameters, predicted determinant image and divisors of one polynomial.
    Analyze {
        /// JSON object, compact `a_0;a_1;…;a_n` string, or a file holding either.
        poly: String,
        /// Coefficient t-degree bound for the divisor search (default: deg_t f).
        #[arg(long)]
        d: Option<usize>,
    },
    /// Largeness certificate from a specialization sweep.
    Certify {
        poly: String,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_TAU_BUDGET)]
        tau_budget: u64,
    },
    /// Run an experiment config and write report.csv and report.json.
    Experiment { config: PathBuf },
    /// Per-class bounds on characteristic polynomials of maximal subgroups.
    Census {
        /// Matrix sizes, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Universal constant for the C4–C8 bound.
        #[arg(long, default_value_t = 100.0)]
        c: f64,
    },
    /// Compare the predicted and observed determinant images of one polynomial.
    Delta {
        poly: String,
        #[arg(long, default_value_t = DEFAULT_TAU_BUDGET)]
        tau_budget: u64,
    },
    /// Smallest rational specialization realizing each factorization pattern.
    Specfact {
        poly: String,
        /// Restrict to one partition, e.g. `2,1`.
        #[arg(long, value_delimiter = ',')]
        partition: Option<Vec<usize>>,
    },
    /// Norm surjectivity of a monic u ∈ F_q[t] over places of degree r.
    Norms {
        /// Coefficients of u, low to high, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        u: Vec<u32>,
        /// Check a single degree instead of searching for r0.
        #[arg(long)]
        r: Option<u32>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let g = &cli.global;
    match &cli.command {
        Command::Analyze { poly, d } => analyze(g, poly, *d),
        Command::Certify { poly, d, tau_budget } => certify(g, poly, *d, *tau_budget),
        Command::Experiment { config } => experiment(g, config),
        Command::Census { n, c } => census(g, n, *c),
        Command::Delta { poly, tau_budget } => delta(g, poly, *tau_budget),
        Command::Specfact { poly, partition } => specfact(g, poly, partition.as_deref()),
        Command::Norms { u, r } => norms(g, u, *r),
    }
}

/// A polynomial given on the command line, with its field.
struct Input {
    field: Arc<Field>,
    f: AdditivePoly,
}

fn parse_input(arg: &str, q: Option<u64>) -> Result<Input> {
    let text = arg.trim();
    if text.starts_with('{') {
        return parse_json(text);
    }
    let path = Path::new(text);
    if path.is_file() {
        let body = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return parse_input(&body, q);
    }
    let q = q.context("the compact syntax needs --q")?;
    let coeffs = text
        .split(';')
        .map(|part| {
            let part = part.trim();
            if part.is_empty() {
                return Ok(Vec::new());
            }
            part.split(',')
                .map(|c| c.trim().parse::<u32>().with_context(|| format!("bad coefficient {c:?}")))
                .collect()
        })
        .collect::<Result<Vec<Vec<u32>>>>()?;
    build(q, coeffs)
}

fn parse_json(text: &str) -> Result<Input> {
    let v: Value = serde_json::from_str(text).context("invalid JSON polynomial")?;
    let q = v.get("q").and_then(Value::as_u64).context("JSON polynomial needs an integer \"q\"")?;
    let coeffs: Vec<Vec<u32>> = serde_json::from_value(
        v.get("coeffs").cloned().context("JSON polynomial needs \"coeffs\"")?,
    )
    .context("\"coeffs\" must be a list of lists of field elements")?;
    build(q, coeffs)
}

fn build(q: u64, coeffs: Vec<Vec<u32>>) -> Result<Input> {
    let field = Field::of_order(q)?;
    let polys = coeffs
        .iter()
        .map(|c| {
            for &x in c {
                field.element(x as u64)?;
            }
            Ok(Poly::from_raw(c))
        })
        .collect::<Result<Vec<_>>>()?;
    let f = AdditivePoly::new(q, polys);
    if f.is_zero() {
        return Err(Error::ZeroPolynomial.into());
    }
    if !f.is_monic() {
        return Err(Error::NotMonic.into());
    }
    if !f.is_separable() {
        return Err(Error::NotSeparable.into());
    }
    Ok(Input { field, f })
}

fn raw(p: &Poly) -> Vec<u32> {
    p.raw()
}

fn additive_raw(f: &AdditivePoly) -> Vec<Vec<u32>> {
    f.coeffs().iter().map(raw).collect()
}

fn big(x: u128) -> Value {
    u64::try_from(x).map_or_else(|_| json!(x.to_string()), |v| json!(v))
}

/// Write to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json(v: &Value) -> Result<()> {
    emit(&(serde_json::to_string_pretty(v)? + "\n"))
}

fn print_csv(header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut s = header.join(",") + "\n";
    for r in rows {
        s += &(r.join(",") + "\n");
    }
    emit(&s)
}

fn json_only(g: &Global, what: &str) -> Result<()> {
    if g.format == Some(Format::Csv) {
        bail!("{what} only supports JSON output");
    }
    Ok(())
}

fn analyze(g: &Global, poly: &str, d: Option<usize>) -> Result<u8> {
    json_only(g, "analyze")?;
    let Input { field, f } = parse_input(poly, g.q)?;
    let d = d.unwrap_or_else(|| f.deg_t());
    let h = con_t_additive(&f, &field)?;
    let params = extract_params(&f, &field)?;
    let image = predicted_delta_image(&params, &field);
    let search = find_additive_divisors(&f, d, &field)?;
    let (k0, g0) = charpoly_divisor_at_zero(&f, &field)?;
    let out = json!({
        "q": f.q,
        "n": f.n(),
        "coeffs": additive_raw(&f),
        "con_t": additive_raw(&h),
        "con_t_tilde": raw(&h.tilde()?),
        "degenerate": params.eta == params.n,
        "params": {
            "eta": params.eta,
            "c": params.c,
            "k": params.k,
            "u": params.u.as_ref().map(raw),
            "h0": params.h0,
            "multiplier": params.multiplier,
            "ord_d": params.ord_d,
            "ord_coset": params.ord_coset,
            "period": params.period,
        },
        "gamma_order": big(gamma_order(&params)),
        "predicted_delta_image": image,
        "divisor_search": {
            "d": d,
            "m_min": search.m_min,
            "coeff_degree_bound": search.coeff_degree_bound,
            "candidates_examined": search.candidates_examined,
            "closure_divisors_possible": search.closure_divisors_possible,
            "divisors": search.divisors.iter().map(additive_raw).collect::<Vec<_>>(),
        },
        "charpoly_at_zero": { "x_power": k0, "divisor": raw(&g0) },
    });
    print_json(&out)?;
    Ok(0)
}

fn certify(g: &Global, poly: &str, d: Option<usize>, tau_budget: u64) -> Result<u8> {
    json_only(g, "certify")?;
    let Input { f, .. } = parse_input(poly, g.q)?;
    let d = d.unwrap_or_else(|| f.deg_t());
    let ctx = SweepContext::new(f.q, g.rmax.unwrap_or(4), tau_budget, g.seed.unwrap_or(0))?;
    let cert = largeness_certificate(&f, d, &ctx)?;
    print_json(&serde_json::to_value(&cert)?)?;
    Ok(if cert.verdict == Verdict::Violation { EXIT_VIOLATION } else { 0 })
}

fn experiment(g: &Global, path: &Path) -> Result<u8> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut cfg: ExperimentConfig = serde_json::from_str(&text).context("invalid experiment config")?;
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(t) = g.trials {
        cfg.trials = t;
    }
    if let Some(r) = g.rmax {
        cfg.r_max = r;
    }
    cfg.validate()?;
    let report = run_experiment(&cfg)?;
    let out = g.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let (csv_path, json_path) = write_reports(&report, &out)?;
    match g.format.unwrap_or(Format::Csv) {
        Format::Csv => emit(&report.to_csv()?)?,
        Format::Json => emit(&(report.to_json()? + "\n"))?,
    }
    let violations = report.violations();
    eprintln!("wrote {} and {}", csv_path.display(), json_path.display());
    if violations > 0 {
        eprintln!("{violations} violations");
        return Ok(EXIT_VIOLATION);
    }
    Ok(0)
}

fn census(g: &Global, ns: &[usize], c: f64) -> Result<u8> {
    let q = g.q.context("census needs --q")?;
    let reports = ns.iter().map(|&n| maximal_class_bound(q, n, c)).collect::<Result<Vec<_>, _>>()?;
    match g.format.unwrap_or(Format::Csv) {
        Format::Json => print_json(&serde_json::to_value(&reports)?)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .flat_map(|r| {
                    r.c3_identity.iter().map(move |&(b, count)| {
                        vec![
                            r.q.to_string(),
                            r.n.to_string(),
                            b.to_string(),
                            count.to_string(),
                            format!("{:.6e}", r.c2),
                            format!("{:.6e}", r.c3_cosets),
                            format!("{:.6e}", r.c4_c8),
                        ]
                    })
                })
                .collect();
            print_csv(&["q", "n", "b", "count", "c2_bound", "c3_coset_bound", "c4_c8_bound"], &rows)?;
        }
    }
    Ok(0)
}

fn delta(g: &Global, poly: &str, tau_budget: u64) -> Result<u8> {
    json_only(g, "delta")?;
    let Input { f, .. } = parse_input(poly, g.q)?;
    let ctx = SweepContext::new(f.q, g.rmax.unwrap_or(4), tau_budget, g.seed.unwrap_or(0))?;
    let cmp = delta_image_empirical(&f, &ctx)?;
    print_json(&serde_json::to_value(&cmp)?)?;
    Ok(if cmp.contained { 0 } else { EXIT_VIOLATION })
}

fn specfact(g: &Global, poly: &str, partition: Option<&[usize]>) -> Result<u8> {
    let Input { field, f } = parse_input(poly, g.q)?;
    let n = f.n();
    let lower = &f.coeffs()[..n];
    let parts = match partition {
        Some(p) => vec![p.to_vec()],
        None => partitions(n),
    };
    let found = parts
        .iter()
        .map(|p| Ok((p.clone(), spec_fact_search(lower, p, &field)?)))
        .collect::<Result<Vec<_>>>()?;
    match g.format.unwrap_or(Format::Csv) {
        Format::Json => {
            let v: Vec<Value> =
                found.iter().map(|(p, tau)| json!({ "partition": p, "tau": tau })).collect();
            print_json(&Value::Array(v))?;
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = found
                .iter()
                .map(|(p, tau)| {
                    let p = p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
                    vec![p, tau.map_or(String::new(), |t| t.0.to_string())]
                })
                .collect();
            print_csv(&["partition", "tau"], &rows)?;
        }
    }
    Ok(0)
}

fn norms(g: &Global, u: &[u32], r: Option<u32>) -> Result<u8> {
    let q = g.q.context("norms needs --q")?;
    let field = Field::of_order(q)?;
    for &x in u {
        field.element(x as u64)?;
    }
    let u = Poly::from_raw(u);
    let checks = match r {
        Some(r) => vec![norm_surjectivity_check(&u, &field, r)?],
        None => {
            let search = norm_r0_search(&u, &field, g.rmax.unwrap_or(NORM_SEARCH_MIN_DEGREE))?;
            if g.format == Some(Format::Json) {
                print_json(&serde_json::to_value(&search)?)?;
                return Ok(0);
            }
            match search.r0 {
                Some(r0) => eprintln!("r0 = {r0} (checked through r = {})", search.max_degree()),
                None => eprintln!("no stable r0 through r = {}", search.max_degree()),
            }
            search.checks
        }
    };
    if g.format == Some(Format::Json) {
        print_json(&serde_json::to_value(&checks)?)?;
        return Ok(0);
    }
    let rows: Vec<Vec<String>> = checks
        .iter()
        .flat_map(|c| {
            c.counts.iter().map(move |(b, count)| {
                vec![c.r.to_string(), b.0.to_string(), count.to_string(), c.all_witnessed.to_string()]
            })
        })
        .collect();
    print_csv(&["r", "b", "count", "all_witnessed"], &rows)?;
    Ok(0)
}
