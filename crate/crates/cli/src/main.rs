//! `qde`: command-line front end for the qde-core computations.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or input error.

use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use qde_core::cohmodel::{BlockId, SpaceId, SpaceModel};
use qde_core::config::{OutputFormat, RunConfig};
use qde_core::dmod::{exp_type_report, main_block_connection, y_block_connection, DiffOperator, FormalConnection};
use qde_core::exactcore::{int, parse_rational, rat_to_string, BigReal, Rational};
use qde_core::gammalimit::{limit_report, Extrapolation};
use qde_core::jfun::{j_coeff, twistor_j_coeff, DescendantTable};
use qde_core::mzv::{stuffle_expand, zeta_limit_with, MzvIndex, SumKind, SymSumIndex, ZetaScan};
use qde_core::peaks::{scan, scan_csv, series_params, ScalingSequence};
use qde_core::verify;

const SCHEMA: &str = "qde-report/1";

#[derive(Parser)]
#[command(name = "qde", version, about = "Quantum differential equation computations and checks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Significant digits for high-precision reals.
    #[arg(long, global = true, env = "QDE_PRECISION", default_value_t = 50)]
    precision: u32,
    /// Seed for randomized choices (cyclic vector candidates, basis changes).
    #[arg(long, global = true, env = "QDE_SEED", default_value_t = 0x5eed)]
    seed: u64,
    /// Worker threads for independent samples.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Largest d summed in exact rationals before switching to high-precision reals.
    #[arg(long, global = true, default_value_t = 2000)]
    crossover: u64,
    /// Output encoding.
    #[arg(long, global = true, value_parser = ["json", "csv"])]
    format: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Cohomology models.
    Qh {
        #[command(subcommand)]
        cmd: QhCmd,
    },
    /// Partial multiple zeta values.
    Mzv {
        #[command(subcommand)]
        cmd: MzvCmd,
    },
    /// J-function coefficients.
    Jfun {
        #[command(subcommand)]
        cmd: JfunCmd,
    },
    /// Apéry limits and the Gamma class.
    Gamma {
        #[command(subcommand)]
        cmd: GammaCmd,
    },
    /// Laplace-method diagnostics for power series.
    Peaks {
        #[command(subcommand)]
        cmd: PeaksCmd,
    },
    /// Irregularity of connections and operators.
    Dmod {
        #[command(subcommand)]
        cmd: DmodCmd,
    },
    /// Runs the full verification suite.
    VerifyAll {
        /// Restrict to the checks concerning one space.
        #[arg(long)]
        space: Option<String>,
        /// Comma-separated criterion numbers.
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<u32>>,
    },
}

#[derive(Subcommand)]
enum QhCmd {
    /// Basis, structure constants, characteristic classes and quantum blocks.
    Dump {
        #[arg(long)]
        space: String,
        #[arg(long, default_value = "1")]
        q: String,
        #[arg(long, default_value = "1")]
        chi: String,
        /// Real degree of the odd class spanning the twistor y-block.
        #[arg(long, default_value_t = 2)]
        m: u32,
    },
}

#[derive(Subcommand)]
enum MzvCmd {
    /// Partial value ζ_d(s₁,…,s_k), with a limit bracket when convergent.
    Eval {
        #[arg(long)]
        index: String,
        #[arg(long)]
        d: u64,
    },
    /// Weak symmetric sum S(s₁,…,s_k) as a combination of strict ones.
    Expand {
        #[arg(long)]
        sym: String,
    },
}

#[derive(Subcommand)]
enum JfunCmd {
    Coeff {
        #[arg(long)]
        space: String,
        #[arg(long)]
        d: u64,
        /// Divide by the point coefficient.
        #[arg(long)]
        normalized: bool,
        /// Euler number used in the twistor assembly.
        #[arg(long, default_value = "1")]
        chi: String,
    },
}

#[derive(Subcommand)]
enum GammaCmd {
    /// Verdict table for R_{i,n} against log Γ.
    Verify {
        #[arg(long)]
        space: String,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "10")]
        tolerance_scale: String,
        /// One Richardson step from samples at n/2 and n.
        #[arg(long)]
        richardson: bool,
        #[arg(long, default_value_t = 6)]
        i_max: u32,
    },
}

#[derive(Subcommand)]
enum PeaksCmd {
    /// Head/tail ratios, peaking defect and Stokes ratio on a grid of x.
    Scan {
        #[arg(long, value_delimiter = ',', default_value = "")]
        alphas: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "")]
        a: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        betas: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        b: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        x: Vec<String>,
        #[arg(long, default_value = "2/5")]
        nu: String,
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// constant, harmonic, symsum:s1,...,sk or logpow:j
        #[arg(long, default_value = "harmonic")]
        bseq: String,
    },
}

#[derive(Subcommand)]
enum DmodCmd {
    /// Exponential-type classification of a quantum block.
    Report {
        #[arg(long)]
        space: String,
        /// full, main, y or y:m
        #[arg(long)]
        block: String,
        #[arg(long, default_value = "1")]
        q: String,
        #[arg(long, default_value = "1")]
        chi: String,
    },
    /// Irregularity of a scalar operator such as "d2:1; d1:u^-2; d0:u^3".
    Irr {
        #[arg(long)]
        operator: String,
    },
}

/// A failure to report: `Usage` exits 2, `Check` exits 1.
enum Failure {
    Usage(anyhow::Error),
    Check,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code.clamp(0, 255) as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn flag<T>(name: &str, r: qde_core::Result<T>) -> anyhow::Result<T> {
    r.with_context(|| format!("invalid value for --{name}"))
}

fn rational(name: &str, s: &str) -> anyhow::Result<Rational> {
    flag(name, parse_rational(s))
}

fn rationals(name: &str, v: &[String]) -> anyhow::Result<Vec<Rational>> {
    v.iter().filter(|s| !s.trim().is_empty()).map(|s| rational(name, s)).collect()
}

fn space(name: &str, s: &str) -> anyhow::Result<SpaceId> {
    flag(name, SpaceId::parse(s))
}

fn config(g: &Global) -> anyhow::Result<RunConfig> {
    let cfg = RunConfig {
        precision: g.precision,
        crossover: g.crossover,
        seed: g.seed,
        workers: g.workers,
        format: match g.format.as_deref() {
            Some("csv") => OutputFormat::Csv,
            _ => OutputFormat::Json,
        },
        ..RunConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

/// A high-precision real with its working precision.
#[derive(Serialize)]
struct Real {
    value: String,
    precision: u32,
}

fn real(x: &BigReal) -> Real {
    Real {
        value: x.to_sci_string(x.prec()),
        precision: x.prec(),
    }
}

fn rats(v: &[Rational]) -> Vec<String> {
    v.iter().map(rat_to_string).collect()
}

fn emit(command: &str, cfg: &RunConfig, result: Value) {
    let doc = json!({
        "schema": SCHEMA,
        "command": command,
        "config": {
            "precision": cfg.precision,
            "seed": cfg.seed,
            "crossover": cfg.crossover,
        },
        "result": result,
    });
    out(&format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializable")));
}

/// Writes to stdout, tolerating a closed pipe.
fn out(s: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn run(cli: Cli) -> Outcome {
    let cfg = config(&cli.global)?;
    match cli.command {
        Command::Qh { cmd: QhCmd::Dump { space: s, q, chi, m } } => qh_dump(&cfg, &s, &q, &chi, m),
        Command::Mzv { cmd } => match cmd {
            MzvCmd::Eval { index, d } => mzv_eval(&cfg, &index, d),
            MzvCmd::Expand { sym } => mzv_expand(&cfg, &sym),
        },
        Command::Jfun { cmd: JfunCmd::Coeff { space: s, d, normalized, chi } } => jfun_coeff(&cfg, &s, d, normalized, &chi),
        Command::Gamma { cmd: GammaCmd::Verify { space: s, n, tolerance_scale, richardson, i_max } } => {
            gamma_verify(&cfg, &s, n, &tolerance_scale, richardson, i_max)
        }
        Command::Peaks { cmd: PeaksCmd::Scan { alphas, a, betas, b, x, nu, k, bseq } } => {
            peaks_scan(&cfg, &alphas, &a, &betas, &b, &x, &nu, k, &bseq)
        }
        Command::Dmod { cmd } => match cmd {
            DmodCmd::Report { space: s, block, q, chi } => dmod_report(&cfg, &s, &block, &q, &chi),
            DmodCmd::Irr { operator } => dmod_irr(&cfg, &operator),
        },
        Command::VerifyAll { space: s, criteria } => verify_all(&cfg, s.as_deref(), criteria),
    }
}

fn qh_dump(cfg: &RunConfig, s: &str, q: &str, chi: &str, m: u32) -> Outcome {
    let id = space("space", s)?;
    let q = rational("q", q)?;
    let chi = rational("chi", chi)?;
    let model = SpaceModel::new(id);
    let n = model.dim();
    let mut products = Vec::new();
    for i in 0..n {
        for j in i..n {
            let p = model.product_of_basis(i, j);
            if p.iter().any(|c| *c != int(0)) {
                products.push(json!({ "i": i, "j": j, "product": rats(&p) }));
            }
        }
    }
    let blocks = match id {
        SpaceId::Cpn(_) => vec![BlockId::Full],
        SpaceId::Twistor => vec![BlockId::Main, BlockId::YBlock { m }],
    };
    let mut qblocks = Vec::new();
    for b in blocks {
        let qb = flag("space", model.quantum_block(b, &q, &chi))?;
        qblocks.push(json!({
            "block": b.to_string(),
            "labels": qb.labels,
            "c1_star": qb.c1_star.to_rows().iter().map(|r| rats(r)).collect::<Vec<_>>(),
            "mu": rats(&qb.mu),
        }));
    }
    let gamma: Vec<Real> = model.gamma_class(cfg.precision).coeffs.iter().map(real).collect();
    emit(
        "qh dump",
        cfg,
        json!({
            "space": id.to_string(),
            "q": rat_to_string(&q),
            "chi": rat_to_string(&chi),
            "basis": model.basis.iter().map(|b| json!({ "label": b.label, "degree": b.degree })).collect::<Vec<_>>(),
            "structure_constants": products,
            "pairing": rats(&model.pairing),
            "c1": rats(&model.c1),
            "chern_character": model.chern_character.iter().map(|c| rats(c)).collect::<Vec<_>>(),
            "gamma_class": gamma,
            "quantum_blocks": qblocks,
        }),
    );
    Ok(())
}

fn mzv_eval(cfg: &RunConfig, index: &str, d: u64) -> Outcome {
    let idx = flag("index", MzvIndex::parse(index))?;
    let mut scan = ZetaScan::new(SumKind::Strict, &[idx.0.clone()], cfg.crossover, cfg.precision);
    scan.advance_to(d);
    let exact = scan.exact(&idx.0).map(|r| rat_to_string(&r));
    let value = real(&scan.value(&idx.0));
    let limit = if idx.is_convergent() {
        let l = flag("index", zeta_limit_with(&idx, d.max(1), cfg.crossover, cfg.precision))?;
        json!({ "lower": real(&l.lower()), "upper": real(&l.upper()) })
    } else {
        Value::Null
    };
    emit(
        "mzv eval",
        cfg,
        json!({ "index": idx.to_string(), "d": d, "exact": exact, "value": value, "limit": limit }),
    );
    Ok(())
}

fn mzv_expand(cfg: &RunConfig, sym: &str) -> Outcome {
    let idx = flag("sym", SymSumIndex::parse(sym))?;
    let e = stuffle_expand(&idx);
    let terms: Vec<Value> = e
        .terms()
        .map(|(k, c)| json!({ "index": k.to_string(), "coefficient": rat_to_string(c) }))
        .collect();
    emit("mzv expand", cfg, json!({ "sym": idx.to_string(), "expansion": e.to_string(), "terms": terms }));
    Ok(())
}

fn jfun_coeff(cfg: &RunConfig, s: &str, d: u64, normalized: bool, chi: &str) -> Outcome {
    let id = space("space", s)?;
    let chi = rational("chi", chi)?;
    let j = match id {
        SpaceId::Twistor => {
            if chi == int(0) {
                return Err(anyhow::anyhow!("invalid value for --chi: must be nonzero").into());
            }
            let mut t = DescendantTable::new(chi.clone());
            flag("d", twistor_j_coeff(d, &chi, &mut t))?
        }
        SpaceId::Cpn(_) => flag("d", j_coeff(id, d))?,
    };
    let model = SpaceModel::new(id);
    let v = if normalized { &j.normalized } else { &j.raw };
    let coeffs: Vec<Value> = model
        .basis
        .iter()
        .zip(&v.coeffs)
        .map(|(b, c)| json!({ "basis": b.label, "value": rat_to_string(c) }))
        .collect();
    emit(
        "jfun coeff",
        cfg,
        json!({
            "space": id.to_string(),
            "d": d,
            "chi": if id == SpaceId::Twistor { Some(rat_to_string(&chi)) } else { None },
            "normalized": normalized,
            "coefficients": coeffs,
        }),
    );
    Ok(())
}

fn gamma_verify(cfg: &RunConfig, s: &str, n: u64, scale: &str, richardson: bool, i_max: u32) -> Outcome {
    let id = space("space", s)?;
    let scale = qde_core::exactcore::rat_to_f64(&rational("tolerance-scale", scale)?);
    if n < 2 {
        return Err(anyhow::anyhow!("invalid value for --n: must be at least 2").into());
    }
    let (schedule, method) = if richardson {
        (vec![n / 2, n], Extrapolation::Richardson)
    } else {
        (vec![n], Extrapolation::None)
    };
    let r = limit_report(id, i_max, &schedule, method, scale, cfg.crossover, cfg.precision);
    let pass = r.all_pass();
    emit("gamma verify", cfg, to_value(&r));
    if pass {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

#[allow(clippy::too_many_arguments)]
fn peaks_scan(
    cfg: &RunConfig,
    alphas: &[String],
    a: &[String],
    betas: &[String],
    b: &[String],
    xs: &[String],
    nu: &str,
    k: u32,
    bseq: &str,
) -> Outcome {
    let p = cfg.precision;
    let params = flag(
        "betas",
        series_params(&rationals("alphas", alphas)?, &rationals("a", a)?, &rationals("betas", betas)?, &rationals("b", b)?, p),
    )?;
    let nu = rational("nu", nu)?;
    if nu < int(0) || nu > Rational::new(1.into(), 2.into()) {
        return Err(anyhow::anyhow!("invalid value for --nu: must lie in [0, 1/2]").into());
    }
    let bseq = flag("bseq", ScalingSequence::parse(bseq))?;
    let xs: Vec<BigReal> = rationals("x", xs)?.iter().map(|x| BigReal::from_rational(x, p)).collect();
    if xs.is_empty() || xs.iter().any(|x| x.signum() <= 0) {
        return Err(anyhow::anyhow!("invalid value for --x: need positive values").into());
    }
    let rows = scan(&params, &xs, &nu, &bseq, k);
    match cfg.format {
        OutputFormat::Csv => out(&scan_csv(&rows)),
        OutputFormat::Json => emit(
            "peaks scan",
            cfg,
            json!({ "kappa": rat_to_string(&params.kappa), "theta": rat_to_string(&params.theta), "nu": rat_to_string(&nu), "bseq": bseq.to_string(), "k": k, "rows": rows }),
        ),
    }
    Ok(())
}

fn dmod_report(cfg: &RunConfig, s: &str, block: &str, q: &str, chi: &str) -> Outcome {
    let id = space("space", s)?;
    let block = flag("block", BlockId::parse(block))?;
    let q = rational("q", q)?;
    let chi = rational("chi", chi)?;
    let conn = match (id, block) {
        (SpaceId::Twistor, BlockId::YBlock { m }) => y_block_connection(m, &q),
        (SpaceId::Twistor, BlockId::Main) => main_block_connection(&q, &chi),
        _ => FormalConnection::quantum(id, block, &q, &chi),
    };
    let conn = flag("block", conn)?;
    let r = exp_type_report(&conn, cfg.seed).map_err(|e| anyhow::anyhow!("classification failed: {e}"))?;
    emit("dmod report", cfg, to_value(&r));
    Ok(())
}

fn dmod_irr(cfg: &RunConfig, src: &str) -> Outcome {
    let l = flag("operator", DiffOperator::parse(src))?;
    emit(
        "dmod irr",
        cfg,
        json!({ "operator": l.to_string(), "order": l.order(), "coefficients": l.coeff_strings(), "irregularity": l.irregularity() }),
    );
    Ok(())
}

fn verify_all(cfg: &RunConfig, s: Option<&str>, criteria: Option<Vec<u32>>) -> Outcome {
    let sp = s.map(|s| space("space", s)).transpose()?;
    let ids = match criteria {
        Some(ids) => {
            if let Some(bad) = ids.iter().find(|i| !verify::CRITERIA.contains(i)) {
                return Err(anyhow::anyhow!("invalid value for --criteria: no criterion {bad}").into());
            }
            ids
        }
        None => verify::criteria_for(sp),
    };
    let reports = verify::verify_all(cfg, &ids);
    for r in &reports {
        let tag = if r.pass { "PASS" } else { "FAIL" };
        eprintln!("[{tag}] criterion {}: {}", r.id, r.title);
    }
    let pass = reports.iter().all(|r| r.pass);
    emit(
        "verify-all",
        cfg,
        json!({ "space": sp.map(|s| s.to_string()), "pass": pass, "criteria": reports }),
    );
    if pass {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}
