//! `lattab`: lattice energies, derivatives and stability classification for
//! 3D Bravais lattices at fixed volume.
//!
//! Output is JSON on stdout (floating-point fields at 17 significant digits;
//! reruns of the same command produce byte-identical numeric fields). Grid
//! scans can additionally emit CSV. Exit codes: 0 success, 1 numeric failure
//! (diagnostics on stdout), 2 usage error.

mod output;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use lattab_core::calculus;
use lattab_core::lattice::{form_values, LatticeParams};
use lattab_core::potentials::Potential;
use lattab_core::special::{self, EpsteinBackend};
use lattab_core::stability::{self, Tolerances};
use lattab_core::sums::{automorphs, SumConfig, SumError};

#[derive(Parser)]
#[command(name = "lattab", version, about = "Lattice energies and stability of cubic lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Energy, gradient and Hessian of a lattice under a potential
    Calc {
        #[command(subcommand)]
        op: CalcOp,
    },
    /// Special functions (1D theta, Epstein zeta, the G/H/Y series)
    Special {
        #[command(subcommand)]
        op: SpecialOp,
    },
    /// Critical-point classification and thresholds
    Stability {
        #[command(subcommand)]
        op: StabilityOp,
    },
    /// Numerical identity checks
    Verify {
        #[command(subcommand)]
        op: VerifyOp,
    },
    /// Lattice parametrization utilities
    Lattice {
        #[command(subcommand)]
        op: LatticeOp,
    },
}

#[derive(clap::Args)]
struct PotLatArgs {
    /// Potential: gaussian:alpha=A | power:s=S | lj:a1=,a2=,x1=,x2=
    #[arg(long)]
    pot: String,
    /// Lattice: named:z3 | named:d3 | named:d3star | inline JSON {u,v,x,y,z,V}
    #[arg(long)]
    lattice: String,
    /// Unit-cell volume (overrides the lattice's V; default 1 for named)
    #[arg(long)]
    volume: Option<f64>,
    /// Absolute summation tolerance override
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum CalcOp {
    /// E = Σ' f(|p|²)
    Energy(PotLatArgs),
    /// The five partials (∂u, ∂v, ∂x, ∂y, ∂z) of the energy
    Grad(PotLatArgs),
    /// The symmetric 5×5 matrix of second partials
    Hessian(PotLatArgs),
}

#[derive(Subcommand)]
enum SpecialOp {
    /// θ₃(s) = Σ e^(-πk²s) and derivatives
    Theta3 {
        #[arg(long)]
        s: f64,
        /// 0, 1 or 2; omit for all three
        #[arg(long)]
        order: Option<u32>,
    },
    /// Epstein zeta ζ_L(2s)
    Zeta {
        #[arg(long)]
        lattice: String,
        #[arg(long)]
        volume: Option<f64>,
        #[arg(long = "two-s")]
        two_s: f64,
        /// direct | gamma
        #[arg(long, default_value = "gamma")]
        backend: String,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// G(s), H(s) and Y(s) of the FCC shell series
    Ghy {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Subcommand)]
enum StabilityOp {
    /// Classify a critical lattice by its Hessian signature
    Classify(PotLatArgs),
    /// Volume thresholds V1..V4 of the simple cubic lattice (Lennard-Jones)
    LjZ3Thresholds {
        #[arg(long)]
        pot: String,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// FCC/BCC volume window (Lennard-Jones)
    LjFccThresholds {
        #[arg(long)]
        pot: String,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Classify FCC and BCC over a log grid of Gaussian rates
    ThetaScan {
        #[arg(long, default_value_t = 1.0)]
        volume: f64,
        #[arg(long = "alpha-min", default_value_t = 0.05)]
        alpha_min: f64,
        #[arg(long = "alpha-max", default_value_t = 15.0)]
        alpha_max: f64,
        #[arg(long, default_value_t = 60)]
        points: usize,
        /// Also write one CSV row per grid point to this path
        #[arg(long)]
        csv: Option<String>,
    },
}

#[derive(Subcommand)]
enum VerifyOp {
    /// The 19 shell-sum identities of the FCC form
    Automorphs {
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 40)]
        tmax: u32,
    },
    /// The theta log-derivative identity on a log grid
    Fs1 {
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
}

#[derive(Subcommand)]
enum LatticeOp {
    /// Generating basis vectors of a lattice
    Basis {
        #[arg(long)]
        lattice: String,
        #[arg(long)]
        volume: Option<f64>,
    },
    /// Parameters of the dual lattice
    Dual {
        #[arg(long)]
        lattice: String,
        #[arg(long)]
        volume: Option<f64>,
    },
    /// The ternary forms I, R, T at an integer triple (and Q for a lattice)
    Form {
        #[arg(long)]
        m: i64,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        p: i64,
        #[arg(long)]
        lattice: Option<String>,
        #[arg(long)]
        volume: Option<f64>,
    },
}

enum CliError {
    Usage(String),
    Numeric(String, Option<Value>),
}

impl From<SumError> for CliError {
    fn from(e: SumError) -> Self {
        let partial = match &e {
            SumError::Budget { partial } => serde_json::to_value(partial).ok(),
            _ => None,
        };
        CliError::Numeric(e.to_string(), partial)
    }
}

impl From<special::SpecialError> for CliError {
    fn from(e: special::SpecialError) -> Self {
        CliError::Numeric(e.to_string(), None)
    }
}

impl From<stability::StabilityError> for CliError {
    fn from(e: stability::StabilityError) -> Self {
        CliError::Numeric(e.to_string(), None)
    }
}

fn parse_kv(body: &str) -> Result<Vec<(String, f64)>, CliError> {
    body.split(',')
        .filter(|part| !part.is_empty())
        .map(|part| {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("expected key=value, got `{part}`")))?;
            let value: f64 = v
                .parse()
                .map_err(|_| CliError::Usage(format!("`{v}` is not a number in `{part}`")))?;
            Ok((k.trim().to_string(), value))
        })
        .collect()
}

fn parse_potential(spec: &str) -> Result<Potential, CliError> {
    let (family, body) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("potential `{spec}` must look like family:k=v,…")))?;
    let kv = parse_kv(body)?;
    let get = |key: &str| -> Result<f64, CliError> {
        kv.iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| CliError::Usage(format!("potential `{spec}` is missing `{key}`")))
    };
    let pot = match family {
        "gaussian" => Potential::gaussian(get("alpha")?),
        "power" => Potential::inverse_power(get("s")?),
        "lj" => Potential::lennard_jones(get("a1")?, get("a2")?, get("x1")?, get("x2")?),
        other => return Err(CliError::Usage(format!("unknown potential family `{other}`"))),
    };
    pot.map_err(|e| CliError::Usage(e.to_string()))
}

fn parse_lattice(spec: &str, volume: Option<f64>) -> Result<LatticeParams, CliError> {
    if let Some(name) = spec.strip_prefix("named:") {
        let v = volume.unwrap_or(1.0);
        return match name {
            "z3" => Ok(LatticeParams::cubic(v)),
            "d3" => Ok(LatticeParams::fcc(v)),
            "d3star" => Ok(LatticeParams::bcc(v)),
            other => Err(CliError::Usage(format!(
                "unknown lattice name `{other}` (expected z3, d3 or d3star)"
            ))),
        };
    }
    if spec.trim_start().starts_with('{') {
        let mut params: LatticeParams = serde_json::from_str(spec)
            .map_err(|e| CliError::Usage(format!("bad lattice JSON: {e}")))?;
        if let Some(v) = volume {
            params.volume = v;
        }
        return LatticeParams::new(params.u, params.v, params.x, params.y, params.z, params.volume)
            .map_err(|e| CliError::Usage(e.to_string()));
    }
    Err(CliError::Usage(format!(
        "lattice `{spec}` must be named:z3|named:d3|named:d3star or inline JSON"
    )))
}

fn config_for(pot: &Potential, tol: Option<f64>) -> SumConfig {
    let mut cfg = stability::default_config(pot);
    if let Some(t) = tol {
        cfg.target_tol = t;
    }
    cfg
}

fn run(cli: Cli) -> Result<(Value, Option<SumConfig>), CliError> {
    match cli.command {
        Command::Calc { op } => match op {
            CalcOp::Energy(a) => {
                let pot = parse_potential(&a.pot)?;
                let params = parse_lattice(&a.lattice, a.volume)?;
                let cfg = config_for(&pot, a.tol);
                let e = calculus::energy(&pot, &params, &cfg)?;
                Ok((
                    json!({
                        "potential": pot,
                        "lattice": params,
                        "energy": e,
                    }),
                    Some(cfg),
                ))
            }
            CalcOp::Grad(a) => {
                let pot = parse_potential(&a.pot)?;
                let params = parse_lattice(&a.lattice, a.volume)?;
                let cfg = config_for(&pot, a.tol);
                let g = calculus::gradient(&pot, &params, &cfg)?;
                Ok((
                    json!({
                        "potential": pot,
                        "lattice": params,
                        "gradient": g,
                        "norm_inf": g.norm_inf(),
                    }),
                    Some(cfg),
                ))
            }
            CalcOp::Hessian(a) => {
                let pot = parse_potential(&a.pot)?;
                let params = parse_lattice(&a.lattice, a.volume)?;
                let cfg = config_for(&pot, a.tol);
                let h = calculus::hessian(&pot, &params, &cfg)?;
                Ok((
                    json!({
                        "potential": pot,
                        "lattice": params,
                        "labels": calculus::axis_labels(),
                        "rows": h.mat,
                        "eigenvalues": h.eigenvalues(),
                    }),
                    Some(cfg),
                ))
            }
        },
        Command::Special { op } => match op {
            SpecialOp::Theta3 { s, order } => {
                let all = special::theta3_all(s)?;
                match order {
                    Some(k) if k <= 2 => Ok((
                        json!({
                            "s": s,
                            "order": k,
                            "value": special::theta3(s, k)?,
                        }),
                        None,
                    )),
                    Some(k) => Err(CliError::Usage(format!("order {k} out of range 0..=2"))),
                    None => Ok((serde_json::to_value(all).unwrap(), None)),
                }
            }
            SpecialOp::Zeta { lattice, volume, two_s, backend, tol } => {
                let params = parse_lattice(&lattice, volume)?;
                let backend = match backend.as_str() {
                    "direct" => EpsteinBackend::Direct,
                    "gamma" => EpsteinBackend::GammaAccelerated,
                    other => {
                        return Err(CliError::Usage(format!(
                            "unknown backend `{other}` (direct|gamma)"
                        )))
                    }
                };
                let cfg = SumConfig::power().with_tol(tol.unwrap_or(1e-10));
                let value = special::epstein_zeta(&params, two_s, backend, &cfg)?;
                Ok((
                    json!({
                        "lattice": params,
                        "two_s": two_s,
                        "backend": backend,
                        "value": value,
                    }),
                    Some(cfg),
                ))
            }
            SpecialOp::Ghy { s, tol } => {
                let tol = tol.unwrap_or(1e-9);
                let (g, h, y) = special::ghy(s, tol)?;
                Ok((json!({ "s": s, "g": g, "h": h, "y": y, "tol": tol }), None))
            }
        },
        Command::Stability { op } => match op {
            StabilityOp::Classify(a) => {
                let pot = parse_potential(&a.pot)?;
                let params = parse_lattice(&a.lattice, a.volume)?;
                let cfg = config_for(&pot, a.tol);
                let report = stability::classify(&pot, &params, &cfg, &Tolerances::default())?;
                Ok((serde_json::to_value(&report).unwrap(), Some(cfg)))
            }
            StabilityOp::LjZ3Thresholds { pot, tol } => {
                let pot = parse_potential(&pot)?;
                let cfg = SumConfig::power().with_tol(tol.unwrap_or(1e-9));
                let ts = stability::lj_z3_thresholds(&pot, &cfg)?;
                let mut obj = serde_json::Map::new();
                for t in &ts {
                    obj.insert(t.name.clone(), json!(t.value));
                }
                obj.insert("detail".into(), serde_json::to_value(&ts).unwrap());
                Ok((Value::Object(obj), Some(cfg)))
            }
            StabilityOp::LjFccThresholds { pot, tol } => {
                let pot = parse_potential(&pot)?;
                let th = stability::lj_fcc_thresholds(&pot, tol.unwrap_or(1e-9))?;
                Ok((serde_json::to_value(th).unwrap(), None))
            }
            StabilityOp::ThetaScan { volume, alpha_min, alpha_max, points, csv } => {
                if points < 2 || alpha_min <= 0.0 || alpha_max <= alpha_min {
                    return Err(CliError::Usage(
                        "need points ≥ 2 and 0 < alpha-min < alpha-max".into(),
                    ));
                }
                let grid: Vec<f64> = (0..points)
                    .map(|i| {
                        alpha_min * (alpha_max / alpha_min).powf(i as f64 / (points - 1) as f64)
                    })
                    .collect();
                let scan = stability::theta_alpha_scan(volume, &grid)?;
                if let Some(path) = csv {
                    let mut text = String::from(
                        "alpha,beta,class_d3,class_d3star,min_eig_d3,min_eig_d3star,q_uu,q_xx,q_zz,det_uv,det_xy\n",
                    );
                    for r in &scan.rows {
                        text.push_str(&format!(
                            "{},{},{},{},{},{},{},{},{},{},{}\n",
                            output::format_f64(r.alpha),
                            output::format_f64(r.beta),
                            r.class_d3,
                            r.class_d3_star,
                            output::format_f64(r.min_eig_d3),
                            output::format_f64(r.min_eig_d3_star),
                            output::format_f64(r.q_uu),
                            output::format_f64(r.q_xx),
                            output::format_f64(r.q_zz),
                            output::format_f64(r.det_uv),
                            output::format_f64(r.det_xy),
                        ));
                    }
                    std::fs::write(&path, text)
                        .map_err(|e| CliError::Numeric(format!("cannot write {path}: {e}"), None))?;
                }
                Ok((serde_json::to_value(&scan).unwrap(), None))
            }
        },
        Command::Verify { op } => match op {
            VerifyOp::Automorphs { beta, tmax } => {
                if beta <= 0.0 || tmax == 0 {
                    return Err(CliError::Usage("need beta > 0 and tmax ≥ 1".into()));
                }
                let checks = automorphs::automorph_checks(beta, tmax);
                let worst_abs = checks.iter().map(|c| c.residual_abs).fold(0.0f64, f64::max);
                let worst_rel = checks.iter().map(|c| c.residual_rel).fold(0.0f64, f64::max);
                Ok((
                    json!({
                        "beta": beta,
                        "t_max": tmax,
                        "identities": checks,
                        "max_residual_abs": worst_abs,
                        "max_residual_rel": worst_rel,
                    }),
                    None,
                ))
            }
            VerifyOp::Fs1 { points } => {
                if points < 2 {
                    return Err(CliError::Usage("need points ≥ 2".into()));
                }
                let rows: Vec<Value> = (0..points)
                    .map(|i| {
                        let s = 0.1 * 100f64.powf(i as f64 / (points - 1) as f64);
                        json!({ "s": s, "residual": special::fs1_residual(s) })
                    })
                    .collect();
                Ok((
                    json!({ "identity": "s·θ₃'(s)/θ₃(s) + (1/s)·θ₃'(1/s)/θ₃(1/s) = -1/2", "rows": rows }),
                    None,
                ))
            }
        },
        Command::Lattice { op } => match op {
            LatticeOp::Basis { lattice, volume } => {
                let params = parse_lattice(&lattice, volume)?;
                let b = params.basis();
                Ok((
                    json!({
                        "lattice": params,
                        "v1": b.v1,
                        "v2": b.v2,
                        "v3": b.v3,
                        "det": b.det(),
                    }),
                    None,
                ))
            }
            LatticeOp::Dual { lattice, volume } => {
                let params = parse_lattice(&lattice, volume)?;
                Ok((
                    json!({
                        "lattice": params,
                        "dual": params.dual(),
                    }),
                    None,
                ))
            }
            LatticeOp::Form { m, n, p, lattice, volume } => {
                let f = form_values(m, n, p);
                let mut value = serde_json::to_value(f).unwrap();
                if let Some(spec) = lattice {
                    let params = parse_lattice(&spec, volume)?;
                    value["q"] = json!(params.quadratic_form(m, n, p));
                    value["lattice"] = serde_json::to_value(params).unwrap();
                }
                Ok((value, None))
            }
        },
    }
}

fn main() {
    if let Ok(threads) = std::env::var("LATTAB_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse(); // clap exits with code 2 on usage errors
    match run(cli) {
        Ok((result, config)) => {
            let mut manifest = json!({
                "command": argv.join(" "),
                "tool": "lattab",
                "version": env!("CARGO_PKG_VERSION"),
                "timestamp": output::utc_timestamp(),
            });
            if let Some(cfg) = config {
                manifest["config"] = serde_json::to_value(cfg).unwrap();
            }
            let wrapped = json!({ "manifest": manifest, "result": result });
            println!("{}", output::to_json_string(&wrapped));
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            std::process::exit(2);
        }
        Err(CliError::Numeric(msg, partial)) => {
            let diag = json!({
                "error": msg,
                "partial": partial,
            });
            println!("{}", output::to_json_string(&diag));
            eprintln!("numeric failure: {msg}");
            std::process::exit(1);
        }
    }
}
