use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use vorlab::characters::{alpha_of_char, characters_mod, epsilon_factor, MultiplicativeCharacter};
use vorlab::depthlab::{check_dissection, farey_dissect, lsc_grid, DepthInstance};
use vorlab::hankel::{hankel_transform, ArchimedeanType, Sign, SmoothWindow};
use vorlab::localdata::c_constant;
use vorlab::mellin::{mellin_inverse, mellin_spectrum, UnitBruhatFunction};
use vorlab::newforms::catalog;
use vorlab::report::dec;
use vorlab::voronoi::{verify_catalog, VoronoiOptions};
use vorlab::{suite, Error};

#[derive(Parser, Debug)]
#[command(name = "vorlab", version, about = "Numerical checks of the GL(2) Voronoi formula and its local ingredients")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Zero all timing fields so reruns are byte-identical.
    #[arg(long, global = true)]
    deterministic: bool,
    /// Worker threads (recorded; the computation is sequential).
    #[arg(long, global = true, env = "VORLAB_THREADS", default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate both sides of the Voronoi formula for a JSON instance.
    VerifyVoronoi {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the relative tolerance of the config.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// ε(1/2, μ) for the character of index K mod l^a.
    GaussSum {
        #[arg(long)]
        l: u64,
        #[arg(long)]
        a: u32,
        #[arg(long)]
        index: u64,
    },
    /// Max |𝔐⁻¹𝔐W − W| over random unit-supported W.
    MellinRoundtrip {
        #[arg(long)]
        l: u64,
        #[arg(long)]
        kappa: u32,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Weight-k Hankel transform of the bump on [A, B] at y.
    BesselTransform {
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        y: f64,
        /// A,B
        #[arg(long, value_parser = parse_window)]
        window: (f64, f64),
    },
    /// c-constants of one family at the prime l for every table level and twist.
    CTable {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        l: u64,
        #[arg(long, allow_hyphen_values = true)]
        t: i64,
    },
    /// Integer Fourier coefficients of a catalog form.
    Newform {
        #[arg(long)]
        name: String,
        #[arg(long)]
        n: usize,
    },
    /// Farey dissection with α taken from the character of index A mod l^e.
    FareyDissect {
        #[arg(long)]
        l: u64,
        #[arg(long)]
        q: u32,
        #[arg(long, allow_hyphen_values = true)]
        r: i32,
        #[arg(long)]
        alpha_from_char: u64,
        #[arg(long, default_value_t = 8)]
        char_exponent: u32,
    },
    /// Closed form of 𝔏_{s,c} against brute force.
    LscCheck {
        /// All c in {2, 3}; otherwise only --c.
        #[arg(long)]
        grid: bool,
        #[arg(long, default_value_t = 2)]
        c: u32,
        #[arg(long, default_value_t = 5)]
        l: u64,
        #[arg(long, default_value_t = 8)]
        n_l: u32,
        #[arg(long, default_value_t = 1)]
        q: u32,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        r: i32,
        #[arg(long, default_value_t = 1)]
        char_index: u64,
    },
    /// Run the numbered acceptance checks.
    Suite {
        /// Only this criterion.
        #[arg(long)]
        only: Option<u32>,
    },
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum Family {
    Supercuspidal,
    Steinberg,
    PsSplit,
    PsDistinct,
    PsEqual,
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected A,B")?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

/// JSON instance for verify-voronoi.
#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct VoronoiConfig {
    form: String,
    l: u64,
    a: i64,
    b: u64,
    /// W_∞ is the bump on [m, 2m].
    m: f64,
    #[serde(default)]
    theta: f64,
    #[serde(default)]
    w_l: WlConfig,
    #[serde(default)]
    options: VoronoiOptions,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
enum WlConfig {
    Indicator { kappa: u32 },
    /// μ(x) on the units for μ of the given index mod l^kappa.
    Character { kappa: u32, index: u64 },
}

impl Default for WlConfig {
    fn default() -> Self {
        WlConfig::Indicator { kappa: 1 }
    }
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        use Error::*;
        match e {
            Invalid(_) | UnsupportedPrime(_) | NotPrime(_) | Imprimitive { .. } | KappaOutOfRange { .. } | Unsupported(_)
            | TrivialCharacter | PrimeMismatch(..) | ModulusTooLarge { .. } | LevelNotCoprime { .. } | InvalidEta(_) => {
                Failure::Usage(e.to_string())
            }
            e => Failure::Compute(e.to_string()),
        }
    }
}

struct Outcome {
    config: Value,
    result: Value,
    discrepancies: Vec<Value>,
    truncation: Value,
    pass: bool,
}

impl Outcome {
    fn new(config: Value, result: Value, pass: bool) -> Self {
        Outcome { config, result, discrepancies: vec![], truncation: Value::Null, pass }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let name = command_name(&cli.command);
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(2);
        }
        Err(Failure::Compute(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(1);
        }
    };
    let timing = if cli.global.deterministic { 0 } else { start.elapsed().as_millis() };
    let mut report = json!({
        "command": name,
        "precision": "binary64, shortest round-trip decimal",
        "threads": cli.global.threads,
        "config": outcome.config,
        "result": outcome.result,
        "discrepancies": outcome.discrepancies,
        "truncation": outcome.truncation,
        "pass": outcome.pass,
        "timing_ms": timing,
    });
    decimalize(&mut report, cli.global.deterministic);
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    match &cli.global.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::VerifyVoronoi { .. } => "verify-voronoi",
        Command::GaussSum { .. } => "gauss-sum",
        Command::MellinRoundtrip { .. } => "mellin-roundtrip",
        Command::BesselTransform { .. } => "bessel-transform",
        Command::CTable { .. } => "c-table",
        Command::Newform { .. } => "newform",
        Command::FareyDissect { .. } => "farey-dissect",
        Command::LscCheck { .. } => "lsc-check",
        Command::Suite { .. } => "suite",
    }
}

/// Floats become decimal strings; timing fields are zeroed when asked.
fn decimalize(v: &mut Value, zero_timing: bool) {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            *v = Value::String(dec(n.as_f64().unwrap_or(f64::NAN)));
        }
        Value::Array(a) => a.iter_mut().for_each(|x| decimalize(x, zero_timing)),
        Value::Object(o) => {
            for (k, x) in o.iter_mut() {
                if zero_timing && (k == "runtime_ms" || k == "timing_ms") {
                    *x = json!(0);
                } else {
                    decimalize(x, zero_timing);
                }
            }
        }
        _ => {}
    }
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn execute(cmd: &Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::VerifyVoronoi { config, tolerance } => verify_voronoi(config, *tolerance),
        &Command::GaussSum { l, a, index } => {
            let mu = MultiplicativeCharacter::new(l, a, index)?;
            if !mu.is_primitive() {
                return Err(Failure::Usage(format!("character {index} mod {l}^{a} is not primitive")));
            }
            let eps = epsilon_factor(&mu)?;
            let pass = (eps.norm() - 1.0).abs() < 1e-10;
            Ok(Outcome::new(
                json!({"l": l, "a": a, "index": index}),
                json!({"character": mu, "epsilon": {"re": eps.re, "im": eps.im}, "abs": eps.norm()}),
                pass,
            ))
        }
        &Command::MellinRoundtrip { l, kappa, trials, seed } => {
            use rand::SeedableRng;
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let mut worst = 0.0f64;
            for _ in 0..trials {
                let w = UnitBruhatFunction::random(l, kappa, &mut rng)?;
                worst = worst.max(w.max_diff(&mellin_inverse(&mellin_spectrum(&w)?)?));
            }
            Ok(Outcome::new(
                json!({"l": l, "kappa": kappa, "trials": trials, "seed": seed}),
                json!({"max_error": worst}),
                worst < 1e-12,
            ))
        }
        &Command::BesselTransform { weight, y, window } => {
            let w = SmoothWindow::bump(window.0, window.1)?;
            let h = hankel_transform(&w, ArchimedeanType::discrete(weight)?, Sign::Plus, y)?;
            Ok(Outcome::new(
                json!({"weight": weight, "y": y, "window": [window.0, window.1]}),
                json!({
                    "value": {"re": h.value.re, "im": h.value.im},
                    "error_estimate": h.error_estimate,
                    "nodes": h.nodes,
                    "target_met": h.target_met,
                }),
                h.target_met,
            ))
        }
        &Command::CTable { family, l, t } => c_table(family, l, t),
        Command::Newform { name, n } => {
            let f = catalog(name, *n)?;
            let coeffs = (1..=*n as u64)
                .map(|k| f.integer_coefficient(k).map(|c| c.to_string()))
                .collect::<vorlab::Result<Vec<_>>>()?;
            Ok(Outcome::new(
                json!({"name": name, "n": n}),
                json!({"label": f.label, "level": f.level, "weight": f.weight, "coefficients": coeffs}),
                true,
            ))
        }
        &Command::FareyDissect { l, q, r, alpha_from_char, char_exponent } => {
            let chi = MultiplicativeCharacter::new(l, char_exponent, alpha_from_char)?;
            let alpha = alpha_of_char(&chi, 1)?.unit as u64;
            let d = farey_dissect(l, alpha, q, r)?;
            let check = check_dissection(&d);
            let pass = check.partition && check.unique_k && check.k_bounded;
            Ok(Outcome::new(
                json!({"l": l, "q": q, "r": r, "alpha_from_char": alpha_from_char, "char_exponent": char_exponent}),
                json!({"dissection": to_value(&d), "check": to_value(&check)}),
                pass,
            ))
        }
        &Command::LscCheck { grid, c, l, n_l, q, r, char_index } => {
            let inst = DepthInstance::new(l, n_l, char_index, q, r, 100.0)?;
            let cs: Vec<u32> = if grid { vec![2, 3] } else { vec![c] };
            let g = lsc_grid(&inst, &cs, 3)?;
            let pass = g.max_abs_diff < 1e-10;
            let mut o = Outcome::new(
                json!({"l": l, "n_l": n_l, "q": q, "r": r, "char_index": char_index, "c": cs}),
                to_value(&g),
                pass,
            );
            o.discrepancies.push(json!({"what": "uncorrected Φ formula vs brute force", "max_abs_diff": g.max_abs_diff_as_printed}));
            Ok(o)
        }
        &Command::Suite { only } => {
            let outcomes = match only {
                Some(id) => vec![suite::run(id).ok_or_else(|| Failure::Usage(format!("no criterion {id}")))?],
                None => suite::run_all(),
            };
            for o in &outcomes {
                eprintln!("{o}");
            }
            let passed = outcomes.iter().filter(|o| o.pass).count();
            Ok(Outcome::new(
                json!({"only": only}),
                json!({"criteria": to_value(&outcomes), "passed": passed, "total": outcomes.len()}),
                passed == outcomes.len(),
            ))
        }
    }
}

fn verify_voronoi(path: &PathBuf, tolerance: Option<f64>) -> Result<Outcome, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg: VoronoiConfig =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("malformed config {}: {e}", path.display())))?;
    if let Some(t) = tolerance {
        cfg.options.tolerance = t;
    }
    let w_inf = if cfg.theta == 0.0 {
        SmoothWindow::bump(cfg.m, 2.0 * cfg.m)?
    } else {
        SmoothWindow::modulated(cfg.m, 2.0 * cfg.m, cfg.theta)?
    };
    let w_l = match cfg.w_l {
        WlConfig::Indicator { kappa } => UnitBruhatFunction::indicator(cfg.l, kappa)?,
        WlConfig::Character { kappa, index } => {
            let mu = MultiplicativeCharacter::new(cfg.l, kappa, index)?;
            UnitBruhatFunction::from_fn(cfg.l, kappa, |x| mu.dirichlet(x))?
        }
    };
    let config = json!({
        "form": cfg.form, "l": cfg.l, "a": cfg.a, "b": cfg.b, "m": cfg.m, "theta": cfg.theta,
        "w_l": match cfg.w_l {
            WlConfig::Indicator { kappa } => json!({"kind": "indicator", "kappa": kappa}),
            WlConfig::Character { kappa, index } => json!({"kind": "character", "kappa": kappa, "index": index}),
        },
        "options": to_value(&cfg.options),
    });
    let rep = verify_catalog(&cfg.form, cfg.l, cfg.a, cfg.b, w_inf, w_l, cfg.options)?;
    let mut o = Outcome::new(config, to_value(&rep), rep.pass);
    o.truncation = json!({
        "c_min": rep.dual.c_min,
        "c_cut": rep.dual.c_cut,
        "tail_estimate": rep.dual.tail_estimate,
        "quadrature_error": rep.dual.quadrature_error,
        "max_m": rep.dual.max_m,
        "guard_ok": rep.dual.guard_ok,
        "policy": to_value(&rep.policy),
    });
    o.discrepancies.push(json!({"what": "|LHS − RHS| / |LHS|", "value": rep.rel_error, "tolerance": rep.tolerance}));
    Ok(o)
}

fn c_table(family: Family, p: u64, t: i64) -> Result<Outcome, Failure> {
    let reps = suite::table_representatives(p)?;
    let pi = &reps[match family {
        Family::Supercuspidal => 0,
        Family::Steinberg => 1,
        Family::PsSplit => 2,
        Family::PsDistinct => 3,
        Family::PsEqual => 4,
    }];
    let mut rows = Vec::new();
    let mut over = 0usize;
    for level in 0..=3u32 {
        for mu in characters_mod(p, 3)? {
            let entry = match c_constant(pi, level, t, &mu) {
                Ok(c) => {
                    let within = c.value.norm() <= pi.cp_bound(t) * (1.0 + 1e-12);
                    over += usize::from(!within);
                    json!({
                        "value": {"re": c.value.re, "im": c.value.im},
                        "within_bound": within,
                        "within_literal_bound": c.value.norm() <= pi.cp_bound_literal(t),
                        "provenance": to_value(&c.provenance),
                    })
                }
                Err(Error::NotAddressable(why)) => json!({"not_addressable": why}),
                Err(e) => return Err(e.into()),
            };
            rows.push(json!({"level": level, "mu": mu, "entry": entry}));
        }
    }
    Ok(Outcome::new(
        json!({"family": clap::ValueEnum::to_possible_value(&family).map(|v| v.get_name().to_string()), "l": p, "t": t}),
        json!({"representation": to_value(pi), "bound": pi.cp_bound(t), "rows": rows}),
        over == 0,
    ))
}
