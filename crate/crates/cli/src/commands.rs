use std::fmt::Write as _;
use std::path::Path;

use ffent::asymptotics::{correction_residual, fit_scaling, half_chain_profile, synthetic_points};
use ffent::chain::{energy_basis, krawtchouk_chain, ChainSpec, KrawtchoukParams};
use ffent::correlation::{chop, correlation_matrix, entropy_profile, profile_csv, FermiFilling, FillingRule, Route};
use ffent::heun::{spectrum_of_c_via_t, BispectralPair, CommutantOperator, DegeneracyPolicy};
use ffent::hypercube::{
    decomposition_entropy, direct_entropy, half_filling_energies, hypercube_operators, irrep_decomposition,
    BlockRoute, HypercubeSpectrum, MAX_DIM,
};
use ffent::scheme::{hamming_distance_matrices, SchemeFile, SchemeReport};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{
    ChainEntropyArgs, CommutantArgs, CubeEntropyArgs, LogBase, ScalingFitArgs, SchemeVerifyArgs, Via,
};
use crate::CliError;

/// Largest cube dimension for which the dense graph route is also run.
pub const MAX_DIRECT_DIM: usize = 10;
/// Largest cube dimension accepted by `scheme-verify --hamming`.
pub const MAX_SCHEME_DIM: usize = 8;
const DEFAULT_GRID: [usize; 5] = [31, 63, 127, 255, 511];

type CmdResult = Result<String, CliError>;

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing --{flag}")))
}

fn config_json<T: Serialize>(command: &str, args: &T) -> Value {
    let mut v = serde_json::to_value(args).expect("config serializes");
    if let Value::Object(map) = &mut v {
        map.insert("command".into(), Value::String(command.into()));
    }
    v
}

fn csv_header<T: Serialize>(command: &str, args: &T) -> String {
    format!(
        "# ffent {} {command}\n# config {}\n",
        env!("CARGO_PKG_VERSION"),
        config_json(command, args)
    )
}

fn json_header<T: Serialize>(command: &str, args: &T) -> Value {
    json!({
        "tool": "ffent",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config_json(command, args),
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {what} {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{what} {}: {e}", path.display())))
}

/// Shortest round-trip text, switching to exponent form for very small or
/// very large magnitudes.
fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn scale(entropy: f64, base: Option<LogBase>) -> f64 {
    match base {
        Some(LogBase::Two) => entropy / std::f64::consts::LN_2,
        _ => entropy,
    }
}

fn entropy_column(base: Option<LogBase>) -> &'static str {
    match base {
        Some(LogBase::Two) => "bits",
        _ => "nats",
    }
}

pub fn chain_entropy(args: ChainEntropyArgs) -> CmdResult {
    let via = args.via.unwrap_or(Via::Direct);
    let (spec, dual): (ChainSpec, Vec<f64>) = match &args.chain_json {
        Some(path) => {
            if args.n.is_some() || args.p.is_some() {
                return usage("--chain-json cannot be combined with --N or --p");
            }
            let spec: ChainSpec = read_json(path, "chain file")?;
            let dual = (0..spec.n_sites()).map(|i| i as f64).collect();
            (spec, dual)
        }
        None => {
            let params = KrawtchoukParams::new(require(args.n, "N")?, require(args.p, "p")?)?;
            (krawtchouk_chain(&params), params.dual_eigenvalues())
        }
    };
    let last = spec.n_sites() - 1;
    if last == 0 {
        return usage("a single-site chain has no cut");
    }
    let rule = match (args.k, args.half_filling) {
        (Some(k), false) => FillingRule::FermiIndex(k),
        (None, true) => FillingRule::HalfFilling,
        (Some(_), true) => return usage("give either --K or --half-filling, not both"),
        (None, false) => return usage("missing --K (or --half-filling)"),
    };
    let cuts = match (args.ell, args.sweep_ell) {
        (Some(ell), false) => ell..=ell,
        (None, true) => 0..=last - 1,
        (Some(_), true) => return usage("give either --ell or --sweep-ell, not both"),
        (None, false) => return usage("missing --ell (or --sweep-ell)"),
    };
    let route = match via {
        Via::Direct => Route::Direct,
        Via::Commutant => Route::Commutant { dual_eigenvalues: dual },
    };
    let rows = entropy_profile(&spec, rule, cuts, &route)?;
    let mut out = csv_header("chain-entropy", &args);
    out.push_str(&profile_csv(&rows, args.log_base == Some(LogBase::Two)));
    Ok(out)
}

pub fn commutant(args: CommutantArgs) -> CmdResult {
    // the closed-form commutant lives at p = 1/2, so that is the default
    let args = CommutantArgs {
        p: Some(args.p.unwrap_or(0.5)),
        ..args
    };
    let params = KrawtchoukParams::new(require(args.n, "N")?, args.p.unwrap_or_default())?;
    let ell = require(args.ell, "ell")?;
    let k = require(args.k, "K")?;
    let pair = BispectralPair::krawtchouk(&params);
    let op = CommutantOperator::build(&pair, ell, k)?;
    let spec = krawtchouk_chain(&params);
    let basis = energy_basis(&spec)?;
    let filling = FermiFilling::up_to(basis.energies(), k)?;
    let cbar = correlation_matrix(&basis, &filling)?;
    let c = chop(&cbar, ell, filling)?;
    let spectrum = spectrum_of_c_via_t(&op, &c, DegeneracyPolicy::Fallback)?;
    for cluster in &spectrum.fallback_clusters {
        eprintln!(
            "ffent: near-degenerate commutant eigenvalues {}..{}; diagonalized C on that subspace",
            cluster.start, cluster.end
        );
    }

    let mut out = csv_header("commutant", &args);
    let _ = writeln!(out, "# mu {} nu {}", num(op.mu), num(op.nu));
    let _ = writeln!(out, "# min_relative_gap {}", num(spectrum.min_relative_gap));
    out.push_str("n,T_diag,T_offdiag,T_eigenvalue,nu_i,commutator_norm\n");
    let t = &op.restricted;
    for i in 0..t.len() {
        let off = t.offdiag().get(i).map(|&x| num(x)).unwrap_or_default();
        let _ = writeln!(
            out,
            "{i},{},{off},{},{},{}",
            num(t.diag()[i]),
            num(spectrum.t_eigenvalues[i]),
            num(spectrum.occupations[i]),
            num(spectrum.commutator_norm)
        );
    }
    Ok(out)
}

/// Index of the highest level when `occupied` is exactly 0..=K.
fn lowest_levels(occupied: &[usize]) -> Option<usize> {
    let k = *occupied.last()?;
    (occupied.len() == k + 1).then_some(k)
}

/// Half-integer label 2j/2.
fn spin_label(two_j: usize) -> String {
    if two_j % 2 == 0 {
        (two_j / 2).to_string()
    } else {
        format!("{two_j}/2")
    }
}

pub fn cube_entropy(args: CubeEntropyArgs) -> CmdResult {
    let dim = require(args.d, "d")?;
    if !(1..=MAX_DIM).contains(&dim) {
        return usage(format!("--d must lie in 1..={MAX_DIM}"));
    }
    let ell = require(args.ell, "ell")?;
    let energies = match &args.se {
        Some(se) => {
            if args.include_zero {
                return usage("--include-zero only applies to the default filling");
            }
            se.clone()
        }
        None => half_filling_energies(dim, args.include_zero),
    };
    let route = match args.via.unwrap_or(Via::Direct) {
        Via::Direct => BlockRoute::Direct,
        Via::Commutant => BlockRoute::Commutant,
    };
    let decomp = irrep_decomposition(dim, ell, &energies)?;
    let (per_block, total) = decomposition_entropy(&decomp, route)?;
    let direct = if dim <= MAX_DIRECT_DIM {
        let spectrum = HypercubeSpectrum::new(hypercube_operators(dim)?)?;
        Some(direct_entropy(&spectrum, &energies, ell)?)
    } else {
        None
    };

    let base = args.log_base;
    let mut out = csv_header("cube-entropy", &args);
    if let Some(d) = direct {
        let _ = writeln!(out, "# abs_difference {}", num((d - total).abs()));
    }
    let unit = entropy_column(base);
    let _ = writeln!(out, "j,multiplicity,chain_length,ell_j,K_j,block_entropy_{unit},direct_entropy_{unit}");
    for (block, s) in decomp.blocks.iter().zip(&per_block) {
        let k = lowest_levels(&block.occupied).map(|k| k.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{k},{},",
            spin_label(block.two_j),
            block.multiplicity,
            block.chain_length(),
            block.ell_j,
            num(scale(*s, base))
        );
    }
    let direct = direct.map_or_else(|| "unavailable".to_string(), |d| num(scale(d, base)));
    let _ = writeln!(out, "total,,,,,{},{direct}", num(scale(total, base)));
    Ok(out)
}

pub fn scheme_verify(args: SchemeVerifyArgs) -> CmdResult {
    let matrices = match (&args.input, args.hamming) {
        (Some(path), None) => read_json::<SchemeFile>(path, "scheme file")?.to_matrices()?,
        (None, Some(d)) => {
            if !(1..=MAX_SCHEME_DIM).contains(&d) {
                return usage(format!("--hamming must lie in 1..={MAX_SCHEME_DIM}"));
            }
            hamming_distance_matrices(d)
        }
        (Some(_), Some(_)) => return usage("give either --input or --hamming, not both"),
        (None, None) => return usage("missing --input (or --hamming)"),
    };
    let report = SchemeReport::build(matrices)?;
    let mut value = serde_json::to_value(&report).expect("report serializes");
    if let Value::Object(map) = &mut value {
        map.insert("_header".into(), json_header("scheme-verify", &args));
    }
    Ok(pretty(&value))
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json serializes");
    s.push('\n');
    s
}

pub fn scaling_fit(args: ScalingFitArgs) -> CmdResult {
    let p = require(args.p, "p")?;
    let grid = args.grid.clone().unwrap_or_else(|| DEFAULT_GRID.to_vec());
    let points = if args.synthetic {
        let c = require(args.synthetic_c, "synthetic-c")?;
        let a = require(args.synthetic_a, "synthetic-a")?;
        synthetic_points(&grid, p, c, a)?
    } else {
        if args.synthetic_c.is_some() || args.synthetic_a.is_some() {
            return usage("--synthetic-c and --synthetic-a need --synthetic");
        }
        half_chain_profile(&grid, p)?
    };
    let fit = fit_scaling(&points, p)?;
    let table = correction_residual(&points, &fit);
    if let Some(path) = &args.residuals {
        let mut csv = csv_header("scaling-fit", &args);
        csv.push_str(&table.to_csv());
        std::fs::write(path, csv).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let value = json!({
        "_header": json_header("scaling-fit", &args),
        "p": fit.p,
        "c": fit.log_coefficient,
        "a_p": fit.constant,
        "m_p": fit.m_p,
        "rms": fit.rms,
        "n_points": fit.n_points,
        "n_range": [fit.n_range.0, fit.n_range.1],
        "residual_correlation": if table.correlation.is_finite() { json!(table.correlation) } else { Value::Null },
    });
    Ok(pretty(&value))
}
