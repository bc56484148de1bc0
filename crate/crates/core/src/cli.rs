//! The `gauss-reduce` command line.
//!
//! Exit codes: 0 success or equivalent, 1 constraint violation or not
//! equivalent, 2 input error, 3 numerical failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::bogoliubov::{transform_distance, validate, GaussianTransform};
use crate::elements::{builtin, compile, qnd_coupler};
use crate::error::{Error, Result};
use crate::io::{circuit_to_json, form_to_json, load_str, matrix_to_json, transform_to_json, vector_to_json};
use crate::linalg::{ComplexMatrix, ComplexVector, ToleranceConfig};
use crate::reduction::{qnd_mixing_angle, qnd_witnesses, recompose, reduce, squeeze_spectrum, squeezing_db};
use crate::state::verify_single_excitation_structure;
use crate::synthesis::{full_circuit, synthesize};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Validate,
    Reduce,
    Synthesize,
    Equiv,
    Spectrum,
    Nogo,
    QndDemo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EquivMode {
    Exact,
    Spectrum,
}

/// Reduce, synthesize and compare linear Bogoliubov optical circuits.
///
/// Inputs are circuit or transform JSON files, or built-in circuits
/// (qnd, d2[:r], e4[:r], fig2[:r], fig2-literal[:r], fig3[:r], random[:n]).
/// Built-ins come first, then files.
#[derive(Debug, Clone, Parser)]
#[command(name = "gauss-reduce", version)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    pub files: Vec<PathBuf>,
    #[arg(long = "builtin", value_name = "NAME")]
    pub builtins: Vec<String>,
    /// Absolute tolerance for constraint checks.
    #[arg(long, env = "GAUSS_REDUCE_TOL", default_value_t = 1e-10)]
    pub tol: f64,
    /// Relative tolerance for grouping degenerate values.
    #[arg(long, default_value_t = 1e-8)]
    pub degeneracy_tol: f64,
    /// Photon-number cutoff for Fock-space checks.
    #[arg(long, default_value_t = 6)]
    pub cutoff: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Mode with the single-photon click.
    #[arg(long)]
    pub click: Option<usize>,
    /// Modes detected in vacuum.
    #[arg(long, value_delimiter = ',')]
    pub vacuum: Vec<usize>,
    #[arg(long, value_enum, default_value_t = EquivMode::Exact)]
    pub mode: EquivMode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidInput(_) | Error::UnsupportedInput(_) => EXIT_INPUT,
        Error::ConstraintViolation { .. } | Error::SingularInput(_) => EXIT_VIOLATION,
        Error::NumericalFailure { .. } => EXIT_NUMERICAL,
    }
}

pub fn run_from<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            }
        }
    }
}

pub fn run(cfg: &RunConfig) -> Outcome {
    match dispatch(cfg) {
        Ok((code, stdout)) => Outcome { code, stdout, stderr: String::new() },
        Err(e) => Outcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn dispatch(cfg: &RunConfig) -> Result<(i32, String)> {
    let tol = ToleranceConfig::new(cfg.tol, cfg.degeneracy_tol)?;
    match cfg.command {
        Command::Validate => cmd_validate(cfg, &tol),
        Command::Reduce => cmd_reduce(cfg, &tol),
        Command::Synthesize => cmd_synthesize(cfg, &tol),
        Command::Equiv => cmd_equiv(cfg, &tol),
        Command::Spectrum => cmd_spectrum(cfg, &tol),
        Command::Nogo => cmd_nogo(cfg, &tol),
        Command::QndDemo => cmd_qnd_demo(cfg, &tol),
    }
}

fn load_inputs(cfg: &RunConfig, tol: &ToleranceConfig) -> Result<Vec<(String, GaussianTransform)>> {
    let mut out = Vec::new();
    for name in &cfg.builtins {
        out.push((name.clone(), compile(&builtin(name, cfg.seed)?, tol)?));
    }
    for path in &cfg.files {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
        let loaded = load_str(&text)
            .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
        out.push((path.display().to_string(), loaded.into_transform(tol)?));
    }
    Ok(out)
}

fn single_input(cfg: &RunConfig, tol: &ToleranceConfig) -> Result<(String, GaussianTransform)> {
    let mut inputs = load_inputs(cfg, tol)?;
    if inputs.len() != 1 {
        return Err(Error::invalid(format!("expected one input, got {}", inputs.len())));
    }
    Ok(inputs.remove(0))
}

fn render(cfg: &RunConfig, value: Value, text: String) -> String {
    match cfg.format {
        Format::Json => serde_json::to_string_pretty(&value).expect("report serializes") + "\n",
        Format::Text => text,
    }
}

fn fmt_complex(z: Complex64) -> String {
    format!("{:+.6}{:+.6}i", z.re + 0.0, z.im + 0.0)
}

fn fmt_matrix(m: &ComplexMatrix, indent: &str) -> String {
    let mut s = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| fmt_complex(m[(i, j)])).collect();
        let _ = writeln!(s, "{indent}[{}]", row.join(", "));
    }
    s
}

fn fmt_vector(v: &ComplexVector) -> String {
    let items: Vec<String> = v.iter().map(|&z| fmt_complex(z)).collect();
    format!("[{}]", items.join(", "))
}

fn cmd_validate(cfg: &RunConfig, tol: &ToleranceConfig) -> Result<(i32, String)> {
    let (name, t) = single_input(cfg, tol)?;
    let report = validate(&t, tol);
    let mut text = format!("{name}: {} modes\n", t.n_modes());
    let mut residuals = serde_json::Map::new();
    for (label, r) in report.residuals() {
        let _ = writeln!(text, "  {label}: {r:.3e}");
        residuals.insert(label.to_string(), json!(r));
    }
    let valid = report.is_valid();
    let _ = writeln!(text, "  {} (tolerance {:.1e})", if valid { "valid" } else { "INVALID" }, tol.structural_tol);
    let value = json!({
        "input": name,
        "n_modes": t.n_modes(),
        "residuals": residuals,
        "max_residual": report.max_residual(),
        "tol": tol.structural_tol,
        "valid": valid,
    });
    Ok((if valid { EXIT_OK } else { EXIT_VIOLATION }, render(cfg, value, text)))
}

fn cmd_reduce(cfg: &RunConfig, tol: &ToleranceConfig) -> Result<(i32, String)> {
    let (name, t) = single_input(cfg, tol)?;
    let form = reduce(&t, tol)?;
    let residual = transform_distance(&recompose(&form, tol)?, &t)?;

    let mut text = format!("{name}: {} modes, {} squeezer(s)\n", t.n_modes(), form.squeezer_count());
    let mut squeezers = Vec::new();
    for (mode, &r) in form.r.iter().enumerate().filter(|(_, r)| **r > 0.0) {
        let db = squeezing_db(r);
        let _ = writeln!(text, "  squeezer {mode}: r = {r:.10}, {db:.4} dB");
        squeezers.push(json!({"mode": mode, "r": r, "db": db}));
    }
    let _ = write!(text, "  U =\n{}", fmt_matrix(&form.u, "    "));
    let _ = write!(text, "  V =\n{}", fmt_matrix(&form.v, "    "));
    let _ = writeln!(text, "  beta = {}", fmt_vector(&form.beta));
    let _ = writeln!(text, "  residual = {residual:.3e}");

    let mut value = form_to_json(&form);
    value["squeezers"] = json!(squeezers);
    value["residual"] = json!(residual);
    Ok((EXIT_OK, render(cfg, value, text)))
}

fn cmd_synthesize(cfg: &RunConfig, tol: &ToleranceConfig) -> Result<(i32, String)> {
    let (name, t) = single_input(cfg, tol)?;
    let form = reduce(&t, tol)?;
    let circuit = full_circuit(&form, tol)?;
    let residual = transform_distance(&compile(&circuit, tol)?, &t)?;
    let bound = 10.0 * tol.structural_tol * crate::linalg::max_abs(&t.a).max(1.0);
    let code = if residual <= bound { EXIT_OK } else { EXIT_NUMERICAL };

    let mut text = format!("{name}: {} element(s)\n", circuit.elements.len());
    for el in &circuit.elements {
        let _ = writeln!(text, "  {}", describe_element(el));
    }
    let _ = writeln!(text, "  recompiled residual = {residual:.3e}");
    let mut value = circuit_to_json(&circuit);
    value["residual"] = json!(residual);
    Ok((code, render(cfg, value, text)))
}

fn describe_element(el: &crate::elements::CircuitElement) -> String {
    use crate::elements::ElementKind as K;
    let modes = format!("{:?}", el.modes);
    match &el.kind {
        K::Squeezer { r, phi } => format!(
            "squeezer {modes}: r = {r:.10} ({:.4} dB), phi = {:.4} deg",
            squeezing_db(*r),
            phi.to_degrees()
        ),
        K::Beamsplitter { theta, phi } => format!(
            "beamsplitter {modes}: theta = {:.4} deg, phi = {:.4} deg, transmission = {:.4}%",
            theta.to_degrees(),
            phi.to_degrees(),
            100.0 * theta.cos().powi(2)
        ),
        K::PhaseShifter { phi } => format!("phase_shifter {modes}: phi = {:.4} deg", phi.to_degrees()),
        K::Displacement { beta } => {
            let items: Vec<String> = beta.iter().map(|&z| fmt_complex(z)).collect();
            format!("displacement {modes}: beta = [{}]", items.join(", "))
        }
        other => format!("{} {modes}", other.name()),
    }
}

fn cmd_equiv(cfg: &RunConfig, tol: &ToleranceConfig) -> Result<(i32, String)> {
    let inputs = load_inputs(cfg, tol)?;
    let [(name1, t1), (name2, t2)] = <[_; 2]>::try_from(inputs)
        .map_err(|v: Vec<_>| Error::invalid(format!("equiv needs two inputs, got {}", v.len())))?;
    if t1.n_modes() != t2.n_modes() {
        return Err(Error::invalid(format!(
            "mode counts differ: {} vs {}",
            t1.n_modes(),
            t2.n_modes()
        )));
    }
    let (mode, distance) = match cfg.mode {
        EquivMode::Exact => ("exact", transform_distance(&t1, &t2)?),
        EquivMode::Spectrum => {
            let (s1, s2) = (squeeze_spectrum(&t1, tol)?, squeeze_spectrum(&t2, tol)?);
            let d = s1.iter().zip(&s2).fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()));
            ("spectrum", d)
        }
    };
    let equivalent = distance <= tol.structural_tol;
    let text = format!(
        "{name1} vs {name2} ({mode}): distance = {distance:.3e}, {}\n",
        if equivalent { "equivalent" } else { "NOT equivalent" }
    );
    let value = json!({
        "inputs": [name1, name2],
        "mode": mode,
        "distance": distance,
        "tol": tol.structural_tol,
        "equivalent": equivalent,
    });
    Ok((if equivalent { EXIT_OK } else { EXIT_VIOLATION }, render(cfg, value, text)))
}

fn cmd_spectrum(cfg: &RunConfig, tol: &ToleranceConfig) -> Result<(i32, String)> {
    let (name, t) = single_input(cfg, tol)?;
    let spec = squeeze_spectrum(&t, tol)?;
    let count = spec.iter().filter(|&&r| r > tol.structural_tol).count();
    let db: Vec<f64> = spec.iter().map(|&r| squeezing_db(r)).collect();
    let mut text = format!("{name}: {count} squeezer(s) required\n");
    for (k, (r, d)) in spec.iter().zip(&db).enumerate() {
        let _ = writeln!(text, "  r[{k}] = {r:.10} ({d:.4} dB)");
    }
    let value = json!({"input": name, "r": spec, "db": db, "squeezer_count": count});
    Ok((EXIT_OK, render(cfg, value, text)))
}

fn cmd_nogo(cfg: &RunConfig, tol: &ToleranceConfig) -> Result<(i32, String)> {
    let (name, t) = single_input(cfg, tol)?;
    let click = cfg.click.ok_or_else(|| Error::invalid("nogo needs --click"))?;
    let rep = verify_single_excitation_structure(&t, &cfg.vacuum, click, cfg.cutoff, tol)?;

    let mut text = format!(
        "{name}: click on mode {click}, vacuum on {:?}, remaining modes {:?}\n",
        rep.detected_vacuum, rep.modes
    );
    if rep.is_null {
        let _ = writeln!(text, "  null click: no first-order click amplitude");
    } else {
        let _ = writeln!(text, "  coefficients c_m = {}", fmt_vector(&rep.coeffs));
        let _ = write!(text, "  base state matrix =\n{}", fmt_matrix(&rep.base_bmat, "    "));
    }
    if let Some(f) = rep.single_excitation_fidelity {
        let _ = writeln!(text, "  single-photon fidelity = {f:.10}");
    }
    let _ = writeln!(
        text,
        "  brute-force discrepancy = {:.3e} (photon numbers <= {})",
        rep.discrepancy, rep.compared_cutoff
    );
    let _ = writeln!(text, "  single-excitation structure {}", if rep.confirmed { "confirmed" } else { "NOT confirmed" });

    let value = json!({
        "input": name,
        "click": click,
        "vacuum": rep.detected_vacuum,
        "modes": rep.modes,
        "null": rep.is_null,
        "coefficients": vector_to_json(&rep.coeffs),
        "base_bmat": matrix_to_json(&rep.base_bmat),
        "discrepancy": rep.discrepancy,
        "compared_cutoff": rep.compared_cutoff,
        "single_photon_fidelity": rep.single_excitation_fidelity,
        "confirmed": rep.confirmed,
    });
    Ok((if rep.confirmed { EXIT_OK } else { EXIT_VIOLATION }, render(cfg, value, text)))
}

fn cmd_qnd_demo(cfg: &RunConfig, tol: &ToleranceConfig) -> Result<(i32, String)> {
    let t = qnd_coupler();
    let form = reduce(&t, tol)?;
    let residual = transform_distance(&recompose(&form, tol)?, &t)?;
    let networks = [
        ("V_dagger", synthesize(&form.v.adjoint(), tol)?),
        ("U", synthesize(&form.u, tol)?),
    ];
    let reference = qnd_mixing_angle();

    let mut text = String::from("QND coupler\n");
    let _ = write!(text, "  A =\n{}", fmt_matrix(&t.a, "    "));
    let _ = write!(text, "  B =\n{}", fmt_matrix(&t.b, "    "));
    let _ = writeln!(text, "reduction (residual {residual:.3e})");
    for (k, &r) in form.r.iter().enumerate() {
        let _ = writeln!(text, "  squeezer {k}: r = {r:.10}, {:.4} dB", squeezing_db(r));
    }
    let mut stages = Vec::new();
    for (label, net) in &networks {
        for st in &net.stages {
            let _ = writeln!(
                text,
                "  {label} splitter ({}, {}): theta = {:.4} deg, transmission = {:.4}%",
                st.i,
                st.j,
                st.theta.to_degrees(),
                100.0 * st.transmission()
            );
            stages.push(json!({
                "network": label, "i": st.i, "j": st.j,
                "theta": st.theta, "phi": st.phi, "transmission": st.transmission(),
            }));
        }
    }
    let _ = writeln!(
        text,
        "  reference angle 1/2 asin(2/sqrt 5) = {:.4} deg (transmissions {:.4}% / {:.4}%)",
        reference.to_degrees(),
        100.0 * reference.sin().powi(2),
        100.0 * reference.cos().powi(2)
    );
    let _ = writeln!(text, "reference decompositions");
    let mut witnesses = serde_json::Map::new();
    for (label, w) in qnd_witnesses() {
        let d = transform_distance(&recompose(&w, tol)?, &t)?;
        let _ = writeln!(text, "  {label}: recomposition residual {d:.3e}");
        witnesses.insert(label.to_string(), json!(d));
    }
    let value = json!({
        "transform": transform_to_json(&t),
        "r": form.r,
        "db": form.r.iter().map(|&r| squeezing_db(r)).collect::<Vec<_>>(),
        "residual": residual,
        "stages": stages,
        "theta_reference": reference,
        "witness_residuals": witnesses,
    });
    Ok((EXIT_OK, render(cfg, value, text)))
}
