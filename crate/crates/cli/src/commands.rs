//! Subcommand implementations. Each returns the text for stdout; files are
//! written through [`write_outputs`].

use std::io::Write as _;
use std::path::Path;

use corrwork_core::protocols::alpha_for_bias;
use corrwork_core::{
    detect_entanglement, entangled_phi, ergotropy_in, half_split_witness,
    inversion_sequence_to_bias, omega_state, prepare_locally_thermal, product_thermal, rho_deg,
    rho_sep, separable_mixture, von_neumann_entropy, w_deg_qubit_formula, w_sep_formula,
    Bipartition, SystemSpec, ThermalParams,
};

use crate::args::{Command, Family, FamilyArgs, Format, Mode, Settings, Suite};
use crate::config::Config;
use crate::csv::{Cell, Table};
use crate::error::{CliError, Result};
use crate::figure1::{self, FIGURE1_DIM_CAP};
use crate::svg::Chart;
use crate::sweep::{self, SweepConfig, PPT_MAX_N};
use crate::verify;

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Routes a table and optional chart to `--out` according to `--format`.
/// Without `--out`, the single requested format goes to stdout.
pub fn write_outputs(
    settings: &Settings,
    table: &Table,
    chart: Option<&Chart>,
    stdout: &mut String,
) -> Result<()> {
    let svg = || {
        chart
            .map(Chart::render)
            .ok_or_else(|| CliError::Usage("this command has no SVG output".into()))
    };
    match (&settings.out, settings.format) {
        (None, Format::Csv) => stdout.push_str(&table.emit()),
        (None, Format::Svg) => stdout.push_str(&svg()?),
        (None, Format::Both) => return Err(CliError::Usage("--format both needs --out".into())),
        (Some(path), Format::Csv) => write_file(path, &table.emit())?,
        (Some(path), Format::Svg) => write_file(path, &svg()?)?,
        (Some(path), Format::Both) => {
            let svg = svg()?;
            write_file(&path.with_extension("csv"), &table.emit())?;
            write_file(&path.with_extension("svg"), &svg)?;
        }
    }
    Ok(())
}

fn key_values(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| Cell::num(x).to_string())
}

fn num(v: f64) -> String {
    Cell::num(v).to_string()
}

/// Writes a key-value block as a one-row CSV when `--out` is set.
fn write_row(settings: &Settings, pairs: &[(&str, String)]) -> Result<()> {
    let Some(path) = &settings.out else {
        return Ok(());
    };
    if settings.format != Format::Csv {
        return Err(CliError::Usage("this command writes CSV only".into()));
    }
    let names: Vec<&str> = pairs.iter().map(|(k, _)| *k).collect();
    let mut t = Table::new(&names);
    t.push(pairs.iter().map(|(_, v)| Cell::text(v.clone())).collect());
    write_file(path, &t.emit())
}

pub fn cmd_figure1(settings: &Settings, cfg: &Config, n_max: Option<usize>) -> Result<String> {
    let n_max = n_max.or(cfg.get("n_max")?).or(settings.n).unwrap_or(20);
    if n_max < 2 {
        return Err(CliError::Usage(format!(
            "figure1 needs n_max >= 2, got {n_max}"
        )));
    }
    if settings.energy_ladder.is_some() || settings.d.is_some_and(|d| d != 2) {
        return Err(CliError::Usage(
            "figure1 is defined for qubits; --beta sets beta*E_1".into(),
        ));
    }
    let rows = figure1::figure1(
        settings.beta,
        n_max,
        settings.dim_cap.unwrap_or(FIGURE1_DIM_CAP),
    )?;
    let mut out = String::new();
    write_outputs(
        settings,
        &figure1::to_table(settings.beta, &rows),
        Some(&figure1::to_chart(settings.beta, &rows)),
        &mut out,
    )?;
    Ok(out)
}

pub fn cmd_ergotropy(settings: &Settings, cfg: &Config, args: &FamilyArgs) -> Result<String> {
    let family = match (args.family, cfg.raw("family")) {
        (Some(f), _) => f,
        (None, Some(s)) => parse_family(s)?,
        (None, None) => Family::Phi,
    };
    let spec = settings.spec(2)?;
    let s_total = args.s_total.or(cfg.get("s_total")?);
    let beta_prime = args
        .beta_prime
        .or(cfg.get("beta_prime")?)
        .unwrap_or(spec.beta());
    let t = args.t.or(cfg.get("t")?).unwrap_or(0.5);
    let mut closed_form = None;
    let rho = match family {
        Family::Phi => entangled_phi(&spec)?,
        Family::Sep => {
            closed_form = Some(("w_sep", w_sep_formula(&spec)?));
            rho_sep(&spec)?
        }
        Family::Deg => {
            closed_form = Some(("w_deg", w_deg_qubit_formula(&spec)?));
            rho_deg(&spec)?
        }
        Family::Omega => {
            let s =
                s_total.ok_or_else(|| CliError::Usage("--family omega needs --s-total".into()))?;
            omega_state(&spec, s)?.0
        }
        Family::Product => product_thermal(&spec, beta_prime)?,
        Family::Mixture => separable_mixture(&spec, t)?,
        Family::Protocol => {
            return Err(CliError::Usage(
                "use the protocol subcommand for protocol states".into(),
            ))
        }
    };
    let r = ergotropy_in(&rho, &spec)?;
    let mut pairs = vec![
        ("family", format!("{family:?}").to_lowercase()),
        ("n", spec.n().to_string()),
        ("d", spec.d().to_string()),
        ("beta", num(spec.beta())),
        ("initial_energy", num(r.initial_energy)),
        ("passive_energy", num(r.passive_energy)),
        ("ergotropy", num(r.ergotropy)),
        ("bound_n_ebeta", num(r.bound_n_ebeta)),
        ("bound_entropy", opt(r.bound_entropy)),
        ("ratio_to_bound", num(r.ratio_to_bound)),
        ("entropy", num(r.entropy)),
    ];
    if let Some((name, v)) = closed_form {
        pairs.push((name, num(v)));
    }
    write_row(settings, &pairs)?;
    Ok(key_values(&pairs))
}

fn parse_family(s: &str) -> Result<Family> {
    clap::ValueEnum::from_str(s, true).map_err(|_| CliError::Usage(format!("unknown family `{s}`")))
}

fn parse_mode(s: &str) -> Result<Mode> {
    clap::ValueEnum::from_str(s, true).map_err(|_| CliError::Usage(format!("unknown mode `{s}`")))
}

pub fn cmd_protocol(
    settings: &Settings,
    cfg: &Config,
    mode: Option<Mode>,
    beta_prime: Option<f64>,
    target_bias: Option<f64>,
) -> Result<String> {
    let mode = match (mode, cfg.raw("mode")) {
        (Some(m), _) => m,
        (None, Some(s)) => parse_mode(s)?,
        (None, None) => Mode::Rotation,
    };
    let spec = settings.spec(4)?;
    let beta_prime = beta_prime
        .or(cfg.get("beta_prime")?)
        .unwrap_or(2.0 * spec.beta());
    let z_prime = ThermalParams::new(&spec, beta_prime)?.bias();
    let target = match target_bias.or(cfg.get("target_bias")?) {
        Some(z) => z,
        None => ThermalParams::new(&spec, spec.beta())?.bias(),
    };
    let mut pairs = vec![
        ("mode", format!("{mode:?}").to_lowercase()),
        ("n", spec.n().to_string()),
        ("beta_prime", num(beta_prime)),
        ("initial_bias", num(z_prime)),
        ("target_bias", num(target)),
    ];
    let state = match mode {
        Mode::Rotation => {
            let r = prepare_locally_thermal(&spec, beta_prime, target)?;
            pairs.push(("alpha", num(alpha_for_bias(z_prime, target))));
            pairs.push(("achieved_bias", num(r.achieved_bias)));
            pairs.push(("residual", num(r.residual())));
            pairs.push(("beta_local", num(r.beta_local)));
            if spec.n() % 2 == 0 {
                pairs.push((
                    "half_split_witness",
                    num(half_split_witness(
                        &spec,
                        beta_prime,
                        alpha_for_bias(z_prime, target),
                    )?),
                ));
            }
            r.state
        }
        Mode::Inversion => {
            let seq = inversion_sequence_to_bias(&spec, beta_prime, target)?;
            let levels: Vec<String> = seq.levels.iter().map(usize::to_string).collect();
            pairs.push(("levels", levels.join(";")));
            pairs.push(("achieved_bias", num(seq.result.achieved_bias)));
            pairs.push(("residual", num(seq.residual)));
            pairs.push(("reached", seq.reached.to_string()));
            pairs.push(("beta_local", num(seq.result.beta_local)));
            seq.result.state
        }
    };
    let local = with_local_beta(&spec, &state)?;
    let report = ergotropy_in(&state, &local)?;
    pairs.push(("entropy", num(von_neumann_entropy(&state)?)));
    pairs.push(("ergotropy", num(report.ergotropy)));
    pairs.push(("bound_entropy", opt(report.bound_entropy)));
    if spec.n() >= 2 && spec.n() <= PPT_MAX_N {
        let v = detect_entanglement(&state, &spec, &Bipartition::half(spec.n())?, None)?;
        pairs.push(("ppt_min_eigenvalue", num(v.min_pt_eigenvalue)));
    }
    write_row(settings, &pairs)?;
    Ok(key_values(&pairs))
}

/// System description at the temperature the state's marginals actually have.
fn with_local_beta(spec: &SystemSpec, state: &corrwork_core::DensityMatrix) -> Result<SystemSpec> {
    let z = corrwork_core::qubit_bias(&corrwork_core::partial_trace_to(state, spec, 1)?)?;
    let beta = corrwork_core::beta_from_bias(z, spec.gap());
    if beta.is_finite() && beta >= 0.0 {
        Ok(spec.with_beta(beta)?)
    } else {
        Ok(spec.clone())
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_sweep(
    settings: &Settings,
    cfg: &Config,
    family: Option<Vec<Family>>,
    n_min: Option<usize>,
    n_max: Option<usize>,
    s_total: Option<f64>,
    beta_prime: Option<f64>,
    targets: Option<Vec<f64>>,
    ppt: bool,
) -> Result<String> {
    let families = match (family, cfg.raw("family")) {
        (Some(f), _) => f,
        (None, Some(s)) => s
            .split(',')
            .map(|x| parse_family(x.trim()))
            .collect::<Result<_>>()?,
        (None, None) => vec![Family::Phi, Family::Sep, Family::Deg],
    };
    let energies = settings.ladder()?;
    let n_max = n_max.or(cfg.get("n_max")?).or(settings.n).unwrap_or(8);
    let config = SweepConfig {
        families,
        n_min: n_min.or(cfg.get("n_min")?).unwrap_or(2),
        n_max,
        d: energies.len(),
        beta: settings.beta,
        s_total: s_total.or(cfg.get("s_total")?),
        beta_prime: beta_prime
            .or(cfg.get("beta_prime")?)
            .unwrap_or(settings.beta),
        targets: targets
            .or(cfg.get_list("targets")?)
            .unwrap_or_else(|| vec![0.9]),
        t: cfg.get("t")?.unwrap_or(0.5),
        ppt: ppt || cfg.get("ppt")?.unwrap_or(false),
        dim_cap: settings.dim_cap.unwrap_or(corrwork_core::DEFAULT_DIM_CAP),
        output_path: settings.out.clone(),
        format: settings.format,
        energies,
    };
    config.validate().map_err(CliError::Usage)?;
    let table = sweep::run_sweep(&config);
    let mut out = String::new();
    write_outputs(settings, &table, Some(&sweep::to_chart(&table)), &mut out)?;
    Ok(out)
}

pub fn cmd_verify(settings: &Settings, suite: Suite) -> Result<String> {
    let report = verify::run(suite, settings.seed);
    if let Some(path) = &settings.out {
        write_file(path, &report.to_table().emit())?;
    }
    let text = report.render();
    if report.failures() > 0 {
        // The report is still wanted on failure.
        print!("{text}");
        let _ = std::io::stdout().flush();
        return Err(CliError::Verification {
            failed: report.failures(),
            total: report.results.len(),
        });
    }
    Ok(text)
}

/// Runs one parsed invocation and returns what goes to stdout.
pub fn dispatch(global: &crate::args::GlobalArgs, command: &Command) -> Result<String> {
    let cfg = match &global.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let settings = Settings::resolve(global, &cfg)?;
    match command {
        Command::Figure1 { n_max } => cmd_figure1(&settings, &cfg, *n_max),
        Command::Ergotropy(args) => cmd_ergotropy(&settings, &cfg, args),
        Command::Verify { suite } => cmd_verify(&settings, *suite),
        Command::Sweep {
            family,
            n_min,
            n_max,
            s_total,
            beta_prime,
            targets,
            ppt,
        } => cmd_sweep(
            &settings,
            &cfg,
            family.clone(),
            *n_min,
            *n_max,
            *s_total,
            *beta_prime,
            targets.clone(),
            *ppt,
        ),
        Command::Protocol {
            mode,
            beta_prime,
            target_bias,
        } => cmd_protocol(&settings, &cfg, *mode, *beta_prime, *target_bias),
    }
}
