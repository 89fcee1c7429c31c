use std::f64::consts::{FRAC_PI_2, TAU};
use std::fs;
use std::io::Write;
use std::path::Path;

use duplex_core::interference::{fringe_pattern, FringeSpec};
use duplex_core::scan::{
    evaluate_point, linspace, run_sweep, standing_wave_scan, Engine, FixedParams, Preset,
    RowStatus, StandingWaveSpec, SweepGrid, SweepParam,
};
use duplex_core::{analytic_steady_state, numeric_steady_state, DriveParams, SteadyStateSolution};

use crate::args::Command;
use crate::axis::parse_axis;
use crate::config::{parse_config, Bindings};
use crate::error::{CliError, Result};
use crate::output::{plot_script, render, Cell, Destination, Format, Meta, PlotHint, Table};
use crate::validate::{run_validation, GeneratorModel, DEFAULT_SAMPLES, DEFAULT_SEED};

const DEFAULT_PATTERN_POINTS: u64 = 1000;
const DEFAULT_KY_POINTS: u64 = 1000;
const MAX_POINTS: u64 = 10_000_000;

const DRIVE_KEYS: &[&str] = &["omega-sigma", "omega-pi", "phi", "delta", "engine"];
const OUTPUT_KEYS: &[&str] = &["out", "format"];

pub fn execute(
    command: &Command,
    model: &dyn GeneratorModel,
    stdout: &mut dyn Write,
) -> Result<()> {
    let flags = command.flags();
    let file = match &flags.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("cannot read config `{}`: {e}", path.display()))
            })?;
            parse_config(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => Bindings::default(),
    };
    let b = file.overridden_by(flags.bindings()?);
    match command {
        Command::Steady(_) => steady(&b, stdout),
        Command::Visibility(_) => visibility(&b, stdout),
        Command::Pattern(_) => pattern(&b, stdout),
        Command::Sweep(_) => sweep(&b, stdout),
        Command::StandingWave(_) => standing_wave(&b, stdout),
        Command::Validate(_) => validate(&b, model, stdout),
    }
}

fn allowed<'a>(groups: &[&[&'a str]]) -> Vec<&'a str> {
    groups.iter().flat_map(|g| g.iter().copied()).collect()
}

fn engine(b: &Bindings) -> Result<Engine> {
    Ok(b.raw("engine")
        .map(str::parse)
        .transpose()?
        .unwrap_or_default())
}

fn drive(b: &Bindings) -> Result<DriveParams> {
    let p = DriveParams::new(
        b.required_number("omega-sigma")?,
        b.required_number("omega-pi")?,
        b.number("phi")?.unwrap_or(0.0),
        b.number("delta")?.unwrap_or(0.0),
    );
    p.validate()?;
    Ok(p)
}

fn solve(p: &DriveParams, engine: Engine) -> Result<SteadyStateSolution> {
    Ok(match engine {
        Engine::Analytic => analytic_steady_state(p)?,
        Engine::Auto if p.delta == 0.0 => analytic_steady_state(p)?,
        Engine::Auto | Engine::Numeric => numeric_steady_state(p)?,
    })
}

fn points(b: &Bindings, key: &str, default: u64) -> Result<usize> {
    let n = b.count(key)?.unwrap_or(default);
    if n == 0 || n > MAX_POINTS {
        return Err(CliError::Config(format!(
            "{key} must be between 1 and {MAX_POINTS}"
        )));
    }
    Ok(n as usize)
}

/// Output targets, opened before any computation.
struct Output {
    format: Format,
    data: Destination,
    plot: Option<Destination>,
}

impl Output {
    fn open(b: &Bindings) -> Result<Self> {
        let format = Format::parse(b.raw("format"))?;
        let data = match b.raw("out") {
            Some(path) => Destination::file(Path::new(path))?,
            None => Destination::stdout(),
        };
        let plot = if b.switch("plot")? {
            let path = data
                .path()
                .ok_or_else(|| CliError::Config("--plot needs --out".into()))?;
            if format != Format::Csv {
                return Err(CliError::Config("--plot needs csv output".into()));
            }
            let script = path.with_extension("gp");
            if script == path {
                return Err(CliError::Config(
                    "output file must not end in .gp when plotting".into(),
                ));
            }
            Some(Destination::file(&script)?)
        } else {
            None
        };
        Ok(Self { format, data, plot })
    }

    fn write(self, table: &Table, b: &Bindings, meta: &Meta, stdout: &mut dyn Write) -> Result<()> {
        let bytes = render(table, self.format, b, meta)?;
        let script = match (
            &self.plot,
            &table.plot,
            self.data.path().and_then(Path::file_name),
        ) {
            (Some(_), Some(hint), Some(name)) => {
                Some(plot_script(table, hint, &name.to_string_lossy()))
            }
            (Some(_), None, _) => {
                return Err(CliError::Config("nothing to plot for this command".into()))
            }
            _ => None,
        };
        self.data.commit(&bytes, stdout)?;
        if let (Some(dest), Some(script)) = (self.plot, script) {
            dest.commit(script.as_bytes(), stdout)?;
        }
        Ok(())
    }
}

fn params_cells(p: &DriveParams) -> Vec<Cell> {
    [p.omega_sigma, p.omega_pi, p.phi, p.delta]
        .into_iter()
        .map(Cell::Num)
        .collect()
}

const PARAM_COLUMNS: [&str; 4] = ["omega_sigma", "omega_pi", "phi", "delta"];

fn columns(extra: &[&str]) -> Vec<String> {
    PARAM_COLUMNS
        .iter()
        .chain(extra)
        .map(|c| c.to_string())
        .collect()
}

fn steady(b: &Bindings, stdout: &mut dyn Write) -> Result<()> {
    b.restrict("steady", &allowed(&[DRIVE_KEYS, OUTPUT_KEYS]))?;
    let p = drive(b)?;
    let engine = engine(b)?;
    let out = Output::open(b)?;
    let s = solve(&p, engine)?;
    let mut row = params_cells(&p);
    row.extend([
        Cell::Num(s.n_e),
        Cell::Num(s.n_g),
        Cell::Num(s.rho_sigma.re),
        Cell::Num(s.rho_sigma.im),
        Cell::Num(s.rho_pi.re),
        Cell::Num(s.rho_pi.im),
        Cell::Text(s.provenance.as_str().into()),
    ]);
    let table = Table {
        columns: columns(&[
            "n_e",
            "n_g",
            "rho_sigma_re",
            "rho_sigma_im",
            "rho_pi_re",
            "rho_pi_im",
            "provenance",
        ]),
        rows: vec![row],
        plot: None,
    };
    let meta = Meta {
        command: "steady",
        engine: Some(engine.name()),
        seed: None,
    };
    out.write(&table, b, &meta, stdout)
}

fn visibility(b: &Bindings, stdout: &mut dyn Write) -> Result<()> {
    b.restrict("visibility", &allowed(&[DRIVE_KEYS, OUTPUT_KEYS]))?;
    let p = drive(b)?;
    let engine = engine(b)?;
    let out = Output::open(b)?;
    let r = evaluate_point(&p, engine)?;
    let mut row = params_cells(&p);
    row.extend([
        Cell::Num(r.visibility),
        Cell::Num(r.n_e),
        Cell::Num(r.sum_rule_residual),
        Cell::Bool(r.detectable),
        Cell::Text(r.provenance.as_str().into()),
    ]);
    let table = Table {
        columns: columns(&["V", "n_e", "sum_rule_residual", "detectable", "provenance"]),
        rows: vec![row],
        plot: None,
    };
    let meta = Meta {
        command: "visibility",
        engine: Some(engine.name()),
        seed: None,
    };
    out.write(&table, b, &meta, stdout)
}

const GEOMETRY_KEYS: &[&str] = &[
    "separation",
    "screen-distance",
    "wave-number",
    "screen-min",
    "screen-max",
];

fn pattern(b: &Bindings, stdout: &mut dyn Write) -> Result<()> {
    b.restrict(
        "pattern",
        &allowed(&[
            DRIVE_KEYS,
            OUTPUT_KEYS,
            GEOMETRY_KEYS,
            &["points", "normalize", "plot"],
        ]),
    )?;
    let p = drive(b)?;
    let engine = engine(b)?;
    let n = points(b, "points", DEFAULT_PATTERN_POINTS)?;
    let spec = if GEOMETRY_KEYS.iter().any(|k| b.contains(k)) {
        FringeSpec::Geometric {
            separation: b.required_number("separation")?,
            screen_distance: b.required_number("screen-distance")?,
            wave_number: b.required_number("wave-number")?,
            screen_x: linspace(
                b.required_number("screen-min")?,
                b.required_number("screen-max")?,
                n,
            ),
        }
    } else {
        FringeSpec::uniform(n)
    };
    spec.validate()?;
    let normalize = b.switch("normalize")?;
    let out = Output::open(b)?;
    let s = solve(&p, engine)?;
    let points = fringe_pattern(&s, &spec)?;
    let peak = points.iter().map(|pt| pt.intensity).fold(0.0, f64::max);
    let scale = if normalize && peak > 0.0 {
        1.0 / peak
    } else {
        1.0
    };
    let table = Table {
        columns: vec!["coordinate".into(), "phase".into(), "intensity".into()],
        rows: points
            .iter()
            .map(|pt| {
                vec![
                    Cell::Num(pt.coordinate),
                    Cell::Num(pt.phase),
                    Cell::Num(pt.intensity * scale),
                ]
            })
            .collect(),
        plot: Some(PlotHint {
            axes: vec![1],
            value: 3,
        }),
    };
    let meta = Meta {
        command: "pattern",
        engine: Some(engine.name()),
        seed: None,
    };
    out.write(&table, b, &meta, stdout)
}

fn sweep_grid(b: &Bindings) -> Result<SweepGrid> {
    let common: &[&str] = &["delta", "engine", "plot"];
    let mut grid = if let Some(name) = b.raw("preset") {
        let preset: Preset = name.parse()?;
        let mut extra = vec!["preset"];
        match preset {
            Preset::Fig2d => extra.push("omega"),
            Preset::Fig3b | Preset::Fig3d => extra.push("ratio"),
            _ => {}
        }
        b.restrict(
            &format!("sweep --preset {name}"),
            &allowed(&[common, OUTPUT_KEYS, &extra]),
        )?;
        let ratio = b.number("ratio")?;
        if preset == Preset::Fig3d && ratio.is_some_and(|r| r.abs() > 1.0) {
            return Err(CliError::Config(
                "fig3d needs |ratio| <= 1, the standing-wave envelope".into(),
            ));
        }
        preset.grid(b.number("omega")?, ratio)
    } else {
        b.restrict(
            "sweep",
            &allowed(&[
                common,
                OUTPUT_KEYS,
                &["axis", "omega-sigma", "omega-pi", "phi", "ratio", "ky"],
            ]),
        )?;
        let axes = b
            .all("axis")
            .iter()
            .map(|a| parse_axis(a))
            .collect::<Result<Vec<_>>>()?;
        if axes.is_empty() {
            return Err(CliError::Config(
                "sweep needs --preset or at least one --axis".into(),
            ));
        }
        let mut fixed = FixedParams::default();
        for (key, param) in [
            ("omega-sigma", SweepParam::OmegaSigma),
            ("omega-pi", SweepParam::OmegaPi),
            ("phi", SweepParam::Phi),
            ("ratio", SweepParam::RatioR),
            ("ky", SweepParam::PositionKy),
        ] {
            if let Some(v) = b.number(key)? {
                fixed.set(param, v);
            }
        }
        SweepGrid::new(axes, fixed)
    };
    grid.fixed.delta = b.number("delta")?.unwrap_or(0.0);
    if b.contains("engine") {
        grid = grid.with_engine(engine(b)?);
    }
    grid.validate()?;
    Ok(grid)
}

fn status_cells(visibility: f64, n_e: f64, detectable: bool, status: RowStatus) -> [Cell; 4] {
    [
        Cell::Num(visibility),
        Cell::Num(n_e),
        Cell::Bool(detectable),
        Cell::Text(status.as_str().into()),
    ]
}

fn sweep(b: &Bindings, stdout: &mut dyn Write) -> Result<()> {
    let grid = sweep_grid(b)?;
    let out = Output::open(b)?;
    let table = run_sweep(&grid)?;
    let n_axes = table.axes.len();
    let mut columns: Vec<String> = table.axes.iter().map(|a| a.name().to_string()).collect();
    columns.extend(["V", "n_e", "detectable", "status"].map(String::from));
    let rows = table
        .rows
        .iter()
        .map(|r| {
            let mut row: Vec<Cell> = r.coords.iter().copied().map(Cell::Num).collect();
            row.extend(status_cells(r.visibility, r.n_e, r.detectable, r.status));
            row
        })
        .collect();
    let table = Table {
        columns,
        rows,
        plot: Some(PlotHint {
            axes: (1..=n_axes).collect(),
            value: n_axes + 1,
        }),
    };
    let meta = Meta {
        command: "sweep",
        engine: Some(grid.engine.name()),
        seed: None,
    };
    out.write(&table, b, &meta, stdout)
}

fn standing_wave(b: &Bindings, stdout: &mut dyn Write) -> Result<()> {
    b.restrict(
        "standing-wave",
        &allowed(&[
            OUTPUT_KEYS,
            &[
                "omega",
                "omega-sigma",
                "phi",
                "points",
                "ky-min",
                "ky-max",
                "engine",
                "plot",
            ],
        ]),
    )?;
    let omega = b.required_number("omega")?;
    let n = points(b, "points", DEFAULT_KY_POINTS)?;
    let mut spec = StandingWaveSpec::new(
        omega,
        linspace(
            b.number("ky-min")?.unwrap_or(0.0),
            b.number("ky-max")?.unwrap_or(TAU),
            n,
        ),
    );
    spec.omega_sigma = b.number("omega-sigma")?.unwrap_or(omega);
    spec.phi = b.number("phi")?.unwrap_or(FRAC_PI_2);
    spec.engine = engine(b)?;
    spec.validate()?;
    let out = Output::open(b)?;
    let rows = standing_wave_scan(&spec)?
        .into_iter()
        .map(|r| {
            let mut row = vec![Cell::Num(r.ky), Cell::Num(r.r)];
            row.extend(status_cells(r.visibility, r.n_e, r.detectable, r.status));
            row
        })
        .collect();
    let table = Table {
        columns: ["ky", "r", "V", "n_e", "detectable", "status"]
            .map(String::from)
            .to_vec(),
        rows,
        plot: Some(PlotHint {
            axes: vec![1],
            value: 3,
        }),
    };
    let meta = Meta {
        command: "standing-wave",
        engine: Some(spec.engine.name()),
        seed: None,
    };
    out.write(&table, b, &meta, stdout)
}

fn validate(b: &Bindings, model: &dyn GeneratorModel, stdout: &mut dyn Write) -> Result<()> {
    b.restrict("validate", &["samples", "seed"])?;
    let samples = points(b, "samples", DEFAULT_SAMPLES as u64)?;
    let seed = b.count("seed")?.unwrap_or(DEFAULT_SEED);
    let report = run_validation(model, samples, seed);
    stdout.write_all(report.render().as_bytes())?;
    if report.pass() {
        return Ok(());
    }
    let failed: Vec<String> = report
        .families
        .iter()
        .filter(|f| !f.pass)
        .map(|f| match f.worst_at {
            Some((os, op, phi)) => format!(
                "{} (worst at omega_sigma={os} omega_pi={op} phi={phi})",
                f.name
            ),
            None => f.name.to_string(),
        })
        .collect();
    Err(CliError::Validation(format!(
        "failed: {}",
        failed.join(", ")
    )))
}
