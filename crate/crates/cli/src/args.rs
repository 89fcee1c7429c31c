use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::Bindings;
use crate::error::Result;

#[derive(Debug, Parser)]
#[command(
    name = "duplex",
    version,
    about = "Fluorescence interference from two closed-loop driven atoms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Steady-state populations and coherences at one drive point.
    Steady(Flags),
    /// Fringe visibility at one drive point.
    Visibility(Flags),
    /// Intensity across the fringe pattern.
    Pattern(Flags),
    /// Visibility over a parameter grid or figure preset.
    Sweep(Flags),
    /// Visibility along a standing-wave π field.
    StandingWave(Flags),
    /// Self-test of the numeric and analytic paths.
    Validate(Flags),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Steady(_) => "steady",
            Command::Visibility(_) => "visibility",
            Command::Pattern(_) => "pattern",
            Command::Sweep(_) => "sweep",
            Command::StandingWave(_) => "standing-wave",
            Command::Validate(_) => "validate",
        }
    }

    pub fn flags(&self) -> &Flags {
        match self {
            Command::Steady(f)
            | Command::Visibility(f)
            | Command::Pattern(f)
            | Command::Sweep(f)
            | Command::StandingWave(f)
            | Command::Validate(f) => f,
        }
    }
}

/// Numeric flags are taken as text so they accept `pi` expressions.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Flat `key = value` file; flags win over its entries.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega_sigma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega_pi: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<String>,
    /// auto, analytic or numeric.
    #[arg(long)]
    pub engine: Option<String>,
    /// fig2a..fig2d, fig3a..fig3d.
    #[arg(long)]
    pub preset: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<String>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub samples: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Drive strength for presets and the standing wave.
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<String>,
    /// Ω_π/Ω_σ.
    #[arg(long, allow_hyphen_values = true)]
    pub ratio: Option<String>,
    /// Fixed standing-wave position.
    #[arg(long, allow_hyphen_values = true)]
    pub ky: Option<String>,
    /// Sweep axis `name=start:stop:count`; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub axis: Vec<String>,
    #[arg(long)]
    pub points: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub ky_min: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub ky_max: Option<String>,
    /// Also write a gnuplot script next to the output.
    #[arg(long)]
    pub plot: bool,
    /// Divide intensities by their maximum.
    #[arg(long)]
    pub normalize: bool,
    /// Atom separation for the geometric pattern.
    #[arg(long)]
    pub separation: Option<String>,
    #[arg(long)]
    pub screen_distance: Option<String>,
    #[arg(long)]
    pub wave_number: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub screen_min: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub screen_max: Option<String>,
}

impl Flags {
    pub fn bindings(&self) -> Result<Bindings> {
        let mut b = Bindings::default();
        let scalars = [
            ("omega-sigma", &self.omega_sigma),
            ("omega-pi", &self.omega_pi),
            ("phi", &self.phi),
            ("delta", &self.delta),
            ("engine", &self.engine),
            ("preset", &self.preset),
            ("out", &self.out),
            ("format", &self.format),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("omega", &self.omega),
            ("ratio", &self.ratio),
            ("ky", &self.ky),
            ("points", &self.points),
            ("ky-min", &self.ky_min),
            ("ky-max", &self.ky_max),
            ("separation", &self.separation),
            ("screen-distance", &self.screen_distance),
            ("wave-number", &self.wave_number),
            ("screen-min", &self.screen_min),
            ("screen-max", &self.screen_max),
        ];
        for (key, value) in scalars {
            if let Some(v) = value {
                b.push(key, v.clone())?;
            }
        }
        for a in &self.axis {
            b.push("axis", a.clone())?;
        }
        for (key, on) in [("plot", self.plot), ("normalize", self.normalize)] {
            if on {
                b.push(key, "true")?;
            }
        }
        Ok(b)
    }
}
