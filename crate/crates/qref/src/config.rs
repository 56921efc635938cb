//! Configuration file schema and resolution into scenario configs.
//!
//! The config is a single JSON document with top-level sections `masses`,
//! `geometry`, `widths`, `theta`, `grid`, and `mode`. Unknown keys anywhere
//! are hard errors so typos fail fast instead of silently running defaults.

use serde::{Deserialize, Serialize};

use qref_core::reduce::GridSpec;
use qref_core::scenarios::{
    AppendixConfig, FrameF2, InterferometerConfig, InterferometerSetup, RocketConfig,
    ThirdParticleConfig,
};

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub masses: Option<MassesSection>,
    pub geometry: Option<GeometrySection>,
    pub widths: Option<WidthsSection>,
    pub theta: Option<f64>,
    pub grid: Option<GridSection>,
    pub mode: Option<ModeSection>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassesSection {
    pub m_i: Option<f64>,
    pub m_p: Option<f64>,
    pub m_f2: Option<f64>,
    pub m_r: Option<f64>,
    pub m1: Option<f64>,
    pub m2: Option<f64>,
    pub m3: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    /// Branch half-separation.
    pub l: Option<f64>,
    /// Bystander position (third-particle scenario).
    pub c: Option<f64>,
    /// Branch momentum magnitude (rocket scenario).
    pub p: Option<f64>,
    /// Rocket position uncertainty.
    pub delta_xr: Option<f64>,
    /// Product-state centres (appendix scenario).
    pub centre_a: Option<f64>,
    pub centre_b: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WidthsSection {
    pub width_i: Option<f64>,
    pub width_p: Option<f64>,
    /// Common width for the third-particle scenario.
    pub width: Option<f64>,
    /// Particle momentum spread (rocket scenario).
    pub delta_p: Option<f64>,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    pub delta3: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub points: Option<usize>,
    pub extent: Option<f64>,
    pub centre: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSection {
    /// Interferometer preparation, "a" or "b".
    pub setup: Option<String>,
    /// Second-frame option: "none", "entangled", "superposed_unentangled".
    pub frame_f2: Option<String>,
    /// Relative branch phase for the interferometer family.
    pub phase: Option<f64>,
    /// Explicit phase list for the frames comparison.
    pub phases: Option<Vec<f64>>,
    /// Request the exact (report-producing) transform alongside the run.
    pub exact_transform: Option<bool>,
}

/// Everything the run needs, after defaults are filled in. Serialized into
/// `report.json` verbatim so runs are reproducible from their output alone.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "scenario", rename_all = "kebab-case")]
pub enum ResolvedConfig {
    Interferometer(InterferometerConfig),
    Rocket(RocketConfig),
    ThirdParticle(ThirdParticleConfig),
    Frames { base: InterferometerConfig, phases: Vec<f64> },
    Appendix(AppendixConfig),
}

fn parse_setup(s: &str) -> Result<InterferometerSetup, CliError> {
    match s {
        "a" | "A" => Ok(InterferometerSetup::A),
        "b" | "B" => Ok(InterferometerSetup::B),
        other => Err(CliError::Config(format!("unknown setup {other:?} (expected \"a\" or \"b\")"))),
    }
}

fn parse_frame_f2(s: &str) -> Result<FrameF2, CliError> {
    match s {
        "none" => Ok(FrameF2::None),
        "entangled" => Ok(FrameF2::Entangled),
        "superposed_unentangled" => Ok(FrameF2::SuperposedUnentangled),
        other => Err(CliError::Config(format!(
            "unknown frame_f2 {other:?} (expected \"none\", \"entangled\", or \"superposed_unentangled\")"
        ))),
    }
}

impl FileConfig {
    fn masses(&self) -> MassesSection {
        self.masses.clone().unwrap_or_default()
    }

    fn geometry(&self) -> GeometrySection {
        self.geometry.clone().unwrap_or_default()
    }

    fn widths(&self) -> WidthsSection {
        self.widths.clone().unwrap_or_default()
    }

    fn mode(&self) -> ModeSection {
        self.mode.clone().unwrap_or_default()
    }

    pub fn grid_spec(&self) -> GridSpec {
        let g = self.grid.clone().unwrap_or_default();
        let d = GridSpec::default();
        GridSpec {
            points: g.points.unwrap_or(d.points),
            extent: g.extent,
            centre: g.centre,
        }
    }

    pub fn exact_transform_requested(&self) -> bool {
        self.mode().exact_transform.unwrap_or(false)
    }

    pub fn interferometer(&self, setup_override: Option<&str>) -> Result<InterferometerConfig, CliError> {
        let m = self.masses();
        let g = self.geometry();
        let w = self.widths();
        let mode = self.mode();
        let setup = match setup_override.or(mode.setup.as_deref()) {
            Some(s) => parse_setup(s)?,
            None => InterferometerSetup::A,
        };
        let mut cfg = InterferometerConfig::new(
            m.m_i.unwrap_or(1.0),
            m.m_p.unwrap_or(1e-4),
            g.l.unwrap_or(1.0),
            setup,
        );
        cfg.width_i = w.width_i;
        cfg.width_p = w.width_p;
        cfg.m_f2 = m.m_f2;
        cfg.phase = mode.phase.unwrap_or(0.0);
        if let Some(f2) = mode.frame_f2.as_deref() {
            cfg.frame_f2 = parse_frame_f2(f2)?;
        }
        Ok(cfg)
    }

    pub fn rocket(&self) -> Result<RocketConfig, CliError> {
        let m = self.masses();
        let g = self.geometry();
        let w = self.widths();
        let mut cfg = RocketConfig::new(
            m.m_p.unwrap_or(1.0),
            m.m_r.unwrap_or(1e4),
            g.l.unwrap_or(10.0),
            g.p.unwrap_or(10.0),
            g.delta_xr.unwrap_or(0.05),
        );
        cfg.delta_p = w.delta_p;
        cfg.grid = self.grid_spec();
        Ok(cfg)
    }

    pub fn third_particle(&self) -> Result<ThirdParticleConfig, CliError> {
        let m = self.masses();
        let g = self.geometry();
        let w = self.widths();
        let mut cfg = ThirdParticleConfig::new(
            m.m1.unwrap_or(1.0),
            m.m2.unwrap_or(1.0),
            m.m3.unwrap_or(1.0),
            g.l.unwrap_or(1.0),
            g.c.unwrap_or(0.3),
            self.theta.unwrap_or(0.0),
        );
        cfg.width = w.width;
        Ok(cfg)
    }

    pub fn frames(&self, setup_override: Option<&str>) -> Result<(InterferometerConfig, Vec<f64>), CliError> {
        let base = self.interferometer(setup_override)?;
        let phases = match self.mode().phases {
            Some(p) if !p.is_empty() => p,
            Some(_) => return Err(CliError::Config("mode.phases must not be empty".into())),
            None => {
                let n = 9;
                (0..n).map(|i| std::f64::consts::TAU * i as f64 / n as f64).collect()
            }
        };
        Ok((base, phases))
    }

    pub fn appendix(&self) -> Result<AppendixConfig, CliError> {
        let m = self.masses();
        let g = self.geometry();
        let w = self.widths();
        let mut cfg = AppendixConfig::two_particle(
            m.m1.unwrap_or(1.0),
            m.m2.unwrap_or(2.0),
            w.delta1.unwrap_or(1.0),
            w.delta2.unwrap_or(1.0),
        );
        cfg.m3 = m.m3;
        cfg.delta3 = w.delta3;
        cfg.centre_a = g.centre_a.unwrap_or(0.0);
        cfg.centre_b = g.centre_b.unwrap_or(1.0);
        cfg.l = g.l.unwrap_or(1.0);
        cfg.c = g.c.unwrap_or(0.3);
        if let Some(theta) = self.theta {
            cfg.theta = theta;
        }
        Ok(cfg)
    }
}

/// Parsed `--sweep name=start:stop:lin|log:count` specification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub scale: SweepScale,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepScale {
    Lin,
    Log,
}

impl SweepSpec {
    pub fn parse(raw: &str) -> Result<SweepSpec, CliError> {
        let bad = |msg: &str| CliError::Config(format!("invalid sweep {raw:?}: {msg}"));
        let (name, rest) = raw
            .split_once('=')
            .ok_or_else(|| bad("expected name=start:stop:lin|log:count"))?;
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 4 {
            return Err(bad("expected start:stop:lin|log:count after '='"));
        }
        let start: f64 = parts[0].parse().map_err(|_| bad("start is not a number"))?;
        let stop: f64 = parts[1].parse().map_err(|_| bad("stop is not a number"))?;
        let scale = match parts[2] {
            "lin" => SweepScale::Lin,
            "log" => SweepScale::Log,
            _ => return Err(bad("scale must be \"lin\" or \"log\"")),
        };
        let count: usize = parts[3].parse().map_err(|_| bad("count is not an integer"))?;
        if count < 2 {
            return Err(bad("count must be at least 2"));
        }
        if scale == SweepScale::Log && (start <= 0.0 || stop <= 0.0) {
            return Err(bad("log sweeps need positive endpoints"));
        }
        if !start.is_finite() || !stop.is_finite() {
            return Err(bad("endpoints must be finite"));
        }
        Ok(SweepSpec { parameter: name.to_string(), start, stop, scale, count })
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                match self.scale {
                    SweepScale::Lin => self.start + t * (self.stop - self.start),
                    SweepScale::Log => {
                        (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp()
                    }
                }
            })
            .collect()
    }
}
