//! Sectioned `key = value` run configuration.

use ini::Ini;
use noidkit::contours::{KnoidSpec, Noid2kSpec};
use noidkit::solver::SolverOptions;
use noidkit::{Error, Result, SpaceParams};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pipeline {
    Scherk,
    Knoid,
    Noid2k,
    Sister,
    Verify,
}

impl Pipeline {
    pub fn name(&self) -> &'static str {
        match self {
            Pipeline::Scherk => "scherk",
            Pipeline::Knoid => "knoid",
            Pipeline::Noid2k => "noid2k",
            Pipeline::Sister => "sister",
            Pipeline::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub pipeline: Pipeline,
    pub kappa: f64,
    pub h_mean: f64,
    /// Hinge length of the k-noid piece.
    pub a: f64,
    /// Diagonal of the 2k-noid quadrilateral.
    pub d: f64,
    pub alpha: f64,
    pub k: usize,
    pub truncations: Vec<f64>,
    pub level: usize,
    pub patch_grid: usize,
    pub scherk_samples: usize,
    pub scherk_max_angle: f64,
    pub solver: SolverOptions,
    pub slack: f64,
    pub compact_radius: f64,
    pub clearance: f64,
    pub fan_radius: f64,
    pub fan_samples: usize,
    pub out: PathBuf,
}

const KEYS: &[(&str, &[&str])] = &[
    ("space", &["kappa", "H"]),
    ("contour", &["a", "d", "alpha", "k", "truncations"]),
    ("mesh", &["level", "patch_grid"]),
    ("scherk", &["samples", "max_angle"]),
    ("solver", &["gradient_tol", "max_newton", "pcg_tol", "max_pcg", "armijo"]),
    ("audit", &["slack", "compact_radius", "clearance", "fan_radius", "fan_samples"]),
    ("output", &["dir"]),
];

impl RunConfig {
    pub fn defaults(pipeline: Pipeline) -> Self {
        RunConfig {
            pipeline,
            kappa: -1.0,
            h_mean: if pipeline == Pipeline::Sister { 0.5 } else { 0.0 },
            a: 1.0,
            d: 1.0,
            alpha: PI / 8.0,
            k: if pipeline == Pipeline::Noid2k { 2 } else { 3 },
            truncations: vec![2.0, 3.0, 4.0],
            level: 4,
            patch_grid: 50,
            scherk_samples: 201,
            scherk_max_angle: 1.5,
            solver: SolverOptions::default(),
            slack: 1e-8,
            compact_radius: 1.0,
            clearance: 0.3,
            fan_radius: 0.1,
            fan_samples: 300,
            out: PathBuf::from("out").join(pipeline.name()),
        }
    }

    /// Defaults overridden by the file at `path`, then by `overrides` given
    /// as `section.key=value`.
    pub fn load(pipeline: Pipeline, path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut ini = match path {
            Some(p) => Ini::load_from_file(p).map_err(|e| match e {
                ini::Error::Io(e) => Error::Io(format!("{}: {e}", p.display())),
                ini::Error::Parse(e) => Error::Invalid(format!("{}: {e}", p.display())),
            })?,
            None => Ini::new(),
        };
        for o in overrides {
            let (lhs, value) = o
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("override {o:?} is not section.key=value")))?;
            let (section, key) = lhs
                .trim()
                .split_once('.')
                .ok_or_else(|| Error::Invalid(format!("override {o:?} is not section.key=value")))?;
            ini.with_section(Some(section.trim())).set(key.trim(), value.trim());
        }
        let mut cfg = Self::defaults(pipeline);
        cfg.apply(&ini)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, ini: &Ini) -> Result<()> {
        for (section, props) in ini.iter() {
            let Some(section) = section else {
                if let Some((k, _)) = props.iter().next() {
                    return Err(Error::Invalid(format!("key {k:?} outside any section")));
                }
                continue;
            };
            let allowed = KEYS
                .iter()
                .find(|(s, _)| *s == section)
                .map(|(_, k)| *k)
                .ok_or_else(|| Error::Invalid(format!("unknown section [{section}]")))?;
            for (key, value) in props.iter() {
                if !allowed.contains(&key) {
                    return Err(Error::Invalid(format!("unknown key {section}.{key}")));
                }
                self.set(section, key, value)
                    .map_err(|e| Error::Invalid(format!("{section}.{key} = {value:?}: {e}")))?;
            }
        }
        Ok(())
    }

    fn set(&mut self, section: &str, key: &str, v: &str) -> std::result::Result<(), String> {
        match (section, key) {
            ("space", "kappa") => self.kappa = parse_real(v)?,
            ("space", "H") => self.h_mean = parse_real(v)?,
            ("contour", "a") => self.a = parse_real(v)?,
            ("contour", "d") => self.d = parse_real(v)?,
            ("contour", "alpha") => self.alpha = parse_real(v)?,
            ("contour", "k") => self.k = parse_count(v)?,
            ("contour", "truncations") => {
                self.truncations = v.split(',').map(|t| parse_real(t.trim())).collect::<std::result::Result<_, _>>()?
            }
            ("mesh", "level") => self.level = parse_count(v)?,
            ("mesh", "patch_grid") => self.patch_grid = parse_count(v)?,
            ("scherk", "samples") => self.scherk_samples = parse_count(v)?,
            ("scherk", "max_angle") => self.scherk_max_angle = parse_real(v)?,
            ("solver", "gradient_tol") => self.solver.gradient_tol = parse_real(v)?,
            ("solver", "max_newton") => self.solver.max_newton = parse_count(v)?,
            ("solver", "pcg_tol") => self.solver.pcg_tol = parse_real(v)?,
            ("solver", "max_pcg") => self.solver.max_pcg = parse_count(v)?,
            ("solver", "armijo") => self.solver.armijo = parse_real(v)?,
            ("audit", "slack") => self.slack = parse_real(v)?,
            ("audit", "compact_radius") => self.compact_radius = parse_real(v)?,
            ("audit", "clearance") => self.clearance = parse_real(v)?,
            ("audit", "fan_radius") => self.fan_radius = parse_real(v)?,
            ("audit", "fan_samples") => self.fan_samples = parse_count(v)?,
            ("output", "dir") => self.out = PathBuf::from(v),
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    pub fn space(&self) -> Result<SpaceParams> {
        SpaceParams::new(self.kappa, self.h_mean)
    }

    pub fn top(&self) -> f64 {
        *self.truncations.last().expect("validated truncation list")
    }

    pub fn knoid_spec(&self, r: f64) -> Result<KnoidSpec> {
        Ok(KnoidSpec { space: self.space()?, k: self.k, a: self.a, r })
    }

    pub fn noid2k_spec(&self, n: f64) -> Result<Noid2kSpec> {
        Ok(Noid2kSpec { space: self.space()?, k: self.k, d: self.d, alpha: self.alpha, n })
    }

    /// Check every precondition of the selected pipeline before any solve.
    pub fn validate(&self) -> Result<()> {
        let space = self.space()?;
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::Invalid(format!("{name} = {x} must be positive")))
            }
        };
        positive("audit.slack", self.slack)?;
        positive("solver.gradient_tol", self.solver.gradient_tol)?;
        positive("solver.pcg_tol", self.solver.pcg_tol)?;
        if self.level > 8 {
            return Err(Error::Invalid(format!("mesh.level = {} exceeds 8", self.level)));
        }
        if self.patch_grid < 2 {
            return Err(Error::Invalid("mesh.patch_grid must be at least 2".into()));
        }
        if self.truncations.is_empty() || self.truncations.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Invalid("contour.truncations must be a nonempty increasing list".into()));
        }
        match self.pipeline {
            Pipeline::Scherk => {
                if space.kappa_e() >= 0.0 {
                    return Err(Error::Unsupported("the Scherk-type graph needs kappa + 4H^2 < 0".into()));
                }
                if !(self.scherk_max_angle > 0.0 && self.scherk_max_angle < PI / 2.0) {
                    return Err(Error::Invalid(format!("scherk.max_angle = {} outside (0, π/2)", self.scherk_max_angle)));
                }
                if self.scherk_samples < 2 {
                    return Err(Error::Invalid("scherk.samples must be at least 2".into()));
                }
            }
            Pipeline::Knoid | Pipeline::Sister => {
                for &r in &self.truncations {
                    self.knoid_spec(r)?.validate()?;
                }
                positive("audit.compact_radius", self.compact_radius)?;
                positive("audit.fan_radius", self.fan_radius)?;
            }
            Pipeline::Noid2k => {
                for &n in &self.truncations {
                    self.noid2k_spec(n)?.validate()?;
                }
                positive("audit.compact_radius", self.compact_radius)?;
            }
            Pipeline::Verify => {}
        }
        if matches!(self.pipeline, Pipeline::Knoid | Pipeline::Noid2k | Pipeline::Sister) && self.fan_samples < 3 {
            return Err(Error::Invalid("audit.fan_samples must be at least 3".into()));
        }
        Ok(())
    }

    /// Every setting, including defaults, in the same format as the input.
    pub fn resolved(&self) -> Ini {
        let mut ini = Ini::new();
        let f = |x: f64| noidkit::io::format_float(x);
        ini.with_section(Some("space")).set("kappa", f(self.kappa)).set("H", f(self.h_mean));
        ini.with_section(Some("contour"))
            .set("a", f(self.a))
            .set("d", f(self.d))
            .set("alpha", f(self.alpha))
            .set("k", self.k.to_string())
            .set("truncations", self.truncations.iter().map(|&t| f(t)).collect::<Vec<_>>().join(", "));
        ini.with_section(Some("mesh"))
            .set("level", self.level.to_string())
            .set("patch_grid", self.patch_grid.to_string());
        ini.with_section(Some("scherk"))
            .set("samples", self.scherk_samples.to_string())
            .set("max_angle", f(self.scherk_max_angle));
        ini.with_section(Some("solver"))
            .set("gradient_tol", f(self.solver.gradient_tol))
            .set("max_newton", self.solver.max_newton.to_string())
            .set("pcg_tol", f(self.solver.pcg_tol))
            .set("max_pcg", self.solver.max_pcg.to_string())
            .set("armijo", f(self.solver.armijo));
        ini.with_section(Some("audit"))
            .set("slack", f(self.slack))
            .set("compact_radius", f(self.compact_radius))
            .set("clearance", f(self.clearance))
            .set("fan_radius", f(self.fan_radius))
            .set("fan_samples", self.fan_samples.to_string());
        ini.with_section(Some("output")).set("dir", self.out.display().to_string());
        ini
    }
}

/// A real number, `pi`, or a product or quotient of those, e.g. `pi/8`,
/// `3*pi/4`, `-0.5`.
pub fn parse_real(text: &str) -> std::result::Result<f64, String> {
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (t, None),
    };
    let factor = |s: &str| -> std::result::Result<f64, String> {
        let (sign, s) = match s.strip_prefix('-') {
            Some(rest) => (-1.0, rest.trim()),
            None => (1.0, s),
        };
        let mut v = 1.0;
        for part in s.split('*') {
            let part = part.trim();
            v *= if part.eq_ignore_ascii_case("pi") {
                PI
            } else {
                part.parse::<f64>().map_err(|_| format!("cannot read {text:?} as a number"))?
            };
        }
        Ok(sign * v)
    };
    let mut v = factor(num)?;
    if let Some(d) = den {
        v /= factor(d)?;
    }
    if !v.is_finite() {
        return Err(format!("{text:?} is not finite"));
    }
    Ok(v)
}

fn parse_count(text: &str) -> std::result::Result<usize, String> {
    text.trim().parse::<usize>().map_err(|_| format!("cannot read {text:?} as a count"))
}
