//! Command-line front end: configuration, sampling, dispatch to the check
//! suites, and report emission.

pub mod config;
pub mod sampling;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, ValueEnum};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::contact::{
    fit_space_form_c, phi_sectional_curvature, standard_sasakian, verify_almost_contact,
    verify_sasakian, ContactMetricStructure,
};
use crate::error::GeometryError;
use crate::expr::ExprError;
use crate::field::Point;
use crate::hypersurface::{
    build_adapted_frame, verify_null_tangent, Hypersurface, HypersurfaceSpec, LocalFrame,
};
use crate::identities::{
    check_codazzi, check_induced_relations, check_nonmetricity, check_structure_relations,
    check_theorem_consequences, check_uv_derivatives, classify,
};
use crate::report::{CheckEntry, CheckReport, Verdict};

pub use config::RunConfig;
pub use sampling::sample_points;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Expression(#[from] ExprError),

    #[error(transparent)]
    Geometry(#[from] GeometryError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot serialize report: {0}")]
    Serialize(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifySasakian,
    VerifyHypersurface,
    Identities,
    Codazzi,
    Classify,
    Curvature,
    Theorems,
    All,
}

impl Command {
    /// The commands `all` runs, in order.
    pub const INDIVIDUAL: [Command; 7] = [
        Command::VerifySasakian,
        Command::Curvature,
        Command::VerifyHypersurface,
        Command::Identities,
        Command::Codazzi,
        Command::Classify,
        Command::Theorems,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::VerifySasakian => "verify-sasakian",
            Command::VerifyHypersurface => "verify-hypersurface",
            Command::Identities => "identities",
            Command::Codazzi => "codazzi",
            Command::Classify => "classify",
            Command::Curvature => "curvature",
            Command::Theorems => "theorems",
            Command::All => "all",
        }
    }

    fn needs_hypersurface(self) -> bool {
        !matches!(
            self,
            Command::VerifySasakian | Command::Curvature | Command::All
        )
    }
}

/// Checks for indefinite Sasakian structures and their null hypersurfaces.
#[derive(Debug, Clone, Parser)]
#[command(name = "lightlike", version)]
pub struct Args {
    /// TOML run configuration.
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "all")]
    pub command: Command,
    /// Overrides `sampling.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides `sampling.count` (random-box mode).
    #[arg(long)]
    pub points: Option<usize>,
    /// Overrides `tolerances.analytic`.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Built-in setup: `standard-structure` or `hyperplane-x1-y3`.
    #[arg(long)]
    pub fixture: Option<String>,
    /// Report destination; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Judge obstruction classes by residual alone.
    #[arg(long)]
    pub strict_obstructions: bool,
}

impl Args {
    /// Loads the configuration and applies flag overrides.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut config = match (&self.config, &self.fixture) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "give either a config file or --fixture, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Config(
                    "a config file or --fixture is required".into(),
                ))
            }
            (None, Some(name)) => RunConfig::fixture(name)?,
            (Some(path), None) => {
                let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?;
                RunConfig::from_toml(&text)?
            }
        };
        if let Some(seed) = self.seed {
            config.sampling.seed = seed;
        }
        if let Some(count) = self.points {
            config.sampling.count = count;
        }
        if let Some(tol) = self.tol {
            config.tolerances.analytic = tol;
        }
        if self.strict_obstructions {
            config.options.strict_obstructions = true;
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    /// SHA-256 of the resolved configuration serialized as JSON.
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
    pub command: Command,
    pub point_count: usize,
    pub strict_obstructions: bool,
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pass_count: usize,
    pub fail_count: usize,
    pub vacuous_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub metadata: Metadata,
    pub checks: Vec<CheckEntry>,
    pub summary: Summary,
}

impl ReportDocument {
    pub fn exit_code(&self) -> i32 {
        if self.summary.fail_count == 0 {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Plain-text table, one row per check.
    pub fn table(&self) -> String {
        let strict = self.metadata.strict_obstructions;
        let width = self
            .checks
            .iter()
            .map(|c| c.name.len())
            .max()
            .unwrap_or(4)
            .max(5);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$}  {:<7}  {:>10}  {:>8}  identity",
            "check", "verdict", "residual", "tol"
        );
        for c in &self.checks {
            let verdict = match c.verdict(strict) {
                Verdict::Pass if c.expected_failure => "exhibit",
                Verdict::Pass => "pass",
                Verdict::Fail => "FAIL",
                Verdict::Vacuous => "vacuous",
            };
            let _ = writeln!(
                out,
                "{:<width$}  {:<7}  {:>10.3e}  {:>8.1e}  {}",
                c.name, verdict, c.max_residual, c.tolerance, c.anchor
            );
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "{} passed, {} failed, {} vacuous ({} points, command {})",
            s.pass_count,
            s.fail_count,
            s.vacuous_count,
            self.metadata.point_count,
            self.metadata.command.name()
        );
        for note in &self.metadata.notes {
            let _ = writeln!(out, "note: {note}");
        }
        out
    }
}

/// Everything a command needs: the structure, the sample points, and the
/// hypersurface with its frame when configured.
pub struct Setup {
    pub config: RunConfig,
    pub structure: Arc<ContactMetricStructure>,
    pub surface: Option<(HypersurfaceSpec, Arc<Hypersurface>)>,
    pub points: Vec<Point>,
}

impl Setup {
    pub fn new(config: RunConfig) -> Result<Self, CliError> {
        let structure = Arc::new(standard_sasakian(config.n, config.q)?);
        let surface = match config.hypersurface_spec()? {
            None => None,
            Some(spec) => {
                let surf = Arc::new(Hypersurface::new(spec.defining.clone())?);
                Some((spec, surf))
            }
        };
        let points = sample_points(
            &config.sampling,
            config.dim(),
            surface.as_ref().map(|(_, s)| s.as_ref()),
        )?;
        Ok(Self {
            config,
            structure,
            surface,
            points,
        })
    }

    fn surface(&self) -> Result<&(HypersurfaceSpec, Arc<Hypersurface>), CliError> {
        self.surface
            .as_ref()
            .ok_or_else(|| CliError::Config("this command needs a [hypersurface] section".into()))
    }

    /// The adapted frame, anchored at the first sample point.
    pub fn frame(&self) -> Result<LocalFrame, CliError> {
        let (spec, _) = self.surface()?;
        Ok(build_adapted_frame(
            self.structure.clone(),
            spec,
            &self.points[0],
            self.config.tolerances.analytic,
        )?)
    }

    fn seed(&self) -> u64 {
        self.config.sampling.seed
    }
}

fn curvature_checks(setup: &Setup) -> Result<CheckReport, CliError> {
    let s = &setup.structure;
    let tol = &setup.config.tolerances;
    let fit = fit_space_form_c(
        s,
        &setup.points,
        setup.config.options.space_form_samples,
        setup.seed(),
    )?;
    let mut r = CheckReport::new();
    r.merge_entry(
        CheckEntry::residual(
            "space_form_fit",
            "R(X,Y)Z = c (S + T)/4 + (3S - T)/4 with constant c",
            fit.max_residual,
            tol.fd,
        )
        .with_witness("c_estimate", fit.c),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(setup.seed().wrapping_add(1));
    let sections = setup.points.len().max(setup.config.options.phi_sections);
    let mut worst = 0.0_f64;
    for k in 0..sections {
        let p = &setup.points[k % setup.points.len()];
        let zeta = s.zeta_at(p);
        let eta = s.eta_at(p);
        let k_val = loop {
            let raw = DVector::from_fn(s.dim(), |_, _| rng.random_range(-1.0..=1.0));
            let x = &raw - &zeta * eta.dot(&raw);
            match phi_sectional_curvature(s, &x, p) {
                Ok(v) => break v,
                Err(GeometryError::NotPhiSection(_) | GeometryError::DegeneratePlane(_)) => {
                    continue
                }
                Err(e) => return Err(e.into()),
            }
        };
        worst = worst.max((k_val - fit.c).abs());
    }
    r.merge_entry(
        CheckEntry::residual(
            "phi_sectional_curvature",
            "K(X, phi X) = c for eta(X) = 0",
            worst,
            tol.fd,
        )
        .with_witness("sections", sections as f64),
    );
    Ok(r)
}

fn command_checks(
    command: Command,
    setup: &Setup,
    notes: &mut Vec<String>,
) -> Result<CheckReport, CliError> {
    let tol = setup.config.tolerances;
    let points = &setup.points;
    let mut r = CheckReport::new();
    match command {
        Command::VerifySasakian => {
            for p in points {
                r.merge(verify_almost_contact(&setup.structure, p, tol.analytic)?);
                r.merge(verify_sasakian(&setup.structure, p, tol.analytic)?);
            }
        }
        Command::Curvature => r = curvature_checks(setup)?,
        Command::VerifyHypersurface => {
            let (_, surf) = setup.surface()?;
            let frame = setup.frame()?;
            for p in points {
                r.merge(verify_null_tangent(
                    &setup.structure,
                    surf,
                    p,
                    tol.analytic,
                )?);
                r.merge(frame.validate(p, tol.analytic)?);
            }
        }
        Command::Identities => {
            let frame = setup.frame()?;
            r.merge(check_induced_relations(&frame, points, &tol)?);
            r.merge(check_structure_relations(&frame, points, &tol)?);
            r.merge(check_uv_derivatives(&frame, points, &tol)?);
            r.merge(check_nonmetricity(&frame, points, tol.fd)?);
        }
        Command::Codazzi => {
            let frame = setup.frame()?;
            let fit = fit_space_form_c(
                &setup.structure,
                points,
                setup.config.options.space_form_samples,
                setup.seed(),
            )?;
            for e in check_codazzi(&frame, points, fit.c, tol.fd)?.entries {
                r.merge_entry(e.with_witness("c", fit.c));
            }
        }
        Command::Classify => {
            let frame = setup.frame()?;
            r = classify(&frame, points, &tol)?.to_checks();
        }
        Command::Theorems => {
            let frame = setup.frame()?;
            let classes = classify(&frame, points, &tol)?;
            r = check_theorem_consequences(&frame, points, &classes, &tol, setup.seed())?.checks;
        }
        Command::All => {
            for c in Command::INDIVIDUAL {
                if c.needs_hypersurface() && setup.surface.is_none() {
                    continue;
                }
                match command_checks(c, setup, notes) {
                    Ok(sub) => r.entries.extend(sub.entries),
                    Err(CliError::Geometry(GeometryError::NotApplicable(why)))
                        if c == Command::Theorems =>
                    {
                        notes.push(format!("theorems skipped: {why}"));
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(r)
}

/// Runs `command` on `config` and assembles the report document.
pub fn run(command: Command, config: RunConfig) -> Result<ReportDocument, CliError> {
    config.validate()?;
    let hash = hex::encode(Sha256::digest(serde_json::to_vec(&config)?));
    let setup = Setup::new(config)?;
    let mut notes = Vec::new();
    let checks = command_checks(command, &setup, &mut notes)?.entries;
    let strict = setup.config.options.strict_obstructions;
    let count = |v: Verdict| checks.iter().filter(|c| c.verdict(strict) == v).count();
    let summary = Summary {
        pass_count: count(Verdict::Pass),
        fail_count: count(Verdict::Fail),
        vacuous_count: count(Verdict::Vacuous),
    };
    Ok(ReportDocument {
        metadata: Metadata {
            config_hash: hash,
            seed: setup.config.sampling.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            point_count: setup.points.len(),
            strict_obstructions: strict,
            notes,
        },
        checks,
        summary,
    })
}

/// Full CLI behaviour; returns the process exit code. The report goes to
/// `--output` or standard output, the table and errors to standard error.
pub fn main_with(args: &Args) -> i32 {
    let outcome = args.resolve().and_then(|config| {
        let doc = run(args.command, config)?;
        let json = doc.to_json()?;
        match &args.output {
            Some(path) => std::fs::write(path, &json).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?,
            None => print!("{json}"),
        }
        Ok(doc)
    });
    match outcome {
        Ok(doc) => {
            eprint!("{}", doc.table());
            doc.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
