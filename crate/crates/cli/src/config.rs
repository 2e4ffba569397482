//! Shared flags and their resolution into library objects.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;
use steerlp::lp::{LpOptions, NoiseModel, SolverOptions};
use steerlp::measurements::{
    fibonacci_qubit, fibonacci_qutrit, planar_measurements, random_povm, random_projective, PlanarAngles,
};
use steerlp::polytope::io::read_polytope;
use steerlp::polytope::{
    analyze, icosphere, fibonacci_sphere, mub_bases, mub_polytope, outer_from_inner, polygon, rational_pure_states,
    refine_polytope, FacetOptions, HullMode, HullOptions, PolytopeKind, StatePolytope,
};
use steerlp::quantum::io::{AssemblageFile, MeasurementFile, StateFile};
use steerlp::quantum::{Assemblage, BipartiteState, HermitianOperator, MeasurementSet};
use steerlp::sdp::{SdpOptions, STRATEGY_CAP};

use crate::error::{CliError, CliResult};

/// Global context: the working directory every path is resolved against.
#[derive(Clone, Debug)]
pub struct Context {
    pub workdir: PathBuf,
    pub timing: bool,
}

impl Context {
    pub fn path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.workdir.join(p)
        }
    }

    /// Resolves an input path and checks that it exists.
    pub fn input(&self, p: &Path) -> CliResult<PathBuf> {
        let full = self.path(p);
        if !full.is_file() {
            return Err(CliError::Io(format!("input file {} does not exist", full.display())));
        }
        Ok(full)
    }

    pub fn read_json<T: serde::de::DeserializeOwned>(&self, p: &Path) -> CliResult<T> {
        let full = self.input(p)?;
        let text = std::fs::read_to_string(&full)?;
        serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("{}: {e}", full.display())))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    FibonacciQubit,
    FibonacciQutrit,
    Planar,
    RandomProjective,
    RandomPovm,
    Mub,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::FibonacciQubit => "fibonacci-qubit",
            Family::FibonacciQutrit => "fibonacci-qutrit",
            Family::Planar => "planar",
            Family::RandomProjective => "random-projective",
            Family::RandomPovm => "random-povm",
            Family::Mub => "mub",
        }
    }
}

/// A measurement set: read from a file or generated from a family.
#[derive(Args, Clone, Debug, Serialize)]
pub struct MeasureArgs {
    /// Measurement-set JSON file.
    #[arg(long, conflicts_with = "family")]
    pub measurements: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Number of measurements.
    #[arg(long)]
    pub m: Option<usize>,
    /// Hilbert-space dimension (random and MUB families).
    #[arg(long)]
    pub d: Option<usize>,
    /// Outcomes per measurement (random POVMs).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Planar Bloch angles in radians, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub angles: Option<Vec<f64>>,
    /// File of planar angles in radians (whitespace or comma separated).
    #[arg(long, conflicts_with = "angles")]
    pub angles_file: Option<PathBuf>,
}

/// A resolved measurement set with the labels used in CSV rows.
pub struct Measurements {
    pub set: MeasurementSet,
    pub family: String,
    pub seed: Option<u64>,
    pub planar: Option<PlanarAngles>,
}

fn need(v: Option<usize>, flag: &str, family: Family) -> CliResult<usize> {
    v.ok_or_else(|| CliError::invalid(format!("--{flag} is required for --family {}", family.name())))
}

impl MeasureArgs {
    pub fn is_set(&self) -> bool {
        self.measurements.is_some() || self.family.is_some()
    }

    fn planar_angles(&self, ctx: &Context) -> CliResult<PlanarAngles> {
        let raw = match (&self.angles, &self.angles_file) {
            (Some(a), _) => a.clone(),
            (None, Some(p)) => {
                let text = std::fs::read_to_string(ctx.input(p)?)?;
                text.split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<f64>().map_err(|e| CliError::invalid(format!("angle '{s}': {e}"))))
                    .collect::<CliResult<_>>()?
            }
            (None, None) => return Err(CliError::invalid("--family planar needs --angles or --angles-file")),
        };
        Ok(PlanarAngles::new(&raw)?)
    }

    pub fn resolve(&self, ctx: &Context) -> CliResult<Measurements> {
        if let Some(p) = &self.measurements {
            let file: MeasurementFile = ctx.read_json(p)?;
            return Ok(Measurements { set: file.to_set()?, family: "file".into(), seed: None, planar: None });
        }
        let family = self.family.ok_or_else(|| CliError::invalid("give --measurements FILE or --family"))?;
        let mut planar = None;
        let mut seed = None;
        let set = match family {
            Family::FibonacciQubit => fibonacci_qubit(need(self.m, "m", family)?)?,
            Family::FibonacciQutrit => fibonacci_qutrit(need(self.m, "m", family)?)?,
            Family::Planar => {
                let angles = self.planar_angles(ctx)?;
                let set = planar_measurements(&angles)?;
                planar = Some(angles);
                set
            }
            Family::RandomProjective => {
                seed = Some(self.seed);
                random_projective(need(self.m, "m", family)?, self.d.unwrap_or(2), self.seed)?
            }
            Family::RandomPovm => {
                seed = Some(self.seed);
                let d = self.d.unwrap_or(2);
                random_povm(need(self.m, "m", family)?, d, self.k.unwrap_or(d + 1), self.seed)?
            }
            Family::Mub => {
                let d = need(self.d, "d", family)?;
                let bases = mub_bases(d)?;
                let m = self.m.unwrap_or(bases.len());
                if m == 0 || m > bases.len() {
                    return Err(CliError::invalid(format!("d={d} has {} MUBs, asked for {m}", bases.len())));
                }
                MeasurementSet::new(
                    bases[..m].iter().map(|b| b.iter().map(HermitianOperator::projector).collect()).collect(),
                )?
            }
        };
        Ok(Measurements { set, family: family.name().into(), seed, planar })
    }
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct SolverArgs {
    /// Primal and dual feasibility tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol_feas: f64,
    /// Absolute and relative duality-gap tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol_gap: f64,
    #[arg(long, default_value_t = 400)]
    pub max_iter: u32,
    /// Cap on the number of deterministic strategies in the exact oracle.
    #[arg(long, default_value_t = STRATEGY_CAP)]
    pub strategy_cap: u128,
}

impl SolverArgs {
    pub fn solver(&self) -> CliResult<SolverOptions> {
        for (name, v) in [("tol-feas", self.tol_feas), ("tol-gap", self.tol_gap)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(CliError::invalid(format!("--{name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(SolverOptions { tol_feas: self.tol_feas, tol_gap: self.tol_gap, max_iter: self.max_iter, verbose: false })
    }

    pub fn lp(&self, certificate: bool) -> CliResult<LpOptions> {
        Ok(LpOptions { solver: self.solver()?, certificate })
    }

    pub fn sdp(&self) -> CliResult<SdpOptions> {
        Ok(SdpOptions { solver: self.solver()?, cap: self.strategy_cap })
    }
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct FacetArgs {
    /// Exact rational facet enumeration (qubit rational polytopes only).
    #[arg(long)]
    pub exact: bool,
    /// Maximum vertex count for facet enumeration.
    #[arg(long)]
    pub vertex_cap: Option<usize>,
    /// Maximum intermediate ray count in the double-description method.
    #[arg(long, default_value_t = HullOptions::default().max_rays)]
    pub max_rays: usize,
}

impl FacetArgs {
    pub fn options(&self) -> FacetOptions {
        FacetOptions {
            mode: if self.exact { HullMode::Exact } else { HullMode::Float },
            vertex_cap: self.vertex_cap,
            hull: HullOptions { max_rays: self.max_rays },
        }
    }
}

fn parse_parts(spec: &str, want: usize) -> CliResult<Vec<usize>> {
    let parts: Vec<&str> = spec.split(':').skip(1).collect();
    if parts.len() != want {
        return Err(CliError::invalid(format!("polytope spec '{spec}' needs {want} numeric field(s)")));
    }
    parts
        .iter()
        .map(|p| p.parse::<usize>().map_err(|e| CliError::invalid(format!("polytope spec '{spec}': {e}"))))
        .collect()
}

/// Vertices of a generator spec without facets.
fn generate(spec: &str, facet: &FacetOptions) -> CliResult<Option<StatePolytope>> {
    let head = spec.split(':').next().unwrap_or_default();
    let p = match head {
        "rational" => {
            let v = parse_parts(spec, 2)?;
            rational_pure_states(v[0], u32::try_from(v[1]).map_err(|e| CliError::invalid(e.to_string()))?)?
        }
        "mub" => mub_polytope(parse_parts(spec, 1)?[0])?,
        "mub-refined" => {
            let v = parse_parts(spec, 2)?;
            let out = refine_polytope(&mub_polytope(v[0])?, v[1], facet)?;
            if let Some(why) = out.stopped {
                return Err(CliError::Cap(format!("refinement of '{spec}' stopped: {why}")));
            }
            out.polytope
        }
        "ico" => icosphere(parse_parts(spec, 1)?[0])?,
        "fib" => fibonacci_sphere(parse_parts(spec, 1)?[0])?,
        "polygon" => polygon(parse_parts(spec, 1)?[0])?,
        _ => return Ok(None),
    };
    Ok(Some(p.with_provenance(spec)))
}

/// Polytope given as a generator spec (`rational:D:Q`, `mub:D`, `mub-refined:D:STEPS`,
/// `ico:LEVEL`, `fib:N`, `polygon:N`, optionally prefixed `outer:`) or a JSON file.
/// The result carries facets and its shrinking factor whenever those can be computed.
pub fn resolve_polytope(ctx: &Context, spec: &str, facet: &FacetOptions) -> CliResult<StatePolytope> {
    if let Some(inner) = spec.strip_prefix("outer:") {
        let p = resolve_polytope(ctx, inner, facet)?;
        return Ok(outer_from_inner(&p)?.with_provenance(spec));
    }
    let p = match generate(spec, facet)? {
        Some(p) => p,
        None => read_polytope(&ctx.input(Path::new(spec))?)?,
    };
    if p.shrinking_factor().is_some() || p.kind() == PolytopeKind::Outer {
        return Ok(p);
    }
    Ok(analyze(&p, facet)?.0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum NoiseSpec {
    Local,
    Global,
    File(PathBuf),
}

pub fn parse_noise(s: &str) -> Result<NoiseSpec, String> {
    Ok(match s {
        "local" => NoiseSpec::Local,
        "global" => NoiseSpec::Global,
        other => NoiseSpec::File(PathBuf::from(other)),
    })
}

impl NoiseSpec {
    pub fn model(&self, ctx: &Context) -> CliResult<NoiseModel> {
        Ok(match self {
            NoiseSpec::Local => NoiseModel::LocalWhite,
            NoiseSpec::Global => NoiseModel::GlobalWhite,
            NoiseSpec::File(p) => {
                let f: StateFile = ctx.read_json(p)?;
                NoiseModel::Custom(f.to_state()?.matrix().clone())
            }
        })
    }
}

/// `phi:D` (maximally entangled), `random-hs:DA:DB:SEED`, or a state JSON file.
pub fn resolve_state(ctx: &Context, spec: &str) -> CliResult<BipartiteState> {
    let head = spec.split(':').next().unwrap_or_default();
    match head {
        "phi" => Ok(BipartiteState::maximally_entangled(parse_parts(spec, 1)?[0])),
        "random-hs" => {
            let v = parse_parts(spec, 3)?;
            let mut rng = steerlp::random::seeded(v[2] as u64);
            Ok(steerlp::random::random_bipartite_hs(&mut rng, v[0], v[1]))
        }
        _ => {
            let f: StateFile = ctx.read_json(Path::new(spec))?;
            Ok(f.to_state()?)
        }
    }
}

pub fn read_assemblage(ctx: &Context, p: &Path) -> CliResult<Assemblage> {
    let f: AssemblageFile = ctx.read_json(p)?;
    Ok(f.to_assemblage()?)
}
