use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};
use steerlp::lp::{
    approx_robustness, measurement_robustness, measurement_shrinking_factor, state_lower_bound, state_upper_bound,
    RobustnessResult,
};
use steerlp::measurements::planar_bound;
use steerlp::polytope::io::PolytopeFile;
use steerlp::polytope::{analyze, outer_from_inner, refine_polytope, shrinking_report, PolytopeKind, StatePolytope};
use steerlp::quantum::io::{AssemblageFile, MatrixJson, MeasurementFile, StateFile};
use steerlp::quantum::{Assemblage, ValidationReport};
use steerlp::sdp::{exact_robustness_assemblage, exact_robustness_measurements, ExactResult};

use crate::config::{read_assemblage, resolve_polytope, resolve_state, Context, MeasureArgs, Measurements};
use crate::error::{CliError, CliResult};
use crate::output::{
    append_csv, document, exact_json, finite, num, robustness_json, write_csv, write_json, Meta, Row,
};
use crate::{MeasureCmd, PolytopeCmd, RobustnessCmd, SdpCmd, StateCmd, ValidateCmd};

fn write_polytope_file(ctx: &Context, path: &Path, p: &StatePolytope, meta: &Meta) -> CliResult<()> {
    let mut v = serde_json::to_value(PolytopeFile::from_polytope(p))?;
    v["meta"] = serde_json::to_value(meta)?;
    write_json(&ctx.path(path), &v)
}

fn describe(p: &StatePolytope) -> String {
    format!(
        "{}: d={} vertices={} facets={} r={}",
        p.provenance(),
        p.dim(),
        p.len(),
        p.facets().map_or("-".into(), |f| f.len().to_string()),
        p.shrinking_factor().map_or("-".into(), |r| format!("{r:.10}")),
    )
}

pub fn polytope(ctx: &Context, config: &Value, cmd: &PolytopeCmd) -> CliResult<()> {
    let meta = Meta::new(config, &Default::default());
    match cmd {
        PolytopeCmd::Generate { polytope, out, no_facets, facet } => {
            let mut p = resolve_polytope(ctx, polytope, &facet.options())?;
            if *no_facets {
                let r = p.shrinking_factor();
                p = p.without_facets();
                if let Some(r) = r {
                    p = p.with_shrinking_factor(r)?;
                }
            }
            write_polytope_file(ctx, out, &p, &meta)?;
            println!("{}", describe(&p));
        }
        PolytopeCmd::Import { input, out, recompute, facet } => {
            let p = steerlp::polytope::io::read_polytope(&ctx.input(input)?)?;
            let p = if *recompute || p.shrinking_factor().is_none() {
                let stored = p.shrinking_factor();
                let (q, rep) = analyze(&p.without_facets(), &facet.options())?;
                if let Some(s) = stored {
                    println!("stored r={s:.10} recomputed r={:.10}", rep.r);
                }
                q
            } else {
                p
            };
            write_polytope_file(ctx, out, &p, &meta)?;
            println!("{}", describe(&p));
        }
        PolytopeCmd::Refine { polytope, steps, out, csv, facet } => {
            let opts = facet.options();
            let start = resolve_polytope(ctx, polytope, &opts)?;
            let outcome = refine_polytope(&start, *steps, &opts)?;
            let p = outcome.polytope.clone().with_provenance(format!("{polytope}|refine({})", outcome.steps_done()));
            write_polytope_file(ctx, out, &p, &meta)?;
            for (s, step) in outcome.history.iter().enumerate() {
                println!("step {s}: vertices={} facets={} r={:.10}", step.vertices, step.facets, step.r);
            }
            if let Some(path) = csv {
                let rows: Vec<Row> = outcome
                    .history
                    .iter()
                    .enumerate()
                    .map(|(s, step)| Row {
                        family: "refinement".into(),
                        d: start.dim(),
                        m: Some(step.vertices),
                        polytope_id: format!("{polytope}|refine({s})"),
                        r: Some(step.r),
                        method: "refine".into(),
                        ..Default::default()
                    })
                    .collect();
                write_csv(&ctx.path(path), &meta, &rows)?;
            }
            if let Some(why) = outcome.stopped {
                return Err(CliError::Cap(format!("refinement stopped early ({why}); partial result written")));
            }
        }
        PolytopeCmd::Shrink { polytope, out, facet } => {
            let p = resolve_polytope(ctx, polytope, &facet.options())?;
            if p.facets().is_none() {
                return Err(CliError::invalid(format!("'{polytope}' has no facets to analyze")));
            }
            let rep = shrinking_report(&p)?;
            println!("{}", describe(&p));
            println!("minimizing facets: {}", rep.argmin.len());
            if let Some(path) = out {
                let body = json!({
                    "r": rep.r,
                    "vertices": p.len(),
                    "facets": p.facets().map_or(0, |f| f.len()),
                    "argmin": rep.argmin,
                    "ratios": rep.ratios,
                    "worst_state": MatrixJson::from_operator(&rep.worst_state),
                });
                write_json(&ctx.path(path), &document(&meta, config, body))?;
            }
        }
        PolytopeCmd::Outer { polytope, out, facet } => {
            let p = resolve_polytope(ctx, polytope, &facet.options())?;
            let o = outer_from_inner(&p)?;
            write_polytope_file(ctx, out, &o, &meta)?;
            println!("{}", describe(&o));
        }
    }
    Ok(())
}

pub fn measure(ctx: &Context, config: &Value, cmd: &MeasureCmd) -> CliResult<()> {
    let meta = Meta::new(config, &Default::default());
    let m = cmd.measure.resolve(ctx)?;
    let metadata = json!({ "family": m.family, "seed": m.seed, "meta": meta });
    let file = MeasurementFile::from_set(&m.set, Some(metadata));
    write_json(&ctx.path(&cmd.out), &serde_json::to_value(file)?)?;
    println!("{}: d={} k={} m={}", m.family, m.set.dim(), m.set.outcomes(), m.set.count());
    Ok(())
}

/// The signal of a robustness run: a measurement set or an assemblage file.
enum Target {
    Measurements(Measurements),
    Assemblage(Assemblage),
}

impl Target {
    fn resolve(ctx: &Context, measure: &MeasureArgs, assemblage: Option<&Path>) -> CliResult<Self> {
        match assemblage {
            Some(p) => Ok(Target::Assemblage(read_assemblage(ctx, p)?)),
            None => Ok(Target::Measurements(measure.resolve(ctx)?)),
        }
    }

    fn shape(&self) -> (usize, usize, usize) {
        match self {
            Target::Measurements(m) => (m.set.dim(), m.set.outcomes(), m.set.count()),
            Target::Assemblage(a) => (a.dim(), a.outcomes(), a.settings()),
        }
    }

    fn family(&self) -> String {
        match self {
            Target::Measurements(m) => m.family.clone(),
            Target::Assemblage(_) => "assemblage".into(),
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Target::Measurements(m) => m.seed,
            Target::Assemblage(_) => None,
        }
    }

    fn exact(&self, opts: &steerlp::sdp::SdpOptions) -> CliResult<ExactResult> {
        Ok(match self {
            Target::Measurements(m) => exact_robustness_measurements(&m.set, opts)?,
            Target::Assemblage(a) => exact_robustness_assemblage(a, opts)?,
        })
    }
}

fn fmt_bound(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6}")
    } else {
        "inf".into()
    }
}

fn lp_row(target: &Target, polytope: &StatePolytope, res: &RobustnessResult, exact: Option<f64>, timing: bool) -> Row {
    let (d, k, m) = target.shape();
    Row {
        family: target.family(),
        d,
        k: Some(k),
        m: Some(m),
        polytope_id: polytope.provenance().into(),
        r: res.r_used,
        method: res.method.clone(),
        lower: finite(res.lower),
        upper: finite(res.upper),
        exact,
        runtime_s: if timing { res.wall_time_s } else { 0.0 },
        seed: target.seed(),
    }
}

pub fn robustness(ctx: &Context, config: &Value, cmd: &RobustnessCmd) -> CliResult<()> {
    let meta = Meta::new(config, &cmd.solver.solver()?);
    let target = Target::resolve(ctx, &cmd.measure, cmd.assemblage.as_deref())?;
    let polytope = resolve_polytope(ctx, &cmd.polytope, &cmd.facet.options())?;
    let opts = cmd.solver.lp(!cmd.no_certificate)?;
    let res = match &target {
        Target::Measurements(m) => measurement_robustness(&m.set, &polytope, &opts)?,
        Target::Assemblage(a) => approx_robustness(a, &polytope, &opts)?,
    };
    if !res.status.is_optimal() {
        return Err(CliError::Solver(format!("LP ended with {}", res.raw_status)));
    }
    let exact = if cmd.oracle { Some(target.exact(&cmd.solver.sdp()?)?) } else { None };
    let planar = match &target {
        Target::Measurements(Measurements { planar: Some(a), .. }) => Some(planar_bound(a)),
        _ => None,
    };

    print!("{} [{}, {}] {}", res.method, fmt_bound(res.lower), fmt_bound(res.upper), res.status.as_str());
    if let Some(e) = &exact {
        print!("  exact {:.6}", e.eta);
    }
    if let Some(b) = planar {
        print!("  planar-bound {b:.6}");
    }
    println!();
    if let Some(c) = &res.certificate {
        println!("certificate validated: {}", c.validated);
    }

    if let Some(path) = &cmd.csv {
        let mut rows = vec![lp_row(&target, &polytope, &res, exact.as_ref().map(|e| e.eta), ctx.timing)];
        if let Some(b) = planar {
            let mut row = rows[0].clone();
            row.method = "planar-bound".into();
            row.lower = None;
            row.upper = None;
            row.exact = Some(b);
            row.runtime_s = 0.0;
            rows.push(row);
        }
        append_csv(&ctx.path(path), &meta, &rows)?;
    }
    if let Some(path) = &cmd.out {
        let mut body = robustness_json(&res, ctx.timing);
        body["polytope_id"] = json!(polytope.provenance());
        body["exact"] = exact.as_ref().map_or(Value::Null, |e| exact_json(e, ctx.timing));
        body["planar_bound"] = planar.map_or(Value::Null, num);
        write_json(&ctx.path(path), &document(&meta, config, body))?;
    }
    Ok(())
}

pub fn sdp(ctx: &Context, config: &Value, cmd: &SdpCmd) -> CliResult<()> {
    let meta = Meta::new(config, &cmd.solver.solver()?);
    let target = Target::resolve(ctx, &cmd.measure, cmd.assemblage.as_deref())?;
    let e = target.exact(&cmd.solver.sdp()?)?;
    println!("{} {:.8} {} ({} strategies)", e.method, e.eta, e.status.as_str(), e.strategies);
    if let Some(path) = &cmd.csv {
        let (d, k, m) = target.shape();
        let eta = finite(e.eta);
        let row = Row {
            family: target.family(),
            d,
            k: Some(k),
            m: Some(m),
            polytope_id: String::new(),
            r: None,
            method: e.method.into(),
            lower: eta,
            upper: eta,
            exact: eta,
            runtime_s: if ctx.timing { e.wall_time_s } else { 0.0 },
            seed: target.seed(),
        };
        append_csv(&ctx.path(path), &meta, &[row])?;
    }
    if let Some(path) = &cmd.out {
        write_json(&ctx.path(path), &document(&meta, config, exact_json(&e, ctx.timing)))?;
    }
    Ok(())
}

pub fn state(ctx: &Context, config: &Value, cmd: &StateCmd, upper: bool) -> CliResult<()> {
    let meta = Meta::new(config, &cmd.solver.solver()?);
    let rho = resolve_state(ctx, &cmd.state)?;
    if !cmd.measure.is_set() {
        return Err(CliError::invalid("give --measurements FILE or --family"));
    }
    let m = cmd.measure.resolve(ctx)?;
    let noise = cmd.noise.model(ctx)?;
    let opts = cmd.solver.lp(upper)?;
    let polytope = resolve_polytope(ctx, &cmd.polytope, &cmd.facet.options())?;
    let (res, mu) = if upper {
        let outer = match polytope.kind() {
            PolytopeKind::Outer => polytope.clone(),
            PolytopeKind::Inner => outer_from_inner(&polytope)?,
        };
        (state_upper_bound(&rho, &m.set, &outer, &noise, &opts)?, None)
    } else {
        let mu = match cmd.mu {
            Some(mu) => mu,
            None => measurement_shrinking_factor(&m.set)?,
        };
        (state_lower_bound(&rho, &m.set, mu, &polytope, &noise, &opts)?, Some(mu))
    };
    let bound = if upper { res.upper } else { res.lower };
    println!("{} {} {}", res.method, fmt_bound(bound), res.status.as_str());

    if let Some(path) = &cmd.csv {
        let row = Row {
            family: m.family.clone(),
            d: rho.dim_b(),
            k: Some(m.set.outcomes()),
            m: Some(m.set.count()),
            polytope_id: polytope.provenance().into(),
            r: polytope.shrinking_factor(),
            method: res.method.clone(),
            lower: if upper { None } else { finite(res.lower) },
            upper: if upper { finite(res.upper) } else { None },
            exact: None,
            runtime_s: if ctx.timing { res.wall_time_s } else { 0.0 },
            seed: m.seed,
        };
        append_csv(&ctx.path(path), &meta, &[row])?;
    }
    if let Some(path) = &cmd.out {
        let mut body = robustness_json(&res, ctx.timing);
        body["noise"] = serde_json::to_value(noise.kind())?;
        body["mu"] = mu.map_or(Value::Null, num);
        body["polytope_id"] = json!(polytope.provenance());
        write_json(&ctx.path(path), &document(&meta, config, body))?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FileKind {
    Auto,
    Measurements,
    Assemblage,
    State,
    Polytope,
}

fn print_report(r: &ValidationReport) {
    for c in &r.checks {
        println!(
            "  {:<4} {:<24} violation {:.3e} (tolerance {:.1e})",
            if c.passed { "ok" } else { "FAIL" },
            c.name,
            c.violation,
            c.tolerance
        );
    }
}

pub fn validate(ctx: &Context, cmd: &ValidateCmd) -> CliResult<()> {
    let value: Value = ctx.read_json(&cmd.input)?;
    let kind = match cmd.kind {
        FileKind::Auto if value.get("vertices").is_some() => FileKind::Polytope,
        FileKind::Auto if value.get("d_a").is_some() => FileKind::State,
        FileKind::Auto if value.get("reduced").is_some() => FileKind::Assemblage,
        FileKind::Auto => FileKind::Measurements,
        k => k,
    };
    let report = match kind {
        FileKind::Measurements => {
            let f: MeasurementFile = serde_json::from_value(value)?;
            steerlp::quantum::measurement::validate_measurements(&f.operators()?, cmd.tol)
        }
        FileKind::Assemblage => {
            let f: AssemblageFile = serde_json::from_value(value)?;
            steerlp::quantum::assemblage::validate_assemblage(&f.operators()?, cmd.tol)
        }
        FileKind::State => {
            let f: StateFile = serde_json::from_value(value)?;
            let op = f.matrix.to_operator()?;
            steerlp::quantum::BipartiteState::new_unchecked(f.d_a, f.d_b, op)?.validate(cmd.tol)
        }
        FileKind::Polytope => {
            let f: PolytopeFile = serde_json::from_value(value)?;
            let p = f.to_polytope()?;
            println!("polytope ok: {}", describe(&p));
            return Ok(());
        }
        FileKind::Auto => unreachable!("resolved above"),
    };
    println!("{}:", report.object);
    print_report(&report);
    match report.failure() {
        Some(why) => Err(CliError::Validation(format!("{}: {why}", report.object))),
        None => Ok(()),
    }
}
