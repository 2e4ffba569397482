//! Regeneration of table and figure data. Independent runs fan out over the
//! rayon pool; rows are sorted before writing so output order never depends on
//! scheduling.

use std::collections::BTreeMap;

use clap::ValueEnum;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use steerlp::lp::{measurement_robustness, LpOptions};
use steerlp::measurements::{
    fibonacci_qubit, fibonacci_qutrit, planar_bound, planar_measurements, random_povm, random_projective, PlanarAngles,
};
use steerlp::polytope::{analyze, mub_polytope, rational_pure_states, refine_polytope, FacetOptions, StatePolytope};
use steerlp::quantum::MeasurementSet;
use steerlp::random::seeded;
use steerlp::sdp::{exact_robustness_measurements, SdpOptions};

use crate::config::{resolve_polytope, Context};
use crate::error::CliResult;
use crate::output::{finite, write_csv, Meta, Row};
use crate::TableCmd;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Which {
    /// Rational pure-state polytopes: vertex counts and shrinking factors.
    Table2,
    /// Fibonacci qubit measurements: LP brackets and exact values.
    Table3,
    /// Fibonacci qutrit measurements: LP brackets and exact values.
    Table4,
    /// Refinement of the qutrit MUB polytope.
    Table5,
    /// Robustness against m for Fibonacci qubit measurements over several polytopes.
    Fig3,
    /// Random planar measurements against the planar closed form.
    Fig4,
    /// Random 4-outcome POVMs against random projective measurements.
    Fig5,
    All,
}

impl Which {
    fn file(self) -> &'static str {
        match self {
            Which::Table2 => "table2.csv",
            Which::Table3 => "table3.csv",
            Which::Table4 => "table4.csv",
            Which::Table5 => "table5.csv",
            Which::Fig3 => "fig3.csv",
            Which::Fig4 => "fig4.csv",
            Which::Fig5 => "fig5.csv",
            Which::All => unreachable!("expanded before use"),
        }
    }
}

type Job<'a> = Box<dyn Fn() -> CliResult<Vec<Row>> + Send + Sync + 'a>;

struct Runner<'a> {
    ctx: &'a Context,
    lp: LpOptions,
    sdp: SdpOptions,
    quick: bool,
    oracle_max_m: Option<usize>,
}

impl Runner<'_> {
    fn secs(&self, t: f64) -> f64 {
        if self.ctx.timing {
            t
        } else {
            0.0
        }
    }

    fn polytopes(&self, specs: &[&str]) -> CliResult<Vec<StatePolytope>> {
        specs.iter().map(|s| resolve_polytope(self.ctx, s, &FacetOptions::default())).collect()
    }

    fn oracle_limit(&self, full: usize, quick: usize) -> usize {
        self.oracle_max_m.unwrap_or(if self.quick { quick } else { full })
    }

    fn lp_row(&self, family: &str, set: &MeasurementSet, p: &StatePolytope, seed: Option<u64>) -> CliResult<Row> {
        let res = measurement_robustness(set, p, &self.lp)?;
        Ok(Row {
            family: family.into(),
            d: set.dim(),
            k: Some(set.outcomes()),
            m: Some(set.count()),
            polytope_id: p.provenance().into(),
            r: res.r_used,
            method: res.method,
            lower: finite(res.lower),
            upper: finite(res.upper),
            exact: None,
            runtime_s: self.secs(res.wall_time_s),
            seed,
        })
    }

    fn oracle_row(&self, family: &str, set: &MeasurementSet) -> CliResult<Row> {
        let e = exact_robustness_measurements(set, &self.sdp)?;
        let eta = finite(e.eta);
        Ok(Row {
            family: family.into(),
            d: set.dim(),
            k: Some(set.outcomes()),
            m: Some(set.count()),
            method: e.method.into(),
            lower: eta,
            upper: eta,
            exact: eta,
            runtime_s: self.secs(e.wall_time_s),
            ..Default::default()
        })
    }

    /// LP rows for every (m, polytope) and oracle rows for `m <= oracle_max`,
    /// with the oracle value copied into the `exact` column of matching LP rows.
    fn fibonacci<'b>(
        &'b self,
        family: &'b str,
        make: fn(usize) -> steerlp::Result<MeasurementSet>,
        ms: &[usize],
        polys: &'b [StatePolytope],
        oracle_max: usize,
    ) -> Vec<Job<'b>> {
        let mut jobs: Vec<Job<'b>> = Vec::new();
        for &m in ms {
            for p in polys {
                jobs.push(Box::new(move || Ok(vec![self.lp_row(family, &make(m)?, p, None)?])));
            }
            if m <= oracle_max {
                jobs.push(Box::new(move || Ok(vec![self.oracle_row(family, &make(m)?)?])));
            }
        }
        jobs
    }
}

fn fill_exact(rows: &mut [Row]) {
    let exact: BTreeMap<(String, usize, Option<usize>), f64> = rows
        .iter()
        .filter(|r| r.method == "sdp-exact")
        .filter_map(|r| r.exact.map(|e| ((r.family.clone(), r.d, r.m), e)))
        .collect();
    for r in rows.iter_mut().filter(|r| r.method != "sdp-exact") {
        if let Some(&e) = exact.get(&(r.family.clone(), r.d, r.m)) {
            r.exact = Some(e);
        }
    }
}

fn execute(jobs: Vec<Job<'_>>) -> CliResult<Vec<Row>> {
    let parts: Vec<CliResult<Vec<Row>>> = jobs.par_iter().map(|j| j()).collect();
    let mut rows = Vec::new();
    for p in parts {
        rows.extend(p?);
    }
    fill_exact(&mut rows);
    rows.sort_by_key(Row::sort_key);
    Ok(rows)
}

fn table2(run: &Runner) -> CliResult<Vec<Row>> {
    let mut cases: Vec<(usize, u32)> = (2..=if run.quick { 6 } else { 10 }).map(|q| (2, q)).collect();
    cases.extend((2..=if run.quick { 2 } else { 3 }).map(|q| (3, q)));
    let jobs: Vec<Job> = cases
        .into_iter()
        .map(|(d, q)| -> Job {
            Box::new(move || {
                let start = std::time::Instant::now();
                let (p, rep) = analyze(&rational_pure_states(d, q)?, &FacetOptions::default())?;
                Ok(vec![Row {
                    family: "rational".into(),
                    d,
                    m: Some(p.len()),
                    polytope_id: format!("rational:{d}:{q}"),
                    r: Some(rep.r),
                    method: "facet-enumeration".into(),
                    runtime_s: run.secs(start.elapsed().as_secs_f64()),
                    ..Default::default()
                }])
            })
        })
        .collect();
    execute(jobs)
}

fn table5(run: &Runner) -> CliResult<Vec<Row>> {
    let steps = if run.quick { 1 } else { 2 };
    let start = std::time::Instant::now();
    let out = refine_polytope(&mub_polytope(3)?, steps, &FacetOptions::default())?;
    let total = start.elapsed().as_secs_f64();
    Ok(out
        .history
        .iter()
        .enumerate()
        .map(|(s, step)| Row {
            family: "mub-refinement".into(),
            d: 3,
            m: Some(step.vertices),
            polytope_id: format!("mub-refined:3:{s}"),
            r: Some(step.r),
            method: "refine".into(),
            runtime_s: if s == steps { run.secs(total) } else { 0.0 },
            ..Default::default()
        })
        .collect())
}

fn fig4(run: &Runner) -> CliResult<Vec<Row>> {
    let (ms, seeds): (&[usize], u64) = if run.quick { (&[2, 5], 3) } else { (&[2, 3, 5, 10, 20, 50], 10) };
    let poly = run.polytopes(&["polygon:400"])?.remove(0);
    let lp = LpOptions { certificate: false, ..run.lp };
    let mut jobs: Vec<Job> = Vec::new();
    for &m in ms {
        for seed in 0..seeds {
            let poly = &poly;
            jobs.push(Box::new(move || {
                let mut rng = seeded(seed.wrapping_mul(1_000_003).wrapping_add(m as u64));
                let raw: Vec<f64> = (0..m).map(|_| rng.random::<f64>() * std::f64::consts::PI).collect();
                let angles = PlanarAngles::new(&raw)?;
                let set = planar_measurements(&angles)?;
                let res = measurement_robustness(&set, poly, &lp)?;
                Ok(vec![Row {
                    family: "planar".into(),
                    d: 2,
                    k: Some(2),
                    m: Some(m),
                    polytope_id: poly.provenance().into(),
                    r: res.r_used,
                    method: res.method,
                    lower: finite(res.lower),
                    upper: finite(res.upper),
                    exact: Some(planar_bound(&angles)),
                    runtime_s: run.secs(res.wall_time_s),
                    seed: Some(seed),
                }])
            }));
        }
    }
    execute(jobs)
}

fn fig5(run: &Runner) -> CliResult<Vec<Row>> {
    let (ms, seeds): (&[usize], u64) = if run.quick { (&[5, 10], 2) } else { (&[5, 10, 15, 20, 25, 30], 5) };
    let poly = run.polytopes(&["ico:2"])?.remove(0);
    let mut jobs: Vec<Job> = Vec::new();
    for &m in ms {
        for seed in 0..seeds {
            let poly = &poly;
            jobs.push(Box::new(move || Ok(vec![run.lp_row("random-povm-k4", &random_povm(m, 2, 4, seed)?, poly, Some(seed))?])));
            jobs.push(Box::new(move || Ok(vec![run.lp_row("random-projective", &random_projective(m, 2, seed)?, poly, Some(seed))?])));
        }
    }
    execute(jobs)
}

fn rows_for(run: &Runner, which: Which) -> CliResult<Vec<Row>> {
    match which {
        Which::Table2 => table2(run),
        Which::Table3 => {
            let specs: &[&str] = if run.quick { &["ico:2"] } else { &["ico:2", "ico:3"] };
            let polys = run.polytopes(specs)?;
            let ms: Vec<usize> = if run.quick {
                (2..=8).chain([50]).collect()
            } else {
                (2..=20).chain([50, 100, 200, 400]).collect()
            };
            execute(run.fibonacci("fibonacci-qubit", fibonacci_qubit, &ms, &polys, run.oracle_limit(20, 8)))
        }
        Which::Table4 => {
            let specs: &[&str] = if run.quick { &["mub-refined:3:1"] } else { &["mub-refined:3:1", "mub-refined:3:2"] };
            let polys = run.polytopes(specs)?;
            let ms: Vec<usize> = if run.quick { (2..=5).collect() } else { (2..=11).collect() };
            execute(run.fibonacci("fibonacci-qutrit", fibonacci_qutrit, &ms, &polys, run.oracle_limit(11, 5)))
        }
        Which::Table5 => table5(run),
        Which::Fig3 => {
            let specs: &[&str] = if run.quick { &["rational:2:4", "ico:1"] } else { &["rational:2:4", "ico:1", "ico:2"] };
            let polys = run.polytopes(specs)?;
            let ms: Vec<usize> = (2..=if run.quick { 6 } else { 30 }).collect();
            execute(run.fibonacci("fibonacci-qubit", fibonacci_qubit, &ms, &polys, run.oracle_limit(12, 6).min(12)))
        }
        Which::Fig4 => fig4(run),
        Which::Fig5 => fig5(run),
        Which::All => unreachable!("expanded before use"),
    }
}

pub fn run(ctx: &Context, config: &Value, cmd: &TableCmd) -> CliResult<()> {
    let solver = cmd.solver.solver()?;
    let meta = Meta::new(config, &solver);
    let runner = Runner {
        ctx,
        lp: cmd.solver.lp(false)?,
        sdp: cmd.solver.sdp()?,
        quick: cmd.quick,
        oracle_max_m: cmd.oracle_max_m,
    };
    let mut which: Vec<Which> = if cmd.which.contains(&Which::All) {
        Which::value_variants().iter().copied().filter(|w| *w != Which::All).collect()
    } else {
        cmd.which.clone()
    };
    which.sort();
    which.dedup();
    let dir = ctx.path(&cmd.out_dir);
    std::fs::create_dir_all(&dir)?;
    for w in which {
        let rows = rows_for(&runner, w)?;
        let path = dir.join(w.file());
        write_csv(&path, &meta, &rows)?;
        println!("{} rows -> {}", rows.len(), path.display());
    }
    Ok(())
}
