//! Command-line front-end.
//!
//! Every command prints a `key = value` report closed by a `VERDICT` line,
//! to stdout or to `--report`. Exit codes: 0 on success, 2 when a
//! precondition or an asserted bound fails, 1 on I/O and parse errors.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::approx::{cycle_extension, disjoint_representative, ApproxBudget};
use crate::chains::PolyChain;
use crate::coarea::verify_coarea;
use crate::error::{Error, Result};
use crate::flatnorm::{flat_norm, flat_norm_oracle};
use crate::generate;
use crate::grid::{GridComplex, GridSpec};
use crate::groups::GroupTag;
use crate::io::{self, Report};
use crate::lifting::{
    br_correct, lift_flat, lift_top_optimal, lift_top_threshold, loop_cancel, project_chain, BrRoute,
};
use crate::surd::le;
use crate::{parse_rational, Rational};

#[derive(Parser, Debug)]
#[command(
    name = "flatchain",
    version,
    about = "Exact computations with polyhedral chains over normed groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Kuhn grid as `d,n`.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<GridSpec>,
    /// Coefficient group: real, integer, mod:p or circle.
    #[arg(long)]
    group: Option<GroupTag>,
    #[arg(long, value_parser = parse_rational_arg)]
    epsilon: Option<Rational>,
    #[arg(long, value_parser = parse_rational_arg)]
    theta: Option<Rational>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Absolute tolerance for floating-point comparisons.
    #[arg(long, default_value_t = 1e-7)]
    tolerance: f64,
    /// Chain dimension the input must have.
    #[arg(long)]
    k: Option<usize>,
    /// Write the resulting chain here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact and decimal mass.
    Mass(Input),
    /// Boundary chain.
    Boundary(Input),
    /// Flat norm with an LP witness, checked against the exact oracle when small.
    Flatnorm(Input),
    /// Reduce real coefficients mod 1.
    Project(Input),
    /// Lift a circle chain to a real chain.
    Lift(Input),
    /// Remove fractional coefficients of a real 1-chain along loops.
    CancelLoops(Input),
    /// Kill the projection of a real chain while keeping its boundary.
    BrCorrect {
        #[command(flatten)]
        input: Input,
        /// loops or cone.
        #[arg(long)]
        route: Option<BrRoute>,
    },
    /// Cycle whose restriction to the input's support is the input.
    CycleExtend(Input),
    /// Representative whose mass avoids the input's mass measure.
    DisjointRep(Input),
    /// Level-set decomposition of a grid-function file.
    DecomposeLevels(Input),
    /// Parse and check a chain file.
    Validate(Input),
    /// Write a seeded random instance.
    Gen {
        /// chain, circle-top, loop, cone, lift or function.
        kind: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Input {
    file: PathBuf,
    #[command(flatten)]
    common: Common,
}

fn parse_grid(s: &str) -> std::result::Result<GridSpec, String> {
    let (d, n) = s
        .split_once(',')
        .ok_or_else(|| format!("expected d,n, got {s:?}"))?;
    let d = d.trim().parse().map_err(|_| format!("bad d in {s:?}"))?;
    let n = n.trim().parse().map_err(|_| format!("bad n in {s:?}"))?;
    Ok(GridSpec { d, n })
}

fn parse_rational_arg(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Run with `argv` (including the program name); returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Io(_) => 1,
        _ => 2,
    }
}

fn emit(report: &Report, common: &Common) -> Result<i32> {
    let text = report.render();
    match &common.report {
        Some(p) => io::write_text(p, &text)?,
        None => print!("{text}"),
    }
    Ok(if report.passed() { 0 } else { 2 })
}

fn write_out(c: &PolyChain, common: &Common) -> Result<()> {
    if let Some(p) = &common.out {
        io::write_chain(p, c)?;
    }
    Ok(())
}

fn load(path: &Path, common: &Common) -> Result<PolyChain> {
    let c = io::read_chain(path)?;
    if let Some(k) = common.k {
        if c.dim() != k {
            return Err(crate::error::dim_mismatch(
                "cli",
                format!("--k {k} but the chain has dimension {}", c.dim()),
            ));
        }
    }
    if let Some(g) = common.group {
        if c.group() != g {
            return Err(Error::GroupMismatch(g.to_string(), c.group().to_string()));
        }
    }
    Ok(c)
}

/// The complex named by `--grid`, else the chain's own grid.
fn complex_for(c: &PolyChain, common: &Common) -> Result<GridComplex> {
    let spec = common.grid.or(c.grid()).ok_or_else(|| {
        crate::error::precondition(
            "cli",
            "this command needs a complex: pass --grid d,n or a chain file with a complex",
        )
    })?;
    GridComplex::kuhn(spec.d, spec.n)
}

fn epsilon(common: &Common) -> Rational {
    common
        .epsilon
        .clone()
        .unwrap_or_else(|| Rational::new(1.into(), 10.into()))
}

fn budget(common: &Common) -> Result<ApproxBudget> {
    ApproxBudget::with_epsilon(epsilon(common))
}

fn describe(report: &mut Report, c: &PolyChain) {
    report.push("group", c.group());
    report.push("ambient_dim", c.ambient_dim());
    report.push("dim", c.dim());
    report.push("terms", c.len());
}

fn execute(cmd: Command) -> Result<i32> {
    let mut r = Report::new();
    match cmd {
        Command::Mass(Input { file, common }) => {
            let c = load(&file, &common)?;
            describe(&mut r, &c);
            let m = c.mass_exact();
            r.push("mass", &m);
            r.push("mass_decimal", m.to_f64());
            emit(&r, &common)
        }
        Command::Boundary(Input { file, common }) => {
            let c = load(&file, &common)?;
            let b = c.boundary()?;
            describe(&mut r, &b);
            r.push("mass", b.mass_exact());
            r.check("boundary_of_boundary_zero", b.boundary_or_zero().is_zero());
            write_out(&b, &common)?;
            emit(&r, &common)
        }
        Command::Flatnorm(Input { file, common }) => {
            let c = load(&file, &common)?;
            let complex = complex_for(&c, &common)?;
            let c = c.refine_onto(&complex)?;
            let w = flat_norm(&c, &complex)?;
            describe(&mut r, &c);
            r.push("complex", complex.spec());
            r.push("flat_norm", format!("{:.12}", w.value));
            r.push("certified_value", w.certified_value());
            r.push("pivots", w.pivots);
            r.check("witness_replays", w.replays(&c));
            r.check(
                "certified_matches_lp",
                (w.certified_value().to_f64() - w.value).abs() <= common.tolerance,
            );
            match flat_norm_oracle(&c, &complex) {
                Ok((exact, _)) => {
                    r.push("oracle_value", &exact);
                    r.check(
                        "oracle_agrees",
                        (exact.to_f64() - w.value).abs() <= common.tolerance,
                    );
                }
                Err(Error::SizeGuard(why)) => r.push("oracle", format!("skipped ({why})")),
                Err(e) => return Err(e),
            }
            write_out(&w.q, &common)?;
            emit(&r, &common)
        }
        Command::Project(Input { file, common }) => {
            let c = load(&file, &common)?;
            let p = project_chain(&c)?;
            describe(&mut r, &p);
            r.push("mass_in", c.mass_exact());
            r.push("mass_out", p.mass_exact());
            r.check("mass_does_not_grow", le(&p.mass_exact(), &c.mass_exact()));
            if c.dim() > 0 {
                let commutes = project_chain(&c.boundary()?)? == p.boundary()?;
                r.check("commutes_with_boundary", commutes);
            }
            write_out(&p, &common)?;
            emit(&r, &common)
        }
        Command::Lift(Input { file, common }) => {
            let c = load(&file, &common)?;
            describe(&mut r, &c);
            let lifted = if c.dim() == c.ambient_dim() {
                let (_, best, profile, mut report) = lift_top_optimal(&c)?;
                r.push("profile_intervals", profile.intervals.len());
                r.push("profile_integral", profile.integral.to_f64());
                let half5 = Rational::new(5.into(), 2.into());
                r.check(
                    "profile_integral_bound",
                    le(&profile.integral, &report.boundary_mass_in.scale(&half5)),
                );
                let lifted = match &common.theta {
                    // a fixed threshold only carries the mass bound
                    Some(theta) => {
                        let lifted = lift_top_threshold(&c, theta)?;
                        report.theta = Some(theta.clone());
                        report.mass_out = lifted.mass_exact();
                        report.boundary_mass_out = lifted.boundary()?.mass_exact();
                        report.boundary_factor = None;
                        lifted
                    }
                    None => best,
                };
                r.extend(report.lines());
                r.check("lift_bounds", report.within_bounds());
                lifted
            } else {
                let complex = complex_for(&c, &common)?;
                let fl = lift_flat(&c, &complex, &epsilon(&common), None)?;
                r.extend(fl.report.lines());
                r.push("stated_bound", &fl.stated_bound);
                r.push("proven_bound", &fl.proven_bound);
                r.check("ratio_bound", fl.report.within_bounds());
                r.check(
                    "projects_back",
                    project_chain(&fl.lift)?.refine_onto(&complex)? == c.refine_onto(&complex)?,
                );
                fl.lift
            };
            write_out(&lifted, &common)?;
            emit(&r, &common)
        }
        Command::CancelLoops(Input { file, common }) => {
            let c = load(&file, &common)?;
            let (y, report) = loop_cancel(&c)?;
            describe(&mut r, &c);
            r.extend(report.lines());
            r.check("projection_zero", project_chain(&y)?.is_zero());
            r.check("boundary_kept", y.boundary()? == c.boundary()?);
            r.check("mass_bound", report.within_bounds());
            r.check("passes_bound", report.passes <= c.len());
            write_out(&y, &common)?;
            emit(&r, &common)
        }
        Command::BrCorrect {
            input: Input { file, common },
            route,
        } => {
            let c = load(&file, &common)?;
            let complex = complex_for(&c, &common)?;
            let (y, report) = br_correct(&c, &complex, route)?;
            describe(&mut r, &c);
            r.extend(report.lines());
            r.check("projection_zero", project_chain(&y)?.is_zero());
            let kept = y
                .clone()
                .into_soup()
                .boundary()?
                .sub(&c.clone().into_soup().boundary()?)?;
            r.check(
                "boundary_kept",
                kept.is_zero() || kept.to_cell_vector(&complex)?.iter().all(num::Zero::is_zero),
            );
            r.check("mass_bound", report.within_bounds());
            write_out(&y, &common)?;
            emit(&r, &common)
        }
        Command::CycleExtend(Input { file, common }) => {
            let c = load(&file, &common)?;
            let b = budget(&common)?;
            let ext = cycle_extension(&c, &b)?;
            describe(&mut r, &c);
            let mass_t = c.mass_exact();
            let bound =
                mass_t.scale(&(Rational::from_integer(2.into()) + &b.epsilon)) + ext.final_budget.clone();
            r.push("stages", ext.report.stages.len());
            r.push("mass_in", mass_t.to_f64());
            r.push("mass_out", ext.t_prime.mass());
            r.push("final_budget", ext.final_budget.to_f64());
            r.push("defect", ext.defect.to_f64());
            r.check("is_cycle", ext.t_prime.is_cycle());
            r.check("mass_bound", le(&ext.t_prime.mass_exact(), &bound));
            r.check("defect_bound", le(&ext.defect, &ext.final_budget));
            write_out(&ext.t_prime, &common)?;
            emit(&r, &common)
        }
        Command::DisjointRep(Input { file, common }) => {
            let c = load(&file, &common)?;
            let b = budget(&common)?;
            let (rep, stages) = disjoint_representative(&c, &b)?;
            describe(&mut r, &c);
            r.push("stages", stages.stages.len());
            r.push("mass_in", c.mass());
            r.push("mass_out", rep.mass());
            r.push("final_budget", stages.final_budget.to_f64());
            if let Some(last) = stages.stages.last() {
                r.push("last_remainder_mass", last.mass_r.to_f64());
                r.check("remainder_within_budget", le(&last.mass_r, &stages.final_budget));
            }
            r.check("identity", stages.verify_identity(&c)?);
            write_out(&rep, &common)?;
            emit(&r, &common)
        }
        Command::DecomposeLevels(Input { file, common }) => {
            let u = io::parse_grid_function(&io::read_text(&file)?)?;
            let report = verify_coarea(&u)?;
            r.push("d", u.d());
            r.push("n", u.n());
            r.extend(report.lines());
            r.check("mass_identity", report.gap.is_zero());
            r.check("chain_identity", report.chain_identity);
            r.check("multiplicity_one", report.multiplicity_one);
            emit(&r, &common)
        }
        Command::Validate(Input { file, common }) => {
            let c = load(&file, &common)?;
            describe(&mut r, &c);
            r.push("complex", c.grid().map_or("none".to_string(), |g| g.to_string()));
            if let Some(spec) = common.grid {
                let on = c.refine_onto(&GridComplex::kuhn(spec.d, spec.n)?).is_ok();
                r.check("on_grid", on);
            }
            r.check("round_trip", io::parse_chain(&io::emit_chain(&c))? == c);
            emit(&r, &common)
        }
        Command::Gen { kind, common } => gen(&kind, &common),
    }
}

fn gen(kind: &str, common: &Common) -> Result<i32> {
    let mut rng = generate::rng(common.seed);
    let spec = common.grid.unwrap_or(GridSpec { d: 2, n: 2 });
    let mut r = Report::new();
    r.push("kind", kind);
    r.push("seed", common.seed);
    if kind == "function" {
        let u = generate::grid_function(&mut rng, spec.d, spec.n, false)?;
        let text = io::emit_grid_function(&u);
        match &common.out {
            Some(p) => io::write_text(p, &text)?,
            None => print!("{text}"),
        }
        return Ok(0);
    }
    let complex = GridComplex::kuhn(spec.d, spec.n)?;
    let k = common.k;
    let chain = match kind {
        "chain" => {
            let group = common.group.unwrap_or(GroupTag::Real);
            generate::grid_chain(&mut rng, &complex, group, k.unwrap_or(1), 0.3)?
        }
        "circle-top" => generate::circle_top_chain(&mut rng, &complex)?,
        "loop" => generate::integral_boundary_chain(&mut rng, &complex, 1)?,
        "cone" => generate::integral_boundary_chain(&mut rng, &complex, spec.d.saturating_sub(1).max(1))?,
        "lift" => generate::lift_instance(&mut rng, &complex, k.unwrap_or(1), &epsilon(common))?.0,
        other => {
            return Err(Error::Parse(format!(
                "unknown instance kind {other:?} (expected chain, circle-top, loop, cone, lift or function)"
            )))
        }
    };
    match &common.out {
        Some(p) => {
            io::write_chain(p, &chain)?;
            describe(&mut r, &chain);
            emit(&r, common)
        }
        None => {
            print!("{}", io::emit_chain(&chain));
            Ok(0)
        }
    }
}
