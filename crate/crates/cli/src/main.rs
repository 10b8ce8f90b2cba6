use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use sfrac_core::character::CharacterTable;
use sfrac_core::extension::{build_extension, relabelling_orbits, second_cohomology, twisting_maps, TwistingMap};
use sfrac_core::group::{preset, FiniteGroup};
use sfrac_core::peps::braid_flux_around_charge;
use sfrac_core::scenarios::{
    family_scenarios, identify, order_parameter, reproduce_appendix_c, reproduce_fig2, reproduce_table1, Backends,
    Family, Report,
};
use sfrac_core::trs::{tc_time_reversal, trs_classify_tc, trs_power_orbit, tc_space, TrsClass, TrsData};
use sfrac_core::verify::{run_suite, VerifyOptions, GAUGE_TRIALS};

/// `println!` that reports write failures instead of panicking.
macro_rules! out {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout().lock(), $($arg)*)?
    };
}

const EXIT_VALIDATION: u8 = 2;
const EXIT_DISAGREE: u8 = 3;

#[derive(Parser)]
#[command(name = "sfrac", version, about = "Symmetry fractionalization in quantum double PEPS")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    /// Agreement tolerance between backends.
    #[arg(long, default_value_t = 1e-10, global = true)]
    tol: f64,
    /// Seed for random gauge trials.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Structured,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Backend {
    Analytic,
    Loop,
    Oracle,
    All,
}

#[derive(clap::Args)]
struct PairArgs {
    /// Gauge group G: a preset name or a group-spec file.
    #[arg(long)]
    group: String,
    /// Symmetry group Q: a preset name or a group-spec file.
    #[arg(long)]
    symmetry: String,
    /// Twisting map: `trivial` or an index into the list of homomorphisms Q → Aut(G).
    #[arg(long, default_value = "trivial")]
    phi: String,
}

#[derive(Subcommand)]
enum Command {
    /// Count H² classes and their relabelling orbits.
    Cohomology(PairArgs),
    /// List the extension of each cohomology class.
    Extensions(PairArgs),
    /// Evaluate the order parameter of a worked example.
    OrderParam {
        /// One of tc-z2, tc-z2z2, zp, z4-perm, z4-triv, q8.
        scenario: String,
        /// Class selector; all classes when omitted.
        #[arg(long)]
        class: Option<String>,
        /// Prime for the zp scenario.
        #[arg(long, default_value_t = 3)]
        p: usize,
        /// Probe irrep index; the family default when omitted.
        #[arg(long)]
        sigma: Option<usize>,
        /// Backends to run (repeatable or comma separated). Default: analytic,loop.
        #[arg(long, value_enum, value_delimiter = ',')]
        backend: Vec<Backend>,
    },
    /// χ_σ(g)/d_σ from the flux-around-charge diagram, per conjugacy class.
    Braiding {
        #[arg(long)]
        group: String,
    },
    /// Squares and commutators for the four Z2×Z2 extensions.
    #[command(name = "table1", alias = "klein-table")]
    KleinTable,
    /// One cocycle matrix per Z2×Z2 orbit.
    Fig2,
    /// Classes, coboundaries and orbits of H²(Z2×Z2, Z2).
    #[command(name = "appendix-c", alias = "klein-class-report")]
    KleinClassReport,
    /// Time-reversal classes of the toric code.
    TrsTc,
    /// Run the invariant suite.
    Verify {
        #[arg(long, hide = true)]
        inject_bad_cocycle: bool,
    },
}

/// On-disk group description.
#[derive(Deserialize)]
#[serde(untagged)]
enum GroupSpec {
    Preset { preset: String },
    Table { order: usize, table: Vec<Vec<usize>> },
}

fn load_group(arg: &str) -> Result<FiniteGroup> {
    if let Ok(g) = preset(arg) {
        return Ok(g);
    }
    let path = Path::new(arg);
    if !path.exists() {
        bail!("{arg:?} is neither a preset nor a readable group file");
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
    let spec: GroupSpec = serde_json::from_str(&text).map_err(|e| {
        let line = text
            .lines()
            .nth(e.line().saturating_sub(1))
            .or_else(|| text.lines().last())
            .unwrap_or("");
        anyhow::anyhow!("{arg}:{}:{}: {e}\n    {line}", e.line(), e.column())
    })?;
    match spec {
        GroupSpec::Preset { preset: name } => Ok(preset(&name).with_context(|| arg.to_string())?),
        GroupSpec::Table { order, table } => {
            if table.len() != order {
                bail!("{arg}: order {order} but the table has {} rows", table.len());
            }
            let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("G");
            Ok(FiniteGroup::from_table(name, &table).with_context(|| arg.to_string())?)
        }
    }
}

fn load_pair(args: &PairArgs) -> Result<(FiniteGroup, FiniteGroup, TwistingMap)> {
    let g = load_group(&args.group)?;
    let q = load_group(&args.symmetry)?;
    let phi = if args.phi == "trivial" {
        TwistingMap::trivial(&g, &q)
    } else {
        let i: usize = args.phi.parse().context("--phi must be `trivial` or an index")?;
        let maps = twisting_maps(&g, &q)?;
        let n = maps.len();
        maps.into_iter()
            .nth(i)
            .with_context(|| format!("--phi {i} out of range; there are {n} twisting maps"))?
    };
    Ok((g, q, phi))
}

fn complex(z: Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

fn opt_complex(z: Option<Complex64>) -> String {
    z.map_or_else(|| "-".into(), complex)
}

fn emit<T: Serialize>(record: &T) -> Result<()> {
    out!("{}", serde_json::to_string(record)?);
    Ok(())
}

fn cohomology(cli: &Cli, args: &PairArgs) -> Result<u8> {
    let (g, q, phi) = load_pair(args)?;
    let set = second_cohomology(&g, &q, &phi)?;
    let orbits = relabelling_orbits(&set, &q)?;
    match cli.format {
        Format::Table => {
            out!("{} classes, {} orbits", set.len(), orbits.len());
            for (i, c) in set.classes.iter().enumerate() {
                out!("  class {i}: {} members, representative ω = {:?}", c.size(), c.representative.table());
            }
            for (i, o) in orbits.iter().enumerate() {
                out!("  orbit {i}: classes {o:?}");
            }
        }
        Format::Structured => emit(&json!({
            "G": g.name(),
            "Q": q.name(),
            "classes": set.len(),
            "orbits": orbits,
            "representatives": set.classes.iter().map(|c| c.representative.table()).collect::<Vec<_>>(),
        }))?,
    }
    Ok(0)
}

fn extensions(cli: &Cli, args: &PairArgs) -> Result<u8> {
    let (g, q, phi) = load_pair(args)?;
    let set = second_cohomology(&g, &q, &phi)?;
    for (i, c) in set.classes.iter().enumerate() {
        let ext = build_extension(&g, &q, &c.representative)?;
        let name = identify(ext.e());
        match cli.format {
            Format::Table => out!(
                "class {i}: E = {name} (order {}), ω = {:?}",
                ext.e().order(),
                c.representative.table()
            ),
            Format::Structured => emit(&json!({
                "class": i,
                "extension": name,
                "G": {"order": g.order(), "table": g.table()},
                "Q": {"order": q.order(), "table": q.table()},
                "phi": phi.0.iter().map(|a| a.0.clone()).collect::<Vec<_>>(),
                "omega": c.representative.table(),
            }))?,
        }
    }
    Ok(0)
}

fn backends(list: &[Backend]) -> Backends {
    if list.is_empty() {
        return Backends::DEFAULT;
    }
    let has = |b: Backend| list.contains(&b) || list.contains(&Backend::All);
    Backends {
        analytic: has(Backend::Analytic),
        loops: has(Backend::Loop),
        oracle: has(Backend::Oracle),
    }
}

fn print_report(cli: &Cli, r: &Report) -> Result<()> {
    match cli.format {
        Format::Table => {
            out!(
                "{:<34} {:<13} λ={:<12} analytic={:<10} loop={:<10} oracle={:<10} agree={} ({:.3}s)",
                r.scenario,
                r.extension,
                r.lambda.to_string(),
                opt_complex(r.analytic),
                opt_complex(r.loop_value),
                opt_complex(r.oracle),
                r.agree,
                r.wall_time
            );
            if let Some(note) = &r.oracle_note {
                out!("    oracle skipped: {note}");
            }
            Ok(())
        }
        Format::Structured => emit(r),
    }
}

fn order_param(
    cli: &Cli,
    scenario: &str,
    class: Option<&str>,
    p: usize,
    sigma: Option<usize>,
    backend: &[Backend],
) -> Result<u8> {
    let family = Family::parse(scenario)?;
    let list = family_scenarios(family, class, p, sigma)?;
    let mut reports = list
        .iter()
        .map(|s| order_parameter(s, backends(backend), cli.tol))
        .collect::<Result<Vec<_>, _>>()?;
    reports.sort_by(|a, b| a.scenario.cmp(&b.scenario));
    for r in &reports {
        print_report(cli, r)?;
    }
    Ok(if reports.iter().all(|r| r.agree) { 0 } else { EXIT_DISAGREE })
}

fn braiding(cli: &Cli, group: &str) -> Result<u8> {
    let g = load_group(group)?;
    let t = CharacterTable::new(&g)?;
    let reps: Vec<usize> = (0..t.classes().len()).map(|c| t.classes().representative(c)).collect();
    let mut ok = true;
    let mut rows = Vec::new();
    for sigma in 0..t.len() {
        let mut row = Vec::new();
        for &x in &reps {
            let got = braid_flux_around_charge(&g, &t, sigma, x)?;
            let want = t.chi(sigma, x) / t.dim(sigma) as f64;
            ok &= (got - want).norm() <= cli.tol;
            row.push(Complex64::new(got.re + 0.0, got.im + 0.0));
        }
        rows.push(row);
    }
    let names: Vec<&str> = reps.iter().map(|&x| g.element_name(x)).collect();
    match cli.format {
        Format::Table => {
            out!("{:<8} {}", "", names.iter().map(|n| format!("{n:>12}")).collect::<String>());
            for (sigma, row) in rows.iter().enumerate() {
                let cells: String = row.iter().map(|z| format!("{:>12}", complex(*z))).collect();
                out!("{:<8} {cells}", t.irrep(sigma).label);
            }
            out!("matches χ_σ(g)/d_σ: {ok}");
        }
        Format::Structured => emit(&json!({
            "group": g.name(),
            "classes": names,
            "irreps": (0..t.len()).map(|s| t.irrep(s).label.clone()).collect::<Vec<_>>(),
            "values": rows,
            "agree": ok,
        }))?,
    }
    Ok(if ok { 0 } else { EXIT_DISAGREE })
}

fn sign(x: i8) -> &'static str {
    if x > 0 {
        "+1"
    } else {
        "-1"
    }
}

fn table1(cli: &Cli) -> Result<u8> {
    let t = reproduce_table1()?;
    match cli.format {
        Format::Table => {
            out!("{:<24} {}", "", t.columns.iter().map(|c| format!("{:>14}", c.extension)).collect::<String>());
            let triples: String = t
                .columns
                .iter()
                .map(|c| format!("{:>14}", format!("{{{}}}", c.triple.map(sign).join(","))))
                .collect();
            out!("{:<24} {triples}", "{v_x², v_z², v_y²}");
            let comm: String = t.columns.iter().map(|c| format!("{:>14}", sign(c.commutator))).collect();
            out!("{:<24} {comm}", "v_x v_y v_x⁻¹ v_y⁻¹");
            out!("commutator identifies pairs: {}", t.commutator_identifies_pairs);
            out!("triples separate all four: {}", t.triples_separate_all);
        }
        Format::Structured => emit(&t)?,
    }
    Ok(if t.commutator_identifies_pairs && t.triples_separate_all { 0 } else { EXIT_DISAGREE })
}

fn fig2(cli: &Cli) -> Result<u8> {
    for (panel, p) in ["a", "b", "c", "d"].iter().zip(reproduce_fig2()?) {
        match cli.format {
            Format::Table => {
                out!("({panel}) {}", p.extension);
                for (label, row) in ["x", "y", "z"].iter().zip(p.matrix) {
                    out!("    {label}: {}", row.map(|s| format!("{:>3}", sign(s))).join(" "));
                }
                out!("    diagonal {:?}, pairings (xy, xz, yz) {:?}", p.diagonal, p.spt_pairs);
            }
            Format::Structured => emit(&p)?,
        }
    }
    Ok(0)
}

fn appendix_c(cli: &Cli) -> Result<u8> {
    let a = reproduce_appendix_c()?;
    let ok = a.invariants_constant_on_classes && a.representatives_valid;
    match cli.format {
        Format::Table => {
            out!(
                "{} classes, {} coboundaries, {} orbits",
                a.classes.len(),
                a.coboundaries.len(),
                a.orbits.len()
            );
            for (i, c) in a.classes.iter().enumerate() {
                out!(
                    "  class {i}: {:<9} λ = {:?}  λ' = {:?}  orbit {} ({} members)",
                    c.extension, c.lambda, c.lambda_prime, c.orbit, c.size
                );
            }
            let sizes: Vec<usize> = a.orbits.iter().map(Vec::len).collect();
            out!("orbit sizes {sizes:?}");
            out!("λ, λ' constant on every class: {}", a.invariants_constant_on_classes);
        }
        Format::Structured => emit(&a)?,
    }
    Ok(if ok { 0 } else { EXIT_DISAGREE })
}

fn trs_tc(cli: &Cli) -> Result<u8> {
    let (g, rep) = tc_space();
    for class in [TrsClass::Trivial, TrsClass::Nontrivial] {
        let v = tc_time_reversal(class);
        let c = trs_classify_tc(&v, GAUGE_TRIALS, cli.seed)?;
        let d = TrsData::new(&g, &rep, v, 1e-10)?;
        let h1: Vec<usize> = g.elements().map(|x| trs_power_orbit(&g, d.omega, &d.phi, x, 1).h[0]).collect();
        match cli.format {
            Format::Table => out!(
                "{:?}: ω_T = {}, class {:?}, stable over {} gauges, h_1 per g = {:?}",
                class,
                g.element_name(c.omega),
                c.class,
                c.gauges_checked,
                h1
            ),
            Format::Structured => emit(&json!({
                "candidate": format!("{class:?}"),
                "classification": c,
                "h1": h1,
            }))?,
        }
    }
    Ok(0)
}

fn verify(cli: &Cli, inject: bool) -> Result<u8> {
    let r = run_suite(VerifyOptions {
        seed: cli.seed,
        inject_bad_cocycle: inject,
    });
    match cli.format {
        Format::Table => {
            for c in &r.checks {
                out!("{} {:<26} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
        }
        Format::Structured => {
            for c in &r.checks {
                emit(c)?;
            }
        }
    }
    Ok(if r.all_passed() { 0 } else { EXIT_DISAGREE })
}

fn run(cli: &Cli) -> Result<u8> {
    if cli.tol.is_nan() || cli.tol <= 0.0 {
        bail!("--tol must be positive");
    }
    match &cli.command {
        Command::Cohomology(a) => cohomology(cli, a),
        Command::Extensions(a) => extensions(cli, a),
        Command::OrderParam {
            scenario,
            class,
            p,
            sigma,
            backend,
        } => order_param(cli, scenario, class.as_deref(), *p, *sigma, backend),
        Command::Braiding { group } => braiding(cli, group),
        Command::KleinTable => table1(cli),
        Command::Fig2 => fig2(cli),
        Command::KleinClassReport => appendix_c(cli),
        Command::TrsTc => trs_tc(cli),
        Command::Verify { inject_bad_cocycle } => verify(cli, *inject_bad_cocycle),
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<std::io::Error>())
        .any(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}
