use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use moelab::circuit::{build_li_state, PhaseConfig};
use moelab::density::{
    build_restricted_projector, dof_trace_indist, embed_as_qudits, normalize_density,
    particle_trace, project_state, DensityOperator, LocalDomains, Slot,
};
use moelab::io::{
    density_to_json, one_particle_to_json, read_document, state_to_json, to_pretty, Document,
};
use moelab::linalg::DenseMatrix;
use moelab::measures::{
    ckw_check, concurrence, negativity_lognegativity, von_neumann_entropy, MONOGAMY_SLACK,
};
use moelab::oracle::{random_pure_three_qubit, SeededGenerator, ALGORITHM};
use moelab::reproduce::{
    default_phases, operational_domains, reproduce, sweep, DEFAULT_SEED, DEFAULT_TOL,
};
use moelab::state::Space;
use moelab::{Error, C64};

#[derive(Parser)]
#[command(
    name = "moelab",
    version,
    about = "Two-particle labeled-ket algebra, DoF trace-out and monogamy checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and compare with the reference values.
    Reproduce {
        /// Phases phi_L,phi_D,phi_R,phi_U in radians (default: drawn from the seed).
        #[arg(long, allow_hyphen_values = true)]
        phases: Option<String>,
        #[arg(long, env = "MOELAB_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Run this many random phase tuples instead of one.
        #[arg(long)]
        sweep: Option<usize>,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// CKW check on Haar-random pure three-qubit states or a fixture.
    Monogamy {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, env = "MOELAB_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum)]
        fixture: Option<Fixture>,
        #[arg(long)]
        json: bool,
    },
    /// Trace out DoFs or a whole particle from a state/density file.
    Trace {
        #[arg(long = "in")]
        input: PathBuf,
        /// Location(s); DoF traces pair each --loc with the matching --dof.
        #[arg(long)]
        loc: Vec<String>,
        #[arg(long)]
        dof: Vec<String>,
        /// Particle trace with probes at --loc (all locations if omitted).
        #[arg(long)]
        particle: bool,
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate an entanglement measure on a state/density file.
    Measure {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        measure: Measure,
        /// Two slots `loc:dof[=v1|v2]`, comma-separated.
        #[arg(long)]
        slots: Option<String>,
    },
    /// Emit the beam-splitter network output state as JSON.
    Circuit {
        #[arg(long, allow_hyphen_values = true, default_value = "0,0,0,0")]
        phases: String,
        /// Post-select one particle per location before writing.
        #[arg(long)]
        project: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Fixture {
    Ghz,
    W,
}

#[derive(Clone, Copy, ValueEnum)]
enum Measure {
    Concurrence,
    Negativity,
    LogNegativity,
    Entropy,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DegenerateState(_)
        | Error::DegenerateTrace(_)
        | Error::PostSelectionImpossible(_)
        | Error::DegenerateRegion(_)
        | Error::Convergence(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> moelab::Result<u8> {
    match cli.command {
        Command::Reproduce {
            phases,
            seed,
            sweep: samples,
            json,
            tol,
        } => cmd_reproduce(phases, seed, samples, json, tol),
        Command::Monogamy {
            samples,
            seed,
            fixture,
            json,
        } => cmd_monogamy(samples, seed, fixture, json),
        Command::Trace {
            input,
            loc,
            dof,
            particle,
            normalize,
            out,
        } => cmd_trace(&input, &loc, &dof, particle, normalize, out),
        Command::Measure {
            input,
            measure,
            slots,
        } => cmd_measure(&input, measure, slots.as_deref()),
        Command::Circuit {
            phases,
            project,
            out,
        } => cmd_circuit(&phases, project, out),
    }
}

fn print_json<T: Serialize>(v: &T) -> moelab::Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_reproduce(
    phases: Option<String>,
    seed: u64,
    samples: Option<usize>,
    json: bool,
    tol: f64,
) -> moelab::Result<u8> {
    if let Some(n) = samples {
        if n == 0 {
            return Err(Error::Format("--sweep needs at least one sample".into()));
        }
        let r = sweep(seed, n, tol)?;
        if json {
            print_json(&r)?;
        } else {
            println!(
                "sweep: {} samples, seed {}, rng {}",
                r.samples, r.seed, r.rng
            );
            println!(
                "{:<44} {:>12} {:>10}  verdict",
                "check (worst case)", "deviation", "tol"
            );
            for c in &r.worst {
                println!(
                    "{:<44} {:>12.3e} {:>10.1e}  {}",
                    c.name,
                    c.deviation,
                    c.tolerance,
                    verdict(c.pass)
                );
            }
            println!(
                "failures: {}/{}  overall {}",
                r.failures,
                r.samples,
                verdict(r.pass)
            );
        }
        return Ok(if r.pass { 0 } else { 2 });
    }
    let cfg = match phases {
        Some(p) => PhaseConfig::parse(&p)?,
        None => default_phases(seed),
    };
    let r = reproduce(&cfg, seed, tol)?;
    if json {
        print_json(&r)?;
    } else {
        let [l, d, rr, u] = r.phases;
        println!(
            "phases L={l:.6} D={d:.6} R={rr:.6} U={u:.6}  (seed {}, {})",
            r.seed, r.rng
        );
        println!("projection weight {:.12}", r.projection_weight);
        println!(
            "{:<28} {:>26} {:>26}",
            "projected ket", "observed", "expected"
        );
        for c in &r.projected_coefficients {
            println!(
                "{:<28} {:>12.9}{:+13.9}i {:>12.9}{:+13.9}i",
                c.ket, c.observed[0], c.observed[1], c.expected[0], c.expected[1]
            );
        }
        for s in &r.splits {
            println!(
                "{:<10} C={:.12} N={:.12} LN={:.12} PT={:?}",
                s.name, s.concurrence, s.negativity, s.log_negativity, s.pt_eigenvalues
            );
        }
        for m in &r.monogamy {
            println!(
                "MoE {:<20} e1={:.9} e2={:.9} bound={} holds={} maximal_violation={}",
                m.measure, m.e_ab, m.e_ac, m.bound, m.holds, m.maximal_violation
            );
        }
        println!("{:<44} {:>12} {:>10}  verdict", "check", "deviation", "tol");
        for c in &r.checks {
            println!(
                "{:<44} {:>12.3e} {:>10.1e}  {}",
                c.name,
                c.deviation,
                c.tolerance,
                verdict(c.pass)
            );
        }
        println!("overall {}", verdict(r.pass));
    }
    Ok(if r.pass { 0 } else { 2 })
}

#[derive(Serialize)]
struct MonogamySummary {
    seed: u64,
    rng: String,
    fixture: Option<String>,
    samples: usize,
    violations: usize,
    min_slack: f64,
    pass: bool,
}

fn fixture_state(f: Fixture) -> (String, Vec<C64>) {
    let mut v = vec![C64::new(0.0, 0.0); 8];
    match f {
        Fixture::Ghz => {
            v[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            v[7] = v[0];
            ("ghz".into(), v)
        }
        Fixture::W => {
            let t = C64::new(1.0 / 3f64.sqrt(), 0.0);
            v[1] = t;
            v[2] = t;
            v[4] = t;
            ("w".into(), v)
        }
    }
}

fn cmd_monogamy(
    samples: usize,
    seed: u64,
    fixture: Option<Fixture>,
    json: bool,
) -> moelab::Result<u8> {
    if samples == 0 {
        return Err(Error::Format("--samples must be at least 1".into()));
    }
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    let (name, count) = match fixture {
        Some(f) => {
            let (name, psi) = fixture_state(f);
            let r = ckw_check(&psi)?;
            min_slack = r.slack();
            violations += usize::from(!r.holds);
            (Some(name), 1)
        }
        None => {
            for i in 0..samples {
                let psi = random_pure_three_qubit(&mut SeededGenerator::split(seed, i as u64));
                let r = ckw_check(&psi)?;
                min_slack = min_slack.min(r.slack());
                violations += usize::from(!r.holds);
            }
            (None, samples)
        }
    };
    let s = MonogamySummary {
        seed,
        rng: ALGORITHM.into(),
        fixture: name,
        samples: count,
        violations,
        min_slack,
        pass: violations == 0 && min_slack >= -MONOGAMY_SLACK,
    };
    if json {
        print_json(&s)?;
    } else {
        println!(
            "samples {}  violations {}  min slack {:.12}  {}",
            s.samples,
            s.violations,
            s.min_slack,
            verdict(s.pass)
        );
    }
    Ok(if s.pass { 0 } else { 2 })
}

fn write_or_print(text: &str, out: &Option<PathBuf>) -> moelab::Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_trace(
    input: &Path,
    locs: &[String],
    dofs: &[String],
    particle: bool,
    normalize: bool,
    out: Option<PathBuf>,
) -> moelab::Result<u8> {
    let doc = read_document(input)?;
    let space = doc.space().clone();
    let rho = doc.into_density()?;
    let statistics = rho.statistics();
    let report = |line: String| {
        if out.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    };
    if particle {
        let region = match locs {
            [] => None,
            [l] => Some(space.location_index(l)?),
            _ => {
                return Err(Error::Format(
                    "particle trace takes at most one --loc".into(),
                ))
            }
        };
        let mut reduced = particle_trace(&rho, region)?;
        let weight = reduced.trace().re;
        if normalize {
            reduced = reduced.normalized()?;
        }
        report(format!("trace weight {weight:.12}"));
        if let Ok(e) = one_particle_entropy(&reduced.normalized()?) {
            report(format!("entropy {e:.12}"));
        }
        return write_or_print(
            &to_pretty(&one_particle_to_json(&reduced, statistics))?,
            &out,
        )
        .map(|_| 0);
    }
    if locs.is_empty() || dofs.is_empty() {
        return Err(Error::Format("DoF trace needs --loc and --dof".into()));
    }
    if dofs.len() != 1 && dofs.len() != locs.len() {
        return Err(Error::Format("give one --dof or one per --loc".into()));
    }
    let mut reduced: DensityOperator = rho;
    for (i, l) in locs.iter().enumerate() {
        let d = if dofs.len() == 1 { &dofs[0] } else { &dofs[i] };
        reduced = dof_trace_indist(&reduced, space.location_index(l)?, space.dof_index(d)?)?;
    }
    let weight = reduced.trace().re;
    if weight.abs() < moelab::DEGENERATE_TOL {
        return Err(Error::DegenerateTrace(weight.abs()));
    }
    if normalize {
        reduced = normalize_density(&reduced)?;
    }
    report(format!("trace weight {weight:.12}"));
    write_or_print(&to_pretty(&density_to_json(&reduced))?, &out)?;
    Ok(0)
}

fn one_particle_entropy(d: &moelab::density::OneParticleDensity) -> moelab::Result<f64> {
    von_neumann_entropy(&d.to_matrix(&d.support())?)
}

/// Parses `loc:dof[=v1|v2]` slots.
fn parse_slots(space: &Space, text: &str) -> moelab::Result<(Vec<Slot>, LocalDomains)> {
    let mut slots = Vec::new();
    let mut domains = LocalDomains::full();
    for part in text.split(',') {
        let (head, values) = match part.split_once('=') {
            Some((h, v)) => (h, Some(v)),
            None => (part, None),
        };
        let (loc, dof) = head
            .split_once(':')
            .ok_or_else(|| Error::Format(format!("slot {part:?} is not loc:dof")))?;
        let (loc, dof) = (loc.trim(), dof.trim());
        slots.push(Slot {
            loc: space.location_index(loc)?,
            dof: space.dof_index(dof)?,
        });
        if let Some(v) = values {
            let v: Vec<&str> = v.split('|').map(str::trim).collect();
            domains = domains.restrict(space, loc, dof, &v)?;
        }
    }
    Ok((slots, domains))
}

fn measure_matrix(doc: Document, slots: Option<&str>) -> moelab::Result<DenseMatrix> {
    match (doc, slots) {
        (Document::OneParticle(d), None) => {
            let d = d.normalized()?;
            d.to_matrix(&d.support())
        }
        (Document::OneParticle(_), Some(_)) => {
            Err(Error::Shape("slots need a two-particle file".into()))
        }
        (doc, Some(s)) => {
            let space = doc.space().clone();
            let rho = normalize_density(&doc.into_density()?)?;
            let (slots, domains) = parse_slots(&space, s)?;
            embed_as_qudits(&rho, &slots, &domains)
        }
        (doc, None) => {
            let rho = normalize_density(&doc.into_density()?)?;
            Ok(rho.operator_matrix()?.1)
        }
    }
}

fn cmd_measure(input: &Path, measure: Measure, slots: Option<&str>) -> moelab::Result<u8> {
    let m = measure_matrix(read_document(input)?, slots)?;
    let value = match measure {
        Measure::Concurrence => concurrence(&m)?,
        Measure::Negativity => negativity_lognegativity(&m)?.0,
        Measure::LogNegativity => negativity_lognegativity(&m)?.1,
        Measure::Entropy => von_neumann_entropy(&m)?,
    };
    println!("{value:.12}");
    Ok(0)
}

fn cmd_circuit(phases: &str, project: bool, out: Option<PathBuf>) -> moelab::Result<u8> {
    let cfg = PhaseConfig::parse(phases)?;
    let mut state = build_li_state(&cfg)?;
    if project {
        let proj = build_restricted_projector(
            state.space(),
            state.statistics(),
            0,
            1,
            &operational_domains(),
        )?;
        state = project_state(&state, &proj)?.0;
    }
    write_or_print(&to_pretty(&state_to_json(&state))?, &out)?;
    Ok(0)
}
