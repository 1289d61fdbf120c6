use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use boolcover::colimit::colimit;
use boolcover::cover::{retract_system, trim_entry, trim_zero, CoverStore, CACHE_DIR_ENV};
use boolcover::gs::{gs_checks, gs_object};
use boolcover::lattice::{canonical_key, classify, join_irreducibles, meet_irreducibles, Semilattice};
use boolcover::simult::{search_simultaneous_with, ExhaustReason, SearchOptions, SearchOutcome};
use boolcover::workbench::{
    curated_size_six, dot_diagram, dot_morphism, dot_semilattice, run_suite, Document, SuiteConfig, SuiteReport,
};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "boolcover", version, about = "Exact workbench for finite join-semilattices")]
struct Cli {
    /// directory of the persistent Φ memo cache
    #[arg(long, global = true, env = CACHE_DIR_ENV)]
    cache_dir: Option<PathBuf>,
    /// print the machine-readable report
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classification flags, canonical key and irreducibles of a semilattice
    Analyze { file: PathBuf },
    /// The canonical Boolean cover of a finite distributive semilattice
    Phi {
        file: PathBuf,
        /// cut Φ(A) down to the interval above the atoms sent to zero
        #[arg(long)]
        trim_zero: bool,
    },
    /// The two-congruence extension of a lattice with its checks
    Gs { file: PathBuf },
    /// Colimit of a diagram with its legs
    Colimit { diagram: PathBuf },
    /// Apply Φ to a direct system of embeddings
    RetractSystem { system: PathBuf },
    /// Certify the non-liftable square of distributive lattices
    Counterexample,
    /// Bounded search for a simultaneous lattice embedding into Boolean lattices
    Search {
        system: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_atoms: usize,
        #[arg(long, default_value_t = 100_000_000)]
        work_limit: u64,
        /// skip the necessary-condition filter and search the space directly
        #[arg(long)]
        no_filter: bool,
    },
    /// Run a named check suite over the corpus
    Suite {
        name: String,
        #[arg(long)]
        max_size: Option<usize>,
        /// also attempt the curated size-6 members (retraction)
        #[arg(long)]
        curated: bool,
        #[arg(long)]
        trim_zero: bool,
        /// morphisms sampled per pair where a suite samples
        #[arg(long, default_value_t = 2)]
        sample: usize,
    },
    /// DOT rendering of a semilattice, morphism or diagram
    ExportDot { file: PathBuf },
}

/// Report for stdout plus the number of violations it contains.
struct Outcome {
    report: Value,
    human: Vec<String>,
    violations: usize,
}

fn read(path: &Path) -> Result<Document> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Document::parse(&text)?)
}

fn labels(s: &Semilattice, xs: &[usize]) -> Vec<String> {
    xs.iter().map(|&x| s.label(x)).collect()
}

fn analyze(file: &Path) -> Result<Outcome> {
    let s = read(file)?.semilattice()?;
    let flags = classify(&s);
    let key = canonical_key(&s);
    let j = join_irreducibles(&s);
    let m = meet_irreducibles(&s);
    let human = vec![
        format!("size {}, key {key}", s.size()),
        format!("flags {}", serde_json::to_string(&flags)?),
        format!("join-irreducible {:?}", labels(&s, &j)),
        format!("meet-irreducible {:?}", labels(&s, &m)),
    ];
    let report = json!({ "size": s.size(), "key": key, "flags": flags, "join_irreducibles": j, "meet_irreducibles": m });
    Ok(Outcome { report, human, violations: 0 })
}

fn phi(file: &Path, trim: bool, store: &CoverStore) -> Result<Outcome> {
    let s = read(file)?.semilattice()?;
    let p = store.phi_object(&s)?;
    let mut violations = Vec::new();
    for a in s.elements() {
        if p.mu(p.eps(a)) != a {
            violations.push(format!("μ(ε({})) ≠ {}", s.label(a), s.label(a)));
        }
    }
    let eps: Vec<Vec<usize>> = s.elements().map(|a| p.eps(a).ones().collect()).collect();
    let mu: Vec<usize> = (0..p.atoms()).map(|t| p.mu_atom(t)).collect();
    let mut human = vec![format!("Φ has {} atoms, |Φ_*| = {}", p.atoms(), p.entry.phi_star_size)];
    for a in s.elements() {
        human.push(format!("ε({}) = {:?}", s.label(a), eps[a]));
    }
    human.push(format!("μ on atoms: {:?}", labels(&s, &mu)));
    let mut report = json!({
        "key": p.entry.key,
        "atoms": p.atoms(),
        "phi_star_size": p.entry.phi_star_size,
        "generator_count": p.entry.generator_count,
        "eps": eps,
        "mu": mu,
    });
    if trim {
        let t = trim_entry(&p.entry);
        let whole = trim_zero(store);
        violations.extend(whole.violations.iter().cloned());
        human.push(format!("trimmed to {} atoms ({} dropped)", t.atoms(), p.atoms() - t.atoms()));
        report["trimmed"] = json!({ "atoms": t.atoms(), "eps": t.eps.iter().map(|b| b.ones().collect::<Vec<_>>()).collect::<Vec<_>>(), "mu": t.mu });
    }
    human.extend(violations.iter().map(|v| format!("violation: {v}")));
    report["violations"] = json!(violations);
    Ok(Outcome { report, human, violations: violations.len() })
}

fn gs(file: &Path) -> Result<Outcome> {
    let k = read(file)?.semilattice()?;
    let g = gs_object(&k)?;
    let checks = gs_checks(&k)?;
    let human = vec![
        format!("GS has {} elements and {} atoms", checks.size, checks.atoms),
        format!("lattice congruences: {:?}", checks.congruences),
        format!("perspectivity witnesses: {}", checks.perspectivity.len()),
    ]
    .into_iter()
    .chain(checks.violations.iter().map(|v| format!("violation: {v}")))
    .collect();
    let report = json!({
        "extended": g.extended.to_record(),
        "eps": g.eps.map(),
        "mu": g.mu.map(),
        "new_atoms": g.new_atoms,
        "checks": checks,
    });
    Ok(Outcome { report, human, violations: checks.violations.len() })
}

fn colimit_verb(file: &Path) -> Result<Outcome> {
    let d = read(file)?.diagram()?;
    let c = colimit(&d)?;
    let legs: Vec<&[usize]> = c.legs.iter().map(|l| l.map()).collect();
    let mut human = vec![format!("apex has {} elements", c.apex.size())];
    human.extend(legs.iter().enumerate().map(|(v, l)| format!("leg {v}: {l:?}")));
    let report = json!({ "apex": c.apex.to_record(), "legs": legs });
    Ok(Outcome { report, human, violations: 0 })
}

fn retract(file: &Path, store: &CoverStore) -> Result<Outcome> {
    let sys = read(file)?.system()?;
    let r = retract_system(&sys, store)?;
    let atoms: Vec<usize> = r.objects.iter().map(|o| o.atoms()).collect();
    let transitions: Vec<Value> = r
        .transitions
        .iter()
        .map(|((i, j), m)| json!({ "arrow": format!("{i}->{j}"), "map": m.to_record() }))
        .collect();
    let mut human = vec![format!("atoms per vertex: {atoms:?}")];
    human.extend(r.violations.iter().map(|v| format!("violation: {v}")));
    let report = json!({ "atoms": atoms, "transitions": transitions, "violations": r.violations });
    Ok(Outcome { report, human, violations: r.violations.len() })
}

fn search(file: &Path, opts: &SearchOptions) -> Result<Outcome> {
    let sys = read(file)?.system()?;
    let (report, human) = match search_simultaneous_with(&sys, opts)? {
        SearchOutcome::Found(se) => {
            let comps: Vec<Vec<Vec<usize>>> =
                se.components.iter().map(|c| c.iter().map(|b| b.ones().collect()).collect()).collect();
            let trans: Vec<Value> = se
                .transitions
                .iter()
                .map(|((i, j), m)| json!({ "arrow": format!("{i}->{j}"), "map": m.to_record() }))
                .collect();
            (
                json!({ "outcome": "found", "atoms": se.targets, "components": comps, "transitions": trans }),
                vec![format!("found: atoms per vertex {:?}", se.targets)],
            )
        }
        SearchOutcome::Exhausted { nodes, reason } => {
            let why = match &reason {
                ExhaustReason::Searched => "bounded space searched".to_string(),
                ExhaustReason::Necess { i, j, p, .. } => format!("necessary condition fails at ({i}, {j}, {p})"),
                ExhaustReason::NotDistributive(v) => format!("vertex {v} is not distributive"),
            };
            (
                json!({ "outcome": "exhausted", "nodes": nodes, "reason": reason }),
                vec![format!("exhausted after {nodes} nodes: {why}")],
            )
        }
    };
    Ok(Outcome { report, human, violations: 0 })
}

fn suite_outcome(r: SuiteReport) -> Result<Outcome> {
    let mut human = vec![format!(
        "{}: {} cases, {} violations, {} ms",
        r.name,
        r.cases,
        r.violations.len(),
        r.wall_ms
    )];
    human.extend(r.notes.iter().cloned());
    human.extend(r.violations.iter().map(|v| format!("violation [{}]: {}", v.case, v.message)));
    Ok(Outcome { violations: r.violations.len(), report: serde_json::to_value(&r)?, human })
}

fn export_dot(file: &Path) -> Result<String> {
    Ok(match read(file)? {
        d @ Document::Semilattice(_) => dot_semilattice(&*d.semilattice()?),
        d @ Document::Morphism(_) => dot_morphism(&d.morphism()?),
        d => dot_diagram(&d.diagram()?),
    })
}

fn run(cli: Cli) -> Result<Option<Outcome>> {
    let store = CoverStore::with_cache_dir(cli.cache_dir.as_deref());
    let out = match cli.command {
        Command::Analyze { file } => analyze(&file)?,
        Command::Phi { file, trim_zero } => phi(&file, trim_zero, &store)?,
        Command::Gs { file } => gs(&file)?,
        Command::Colimit { diagram } => colimit_verb(&diagram)?,
        Command::RetractSystem { system } => retract(&system, &store)?,
        Command::Counterexample => {
            let c = boolcover::simult::build_counterexample()?;
            let mut o = suite_outcome(run_suite("counterexample", &SuiteConfig::default(), &store)?)?;
            o.report["system"] = serde_json::to_value(c.system.to_record())?;
            o
        }
        Command::Search { system, max_atoms, work_limit, no_filter } => {
            search(&system, &SearchOptions { max_atoms, work_limit, necess_filter: !no_filter })?
        }
        Command::Suite { name, max_size, curated, trim_zero, sample } => {
            let config = SuiteConfig {
                max_size,
                curated: if curated { curated_size_six() } else { Vec::new() },
                sample,
                trim_zero,
                ..SuiteConfig::default()
            };
            suite_outcome(run_suite(&name, &config, &store)?)?
        }
        Command::ExportDot { file } => {
            let _ = write!(std::io::stdout().lock(), "{}", export_dot(&file)?);
            return Ok(None);
        }
    };
    Ok(Some(out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(o)) => {
            let mut out = std::io::stdout().lock();
            // a closed pipe is not an error of the computation
            if json {
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&o.report).expect("reports serialize"));
            } else {
                for line in &o.human {
                    let _ = writeln!(out, "{line}");
                }
            }
            if o.violations == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
