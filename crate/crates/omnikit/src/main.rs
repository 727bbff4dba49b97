use clap::{Parser, Subcommand};
use omnikit::court;
use omnikit::error::KitError;
use omnikit::scenario::{parse_scenario, PlanSpec, Scenario, TransformSpec};
use omnikit::{capacity, fixtures, lp, partition, report};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "omnikit",
    about = "Analyze multiterminal secret-key-agreement scenarios: capacity, omniscience \
             rate, discussion-rate bounds, and whether omniscience is rate-optimal."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit the stable JSON report instead of tables.
    #[arg(long, global = true)]
    json: bool,
    /// Dump LP variables, sizes and pivots to stderr.
    #[arg(long, global = true)]
    trace_lp: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Secrecy capacity and the omniscience rate split rho + rho_bar.
    Capacity { scenario: PathBuf },
    /// Multivariate mutual information of the non-wiretapped users and the
    /// fundamental partition.
    Mmi { scenario: PathBuf },
    /// The omniscience rate R_CO = rho + rho_bar with the rate vector.
    Rco { scenario: PathBuf },
    /// Lower bounds on the capacity-achieving discussion rate, plus any
    /// processing-plan upper bounds.
    Bounds {
        scenario: PathBuf,
        #[arg(long)]
        plan: Vec<PathBuf>,
    },
    /// Optimality conditions: decisive, sufficient, and necessary.
    Check { scenario: PathBuf },
    /// Apply a scenario transform and print the transformed scenario.
    Transform {
        scenario: PathBuf,
        #[arg(long, required = true)]
        transform: PathBuf,
    },
    /// Full analysis with verdict and evidence.
    Analyze {
        scenario: PathBuf,
        #[arg(long)]
        plan: Vec<PathBuf>,
        #[arg(long)]
        transform: Vec<PathBuf>,
    },
    /// Run the bundled worked-example corpus against its expectations.
    Fixtures,
}

fn read_plans(paths: &[PathBuf]) -> Result<Vec<PlanSpec>, KitError> {
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p)
                .map_err(|e| KitError::Parse(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| KitError::Parse(format!("{}: {e}", p.display())))
        })
        .collect()
}

fn read_transforms(paths: &[PathBuf]) -> Result<Vec<TransformSpec>, KitError> {
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p)
                .map_err(|e| KitError::Parse(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| KitError::Parse(format!("{}: {e}", p.display())))
        })
        .collect()
}

fn run(cli: &Cli) -> Result<bool, KitError> {
    match &cli.command {
        Command::Capacity { scenario } => {
            let scn = parse_scenario(scenario)?;
            let cap = capacity::secrecy_capacity(&scn)?;
            if cli.json {
                println!("{}", report::capacity_json(&cap));
            } else {
                println!("C_S      {}", cap.c_s.render());
                println!("rho      {}", cap.rho.render());
                println!("rho_bar  {}", cap.rho_bar.render());
                println!("R_CO     {}", cap.r_co.render());
                for c in &cap.cross_checks {
                    println!("check    {:<28} {}", c.route, if c.ok { "ok" } else { "MISMATCH" });
                }
            }
            Ok(true)
        }
        Command::Mmi { scenario } => {
            let scn = parse_scenario(scenario)?;
            let oracle = scn.oracle().condition(scn.untrusted());
            let m = partition::mmi(&oracle, oracle.ground().full_mask(), 0)?;
            let value = omnikit::value::Value::with_exactness(m.value, scn.is_exact());
            let blocks = m.fundamental.to_ids(oracle.ground());
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "I": value.render(),
                        "P*": blocks,
                        "optimal_count": m.optimal.len(),
                        "tolerance_sensitive": m.tolerance_sensitive,
                    })
                );
            } else {
                println!("I   {}", value.render());
                println!("P*  {}", serde_json::to_string(&blocks).unwrap());
            }
            Ok(true)
        }
        Command::Rco { scenario } => {
            let scn = parse_scenario(scenario)?;
            let cap = capacity::secrecy_capacity(&scn)?;
            if cli.json {
                println!("{}", report::capacity_json(&cap));
            } else {
                println!(
                    "R_CO     {}  (rho {}, rho_bar {})",
                    cap.r_co.render(),
                    cap.rho.render(),
                    cap.rho_bar.render()
                );
                for (id, r) in &cap.rate_vector {
                    println!("r_{id:<6} {}", r.render());
                }
            }
            Ok(true)
        }
        Command::Bounds { scenario, plan } => {
            let scn = parse_scenario(scenario)?;
            let extra = read_plans(plan)?;
            let mut rows = court::lower_bound_rs(&scn)?;
            for p in scn.plans.iter().chain(&extra) {
                match court::processing_upper_bound(&scn, p)? {
                    court::ProcessingOutcome::Bound { evidence, .. } => rows.push(evidence),
                    court::ProcessingOutcome::Rejected { hypothesis, detail } => {
                        eprintln!("plan rejected ({hypothesis}): {detail}");
                    }
                }
            }
            if cli.json {
                let items: Vec<_> = rows
                    .iter()
                    .map(|e| {
                        serde_json::json!({
                            "kind": e.kind.label(),
                            "tag": e.tag,
                            "value": e.value.as_ref().map(|v| v.render()),
                            "witness": e.witness,
                        })
                    })
                    .collect();
                println!("{}", serde_json::json!({ "bounds": items }));
            } else {
                for e in &rows {
                    println!(
                        "{:<6} {:<26} {}",
                        e.kind.label(),
                        e.tag,
                        e.value.as_ref().map(|v| v.render()).unwrap_or_default()
                    );
                }
            }
            Ok(true)
        }
        Command::Check { scenario } => {
            let scn = parse_scenario(scenario)?;
            let iff = court::check_oo_hypergraph(&scn)?;
            let sufficient = court::check_oo_sufficient(&scn)?;
            let (necessary, _) = court::check_oo_necessary(&scn)?;
            if cli.json {
                let cond = |c: &court::Condition| {
                    serde_json::json!({
                        "tag": c.tag,
                        "status": c.status.label(),
                        "witness": c.witness,
                    })
                };
                println!(
                    "{}",
                    serde_json::json!({
                        "decisive": {
                            "applicable": iff.applicable,
                            "tag": iff.tag,
                            "pinned_at_rho": iff.pinned_at_rho,
                            "witness": iff.witness,
                        },
                        "sufficient": sufficient.iter().map(cond).collect::<Vec<_>>(),
                        "necessary": necessary.iter().map(cond).collect::<Vec<_>>(),
                    })
                );
            } else {
                if iff.applicable {
                    let outcome = match iff.pinned_at_rho {
                        Some(true) => "discussion rate pinned at rho",
                        _ => "strictly below rho",
                    };
                    println!("decisive   {:<24} {}", iff.tag, outcome);
                } else {
                    println!("decisive   not applicable");
                }
                for c in sufficient.iter().chain(&necessary) {
                    println!("{:<10} {:<24} {}", "condition", c.tag, c.status.label());
                }
            }
            Ok(true)
        }
        Command::Transform { scenario, transform } => {
            let scn = parse_scenario(scenario)?;
            let specs = read_transforms(std::slice::from_ref(transform))?;
            let mut current: Scenario = scn;
            let mut claims = Vec::new();
            for spec in &specs {
                let (next, claim) = court::transform_scenario(&current, spec)?;
                claims.push(claim);
                current = next;
            }
            let file = omnikit::scenario::scenario_to_file(&current);
            if cli.json {
                println!("{}", serde_json::to_string(&file).unwrap());
            } else {
                for c in &claims {
                    println!("applied  {:<20} {:?}", c.tag, c.capacity);
                }
                println!("{}", serde_json::to_string_pretty(&file).unwrap());
            }
            Ok(true)
        }
        Command::Analyze { scenario, plan, transform } => {
            let scn = parse_scenario(scenario)?;
            let plans = read_plans(plan)?;
            let transforms = read_transforms(transform)?;
            let rep = court::analyze(&scn, &plans, &transforms)?;
            if cli.json {
                println!("{}", report::report_json(&rep));
            } else {
                print!("{}", report::render_human(&rep));
            }
            Ok(true)
        }
        Command::Fixtures => {
            let outcomes = fixtures::run_all();
            let mut all_ok = true;
            for o in &outcomes {
                match (&o.error, o.mismatches.is_empty()) {
                    (Some(e), _) => {
                        all_ok = false;
                        println!("{:<20} ERROR      {e}", o.name);
                    }
                    (None, true) => println!("{:<20} ok", o.name),
                    (None, false) => {
                        all_ok = false;
                        for m in &o.mismatches {
                            println!(
                                "{:<20} MISMATCH   {}: expected {}, got {}",
                                o.name, m.key, m.expected, m.got
                            );
                        }
                    }
                }
            }
            Ok(all_ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    lp::set_trace(cli.trace_lp);
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
