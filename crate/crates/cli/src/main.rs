//! `crdcache`: build cross resolvable designs, inspect the multi-access
//! caching scheme they give, and run it on real bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use crd_caching::baselines::{rows_csv, rows_text, sweep_csv, TABLE_CSV_HEADER};
use crd_caching::design::crd_profile_with_caps;
use crd_caching::rational::{both, exact};
use crd_caching::simulator::{distinct_demands, payload_dump, simulate};
use crd_caching::{
    analyze, build_delivery_schedule, generate_table, sweep, Caps, ConstructionSpec, DesignFile,
    Resolution, SchemeInstance, SweepFamily, TableId,
};

#[derive(Parser)]
#[command(
    name = "crdcache",
    version,
    about = "Multi-access coded caching from cross resolvable designs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Largest point count accepted (overrides CRD_CACHE_CAPS).
    #[arg(long, global = true)]
    cap_points: Option<u64>,
    /// Largest number of block intersections evaluated (overrides CRD_CACHE_CAPS).
    #[arg(long, global = true)]
    cap_intersections: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build or load a design and print its parameters and cross intersection numbers.
    Construct(DesignArgs),
    /// Figures of merit of the scheme next to the MaN and SPE baselines.
    Analyze(SchemeArgs),
    /// Print the coded delivery schedule.
    Schedule(DeliveryArgs),
    /// Run placement and delivery on random files and check every user's recovery.
    Simulate(SimulateArgs),
    /// Print one of the comparison tables I..IX, or all of them.
    Table(TableArgs),
    /// Proposed vs MaN figures across a design family, as CSV.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct DesignArgs {
    /// Construction spec (affine:n=3, ag:q=2,m=3, hadamard:m=2, example:4) or a design JSON file.
    #[arg(long)]
    design: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct SchemeArgs {
    #[command(flatten)]
    design: DesignArgs,
    /// Caches each user accesses.
    #[arg(long)]
    z: usize,
}

#[derive(Args)]
struct DeliveryArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    /// Library size N; defaults to the number of users.
    #[arg(long)]
    files: Option<usize>,
    /// `distinct`, `equal`, or a comma-separated list of 1-based file indices.
    #[arg(long, default_value = "distinct")]
    demands: String,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    delivery: DeliveryArgs,
    /// File length in bytes; defaults to 16 bytes per subfile.
    #[arg(long)]
    len: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write every payload in hex to this file.
    #[arg(long)]
    dump_payloads: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    /// I..IX (or 1..9), or `all`.
    id: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    /// affine, hadamard, or ag:m=<m>.
    #[arg(long)]
    family: String,
    /// Comma-separated parameter values (n, q or m depending on the family).
    #[arg(long, value_delimiter = ',', required = true)]
    params: Vec<u64>,
    #[arg(long, default_value_t = 2)]
    z: usize,
}

fn caps(cli: &Cli) -> Result<Caps> {
    let mut caps = Caps::from_env()?;
    if let Some(p) = cli.cap_points {
        caps.max_points = p;
    }
    if let Some(i) = cli.cap_intersections {
        caps.max_intersections = i;
    }
    Ok(caps)
}

fn load_design(input: &str, caps: &Caps) -> Result<Resolution> {
    match input.parse::<ConstructionSpec>() {
        Ok(spec) => Ok(spec.build_with_caps(caps)?),
        Err(spec_err) => {
            let path = Path::new(input);
            if !path.exists() {
                return Err(spec_err).context(format!(
                    "`{input}` is neither a construction spec nor a file"
                ));
            }
            let text = fs::read_to_string(path).with_context(|| format!("reading {input}"))?;
            let file: DesignFile =
                serde_json::from_str(&text).with_context(|| format!("parsing {input}"))?;
            let res = Resolution::from_file(&file)?;
            if res.v() as u64 > caps.max_points {
                bail!(
                    "design has {} points, above the cap of {}",
                    res.v(),
                    caps.max_points
                );
            }
            Ok(res)
        }
    }
}

fn parse_demands(spec: &str, users: usize, files: usize) -> Result<Vec<usize>> {
    Ok(match spec.trim() {
        "distinct" => distinct_demands(users, files)?,
        "equal" => vec![1; users],
        list => list
            .split(',')
            .map(|d| {
                d.trim()
                    .parse::<usize>()
                    .with_context(|| format!("bad demand `{d}`"))
            })
            .collect::<Result<_>>()?,
    })
}

fn construct(args: &DesignArgs, caps: &Caps) -> Result<String> {
    let res = load_design(&args.design, caps)?;
    let profile = crd_profile_with_caps(&res, caps)?;
    Ok(match args.format {
        Format::Json => {
            serde_json::to_string_pretty(&serde_json::json!({
                "design": res.to_file(),
                "params": {"v": res.v(), "b": res.b(), "r": res.r(), "k": res.k(), "b_r": res.b_r()},
                "profile": profile,
            }))? + "\n"
        }
        Format::Csv => bail!("construct supports text and json output"),
        Format::Text => {
            let mut out = format!(
                "design {}\nv={} b={} r={} k={} b_r={}\n",
                args.design,
                res.v(),
                res.b(),
                res.r(),
                res.k(),
                res.b_r()
            );
            let _ = writeln!(out, "mu_1={}", res.k());
            for (i, mu) in &profile.mu {
                let _ = writeln!(out, "mu_{i}={mu}");
            }
            match profile.crn {
                Some(c) => {
                    let zs: Vec<String> = profile
                        .admissible_z()
                        .iter()
                        .map(|z| z.to_string())
                        .collect();
                    let _ = writeln!(
                        out,
                        "cross resolution number {c}; admissible z: {}",
                        zs.join(",")
                    );
                }
                None => out.push_str("not a cross resolvable design; only z=1 is available\n"),
            }
            for (c, class) in res.classes().iter().enumerate() {
                let blocks: Vec<String> = class
                    .iter()
                    .map(|&b| {
                        let pts: Vec<String> = res
                            .design()
                            .block(b)
                            .iter()
                            .map(|p| (p + 1).to_string())
                            .collect();
                        format!("{}:{{{}}}", b + 1, pts.join(","))
                    })
                    .collect();
                let _ = writeln!(out, "class {}: {}", c + 1, blocks.join(" "));
            }
            out
        }
    })
}

fn analyze_cmd(args: &SchemeArgs, caps: &Caps) -> Result<String> {
    let res = load_design(&args.design.design, caps)?;
    let analysis = analyze(&args.design.design, &res, args.z, caps)?;
    Ok(match args.design.format {
        Format::Json => serde_json::to_string_pretty(&analysis.to_json())? + "\n",
        Format::Csv => rows_csv("analyze", &analysis.rows),
        Format::Text => rows_text(
            &format!("{} with z={}", args.design.design, args.z),
            &analysis.rows,
        ),
    })
}

fn scheme_for(args: &DeliveryArgs, caps: &Caps) -> Result<(SchemeInstance, Vec<usize>)> {
    let res = load_design(&args.scheme.design.design, caps)?;
    let profile = crd_profile_with_caps(&res, caps)?;
    let probe = SchemeInstance::with_profile(res.clone(), profile.clone(), args.scheme.z, 1)?;
    let users = probe.user_count();
    let files = args.files.unwrap_or(users);
    let demands = parse_demands(&args.demands, users, files)?;
    let scheme = SchemeInstance::with_profile(res, profile, args.scheme.z, files)?;
    Ok((scheme, demands))
}

fn schedule_cmd(args: &DeliveryArgs, caps: &Caps) -> Result<String> {
    let (scheme, demands) = scheme_for(args, caps)?;
    let schedule = build_delivery_schedule(&scheme, &demands)?;
    Ok(match args.scheme.design.format {
        Format::Json => serde_json::to_string_pretty(&schedule.to_file())? + "\n",
        Format::Csv => bail!("schedule supports text and json output"),
        Format::Text => {
            let file = schedule.to_file();
            let mut out = format!(
                "{} transmissions for {} users (rate {})\n",
                file.transmissions.len(),
                scheme.user_count(),
                both(&scheme.metrics()?.rate)
            );
            for (i, t) in file.transmissions.iter().enumerate() {
                let terms: Vec<String> = t
                    .terms
                    .iter()
                    .map(|term| format!("W{}[{}]", file.demands[term.user - 1], term.subfile))
                    .collect();
                let _ = writeln!(out, "{:>5}: {}", i + 1, terms.join(" + "));
            }
            out
        }
    })
}

fn simulate_cmd(args: &SimulateArgs, caps: &Caps) -> Result<(String, bool)> {
    let (scheme, demands) = scheme_for(&args.delivery, caps)?;
    let len = args.len.unwrap_or(scheme.resolution().v() * 16);
    let run = simulate(&scheme, len, args.seed, Some(&demands))?;
    if let Some(path) = &args.dump_payloads {
        fs::write(path, payload_dump(&run.schedule, &run.payloads))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let report = &run.report;
    let ok = report.all_recovered();
    let out = match args.delivery.scheme.design.format {
        Format::Json => serde_json::to_string_pretty(report)? + "\n",
        Format::Csv => bail!("simulate supports text and json output"),
        Format::Text => {
            let mut out = String::new();
            for u in &report.users {
                let caches: Vec<String> = u.caches.iter().map(|c| c.to_string()).collect();
                let _ = writeln!(
                    out,
                    "{} user {} caches {{{}}} file {}: {} from caches, {} from air",
                    if u.recovered && u.bytes_match {
                        "PASS"
                    } else {
                        "FAIL"
                    },
                    u.user,
                    caches.join(","),
                    u.demand,
                    u.from_cache,
                    u.from_air
                );
            }
            let _ = writeln!(
                out,
                "{} of {} users recovered; {} transmissions; measured rate {}; closed-form rate {}{}",
                report.users.iter().filter(|u| u.bytes_match).count(),
                report.users.len(),
                report.transmissions,
                exact(&report.measured_rate),
                exact(&report.theoretical_rate),
                if report.distinct_demands { "" } else { " (repeated demands)" }
            );
            out
        }
    };
    Ok((out, ok))
}

fn table_cmd(args: &TableArgs, caps: &Caps) -> Result<String> {
    let ids: Vec<TableId> = if args.id.eq_ignore_ascii_case("all") {
        TableId::ALL.to_vec()
    } else {
        vec![args.id.parse()?]
    };
    let tables = ids
        .into_iter()
        .map(|id| generate_table(id, caps))
        .collect::<crd_caching::Result<Vec<_>>>()?;
    Ok(match args.format {
        Format::Csv => {
            let mut out = format!("{TABLE_CSV_HEADER}\n");
            for t in &tables {
                out.push_str(&t.csv_body());
            }
            out
        }
        Format::Json => {
            let value: Vec<_> = tables
                .iter()
                .map(|t| {
                    serde_json::json!({
                        "table": t.id.to_string(),
                        "title": t.title,
                        "rows": t.rows.iter().map(crd_caching::baselines::row_json).collect::<Vec<_>>(),
                    })
                })
                .collect();
            serde_json::to_string_pretty(&value)? + "\n"
        }
        Format::Text => tables
            .iter()
            .map(|t| t.to_text())
            .collect::<Vec<_>>()
            .join("\n"),
    })
}

fn sweep_cmd(args: &SweepArgs, caps: &Caps) -> Result<String> {
    let family: SweepFamily = args.family.parse()?;
    let rows = sweep(family, &args.params, args.z, caps);
    for r in rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "warning: {} {}: {}",
            r.family,
            r.param,
            r.error.as_deref().unwrap_or("")
        );
    }
    Ok(sweep_csv(&rows))
}

fn run(cli: &Cli) -> Result<bool> {
    let caps = caps(cli)?;
    let (out, ok) = match &cli.command {
        Command::Construct(a) => (construct(a, &caps)?, true),
        Command::Analyze(a) => (analyze_cmd(a, &caps)?, true),
        Command::Schedule(a) => (schedule_cmd(a, &caps)?, true),
        Command::Simulate(a) => simulate_cmd(a, &caps)?,
        Command::Table(a) => (table_cmd(a, &caps)?, true),
        Command::Sweep(a) => (sweep_cmd(a, &caps)?, true),
    };
    match &cli.out {
        Some(path) => {
            fs::write(path, out).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{out}"),
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: some users did not recover their files");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demand_specs() {
        assert_eq!(parse_demands("distinct", 3, 3).unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_demands("equal", 2, 1).unwrap(), vec![1, 1]);
        assert_eq!(parse_demands("2, 1", 2, 2).unwrap(), vec![2, 1]);
        assert!(parse_demands("distinct", 3, 2).is_err());
        assert!(parse_demands("1,x", 2, 2).is_err());
    }

    #[test]
    fn design_inputs() {
        let caps = Caps::default();
        assert_eq!(load_design("example:3", &caps).unwrap().v(), 9);
        assert!(load_design("no-such-design", &caps).is_err());
        let tight = Caps {
            max_points: 10,
            ..caps
        };
        assert!(load_design("affine:n=4", &tight).is_err());
    }
}
