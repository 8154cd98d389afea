mod error;

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use beq_core::adversary::{
    build_af, build_doublejump_coder, build_simple_fin, canonical_triangular, diagonalize_unbounded,
    ConstructionLog,
};
use beq_core::approx::{dominant_f, ApproximationFamily, FuelSchedule, ProgramList};
use beq_core::embed::{
    brute_force_embeds, check_partial_embedding, embed_bounded, embed_delta2, embed_delta3,
    MapFile, PartialMap,
};
use beq_core::indexsets::{classify_becat, ReductionFixture, ReductionKind};
use beq_core::{CharacterProfile, Presentation, Stage};

use crate::error::CliError;

#[derive(Parser)]
#[command(name = "beq", version, about = "Desk-scale computable equivalence structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a stage construction and write its trace.
    Build {
        #[arg(value_enum)]
        kind: BuildKind,
        #[command(flatten)]
        args: BuildArgs,
    },
    /// Synthesize an embedding of one trace into another.
    Embed {
        #[arg(value_enum)]
        algo: EmbedAlgo,
        #[command(flatten)]
        args: EmbedArgs,
    },
    /// Check a map file against two traces.
    Verify {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        map: PathBuf,
        /// Stage of the snapshots; defaults to the map's stage.
        #[arg(long)]
        stage: Option<Stage>,
    },
    /// Print class sizes per stage.
    Census {
        #[arg(long)]
        trace: PathBuf,
        /// Print only this stage.
        #[arg(long)]
        stage: Option<Stage>,
    },
    /// Print the degree of a profile.
    Classify {
        #[arg(long)]
        profile: PathBuf,
    },
    /// Run a reduction on a fixture.
    Reduce {
        kind: String,
        #[arg(long)]
        fixture: PathBuf,
        #[arg(long)]
        horizon: Stage,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BuildKind {
    Triangular,
    Diag,
    SimpleFin,
    Af,
    Coder,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    horizon: Stage,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    log: Option<PathBuf>,
    /// `PROGRAMS v1` file (diag, af).
    #[arg(long)]
    programs: Option<PathBuf>,
    /// `FAMILY v1` file; repeat for simple-fin.
    #[arg(long)]
    family: Vec<PathBuf>,
    /// Number of coded strings (coder).
    #[arg(long, default_value_t = 7)]
    strings: u64,
    #[arg(long, default_value_t = 1)]
    fuel_scale: u64,
    #[arg(long, default_value_t = 0)]
    fuel_offset: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmbedAlgo {
    Bounded,
    Delta2,
    Delta3,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    source_profile: Option<PathBuf>,
    #[arg(long)]
    target_profile: Option<PathBuf>,
    /// `MAP v1` seed (bounded, delta2); empty when omitted.
    #[arg(long)]
    seed: Option<PathBuf>,
    #[arg(long)]
    horizon: Stage,
    #[arg(long)]
    out: PathBuf,
    /// Mind-change log output.
    #[arg(long)]
    mind_changes: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load<T: FromStr>(path: &Path) -> Result<T, CliError>
where
    T::Err: Display,
{
    read(path)?.parse().map_err(|e: T::Err| CliError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn write(path: &Path, contents: impl Display) -> Result<(), CliError> {
    fs::write(path, contents.to_string()).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn required<'a>(v: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, CliError> {
    v.as_deref()
        .ok_or_else(|| CliError::Input(format!("missing --{flag}")))
}

fn input(e: impl Display) -> CliError {
    CliError::Input(e.to_string())
}

fn cmd_build(kind: BuildKind, a: &BuildArgs) -> Result<(), CliError> {
    let fuel = FuelSchedule {
        scale: a.fuel_scale,
        offset: a.fuel_offset,
    };
    let one_family = || -> Result<ApproximationFamily, CliError> {
        match a.family.as_slice() {
            [f] => load(f),
            _ => Err(CliError::Input("expected exactly one --family".into())),
        }
    };
    let (pres, log): (Presentation, Option<ConstructionLog>) = match kind {
        BuildKind::Triangular => (canonical_triangular(a.horizon), None),
        BuildKind::Diag => {
            let ProgramList(progs) = load(required(&a.programs, "programs")?)?;
            let (p, l) = diagonalize_unbounded(&progs, a.horizon, fuel);
            (p, Some(l))
        }
        BuildKind::SimpleFin => {
            let fams = a.family.iter().map(|f| load(f)).collect::<Result<Vec<_>, _>>()?;
            let (p, l) = build_simple_fin(&fams, a.horizon).map_err(input)?;
            (p, Some(l))
        }
        BuildKind::Af => {
            let f = match &a.programs {
                Some(path) => {
                    let ProgramList(progs) = load(path)?;
                    dominant_f(progs, fuel)
                }
                None => one_family()?,
            };
            (build_af(&f, a.horizon).map_err(input)?, None)
        }
        BuildKind::Coder => {
            let (p, l) = build_doublejump_coder(&one_family()?, a.strings, a.horizon).map_err(input)?;
            (p, Some(l))
        }
    };
    pres.check_monotone().map_err(CliError::Invariant)?;
    write(&a.out, &pres)?;
    if let Some(log) = log {
        log.check_against(&pres).map_err(CliError::Invariant)?;
        if let Some(path) = &a.log {
            write(path, &log)?;
        }
    }
    Ok(())
}

fn cmd_embed(algo: EmbedAlgo, a: &EmbedArgs) -> Result<(), CliError> {
    let pa: Presentation = load(&a.source)?;
    let pb: Presentation = load(&a.target)?;
    let seed = || -> Result<PartialMap, CliError> {
        Ok(match &a.seed {
            Some(p) => load::<MapFile>(p)?.map,
            None => PartialMap::new(),
        })
    };
    let profiles = || -> Result<(CharacterProfile, CharacterProfile), CliError> {
        Ok((
            load(required(&a.source_profile, "source-profile")?)?,
            load(required(&a.target_profile, "target-profile")?)?,
        ))
    };
    let staged = match algo {
        EmbedAlgo::Bounded => {
            let (fa, fb) = profiles()?;
            embed_bounded(&pa, &pb, &fa, &fb, &seed()?, a.horizon).map_err(input)?
        }
        EmbedAlgo::Delta2 => {
            let (fa, fb) = profiles()?;
            embed_delta2(&pa, &pb, &fa, &fb, &seed()?, a.horizon).map_err(input)?
        }
        EmbedAlgo::Delta3 => embed_delta3(&pa, &pb, a.horizon, None),
    };
    let map = staged.final_map();
    write(
        &a.out,
        MapFile {
            stage: a.horizon,
            map: map.clone(),
        },
    )?;
    if let Some(path) = &a.mind_changes {
        write(path, staged.mind_change_log())?;
    }
    verify(&pa, &pb, &map, a.horizon)
}

fn verify(pa: &Presentation, pb: &Presentation, map: &PartialMap, s: Stage) -> Result<(), CliError> {
    let (sa, sb) = (pa.snapshot_at(s), pb.snapshot_at(s));
    match check_partial_embedding(map, &sa, &sb) {
        Ok(Ok(())) => Ok(()),
        Ok(Err(v)) => Err(CliError::Verification(v.to_string())),
        Err(e) => Err(CliError::Verification(e.to_string())),
    }
}

fn cmd_verify(source: &Path, target: &Path, map: &Path, stage: Option<Stage>) -> Result<(), CliError> {
    let pa: Presentation = load(source)?;
    let pb: Presentation = load(target)?;
    let mf: MapFile = load(map)?;
    let s = stage.unwrap_or(mf.stage);
    let result = verify(&pa, &pb, &mf.map, s);
    println!("{}", if result.is_ok() { "PASS" } else { "FAIL" });
    let (sa, sb) = (pa.snapshot_at(s), pb.snapshot_at(s));
    if sa.len() <= 8 && sb.len() <= 10 {
        let verdict = if brute_force_embeds(&sa, &sb) { "EMBEDS" } else { "NO_EMBEDDING" };
        println!("oracle {verdict}");
    }
    result
}

fn cmd_census(trace: &Path, stage: Option<Stage>) -> Result<(), CliError> {
    let p: Presentation = load(trace)?;
    match stage {
        Some(s) => println!("{}", p.census_at(s)),
        None => {
            let mut replay = p.replay();
            for s in 0..=p.horizon() {
                replay.advance_to(s);
                println!("s={s} {}", replay.snapshot().census());
            }
        }
    }
    Ok(())
}

fn cmd_reduce(kind: &str, fixture: &Path, horizon: Stage, out: &Path) -> Result<(), CliError> {
    let kind: ReductionKind = kind.parse().map_err(CliError::Input)?;
    let fx: ReductionFixture = load(fixture)?;
    let base = match &fx.base {
        Some(rel) => {
            let dir = fixture.parent().unwrap_or(Path::new("."));
            Some(load::<Presentation>(&dir.join(rel))?)
        }
        None => None,
    };
    let pres = fx.run(kind, base.as_ref(), horizon).map_err(input)?;
    pres.check_monotone().map_err(CliError::Invariant)?;
    write(out, &pres)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Build { kind, args } => cmd_build(kind, &args),
        Command::Embed { algo, args } => cmd_embed(algo, &args),
        Command::Verify {
            source,
            target,
            map,
            stage,
        } => cmd_verify(&source, &target, &map, stage),
        Command::Census { trace, stage } => cmd_census(&trace, stage),
        Command::Classify { profile } => {
            let p: CharacterProfile = load(&profile)?;
            println!("{}", classify_becat(&p));
            Ok(())
        }
        Command::Reduce {
            kind,
            fixture,
            horizon,
            out,
        } => cmd_reduce(&kind, &fixture, horizon, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("beq: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
