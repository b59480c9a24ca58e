mod config;
mod error;
mod losses;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pgs_core::annotation::AnnotationFile;
use pgs_core::geometry::Point3;
use pgs_core::grasp::annotate_scene_grasps;
use pgs_core::par::{self, Execution};
use pgs_core::policy::{compare_policies, comparison_table, run_episode, CandidateCache, EpisodeStats, Policy};
use pgs_core::push::{footprint_points, plan_push, simulate_push, to_segment, PushPlan};
use pgs_core::scene::{generate_scene, SceneModel, TopDownCamera};
use pgs_core::segmentation::{cluster_votes, f_measure, oracle_votes, write_instance_map, InstanceMap};
use pgs_core::suction::annotate_scene_suction;
use serde::Serialize;
use serde_json::json;

use config::RunConfig;
use error::CliError;
use output::Outputs;

#[derive(Parser)]
#[command(name = "pgs", version, about = "Scene synthesis, annotation and picking simulation for cluttered tabletops")]
struct Cli {
    /// TOML file overriding module defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SceneArg {
    /// Scene file written by `synth`.
    #[arg(long)]
    scene: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a cluttered scene.
    Synth {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        objects: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dense grasp and suction labels for a scene.
    Annotate {
        #[command(flatten)]
        scene: SceneArg,
        /// Surface sampling seed; defaults to the scene seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Push of one object toward the scene center.
    PlanPush {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long)]
        object: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cluster oracle center votes into an instance map.
    Segment {
        #[command(flatten)]
        scene: SceneArg,
        /// Vote noise seed; defaults to the scene seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output prefix; writes PREFIX.png and PREFIX.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run clearing episodes on a scene file or on generated scenes.
    Simulate {
        #[arg(long, conflicts_with_all = ["seed", "objects"])]
        scene: Option<PathBuf>,
        /// First generation seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Number of consecutive seeds.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long)]
        objects: Option<usize>,
        /// One or more of grasp, suction, gs, pgs.
        #[arg(long, value_delimiter = ',', default_value = "pgs")]
        policy: Vec<Policy>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Mean SR/CR per policy over a seed range.
    Compare {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 30)]
        seeds: u64,
        #[arg(long)]
        objects: usize,
        #[arg(long, value_delimiter = ',', default_value = "grasp,suction,gs,pgs")]
        policy: Vec<Policy>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the reference losses on a fixture.
    Losses {
        #[arg(long)]
        fixture: PathBuf,
        /// Expected values; the command fails when any differs by more
        /// than 1e-9.
        #[arg(long)]
        golden: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Ctx {
    cfg: RunConfig,
    hash: String,
    exec: Execution,
}

fn load_scene(path: &Path) -> Result<SceneModel, CliError> {
    SceneModel::load(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn pretty(v: &impl Serialize) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn synth(ctx: &Ctx, seed: u64, objects: usize, out: &Path) -> Result<(), CliError> {
    let table = pgs_core::scene::default_table();
    let r = generate_scene(seed, objects, &table, &ctx.cfg.catalog, &ctx.cfg.placement)?;
    let mut outs = Outputs::new();
    outs.add_text(out, &r.scene.to_json_tagged(&ctx.hash)?)?;
    outs.commit()?;
    println!("placed {} of {} objects -> {}", r.placed(), r.requested, out.display());
    Ok(())
}

fn annotate(ctx: &Ctx, scene_path: &Path, seed: Option<u64>, out: &Path) -> Result<(), CliError> {
    let scene = load_scene(scene_path)?;
    if scene.objects.is_empty() {
        return Err(CliError::Validation("scene has no objects".into()));
    }
    let seed = seed.unwrap_or(scene.seed);
    let points = ctx.cfg.annotate.points;
    let grasps = annotate_scene_grasps(&scene, &ctx.cfg.grasp, points, seed, ctx.exec)?;
    let suctions = annotate_scene_suction(&scene, &ctx.cfg.suction, points, seed, ctx.exec)?;
    let file = AnnotationFile::new(scene.content_hash(), ctx.hash.clone(), ctx.cfg.bins, &grasps, &suctions);
    file.validate()?;
    let mut outs = Outputs::new();
    outs.add_text(out, &file.to_json()?)?;
    outs.commit()?;
    println!("grasps {} suctions {} -> {}", grasps.len(), suctions.len(), out.display());
    Ok(())
}

fn plan(ctx: &Ctx, scene_path: &Path, object: u32, out: Option<&Path>) -> Result<(), CliError> {
    let scene = load_scene(scene_path)?;
    let obj = scene
        .object(object)
        .ok_or_else(|| CliError::Validation(format!("scene has no object {object}")))?;
    let report = match plan_push(&footprint_points(&obj.footprint()), &scene.workspace, &ctx.cfg.push)? {
        PushPlan::NoPushNeeded => json!({ "object_id": object, "status": "no-push-needed", "config_hash": ctx.hash }),
        PushPlan::Push(p) => {
            let s = to_segment(&p);
            let sim = simulate_push(&scene, &s, object)?;
            json!({
                "object_id": object,
                "status": "push",
                "x": p.x, "y": p.y, "theta": p.theta, "d": p.d,
                "x1": s.x1, "y1": s.y1, "x2": s.x2, "y2": s.y2,
                "moved": sim.moved,
                "blocked": sim.blocked,
                "config_hash": ctx.hash,
            })
        }
    };
    let text = pretty(&report)?;
    match out {
        Some(path) => {
            let mut outs = Outputs::new();
            outs.add_text(path, &text)?;
            outs.commit()?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn centroids(map: &InstanceMap, cloud: &pgs_core::geometry::OrganizedCloud) -> Vec<Point3> {
    let k = map.instance_count() as usize;
    let mut sums = vec![(Point3::origin().coords, 0usize); k];
    for (label, p) in map.labels.iter().zip(&cloud.grid) {
        if let (l @ 1.., Some(p)) = (*label, p) {
            let e = &mut sums[l as usize - 1];
            e.0 += p.coords;
            e.1 += 1;
        }
    }
    sums.into_iter()
        .map(|(s, n)| Point3::from(s / n.max(1) as f64))
        .collect()
}

fn segment(ctx: &Ctx, scene_path: &Path, seed: Option<u64>, out: &Path) -> Result<(), CliError> {
    let scene = load_scene(scene_path)?;
    let camera = TopDownCamera::over_table(scene.table());
    let votes = oracle_votes(&scene, &camera, ctx.cfg.segment.vote_noise, seed.unwrap_or(scene.seed))?;
    let fg = votes.gt.foreground();
    let pred = cluster_votes(&votes.cloud, &votes.votes, &fg, &ctx.cfg.segment.mean_shift, ctx.exec)?;
    let f = f_measure(&pred, &votes.gt)?;
    let cents = centroids(&pred, &votes.cloud);
    let png = out.with_extension("png");
    let sidecar = out.with_extension("json");
    // The sidecar is written alongside the image, so stage both into
    // temporaries and move them together.
    let mut outs = Outputs::new();
    let dir = tempfile::tempdir_in(png.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new(".")))?;
    let (tp, ts) = (dir.path().join("map.png"), dir.path().join("map.json"));
    write_instance_map(&tp, &ts, &pred, &cents)?;
    outs.add_bytes(&png, &std::fs::read(&tp)?)?;
    outs.add_bytes(&sidecar, &std::fs::read(&ts)?)?;
    outs.commit()?;
    println!(
        "instances {} (ground truth {}) f-measure {:.4} config {} -> {}",
        pred.instance_count(),
        votes.gt.instance_count(),
        f,
        ctx.hash,
        png.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct SimulationReport<'a> {
    config_hash: &'a str,
    episodes: &'a [EpisodeStats],
}

fn simulate(
    ctx: &Ctx,
    scene_path: Option<&Path>,
    seed: Option<u64>,
    seeds: u64,
    objects: Option<usize>,
    policies: &[Policy],
    out: &Path,
) -> Result<(), CliError> {
    let scenes: Vec<SceneModel> = match (scene_path, objects) {
        (Some(p), _) => vec![load_scene(p)?],
        (None, Some(n)) => {
            if seeds == 0 {
                return Err(CliError::Validation("--seeds must be positive".into()));
            }
            let first = seed.unwrap_or(0);
            let table = pgs_core::scene::default_table();
            (first..first + seeds)
                .map(|s| Ok(generate_scene(s, n, &table, &ctx.cfg.catalog, &ctx.cfg.placement)?.scene))
                .collect::<Result<_, CliError>>()?
        }
        (None, None) => return Err(CliError::Validation("give --scene or --objects".into())),
    };
    let params = ctx.cfg.policy_params();
    let runs = par::map(ctx.exec, &scenes, |scene| -> Result<Vec<EpisodeStats>, CliError> {
        let cache = CandidateCache::build(scene, &params.candidates, Execution::Sequential)?;
        let cfg = ctx.cfg.episode_config(scene.objects.len());
        policies
            .iter()
            .map(|&p| run_episode(scene, &cache, p, &cfg, &params).map_err(CliError::from))
            .collect()
    });
    let mut episodes = Vec::new();
    for r in runs {
        episodes.extend(r?);
    }
    let mut outs = Outputs::new();
    outs.add_text(
        out,
        &pretty(&SimulationReport {
            config_hash: &ctx.hash,
            episodes: &episodes,
        })?,
    )?;
    outs.commit()?;
    println!("policy,seed,attempts,successes,pushes,sr,cr");
    for e in &episodes {
        println!(
            "{},{},{},{},{},{:.4},{:.4}",
            e.policy, e.seed, e.attempts, e.successes, e.pushes, e.sr, e.cr
        );
    }
    if policies.len() > 1 {
        println!();
        println!("policy,mean_sr,mean_cr");
        for p in policies {
            let mine: Vec<&EpisodeStats> = episodes.iter().filter(|e| e.policy == *p).collect();
            let k = mine.len() as f64;
            println!(
                "{},{:.4},{:.4}",
                p,
                mine.iter().map(|e| e.sr).sum::<f64>() / k,
                mine.iter().map(|e| e.cr).sum::<f64>() / k
            );
        }
    }
    Ok(())
}

fn compare(ctx: &Ctx, seed: u64, seeds: u64, objects: usize, policies: &[Policy], out: &Path) -> Result<(), CliError> {
    let seed_list: Vec<u64> = (seed..seed + seeds).collect();
    let cfg = ctx.cfg.episode_config(objects);
    let c = compare_policies(
        &seed_list,
        &cfg,
        policies,
        &ctx.cfg.catalog,
        &ctx.cfg.placement,
        &ctx.cfg.policy_params(),
        ctx.exec,
    )?;
    let table = comparison_table(&c);
    let mut outs = Outputs::new();
    outs.add_text(out, &format!("# config {}\n{table}", ctx.hash))?;
    outs.commit()?;
    print!("{table}");
    Ok(())
}

fn run_losses(ctx: &Ctx, fixture: &Path, golden: Option<&Path>, out: Option<&Path>) -> Result<(), CliError> {
    let text = std::fs::read_to_string(fixture)
        .map_err(|e| CliError::Validation(format!("{}: {e}", fixture.display())))?;
    let report = losses::evaluate(&losses::parse_fixture(&text)?)?;
    let doc = json!({ "config_hash": ctx.hash, "losses": report });
    let rendered = pretty(&doc)?;
    if let Some(g) = golden {
        let gtext =
            std::fs::read_to_string(g).map_err(|e| CliError::Validation(format!("{}: {e}", g.display())))?;
        let gval: serde_json::Value =
            serde_json::from_str(&gtext).map_err(|e| CliError::Validation(format!("{}: {e}", g.display())))?;
        let dev = losses::max_deviation(&report, &gval)?;
        if dev > 1e-9 {
            return Err(CliError::Runtime(format!("losses deviate from the golden values by {dev:e}")));
        }
        eprintln!("golden match, max deviation {dev:e}");
    }
    match out {
        Some(path) => {
            let mut outs = Outputs::new();
            outs.add_text(path, &rendered)?;
            outs.commit()?;
        }
        None => print!("{rendered}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.jobs == 0 {
        return Err(CliError::Validation("--jobs must be at least 1".into()));
    }
    let cfg = RunConfig::load(cli.config.as_deref())?;
    let ctx = Ctx {
        hash: cfg.hash(),
        cfg,
        exec: if cli.jobs > 1 {
            Execution::Parallel
        } else {
            Execution::Sequential
        },
    };
    par::with_jobs(cli.jobs, || match &cli.command {
        Command::Synth { seed, objects, out } => synth(&ctx, *seed, *objects, out),
        Command::Annotate { scene, seed, out } => annotate(&ctx, &scene.scene, *seed, out),
        Command::PlanPush { scene, object, out } => plan(&ctx, &scene.scene, *object, out.as_deref()),
        Command::Segment { scene, seed, out } => segment(&ctx, &scene.scene, *seed, out),
        Command::Simulate {
            scene,
            seed,
            seeds,
            objects,
            policy,
            out,
        } => simulate(&ctx, scene.as_deref(), *seed, *seeds, *objects, policy, out),
        Command::Compare {
            seed,
            seeds,
            objects,
            policy,
            out,
        } => compare(&ctx, *seed, *seeds, *objects, policy, out),
        Command::Losses { fixture, golden, out } => run_losses(&ctx, fixture, golden.as_deref(), out.as_deref()),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
