//! Command implementations on top of the core pipeline.

use std::fs;
use std::path::{Path, PathBuf};

use voxshift_core::engine::{analyze_world, write_sets_tsv, AnalysisParams, WorldAnalysis};
use voxshift_core::isovist::Headspace;
use voxshift_core::metrics::{write_metrics_csv, IsovistMetrics, METRIC_COUNT};
use voxshift_core::pca::{fit_pca, project, PcaModel};
use voxshift_core::rng::SeededRng;
use voxshift_core::shift::{
    compute_shift, pair_locations, shift_summary, top_k_shifts, write_shift_csv,
};
use voxshift_core::viz::{
    render_era_scatter, render_flow_plot, render_overlay, write_ppm, PlotSpec,
};
use voxshift_core::world::{
    apply_toy_generator, generate_flat_world, load_world, plan_toy_structures, save_world,
    BlockClassification, ToyGeneratorParams, VoxelWorld,
};

use crate::config::{CliError, RunConfig};

pub struct LoadedWorld {
    pub name: String,
    pub world: VoxelWorld,
}

fn world_name(path: &Path, taken: &mut Vec<String>) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "world".to_string());
    let mut name = stem.clone();
    let mut suffix = 2;
    while taken.contains(&name) {
        name = format!("{stem}_{suffix}");
        suffix += 1;
    }
    taken.push(name.clone());
    name
}

fn read_world(path: &Path) -> Result<VoxelWorld, CliError> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::io(&format!("reading world {}", path.display()), e))?;
    load_world(&bytes).map_err(|e| CliError::new("format", format!("{}: {e}", path.display())))
}

/// Loads base (if set) followed by the generated worlds, with unique
/// display names derived from the file stems.
pub fn load_worlds(cfg: &RunConfig) -> Result<Vec<LoadedWorld>, CliError> {
    let mut taken = Vec::new();
    let mut out = Vec::new();
    for path in cfg.base.iter().chain(cfg.gens.iter()) {
        out.push(LoadedWorld {
            name: world_name(path, &mut taken),
            world: read_world(path)?,
        });
    }
    if out.is_empty() {
        return Err(CliError::new(
            "args",
            "no worlds given; pass --base and/or --gen",
        ));
    }
    Ok(out)
}

pub fn load_classification(cfg: &RunConfig) -> Result<BlockClassification, CliError> {
    match &cfg.classify {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::io(&format!("reading classification {}", path.display()), e)
            })?;
            BlockClassification::parse(&text)
                .map_err(|e| CliError::new("format", format!("{}: {e}", path.display())))
        }
        None => Ok(BlockClassification::default_lists()),
    }
}

/// Per-stage seed schedule drawn from the master seed: one sub-sampling
/// seed per world in processing order, then one pairing seed per generated
/// world. Keeps every stage deterministic and independent of the others.
pub struct SeedSchedule {
    pub world_seeds: Vec<u64>,
    pub pairing_seeds: Vec<u64>,
}

impl SeedSchedule {
    pub fn new(master: u64, world_count: usize, gen_count: usize) -> Self {
        let mut rng = SeededRng::new(master);
        SeedSchedule {
            world_seeds: (0..world_count).map(|_| rng.derive_seed()).collect(),
            pairing_seeds: (0..gen_count).map(|_| rng.derive_seed()).collect(),
        }
    }
}

fn ensure_out_dir(cfg: &RunConfig) -> Result<(), CliError> {
    fs::create_dir_all(&cfg.out)
        .map_err(|e| CliError::io(&format!("creating {}", cfg.out.display()), e))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(&format!("writing {}", path.display()), e))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(&format!("writing {}", path.display()), e))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn analyze(
    loaded: &LoadedWorld,
    cls: &BlockClassification,
    cfg: &RunConfig,
    seed: u64,
) -> Result<WorldAnalysis, CliError> {
    let params = AnalysisParams {
        view_distance: cfg.view_distance,
        step_budget: cfg.step_budget,
        sample_fraction: cfg.iso_fraction,
        seed,
        workers: cfg.workers,
    };
    let analysis = analyze_world(&loaded.world, cls, &params)
        .map_err(|e| CliError::new("internal", format!("{}: {e}", loaded.name)))?;
    println!(
        "world {}: {} headspaces, {} sampled",
        loaded.name,
        analysis.total_headspaces,
        analysis.records.len()
    );
    Ok(analysis)
}

fn plot_spec(cfg: &RunConfig, title: String) -> PlotSpec {
    PlotSpec::new(800, 600)
        .expect("fixed dimensions are positive")
        .with_highlight_count(cfg.top_k)
        .with_title(&title)
}

fn project_records(
    model: &PcaModel,
    records: &[(Headspace, IsovistMetrics)],
) -> Result<Vec<(Headspace, [f64; 2])>, CliError> {
    records
        .iter()
        .map(|(hs, m)| {
            let p = project(model, &m.as_row())
                .map_err(|e| CliError::new("internal", e.to_string()))?;
            Ok((*hs, [p[0], p.get(1).copied().unwrap_or(0.0)]))
        })
        .collect()
}

fn fit_model_on_worlds(
    analyses: &[(String, Vec<(Headspace, IsovistMetrics)>)],
    components: usize,
) -> Result<PcaModel, CliError> {
    let mut rows: Vec<[f64; METRIC_COUNT]> = Vec::new();
    for (_, records) in analyses {
        rows.extend(records.iter().map(|(_, m)| m.as_row()));
    }
    let model = fit_pca(&rows, components)
        .map_err(|e| CliError::new("internal", format!("pca fit: {e}")))?;
    let pct: Vec<String> = model
        .explained_variance_ratio
        .iter()
        .enumerate()
        .map(|(i, r)| format!("PC-{} {:.1}%", i + 1, r * 100.0))
        .collect();
    println!("pca [{} rows]: {}", rows.len(), pct.join(", "));
    Ok(model)
}

fn load_model(path: &Path) -> Result<PcaModel, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::io(&format!("reading model {}", path.display()), e))?;
    PcaModel::parse(&text).map_err(|e| CliError::new("format", format!("{}: {e}", path.display())))
}

/// Overlay ground threshold: explicit flag, else the world's lowest level
/// (every headspace qualifies).
fn overlay_threshold(world: &VoxelWorld, explicit: Option<i32>) -> i32 {
    explicit.unwrap_or_else(|| world.min_corner().y)
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

pub fn cmd_isovists(cfg: &RunConfig, dump_sets: bool) -> Result<(), CliError> {
    let cls = load_classification(cfg)?;
    let worlds = load_worlds(cfg)?;
    ensure_out_dir(cfg)?;
    let seeds = SeedSchedule::new(cfg.seed, worlds.len(), 0);
    for (loaded, &seed) in worlds.iter().zip(&seeds.world_seeds) {
        let analysis = analyze(loaded, &cls, cfg, seed)?;
        let csv = write_metrics_csv(&analysis.metric_records());
        write_text(&cfg.out.join(format!("metrics_{}.csv", loaded.name)), &csv)?;
        if dump_sets {
            write_text(
                &cfg.out.join(format!("sets_{}.tsv", loaded.name)),
                &write_sets_tsv(&analysis),
            )?;
        }
    }
    Ok(())
}

pub fn cmd_pca_fit(cfg: &RunConfig, components: usize) -> Result<(), CliError> {
    if !(1..=METRIC_COUNT).contains(&components) {
        return Err(CliError::new(
            "args",
            format!("components {components} outside 1..={METRIC_COUNT}"),
        ));
    }
    let cls = load_classification(cfg)?;
    let worlds = load_worlds(cfg)?;
    ensure_out_dir(cfg)?;
    let seeds = SeedSchedule::new(cfg.seed, worlds.len(), 0);
    let mut analyses = Vec::new();
    for (loaded, &seed) in worlds.iter().zip(&seeds.world_seeds) {
        let analysis = analyze(loaded, &cls, cfg, seed)?;
        analyses.push((loaded.name.clone(), analysis.metric_records()));
    }
    let model = fit_model_on_worlds(&analyses, components)?;
    write_text(&cfg.out.join("pca_model.txt"), &model.to_text())
}

pub fn cmd_era(cfg: &RunConfig, model_path: Option<&PathBuf>) -> Result<(), CliError> {
    let cls = load_classification(cfg)?;
    let worlds = load_worlds(cfg)?;
    ensure_out_dir(cfg)?;
    let seeds = SeedSchedule::new(cfg.seed, worlds.len(), 0);
    let mut analyses = Vec::new();
    for (loaded, &seed) in worlds.iter().zip(&seeds.world_seeds) {
        let analysis = analyze(loaded, &cls, cfg, seed)?;
        analyses.push((loaded.name.clone(), analysis.metric_records()));
    }
    let model = match model_path {
        Some(path) => load_model(path)?,
        None => {
            let model = fit_model_on_worlds(&analyses, 2)?;
            write_text(&cfg.out.join("pca_model.txt"), &model.to_text())?;
            model
        }
    };
    for (name, records) in &analyses {
        let projected = project_records(&model, records)?;
        let points: Vec<[f64; 2]> = projected.iter().map(|&(_, p)| p).collect();
        let svg = render_era_scatter(&points, &plot_spec(cfg, format!("{name} locations")))
            .map_err(|e| CliError::new("internal", e.to_string()))?;
        write_text(&cfg.out.join(format!("era_{name}.svg")), &svg)?;
    }
    Ok(())
}

pub fn cmd_overlay(
    cfg: &RunConfig,
    model_path: Option<&PathBuf>,
    threshold: Option<i32>,
) -> Result<(), CliError> {
    let cls = load_classification(cfg)?;
    let worlds = load_worlds(cfg)?;
    ensure_out_dir(cfg)?;
    let seeds = SeedSchedule::new(cfg.seed, worlds.len(), 0);
    let mut analyses = Vec::new();
    for (loaded, &seed) in worlds.iter().zip(&seeds.world_seeds) {
        let analysis = analyze(loaded, &cls, cfg, seed)?;
        analyses.push((loaded.name.clone(), analysis.metric_records()));
    }
    let model = match model_path {
        Some(path) => load_model(path)?,
        None => fit_model_on_worlds(&analyses, 2)?,
    };
    for (loaded, (name, records)) in worlds.iter().zip(&analyses) {
        let projected = project_records(&model, records)?;
        let spec = plot_spec(cfg, String::new());
        let image = render_overlay(
            &loaded.world,
            &projected,
            overlay_threshold(&loaded.world, threshold),
            cfg.column_agg,
            &spec,
            &spec.ramp,
        )
        .map_err(|e| CliError::new("internal", format!("{name}: {e}")))?;
        write_bytes(
            &cfg.out.join(format!("overlay_{name}.ppm")),
            &write_ppm(&image),
        )?;
    }
    Ok(())
}

pub fn cmd_shift(cfg: &RunConfig, threshold: Option<i32>) -> Result<(), CliError> {
    if cfg.base.is_none() {
        return Err(CliError::new("args", "shift requires --base"));
    }
    if cfg.gens.is_empty() {
        return Err(CliError::new("args", "shift requires at least one --gen"));
    }
    let cls = load_classification(cfg)?;
    let worlds = load_worlds(cfg)?;
    ensure_out_dir(cfg)?;
    let gen_count = worlds.len() - 1;
    let seeds = SeedSchedule::new(cfg.seed, worlds.len(), gen_count);

    let mut analyses: Vec<(String, Vec<(Headspace, IsovistMetrics)>)> = Vec::new();
    for (loaded, &seed) in worlds.iter().zip(&seeds.world_seeds) {
        let analysis = analyze(loaded, &cls, cfg, seed)?;
        let records = analysis.metric_records();
        let csv = write_metrics_csv(&records);
        write_text(&cfg.out.join(format!("metrics_{}.csv", loaded.name)), &csv)?;
        analyses.push((loaded.name.clone(), records));
    }

    // One joint model over base plus every generated world, so pre and
    // post points share a coordinate frame.
    let model = fit_model_on_worlds(&analyses, 2)?;
    write_text(&cfg.out.join("pca_model.txt"), &model.to_text())?;

    for (loaded, (name, records)) in worlds.iter().zip(&analyses) {
        let projected = project_records(&model, records)?;
        let points: Vec<[f64; 2]> = projected.iter().map(|&(_, p)| p).collect();
        let svg = render_era_scatter(&points, &plot_spec(cfg, format!("{name} locations")))
            .map_err(|e| CliError::new("internal", e.to_string()))?;
        write_text(&cfg.out.join(format!("era_{name}.svg")), &svg)?;

        let spec = plot_spec(cfg, String::new());
        let image = render_overlay(
            &loaded.world,
            &projected,
            overlay_threshold(&loaded.world, threshold),
            cfg.column_agg,
            &spec,
            &spec.ramp,
        )
        .map_err(|e| CliError::new("internal", format!("{name}: {e}")))?;
        write_bytes(
            &cfg.out.join(format!("overlay_{name}.ppm")),
            &write_ppm(&image),
        )?;
    }

    let (_, base_records) = &analyses[0];
    for (i, (gen_name, gen_records)) in analyses[1..].iter().enumerate() {
        let outcome = pair_locations(
            base_records,
            gen_records,
            cfg.pair_fraction,
            cfg.match_radius,
            seeds.pairing_seeds[i],
        )
        .map_err(|e| CliError::new("pairing", format!("{gen_name}: {e}")))?;
        println!(
            "gen {gen_name}: {} sampled, {} paired, {} dropped",
            outcome.sampled,
            outcome.pairs.len(),
            outcome.dropped
        );
        if outcome.pairs.is_empty() {
            return Err(CliError::new(
                "pairing",
                format!(
                    "{gen_name}: no location could be paired ({} sampled, all dropped); \
                     consider --match-radius > 0",
                    outcome.sampled
                ),
            ));
        }

        let records = compute_shift(&outcome.pairs, &model)
            .map_err(|e| CliError::new("internal", format!("{gen_name}: {e}")))?;
        write_text(
            &cfg.out.join(format!("shift_{gen_name}.csv")),
            &write_shift_csv(&records),
        )?;

        let summary = shift_summary(&records, outcome.dropped)
            .map_err(|e| CliError::new("internal", format!("{gen_name}: {e}")))?;
        print!("{}", summary.to_text());
        write_text(
            &cfg.out.join(format!("summary_{gen_name}.txt")),
            &summary.to_text(),
        )?;

        let top = top_k_shifts(&records, cfg.top_k);
        println!("top {} shifts for {gen_name}:", top.len());
        println!(
            "{:>5}  {:>16}  {:>16}  {:>12}",
            "rank", "base", "gen", "magnitude"
        );
        for (rank, r) in top.iter().enumerate() {
            let b = r.pair.base_head;
            let g = r.pair.gen_head;
            println!(
                "{:>5}  {:>16}  {:>16}  {:>12.6}",
                rank + 1,
                format!("({},{},{})", b.x, b.y, b.z),
                format!("({},{},{})", g.x, g.y, g.z),
                r.magnitude
            );
        }

        let svg = render_flow_plot(
            &records,
            &plot_spec(cfg, format!("{gen_name} generative shift")),
        )
        .map_err(|e| CliError::new("internal", format!("{gen_name}: {e}")))?;
        write_text(&cfg.out.join(format!("flow_{gen_name}.svg")), &svg)?;
    }
    Ok(())
}

pub struct GenToyArgs {
    pub dims: (u32, u32, u32),
    pub ground_height: u32,
    pub ground_material: String,
    pub count: u32,
    pub footprint: (u32, u32),
    pub wall_height: (u32, u32),
    pub material: String,
}

pub fn parse_dims(text: &str) -> Result<(u32, u32, u32), CliError> {
    let parts: Vec<&str> = text.split('x').collect();
    let bad = || CliError::new("args", format!("dims {text:?} must look like 64x32x64"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut vals = [0u32; 3];
    for (slot, part) in vals.iter_mut().zip(&parts) {
        *slot = part.parse().map_err(|_| bad())?;
    }
    Ok((vals[0], vals[1], vals[2]))
}

pub fn cmd_gen_toy(cfg: &RunConfig, args: &GenToyArgs) -> Result<(), CliError> {
    ensure_out_dir(cfg)?;
    let base = generate_flat_world(
        args.dims,
        args.ground_height,
        &args.ground_material,
        cfg.seed,
    )
    .map_err(|e| CliError::new("args", e.to_string()))?;
    let params = ToyGeneratorParams {
        structure_count: args.count,
        footprint: args.footprint,
        wall_height: args.wall_height,
        material: args.material.clone(),
        seed: cfg.seed,
    };
    let generated =
        apply_toy_generator(&base, &params).map_err(|e| CliError::new("args", e.to_string()))?;
    for s in plan_toy_structures(&base, &params) {
        println!(
            "structure: corner ({}, {}), footprint {}x{}, walls y {}..{}",
            s.x0,
            s.z0,
            s.width,
            s.depth,
            s.base_y,
            s.base_y + s.height as i32 - 1
        );
    }
    write_bytes(&cfg.out.join("base.voxgrid"), &save_world(&base))?;
    write_bytes(&cfg.out.join("gen.voxgrid"), &save_world(&generated))?;
    Ok(())
}
