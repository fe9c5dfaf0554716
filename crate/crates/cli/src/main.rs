//! voxshift: isovist metrics, PCA compression, and generative-shift
//! analysis for voxel block worlds.

mod config;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{CliError, Overrides, RunConfig};
use voxshift_core::viz::ColumnAgg;

#[derive(Debug, Parser)]
#[command(
    name = "voxshift",
    version,
    about = "Isovist metrics and generative-shift analysis for voxel worlds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ColumnAggArg {
    Mean,
    Highest,
}

impl From<ColumnAggArg> for ColumnAgg {
    fn from(v: ColumnAggArg) -> Self {
        match v {
            ColumnAggArg::Mean => ColumnAgg::Mean,
            ColumnAggArg::Highest => ColumnAgg::Highest,
        }
    }
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Config file with `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base (pre-generation) world file.
    #[arg(long)]
    base: Option<PathBuf>,
    /// Generated world file; repeatable.
    #[arg(long)]
    gen: Vec<PathBuf>,
    /// Block classification config; defaults to the built-in lists.
    #[arg(long)]
    classify: Option<PathBuf>,
    /// View distance cap in blocks.
    #[arg(long)]
    d: Option<u32>,
    /// Walkability step budget.
    #[arg(long)]
    n: Option<u32>,
    /// Per-Y-level isovist sample fraction in (0, 1].
    #[arg(long = "iso-fraction")]
    iso_fraction: Option<f64>,
    /// Fraction of base locations to pair in (0, 1].
    #[arg(long = "pair-fraction")]
    pair_fraction: Option<f64>,
    /// Euclidean fallback radius for pairing; 0 = same-column only.
    #[arg(long = "match-radius")]
    match_radius: Option<f64>,
    /// Master seed for every random stage.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of top shifts to highlight and print.
    #[arg(long = "top-k")]
    top_k: Option<usize>,
    /// Worker threads; 0 = all cores. VOXSHIFT_WORKERS is the fallback.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overlay column aggregation.
    #[arg(long = "column-agg", value_enum)]
    column_agg: Option<ColumnAggArg>,
}

impl CommonArgs {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let overrides = Overrides {
            base: self.base.clone(),
            gens: self.gen.clone(),
            classify: self.classify.clone(),
            view_distance: self.d,
            step_budget: self.n,
            iso_fraction: self.iso_fraction,
            pair_fraction: self.pair_fraction,
            match_radius: self.match_radius,
            seed: self.seed,
            top_k: self.top_k,
            workers: self.workers,
            out: self.out.clone(),
            column_agg: self.column_agg.map(Into::into),
        };
        RunConfig::resolve(self.config.as_ref(), &overrides)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute per-location isovist metric CSVs for each world.
    Isovists {
        #[command(flatten)]
        common: CommonArgs,
        /// Also dump per-headspace set sizes as a TSV.
        #[arg(long = "dump-sets")]
        dump_sets: bool,
    },
    /// Run the full base-vs-generated pipeline: metrics, PCA, pairing,
    /// shift ranking, and all plots.
    Shift {
        #[command(flatten)]
        common: CommonArgs,
        /// Overlay ground threshold (y level); defaults to the world bottom.
        #[arg(long)]
        threshold: Option<i32>,
    },
    /// Render a PC scatter plot per world.
    Era {
        #[command(flatten)]
        common: CommonArgs,
        /// Reuse a fitted model file instead of fitting.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Render an overhead PC-1 overlay per world.
    Overlay {
        #[command(flatten)]
        common: CommonArgs,
        /// Reuse a fitted model file instead of fitting.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Overlay ground threshold (y level); defaults to the world bottom.
        #[arg(long)]
        threshold: Option<i32>,
    },
    /// Write a flat base world plus a toy-structure counterpart.
    GenToy {
        #[command(flatten)]
        common: CommonArgs,
        /// World dimensions as XxYxZ.
        #[arg(long, default_value = "64x32x64")]
        dims: String,
        /// Ground slab height in blocks.
        #[arg(long = "ground-height", default_value_t = 4)]
        ground_height: u32,
        #[arg(long = "ground-material", default_value = "grass")]
        ground_material: String,
        /// Number of structures to place.
        #[arg(long, default_value_t = 4)]
        count: u32,
        #[arg(long = "footprint-min", default_value_t = 5)]
        footprint_min: u32,
        #[arg(long = "footprint-max", default_value_t = 9)]
        footprint_max: u32,
        #[arg(long = "wall-min", default_value_t = 3)]
        wall_min: u32,
        #[arg(long = "wall-max", default_value_t = 5)]
        wall_max: u32,
        /// Wall material.
        #[arg(long, default_value = "planks")]
        material: String,
    },
    /// Fit the PCA model once and write it for later runs.
    PcaFit {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of components to keep.
        #[arg(long, default_value_t = 2)]
        components: usize,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Isovists { common, dump_sets } => {
            pipeline::cmd_isovists(&common.resolve()?, dump_sets)
        }
        Command::Shift { common, threshold } => pipeline::cmd_shift(&common.resolve()?, threshold),
        Command::Era { common, model } => pipeline::cmd_era(&common.resolve()?, model.as_ref()),
        Command::Overlay {
            common,
            model,
            threshold,
        } => pipeline::cmd_overlay(&common.resolve()?, model.as_ref(), threshold),
        Command::GenToy {
            common,
            dims,
            ground_height,
            ground_material,
            count,
            footprint_min,
            footprint_max,
            wall_min,
            wall_max,
            material,
        } => {
            let cfg = common.resolve()?;
            let args = pipeline::GenToyArgs {
                dims: pipeline::parse_dims(&dims)?,
                ground_height,
                ground_material,
                count,
                footprint: (footprint_min, footprint_max),
                wall_height: (wall_min, wall_max),
                material,
            };
            pipeline::cmd_gen_toy(&cfg, &args)
        }
        Command::PcaFit { common, components } => {
            pipeline::cmd_pca_fit(&common.resolve()?, components)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("voxshift: {e}");
            ExitCode::FAILURE
        }
    }
}
