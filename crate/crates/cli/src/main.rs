mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gda_core::GdaError;

/// Correspondence analysis, MCA, Ward clustering and text pipelines.
///
/// Exit status: 0 on success, 2 on input errors, 3 when the data are
/// numerically degenerate (no factors, empty table).
#[derive(Parser)]
#[command(name = "gda", version, about)]
struct Cli {
    /// Worker threads for tokenization (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit CA on a table CSV or MCA on a categorical CSV and write an archive.
    Fit(FitArgs),
    /// Turn a text corpus into a segments x terms table CSV.
    Textpipe(TextpipeArgs),
    /// Project supplementary rows or columns into a fitted model.
    Project(ProjectArgs),
    /// Ward clustering of row or column points.
    Cluster(ClusterArgs),
    /// Distances between tracked terms and every segment.
    Trajectory(TrajectoryArgs),
    /// Distances between group initiators and group centres of gravity.
    Impact(ImpactArgs),
    /// Render a factor plane as SVG.
    Plot(PlotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum InputKind {
    Table,
    Categorical,
}

#[derive(Clone, Copy, ValueEnum)]
enum Missing {
    /// Missing answers form their own category.
    Category,
    /// Individuals with a missing answer are removed.
    Drop,
}

#[derive(Args)]
struct FitArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value = "table")]
    format: InputKind,
    /// Archive to write.
    #[arg(short, long)]
    out: PathBuf,
    /// Drop all-zero rows and columns instead of failing.
    #[arg(long)]
    lenient: bool,
    /// Also report Benzecri-corrected eigenvalues (categorical input).
    #[arg(long)]
    benzecri: bool,
    #[arg(long, value_enum, default_value = "category")]
    missing: Missing,
    /// Fuse categories seen fewer times than this into "other".
    #[arg(long)]
    rare_threshold: Option<usize>,
    /// Filter log written by `textpipe`, recorded by digest.
    #[arg(long)]
    filter_log: Option<PathBuf>,
}

#[derive(Args)]
struct TextpipeArgs {
    /// Directory of text files, a single text file, or a tweet CSV.
    input: PathBuf,
    /// Table CSV to write.
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1000)]
    min_occurrences: usize,
    /// Stopword languages, comma separated (en, fr, es).
    #[arg(long, value_delimiter = ',')]
    stopwords: Vec<String>,
    /// Stopword classes to apply (prepositions, verb-parts, abbreviations).
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "prepositions,verb-parts,abbreviations"
    )]
    stopword_classes: Vec<String>,
    /// Extra stopwords, one per line.
    #[arg(long)]
    stopword_file: Option<PathBuf>,
    /// 0/1 cells instead of counts.
    #[arg(long)]
    presence: bool,
    /// `file`, `marker:TEXT` or `day`.
    #[arg(long, default_value = "file")]
    segment_by: String,
    /// Keep segments (or days) without retained terms as zero rows.
    #[arg(long)]
    keep_empty: bool,
    /// Keep text before the first marker as its own segment.
    #[arg(long)]
    include_preamble: bool,
    /// Allowed Unicode scripts, comma separated (e.g. Latin). Default: all.
    #[arg(long, value_delimiter = ',')]
    scripts: Vec<String>,
    #[arg(long)]
    no_lowercase: bool,
    /// Where to write the JSON log of dropped terms.
    #[arg(long)]
    filter_log: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Entities {
    Rows,
    Cols,
}

#[derive(Args)]
struct ProjectArgs {
    archive: PathBuf,
    /// Table CSV. For rows: supplementary rows over the model's columns.
    /// For cols: supplementary columns over the model's rows.
    input: PathBuf,
    #[arg(long, value_enum)]
    kind: Entities,
    /// Coordinates CSV to write.
    #[arg(short, long)]
    out: PathBuf,
    /// Fraction of the RMS principal distance below which a point is near the origin.
    #[arg(long, default_value_t = 0.1)]
    proximity: f64,
    /// Also store the projection in the archive.
    #[arg(long)]
    store: bool,
}

#[derive(Args)]
struct ClusterArgs {
    archive: PathBuf,
    #[arg(long, value_enum, default_value = "rows")]
    entities: Entities,
    /// Only merge neighbours in model order.
    #[arg(long)]
    constrained: bool,
    /// Number of leading factors to cluster on (default: all).
    #[arg(long)]
    axes: Option<usize>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    newick: Option<PathBuf>,
    /// Print this many change points (constrained only).
    #[arg(long, default_value_t = 5)]
    change_points: usize,
}

#[derive(Args)]
struct TrajectoryArgs {
    archive: PathBuf,
    /// Terms to track, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    track: Vec<String>,
    /// Trailing moving-average window.
    #[arg(long)]
    moving_average: Option<usize>,
    /// CSV with one row per segment and one column per term.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ImpactArgs {
    archive: PathBuf,
    /// CSV with header `group,member`.
    #[arg(long)]
    groups: PathBuf,
    /// CSV with header `group,initiator`.
    #[arg(long)]
    initiators: PathBuf,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    archive: PathBuf,
    #[arg(short, long)]
    out: PathBuf,
    /// Axis pair, 1-based.
    #[arg(long, default_value = "1,2")]
    plane: String,
    /// Label only the m highest contributors to the plane in each shown set.
    #[arg(long)]
    top_contributors: Option<usize>,
    /// Row labels: all, none (dots), top:M, or hide.
    #[arg(long, default_value = "all")]
    rows: String,
    /// Column labels: all, none (dots), top:M, or hide.
    #[arg(long, default_value = "all")]
    cols: String,
    /// Labels to annotate whatever the label policy.
    #[arg(long, value_delimiter = ',')]
    annotate: Vec<String>,
    /// Draw stored supplementary points.
    #[arg(long)]
    supplementary: bool,
    /// Draw stored impacts as initiator-to-centroid arrows.
    #[arg(long)]
    impacts: bool,
    #[arg(long)]
    title: Option<String>,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let numerical = err
        .chain()
        .filter_map(|e| e.downcast_ref::<GdaError>())
        .any(GdaError::is_numerical);
    if numerical {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Fit(a) => commands::fit(a),
        Command::Textpipe(a) => commands::textpipe(a),
        Command::Project(a) => commands::project(a),
        Command::Cluster(a) => commands::cluster(a),
        Command::Trajectory(a) => commands::trajectory(a),
        Command::Impact(a) => commands::impact(a),
        Command::Plot(a) => commands::plot(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if matches!(
                e.downcast_ref::<GdaError>(),
                Some(GdaError::NotEnoughFactors(_))
            ) {
                eprintln!(
                    "hint: with a single factor, plot the coordinates as a 1-D strip instead"
                );
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
