use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use gda_core::error::GdaError;
use gda_core::factor::{
    fit_ca_with, inertia_report, project_supplementary, top_contributors, FactorModel, FitOptions,
    PointSet, ProximityConfig, SupplementaryKind,
};
use gda_core::hcluster::{change_points, constrained_cluster, ward_cluster, PointCloud};
use gda_core::io::{
    filter_log_digest, format_number, load_table, read_labelled_matrix, read_pairs_csv,
    render_dendrogram, render_factor_plane, to_newick, write_atomic, write_labelled_matrix, Arrow,
    InputFormat, LabelPolicy, Loaded, ModelArchive, NamedDendrogram, PlotSpec, TableProvenance,
};
use gda_core::mca::{fit_mca_with, McaOptions, MissingPolicy};
use gda_core::narrative::{
    impact as group_impact, rank_by_distance, trajectory_with, TrajectoryOptions,
};
use gda_core::textpipe::{
    apply_filter, crosstab, segment_by, CellMode, CrosstabOptions, FilterPolicy, FilterRecord,
    Language, RawCorpus, ScriptFilter, SegmentStrategy, SegmentedCorpus, Stoplist, StopwordClass,
};

use crate::{
    ClusterArgs, Entities, FitArgs, ImpactArgs, InputKind, Missing, PlotArgs, ProjectArgs,
    TextpipeArgs, TrajectoryArgs,
};

fn read_utf8(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    String::from_utf8(bytes).map_err(|e| {
        anyhow::Error::new(GdaError::Encoding {
            offset: e.utf8_error().valid_up_to(),
        })
        .context(format!("reading {}", path.display()))
    })
}

fn set_of(e: Entities) -> PointSet {
    match e {
        Entities::Rows => PointSet::Rows,
        Entities::Cols => PointSet::Columns,
    }
}

/// Report lines go to stdout; a closed pipe is not an error.
fn emit(lines: &[String]) {
    let mut out = std::io::stdout().lock();
    for l in lines {
        if writeln!(out, "{l}").is_err() {
            return;
        }
    }
}

fn inertia_lines(model: &FactorModel) -> Vec<String> {
    let mut v = vec!["axis\tinertia\tpercent\tcumulative".to_string()];
    for a in inertia_report(model) {
        v.push(format!(
            "{}\t{:.6}\t{:.2}\t{:.2}",
            a.axis, a.inertia, a.percent, a.cumulative_percent
        ));
    }
    v
}

fn load_archive(path: &Path) -> Result<ModelArchive> {
    ModelArchive::load(path).with_context(|| format!("loading archive {}", path.display()))
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).with_context(|| format!("opening {}", path.display()))
}

pub fn fit(a: FitArgs) -> Result<()> {
    let mut provenance = TableProvenance {
        source_files: vec![a.input.display().to_string()],
        filter_log_digest: None,
    };
    if let Some(p) = &a.filter_log {
        let log: Vec<FilterRecord> = serde_json::from_str(&read_utf8(p)?)
            .with_context(|| format!("parsing filter log {}", p.display()))?;
        provenance.filter_log_digest = Some(filter_log_digest(&log));
        provenance.source_files.push(p.display().to_string());
    }
    let mut report = Vec::new();
    let archive = match a.format {
        InputKind::Table => {
            let Loaded::Table(t) = load_table(&a.input, InputFormat::TableCsv)
                .with_context(|| format!("reading {}", a.input.display()))?
            else {
                unreachable!()
            };
            let model = fit_ca_with(&t, FitOptions { lenient: a.lenient })?;
            for d in model.dropped() {
                eprintln!("dropped all-zero {:?} line {:?}", d.set, d.label);
            }
            ModelArchive::new(&model, provenance)
        }
        InputKind::Categorical => {
            let Loaded::Categorical(ds) = load_table(&a.input, InputFormat::CategoricalCsv)
                .with_context(|| format!("reading {}", a.input.display()))?
            else {
                unreachable!()
            };
            let opts = McaOptions {
                missing: match a.missing {
                    Missing::Category => MissingPolicy::ExplicitCategory,
                    Missing::Drop => MissingPolicy::DropIndividual,
                },
                rare_threshold: a.rare_threshold,
                benzecri: a.benzecri,
            };
            let res = fit_mca_with(&ds, opts)?;
            if let Some(b) = &res.benzecri {
                let kept: Vec<String> = b
                    .iter()
                    .filter(|&&v| v > 0.0)
                    .map(|v| format!("{v:.6}"))
                    .collect();
                report.push(format!("benzecri-corrected\t{}", kept.join("\t")));
            }
            ModelArchive::from_mca(&res, provenance)
        }
    };
    archive.save(&a.out)?;
    let mut lines = inertia_lines(&archive.factor_model()?);
    lines.extend(report);
    emit(&lines);
    Ok(())
}

fn parse_strategy(s: &str, keep_empty: bool, include_preamble: bool) -> Result<SegmentStrategy> {
    Ok(match s {
        "file" => SegmentStrategy::PerFile,
        "day" => SegmentStrategy::PerDay {
            keep_empty_days: keep_empty,
        },
        _ => match s.strip_prefix("marker:") {
            Some(m) if !m.is_empty() => SegmentStrategy::PerMarker {
                marker: m.to_string(),
                include_preamble,
            },
            _ => bail!(GdaError::InvalidArgument(format!(
                "--segment-by expects file, marker:TEXT or day, got {s:?}"
            ))),
        },
    })
}

fn read_corpus(path: &Path, strategy: &SegmentStrategy) -> Result<RawCorpus> {
    if let SegmentStrategy::PerDay { .. } = strategy {
        let Loaded::Tweets(records) = load_table(path, InputFormat::TweetCsv)
            .with_context(|| format!("reading {}", path.display()))?
        else {
            unreachable!()
        };
        return Ok(RawCorpus::Records(records));
    }
    if path.is_dir() {
        let mut files = Vec::new();
        for entry in fs::read_dir(path).with_context(|| format!("listing {}", path.display()))? {
            let p = entry?.path();
            if p.is_file() {
                let name = p
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default();
                files.push((name, read_utf8(&p)?));
            }
        }
        return Ok(RawCorpus::Files(files));
    }
    let text = read_utf8(path)?;
    Ok(match strategy {
        SegmentStrategy::PerFile => {
            let name = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            RawCorpus::Files(vec![(name, text)])
        }
        _ => RawCorpus::Text(text),
    })
}

pub fn textpipe(a: TextpipeArgs) -> Result<()> {
    let strategy = parse_strategy(&a.segment_by, a.keep_empty, a.include_preamble)?;
    let languages = a
        .stopwords
        .iter()
        .map(|s| s.parse::<Language>())
        .collect::<std::result::Result<BTreeSet<_>, _>>()?;
    let classes = a
        .stopword_classes
        .iter()
        .map(|s| s.parse::<StopwordClass>())
        .collect::<std::result::Result<BTreeSet<_>, _>>()?;
    let mut stoplist = Stoplist::shipped(&languages, &classes);
    if let Some(p) = &a.stopword_file {
        stoplist.extend_custom(read_utf8(p)?.lines());
    }
    let policy = FilterPolicy {
        min_occurrences: a.min_occurrences,
        stoplist,
        scripts: if a.scripts.is_empty() {
            ScriptFilter::any()
        } else {
            ScriptFilter::only(a.scripts.iter().map(String::as_str))
        },
        lowercase: !a.no_lowercase,
    };

    let raw = read_corpus(&a.input, &strategy)?;
    let segments = segment_by(&raw, &strategy)?;
    let corpus = apply_filter(&SegmentedCorpus::build(&segments, &policy)?, &policy);
    let opts = CrosstabOptions {
        mode: if a.presence {
            CellMode::Presence
        } else {
            CellMode::Frequency
        },
        keep_empty_segments: a.keep_empty,
    };
    let ct = crosstab(&corpus, opts)?;
    write_atomic(
        &a.out,
        gda_core::io::csvfmt::write_table_csv(&ct.table)?.as_bytes(),
    )?;
    if let Some(p) = &a.filter_log {
        let mut json = serde_json::to_string_pretty(corpus.filter_log())?;
        json.push('\n');
        write_atomic(p, json.as_bytes())?;
    }
    eprintln!(
        "{} segments ({} without retained terms), {} terms retained, {} dropped",
        ct.table.nrows(),
        ct.empty_segments.len(),
        ct.table.ncols(),
        corpus.filter_log().len()
    );
    Ok(())
}

pub fn project(a: ProjectArgs) -> Result<()> {
    let mut archive = load_archive(&a.archive)?;
    let model = archive.factor_model()?;
    let name = a.input.display().to_string();
    let (rows, cols, cells) = read_labelled_matrix(open(&a.input)?, &name)?;
    let kind = match a.kind {
        Entities::Rows => SupplementaryKind::SupplementaryRow,
        Entities::Cols => SupplementaryKind::SupplementaryColumn,
    };
    // Align the profiles to the model's own label order.
    let (labels, profiles): (Vec<String>, Vec<Vec<f64>>) = match kind {
        SupplementaryKind::SupplementaryRow => {
            let idx = model
                .col_labels()
                .iter()
                .map(|l| {
                    cols.iter()
                        .position(|c| c == l)
                        .ok_or_else(|| missing_label(&name, "column", l))
                })
                .collect::<Result<Vec<_>>>()?;
            let profiles = cells
                .iter()
                .map(|r| idx.iter().map(|&j| r[j]).collect())
                .collect();
            (rows, profiles)
        }
        SupplementaryKind::SupplementaryColumn => {
            let idx = model
                .row_labels()
                .iter()
                .map(|l| {
                    rows.iter()
                        .position(|r| r == l)
                        .ok_or_else(|| missing_label(&name, "row", l))
                })
                .collect::<Result<Vec<_>>>()?;
            let profiles = (0..cols.len())
                .map(|j| idx.iter().map(|&i| cells[i][j]).collect())
                .collect();
            (cols, profiles)
        }
    };
    let proj = project_supplementary(&model, &labels, &profiles, kind)?;
    let cfg = ProximityConfig {
        fraction: a.proximity,
    };
    let near = proj.near_origin(&model, cfg);
    let dist = proj.distances_from_origin();
    let mut header: Vec<String> = (1..=model.n_factors()).map(|k| format!("dim{k}")).collect();
    header.push("origin_distance".into());
    header.push("near_origin".into());
    let out_rows: Vec<(String, Vec<f64>)> = proj
        .labels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let mut v = proj.coords[i].clone();
            v.push(dist[i]);
            v.push(if near[i] { 1.0 } else { 0.0 });
            (l.clone(), v)
        })
        .collect();
    write_atomic(
        &a.out,
        write_labelled_matrix("label", &header, &out_rows)?.as_bytes(),
    )?;
    if a.store {
        archive.put_supplementary(proj);
        archive.save(&a.archive)?;
    }
    Ok(())
}

fn missing_label(file: &str, what: &str, label: &str) -> anyhow::Error {
    GdaError::UnknownLabel {
        kind: if what == "row" { "row" } else { "column" },
        label: format!("{label} (not found in {file})"),
    }
    .into()
}

pub fn cluster(a: ClusterArgs) -> Result<()> {
    let mut archive = load_archive(&a.archive)?;
    let model = archive.factor_model()?;
    let set = set_of(a.entities);
    let cloud = PointCloud::from_model(&model, set, a.axes)?;
    let dend = if a.constrained {
        constrained_cluster(&cloud.in_given_order()?)?
    } else {
        ward_cluster(&cloud)?
    };
    let mut lines = Vec::new();
    if a.constrained {
        lines.push("position\tleft\tright\tlevel".to_string());
        for c in change_points(&dend, a.change_points)? {
            lines.push(format!(
                "{}\t{}\t{}\t{:.6}",
                c.position, c.left, c.right, c.height
            ));
        }
    }
    if let Some(p) = &a.svg {
        write_atomic(p, render_dendrogram(&dend).as_bytes())?;
    }
    if let Some(p) = &a.newick {
        write_atomic(p, format!("{}\n", to_newick(&dend)).as_bytes())?;
    }
    let name = format!(
        "{}-{}",
        match a.entities {
            Entities::Rows => "rows",
            Entities::Cols => "cols",
        },
        if a.constrained { "constrained" } else { "ward" }
    );
    archive.put_dendrogram(NamedDendrogram {
        name,
        entities: set,
        dendrogram: dend,
    });
    archive.save(&a.archive)?;
    emit(&lines);
    Ok(())
}

pub fn trajectory(a: TrajectoryArgs) -> Result<()> {
    let mut archive = load_archive(&a.archive)?;
    let model = archive.factor_model()?;
    let supp = archive
        .supplementary
        .iter()
        .find(|s| s.kind == SupplementaryKind::SupplementaryColumn)
        .cloned();
    let opts = TrajectoryOptions {
        moving_average: a.moving_average,
    };
    let mut trajectories = Vec::new();
    for term in &a.track {
        trajectories.push(trajectory_with(&model, term, &[], supp.as_ref(), opts)?);
    }
    if let Some(p) = &a.out {
        let rows: Vec<(String, Vec<f64>)> = model
            .row_labels()
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let v = trajectories
                    .iter()
                    .map(|t| t.smoothed.as_ref().map_or(t.distances[i], |m| m[i]))
                    .collect();
                (s.clone(), v)
            })
            .collect();
        write_atomic(
            p,
            write_labelled_matrix("segment", &a.track, &rows)?.as_bytes(),
        )?;
    }
    for t in trajectories {
        archive.put_trajectory(t);
    }
    archive.save(&a.archive)?;
    Ok(())
}

pub fn impact(a: ImpactArgs) -> Result<()> {
    let mut archive = load_archive(&a.archive)?;
    let model = archive.factor_model()?;
    let gname = a.groups.display().to_string();
    let iname = a.initiators.display().to_string();
    let mut groups: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (g, m) in read_pairs_csv(open(&a.groups)?, &gname, ["group", "member"])? {
        groups.entry(g).or_default().push(m);
    }
    let mut initiators = BTreeMap::new();
    for (g, i) in read_pairs_csv(open(&a.initiators)?, &iname, ["group", "initiator"])? {
        if initiators.insert(g.clone(), i).is_some() {
            bail!(GdaError::InvalidArgument(format!(
                "group {g:?} has more than one initiator"
            )));
        }
    }
    let records = group_impact(&model, &groups, &initiators)?;
    let mut lines = vec!["rank\tgroup\tinitiator\tdistance".to_string()];
    let by_group: BTreeMap<&str, _> = records.iter().map(|r| (r.group.as_str(), r)).collect();
    for (k, g) in rank_by_distance(&records).iter().enumerate() {
        let r = by_group[g.as_str()];
        lines.push(format!(
            "{}\t{}\t{}\t{:.6}",
            k + 1,
            r.group,
            r.initiator,
            r.distance
        ));
    }
    if let Some(p) = &a.out {
        let header: Vec<String> = [
            "distance",
            "mass",
            "members",
            "inertia",
            "initiator_in_group",
        ]
        .map(String::from)
        .to_vec();
        let rows: Vec<(String, Vec<f64>)> = records
            .iter()
            .map(|r| {
                (
                    r.group.clone(),
                    vec![
                        r.distance,
                        r.mass,
                        r.members as f64,
                        r.inertia,
                        if r.initiator_in_group { 1.0 } else { 0.0 },
                    ],
                )
            })
            .collect();
        write_atomic(
            p,
            write_labelled_matrix("group", &header, &rows)?.as_bytes(),
        )?;
    }
    archive.impacts = records;
    archive.save(&a.archive)?;
    emit(&lines);
    Ok(())
}

fn parse_policy(s: &str) -> Result<Option<LabelPolicy>> {
    Ok(match s {
        "all" => Some(LabelPolicy::All),
        "none" => Some(LabelPolicy::None),
        "hide" => None,
        _ => match s.strip_prefix("top:").map(str::parse::<usize>) {
            Some(Ok(m)) => Some(LabelPolicy::Top(m)),
            _ => bail!(GdaError::InvalidArgument(format!(
                "label policy must be all, none, hide or top:M, got {s:?}"
            ))),
        },
    })
}

fn parse_plane(s: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if let [x, y] = parts[..] {
        if let (Ok(x), Ok(y)) = (x.parse(), y.parse()) {
            return Ok((x, y));
        }
    }
    bail!(GdaError::InvalidArgument(format!(
        "--plane expects i,j, got {s:?}"
    )))
}

pub fn plot(a: PlotArgs) -> Result<()> {
    let archive = load_archive(&a.archive)?;
    let model = archive.factor_model()?;
    let plane = parse_plane(&a.plane)?;
    let mut rows = parse_policy(&a.rows)?;
    let mut cols = parse_policy(&a.cols)?;
    let mut lines = Vec::new();
    if let Some(m) = a.top_contributors {
        for (set, policy) in [(PointSet::Rows, &mut rows), (PointSet::Columns, &mut cols)] {
            if policy.is_none() {
                continue;
            }
            *policy = Some(LabelPolicy::Top(m));
            for (k, c) in top_contributors(&model, set, &[plane.0, plane.1], m)?
                .iter()
                .enumerate()
            {
                let name = if set == PointSet::Rows {
                    "rows"
                } else {
                    "cols"
                };
                lines.push(format!(
                    "{name}\t{}\t{}\t{}",
                    k + 1,
                    c.label,
                    format_number(c.contribution)
                ));
            }
        }
    }
    let arrows = if a.impacts {
        archive
            .impacts
            .iter()
            .map(|r| Arrow {
                from_label: r.initiator.clone(),
                from: r.initiator_coords.clone(),
                to_label: format!("C:{}", r.group),
                to: r.centroid.clone(),
            })
            .collect()
    } else {
        Vec::new()
    };
    let spec = PlotSpec {
        plane,
        rows,
        cols,
        supplementary: if a.supplementary {
            archive.supplementary.clone()
        } else {
            Vec::new()
        },
        arrows,
        annotate: a.annotate,
        title: a.title,
    };
    write_atomic(&a.out, render_factor_plane(&model, &spec)?.as_bytes())?;
    emit(&lines);
    Ok(())
}
