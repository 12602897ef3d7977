//! Deterministic SVG output for factor planes and dendrograms.
//!
//! Output depends only on the inputs: coordinates are printed with a fixed
//! number of decimals and elements are emitted in model order.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::error::{GdaError, Result};
use crate::factor::{
    inertia_report, top_contributors, FactorModel, PointSet, SupplementaryProjection,
};
use crate::hcluster::Dendrogram;

pub const CANVAS: f64 = 1000.0;
pub const MARGIN: f64 = 60.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelPolicy {
    All,
    /// Label only the `m` highest contributors to the plane.
    Top(usize),
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arrow {
    pub from_label: String,
    pub from: Vec<f64>,
    pub to_label: String,
    pub to: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    /// 1-based factor numbers for the horizontal and vertical axes.
    pub plane: (usize, usize),
    /// `None` hides the layer.
    pub rows: Option<LabelPolicy>,
    pub cols: Option<LabelPolicy>,
    pub supplementary: Vec<SupplementaryProjection>,
    pub arrows: Vec<Arrow>,
    /// Points labelled regardless of policy.
    pub annotate: Vec<String>,
    pub title: Option<String>,
}

impl Default for PlotSpec {
    fn default() -> Self {
        Self {
            plane: (1, 2),
            rows: Some(LabelPolicy::All),
            cols: Some(LabelPolicy::None),
            supplementary: Vec::new(),
            arrows: Vec::new(),
            annotate: Vec::new(),
            title: None,
        }
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

struct Frame {
    cx: f64,
    cy: f64,
    scale: f64,
}

impl Frame {
    /// Same scale on both axes so distances in the plane are not distorted.
    fn fit(points: &[(f64, f64)]) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for &(x, y) in points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        let span = (x1 - x0).max(y1 - y0);
        let span = if span > 0.0 { span } else { 1.0 };
        Self {
            cx: (x0 + x1) / 2.0,
            cy: (y0 + y1) / 2.0,
            scale: (CANVAS - 2.0 * MARGIN) / span,
        }
    }

    fn x(&self, x: f64) -> f64 {
        CANVAS / 2.0 + (x - self.cx) * self.scale
    }

    fn y(&self, y: f64) -> f64 {
        CANVAS / 2.0 - (y - self.cy) * self.scale
    }
}

fn labelled_set(
    model: &FactorModel,
    set: PointSet,
    policy: &LabelPolicy,
    plane: (usize, usize),
) -> Result<BTreeSet<usize>> {
    Ok(match policy {
        LabelPolicy::All => (0..model.labels(set).len()).collect(),
        LabelPolicy::None => BTreeSet::new(),
        LabelPolicy::Top(m) => top_contributors(model, set, &[plane.0, plane.1], *m)?
            .into_iter()
            .map(|c| c.index)
            .collect(),
    })
}

fn header(out: &mut String) {
    let size = CANVAS as u32;
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}" font-family="sans-serif">"#
    )
    .unwrap();
    out.push_str(
        "<style>.dot{fill:#555}.row{fill:#1f5fbf}.col{fill:#c0392b}.sup{fill:#2e8b57}.arrow{stroke:#333;stroke-width:1.5}.axis{stroke:#999;stroke-dasharray:4 4}.bracket{fill:none;stroke:#222;stroke-width:1.2}text{font-size:12px}</style>\n",
    );
    out.push_str(r##"<defs><marker id="head" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="8" markerHeight="8" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#333"/></marker></defs>"##);
    out.push('\n');
    writeln!(
        out,
        r#"<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>"#
    )
    .unwrap();
}

fn point(out: &mut String, class: &str, x: f64, y: f64, label: Option<&str>) {
    match label {
        Some(l) => {
            writeln!(
                out,
                r#"<circle class="{class}" cx="{}" cy="{}" r="4"/>"#,
                num(x),
                num(y)
            )
            .unwrap();
            writeln!(
                out,
                r#"<text class="{class}" x="{}" y="{}">{}</text>"#,
                num(x + 6.0),
                num(y - 6.0),
                escape(l)
            )
            .unwrap();
        }
        None => {
            writeln!(
                out,
                r#"<circle class="dot" cx="{}" cy="{}" r="1.5"/>"#,
                num(x),
                num(y)
            )
            .unwrap();
        }
    }
}

/// Scatter plot of one factor plane.
pub fn render_factor_plane(model: &FactorModel, spec: &PlotSpec) -> Result<String> {
    let k = model.n_factors();
    if k < 2 {
        return Err(GdaError::NotEnoughFactors(k));
    }
    let (a1, a2) = spec.plane;
    for a in [a1, a2] {
        if a == 0 || a > k {
            return Err(GdaError::AxisOutOfRange {
                axis: a,
                available: k,
            });
        }
    }
    if a1 == a2 {
        return Err(GdaError::InvalidArgument(
            "plane needs two distinct axes".into(),
        ));
    }
    let (i1, i2) = (a1 - 1, a2 - 1);
    for s in &spec.supplementary {
        if s.coords.iter().any(|p| p.len() != k) {
            return Err(GdaError::Shape(
                "supplementary coordinates do not match the model's factors".into(),
            ));
        }
    }

    let mut pts = Vec::new();
    let layers = [
        (PointSet::Rows, &spec.rows),
        (PointSet::Columns, &spec.cols),
    ];
    for (set, policy) in layers {
        if policy.is_some() {
            let c = model.coords(set);
            pts.extend((0..c.nrows()).map(|i| (c[(i, i1)], c[(i, i2)])));
        }
    }
    for s in &spec.supplementary {
        pts.extend(s.coords.iter().map(|p| (p[i1], p[i2])));
    }
    for a in &spec.arrows {
        pts.push((a.from[i1], a.from[i2]));
        pts.push((a.to[i1], a.to[i2]));
    }
    let frame = Frame::fit(&pts);
    let annotate: BTreeSet<&str> = spec.annotate.iter().map(String::as_str).collect();

    let mut out = String::new();
    header(&mut out);
    if let Some(t) = &spec.title {
        writeln!(
            out,
            r#"<text x="{}" y="30" font-size="16">{}</text>"#,
            num(MARGIN),
            escape(t)
        )
        .unwrap();
    }

    let report = inertia_report(model);
    let (ox, oy) = (frame.x(0.0), frame.y(0.0));
    out.push_str("<g id=\"axes\">\n");
    writeln!(
        out,
        r#"<line class="axis" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
        num(MARGIN / 2.0),
        num(oy),
        num(CANVAS - MARGIN / 2.0),
        num(oy)
    )
    .unwrap();
    writeln!(
        out,
        r#"<line class="axis" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
        num(ox),
        num(MARGIN / 2.0),
        num(ox),
        num(CANVAS - MARGIN / 2.0)
    )
    .unwrap();
    writeln!(
        out,
        r#"<text class="axis-label" x="{}" y="{}" text-anchor="end">Dim {a1} ({}%)</text>"#,
        num(CANVAS - MARGIN / 2.0),
        num(oy - 8.0),
        num(report[i1].percent)
    )
    .unwrap();
    writeln!(
        out,
        r#"<text class="axis-label" x="{}" y="{}">Dim {a2} ({}%)</text>"#,
        num(ox + 8.0),
        num(MARGIN / 2.0 + 12.0),
        num(report[i2].percent)
    )
    .unwrap();
    out.push_str("</g>\n");

    for (set, policy) in layers {
        let Some(policy) = policy else { continue };
        let (id, class) = match set {
            PointSet::Rows => ("rows", "row"),
            PointSet::Columns => ("columns", "col"),
        };
        let labelled = labelled_set(model, set, policy, spec.plane)?;
        let c = model.coords(set);
        writeln!(out, r#"<g id="{id}">"#).unwrap();
        for (i, label) in model.labels(set).iter().enumerate() {
            let show = labelled.contains(&i) || annotate.contains(label.as_str());
            point(
                &mut out,
                class,
                frame.x(c[(i, i1)]),
                frame.y(c[(i, i2)]),
                show.then_some(label.as_str()),
            );
        }
        out.push_str("</g>\n");
    }

    if !spec.supplementary.is_empty() {
        out.push_str("<g id=\"supplementary\">\n");
        for s in &spec.supplementary {
            for (label, p) in s.labels.iter().zip(&s.coords) {
                point(&mut out, "sup", frame.x(p[i1]), frame.y(p[i2]), Some(label));
            }
        }
        out.push_str("</g>\n");
    }

    if !spec.arrows.is_empty() {
        out.push_str("<g id=\"arrows\">\n");
        for a in &spec.arrows {
            let (x1, y1, x2, y2) = (
                frame.x(a.from[i1]),
                frame.y(a.from[i2]),
                frame.x(a.to[i1]),
                frame.y(a.to[i2]),
            );
            writeln!(
                out,
                r#"<line class="arrow" x1="{}" y1="{}" x2="{}" y2="{}" marker-end="url(#head)"/>"#,
                num(x1),
                num(y1),
                num(x2),
                num(y2)
            )
            .unwrap();
            point(&mut out, "row", x1, y1, Some(&a.from_label));
            point(&mut out, "col", x2, y2, Some(&a.to_label));
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

const LABEL_BAND: f64 = 140.0;

/// Dendrogram drawn top-down with leaves in tree order and merge levels to scale.
pub fn render_dendrogram(dend: &Dendrogram) -> String {
    let p = dend.n_leaves();
    let levels = dend.levels();
    let top = levels.last().copied().unwrap_or(0.0);
    let base = CANVAS - MARGIN - LABEL_BAND;
    let y_of = |h: f64| {
        if top > 0.0 {
            base - h / top * (base - MARGIN)
        } else {
            base
        }
    };
    let left = MARGIN + 50.0;
    let step = (CANVAS - MARGIN - left) / p as f64;

    let mut x = vec![0.0; 2 * p - 1];
    let mut y = vec![base; 2 * p - 1];
    for (k, &leaf) in dend.leaf_order().iter().enumerate() {
        x[leaf] = left + step * (k as f64 + 0.5);
    }

    let mut out = String::new();
    header(&mut out);
    out.push_str("<g id=\"scale\">\n");
    writeln!(
        out,
        r#"<line class="axis" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
        num(left - 10.0),
        num(MARGIN),
        num(left - 10.0),
        num(base)
    )
    .unwrap();
    for t in 0..=4 {
        let h = top * t as f64 / 4.0;
        writeln!(
            out,
            r#"<text class="tick" x="{}" y="{}" text-anchor="end">{:.3}</text>"#,
            num(left - 14.0),
            num(y_of(h) + 4.0),
            h
        )
        .unwrap();
    }
    out.push_str("</g>\n<g id=\"brackets\">\n");
    for (t, m) in dend.merges().iter().enumerate() {
        let node = p + t;
        let h = y_of(levels[t]);
        x[node] = (x[m.left] + x[m.right]) / 2.0;
        y[node] = h;
        writeln!(
            out,
            r#"<path class="bracket" data-level="{:.6e}" d="M{},{} V{} H{} V{}"/>"#,
            levels[t],
            num(x[m.left]),
            num(y[m.left]),
            num(h),
            num(x[m.right]),
            num(y[m.right])
        )
        .unwrap();
    }
    out.push_str("</g>\n<g id=\"leaves\">\n");
    for &leaf in &dend.leaf_order() {
        let (lx, ly) = (x[leaf], base + 10.0);
        writeln!(
            out,
            r#"<text class="leaf" x="{}" y="{}" transform="rotate(60 {} {})">{}</text>"#,
            num(lx),
            num(ly),
            num(lx),
            num(ly),
            escape(&dend.labels()[leaf])
        )
        .unwrap();
    }
    out.push_str("</g>\n</svg>\n");
    out
}
