//! Reading inputs and writing results: CSV, JSON archives, SVG and Newick.

pub mod archive;
pub mod csvfmt;
pub mod newick;
pub mod svg;

pub use archive::{
    filter_log_digest, ModelArchive, NamedDendrogram, TableProvenance, ARCHIVE_VERSION,
};
pub use csvfmt::{
    format_number, load_table, read_labelled_matrix, read_pairs_csv, write_atomic,
    write_labelled_matrix, InputFormat, Loaded,
};
pub use newick::to_newick;
pub use svg::{render_dendrogram, render_factor_plane, Arrow, LabelPolicy, PlotSpec};
