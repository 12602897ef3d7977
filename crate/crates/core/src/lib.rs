//! Geometric data analysis: correspondence analysis, multiple correspondence
//! analysis, Ward clustering and text-to-table pipelines.

pub mod error;
pub mod factor;
pub mod hcluster;
pub mod io;
pub mod mca;
pub mod narrative;
pub mod table;
pub mod textpipe;

pub use error::{GdaError, Result};
pub use table::ContingencyTable;
