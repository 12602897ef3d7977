mod common;

use common::table_strategy;
use gda_core::factor::fit_ca;
use gda_core::factor::PointSet;
use gda_core::hcluster::{ward_cluster, PointCloud};
use gda_core::io::csvfmt::{read_table_csv, write_table_csv};
use gda_core::io::{render_factor_plane, ModelArchive, NamedDendrogram, PlotSpec, TableProvenance};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn archive_round_trip_is_bit_stable(t in table_strategy(10, 10, 20)) {
        let m = fit_ca(&t).unwrap();
        let mut a = ModelArchive::new(&m, TableProvenance { source_files: vec!["t.csv".into()], filter_log_digest: None });
        let d = ward_cluster(&PointCloud::from_model(&m, PointSet::Rows, None).unwrap()).unwrap();
        a.put_dendrogram(NamedDendrogram { name: "rows-ward".into(), entities: PointSet::Rows, dendrogram: d });
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.json");
        a.save(&path).unwrap();
        let b = ModelArchive::load(&path).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(b.factor_model().unwrap(), m);
        prop_assert_eq!(std::fs::read_to_string(&path).unwrap(), b.to_json().unwrap());
    }

    #[test]
    fn table_csv_reads_back_exactly(t in table_strategy(8, 8, 20)) {
        let scaled = gda_core::table::ContingencyTable::new(
            t.row_labels().to_vec(),
            t.col_labels().to_vec(),
            t.counts() / 7.0,
        ).unwrap();
        let text = write_table_csv(&scaled).unwrap();
        prop_assert_eq!(read_table_csv(text.as_bytes(), "t.csv").unwrap(), scaled);
    }

    #[test]
    fn plane_rendering_depends_only_on_inputs(t in table_strategy(8, 8, 20)) {
        let m = fit_ca(&t).unwrap();
        prop_assume!(m.n_factors() >= 2);
        let spec = PlotSpec::default();
        let first = render_factor_plane(&m, &spec).unwrap();
        let refit = fit_ca(&t).unwrap();
        prop_assert_eq!(first, render_factor_plane(&refit, &spec).unwrap());
    }
}
