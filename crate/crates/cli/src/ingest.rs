use std::path::PathBuf;

use clap::Args;
use hypertv::ingest::{
    hypergraph_from_table, read_table, write_hgr, Binning, ColumnKind, TableSchema, DEFAULT_BINS,
};
use serde_json::{json, Map};

use crate::output::{document, emit, manifest};
use crate::{CliError, Shared};

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// CSV table with a header row.
    pub csv: PathBuf,
    /// Output hypergraph file.
    #[arg(long)]
    pub hgr: PathBuf,
    /// Categorical columns. When given, unlisted columns are ignored;
    /// otherwise every unlisted column is categorical.
    #[arg(long, value_delimiter = ',')]
    pub categorical: Option<Vec<String>>,
    /// Numeric columns, binned before grouping.
    #[arg(long, value_delimiter = ',')]
    pub numeric: Vec<String>,
    /// Label column, kept out of the hypergraph.
    #[arg(long)]
    pub label: Option<String>,
    /// Columns left out entirely.
    #[arg(long, value_delimiter = ',')]
    pub ignore: Vec<String>,
    /// Bins per numeric column.
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    /// Bin numeric columns by rank instead of equal width.
    #[arg(long)]
    pub equal_frequency: bool,
    /// Drop hyperedges with a single vertex.
    #[arg(long)]
    pub drop_singletons: bool,
    /// Write the label column as `vertex_id,class` here.
    #[arg(long)]
    pub labels_out: Option<PathBuf>,
}

fn build_schema(header: &[String], a: &IngestArgs) -> Result<TableSchema, CliError> {
    let mut schema = TableSchema::categorical(header);
    if let Some(cats) = &a.categorical {
        for c in &mut schema.columns {
            c.kind = ColumnKind::Ignore;
        }
        for name in cats {
            schema.set_kind(name, ColumnKind::Categorical)?;
        }
    }
    for name in &a.numeric {
        schema.set_kind(name, ColumnKind::Numeric { bins: a.bins })?;
    }
    if let Some(name) = &a.label {
        schema.set_kind(name, ColumnKind::Label)?;
    }
    for name in &a.ignore {
        schema.set_kind(name, ColumnKind::Ignore)?;
    }
    if a.equal_frequency {
        schema.binning = Binning::EqualFrequency;
    }
    schema.validate()?;
    Ok(schema)
}

pub fn run(a: &IngestArgs, shared: &Shared) -> Result<(), CliError> {
    let (header, rows) = read_table(&a.csv).map_err(|e| CliError::io(&a.csv, e))?;
    let schema = build_schema(&header, a)?;
    let (h, labels, report) = hypergraph_from_table(&rows, &schema, a.drop_singletons)?;
    write_hgr(&h, &a.hgr).map_err(|e| CliError::io(&a.hgr, e))?;
    if let Some(path) = &a.labels_out {
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
        let names = labels.class_names();
        let write = |w: &mut csv::Writer<std::fs::File>| -> csv::Result<()> {
            w.write_record(["vertex_id", "class"])?;
            for &(v, c) in labels.pairs() {
                w.write_record([v.to_string(), names[c].clone()])?;
            }
            w.flush()?;
            Ok(())
        };
        write(&mut w).map_err(|e| CliError::io(path, e))?;
    }
    let config = json!({
        "hgr": a.hgr.display().to_string(),
        "schema": schema,
        "drop_singletons": a.drop_singletons,
    });
    let mut body = Map::new();
    body.insert("report".into(), json!(report));
    body.insert("n_labelled".into(), json!(labels.len()));
    body.insert("classes".into(), json!(labels.class_names()));
    let doc = document(manifest("ingest", config, shared.seed, &[&a.csv])?, body);
    emit(&doc, shared.out.as_deref())
}
