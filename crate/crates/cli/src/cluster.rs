use std::path::PathBuf;

use clap::{Args, ValueEnum};
use hypertv::ingest::read_hgr;
use hypertv::learning::{clustering_error, LabelSet};
use hypertv::ratiodca::{
    clique_multiway_normalized_cut, multiway_normalized_cut, recursive_partition, BalanceKind,
    RatioDcaConfig, SplitRule,
};
use serde_json::{json, Map, Value};

use crate::output::{document, emit, manifest, num, nums};
use crate::{CliError, Shared};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Balance {
    Rcut,
    Ncut,
    CheegerR,
    CheegerN,
}

impl Balance {
    fn kind(self) -> BalanceKind {
        match self {
            Balance::Rcut => BalanceKind::RatioCut,
            Balance::Ncut => BalanceKind::NormalizedCut,
            Balance::CheegerR => BalanceKind::CheegerRatio,
            Balance::CheegerN => BalanceKind::CheegerNormalized,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Rule {
    SmallestRatio,
    LargestCluster,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Hypergraph in hMETIS format.
    pub hgr: PathBuf,
    /// Balance function of the ratio being minimized.
    #[arg(long, value_enum, default_value = "ncut")]
    pub balance: Balance,
    /// Number of clusters.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// RatioDCA restarts per split.
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    /// Which cluster to split next.
    #[arg(long, value_enum, default_value = "smallest-ratio")]
    pub split_rule: Rule,
    /// Outer RatioDCA iterations per restart.
    #[arg(long, default_value_t = 100)]
    pub max_outer: usize,
    /// Ground-truth `vertex_id,class` CSV for the majority-vote error.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

pub fn run(a: &ClusterArgs, shared: &Shared) -> Result<(), CliError> {
    let h = read_hgr(&a.hgr).map_err(|e| CliError::io(&a.hgr, e))?;
    let mut cfg = RatioDcaConfig {
        restarts: a.restarts,
        seed: shared.seed,
        threads: shared.threads,
        max_outer: a.max_outer,
        ..RatioDcaConfig::default()
    };
    cfg.inner.epsilon = shared.epsilon;
    let rule = match a.split_rule {
        Rule::SmallestRatio => SplitRule::SmallestRatio,
        Rule::LargestCluster => SplitRule::LargestCluster,
    };
    let clustering = recursive_partition(&h, a.balance.kind(), a.k, &cfg, rule)?;
    let labels = &clustering.labels;

    let mut body = Map::new();
    body.insert("labels".into(), json!(labels));
    body.insert("hypergraph_ncut".into(), num(multiway_normalized_cut(&h, labels)?));
    body.insert("clique_ncut".into(), num(clique_multiway_normalized_cut(&h, labels)?));
    let splits: Vec<Value> = clustering
        .splits
        .iter()
        .map(|s| {
            json!({
                "cluster": s.cluster,
                "size": s.size,
                "value": num(s.value),
                "trace": nums(&s.trace),
            })
        })
        .collect();
    body.insert("splits".into(), Value::Array(splits));

    let mut inputs = vec![a.hgr.as_path()];
    if let Some(path) = &a.truth {
        let truth = LabelSet::read_csv(path, h.n_vertices()).map_err(|e| CliError::io(path, e))?;
        let (pred, actual): (Vec<usize>, Vec<usize>) =
            truth.pairs().iter().map(|&(v, c)| (labels[v], c)).unzip();
        body.insert("clustering_error".into(), num(clustering_error(&pred, &actual)?));
        inputs.push(path.as_path());
    }
    let config = json!({
        "balance": a.balance.kind(),
        "k": a.k,
        "split_rule": rule,
        "ratio_dca": cfg,
    });
    let doc = document(manifest("cluster", config, shared.seed, &inputs)?, body);
    emit(&doc, shared.out.as_deref())
}
