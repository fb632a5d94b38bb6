use std::fs;
use std::path::PathBuf;

use clap::Args;
use hypertv::ingest::read_hgr;
use hypertv::ratiodca::{balanced_cut, BalanceFunction, BalanceKind};
use hypertv::Partition;
use serde_json::{json, Map, Value};

use crate::output::{document, emit, manifest, num};
use crate::{CliError, Shared};

#[derive(Debug, Args)]
pub struct CutArgs {
    /// Hypergraph in hMETIS format.
    pub hgr: PathBuf,
    /// JSON array of 0-based member ids, an array of booleans, or an
    /// object with `members` or `indicator`.
    pub partition: PathBuf,
}

fn parse_partition(v: &Value, n: usize) -> Result<Partition, String> {
    let (list, as_indicator) = match v {
        Value::Array(a) => (a, a.first().is_some_and(Value::is_boolean)),
        Value::Object(o) => match (o.get("members"), o.get("indicator")) {
            (Some(Value::Array(a)), None) => (a, false),
            (None, Some(Value::Array(a))) => (a, true),
            _ => return Err("object needs exactly one of `members`, `indicator`".into()),
        },
        _ => return Err("expected an array or an object".into()),
    };
    if as_indicator {
        if list.len() != n {
            return Err(format!("indicator has length {}, expected {n}", list.len()));
        }
        let mask = list
            .iter()
            .map(|x| match x {
                Value::Bool(b) => Ok(*b),
                Value::Number(k) if k.as_f64() == Some(1.0) => Ok(true),
                Value::Number(k) if k.as_f64() == Some(0.0) => Ok(false),
                _ => Err(format!("bad indicator entry {x}")),
            })
            .collect::<Result<Vec<bool>, String>>()?;
        return Ok(Partition::new(mask));
    }
    let ids = list
        .iter()
        .map(|x| x.as_u64().map(|k| k as usize).ok_or(format!("bad vertex id {x}")))
        .collect::<Result<Vec<usize>, String>>()?;
    Partition::from_indices(n, &ids).map_err(|e| e.to_string())
}

pub fn run(a: &CutArgs, shared: &Shared) -> Result<(), CliError> {
    let h = read_hgr(&a.hgr).map_err(|e| CliError::io(&a.hgr, e))?;
    let text = fs::read_to_string(&a.partition).map_err(|e| CliError::io(&a.partition, e))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::io(&a.partition, e))?;
    let c = parse_partition(&value, h.n_vertices()).map_err(|e| CliError::io(&a.partition, e))?;
    if !c.is_proper() {
        return Err(CliError::Usage(
            "partition must leave both sides nonempty".into(),
        ));
    }
    let mut ratios = Map::new();
    for kind in BalanceKind::ALL {
        let b = BalanceFunction::new(&h, kind);
        let name = serde_json::to_value(kind).expect("enum serializes");
        let key = name.as_str().expect("unit variant").to_string();
        ratios.insert(key, num(balanced_cut(&h, &b, &c)?));
    }
    let mut body = Map::new();
    body.insert("members".into(), json!(c.indices()));
    body.insert("cut_h".into(), num(h.cut(&c)?));
    body.insert("cut_ce".into(), num(h.clique_expansion_cut(&c)?));
    body.insert("ratios".into(), Value::Object(ratios));
    let doc = document(manifest("cut", json!({}), shared.seed, &[&a.hgr, &a.partition])?, body);
    emit(&doc, shared.out.as_deref())
}
