use std::path::PathBuf;

use clap::{Args, ValueEnum};
use hypertv::ingest::read_hgr;
use hypertv::learning::{
    baseline_predict_multiclass, classification_error, cross_validate_lambda, cross_validate_with,
    sample_labelled, ssl_predict_multiclass, CvResult, DegreeConvention, LabelSet, SslConfig,
};
use hypertv::pdhg::Power;
use hypertv::Hypergraph;
use serde_json::{json, Map, Value};

use crate::output::{document, emit, manifest, num, nums};
use crate::{CliError, Shared};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Degree {
    Literal,
    Standard,
}

#[derive(Debug, Args)]
pub struct SslArgs {
    /// Hypergraph in hMETIS format.
    pub hgr: PathBuf,
    /// `vertex_id,class` CSV. Training labels, or the label pool when
    /// `--labeled-counts` is given.
    pub labels: PathBuf,
    /// Regularizer exponent, 1 or 2.
    #[arg(long, default_value_t = 2)]
    pub p: u32,
    /// Fixed regularization weight.
    #[arg(long, conflicts_with = "cv")]
    pub lambda: Option<f64>,
    /// Choose λ by cross validation (the default without --lambda).
    #[arg(long)]
    pub cv: bool,
    /// λ grid for cross validation.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6])]
    pub grid: Vec<f64>,
    /// Cross-validation folds, capped at the number of training labels.
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Also run the clique-expansion Laplacian baseline.
    #[arg(long)]
    pub baseline: bool,
    /// Degree used to normalize the baseline Laplacian.
    #[arg(long, value_enum, default_value = "standard")]
    pub degree: Degree,
    /// Trials per labelled count.
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// Run the trial protocol with these numbers of labelled points.
    #[arg(long, value_delimiter = ',')]
    pub labeled_counts: Vec<usize>,
    /// Also write per-trial rows as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Iteration cap of each PDHG solve.
    #[arg(long, default_value_t = 100_000)]
    pub max_iters: usize,
    /// Include per-vertex class scores.
    #[arg(long)]
    pub scores: bool,
}

struct Setup {
    h: Hypergraph,
    labels: LabelSet,
    cfg: SslConfig,
    convention: DegreeConvention,
}

fn cv_json(cv: &CvResult) -> Value {
    Value::Array(
        cv.table
            .iter()
            .map(|r| {
                json!({
                    "lambda": num(r.lambda),
                    "mean_error": num(r.mean_error),
                    "fold_errors": nums(&r.fold_errors),
                })
            })
            .collect(),
    )
}

/// λ for our method and, when requested, for the baseline.
fn choose_lambdas(
    a: &SslArgs,
    s: &Setup,
    train: &LabelSet,
    cfg: &SslConfig,
) -> Result<(f64, Option<CvResult>, Option<(f64, Option<CvResult>)>), CliError> {
    if let Some(l) = a.lambda {
        return Ok((l, None, a.baseline.then_some((l, None))));
    }
    // small training sets fall back to fewer folds
    let cfg = &SslConfig {
        cv_folds: cfg.cv_folds.min(train.len()),
        ..cfg.clone()
    };
    let ours = cross_validate_lambda(&s.h, train, cfg)?;
    let base = if a.baseline {
        let cv = cross_validate_with(train, cfg, |t, lambda| {
            Ok(baseline_predict_multiclass(&s.h, t, lambda, s.convention)?)
        })?;
        Some((cv.best_lambda, Some(cv)))
    } else {
        None
    };
    Ok((ours.best_lambda, Some(ours), base))
}

pub fn run(a: &SslArgs, shared: &Shared) -> Result<(), CliError> {
    let h = read_hgr(&a.hgr).map_err(|e| CliError::io(&a.hgr, e))?;
    let labels = LabelSet::read_csv(&a.labels, h.n_vertices()).map_err(|e| CliError::io(&a.labels, e))?;
    let mut cfg = SslConfig {
        power: Power::from_exponent(a.p)?,
        lambda_grid: a.grid.clone(),
        cv_folds: a.folds,
        seed: shared.seed,
        threads: shared.threads,
        ..SslConfig::default()
    };
    cfg.pdhg.epsilon = shared.epsilon;
    cfg.pdhg.max_iters = a.max_iters;
    cfg.validate()?;
    if let Some(l) = a.lambda {
        if !(l > 0.0 && l.is_finite()) {
            return Err(CliError::Usage("--lambda must be > 0".into()));
        }
    }
    let convention = match a.degree {
        Degree::Literal => DegreeConvention::Literal,
        Degree::Standard => DegreeConvention::Standard,
    };
    let setup = Setup {
        h,
        labels,
        cfg,
        convention,
    };
    let (body, converged) = if a.labeled_counts.is_empty() {
        predict_mode(a, &setup)?
    } else {
        trial_mode(a, &setup)?
    };
    let config = json!({
        "p": a.p,
        "lambda": a.lambda.map(num),
        "cv": a.lambda.is_none(),
        "ssl": setup.cfg,
        "baseline": a.baseline,
        "degree": convention,
        "trials": a.trials,
        "labeled_counts": a.labeled_counts,
    });
    let doc = document(manifest("ssl", config, shared.seed, &[&a.hgr, &a.labels])?, body);
    emit(&doc, shared.out.as_deref())?;
    if !converged {
        return Err(CliError::NotConverged(
            "some PDHG solves stopped before reaching the gap tolerance".into(),
        ));
    }
    Ok(())
}

fn predict_mode(a: &SslArgs, s: &Setup) -> Result<(Map<String, Value>, bool), CliError> {
    let (lambda, cv, base) = choose_lambdas(a, s, &s.labels, &s.cfg)?;
    let pred = ssl_predict_multiclass(&s.h, &s.labels, lambda, &s.cfg)?;
    let names = s.labels.class_names();
    let mut body = Map::new();
    body.insert("p".into(), json!(a.p));
    body.insert("lambda".into(), num(lambda));
    body.insert("labels".into(), json!(pred.labels.iter().map(|&c| &names[c]).collect::<Vec<_>>()));
    body.insert("converged".into(), json!(pred.converged));
    body.insert("max_rel_gap".into(), num(pred.max_rel_gap));
    if let Some(cv) = &cv {
        body.insert("cv_table".into(), cv_json(cv));
    }
    if a.scores {
        body.insert("per_vertex_scores".into(), Value::Array(pred.scores.iter().map(|s| nums(s)).collect()));
    }
    if let Some((bl, bcv)) = base {
        let labels = baseline_predict_multiclass(&s.h, &s.labels, bl, s.convention)?;
        let mut b = Map::new();
        b.insert("lambda".into(), num(bl));
        b.insert("labels".into(), json!(labels.iter().map(|&c| &names[c]).collect::<Vec<_>>()));
        if let Some(cv) = &bcv {
            b.insert("cv_table".into(), cv_json(cv));
        }
        body.insert("baseline".into(), Value::Object(b));
    }
    Ok((body, pred.converged))
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn trial_mode(a: &SslArgs, s: &Setup) -> Result<(Map<String, Value>, bool), CliError> {
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be >= 1".into()));
    }
    let truth: Vec<usize> = {
        let per_vertex = s.labels.per_vertex();
        per_vertex.iter().map(|c| c.unwrap_or(usize::MAX)).collect()
    };
    let mut all_converged = true;
    let mut results = Vec::new();
    let mut csv_rows = Vec::new();
    for &count in &a.labeled_counts {
        let mut trials = Vec::new();
        let mut errors = Vec::new();
        let mut base_errors = Vec::new();
        for t in 0..a.trials {
            let seed = s.cfg.seed + t as u64;
            let chosen = sample_labelled(&s.labels, count, seed)?;
            let train = s.labels.select(&chosen);
            let eval: Vec<usize> = (0..s.labels.len())
                .filter(|i| chosen.binary_search(i).is_err())
                .map(|i| s.labels.pairs()[i].0)
                .collect();
            let cfg = SslConfig { seed, ..s.cfg.clone() };
            let (lambda, _, base) = choose_lambdas(a, s, &train, &cfg)?;
            let pred = ssl_predict_multiclass(&s.h, &train, lambda, &cfg)?;
            all_converged &= pred.converged;
            let error = classification_error(&pred.labels, &truth, &eval)?;
            errors.push(error);
            let mut row = json!({
                "trial": t,
                "seed": seed,
                "lambda": num(lambda),
                "error": num(error),
                "converged": pred.converged,
            });
            let mut base_cell = (f64::NAN, f64::NAN);
            if let Some((bl, _)) = base {
                let labels = baseline_predict_multiclass(&s.h, &train, bl, s.convention)?;
                let be = classification_error(&labels, &truth, &eval)?;
                base_errors.push(be);
                row["baseline_lambda"] = num(bl);
                row["baseline_error"] = num(be);
                base_cell = (bl, be);
            }
            csv_rows.push([
                count.to_string(),
                t.to_string(),
                seed.to_string(),
                lambda.to_string(),
                error.to_string(),
                base_cell.0.to_string(),
                base_cell.1.to_string(),
            ]);
            trials.push(row);
        }
        let (mean, std) = mean_std(&errors);
        let mut entry = json!({
            "labeled": count,
            "trials": trials,
            "mean_error": num(mean),
            "std_error": num(std),
        });
        if !base_errors.is_empty() {
            let (bm, bs) = mean_std(&base_errors);
            entry["baseline_mean_error"] = num(bm);
            entry["baseline_std_error"] = num(bs);
        }
        results.push(entry);
    }
    if let Some(path) = &a.csv {
        let write = || -> csv::Result<()> {
            let mut w = csv::Writer::from_path(path)?;
            w.write_record(["labeled", "trial", "seed", "lambda", "error", "baseline_lambda", "baseline_error"])?;
            for r in &csv_rows {
                w.write_record(r)?;
            }
            w.flush()?;
            Ok(())
        };
        write().map_err(|e| CliError::io(path, e))?;
    }
    let mut body = Map::new();
    body.insert("p".into(), json!(a.p));
    body.insert("results".into(), Value::Array(results));
    body.insert("converged".into(), json!(all_converged));
    Ok((body, all_converged))
}
