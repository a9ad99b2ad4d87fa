use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{positive_class_metrics, MeanMetrics, Metrics};
use crate::corpus::{subsample_positives, Corpus, FoldPlan, Label};
use crate::embeddings::EmbeddingTable;
use crate::error::{Error, Result};
use crate::treebank::Treebank;
use crate::wespad::{Predictor, PreparedFit, RegionParams, WespadConfig, WespadModel};

/// Candidate values for the region hyperparameters. With `tie_alpha` the
/// distorted-space threshold follows `alpha`; with `tie_k` the distorted
/// partition count follows `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub alphas: Vec<f64>,
    pub ks: Vec<usize>,
    pub tie_alpha: bool,
    pub tie_k: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            alphas: vec![0.05, 0.15, 0.3],
            ks: vec![3, 4, 5],
            tie_alpha: true,
            tie_k: true,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() || self.ks.is_empty() {
            return Err(Error::Config(
                "grid needs at least one alpha and one k".to_string(),
            ));
        }
        Ok(())
    }

    /// Grid points sorted so that earlier points win ties: smaller alpha
    /// first, then smaller k.
    pub fn points(&self) -> Vec<RegionParams> {
        let mut alphas = self.alphas.clone();
        alphas.sort_by(f64::total_cmp);
        alphas.dedup();
        let mut ks = self.ks.clone();
        ks.sort_unstable();
        ks.dedup();

        let alpha_pairs: Vec<(f64, f64)> = if self.tie_alpha {
            alphas.iter().map(|&a| (a, a)).collect()
        } else {
            alphas
                .iter()
                .flat_map(|&a| alphas.iter().map(move |&b| (a, b)))
                .collect()
        };
        let k_pairs: Vec<(usize, usize)> = if self.tie_k {
            ks.iter().map(|&k| (k, k)).collect()
        } else {
            ks.iter()
                .flat_map(|&k| ks.iter().map(move |&l| (k, l)))
                .collect()
        };
        let mut points = Vec::with_capacity(alpha_pairs.len() * k_pairs.len());
        for &(alpha, alpha2) in &alpha_pairs {
            for &(k, k2) in &k_pairs {
                points.push(RegionParams {
                    alpha,
                    alpha2,
                    k,
                    k2,
                });
            }
        }
        points
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub chosen: RegionParams,
    /// Absent when the grid has a single point and no search ran.
    pub validation_f1: Option<f64>,
    pub train_size: usize,
    pub train_positives: usize,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    pub fold: usize,
    pub gold: Label,
    pub label: Label,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub method: String,
    pub plan_hash: String,
    pub fold_seed: u64,
    pub seed: u64,
    pub positive_fraction: f64,
    pub config: WespadConfig,
    /// Absent for runs at the fixed hyperparameters of `config`.
    pub grid: Option<GridSpec>,
    pub folds: Vec<FoldResult>,
    pub mean: MeanMetrics,
    pub pooled: Metrics,
    /// Test-fold predictions in corpus order.
    pub predictions: Vec<PredictionRecord>,
}

impl CvReport {
    pub fn fold_f1(&self) -> Vec<f64> {
        self.folds.iter().map(|f| f.metrics.f1).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Per-fold rows, then `mean` and `pooled` summary rows.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# method\t{}", self.method);
        let _ = writeln!(out, "# plan_hash\t{}", self.plan_hash);
        out.push_str("fold\ttp\tfp\tfn\ttn\tprecision\trecall\tf1\talpha\talpha2\tk\tk2\n");
        for f in &self.folds {
            let m = &f.metrics;
            let c = &f.chosen;
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{}\t{}\t{}\t{}",
                f.fold,
                m.tp,
                m.fp,
                m.fn_,
                m.tn,
                m.precision,
                m.recall,
                m.f1,
                c.alpha,
                c.alpha2,
                c.k,
                c.k2
            );
        }
        let _ = writeln!(
            out,
            "mean\t\t\t\t\t{:.6}\t{:.6}\t{:.6}\t\t\t\t",
            self.mean.precision, self.mean.recall, self.mean.f1
        );
        let p = &self.pooled;
        let _ = writeln!(
            out,
            "pooled\t{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t\t\t\t",
            p.tp, p.fp, p.fn_, p.tn, p.precision, p.recall, p.f1
        );
        out
    }
}

/// The fixed inputs shared by every run of one experiment.
#[derive(Clone, Copy)]
pub struct Experiment<'a> {
    pub corpus: &'a Corpus,
    pub folds: &'a FoldPlan,
    pub table: &'a EmbeddingTable,
    pub trees: &'a Treebank,
}

/// Options of a cross-validation run beyond the model configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvOptions {
    /// Fraction of training positives kept in each round.
    pub positive_fraction: f64,
    pub subsample_seed: u64,
}

impl Default for CvOptions {
    fn default() -> Self {
        CvOptions {
            positive_fraction: 1.0,
            subsample_seed: 0,
        }
    }
}

struct Round {
    fold: usize,
    result: FoldResult,
    predictions: Vec<(usize, Label, f64)>,
}

fn predict_labels(
    model: &WespadModel,
    corpus: &Corpus,
    ex: &Experiment<'_>,
) -> Result<Vec<(Label, f64)>> {
    let predictor = Predictor::new(model, ex.table)?;
    Ok(predictor
        .predict_corpus(corpus, ex.trees)
        .into_iter()
        .map(|p| (p.label, p.probability))
        .collect())
}

impl<'a> Experiment<'a> {
    pub fn cross_validate(
        &self,
        method: &str,
        config: &WespadConfig,
        grid: Option<&GridSpec>,
    ) -> Result<CvReport> {
        self.cross_validate_with(method, config, grid, CvOptions::default())
    }

    /// Rotating folds: round `r` tests on fold `r`, tunes on fold `r + 1`
    /// and trains on the rest. The model selected on the validation fold is
    /// the one evaluated; it is not refitted on training plus validation.
    pub fn cross_validate_with(
        &self,
        method: &str,
        config: &WespadConfig,
        grid: Option<&GridSpec>,
        options: CvOptions,
    ) -> Result<CvReport> {
        config.validate()?;
        if let Some(grid) = grid {
            grid.validate()?;
        }
        let k = self.folds.k;
        if k < 3 {
            return Err(Error::Config(format!(
                "rotating test/validation folds need k >= 3, got {k}"
            )));
        }
        let assignment = self.folds.folds_for(self.corpus);
        // Groups that ignore the region hyperparameters make every grid
        // point the same model.
        let points = match grid {
            Some(grid) if config.uses_regions() => grid.points(),
            _ => vec![config.region_params()],
        };

        let rounds: Vec<Round> = (0..k)
            .into_par_iter()
            .map(|r| self.round(r, &assignment, config, &points, options))
            .collect::<Result<_>>()?;

        let mut predictions: Vec<Option<PredictionRecord>> = vec![None; self.corpus.len()];
        let mut folds = Vec::with_capacity(k);
        for round in rounds {
            for (i, label, probability) in round.predictions {
                let post = &self.corpus.posts()[i];
                predictions[i] = Some(PredictionRecord {
                    id: post.id.clone(),
                    fold: round.fold,
                    gold: post.label,
                    label,
                    probability,
                });
            }
            folds.push(round.result);
        }
        let mean = MeanMetrics::of(folds.iter().map(|f| &f.metrics));
        let pooled = Metrics::pooled(folds.iter().map(|f| &f.metrics));
        Ok(CvReport {
            method: method.to_string(),
            plan_hash: self.folds.hash(),
            fold_seed: self.folds.seed,
            seed: config.seed,
            positive_fraction: options.positive_fraction,
            config: config.clone(),
            grid: grid.cloned(),
            folds,
            mean,
            pooled,
            predictions: predictions.into_iter().flatten().collect(),
        })
    }

    fn round(
        &self,
        r: usize,
        assignment: &[usize],
        config: &WespadConfig,
        points: &[RegionParams],
        options: CvOptions,
    ) -> Result<Round> {
        let k = self.folds.k;
        let val_fold = (r + 1) % k;
        let pick = |pred: &dyn Fn(usize) -> bool| -> Vec<usize> {
            (0..assignment.len())
                .filter(|&i| pred(assignment[i]))
                .collect()
        };
        let test_idx = pick(&|f| f == r);
        let val_idx = pick(&|f| f == val_fold);
        let train_idx = pick(&|f| f != r && f != val_fold);

        let mut train = self.corpus.subset(&train_idx);
        if options.positive_fraction < 1.0 {
            train = subsample_positives(
                &train,
                options.positive_fraction,
                options.subsample_seed.wrapping_add(r as u64),
            )?;
        }
        let test = self.corpus.subset(&test_idx);
        let prepared = PreparedFit::new(&train, config, self.table, self.trees)?;

        let (model, chosen, validation_f1) = if points.len() == 1 {
            (prepared.finish(points[0])?, points[0], None)
        } else {
            let validation = self.corpus.subset(&val_idx);
            let gold = validation.labels();
            let scored: Vec<(WespadModel, f64)> = points
                .par_iter()
                .map(|&p| {
                    let model = prepared.finish(p)?;
                    let pred: Vec<Label> = predict_labels(&model, &validation, self)?
                        .into_iter()
                        .map(|x| x.0)
                        .collect();
                    let f1 = positive_class_metrics(&pred, &gold)?.f1;
                    Ok((model, f1))
                })
                .collect::<Result<_>>()?;
            let mut best = 0;
            for (i, (_, f1)) in scored.iter().enumerate() {
                if *f1 > scored[best].1 {
                    best = i;
                }
            }
            let f1 = scored[best].1;
            let model = scored.into_iter().nth(best).unwrap().0;
            (model, points[best], Some(f1))
        };

        let outputs = predict_labels(&model, &test, self)?;
        let pred: Vec<Label> = outputs.iter().map(|x| x.0).collect();
        let metrics = positive_class_metrics(&pred, &test.labels())?;
        Ok(Round {
            fold: r,
            result: FoldResult {
                fold: r,
                chosen,
                validation_f1,
                train_size: train.len(),
                train_positives: train.positive_count(),
                metrics,
            },
            predictions: test_idx
                .into_iter()
                .zip(outputs)
                .map(|(i, (label, p))| (i, label, p))
                .collect(),
        })
    }
}
