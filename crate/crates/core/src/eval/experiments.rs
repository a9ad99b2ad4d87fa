use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::cv::{CvOptions, CvReport, Experiment, GridSpec};
use super::metrics::{paired_t_test, MeanMetrics, PairedTTest};
use crate::corpus::{stratified_folds, Corpus};
use crate::embeddings::EmbeddingTable;
use crate::error::{Error, Result};
use crate::treebank::Treebank;
use crate::wespad::{FeatureGroup, RegionParams, WespadConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    MeLex,
    MeCen,
    MeLexEmb,
    MeLexCen,
    Wespad,
}

impl Baseline {
    pub const ALL: [Baseline; 5] = [
        Baseline::MeLex,
        Baseline::MeCen,
        Baseline::MeLexEmb,
        Baseline::MeLexCen,
        Baseline::Wespad,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Baseline::MeLex => "me_lex",
            Baseline::MeCen => "me_cen",
            Baseline::MeLexEmb => "me_lex_emb",
            Baseline::MeLexCen => "me_lex_cen",
            Baseline::Wespad => "wespad",
        }
    }

    /// The configuration of this method. Optimizer, mining and seed
    /// settings come from `base`; `Wespad` returns `base` unchanged.
    pub fn config(self, base: &WespadConfig) -> WespadConfig {
        if self == Baseline::Wespad {
            return base.clone();
        }
        let mut config = base.clone();
        for group in FeatureGroup::ALL {
            config.set_enabled(group, false);
        }
        match self {
            Baseline::MeLex => config.lex_feats = true,
            Baseline::MeCen => config.centroid_feats = true,
            Baseline::MeLexEmb => {
                config.lex_feats = true;
                config.centroid_feats = true;
            }
            Baseline::MeLexCen => {
                // One partition and a zero threshold: the plain PFlag/NFlag pair.
                config.lex_feats = true;
                config.we_partitioning = true;
                config.k_partitions = 1;
                config.alpha = 0.0;
            }
            Baseline::Wespad => unreachable!(),
        }
        config
    }

    /// Only WESPAD searches the grid; the baselines have nothing to tune.
    pub fn grid(self, grid: &GridSpec) -> Option<GridSpec> {
        (self == Baseline::Wespad).then(|| grid.clone())
    }
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Baseline::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown baseline {s:?}")))
    }
}

/// One or more feature groups removed together in an ablation run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Removal {
    pub name: String,
    pub groups: Vec<FeatureGroup>,
}

impl Removal {
    pub fn single(group: FeatureGroup) -> Self {
        Removal {
            name: group.name().to_string(),
            groups: vec![group],
        }
    }

    /// The groups of the full model, one removal each.
    pub fn defaults() -> Vec<Removal> {
        [
            FeatureGroup::WeDistortion,
            FeatureGroup::WePartitioning,
            FeatureGroup::ContextNext,
            FeatureGroup::Syn,
            FeatureGroup::ContextPrev,
            FeatureGroup::Lex,
        ]
        .into_iter()
        .map(Removal::single)
        .collect()
    }
}

/// `we_partitioning+we_distortion` removes both groups; `context` is
/// shorthand for both context groups.
impl FromStr for Removal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut groups = Vec::new();
        for part in s.split('+') {
            if part == "context" {
                groups.extend([FeatureGroup::ContextPrev, FeatureGroup::ContextNext]);
            } else {
                groups.push(part.parse()?);
            }
        }
        Ok(Removal {
            name: s.to_string(),
            groups,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub removed: String,
    pub mean: MeanMetrics,
    /// Relative change of mean F1 against the full model, in percent.
    pub delta_f1_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub plan_hash: String,
    pub full: MeanMetrics,
    pub rows: Vec<AblationRow>,
}

impl AblationReport {
    pub fn to_tsv(&self) -> String {
        let mut out = format!(
            "# plan_hash\t{}\nremoved\tf1\tprecision\trecall\tdelta_f1_pct\n",
            self.plan_hash
        );
        let _ = writeln!(
            out,
            "none\t{:.6}\t{:.6}\t{:.6}\t0.00",
            self.full.f1, self.full.precision, self.full.recall
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{:.6}\t{:.6}\t{:.6}\t{:.2}",
                r.removed, r.mean.f1, r.mean.precision, r.mean.recall, r.delta_f1_pct
            );
        }
        out
    }
}

/// One point of a sweep: `x` is the partition count or the positive
/// fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub x: f64,
    pub method: String,
    pub mean: MeanMetrics,
    pub plan_hash: String,
}

/// Plot data: one line per `x`, precision/recall/F1 columns per method in
/// first-seen order.
pub fn sweep_csv(x_name: &str, rows: &[SweepRow]) -> String {
    let mut methods: Vec<&str> = Vec::new();
    for r in rows {
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
    }
    let mut by_x: Vec<(f64, BTreeMap<&str, &MeanMetrics>)> = Vec::new();
    for r in rows {
        match by_x.iter_mut().find(|(x, _)| *x == r.x) {
            Some((_, m)) => {
                m.insert(&r.method, &r.mean);
            }
            None => by_x.push((r.x, BTreeMap::from([(r.method.as_str(), &r.mean)]))),
        }
    }
    let mut out = String::from(x_name);
    for m in &methods {
        let _ = write!(out, ",{m}_precision,{m}_recall,{m}_f1");
    }
    out.push('\n');
    for (x, cells) in by_x {
        let _ = write!(out, "{x}");
        for m in &methods {
            match cells.get(m) {
                Some(v) => {
                    let _ = write!(out, ",{:.6},{:.6},{:.6}", v.precision, v.recall, v.f1);
                }
                None => out.push_str(",,,"),
            }
        }
        out.push('\n');
    }
    out
}

impl<'a> Experiment<'a> {
    pub fn run_baseline(
        &self,
        baseline: Baseline,
        base: &WespadConfig,
        grid: &GridSpec,
    ) -> Result<CvReport> {
        self.cross_validate(
            baseline.name(),
            &baseline.config(base),
            baseline.grid(grid).as_ref(),
        )
    }

    /// One CV run per removal, all on this experiment's folds.
    pub fn ablate(
        &self,
        config: &WespadConfig,
        grid: &GridSpec,
        removals: &[Removal],
    ) -> Result<AblationReport> {
        let full = self.cross_validate("wespad", config, Some(grid))?;
        let mut rows = Vec::with_capacity(removals.len());
        for removal in removals {
            let mut reduced = config.clone();
            for &g in &removal.groups {
                reduced.set_enabled(g, false);
            }
            let report = self.cross_validate(&removal.name, &reduced, Some(grid))?;
            let delta = if full.mean.f1 > 0.0 {
                (report.mean.f1 - full.mean.f1) / full.mean.f1 * 100.0
            } else {
                0.0
            };
            rows.push(AblationRow {
                removed: removal.name.clone(),
                mean: report.mean,
                delta_f1_pct: delta,
            });
        }
        Ok(AblationReport {
            plan_hash: self.folds.hash(),
            full: full.mean,
            rows,
        })
    }

    /// One fixed-hyperparameter CV run per partition count, with `K2 = K`
    /// and `alpha2 = alpha`.
    pub fn partition_sweep(
        &self,
        config: &WespadConfig,
        ks: &[usize],
        alpha: f64,
    ) -> Result<Vec<SweepRow>> {
        let mut rows = Vec::with_capacity(ks.len());
        for &k in ks {
            let params = RegionParams {
                alpha,
                alpha2: alpha,
                k,
                k2: k,
            };
            let report = self.cross_validate("wespad", &config.with_region_params(params), None)?;
            rows.push(SweepRow {
                x: k as f64,
                method: "wespad".to_string(),
                mean: report.mean,
                plan_hash: report.plan_hash,
            });
        }
        Ok(rows)
    }

    /// Mean metrics per (fraction, method) with positives subsampled in the
    /// training folds only. All methods share the subsample seed.
    pub fn positive_fraction_sweep(
        &self,
        config: &WespadConfig,
        grid: &GridSpec,
        fractions: &[f64],
        baselines: &[Baseline],
        seed: u64,
    ) -> Result<Vec<SweepRow>> {
        let mut rows = Vec::new();
        for &fraction in fractions {
            for &b in baselines {
                let options = CvOptions {
                    positive_fraction: fraction,
                    subsample_seed: seed,
                };
                let report = self.cross_validate_with(
                    b.name(),
                    &b.config(config),
                    b.grid(grid).as_ref(),
                    options,
                )?;
                rows.push(SweepRow {
                    x: fraction,
                    method: b.name().to_string(),
                    mean: report.mean,
                    plan_hash: report.plan_hash,
                });
            }
        }
        Ok(rows)
    }
}

/// Results of several methods on one corpus (or one topic of it).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicResult {
    pub topic: String,
    pub plan_hash: String,
    pub reports: Vec<CvReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    /// Means over topics of the per-topic mean metrics.
    pub mean: MeanMetrics,
    /// Paired over all test folds of all topics, against the last method.
    pub t_test: Option<PairedTTest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Benchmark {
    pub topics: Vec<TopicResult>,
    pub summary: Vec<MethodSummary>,
}

impl Benchmark {
    /// Per-topic F1 table followed by mean F1/P/R per method.
    pub fn to_tsv(&self) -> String {
        let methods: Vec<&str> = self.summary.iter().map(|s| s.method.as_str()).collect();
        let mut out = format!("topic\t{}\n", methods.join("\t"));
        for t in &self.topics {
            out.push_str(&t.topic);
            for r in &t.reports {
                let _ = write!(out, "\t{:.3}", r.mean.f1);
            }
            out.push('\n');
        }
        out.push_str("\nmethod\tf1\tprecision\trecall\tt_vs_last\tp_vs_last\n");
        for s in &self.summary {
            let (t, p) = match &s.t_test {
                Some(t) => (format!("{:.3}", t.t), format!("{:.4}", t.p_value)),
                None => (String::new(), String::new()),
            };
            let _ = writeln!(
                out,
                "{}\t{:.3}\t{:.3}\t{:.3}\t{t}\t{p}",
                s.method, s.mean.f1, s.mean.precision, s.mean.recall
            );
        }
        out
    }
}

/// Cross-validates every method, separately within each topic when
/// `per_topic` is set (posts without a topic form their own group). Each
/// topic gets one fold plan shared by all methods.
#[allow(clippy::too_many_arguments)]
pub fn benchmark(
    corpus: &Corpus,
    table: &EmbeddingTable,
    trees: &Treebank,
    config: &WespadConfig,
    grid: &GridSpec,
    methods: &[Baseline],
    k: usize,
    fold_seed: u64,
    per_topic: bool,
) -> Result<Benchmark> {
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, post) in corpus.posts().iter().enumerate() {
        let key = if per_topic {
            post.topic.clone().unwrap_or_else(|| "-".to_string())
        } else {
            "all".to_string()
        };
        groups.entry(key).or_default().push(i);
    }
    let mut topics = Vec::with_capacity(groups.len());
    for (topic, indices) in groups {
        let sub = corpus.subset(&indices);
        let folds = stratified_folds(&sub, k, fold_seed)?;
        let ex = Experiment {
            corpus: &sub,
            folds: &folds,
            table,
            trees,
        };
        let reports = methods
            .iter()
            .map(|&m| ex.run_baseline(m, config, grid))
            .collect::<Result<Vec<_>>>()?;
        topics.push(TopicResult {
            topic,
            plan_hash: folds.hash(),
            reports,
        });
    }

    let fold_f1 =
        |m: usize| -> Vec<f64> { topics.iter().flat_map(|t| t.reports[m].fold_f1()).collect() };
    let reference = methods.len().checked_sub(1);
    let mut summary = Vec::with_capacity(methods.len());
    for (m, method) in methods.iter().enumerate() {
        let per_topic: Vec<MeanMetrics> = topics.iter().map(|t| t.reports[m].mean).collect();
        let n = per_topic.len() as f64;
        let mean = MeanMetrics {
            precision: per_topic.iter().map(|x| x.precision).sum::<f64>() / n,
            recall: per_topic.iter().map(|x| x.recall).sum::<f64>() / n,
            f1: per_topic.iter().map(|x| x.f1).sum::<f64>() / n,
        };
        let t_test = match reference {
            Some(r) if r != m => Some(paired_t_test(&fold_f1(r), &fold_f1(m))?),
            _ => None,
        };
        summary.push(MethodSummary {
            method: method.name().to_string(),
            mean,
            t_test,
        });
    }
    Ok(Benchmark { topics, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baseline_configs() {
        let base = WespadConfig::default();
        assert_eq!(Baseline::MeLex.config(&base), WespadConfig::lex_only());
        let c = Baseline::MeLexCen.config(&base);
        assert!(c.lex_feats && c.we_partitioning && !c.we_distortion && !c.syn_feats);
        assert_eq!((c.k_partitions, c.alpha), (1, 0.0));
        let c = Baseline::MeCen.config(&base);
        assert!(c.centroid_feats && !c.lex_feats && !c.uses_regions());
        assert_eq!(Baseline::Wespad.config(&base), base);
        assert_eq!(
            "me_lex_emb".parse::<Baseline>().unwrap(),
            Baseline::MeLexEmb
        );
    }

    #[test]
    fn removal_parsing() {
        let r: Removal = "we_partitioning+we_distortion".parse().unwrap();
        assert_eq!(
            r.groups,
            vec![FeatureGroup::WePartitioning, FeatureGroup::WeDistortion]
        );
        let r: Removal = "context".parse().unwrap();
        assert_eq!(r.groups.len(), 2);
        assert!("nope".parse::<Removal>().is_err());
    }

    #[test]
    fn csv_layout() {
        let m = |f1| MeanMetrics {
            precision: 1.0,
            recall: 0.5,
            f1,
        };
        let rows = vec![
            SweepRow {
                x: 0.2,
                method: "me_lex".into(),
                mean: m(0.1),
                plan_hash: String::new(),
            },
            SweepRow {
                x: 0.2,
                method: "wespad".into(),
                mean: m(0.2),
                plan_hash: String::new(),
            },
            SweepRow {
                x: 1.0,
                method: "me_lex".into(),
                mean: m(0.3),
                plan_hash: String::new(),
            },
        ];
        let csv = sweep_csv("fraction", &rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "fraction,me_lex_precision,me_lex_recall,me_lex_f1,wespad_precision,wespad_recall,wespad_f1");
        assert_eq!(
            lines[1],
            "0.2,1.000000,0.500000,0.100000,1.000000,0.500000,0.200000"
        );
        assert_eq!(lines[2], "1,1.000000,0.500000,0.300000,,,");
    }
}
