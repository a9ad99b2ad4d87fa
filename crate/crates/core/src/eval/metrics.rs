use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::corpus::Label;
use crate::error::{Error, Result};

/// Confusion counts and precision/recall/F1 for the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl Metrics {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, tn: usize) -> Self {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Metrics {
            tp,
            fp,
            fn_,
            tn,
            precision,
            recall,
            f1,
        }
    }

    /// Metrics of the summed confusion counts.
    pub fn pooled<'a>(all: impl IntoIterator<Item = &'a Metrics>) -> Self {
        let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
        for m in all {
            tp += m.tp;
            fp += m.fp;
            fn_ += m.fn_;
            tn += m.tn;
        }
        Metrics::from_counts(tp, fp, fn_, tn)
    }
}

pub fn positive_class_metrics(predictions: &[Label], gold: &[Label]) -> Result<Metrics> {
    if predictions.len() != gold.len() {
        return Err(Error::Config(format!(
            "{} predictions for {} gold labels",
            predictions.len(),
            gold.len()
        )));
    }
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for (p, g) in predictions.iter().zip(gold) {
        match (p.is_positive(), g.is_positive()) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    Ok(Metrics::from_counts(tp, fp, fn_, tn))
}

/// Arithmetic means of per-fold precision, recall and F1.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl MeanMetrics {
    pub fn of<'a>(all: impl IntoIterator<Item = &'a Metrics>) -> Self {
        let mut sum = MeanMetrics::default();
        let mut n = 0usize;
        for m in all {
            sum.precision += m.precision;
            sum.recall += m.recall;
            sum.f1 += m.f1;
            n += 1;
        }
        if n == 0 {
            return sum;
        }
        let n = n as f64;
        MeanMetrics {
            precision: sum.precision / n,
            recall: sum.recall / n,
            f1: sum.f1 / n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedTTest {
    pub mean_difference: f64,
    pub t: f64,
    pub df: usize,
    /// Two-sided.
    pub p_value: f64,
}

/// Paired t-test of `a - b` over matched samples such as per-fold F1.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<PairedTTest> {
    if a.len() != b.len() {
        return Err(Error::Config(format!(
            "paired samples differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::Config(
            "a paired t-test needs at least two pairs".to_string(),
        ));
    }
    let n = a.len() as f64;
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1.0);
    let df = a.len() - 1;
    let (t, p_value) = if var == 0.0 {
        if mean == 0.0 {
            (0.0, 1.0)
        } else {
            (mean.signum() * f64::INFINITY, 0.0)
        }
    } else {
        let t = mean / (var / n).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df as f64).expect("df >= 1");
        (t, 2.0 * dist.cdf(-t.abs()))
    };
    Ok(PairedTTest {
        mean_difference: mean,
        t,
        df,
        p_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Negative as N, Positive as P};

    #[test]
    fn half_recall() {
        let pred = [vec![P; 5], vec![N; 5]].concat();
        let gold = vec![P; 10];
        let m = positive_class_metrics(&pred, &gold).unwrap();
        assert_eq!((m.tp, m.fp, m.fn_, m.tn), (5, 0, 5, 0));
        assert_eq!(m.precision, 1.0);
        assert_eq!(m.recall, 0.5);
        assert!((m.f1 - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_conventions() {
        let m = positive_class_metrics(&[N, N, N], &[P, N, P]).unwrap();
        assert_eq!((m.precision, m.recall, m.f1), (0.0, 0.0, 0.0));
        let m = positive_class_metrics(&[P, N], &[P, N]).unwrap();
        assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
        assert!(positive_class_metrics(&[P], &[P, N]).is_err());
    }

    #[test]
    fn mean_differs_from_pooled() {
        let a = Metrics::from_counts(1, 0, 0, 5);
        let b = Metrics::from_counts(1, 3, 3, 5);
        let mean = MeanMetrics::of([&a, &b]);
        assert_eq!(mean.precision, (1.0 + 0.25) / 2.0);
        let pooled = Metrics::pooled([&a, &b]);
        assert_eq!(pooled.precision, 2.0 / 5.0);
    }

    #[test]
    fn t_test_against_hand_value() {
        // diffs 1, 2, 3: mean 2, sd 1, t = 2 / (1 / sqrt 3)
        let r = paired_t_test(&[2.0, 4.0, 6.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!((r.t - 2.0 * 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.df, 2);
        // two-sided p for t = 3.4641 with 2 df, from the closed form
        // p = 1 - t / sqrt(t^2 + 2)
        let t = r.t;
        let expected = 1.0 - t / (t * t + 2.0).sqrt();
        assert!((r.p_value - expected).abs() < 1e-10);
        let same = paired_t_test(&[0.5, 0.5], &[0.5, 0.5]).unwrap();
        assert_eq!(same.p_value, 1.0);
    }
}
