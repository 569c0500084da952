//! Confusion matrices, per-class and macro-averaged precision, recall and
//! F1, the paired t-test, and plain-text report tables.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportProvenance {
    pub model: String,
    pub dataset: String,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub per_class: Vec<ClassMetrics>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    /// `confusion[gold][predicted]`, rows and columns in class order.
    pub confusion: Vec<Vec<usize>>,
    pub provenance: ReportProvenance,
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Confusion matrix over class indices.
pub fn confusion_matrix(predicted: &[usize], gold: &[usize], k: usize) -> Result<Vec<Vec<usize>>> {
    if predicted.len() != gold.len() {
        return Err(Error::DimensionMismatch {
            expected: gold.len(),
            actual: predicted.len(),
        });
    }
    let mut m = vec![vec![0usize; k]; k];
    for (&p, &g) in predicted.iter().zip(gold) {
        if p >= k || g >= k {
            return Err(Error::Invalid(format!("class index {} outside {k} classes", p.max(g))));
        }
        m[g][p] += 1;
    }
    Ok(m)
}

/// Metrics derived from a confusion matrix `m[gold][predicted]`.
pub fn report_from_confusion(confusion: Vec<Vec<usize>>, classes: &[String]) -> EvaluationReport {
    let k = classes.len();
    let per_class: Vec<ClassMetrics> = (0..k)
        .map(|c| {
            let tp = confusion[c][c];
            let predicted: usize = (0..k).map(|g| confusion[g][c]).sum();
            let support: usize = confusion[c].iter().sum();
            let precision = ratio(tp, predicted);
            let recall = ratio(tp, support);
            ClassMetrics {
                class: classes[c].clone(),
                precision,
                recall,
                f1: harmonic(precision, recall),
                support,
            }
        })
        .collect();
    let mean = |f: fn(&ClassMetrics) -> f64| {
        if k == 0 {
            0.0
        } else {
            per_class.iter().map(f).sum::<f64>() / k as f64
        }
    };
    EvaluationReport {
        macro_precision: mean(|m| m.precision),
        macro_recall: mean(|m| m.recall),
        macro_f1: mean(|m| m.f1),
        per_class,
        confusion,
        provenance: ReportProvenance::default(),
    }
}

/// Evaluate string labels against a class list.
pub fn evaluate(predicted: &[String], gold: &[String], classes: &[String]) -> Result<EvaluationReport> {
    let index = |l: &String| {
        classes
            .iter()
            .position(|c| c == l)
            .ok_or_else(|| Error::Invalid(format!("label {l:?} not in the class list")))
    };
    let p: Vec<usize> = predicted.iter().map(index).collect::<Result<_>>()?;
    let g: Vec<usize> = gold.iter().map(index).collect::<Result<_>>()?;
    Ok(report_from_confusion(confusion_matrix(&p, &g, classes.len())?, classes))
}

/// Macro F1 over class indices.
pub fn macro_f1(predicted: &[usize], gold: &[usize], k: usize) -> Result<f64> {
    let names: Vec<String> = (0..k).map(|c| c.to_string()).collect();
    Ok(report_from_confusion(confusion_matrix(predicted, gold, k)?, &names).macro_f1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Degeneracy {
    /// Every difference is zero; the statistic is undefined.
    ZeroDifferences,
    /// Differences are constant and nonzero; the statistic is infinite.
    ZeroVariance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    /// Two-sided p value.
    pub p: f64,
    pub df: usize,
    pub mean_difference: f64,
    pub degenerate: Option<Degeneracy>,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
    let m = (a + b) / 2.0;
    let (lm, rm) = ((a + m) / 2.0, (m + b) / 2.0);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) + adaptive(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature to absolute tolerance `eps`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f((a + b) / 2.0), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(&f, a, b, fa, fm, fb, whole, eps, 50)
}

/// `P(T > t)` for Student's t with `df` degrees of freedom, `t >= 0`.
///
/// Substituting `x = sqrt(df) tan(theta)` turns the density into
/// `c cos^(df-1)(theta)` on a finite interval.
pub fn student_t_upper_tail(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let c = (ln_gamma((df + 1.0) / 2.0) - ln_gamma(df / 2.0)).exp() / std::f64::consts::PI.sqrt();
    let theta0 = (t / df.sqrt()).atan();
    let half_pi = std::f64::consts::FRAC_PI_2;
    c * integrate(|th| th.cos().powf(df - 1.0), theta0, half_pi, 1e-12)
}

/// Paired t-test on `a - b`, two-sided.
pub fn paired_ttest(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::Invalid("a paired t-test needs at least two pairs".into()));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let df = n - 1;
    if d.iter().all(|v| *v == 0.0) {
        return Ok(TTest {
            t: 0.0,
            p: 1.0,
            df,
            mean_difference: 0.0,
            degenerate: Some(Degeneracy::ZeroDifferences),
        });
    }
    let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / df as f64;
    if var == 0.0 {
        return Ok(TTest {
            t: mean.signum() * f64::INFINITY,
            p: 0.0,
            df,
            mean_difference: mean,
            degenerate: Some(Degeneracy::ZeroVariance),
        });
    }
    let t = mean / (var.sqrt() / (n as f64).sqrt());
    let p = (2.0 * student_t_upper_tail(t.abs(), df as f64)).min(1.0);
    Ok(TTest {
        t,
        p,
        df,
        mean_difference: mean,
        degenerate: None,
    })
}

/// Aligned text table of macro precision, recall and F1 (in percent), one
/// row per `(system, dataset)` report.
pub fn format_table(rows: &[(String, String, &EvaluationReport)]) -> String {
    let w_sys = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max("System".len());
    let w_ds = rows.iter().map(|r| r.1.len()).max().unwrap_or(0).max("Dataset".len());
    let mut out = String::new();
    let _ = writeln!(out, "{:<w_sys$}  {:<w_ds$}  {:>9}  {:>9}  {:>9}", "System", "Dataset", "Precision", "Recall", "F1");
    for (sys, ds, r) in rows {
        let _ = writeln!(
            out,
            "{:<w_sys$}  {:<w_ds$}  {:>9.2}  {:>9.2}  {:>9.2}",
            sys,
            ds,
            100.0 * r.macro_precision,
            100.0 * r.macro_recall,
            100.0 * r.macro_f1
        );
    }
    out
}
