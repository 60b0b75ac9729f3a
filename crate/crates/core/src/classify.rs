//! Fall/no-fall prediction from the two gait features.
//!
//! Linear soft-margin SVM and k-nearest-neighbours, evaluated with
//! leave-one-out cross-validation. Feature scaling is fit on each training
//! fold only. `Fall` is the positive class throughout.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::gait::Outcome;

/// Regularization weight used when none is given.
pub const DEFAULT_C: f64 = 1.0;
/// Neighbour count used when none is given.
pub const DEFAULT_K: usize = 3;

const SMO_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("feature {dimension} has zero spread in the training data")]
    ZeroVariance { dimension: usize },
    #[error("training set contains a single class")]
    SingleClassTrainingSet,
    #[error("k = {k} must be odd and between 1 and the training size {n}")]
    InvalidK { k: usize, n: usize },
    #[error("C must be positive and finite, got {0}")]
    InvalidC(f64),
    #[error("fold leaving out person {person_id} is degenerate: {source}")]
    FoldDegenerate {
        person_id: u32,
        #[source]
        source: Box<ClassifyError>,
    },
    #[error("ROC needs at least one positive and one negative label")]
    SingleClassScores,
    #[error("non-finite feature or score")]
    NonFinite,
}

/// Per-feature preprocessing fitted on training data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Scaling {
    #[default]
    None,
    MinMax,
    ZScore,
}

impl Scaling {
    pub const ALL: [Scaling; 3] = [Scaling::None, Scaling::MinMax, Scaling::ZScore];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scaling::None => "none",
            Scaling::MinMax => "minmax",
            Scaling::ZScore => "zscore",
        }
    }
}

impl fmt::Display for Scaling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scaling {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Scaling::None),
            "minmax" => Ok(Scaling::MinMax),
            "zscore" => Ok(Scaling::ZScore),
            other => Err(format!("unknown scaling '{other}' (none|minmax|zscore)")),
        }
    }
}

/// Affine per-feature map `(x - offset) / scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Standardizer {
    pub offset: [f64; 2],
    pub scale: [f64; 2],
}

impl Standardizer {
    pub const IDENTITY: Standardizer = Standardizer {
        offset: [0.0; 2],
        scale: [1.0; 2],
    };

    /// Fits on training features. Z-scores use the population standard
    /// deviation (divide by n).
    pub fn fit(features: &[[f64; 2]], scaling: Scaling) -> Result<Self, ClassifyError> {
        if scaling == Scaling::None {
            return Ok(Self::IDENTITY);
        }
        if features.len() < 2 {
            return Err(ClassifyError::TooFewSamples {
                need: 2,
                got: features.len(),
            });
        }
        let n = features.len() as f64;
        let mut out = Self::IDENTITY;
        for d in 0..2 {
            let column = features.iter().map(|f| f[d]);
            let (offset, scale) = match scaling {
                Scaling::MinMax => {
                    let lo = column.clone().fold(f64::INFINITY, f64::min);
                    let hi = column.fold(f64::NEG_INFINITY, f64::max);
                    (lo, hi - lo)
                }
                Scaling::ZScore => {
                    let mean = column.clone().sum::<f64>() / n;
                    let var = column.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                    (mean, var.sqrt())
                }
                Scaling::None => unreachable!(),
            };
            if !(scale > 0.0) {
                return Err(ClassifyError::ZeroVariance { dimension: d });
            }
            out.offset[d] = offset;
            out.scale[d] = scale;
        }
        Ok(out)
    }

    pub fn apply(&self, x: &[f64; 2]) -> [f64; 2] {
        [
            (x[0] - self.offset[0]) / self.scale[0],
            (x[1] - self.offset[1]) / self.scale[1],
        ]
    }
}

/// Feature vector `(L, H)` with its label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabeledSample {
    pub person_id: u32,
    pub features: [f64; 2],
    pub label: Outcome,
}

impl LabeledSample {
    pub fn new(person_id: u32, features: [f64; 2], label: Outcome) -> Self {
        Self {
            person_id,
            features,
            label,
        }
    }
}

fn dot(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Primal soft-margin objective `0.5 |w|^2 + C sum max(0, 1 - y (w.x + b))`.
pub fn svm_objective(w: &[f64; 2], b: f64, xs: &[[f64; 2]], ys: &[f64], c: f64) -> f64 {
    let hinge: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (1.0 - y * (dot(w, x) + b)).max(0.0))
        .sum();
    0.5 * dot(w, w) + c * hinge
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmModel {
    pub w: [f64; 2],
    pub b: f64,
    pub standardizer: Standardizer,
}

impl SvmModel {
    /// Signed decision value; `>= 0` predicts a fall.
    pub fn score(&self, features: &[f64; 2]) -> f64 {
        dot(&self.w, &self.standardizer.apply(features)) + self.b
    }

    pub fn predict(&self, features: &[f64; 2]) -> Outcome {
        label_from_margin(self.score(features))
    }
}

/// Score exactly 0 resolves to `Fall`.
pub fn label_from_margin(score: f64) -> Outcome {
    if score >= 0.0 {
        Outcome::Fall
    } else {
        Outcome::NoFall
    }
}

fn check_training_set(samples: &[LabeledSample]) -> Result<(), ClassifyError> {
    if samples.len() < 2 {
        return Err(ClassifyError::TooFewSamples {
            need: 2,
            got: samples.len(),
        });
    }
    if samples
        .iter()
        .any(|s| !(s.features[0].is_finite() && s.features[1].is_finite()))
    {
        return Err(ClassifyError::NonFinite);
    }
    let falls = samples.iter().filter(|s| s.label.is_fall()).count();
    if falls == 0 || falls == samples.len() {
        return Err(ClassifyError::SingleClassTrainingSet);
    }
    Ok(())
}

/// Trains a linear soft-margin SVM on scaled features.
///
/// The dual is solved by SMO with maximal-violating-pair selection to a
/// tight KKT gap. The bias is then chosen by exact minimization of the
/// (convex, piecewise-linear) primal over `b` with `w` fixed, taking the
/// midpoint when the minimizer is an interval.
pub fn train_svm(
    samples: &[LabeledSample],
    c: f64,
    scaling: Scaling,
) -> Result<SvmModel, ClassifyError> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(ClassifyError::InvalidC(c));
    }
    check_training_set(samples)?;
    let raw: Vec<[f64; 2]> = samples.iter().map(|s| s.features).collect();
    let standardizer = Standardizer::fit(&raw, scaling)?;
    let xs: Vec<[f64; 2]> = raw.iter().map(|x| standardizer.apply(x)).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.label.sign()).collect();
    let w = solve_dual(&xs, &ys, c);
    let b = best_bias(&w, &xs, &ys, c);
    Ok(SvmModel { w, b, standardizer })
}

fn solve_dual(xs: &[[f64; 2]], ys: &[f64], c: f64) -> [f64; 2] {
    let n = xs.len();
    let kernel: Vec<Vec<f64>> = xs
        .iter()
        .map(|a| xs.iter().map(|b| dot(a, b)).collect())
        .collect();
    let kmax = (0..n).map(|i| kernel[i][i]).fold(0.0, f64::max);
    let eps = 1e-12 * (1.0 + kmax) * (1.0 + c);

    let mut alpha = vec![0.0; n];
    // Gradient of 0.5 a'Qa - 1'a with Q_ij = y_i y_j K_ij.
    let mut grad = vec![-1.0; n];
    for _ in 0..SMO_MAX_ITER {
        let mut i = usize::MAX;
        let mut gmax = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut gmin = f64::INFINITY;
        for t in 0..n {
            let v = -ys[t] * grad[t];
            let up = (ys[t] > 0.0 && alpha[t] < c) || (ys[t] < 0.0 && alpha[t] > 0.0);
            let low = (ys[t] < 0.0 && alpha[t] < c) || (ys[t] > 0.0 && alpha[t] > 0.0);
            if up && v > gmax {
                gmax = v;
                i = t;
            }
            if low && v < gmin {
                gmin = v;
                j = t;
            }
        }
        if i == usize::MAX || j == usize::MAX || gmax - gmin <= eps {
            break;
        }
        // Move alpha_i by +y_i t and alpha_j by -y_j t.
        let eta = kernel[i][i] + kernel[j][j] - 2.0 * kernel[i][j];
        let slope = ys[i] * grad[i] - ys[j] * grad[j];
        let room_i = if ys[i] > 0.0 { c - alpha[i] } else { alpha[i] };
        let room_j = if ys[j] > 0.0 { alpha[j] } else { c - alpha[j] };
        let bound = room_i.min(room_j);
        let step = if eta > 0.0 {
            (-slope / eta).min(bound)
        } else {
            bound
        };
        if !(step > 0.0) {
            break;
        }
        alpha[i] = (alpha[i] + ys[i] * step).clamp(0.0, c);
        alpha[j] = (alpha[j] - ys[j] * step).clamp(0.0, c);
        for k in 0..n {
            grad[k] += ys[k] * step * (kernel[k][i] - kernel[k][j]);
        }
    }
    let mut w = [0.0; 2];
    for ((a, y), x) in alpha.iter().zip(ys).zip(xs) {
        w[0] += a * y * x[0];
        w[1] += a * y * x[1];
    }
    w
}

fn best_bias(w: &[f64; 2], xs: &[[f64; 2]], ys: &[f64], c: f64) -> f64 {
    let candidates: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let b = y - dot(w, x);
            (b, svm_objective(w, b, xs, ys, c))
        })
        .collect();
    let best = candidates
        .iter()
        .map(|&(_, v)| v)
        .fold(f64::INFINITY, f64::min);
    let tol = 1e-12 * (1.0 + best.abs());
    let (lo, hi) = candidates
        .iter()
        .filter(|&&(_, v)| v <= best + tol)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(b, _)| {
            (lo.min(b), hi.max(b))
        });
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    /// `(person_id, scaled features, label)`.
    pub training_set: Vec<(u32, [f64; 2], Outcome)>,
    pub k: usize,
    pub standardizer: Standardizer,
}

impl KnnModel {
    /// Fraction of the `k` nearest training points that are falls.
    /// Distance ties go to the lower person id.
    pub fn score(&self, features: &[f64; 2]) -> f64 {
        let q = self.standardizer.apply(features);
        let mut ranked: Vec<(f64, u32, Outcome)> = self
            .training_set
            .iter()
            .map(|(id, x, label)| {
                let d = (x[0] - q[0]).powi(2) + (x[1] - q[1]).powi(2);
                (d, *id, *label)
            })
            .collect();
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let falls = ranked
            .iter()
            .take(self.k)
            .filter(|(_, _, l)| l.is_fall())
            .count();
        falls as f64 / self.k as f64
    }

    pub fn predict(&self, features: &[f64; 2]) -> Outcome {
        label_from_vote(self.score(features))
    }
}

/// Majority vote: a fall iff more than half the neighbours fell.
pub fn label_from_vote(score: f64) -> Outcome {
    if score > 0.5 {
        Outcome::Fall
    } else {
        Outcome::NoFall
    }
}

pub fn train_knn(
    samples: &[LabeledSample],
    k: usize,
    scaling: Scaling,
) -> Result<KnnModel, ClassifyError> {
    if samples
        .iter()
        .any(|s| !(s.features[0].is_finite() && s.features[1].is_finite()))
    {
        return Err(ClassifyError::NonFinite);
    }
    if k == 0 || k.is_multiple_of(2) || k > samples.len() {
        return Err(ClassifyError::InvalidK {
            k,
            n: samples.len(),
        });
    }
    let raw: Vec<[f64; 2]> = samples.iter().map(|s| s.features).collect();
    let standardizer = Standardizer::fit(&raw, scaling)?;
    let training_set = samples
        .iter()
        .map(|s| (s.person_id, standardizer.apply(&s.features), s.label))
        .collect();
    Ok(KnnModel {
        training_set,
        k,
        standardizer,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Svm { c: f64 },
    Knn { k: usize },
}

impl Method {
    pub fn svm() -> Self {
        Method::Svm { c: DEFAULT_C }
    }

    pub fn knn() -> Self {
        Method::Knn { k: DEFAULT_K }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Svm { .. } => "svm",
            Method::Knn { .. } => "knn",
        }
    }

    /// Shipped scaling per method: the variant whose leave-one-out results
    /// on the bundled feature table match the published ones.
    pub fn default_scaling(&self) -> Scaling {
        match self {
            Method::Svm { .. } => Scaling::None,
            Method::Knn { .. } => Scaling::ZScore,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Svm(SvmModel),
    Knn(KnnModel),
}

impl Model {
    pub fn score(&self, features: &[f64; 2]) -> f64 {
        match self {
            Model::Svm(m) => m.score(features),
            Model::Knn(m) => m.score(features),
        }
    }

    pub fn predict(&self, features: &[f64; 2]) -> Outcome {
        match self {
            Model::Svm(m) => m.predict(features),
            Model::Knn(m) => m.predict(features),
        }
    }
}

/// A method together with the scaling fit inside each training fold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trainer {
    pub method: Method,
    pub scaling: Scaling,
}

impl Trainer {
    pub fn new(method: Method, scaling: Scaling) -> Self {
        Self { method, scaling }
    }

    pub fn with_default_scaling(method: Method) -> Self {
        Self::new(method, method.default_scaling())
    }

    pub fn fit(&self, samples: &[LabeledSample]) -> Result<Model, ClassifyError> {
        match self.method {
            Method::Svm { c } => train_svm(samples, c, self.scaling).map(Model::Svm),
            Method::Knn { k } => {
                check_training_set(samples)?;
                train_knn(samples, k, self.scaling).map(Model::Knn)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub false_positives: usize,
    pub true_positives: usize,
    pub fpr: f64,
    pub tpr: f64,
}

/// ROC curve from (0,0) to (1,1), one point per distinct score threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub positives: usize,
    pub negatives: usize,
}

/// Sweeps the threshold over the distinct scores from high to low; tied
/// scores enter together, giving a diagonal segment.
pub fn roc_curve(scores: &[f64], labels: &[Outcome]) -> Result<RocCurve, ClassifyError> {
    assert_eq!(
        scores.len(),
        labels.len(),
        "scores and labels differ in length"
    );
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(ClassifyError::NonFinite);
    }
    let positives = labels.iter().filter(|l| l.is_fall()).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(ClassifyError::SingleClassScores);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let point = |fp: usize, tp: usize| RocPoint {
        false_positives: fp,
        true_positives: tp,
        fpr: fp as f64 / negatives as f64,
        tpr: tp as f64 / positives as f64,
    };
    let mut points = vec![point(0, 0)];
    let (mut fp, mut tp) = (0, 0);
    let mut idx = 0;
    while idx < order.len() {
        let threshold = scores[order[idx]];
        while idx < order.len() && scores[order[idx]] == threshold {
            if labels[order[idx]].is_fall() {
                tp += 1;
            } else {
                fp += 1;
            }
            idx += 1;
        }
        points.push(point(fp, tp));
    }
    Ok(RocCurve {
        points,
        positives,
        negatives,
    })
}

/// Trapezoidal area under the curve, accumulated in integer counts so the
/// result equals the Mann-Whitney statistic exactly.
pub fn auc(roc: &RocCurve) -> f64 {
    let twice_area: u128 = roc
        .points
        .windows(2)
        .map(|w| {
            let dx = (w[1].false_positives - w[0].false_positives) as u128;
            dx * (w[0].true_positives + w[1].true_positives) as u128
        })
        .sum();
    twice_area as f64 / (2 * roc.positives * roc.negatives) as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersonOutcome {
    pub person_id: u32,
    pub true_label: Outcome,
    pub predicted: Outcome,
    pub score: f64,
}

impl PersonOutcome {
    pub fn is_correct(&self) -> bool {
        self.true_label == self.predicted
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoocvReport {
    pub trainer: Trainer,
    /// Ordered by person id.
    pub per_person: Vec<PersonOutcome>,
    pub correct: usize,
    pub accuracy: f64,
    pub roc: RocCurve,
    pub auc: f64,
}

impl LoocvReport {
    pub fn misclassified(&self) -> Vec<u32> {
        self.per_person
            .iter()
            .filter(|p| !p.is_correct())
            .map(|p| p.person_id)
            .collect()
    }
}

/// Leave-one-out cross-validation. Each held-out score comes from a model
/// (and standardizer) fit on the remaining samples only; the ROC pools the
/// held-out scores.
pub fn loocv(samples: &[LabeledSample], trainer: &Trainer) -> Result<LoocvReport, ClassifyError> {
    if samples.len() < 3 {
        return Err(ClassifyError::TooFewSamples {
            need: 3,
            got: samples.len(),
        });
    }
    check_training_set(samples)?;
    let mut ordered = samples.to_vec();
    ordered.sort_by_key(|s| s.person_id);

    let mut per_person = Vec::with_capacity(ordered.len());
    for (i, held_out) in ordered.iter().enumerate() {
        let train: Vec<LabeledSample> = ordered
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, s)| *s)
            .collect();
        let model = trainer
            .fit(&train)
            .map_err(|e| ClassifyError::FoldDegenerate {
                person_id: held_out.person_id,
                source: Box::new(e),
            })?;
        per_person.push(PersonOutcome {
            person_id: held_out.person_id,
            true_label: held_out.label,
            predicted: model.predict(&held_out.features),
            score: model.score(&held_out.features),
        });
    }
    let correct = per_person.iter().filter(|p| p.is_correct()).count();
    let scores: Vec<f64> = per_person.iter().map(|p| p.score).collect();
    let labels: Vec<Outcome> = per_person.iter().map(|p| p.true_label).collect();
    let roc = roc_curve(&scores, &labels)?;
    let auc = auc(&roc);
    Ok(LoocvReport {
        trainer: *trainer,
        accuracy: correct as f64 / per_person.len() as f64,
        correct,
        per_person,
        roc,
        auc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Outcome::{Fall, NoFall};

    fn sample(id: u32, x: f64, y: f64, label: Outcome) -> LabeledSample {
        LabeledSample::new(id, [x, y], label)
    }

    #[test]
    fn standardize_two_points() {
        let s = Standardizer::fit(&[[0.0, 0.0], [2.0, 2.0]], Scaling::ZScore).unwrap();
        assert_eq!(s.offset, [1.0, 1.0]);
        assert_eq!(s.scale, [1.0, 1.0]);
        assert_eq!(s.apply(&[0.0, 0.0]), [-1.0, -1.0]);
        assert_eq!(s.apply(&[2.0, 2.0]), [1.0, 1.0]);
        // Unseen point: plain affine map.
        assert_eq!(s.apply(&[5.0, -3.0]), [4.0, -4.0]);
    }

    #[test]
    fn minmax_and_zero_variance() {
        let s =
            Standardizer::fit(&[[1.0, 10.0], [3.0, 30.0], [2.0, 20.0]], Scaling::MinMax).unwrap();
        assert_eq!(s.apply(&[3.0, 10.0]), [1.0, 0.0]);
        assert_eq!(
            Standardizer::fit(&[[1.0, 5.0], [2.0, 5.0]], Scaling::ZScore),
            Err(ClassifyError::ZeroVariance { dimension: 1 })
        );
        assert_eq!(
            Standardizer::fit(&[[1.0, 5.0]], Scaling::None),
            Ok(Standardizer::IDENTITY)
        );
    }

    #[test]
    fn symmetric_separable_pair() {
        let data = [sample(1, -1.0, 0.0, NoFall), sample(2, 1.0, 0.0, Fall)];
        let m = train_svm(&data, 1e6, Scaling::None).unwrap();
        assert!((m.w[0] - 1.0).abs() < 1e-9, "{m:?}");
        assert!(m.w[1].abs() < 1e-12);
        assert!(m.b.abs() < 1e-9);
        assert_eq!(m.predict(&[0.3, 4.0]), Fall);
        assert_eq!(m.predict(&[-0.3, 4.0]), NoFall);
    }

    #[test]
    fn zero_score_is_a_fall() {
        let m = SvmModel {
            w: [1.0, -1.0],
            b: 0.0,
            standardizer: Standardizer::IDENTITY,
        };
        assert_eq!(m.score(&[2.0, 2.0]), 0.0);
        assert_eq!(m.predict(&[2.0, 2.0]), Fall);
    }

    #[test]
    fn svm_score_is_affine() {
        let m = SvmModel {
            w: [0.7, -1.3],
            b: 0.25,
            standardizer: Standardizer {
                offset: [3.0, -1.0],
                scale: [2.0, 0.5],
            },
        };
        let x = [1.0, 4.0];
        let z = [-2.0, 0.5];
        for alpha in [0.0, 0.3, 1.0, 1.7] {
            let mix = [
                alpha * x[0] + (1.0 - alpha) * z[0],
                alpha * x[1] + (1.0 - alpha) * z[1],
            ];
            let lhs = m.score(&mix);
            let rhs = alpha * m.score(&x) + (1.0 - alpha) * m.score(&z);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn svm_sign_matches_direct_evaluation_on_grid() {
        let m = SvmModel {
            w: [0.8, -0.6],
            b: 0.13,
            standardizer: Standardizer::IDENTITY,
        };
        for i in 0..50 {
            for j in 0..50 {
                let p = [-2.5 + 0.1 * i as f64, -2.5 + 0.1 * j as f64];
                // Which of the two margin hyperplanes w.x + b = +-1 is nearer.
                let to_pos = (0.8 * p[0] - 0.6 * p[1] + 0.13 - 1.0).abs();
                let to_neg = (0.8 * p[0] - 0.6 * p[1] + 0.13 + 1.0).abs();
                let expected = if to_pos <= to_neg { Fall } else { NoFall };
                assert_eq!(m.predict(&p), expected, "{p:?}");
            }
        }
    }

    #[test]
    fn duplicated_data_with_half_c_keeps_boundary() {
        let data = [
            sample(1, 0.0, 0.0, NoFall),
            sample(2, 1.0, 0.2, NoFall),
            sample(3, 0.5, 1.5, Fall),
            sample(4, 1.8, 1.0, Fall),
            sample(5, 1.2, 0.4, Fall),
        ];
        let mut doubled = data.to_vec();
        doubled.extend(data.iter().map(|s| LabeledSample {
            person_id: s.person_id + 100,
            ..*s
        }));
        let a = train_svm(&data, 1.0, Scaling::None).unwrap();
        let b = train_svm(&doubled, 0.5, Scaling::None).unwrap();
        for i in 0..40 {
            for j in 0..40 {
                let p = [-0.5 + 0.07 * i as f64, -0.5 + 0.07 * j as f64];
                assert_eq!(a.predict(&p), b.predict(&p), "{p:?}");
            }
        }
    }

    #[test]
    fn single_class_is_rejected() {
        let data = [sample(1, 0.0, 0.0, Fall), sample(2, 1.0, 1.0, Fall)];
        assert_eq!(
            train_svm(&data, 1.0, Scaling::None),
            Err(ClassifyError::SingleClassTrainingSet)
        );
        assert_eq!(
            Trainer::new(Method::knn(), Scaling::None).fit(&[data[0], data[1], data[0]]),
            Err(ClassifyError::SingleClassTrainingSet)
        );
    }

    #[test]
    fn knn_examples() {
        let all_fall: Vec<_> = (0..5).map(|i| sample(i, i as f64, 0.0, Fall)).collect();
        let m = train_knn(&all_fall, 3, Scaling::None).unwrap();
        assert_eq!(m.score(&[100.0, -4.0]), 1.0);
        assert_eq!(m.predict(&[100.0, -4.0]), Fall);

        let mixed = [
            sample(1, 0.0, 0.0, Fall),
            sample(2, 1.0, 0.0, Fall),
            sample(3, 0.0, 1.5, NoFall),
            sample(4, 9.0, 9.0, NoFall),
            sample(5, 8.0, 9.0, NoFall),
        ];
        let m = train_knn(&mixed, 3, Scaling::None).unwrap();
        assert!((m.score(&[0.2, 0.2]) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.predict(&[0.2, 0.2]), Fall);
    }

    #[test]
    fn knn_distance_ties_prefer_lower_person_id() {
        // Query equidistant from ids 7 (fall) and 3 (no fall); k = 1.
        let data = [sample(7, 1.0, 0.0, Fall), sample(3, -1.0, 0.0, NoFall)];
        let m = train_knn(&data, 1, Scaling::None).unwrap();
        assert_eq!(m.predict(&[0.0, 0.0]), NoFall);
    }

    #[test]
    fn knn_rejects_bad_k() {
        let data = [sample(1, 0.0, 0.0, Fall), sample(2, 1.0, 1.0, NoFall)];
        assert_eq!(
            train_knn(&data, 2, Scaling::None),
            Err(ClassifyError::InvalidK { k: 2, n: 2 })
        );
        assert_eq!(
            train_knn(&data, 3, Scaling::None),
            Err(ClassifyError::InvalidK { k: 3, n: 2 })
        );
    }

    #[test]
    fn roc_examples() {
        let labels = [Fall, Fall, NoFall, NoFall];
        let roc = roc_curve(&[0.9, 0.8, 0.3, 0.1], &labels).unwrap();
        assert_eq!(auc(&roc), 1.0);

        let roc = roc_curve(&[0.5; 4], &labels).unwrap();
        assert_eq!(roc.points.len(), 2);
        assert_eq!(auc(&roc), 0.5);

        let roc = roc_curve(&[0.1, 0.2, 0.3, 0.4], &labels).unwrap();
        assert_eq!(auc(&roc), 0.0);
        let first = roc.points[0];
        let last = *roc.points.last().unwrap();
        assert_eq!((first.fpr, first.tpr), (0.0, 0.0));
        assert_eq!((last.fpr, last.tpr), (1.0, 1.0));

        assert_eq!(
            roc_curve(&[0.1, 0.2], &[Fall, Fall]),
            Err(ClassifyError::SingleClassScores)
        );
    }

    #[test]
    fn separable_clusters_give_perfect_loocv() {
        let mut data = Vec::new();
        for i in 0..6 {
            let t = i as f64 * 0.1;
            data.push(sample(i, 10.0 + t, 10.0 - t, Fall));
            data.push(sample(i + 10, -10.0 - t, -10.0 + t, NoFall));
        }
        for method in [Method::svm(), Method::knn()] {
            for scaling in Scaling::ALL {
                let r = loocv(&data, &Trainer::new(method, scaling)).unwrap();
                assert_eq!(r.accuracy, 1.0, "{method:?} {scaling}");
                assert_eq!(r.auc, 1.0);
            }
        }
    }

    #[test]
    fn loocv_needs_three_samples() {
        let data = [sample(1, 0.0, 0.0, Fall), sample(2, 1.0, 1.0, NoFall)];
        assert_eq!(
            loocv(&data, &Trainer::with_default_scaling(Method::svm())),
            Err(ClassifyError::TooFewSamples { need: 3, got: 2 })
        );
    }

    #[test]
    fn loocv_reports_degenerate_fold() {
        let data = [
            sample(1, 0.0, 0.0, Fall),
            sample(2, 1.0, 1.0, NoFall),
            sample(3, 2.0, 0.5, NoFall),
        ];
        let err = loocv(&data, &Trainer::new(Method::svm(), Scaling::None)).unwrap_err();
        assert!(matches!(
            err,
            ClassifyError::FoldDegenerate { person_id: 1, .. }
        ));
    }
}
