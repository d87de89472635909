//! Waveform-family classifier and pitch-error metrics.
//!
//! The classifier is multinomial logistic regression over standardized,
//! mean/variance-pooled log-mel features, trained by full-batch gradient
//! descent from zero weights.

use alloc::vec::Vec;

use crate::analysis::Spectrogram;
use crate::{Error, Result};

/// Relative width of one equal-tempered semitone, `2^(1/12) − 1`.
pub fn semitone_fraction() -> f64 {
    libm::pow(2.0, 1.0 / 12.0) - 1.0
}

/// Per-band mean and population variance of a log-mel spectrogram over time.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledMelFeature {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
}

impl PooledMelFeature {
    pub fn from_log_mel(mel: &Spectrogram) -> Self {
        let bands = mel.n_bins;
        let frames = mel.n_frames.max(1) as f64;
        let mut mean = alloc::vec![0.0; bands];
        for frame in mel.frames() {
            for (m, v) in mean.iter_mut().zip(frame) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= frames);
        let mut variance = alloc::vec![0.0; bands];
        for frame in mel.frames() {
            for ((s, v), m) in variance.iter_mut().zip(frame).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        variance.iter_mut().for_each(|s| *s /= frames);
        Self { mean, variance }
    }

    /// `[mean…, variance…]`
    pub fn to_vector(&self) -> Vec<f64> {
        let mut v = self.mean.clone();
        v.extend_from_slice(&self.variance);
        v
    }
}

/// Column-wise z-scoring. Constant columns get unit scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptySplit)?;
        let d = first.len();
        let n = rows.len() as f64;
        let mut mean = alloc::vec![0.0; d];
        for row in rows {
            check_len(row, d)?;
            for (m, x) in mean.iter_mut().zip(row) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = alloc::vec![0.0; d];
        for row in rows {
            for ((v, x), m) in var.iter_mut().zip(row).zip(&mean) {
                *v += (x - m) * (x - m);
            }
        }
        let std = var
            .into_iter()
            .map(|v| {
                let s = libm::sqrt(v / n);
                if s > 1e-12 { s } else { 1.0 }
            })
            .collect();
        Ok(Self { mean, std })
    }

    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((x, m), s)| (x - m) / s)
            .collect()
    }
}

fn check_len(row: &[f64], d: usize) -> Result<()> {
    if row.len() != d {
        return Err(Error::ShapeMismatch { expected: d, got: row.len() });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub iterations: usize,
    pub l2: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { learning_rate: 0.1, iterations: 2000, l2: 1e-3 }
    }
}

/// Row-major `n_classes × (n_features + 1)` weights; the last column is the
/// bias.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierModel {
    pub n_classes: usize,
    pub n_features: usize,
    pub weights: Vec<f64>,
    pub standardizer: Standardizer,
    /// Full-batch training loss before each update, then the final loss.
    pub loss_history: Vec<f64>,
}

fn softmax_in_place(z: &mut [f64]) {
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = libm::exp(*v - max);
        sum += *v;
    }
    z.iter_mut().for_each(|v| *v /= sum);
}

fn logits(weights: &[f64], n_classes: usize, x: &[f64], out: &mut [f64]) {
    let stride = x.len() + 1;
    for (c, z) in out.iter_mut().enumerate().take(n_classes) {
        let w = &weights[c * stride..(c + 1) * stride];
        *z = w[..x.len()].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + w[x.len()];
    }
}

/// Mean cross-entropy plus `l2/2 · ‖W‖²` (bias excluded), and its gradient
/// with respect to `weights`.
pub fn loss_and_gradient(
    weights: &[f64],
    n_classes: usize,
    x: &[Vec<f64>],
    labels: &[usize],
    l2: f64,
) -> (f64, Vec<f64>) {
    let d = x.first().map_or(0, Vec::len);
    let stride = d + 1;
    let n = x.len() as f64;
    let mut grad = alloc::vec![0.0; weights.len()];
    let mut loss = 0.0;
    let mut p = alloc::vec![0.0; n_classes];
    for (row, &y) in x.iter().zip(labels) {
        logits(weights, n_classes, row, &mut p);
        softmax_in_place(&mut p);
        loss -= libm::log(p[y].max(1e-300));
        for c in 0..n_classes {
            let err = p[c] - if c == y { 1.0 } else { 0.0 };
            let g = &mut grad[c * stride..(c + 1) * stride];
            for (gj, xj) in g[..d].iter_mut().zip(row) {
                *gj += err * xj;
            }
            g[d] += err;
        }
    }
    loss /= n;
    grad.iter_mut().for_each(|g| *g /= n);
    for c in 0..n_classes {
        for j in 0..d {
            let w = weights[c * stride + j];
            loss += 0.5 * l2 * w * w;
            grad[c * stride + j] += l2 * w;
        }
    }
    (loss, grad)
}

/// Fits standardization and weights on the training rows only.
///
/// Fails with [`Error::LossIncreased`] if any step raises the full-batch loss.
pub fn train_classifier(
    features: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
    cfg: &TrainConfig,
) -> Result<ClassifierModel> {
    if features.len() != labels.len() {
        return Err(Error::ShapeMismatch { expected: features.len(), got: labels.len() });
    }
    if labels.iter().any(|&y| y >= n_classes) {
        return Err(Error::InvalidConfig("label out of range"));
    }
    let mut present = alloc::vec![false; n_classes];
    labels.iter().for_each(|&y| present[y] = true);
    let classes = present.iter().filter(|p| **p).count();
    if classes < 2 {
        return Err(Error::DegenerateTrainingSet { classes });
    }
    let standardizer = Standardizer::fit(features)?;
    let x: Vec<Vec<f64>> = features.iter().map(|r| standardizer.transform(r)).collect();
    let n_features = standardizer.mean.len();
    let mut weights = alloc::vec![0.0; n_classes * (n_features + 1)];
    let mut loss_history = Vec::with_capacity(cfg.iterations + 1);
    for iteration in 0..cfg.iterations {
        let (loss, grad) = loss_and_gradient(&weights, n_classes, &x, labels, cfg.l2);
        if let Some(&previous) = loss_history.last() {
            if loss > previous + 1e-12 * libm::fabs(previous) {
                return Err(Error::LossIncreased { iteration, previous, current: loss });
            }
        }
        loss_history.push(loss);
        for (w, g) in weights.iter_mut().zip(&grad) {
            *w -= cfg.learning_rate * g;
        }
    }
    let (final_loss, _) = loss_and_gradient(&weights, n_classes, &x, labels, cfg.l2);
    loss_history.push(final_loss);
    Ok(ClassifierModel { n_classes, n_features, weights, standardizer, loss_history })
}

impl ClassifierModel {
    pub fn predict_proba(&self, features: &[f64]) -> Vec<f64> {
        let x = self.standardizer.transform(features);
        let mut p = alloc::vec![0.0; self.n_classes];
        logits(&self.weights, self.n_classes, &x, &mut p);
        softmax_in_place(&mut p);
        p
    }

    /// Argmax class; ties go to the lowest index.
    pub fn predict(&self, features: &[f64]) -> usize {
        let p = self.predict_proba(features);
        let mut best = 0;
        for (c, &v) in p.iter().enumerate() {
            if v > p[best] {
                best = c;
            }
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationMetrics {
    pub n: usize,
    pub correct: usize,
    pub accuracy: f64,
    /// `confusion[true][predicted]`
    pub confusion: Vec<Vec<usize>>,
}

pub fn classification_metrics(
    truth: &[usize],
    predicted: &[usize],
    n_classes: usize,
) -> Result<ClassificationMetrics> {
    if truth.is_empty() {
        return Err(Error::EmptySplit);
    }
    if truth.len() != predicted.len() {
        return Err(Error::ShapeMismatch { expected: truth.len(), got: predicted.len() });
    }
    let mut confusion = alloc::vec![alloc::vec![0usize; n_classes]; n_classes];
    for (&t, &p) in truth.iter().zip(predicted) {
        if t >= n_classes || p >= n_classes {
            return Err(Error::InvalidConfig("class index out of range"));
        }
        confusion[t][p] += 1;
    }
    let correct = (0..n_classes).map(|c| confusion[c][c]).sum();
    Ok(ClassificationMetrics {
        n: truth.len(),
        correct,
        accuracy: correct as f64 / truth.len() as f64,
        confusion,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct F0Metrics {
    pub n: usize,
    pub n_voiced: usize,
    /// Unvoiced clips: excluded from MAE/MedAE, counted as misses in the rate.
    pub n_unvoiced: usize,
    pub mae_hz: Option<f64>,
    pub medae_hz: Option<f64>,
    /// Fraction of all `n` clips with `|error| ≤ multiplier · (2^(1/12) − 1) · f0`.
    pub semitone_rate: f64,
}

/// Scores `(nominal_f0, estimate)` pairs.
pub fn f0_metrics(pairs: &[(f64, Option<f64>)], tolerance_multiplier: f64) -> Result<F0Metrics> {
    if pairs.is_empty() {
        return Err(Error::NoSingleTones);
    }
    let semitone = semitone_fraction() * tolerance_multiplier;
    let mut errors = Vec::with_capacity(pairs.len());
    let mut hits = 0usize;
    for &(nominal, est) in pairs {
        if let Some(f) = est {
            let err = libm::fabs(f - nominal);
            if err <= semitone * nominal {
                hits += 1;
            }
            errors.push(err);
        }
    }
    let n_voiced = errors.len();
    let mae_hz = (n_voiced > 0).then(|| errors.iter().sum::<f64>() / n_voiced as f64);
    Ok(F0Metrics {
        n: pairs.len(),
        n_voiced,
        n_unvoiced: pairs.len() - n_voiced,
        mae_hz,
        medae_hz: crate::analysis::median(&errors),
        semitone_rate: hits as f64 / pairs.len() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Xoshiro256StarStar;

    /// Five Gaussian-ish blobs in 3-D, one per class, well separated.
    fn blobs(per_class: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for c in 0..5 {
            for _ in 0..per_class {
                let jitter = |r: &mut Xoshiro256StarStar| r.next_f64() - 0.5;
                x.push(std::vec![
                    10.0 * c as f64 + jitter(&mut rng),
                    (c % 2) as f64 * 5.0 + jitter(&mut rng),
                    jitter(&mut rng),
                ]);
                y.push(c);
            }
        }
        (x, y)
    }

    #[test]
    fn semitone_width() {
        assert!((semitone_fraction() - 0.059_463).abs() < 1e-6);
    }

    #[test]
    fn pooled_features_use_population_variance() {
        let mut s = Spectrogram::zeros(2, 2);
        s.data.copy_from_slice(&[1.0, 5.0, 3.0, 5.0]);
        let p = PooledMelFeature::from_log_mel(&s);
        assert_eq!(p.mean, [2.0, 5.0]);
        assert_eq!(p.variance, [1.0, 0.0]);
        assert_eq!(p.to_vector(), [2.0, 5.0, 1.0, 0.0]);
    }

    #[test]
    fn standardizer_handles_constant_columns() {
        let rows = std::vec![std::vec![1.0, 7.0], std::vec![3.0, 7.0]];
        let s = Standardizer::fit(&rows).unwrap();
        assert_eq!(s.transform(&[2.0, 7.0]), [0.0, 0.0]);
        assert_eq!(s.transform(&[3.0, 9.0]), [1.0, 2.0]);
    }

    #[test]
    fn standardization_depends_on_the_fitted_rows() {
        // Statistics from another split give different vectors, so the
        // statistics we keep must be the training ones.
        let (x, y) = blobs(10, 3);
        let model = train_classifier(&x[..40], &y[..40], 5, &TrainConfig::default()).unwrap();
        let refit = Standardizer::fit(&x[40..]).unwrap();
        assert_eq!(model.standardizer, Standardizer::fit(&x[..40]).unwrap());
        assert_ne!(model.standardizer.transform(&x[45]), refit.transform(&x[45]));
    }

    #[test]
    fn zero_iterations_give_uniform_probabilities() {
        let (x, y) = blobs(4, 1);
        let cfg = TrainConfig { iterations: 0, ..TrainConfig::default() };
        let model = train_classifier(&x, &y, 5, &cfg).unwrap();
        for p in model.predict_proba(&x[7]) {
            assert!((p - 0.2).abs() < 1e-15);
        }
        assert!((model.loss_history[0] - 5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (x, y) = blobs(3, 9);
        let mut rng = Xoshiro256StarStar::seed_from_u64(5);
        let w: Vec<f64> = (0..5 * 4).map(|_| rng.next_f64() - 0.5).collect();
        let (_, grad) = loss_and_gradient(&w, 5, &x, &y, 1e-3);
        let h = 1e-6;
        let mut worst = 0.0f64;
        for i in 0..w.len() {
            let mut plus = w.clone();
            let mut minus = w.clone();
            plus[i] += h;
            minus[i] -= h;
            let numeric = (loss_and_gradient(&plus, 5, &x, &y, 1e-3).0
                - loss_and_gradient(&minus, 5, &x, &y, 1e-3).0)
                / (2.0 * h);
            let rel = (numeric - grad[i]).abs() / numeric.abs().max(grad[i].abs()).max(1e-8);
            worst = worst.max(rel);
        }
        assert!(worst < 1e-4, "{worst}");
    }

    #[test]
    fn separable_blobs_are_learned_with_falling_loss() {
        let (x, y) = blobs(20, 2);
        let model = train_classifier(&x, &y, 5, &TrainConfig::default()).unwrap();
        assert_eq!(model.loss_history.len(), 2001);
        assert!(model.loss_history.windows(2).all(|w| w[1] <= w[0]));
        let predicted: Vec<usize> = x.iter().map(|r| model.predict(r)).collect();
        let m = classification_metrics(&y, &predicted, 5).unwrap();
        assert_eq!(m.accuracy, 1.0);
        assert_eq!(m.confusion[3][3], 20);
    }

    #[test]
    fn training_is_deterministic() {
        let (x, y) = blobs(6, 4);
        let cfg = TrainConfig { iterations: 200, ..TrainConfig::default() };
        assert_eq!(
            train_classifier(&x, &y, 5, &cfg).unwrap(),
            train_classifier(&x, &y, 5, &cfg).unwrap()
        );
    }

    #[test]
    fn divergent_learning_rate_is_reported() {
        let (x, y) = blobs(6, 4);
        let cfg = TrainConfig { learning_rate: 500.0, iterations: 50, l2: 1e-3 };
        assert!(matches!(
            train_classifier(&x, &y, 5, &cfg),
            Err(Error::LossIncreased { .. })
        ));
    }

    #[test]
    fn degenerate_training_sets() {
        let x = std::vec![std::vec![1.0], std::vec![2.0]];
        assert_eq!(
            train_classifier(&x, &[3, 3], 5, &TrainConfig::default()),
            Err(Error::DegenerateTrainingSet { classes: 1 })
        );
        assert!(train_classifier(&x, &[0], 5, &TrainConfig::default()).is_err());
        assert!(train_classifier(&x, &[0, 7], 5, &TrainConfig::default()).is_err());
    }

    #[test]
    fn metrics_shapes_and_errors() {
        let m = classification_metrics(&[0, 1, 1], &[0, 1, 0], 2).unwrap();
        assert_eq!((m.n, m.correct), (3, 2));
        assert_eq!(m.confusion, [[1, 0], [1, 1]]);
        assert_eq!(classification_metrics(&[], &[], 2), Err(Error::EmptySplit));
    }

    #[test]
    fn f0_metric_examples() {
        // Semitone at 1000 Hz is about 59.46 Hz.
        let m = f0_metrics(&[(1000.0, Some(1059.0)), (1000.0, Some(1060.0)), (500.0, None)], 1.0)
            .unwrap();
        assert_eq!((m.n, m.n_voiced, m.n_unvoiced), (3, 2, 1));
        assert!((m.semitone_rate - 1.0 / 3.0).abs() < 1e-12);
        assert!((m.mae_hz.unwrap() - 59.5).abs() < 1e-9);
        assert_eq!(f0_metrics(&[], 1.0), Err(Error::NoSingleTones));
        let none = f0_metrics(&[(500.0, None)], 1.0).unwrap();
        assert_eq!((none.mae_hz, none.medae_hz, none.semitone_rate), (None, None, 0.0));
    }
}
