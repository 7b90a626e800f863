use serde::{Deserialize, Serialize};

use super::transport::TransportOperator;
use super::EstimateError;
use crate::math::Spectrum;
use crate::num::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorConfig {
    /// L1 weight on the mean absolute emission.
    pub alpha: f64,
    /// Schedule clip level; also the pruning level.
    pub brightness_threshold: f64,
    pub clip_period_epochs: usize,
    pub boost_factor: f64,
    /// Gradient step; `None` uses the inverse Lipschitz constant of the
    /// data term.
    pub step_size: Option<f64>,
    pub epochs: usize,
    pub steps_per_epoch: usize,
    /// Uniform starting emission.
    pub init: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            alpha: 1e-4,
            brightness_threshold: 0.2,
            clip_period_epochs: 2,
            boost_factor: 1.5,
            step_size: None,
            epochs: 20,
            steps_per_epoch: 200,
            init: 1e-3,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<(), EstimateError> {
        let bad = |m: &str| Err(EstimateError::Config(m.into()));
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be finite and non-negative");
        }
        if !(self.brightness_threshold >= 0.0) {
            return bad("brightness_threshold must be non-negative");
        }
        if !(self.boost_factor >= 1.0) {
            return bad("boost_factor must be at least 1");
        }
        if self.clip_period_epochs == 0 || self.epochs == 0 || self.steps_per_epoch == 0 {
            return bad("clip_period_epochs, epochs and steps_per_epoch must be positive");
        }
        if let Some(s) = self.step_size {
            if !(s > 0.0 && s.is_finite()) {
                return bad("step_size must be positive");
            }
        }
        if !(self.init >= 0.0 && self.init.is_finite()) {
            return bad("init must be non-negative");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LossRecord {
    pub epoch: usize,
    pub loss: f64,
    pub event: ScheduleEvent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleEvent {
    Start,
    Descent,
    ClipBoost,
    FinalClip,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Estimate<S> {
    pub emission: Vec<Spectrum<S>>,
    pub history: Vec<LossRecord>,
}

/// Normal equations of the data term, per channel, in f64.
struct Normal {
    gram: [Vec<f64>; 3],
    rhs: [Vec<f64>; 3],
    n_values: f64,
    n_params: f64,
}

impl Normal {
    fn new<S: Real>(op: &TransportOperator<S>, target: &[Spectrum<S>]) -> Self {
        let nf = op.face_count();
        let cols: Vec<Vec<[f64; 3]>> = (0..nf)
            .map(|f| op.column(f).iter().map(|s| s.to_f64()).collect())
            .collect();
        let tgt: Vec<[f64; 3]> = target.iter().map(|s| s.to_f64()).collect();
        let mut gram: [Vec<f64>; 3] = std::array::from_fn(|_| vec![0.0; nf * nf]);
        let mut rhs: [Vec<f64>; 3] = std::array::from_fn(|_| vec![0.0; nf]);
        for f in 0..nf {
            for g in f..nf {
                for c in 0..3 {
                    let v: f64 = cols[f].iter().zip(&cols[g]).map(|(a, b)| a[c] * b[c]).sum();
                    gram[c][f * nf + g] = v;
                    gram[c][g * nf + f] = v;
                }
            }
            for c in 0..3 {
                rhs[c][f] = cols[f].iter().zip(&tgt).map(|(a, t)| a[c] * t[c]).sum();
            }
        }
        Self {
            gram,
            rhs,
            n_values: (target.len() * 3) as f64,
            n_params: (nf * 3) as f64,
        }
    }

    fn faces(&self) -> usize {
        self.rhs[0].len()
    }

    fn gradient(&self, e: &[[f64; 3]], alpha: f64, out: &mut [[f64; 3]]) {
        let nf = self.faces();
        for f in 0..nf {
            for c in 0..3 {
                let row = &self.gram[c][f * nf..(f + 1) * nf];
                let ge: f64 = row.iter().zip(e).map(|(g, v)| g * v[c]).sum();
                // Iterates stay non-negative, where |E| = E: the L1 slope is
                // +alpha/M even at 0, which makes the clamped step a prox step.
                out[f][c] = 2.0 * (ge - self.rhs[c][f]) / self.n_values + alpha / self.n_params;
            }
        }
    }

    /// Largest eigenvalue of the data-term Hessian over all channels.
    fn lipschitz(&self) -> f64 {
        let nf = self.faces();
        let mut best: f64 = 0.0;
        for c in 0..3 {
            let mut v = vec![1.0 / (nf as f64).sqrt(); nf];
            let mut lam = 0.0;
            for _ in 0..200 {
                let w: Vec<f64> = (0..nf)
                    .map(|f| {
                        self.gram[c][f * nf..(f + 1) * nf]
                            .iter()
                            .zip(&v)
                            .map(|(g, x)| g * x)
                            .sum()
                    })
                    .collect();
                let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm == 0.0 {
                    break;
                }
                lam = norm;
                v = w.into_iter().map(|x| x / norm).collect();
            }
            best = best.max(lam);
        }
        2.0 * best / self.n_values
    }
}

/// Mean squared pixel error over every pose and channel plus `alpha` times
/// the mean absolute emission over faces and channels.
pub fn loss<S: Real>(
    op: &TransportOperator<S>,
    e: &[Spectrum<S>],
    target: &[Spectrum<S>],
    alpha: S,
) -> S {
    let pred = op.apply(e);
    let mut se = S::zero();
    for (p, t) in pred.iter().zip(target) {
        for c in 0..3 {
            let d = p.channel(c) - t.channel(c);
            se = se + d * d;
        }
    }
    let l1: S = e.iter().map(|s| s.r.abs() + s.g.abs() + s.b.abs()).sum();
    se / S::from_usize_lossy(target.len() * 3) + alpha * l1 / S::from_usize_lossy(e.len() * 3)
}

/// Analytic gradient of [`loss`] (subgradient 0 for the L1 term at 0).
pub fn gradient<S: Real>(
    op: &TransportOperator<S>,
    e: &[Spectrum<S>],
    target: &[Spectrum<S>],
    alpha: S,
) -> Vec<Spectrum<S>> {
    let pred = op.apply(e);
    let n = S::from_usize_lossy(target.len() * 3);
    let m = S::from_usize_lossy(e.len() * 3);
    let two = S::lit(2.0);
    (0..op.face_count())
        .map(|f| {
            let mut g = Spectrum::black();
            for ((a, p), t) in op.column(f).iter().zip(&pred).zip(target) {
                for c in 0..3 {
                    let v = g.channel(c) + a.channel(c) * (p.channel(c) - t.channel(c));
                    g.set_channel(c, v);
                }
            }
            g.map(|v| two * v / n)
                + e[f].map(|v| {
                    if v > S::zero() {
                        alpha / m
                    } else if v < S::zero() {
                        -alpha / m
                    } else {
                        S::zero()
                    }
                })
        })
        .collect()
}

fn clip(e: &mut [[f64; 3]], threshold: f64, boost: Option<f64>) {
    for v in e.iter_mut().flatten() {
        if *v < threshold {
            *v = 0.0;
        } else if let Some(b) = boost {
            *v *= b;
        }
    }
}

/// Projected gradient descent with the periodic clip/boost schedule and a
/// final clip. The last schedule tick only clips, so the returned emission
/// is never left inflated by a boost.
pub fn optimize_emission<S: Real>(
    config: &EstimatorConfig,
    op: &TransportOperator<S>,
    target: &[Spectrum<S>],
) -> Result<Estimate<S>, EstimateError> {
    config.validate()?;
    if target.len() != op.pixel_count() {
        return Err(EstimateError::Shape(format!(
            "{} target pixels for an operator over {}",
            target.len(),
            op.pixel_count()
        )));
    }
    let normal = Normal::new(op, target);
    let nf = op.face_count();
    let to_spectra =
        |e: &[[f64; 3]]| -> Vec<Spectrum<S>> { e.iter().map(|v| Spectrum::from_f64(*v)).collect() };
    let eval =
        |e: &[[f64; 3]]| loss(op, &to_spectra(e), target, S::lit(config.alpha)).to_f64_lossy();
    let step = match config.step_size {
        Some(s) => s,
        None => {
            let l = normal.lipschitz();
            if l > 0.0 {
                1.0 / l
            } else {
                1.0
            }
        }
    };
    let mut e = vec![[config.init; 3]; nf];
    let initial = eval(&e);
    let mut history = vec![LossRecord {
        epoch: 0,
        loss: initial,
        event: ScheduleEvent::Start,
    }];
    let mut grad = vec![[0.0; 3]; nf];
    for epoch in 1..=config.epochs {
        for _ in 0..config.steps_per_epoch {
            normal.gradient(&e, config.alpha, &mut grad);
            for (v, g) in e.iter_mut().flatten().zip(grad.iter().flatten()) {
                *v = (*v - step * g).max(0.0);
            }
        }
        let l = eval(&e);
        if !l.is_finite() || l > 10.0 * initial.max(f64::MIN_POSITIVE) {
            return Err(EstimateError::Diverged {
                epoch,
                loss: l,
                initial,
                step,
            });
        }
        history.push(LossRecord {
            epoch,
            loss: l,
            event: ScheduleEvent::Descent,
        });
        if epoch % config.clip_period_epochs == 0 && epoch < config.epochs {
            clip(
                &mut e,
                config.brightness_threshold,
                Some(config.boost_factor),
            );
            history.push(LossRecord {
                epoch,
                loss: eval(&e),
                event: ScheduleEvent::ClipBoost,
            });
        }
    }
    clip(&mut e, config.brightness_threshold, None);
    history.push(LossRecord {
        epoch: config.epochs,
        loss: eval(&e),
        event: ScheduleEvent::FinalClip,
    });
    Ok(Estimate {
        emission: to_spectra(&e),
        history,
    })
}

/// One schedule tick without boost: values under `threshold` become 0.
pub fn clip_emission<S: Real>(e: &[Spectrum<S>], threshold: S) -> Vec<Spectrum<S>> {
    e.iter()
        .map(|s| s.map(|v| if v < threshold { S::zero() } else { v }))
        .collect()
}
