//! Linear soft-margin SVMs trained by SMO on the dual, and the one-vs-one
//! multiclass wrapper.
//!
//! The binary machine minimizes `0.5 |w|^2 + c * sum_i hinge(1 - y_i (w.x_i + b))`
//! with an unregularized bias. Working pairs are picked with second-order
//! information (Fan, Chen and Lin, 2005). After every epoch of `n` pair
//! updates the primal objective is evaluated and the best iterate so far is
//! kept, so the reported objective never increases between epochs.

use serde::{Deserialize, Serialize};

use super::{check_design, distinct_classes, Predict};
use crate::error::{Error, Result};
use crate::timeseries::SignalClass;

pub const DEFAULT_C: f64 = 1.0;
const MAX_EPOCHS: usize = 1000;
const REL_TOL: f64 = 1e-6;
const KKT_TOL: f64 = 1e-6;
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// `(negative, positive)`: a positive decision value predicts `.1`.
    pub class_pair: (SignalClass, SignalClass),
    pub hyper_c: f64,
}

/// Per-epoch record of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmTrainReport {
    /// Primal objective of the kept iterate after each epoch.
    pub objective_history: Vec<f64>,
    /// True when the dual KKT gap closed; false when a relative-change or
    /// epoch-cap stop ended training.
    pub kkt_converged: bool,
}

impl LinearSvm {
    /// Train on samples of exactly two classes. The smaller class (in class
    /// order) is the negative side.
    pub fn train(x: &[Vec<f64>], labels: &[SignalClass], c: f64) -> Result<LinearSvm> {
        Self::train_with_report(x, labels, c).map(|(m, _)| m)
    }

    pub fn train_with_report(
        x: &[Vec<f64>],
        labels: &[SignalClass],
        c: f64,
    ) -> Result<(LinearSvm, SvmTrainReport)> {
        check_design(x, labels)?;
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid(format!("SVM c must be positive, got {c}")));
        }
        let classes = distinct_classes(labels);
        if classes.len() != 2 {
            return Err(Error::invalid(format!(
                "binary SVM needs exactly two classes, found {}",
                classes.len()
            )));
        }
        let pair = (classes[0], classes[1]);
        let y: Vec<f64> = labels
            .iter()
            .map(|&l| if l == pair.1 { 1.0 } else { -1.0 })
            .collect();
        let (weights, bias, report) = Smo::new(x, &y, c).solve();
        Ok((
            LinearSvm {
                weights,
                bias,
                class_pair: pair,
                hyper_c: c,
            },
            report,
        ))
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }

    pub fn predict(&self, x: &[f64]) -> SignalClass {
        if self.decision(x) > 0.0 {
            self.class_pair.1
        } else {
            self.class_pair.0
        }
    }

    /// `0.5 |w|^2 + c * sum hinge` on the given data.
    pub fn primal_objective(&self, x: &[Vec<f64>], labels: &[SignalClass]) -> f64 {
        let y: Vec<f64> = labels
            .iter()
            .map(|&l| if l == self.class_pair.1 { 1.0 } else { -1.0 })
            .collect();
        primal(&self.weights, self.bias, x, &y, self.hyper_c)
    }

    /// Mean hinge loss on the given data.
    pub fn mean_hinge(&self, x: &[Vec<f64>], labels: &[SignalClass]) -> f64 {
        x.iter()
            .zip(labels)
            .map(|(xi, &l)| {
                let yi = if l == self.class_pair.1 { 1.0 } else { -1.0 };
                (1.0 - yi * self.decision(xi)).max(0.0)
            })
            .sum::<f64>()
            / x.len() as f64
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

fn primal(w: &[f64], b: f64, x: &[Vec<f64>], y: &[f64], c: f64) -> f64 {
    let hinge: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (1.0 - yi * (dot(w, xi) + b)).max(0.0))
        .sum();
    0.5 * dot(w, w) + c * hinge
}

struct Smo<'a> {
    x: &'a [Vec<f64>],
    y: &'a [f64],
    c: f64,
    kernel: Vec<f64>,
    alpha: Vec<f64>,
    grad: Vec<f64>,
}

impl<'a> Smo<'a> {
    fn new(x: &'a [Vec<f64>], y: &'a [f64], c: f64) -> Self {
        let n = x.len();
        let mut kernel = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let k = dot(&x[i], &x[j]);
                kernel[i * n + j] = k;
                kernel[j * n + i] = k;
            }
        }
        Smo {
            x,
            y,
            c,
            kernel,
            alpha: vec![0.0; n],
            grad: vec![-1.0; n],
        }
    }

    fn k(&self, i: usize, j: usize) -> f64 {
        self.kernel[i * self.x.len() + j]
    }

    fn upper(&self, t: usize) -> bool {
        self.alpha[t] >= self.c
    }

    fn lower(&self, t: usize) -> bool {
        self.alpha[t] <= 0.0
    }

    /// Next working pair, or `None` once the maximal KKT violation is below
    /// tolerance.
    fn select(&self) -> Option<(usize, usize)> {
        let n = self.x.len();
        let mut gmax = f64::NEG_INFINITY;
        let mut i = None;
        for t in 0..n {
            let v = -self.y[t] * self.grad[t];
            let movable = if self.y[t] > 0.0 {
                !self.upper(t)
            } else {
                !self.lower(t)
            };
            if movable && v >= gmax {
                gmax = v;
                i = Some(t);
            }
        }
        let i = i?;
        let mut gmax2 = f64::NEG_INFINITY;
        let mut best = f64::INFINITY;
        let mut j = None;
        for t in 0..n {
            let movable = if self.y[t] > 0.0 {
                !self.lower(t)
            } else {
                !self.upper(t)
            };
            if !movable {
                continue;
            }
            let v = self.y[t] * self.grad[t];
            gmax2 = gmax2.max(v);
            let diff = gmax + v;
            if diff > 0.0 {
                let quad = (self.k(i, i) + self.k(t, t) - 2.0 * self.k(i, t)).max(TAU);
                let obj = -diff * diff / quad;
                if obj <= best {
                    best = obj;
                    j = Some(t);
                }
            }
        }
        if gmax + gmax2 < KKT_TOL {
            return None;
        }
        j.map(|j| (i, j))
    }

    fn update(&mut self, i: usize, j: usize) {
        let c = self.c;
        let (yi, yj) = (self.y[i], self.y[j]);
        let (old_i, old_j) = (self.alpha[i], self.alpha[j]);
        let quad = (self.k(i, i) + self.k(j, j) - 2.0 * self.k(i, j)).max(TAU);
        let (mut ai, mut aj) = (old_i, old_j);
        if yi != yj {
            let delta = (-self.grad[i] - self.grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let delta = (self.grad[i] - self.grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }
        self.alpha[i] = ai;
        self.alpha[j] = aj;
        let (di, dj) = (ai - old_i, aj - old_j);
        for t in 0..self.x.len() {
            self.grad[t] += self.y[t] * (yi * self.k(i, t) * di + yj * self.k(j, t) * dj);
        }
    }

    fn bias(&self) -> f64 {
        let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut free, mut sum) = (0usize, 0.0);
        for t in 0..self.x.len() {
            let yg = self.y[t] * self.grad[t];
            if self.upper(t) {
                if self.y[t] < 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else if self.lower(t) {
                if self.y[t] > 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                free += 1;
                sum += yg;
            }
        }
        let rho = if free > 0 {
            sum / free as f64
        } else {
            0.5 * (ub + lb)
        };
        -rho
    }

    fn weights(&self) -> Vec<f64> {
        let d = self.x[0].len();
        let mut w = vec![0.0; d];
        for ((xi, a), yi) in self.x.iter().zip(&self.alpha).zip(self.y) {
            if *a != 0.0 {
                for (wk, xk) in w.iter_mut().zip(xi) {
                    *wk += a * yi * xk;
                }
            }
        }
        w
    }

    fn solve(mut self) -> (Vec<f64>, f64, SvmTrainReport) {
        let n = self.x.len();
        let mut best = (vec![0.0; self.x[0].len()], 0.0, f64::INFINITY);
        let mut history = Vec::new();
        let mut prev = f64::NAN;
        let mut kkt_converged = false;
        for _ in 0..MAX_EPOCHS {
            for _ in 0..n {
                match self.select() {
                    Some((i, j)) => self.update(i, j),
                    None => {
                        kkt_converged = true;
                        break;
                    }
                }
            }
            let w = self.weights();
            let b = self.bias();
            let obj = primal(&w, b, self.x, self.y, self.c);
            if obj < best.2 {
                best = (w, b, obj);
            }
            history.push(best.2);
            let settled = (prev - obj).abs() <= REL_TOL * obj.abs().max(f64::MIN_POSITIVE);
            if kkt_converged || settled {
                break;
            }
            prev = obj;
        }
        let (w, b, _) = best;
        (
            w,
            b,
            SvmTrainReport {
                objective_history: history,
                kkt_converged,
            },
        )
    }
}

/// `C(C-1)/2` binary machines, one per unordered class pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OvoSvm {
    pub classes: Vec<SignalClass>,
    pub machines: Vec<LinearSvm>,
}

impl OvoSvm {
    pub fn train(x: &[Vec<f64>], labels: &[SignalClass], c: f64) -> Result<OvoSvm> {
        check_design(x, labels)?;
        let classes = distinct_classes(labels);
        if classes.len() < 2 {
            return Err(Error::invalid(
                "one-vs-one SVM needs at least two classes in the training data",
            ));
        }
        let mut machines = Vec::with_capacity(classes.len() * (classes.len() - 1) / 2);
        for (a_pos, &a) in classes.iter().enumerate() {
            for &b in &classes[a_pos + 1..] {
                let (xs, ls): (Vec<Vec<f64>>, Vec<SignalClass>) = x
                    .iter()
                    .zip(labels)
                    .filter(|(_, &l)| l == a || l == b)
                    .map(|(xi, &l)| (xi.clone(), l))
                    .unzip();
                machines.push(LinearSvm::train(&xs, &ls, c)?);
            }
        }
        Ok(OvoSvm { classes, machines })
    }

    /// Votes and summed absolute margins per class, in `classes` order.
    pub fn votes(&self, x: &[f64]) -> Vec<(usize, f64)> {
        let mut tally = vec![(0usize, 0.0f64); self.classes.len()];
        for m in &self.machines {
            let f = m.decision(x);
            let winner = if f > 0.0 {
                m.class_pair.1
            } else {
                m.class_pair.0
            };
            if let Some(pos) = self.classes.iter().position(|&c| c == winner) {
                tally[pos].0 += 1;
                tally[pos].1 += f.abs();
            }
        }
        tally
    }

    /// Majority vote; ties go to the larger summed margin, then to the
    /// earlier class.
    pub fn predict(&self, x: &[f64]) -> SignalClass {
        let tally = self.votes(x);
        let mut best = 0;
        for (pos, &(v, m)) in tally.iter().enumerate().skip(1) {
            let (bv, bm) = tally[best];
            if v > bv || (v == bv && m > bm) {
                best = pos;
            }
        }
        self.classes[best]
    }
}

impl Predict for OvoSvm {
    fn predict(&self, x: &[f64]) -> SignalClass {
        OvoSvm::predict(self, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use SignalClass::*;

    #[test]
    fn separable_pair() {
        let x = vec![vec![-1.0, 0.0], vec![1.0, 0.0]];
        let y = vec![Noisy, Trend];
        let (m, report) = LinearSvm::train_with_report(&x, &y, 1.0).unwrap();
        assert_eq!(m.predict(&x[0]), Noisy);
        assert_eq!(m.predict(&x[1]), Trend);
        assert_eq!(m.predict(&[2.0, 0.0]), Trend);
        assert!((m.weights[0] - 1.0).abs() < 1e-6, "{:?}", m.weights);
        assert!(m.bias.abs() < 1e-6);
        assert!(report.kkt_converged);
    }

    #[test]
    fn single_class_is_rejected() {
        let x = vec![vec![0.0], vec![1.0]];
        assert!(LinearSvm::train(&x, &[Noisy, Noisy], 1.0).is_err());
        assert!(OvoSvm::train(&x, &[Noisy, Noisy], 1.0).is_err());
        assert!(LinearSvm::train(&x, &[Noisy, Trend], 0.0).is_err());
    }

    #[test]
    fn xor_is_not_separable() {
        let x = vec![
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
        ];
        let y = vec![Noisy, Noisy, Trend, Trend];
        let m = LinearSvm::train(&x, &y, 1.0).unwrap();
        let correct = x
            .iter()
            .zip(&y)
            .filter(|(xi, &l)| m.predict(xi) == l)
            .count();
        assert!(correct <= 3);
    }

    #[test]
    fn ovo_machine_count() {
        let x: Vec<Vec<f64>> = (0..9).map(|i| vec![i as f64]).collect();
        let y: Vec<SignalClass> = (0..9).map(|i| SignalClass::ALL[i / 3]).collect();
        let m = OvoSvm::train(&x, &y, 1.0).unwrap();
        assert_eq!(m.machines.len(), 3);
        let two = OvoSvm::train(&x[..6], &y[..6], 1.0).unwrap();
        assert_eq!(two.machines.len(), 1);
        for xi in &x[..6] {
            assert_eq!(two.predict(xi), two.machines[0].predict(xi));
        }
    }
}
