//! Feed-forward network with one sigmoid hidden layer and a softmax output,
//! trained by full-batch gradient descent on mean cross-entropy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_design, distinct_classes, Predict, Trainer};
use crate::error::{Error, Result};
use crate::timeseries::SignalClass;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FfnnParams {
    pub hidden: usize,
    pub epochs: usize,
    pub rate: f64,
    pub seed: u64,
}

impl Default for FfnnParams {
    fn default() -> Self {
        FfnnParams {
            hidden: 10,
            epochs: 500,
            rate: 0.1,
            seed: 0,
        }
    }
}

impl FfnnParams {
    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 {
            return Err(Error::invalid("FFNN needs at least one hidden unit"));
        }
        if !(self.rate > 0.0 && self.rate.is_finite()) {
            return Err(Error::invalid(format!(
                "FFNN learning rate must be positive, got {}",
                self.rate
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ffnn {
    /// Output order: unit `c` scores `classes[c]`.
    pub classes: Vec<SignalClass>,
    /// `H x M`.
    pub hidden_weights: Vec<Vec<f64>>,
    pub hidden_bias: Vec<f64>,
    /// `C x H`.
    pub output_weights: Vec<Vec<f64>>,
    pub output_bias: Vec<f64>,
    pub params: FfnnParams,
}

impl Ffnn {
    /// Untrained network. Each layer's weights are uniform in
    /// `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`, drawn hidden layer first, row
    /// by row; biases start at zero.
    pub fn init(classes: Vec<SignalClass>, inputs: usize, params: FfnnParams) -> Result<Ffnn> {
        params.validate()?;
        if classes.is_empty() || inputs == 0 {
            return Err(Error::invalid(
                "FFNN needs at least one class and one input",
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut layer = |rows: usize, cols: usize| -> Vec<Vec<f64>> {
            let bound = 1.0 / (cols as f64).sqrt();
            (0..rows)
                .map(|_| {
                    (0..cols)
                        .map(|_| rng.random_range(-bound..=bound))
                        .collect()
                })
                .collect()
        };
        let hidden_weights = layer(params.hidden, inputs);
        let output_weights = layer(classes.len(), params.hidden);
        Ok(Ffnn {
            hidden_bias: vec![0.0; params.hidden],
            output_bias: vec![0.0; classes.len()],
            classes,
            hidden_weights,
            output_weights,
            params,
        })
    }

    pub fn train(x: &[Vec<f64>], labels: &[SignalClass], params: FfnnParams) -> Result<Ffnn> {
        Self::train_with_history(x, labels, params).map(|(m, _)| m)
    }

    /// Train and return the loss before each update.
    pub fn train_with_history(
        x: &[Vec<f64>],
        labels: &[SignalClass],
        params: FfnnParams,
    ) -> Result<(Ffnn, Vec<f64>)> {
        check_design(x, labels)?;
        let classes = distinct_classes(labels);
        if classes.len() < 2 {
            return Err(Error::invalid(
                "FFNN needs at least two classes in the training data",
            ));
        }
        let mut net = Ffnn::init(classes, x[0].len(), params)?;
        let mut history = Vec::with_capacity(params.epochs);
        let mut theta = net.flat_params();
        for epoch in 0..params.epochs {
            let (loss, grad) = net.loss_and_gradient(x, labels)?;
            if !loss.is_finite() {
                return Err(Error::Diverged { epoch, loss });
            }
            history.push(loss);
            for (t, g) in theta.iter_mut().zip(&grad) {
                *t -= params.rate * g;
            }
            net.set_flat_params(&theta)?;
        }
        let final_loss = net.loss(x, labels)?;
        if !final_loss.is_finite() || theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::Diverged {
                epoch: params.epochs,
                loss: final_loss,
            });
        }
        Ok((net, history))
    }

    pub fn n_inputs(&self) -> usize {
        self.hidden_weights.first().map_or(0, Vec::len)
    }

    fn hidden(&self, x: &[f64]) -> Vec<f64> {
        self.hidden_weights
            .iter()
            .zip(&self.hidden_bias)
            .map(|(w, b)| sigmoid(dot(w, x) + b))
            .collect()
    }

    fn logits(&self, a: &[f64]) -> Vec<f64> {
        self.output_weights
            .iter()
            .zip(&self.output_bias)
            .map(|(w, b)| dot(w, a) + b)
            .collect()
    }

    /// Softmax class probabilities in `classes` order.
    pub fn probabilities(&self, x: &[f64]) -> Vec<f64> {
        let z = self.logits(&self.hidden(x));
        let lse = log_sum_exp(&z);
        z.iter().map(|v| (v - lse).exp()).collect()
    }

    fn target(&self, label: SignalClass) -> Result<usize> {
        self.classes
            .iter()
            .position(|&c| c == label)
            .ok_or_else(|| Error::invalid(format!("label {label} is not an output class")))
    }

    /// Mean cross-entropy over the rows.
    pub fn loss(&self, x: &[Vec<f64>], labels: &[SignalClass]) -> Result<f64> {
        let mut total = 0.0;
        for (xi, &l) in x.iter().zip(labels) {
            let t = self.target(l)?;
            let z = self.logits(&self.hidden(xi));
            total += log_sum_exp(&z) - z[t];
        }
        Ok(total / x.len() as f64)
    }

    /// Mean cross-entropy and its gradient in [`Ffnn::flat_params`] order.
    pub fn loss_and_gradient(
        &self,
        x: &[Vec<f64>],
        labels: &[SignalClass],
    ) -> Result<(f64, Vec<f64>)> {
        let (h, m, c) = (self.hidden_bias.len(), self.n_inputs(), self.classes.len());
        let mut g_w1 = vec![0.0; h * m];
        let mut g_b1 = vec![0.0; h];
        let mut g_w2 = vec![0.0; c * h];
        let mut g_b2 = vec![0.0; c];
        let mut total = 0.0;
        let scale = 1.0 / x.len() as f64;
        let mut delta_h = vec![0.0; h];
        for (xi, &l) in x.iter().zip(labels) {
            let t = self.target(l)?;
            let a = self.hidden(xi);
            let z = self.logits(&a);
            let lse = log_sum_exp(&z);
            total += lse - z[t];
            delta_h.fill(0.0);
            for k in 0..c {
                let dz = ((z[k] - lse).exp() - if k == t { 1.0 } else { 0.0 }) * scale;
                g_b2[k] += dz;
                for j in 0..h {
                    g_w2[k * h + j] += dz * a[j];
                    delta_h[j] += dz * self.output_weights[k][j];
                }
            }
            for j in 0..h {
                let d = delta_h[j] * a[j] * (1.0 - a[j]);
                g_b1[j] += d;
                for (g, xv) in g_w1[j * m..(j + 1) * m].iter_mut().zip(xi) {
                    *g += d * xv;
                }
            }
        }
        let mut grad = g_w1;
        grad.extend(g_b1);
        grad.extend(g_w2);
        grad.extend(g_b2);
        Ok((total * scale, grad))
    }

    /// All parameters: hidden weights row-major, hidden bias, output weights
    /// row-major, output bias.
    pub fn flat_params(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.hidden_weights.iter().flatten().copied().collect();
        out.extend(&self.hidden_bias);
        out.extend(self.output_weights.iter().flatten());
        out.extend(&self.output_bias);
        out
    }

    pub fn set_flat_params(&mut self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.flat_params_len() {
            return Err(Error::invalid(format!(
                "expected {} parameters, got {}",
                self.flat_params_len(),
                theta.len()
            )));
        }
        let mut it = theta.iter().copied();
        for row in self.hidden_weights.iter_mut() {
            row.iter_mut()
                .for_each(|v| *v = it.next().unwrap_or_default());
        }
        self.hidden_bias
            .iter_mut()
            .for_each(|v| *v = it.next().unwrap_or_default());
        for row in self.output_weights.iter_mut() {
            row.iter_mut()
                .for_each(|v| *v = it.next().unwrap_or_default());
        }
        self.output_bias
            .iter_mut()
            .for_each(|v| *v = it.next().unwrap_or_default());
        Ok(())
    }

    fn flat_params_len(&self) -> usize {
        let (h, c) = (self.hidden_bias.len(), self.classes.len());
        h * self.n_inputs() + h + c * h + c
    }

    pub fn predict(&self, x: &[f64]) -> SignalClass {
        let z = self.logits(&self.hidden(x));
        let mut best = 0;
        for (k, v) in z.iter().enumerate().skip(1) {
            if *v > z[best] {
                best = k;
            }
        }
        self.classes[best]
    }
}

impl Predict for Ffnn {
    fn predict(&self, x: &[f64]) -> SignalClass {
        Ffnn::predict(self, x)
    }
}

impl Trainer for FfnnParams {
    type Model = Ffnn;

    fn train(&self, x: &[Vec<f64>], labels: &[SignalClass]) -> Result<Ffnn> {
        Ffnn::train(x, labels, *self)
    }
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

fn log_sum_exp(z: &[f64]) -> f64 {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}
