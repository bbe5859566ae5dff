use rand::Rng;

use super::matrix::{dot, Matrix};
use super::Parameters;
use crate::error::{Error, Result};

/// Single-layer perceptron head: `score = tanh(w . h + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Slp {
    /// `1 x hidden`
    pub w: Matrix,
    /// `1 x 1`
    pub b: Matrix,
}

impl Slp {
    pub fn zeros(hidden: usize) -> Self {
        Self {
            w: Matrix::zeros(1, hidden),
            b: Matrix::zeros(1, 1),
        }
    }

    pub fn init(hidden: usize, rng: &mut impl Rng) -> Self {
        let bound = 1.0 / (hidden as f64).sqrt();
        Self {
            w: Matrix::uniform(1, hidden, bound, rng),
            b: Matrix::uniform(1, 1, bound, rng),
        }
    }

    pub fn check_shapes(&self, hidden: usize) -> Result<()> {
        if self.w.shape() != (1, hidden) || self.b.shape() != (1, 1) {
            return Err(Error::Shape(format!(
                "SLP head {:?}/{:?} does not match hidden size {hidden}",
                self.w.shape(),
                self.b.shape()
            )));
        }
        Ok(())
    }

    pub fn score(&self, hidden: &[f64]) -> f64 {
        (dot(self.w.data(), hidden) + self.b.data()[0]).tanh()
    }

    /// Accumulates `d_score * dscore/dparams` into `grads` and `d_score * dscore/dh` into `d_hidden`.
    pub fn backward_acc(&self, hidden: &[f64], score: f64, d_score: f64, grads: &mut Slp, d_hidden: &mut [f64]) {
        let d_pre = d_score * (1.0 - score * score);
        if d_pre == 0.0 {
            return;
        }
        for (g, &h) in grads.w.data_mut().iter_mut().zip(hidden) {
            *g += d_pre * h;
        }
        grads.b.data_mut()[0] += d_pre;
        for (d, &w) in d_hidden.iter_mut().zip(self.w.data()) {
            *d += d_pre * w;
        }
    }
}

impl Parameters for Slp {
    fn visit(&self, f: &mut dyn FnMut(&str, &Matrix)) {
        f("slp.w", &self.w);
        f("slp.b", &self.b);
    }

    fn visit_mut(&mut self, f: &mut dyn FnMut(&str, &mut Matrix)) {
        f("slp.w", &mut self.w);
        f("slp.b", &mut self.b);
    }
}

/// Fully connected layer stack with `tanh` after every layer, including the output.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    /// `(weight out x in, bias out x 1)` per layer.
    pub layers: Vec<(Matrix, Matrix)>,
}

/// Activations of one MLP forward pass; `activations[0]` is the input.
#[derive(Debug, Clone)]
pub struct MlpTrace {
    activations: Vec<Vec<f64>>,
}

impl MlpTrace {
    pub fn output(&self) -> f64 {
        self.activations.last().expect("non-empty trace")[0]
    }
}

impl Mlp {
    pub fn zeros(sizes: &[usize]) -> Self {
        let layers = sizes
            .windows(2)
            .map(|w| (Matrix::zeros(w[1], w[0]), Matrix::zeros(w[1], 1)))
            .collect();
        Self { layers }
    }

    pub fn init(sizes: &[usize], rng: &mut impl Rng) -> Self {
        let layers = sizes
            .windows(2)
            .map(|w| {
                let bound = 1.0 / (w[0] as f64).sqrt();
                (
                    Matrix::uniform(w[1], w[0], bound, rng),
                    Matrix::uniform(w[1], 1, bound, rng),
                )
            })
            .collect();
        Self { layers }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].0.cols()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![self.input_dim()];
        s.extend(self.layers.iter().map(|(w, _)| w.rows()));
        s
    }

    pub fn check_shapes(&self) -> Result<()> {
        let mut prev = self.input_dim();
        for (l, (w, b)) in self.layers.iter().enumerate() {
            if w.cols() != prev || b.shape() != (w.rows(), 1) {
                return Err(Error::Shape(format!("MLP layer {l} does not chain")));
            }
            prev = w.rows();
        }
        if prev != 1 {
            return Err(Error::Shape(format!("MLP output width {prev}, expected 1")));
        }
        Ok(())
    }

    pub fn forward(&self, x: &[f64]) -> MlpTrace {
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(x.to_vec());
        for (w, b) in &self.layers {
            let mut out = b.data().to_vec();
            w.mul_vec_acc(activations.last().expect("input present"), &mut out);
            out.iter_mut().for_each(|v| *v = v.tanh());
            activations.push(out);
        }
        MlpTrace { activations }
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        self.forward(x).output()
    }

    /// Accumulates `d_score * dscore/dparams` into `grads`.
    pub fn backward_acc(&self, trace: &MlpTrace, d_score: f64, grads: &mut Mlp) {
        let mut delta = vec![d_score];
        for l in (0..self.layers.len()).rev() {
            let out = &trace.activations[l + 1];
            let input = &trace.activations[l];
            let d_pre: Vec<f64> = delta.iter().zip(out).map(|(d, y)| d * (1.0 - y * y)).collect();
            let (gw, gb) = &mut grads.layers[l];
            gw.add_outer(&d_pre, input);
            gb.add_vec(&d_pre);
            if l > 0 {
                let mut d_in = vec![0.0; input.len()];
                self.layers[l].0.mul_t_vec_acc(&d_pre, &mut d_in);
                delta = d_in;
            }
        }
    }
}

impl Parameters for Mlp {
    fn visit(&self, f: &mut dyn FnMut(&str, &Matrix)) {
        for (l, (w, b)) in self.layers.iter().enumerate() {
            f(&format!("mlp{l}.w"), w);
            f(&format!("mlp{l}.b"), b);
        }
    }

    fn visit_mut(&mut self, f: &mut dyn FnMut(&str, &mut Matrix)) {
        for (l, (w, b)) in self.layers.iter_mut().enumerate() {
            f(&format!("mlp{l}.w"), w);
            f(&format!("mlp{l}.b"), b);
        }
    }
}
