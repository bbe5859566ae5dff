use rand::Rng;

use super::matrix::{sigmoid, Matrix};
use super::Parameters;
use crate::error::{Error, Result};

/// One GRU layer.
///
/// ```text
/// z  = sigmoid(W_z x + U_z h + b_z)
/// r  = sigmoid(W_r x + U_r h + b_r)
/// n  = tanh(W_h x + U_h (r * h) + b_h)
/// h' = (1 - z) * h + z * n
/// ```
///
/// The reset gate multiplies the previous state before `U_h`. Biases are
/// single vectors (no separate input and recurrent biases).
#[derive(Debug, Clone, PartialEq)]
pub struct GruLayer {
    pub w_z: Matrix,
    pub w_r: Matrix,
    pub w_h: Matrix,
    pub u_z: Matrix,
    pub u_r: Matrix,
    pub u_h: Matrix,
    pub b_z: Matrix,
    pub b_r: Matrix,
    pub b_h: Matrix,
}

impl GruLayer {
    pub fn zeros(input_dim: usize, hidden: usize) -> Self {
        Self {
            w_z: Matrix::zeros(hidden, input_dim),
            w_r: Matrix::zeros(hidden, input_dim),
            w_h: Matrix::zeros(hidden, input_dim),
            u_z: Matrix::zeros(hidden, hidden),
            u_r: Matrix::zeros(hidden, hidden),
            u_h: Matrix::zeros(hidden, hidden),
            b_z: Matrix::zeros(hidden, 1),
            b_r: Matrix::zeros(hidden, 1),
            b_h: Matrix::zeros(hidden, 1),
        }
    }

    /// Uniform in `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`; biases use the hidden size as fan-in.
    pub fn init(input_dim: usize, hidden: usize, rng: &mut impl Rng) -> Self {
        let wb = 1.0 / (input_dim as f64).sqrt();
        let ub = 1.0 / (hidden as f64).sqrt();
        Self {
            w_z: Matrix::uniform(hidden, input_dim, wb, rng),
            w_r: Matrix::uniform(hidden, input_dim, wb, rng),
            w_h: Matrix::uniform(hidden, input_dim, wb, rng),
            u_z: Matrix::uniform(hidden, hidden, ub, rng),
            u_r: Matrix::uniform(hidden, hidden, ub, rng),
            u_h: Matrix::uniform(hidden, hidden, ub, rng),
            b_z: Matrix::uniform(hidden, 1, ub, rng),
            b_r: Matrix::uniform(hidden, 1, ub, rng),
            b_h: Matrix::uniform(hidden, 1, ub, rng),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.w_z.cols()
    }

    pub fn hidden(&self) -> usize {
        self.w_z.rows()
    }

    fn check_shapes(&self) -> Result<()> {
        let (h, i) = (self.hidden(), self.input_dim());
        let expect = [
            (&self.w_r, (h, i)),
            (&self.w_h, (h, i)),
            (&self.u_z, (h, h)),
            (&self.u_r, (h, h)),
            (&self.u_h, (h, h)),
            (&self.b_z, (h, 1)),
            (&self.b_r, (h, 1)),
            (&self.b_h, (h, 1)),
        ];
        for (m, shape) in expect {
            if m.shape() != shape {
                return Err(Error::Shape(format!(
                    "GRU layer ({i} -> {h}) has a {:?} block, expected {shape:?}",
                    m.shape()
                )));
            }
        }
        Ok(())
    }

    fn forward(&self, input: &[f64], steps: usize, h0: &[f64]) -> LayerTrace {
        let (hd, id) = (self.hidden(), self.input_dim());
        let mut trace = LayerTrace {
            input: input.to_vec(),
            h0: h0.to_vec(),
            z: vec![0.0; steps * hd],
            r: vec![0.0; steps * hd],
            n: vec![0.0; steps * hd],
            h: vec![0.0; steps * hd],
        };
        let mut rh = vec![0.0; hd];
        for t in 0..steps {
            let x = &input[t * id..(t + 1) * id];
            let (done, rest) = trace.h.split_at_mut(t * hd);
            let h_prev = if t == 0 { h0 } else { &done[(t - 1) * hd..] };
            let h_out = &mut rest[..hd];
            let z = &mut trace.z[t * hd..(t + 1) * hd];
            let r = &mut trace.r[t * hd..(t + 1) * hd];
            let n = &mut trace.n[t * hd..(t + 1) * hd];

            z.copy_from_slice(self.b_z.data());
            self.w_z.mul_vec_acc(x, z);
            self.u_z.mul_vec_acc(h_prev, z);
            z.iter_mut().for_each(|v| *v = sigmoid(*v));

            r.copy_from_slice(self.b_r.data());
            self.w_r.mul_vec_acc(x, r);
            self.u_r.mul_vec_acc(h_prev, r);
            r.iter_mut().for_each(|v| *v = sigmoid(*v));

            for k in 0..hd {
                rh[k] = r[k] * h_prev[k];
            }
            n.copy_from_slice(self.b_h.data());
            self.w_h.mul_vec_acc(x, n);
            self.u_h.mul_vec_acc(&rh, n);
            n.iter_mut().for_each(|v| *v = v.tanh());

            for k in 0..hd {
                h_out[k] = (1.0 - z[k]) * h_prev[k] + z[k] * n[k];
            }
            debug_assert!(h_out.iter().all(|v| v.is_finite()), "non-finite GRU state");
        }
        trace
    }

    /// Backpropagation through time for one layer.
    ///
    /// `d_out` is the gradient wrt every emitted state (`steps x hidden`).
    /// Returns parameter gradients, input gradients (when requested) and the
    /// gradient wrt the initial state.
    fn backward(&self, trace: &LayerTrace, d_out: &[f64], want_input_grad: bool) -> (GruLayer, Vec<f64>, Vec<f64>) {
        let (hd, id) = (self.hidden(), self.input_dim());
        let steps = trace.h.len() / hd;
        let mut g = GruLayer::zeros(id, hd);
        let mut d_input = if want_input_grad {
            vec![0.0; steps * id]
        } else {
            Vec::new()
        };
        let mut dh_next = vec![0.0; hd];
        let mut dh = vec![0.0; hd];
        let mut da_z = vec![0.0; hd];
        let mut da_r = vec![0.0; hd];
        let mut da_n = vec![0.0; hd];
        let mut d_rh = vec![0.0; hd];
        let mut rh = vec![0.0; hd];

        for t in (0..steps).rev() {
            let span = t * hd..(t + 1) * hd;
            let x = &trace.input[t * id..(t + 1) * id];
            let h_prev = if t == 0 {
                &trace.h0[..]
            } else {
                &trace.h[(t - 1) * hd..t * hd]
            };
            let (z, r, n) = (&trace.z[span.clone()], &trace.r[span.clone()], &trace.n[span.clone()]);

            for k in 0..hd {
                dh[k] = d_out[t * hd + k] + dh_next[k];
                da_z[k] = dh[k] * (n[k] - h_prev[k]) * z[k] * (1.0 - z[k]);
                da_n[k] = dh[k] * z[k] * (1.0 - n[k] * n[k]);
                rh[k] = r[k] * h_prev[k];
                dh_next[k] = dh[k] * (1.0 - z[k]);
            }
            d_rh.iter_mut().for_each(|v| *v = 0.0);
            self.u_h.mul_t_vec_acc(&da_n, &mut d_rh);
            for k in 0..hd {
                da_r[k] = d_rh[k] * h_prev[k] * r[k] * (1.0 - r[k]);
                dh_next[k] += d_rh[k] * r[k];
            }
            self.u_z.mul_t_vec_acc(&da_z, &mut dh_next);
            self.u_r.mul_t_vec_acc(&da_r, &mut dh_next);

            g.w_z.add_outer(&da_z, x);
            g.w_r.add_outer(&da_r, x);
            g.w_h.add_outer(&da_n, x);
            g.u_z.add_outer(&da_z, h_prev);
            g.u_r.add_outer(&da_r, h_prev);
            g.u_h.add_outer(&da_n, &rh);
            g.b_z.add_vec(&da_z);
            g.b_r.add_vec(&da_r);
            g.b_h.add_vec(&da_n);

            if want_input_grad {
                let dx = &mut d_input[t * id..(t + 1) * id];
                self.w_z.mul_t_vec_acc(&da_z, dx);
                self.w_r.mul_t_vec_acc(&da_r, dx);
                self.w_h.mul_t_vec_acc(&da_n, dx);
            }
        }
        (g, d_input, dh_next)
    }
}

impl Parameters for GruLayer {
    fn visit(&self, f: &mut dyn FnMut(&str, &Matrix)) {
        f("w_z", &self.w_z);
        f("w_r", &self.w_r);
        f("w_h", &self.w_h);
        f("u_z", &self.u_z);
        f("u_r", &self.u_r);
        f("u_h", &self.u_h);
        f("b_z", &self.b_z);
        f("b_r", &self.b_r);
        f("b_h", &self.b_h);
    }

    fn visit_mut(&mut self, f: &mut dyn FnMut(&str, &mut Matrix)) {
        f("w_z", &mut self.w_z);
        f("w_r", &mut self.w_r);
        f("w_h", &mut self.w_h);
        f("u_z", &mut self.u_z);
        f("u_r", &mut self.u_r);
        f("u_h", &mut self.u_h);
        f("b_z", &mut self.b_z);
        f("b_r", &mut self.b_r);
        f("b_h", &mut self.b_h);
    }
}

#[derive(Debug, Clone)]
struct LayerTrace {
    input: Vec<f64>,
    h0: Vec<f64>,
    z: Vec<f64>,
    r: Vec<f64>,
    n: Vec<f64>,
    h: Vec<f64>,
}

/// Intermediates of a stacked forward pass, kept for the backward pass.
#[derive(Debug, Clone)]
pub struct GruTrace {
    steps: usize,
    hidden: usize,
    layers: Vec<LayerTrace>,
}

impl GruTrace {
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// State of `layer` after processing step `t`.
    pub fn hidden(&self, layer: usize, t: usize) -> &[f64] {
        &self.layers[layer].h[t * self.hidden..(t + 1) * self.hidden]
    }

    pub fn top(&self, t: usize) -> &[f64] {
        self.hidden(self.layers.len() - 1, t)
    }
}

/// Stacked GRU: layer `l + 1` consumes the states of layer `l` at each step.
#[derive(Debug, Clone, PartialEq)]
pub struct GruStack {
    pub layers: Vec<GruLayer>,
}

impl GruStack {
    pub fn zeros(input_dim: usize, hidden: usize, depth: usize) -> Self {
        let layers = (0..depth)
            .map(|l| GruLayer::zeros(if l == 0 { input_dim } else { hidden }, hidden))
            .collect();
        Self { layers }
    }

    pub fn init(input_dim: usize, hidden: usize, depth: usize, rng: &mut impl Rng) -> Self {
        let layers = (0..depth)
            .map(|l| GruLayer::init(if l == 0 { input_dim } else { hidden }, hidden, rng))
            .collect();
        Self { layers }
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn hidden(&self) -> usize {
        self.layers[0].hidden()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn check_shapes(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::Shape("GRU stack without layers".into()));
        }
        let hidden = self.hidden();
        for (l, layer) in self.layers.iter().enumerate() {
            layer.check_shapes()?;
            if layer.hidden() != hidden || (l > 0 && layer.input_dim() != hidden) {
                return Err(Error::Shape(format!("GRU layer {l} does not chain")));
            }
        }
        Ok(())
    }

    /// Runs the stack over `seq` from the initial states `h0` (`depth x hidden`, layer-major).
    pub fn forward<A: AsRef<[f64]>>(&self, seq: &[A], h0: &[f64]) -> Result<GruTrace> {
        let (hidden, input_dim) = (self.hidden(), self.input_dim());
        if seq.is_empty() {
            return Err(Error::Shape("empty sequence".into()));
        }
        if h0.len() != self.depth() * hidden {
            return Err(Error::Shape(format!(
                "h0 has {} values, expected {}",
                h0.len(),
                self.depth() * hidden
            )));
        }
        let mut input = Vec::with_capacity(seq.len() * input_dim);
        for (t, x) in seq.iter().enumerate() {
            let x = x.as_ref();
            if x.len() != input_dim {
                return Err(Error::Shape(format!(
                    "step {t} has {} features, expected {input_dim}",
                    x.len()
                )));
            }
            input.extend_from_slice(x);
        }
        let mut layers = Vec::with_capacity(self.depth());
        for (l, layer) in self.layers.iter().enumerate() {
            let trace = layer.forward(&input, seq.len(), &h0[l * hidden..(l + 1) * hidden]);
            input = trace.h.clone();
            layers.push(trace);
        }
        Ok(GruTrace {
            steps: seq.len(),
            hidden,
            layers,
        })
    }

    /// Gradients given `d_top`, the loss gradient wrt each top-layer state
    /// (`steps x hidden`). Returns parameter gradients and the `h0` gradient.
    pub fn backward(&self, trace: &GruTrace, d_top: &[f64]) -> (GruStack, Vec<f64>) {
        assert_eq!(d_top.len(), trace.steps * trace.hidden, "upstream gradient shape");
        let mut grads: Vec<GruLayer> = Vec::with_capacity(self.depth());
        let mut d_h0 = vec![0.0; self.depth() * trace.hidden];
        let mut d_out = d_top.to_vec();
        for l in (0..self.depth()).rev() {
            let (g, d_in, dh0) = self.layers[l].backward(&trace.layers[l], &d_out, l > 0);
            d_h0[l * trace.hidden..(l + 1) * trace.hidden].copy_from_slice(&dh0);
            grads.push(g);
            d_out = d_in;
        }
        grads.reverse();
        (GruStack { layers: grads }, d_h0)
    }
}

impl Parameters for GruStack {
    fn visit(&self, f: &mut dyn FnMut(&str, &Matrix)) {
        for (l, layer) in self.layers.iter().enumerate() {
            layer.visit(&mut |name, m| f(&format!("gru{l}.{name}"), m));
        }
    }

    fn visit_mut(&mut self, f: &mut dyn FnMut(&str, &mut Matrix)) {
        for (l, layer) in self.layers.iter_mut().enumerate() {
            layer.visit_mut(&mut |name, m| f(&format!("gru{l}.{name}"), m));
        }
    }
}
