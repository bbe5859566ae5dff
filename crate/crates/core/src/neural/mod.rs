//! Small dense-network engine: GRU stack, single-layer perceptron head, MLP,
//! Adam and a central-difference gradient checker. Everything is `f64`.

mod adam;
mod dense;
mod gradcheck;
mod gru;
mod matrix;
pub mod precise;

pub use adam::AdamState;
pub use dense::{Mlp, MlpTrace, Slp};
pub use gradcheck::{finite_diff_check, relative_error};
pub use gru::{GruLayer, GruStack, GruTrace};
pub use matrix::{dot, sigmoid, Matrix};
pub use precise::{Dd, Real};

/// Uniform access to every trainable matrix of a model, in a fixed order.
///
/// The visiting order defines the flat layout used by the optimizer, parameter
/// averaging and checkpoints.
pub trait Parameters {
    fn visit(&self, f: &mut dyn FnMut(&str, &Matrix));
    fn visit_mut(&mut self, f: &mut dyn FnMut(&str, &mut Matrix));

    fn num_params(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_, m| n += m.data().len());
        n
    }

    fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        self.visit(&mut |_, m| out.extend_from_slice(m.data()));
        out
    }

    fn flatten_into(&self, out: &mut Vec<f64>) {
        out.clear();
        self.visit(&mut |_, m| out.extend_from_slice(m.data()));
    }

    /// Overwrites every parameter from `flat`, which must have `num_params()` entries.
    fn assign_flat(&mut self, flat: &[f64]) {
        let mut offset = 0;
        self.visit_mut(&mut |_, m| {
            let n = m.data().len();
            m.data_mut().copy_from_slice(&flat[offset..offset + n]);
            offset += n;
        });
        assert_eq!(offset, flat.len(), "flat parameter vector length mismatch");
    }

    fn names(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit(&mut |name, _| out.push(name.to_string()));
        out
    }
}
