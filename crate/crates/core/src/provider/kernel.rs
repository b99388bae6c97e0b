use std::ops::Range;

use super::MatrixSource;
use crate::error::{Error, Result};

/// Inputs of the bordered LS-SVM system matrix
///
/// ```text
/// A_γ = [ 0   1ᵀ ]      K_γ = K + I/γ,  K_ij = exp(−‖x_i − x_j‖² / 2σ²)
///       [ 1   K_γ ]
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSpec {
    pub gamma: f64,
    pub sigma: f64,
    pub inputs: Vec<Vec<f64>>,
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::InvalidInput(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidInput(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        let Some(first) = self.inputs.first() else {
            return Err(Error::InvalidInput("kernel needs at least one input vector".into()));
        };
        if self.inputs.iter().any(|x| x.len() != first.len()) {
            return Err(Error::InvalidInput("input vectors differ in dimension".into()));
        }
        Ok(())
    }

    /// Order of the bordered matrix, n + 1.
    pub fn order(&self) -> usize {
        self.inputs.len() + 1
    }

    /// Element (i, j) of `A_γ`, 0-based.
    pub fn element(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            (0, 0) => 0.0,
            (0, _) | (_, 0) => 1.0,
            _ => {
                let (xi, xj) = (&self.inputs[i - 1], &self.inputs[j - 1]);
                let dist2: f64 = xi.iter().zip(xj).map(|(a, b)| (a - b) * (a - b)).sum();
                let k = (-dist2 / (2.0 * self.sigma * self.sigma)).exp();
                if i == j {
                    k + 1.0 / self.gamma
                } else {
                    k
                }
            }
        }
    }
}

/// Computes kernel-matrix elements on every request; nothing is cached.
#[derive(Clone, Debug)]
pub struct KernelSource {
    spec: KernelSpec,
}

impl KernelSource {
    pub fn new(spec: KernelSpec) -> Result<Self> {
        spec.validate()?;
        Ok(KernelSource { spec })
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }
}

impl MatrixSource for KernelSource {
    fn order(&self) -> usize {
        self.spec.order()
    }

    fn fill(&self, rows: Range<usize>, cols: Range<usize>, out: &mut [f64]) -> Result<()> {
        let w = cols.len();
        for (r, i) in rows.enumerate() {
            for (c, j) in cols.clone().enumerate() {
                out[r * w + c] = self.spec.element(i, j);
            }
        }
        Ok(())
    }
}
