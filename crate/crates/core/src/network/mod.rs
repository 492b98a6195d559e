//! Direct linear solve of the element relations, used as an independent
//! oracle for the closed-form coefficients.
//!
//! A [`LinearNetwork`] is a square complex system `A·x = B·u` where `x` holds
//! internal variables and outgoing fields and `u` the incoming fields plus any
//! external drives. Solving it yields every transfer row and the S-matrix from
//! incoming to outgoing noise fields.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{solve_refined, Matrix};
use crate::C64;

mod sensor;
pub mod toy;

pub use sensor::{
    build_sensor_network, build_sensor_network_with, sensor_commutators, AmplifierNorm,
    SensorTransfer,
};

/// Condition estimates above this are flagged on the result.
pub const ILL_CONDITIONED: f64 = 1e12;
const REFINEMENT_ROUNDS: usize = 6;

#[derive(Debug, Clone, PartialEq)]
struct Input {
    label: String,
    /// `None` for an external drive, otherwise the commutator sign of the field.
    eta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
struct Output {
    unknown: usize,
    label: String,
    eta: f64,
}

/// A pair of quadrature ports `(p1, p2)` standing for the sidebands
/// `p1 = p₊ + p₋`, `p2 = i(p₊ − p₋)`. The η of `p₋` is minus that of `p₊`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct QuadraturePair {
    first: usize,
    second: usize,
}

#[derive(Debug, Clone, PartialEq)]
struct Equation {
    lhs: Vec<(usize, C64)>,
    rhs: Vec<(usize, C64)>,
}

/// Linear relations between unknowns and incoming fields at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearNetwork {
    omega: f64,
    unknowns: Vec<String>,
    inputs: Vec<Input>,
    outputs: Vec<Output>,
    input_pairs: Vec<QuadraturePair>,
    output_pairs: Vec<QuadraturePair>,
    equations: Vec<Equation>,
}

impl LinearNetwork {
    pub fn new(omega: f64) -> Self {
        LinearNetwork {
            omega,
            unknowns: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            input_pairs: Vec::new(),
            output_pairs: Vec::new(),
            equations: Vec::new(),
        }
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn unknown(&mut self, name: &str) -> usize {
        self.unknowns.push(name.into());
        self.unknowns.len() - 1
    }

    /// An external drive: it enters transfer rows but not the S-matrix.
    pub fn drive(&mut self, label: &str) -> usize {
        self.inputs.push(Input { label: label.into(), eta: None });
        self.inputs.len() - 1
    }

    /// An incoming noise field with commutator sign `eta`.
    pub fn line_input(&mut self, label: &str, eta: f64) -> usize {
        self.inputs.push(Input { label: label.into(), eta: Some(eta) });
        self.inputs.len() - 1
    }

    /// Declare an unknown to be an outgoing field.
    pub fn output(&mut self, unknown: usize, label: &str, eta: f64) {
        self.outputs.push(Output { unknown, label: label.into(), eta });
    }

    /// Mark two line inputs as the quadratures of one sideband pair.
    pub fn pair_inputs(&mut self, first: usize, second: usize) {
        self.input_pairs.push(QuadraturePair { first, second });
    }

    /// Mark two outputs (by unknown index) as the quadratures of one sideband pair.
    pub fn pair_outputs(&mut self, first: usize, second: usize) {
        self.output_pairs.push(QuadraturePair { first, second });
    }

    /// Append `Σ lhs·x = Σ rhs·u`.
    pub fn equation(&mut self, lhs: &[(usize, C64)], rhs: &[(usize, C64)]) {
        self.equations.push(Equation { lhs: lhs.to_vec(), rhs: rhs.to_vec() });
    }

    pub fn unknown_count(&self) -> usize {
        self.unknowns.len()
    }

    pub fn equation_count(&self) -> usize {
        self.equations.len()
    }

    pub fn is_square(&self) -> bool {
        self.unknowns.len() == self.equations.len()
    }

    fn matrices(&self) -> (Matrix, Matrix) {
        let n = self.unknowns.len();
        let mut a = Matrix::zeros(n, n);
        let mut b = Matrix::zeros(n, self.inputs.len());
        for (r, eq) in self.equations.iter().enumerate() {
            for &(j, v) in &eq.lhs {
                a[(r, j)] += v;
            }
            for &(j, v) in &eq.rhs {
                b[(r, j)] += v;
            }
        }
        (a, b)
    }

    pub fn solve(&self) -> Result<ScatteringResult> {
        solve(self)
    }
}

/// Outgoing fields against incoming fields, with transfer rows for every unknown.
#[derive(Debug, Clone)]
pub struct ScatteringResult {
    pub omega: f64,
    /// Rows: unknowns. Columns: inputs (drives and lines) in declaration order.
    pub solution: Matrix,
    /// Rows: outputs. Columns: line inputs only, in declaration order.
    pub s_matrix: Matrix,
    pub condition: f64,
    /// Normwise backward error of the returned solution.
    pub residual: f64,
    pub ill_conditioned: bool,
    unknowns: Vec<String>,
    inputs: Vec<Input>,
    outputs: Vec<Output>,
    input_pairs: Vec<QuadraturePair>,
    output_pairs: Vec<QuadraturePair>,
}

/// Solve the network and extract its S-matrix.
pub fn solve(net: &LinearNetwork) -> Result<ScatteringResult> {
    if !net.is_square() {
        return Err(Error::Invalid {
            name: "network",
            value: net.equations.len() as f64,
            reason: "equation count differs from unknown count",
        });
    }
    let (a, b) = net.matrices();
    let sol = solve_refined(&a, &b, REFINEMENT_ROUNDS)
        .map_err(|condition| Error::Singular { omega: net.omega, condition })?;

    let line_cols: Vec<usize> =
        (0..net.inputs.len()).filter(|&j| net.inputs[j].eta.is_some()).collect();
    let s_matrix = Matrix::from_fn(net.outputs.len(), line_cols.len(), |i, j| {
        sol.x[(net.outputs[i].unknown, line_cols[j])]
    });
    Ok(ScatteringResult {
        omega: net.omega,
        s_matrix,
        condition: sol.condition,
        residual: sol.backward_error,
        ill_conditioned: sol.condition > ILL_CONDITIONED,
        solution: sol.x,
        unknowns: net.unknowns.clone(),
        inputs: net.inputs.clone(),
        outputs: net.outputs.clone(),
        input_pairs: net.input_pairs.clone(),
        output_pairs: net.output_pairs.clone(),
    })
}

impl ScatteringResult {
    /// Transfer row of an unknown over all inputs.
    pub fn row(&self, unknown: &str) -> Option<&[C64]> {
        self.unknowns.iter().position(|u| u == unknown).map(|i| self.solution.row(i))
    }

    pub fn input_labels(&self) -> impl Iterator<Item = &str> {
        self.inputs.iter().map(|i| i.label.as_str())
    }

    pub fn input_index(&self, label: &str) -> Option<usize> {
        self.inputs.iter().position(|i| i.label == label)
    }

    pub fn output_labels(&self) -> impl Iterator<Item = &str> {
        self.outputs.iter().map(|o| o.label.as_str())
    }

    fn line_positions(&self) -> Vec<usize> {
        (0..self.inputs.len()).filter(|&j| self.inputs[j].eta.is_some()).collect()
    }

    /// S-matrix and η signs with every quadrature pair rotated into sidebands.
    pub fn sideband_form(&self) -> (Matrix, Vec<f64>, Vec<f64>) {
        let lines = self.line_positions();
        let col_of = |input: usize| lines.iter().position(|&c| c == input).expect("paired drive");
        let row_of = |unknown: usize| {
            self.outputs.iter().position(|o| o.unknown == unknown).expect("paired non-output")
        };
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);

        let mut eta_in: Vec<f64> = lines.iter().map(|&c| self.inputs[c].eta.unwrap_or(1.0)).collect();
        let mut t_in = Matrix::identity(lines.len());
        for p in &self.input_pairs {
            let (a, b) = (col_of(p.first), col_of(p.second));
            t_in[(a, a)] = one;
            t_in[(a, b)] = one;
            t_in[(b, a)] = i;
            t_in[(b, b)] = -i;
            eta_in[b] = -eta_in[a];
        }

        let mut eta_out: Vec<f64> = self.outputs.iter().map(|o| o.eta).collect();
        let mut t_out_inv = Matrix::identity(self.outputs.len());
        for p in &self.output_pairs {
            let (a, b) = (row_of(p.first), row_of(p.second));
            t_out_inv[(a, a)] = one * 0.5;
            t_out_inv[(a, b)] = -i * 0.5;
            t_out_inv[(b, a)] = one * 0.5;
            t_out_inv[(b, b)] = i * 0.5;
            eta_out[b] = -eta_out[a];
        }
        (t_out_inv.matmul(&self.s_matrix).matmul(&t_in), eta_in, eta_out)
    }

    /// Commutator deviation of the sideband-basis S-matrix.
    pub fn commutators(&self) -> CommutatorDeviation {
        let (s, eta_in, eta_out) = self.sideband_form();
        check_commutators(&s, &eta_in, &eta_out)
    }
}

/// Deviation of `S·η_in·S†` from `η_out`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorDeviation {
    /// max |(SηS† − η)_ij|
    pub absolute: f64,
    /// max |(SηS† − η)_ij| / (‖S_i‖·‖S_j‖), the rounding-scale-free form.
    pub normalized: f64,
}

impl CommutatorDeviation {
    pub fn worst(self) -> f64 {
        self.absolute.max(self.normalized)
    }
}

/// Check that a (possibly rectangular) S-matrix preserves field commutators.
pub fn check_commutators(s: &Matrix, eta_in: &[f64], eta_out: &[f64]) -> CommutatorDeviation {
    assert_eq!(s.cols(), eta_in.len(), "η_in length");
    assert_eq!(s.rows(), eta_out.len(), "η_out length");
    let norms: Vec<f64> = (0..s.rows()).map(|i| s.row_norm(i)).collect();
    let mut dev = CommutatorDeviation { absolute: 0.0, normalized: 0.0 };
    for i in 0..s.rows() {
        for j in 0..s.rows() {
            let mut acc = C64::new(0.0, 0.0);
            for (k, &e) in eta_in.iter().enumerate() {
                acc += s[(i, k)] * s[(j, k)].conj() * e;
            }
            if i == j {
                acc -= eta_out[i];
            }
            let d = acc.norm();
            dev.absolute = dev.absolute.max(d);
            let scale = norms[i] * norms[j];
            if scale > 0.0 {
                dev.normalized = dev.normalized.max(d / scale);
            }
        }
    }
    dev
}
