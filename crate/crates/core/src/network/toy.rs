//! Small passive circuits of noise lines and reactances, used to exercise
//! the solver and the commutator check on cases with known answers.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{nonzero, positive, Result};
use crate::noise::HBAR;
use crate::C64;
use libm::sqrt;

use super::LinearNetwork;

/// Lines and two-terminal impedances between numbered nodes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PassiveCircuit {
    nodes: usize,
    lines: Vec<(usize, f64)>,
    branches: Vec<(usize, Option<usize>, C64)>,
}

impl PassiveCircuit {
    pub fn new(nodes: usize) -> Self {
        PassiveCircuit { nodes, ..Default::default() }
    }

    /// A semi-infinite line of impedance `r` ending on `node`.
    pub fn line(mut self, node: usize, r: f64) -> Self {
        self.lines.push((node, r));
        self
    }

    /// An impedance from `a` to `b`, or to ground when `b` is `None`.
    pub fn branch(mut self, a: usize, b: Option<usize>, z: C64) -> Self {
        self.branches.push((a, b, z));
        self
    }

    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    /// Nodal equations at ω. Lines are inputs and outputs `p0, p1, …` in order.
    pub fn build(&self, omega: f64) -> Result<LinearNetwork> {
        let w = nonzero("omega", omega)?;
        let mut net = LinearNetwork::new(w);
        let one = C64::new(1.0, 0.0);
        let u: Vec<usize> = (0..self.nodes).map(|n| net.unknown(&format!("U{n}"))).collect();
        let mut kcl: Vec<Vec<(usize, C64)>> = alloc::vec![Vec::new(); self.nodes];
        for (k, &(node, r)) in self.lines.iter().enumerate() {
            positive("line impedance", r)?;
            let s = sqrt(2.0 * HBAR * w.abs() * r);
            let pin = net.line_input(&format!("p{k}"), 1.0);
            let i = net.unknown(&format!("I{k}"));
            let pout = net.unknown(&format!("p{k}_out"));
            net.equation(&[(u[node], one), (i, C64::new(-r, 0.0))], &[(pin, C64::new(s, 0.0))]);
            net.equation(&[(pout, one), (u[node], C64::new(-2.0 / s, 0.0))], &[(pin, -one)]);
            net.output(pout, &format!("p{k}"), 1.0);
            kcl[node].push((i, one));
        }
        for (k, &(a, b, z)) in self.branches.iter().enumerate() {
            let j = net.unknown(&format!("J{k}"));
            let mut eq = alloc::vec![(u[a], one), (j, -z)];
            if let Some(b) = b {
                eq.push((u[b], -one));
                kcl[b].push((j, -one));
            }
            net.equation(&eq, &[]);
            kcl[a].push((j, one));
        }
        for terms in kcl {
            net.equation(&terms, &[]);
        }
        Ok(net)
    }
}

/// Two lines of equal impedance joined at one node.
pub fn matched_junction(r: f64) -> PassiveCircuit {
    PassiveCircuit::new(1).line(0, r).line(0, r)
}

/// A single line ending on an open circuit.
pub fn open_line(r: f64) -> PassiveCircuit {
    PassiveCircuit::new(1).line(0, r)
}

/// Two lines coupled through a π network: shunt C₁, series L, shunt C₂.
pub fn pi_network(r1: f64, r2: f64, c1: f64, l: f64, c2: f64, omega: f64) -> PassiveCircuit {
    let cap = |c: f64| C64::new(0.0, 1.0 / (omega * c));
    PassiveCircuit::new(2)
        .line(0, r1)
        .line(1, r2)
        .branch(0, None, cap(c1))
        .branch(0, Some(1), C64::new(0.0, -omega * l))
        .branch(1, None, cap(c2))
}
