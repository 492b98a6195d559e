//! Labels of the nine incoming noise fields and coefficient tables over them.

use core::fmt;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::C64;

/// Incoming noise fields of the sensor, in canonical port order.
///
/// `M` is the mechanical damping line; the others are quadratures 1 and 2 of
/// the amplifier voltage (`A`) and current (`B`) noise, the detection line
/// (`R`) and the loss line (`L`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Line {
    M,
    A1,
    A2,
    B1,
    B2,
    R1,
    R2,
    L1,
    L2,
}

impl Line {
    pub const ALL: [Line; 9] =
        [Line::M, Line::A1, Line::A2, Line::B1, Line::B2, Line::R1, Line::R2, Line::L1, Line::L2];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Line::M => "m",
            Line::A1 => "a1",
            Line::A2 => "a2",
            Line::B1 => "b1",
            Line::B2 => "b2",
            Line::R1 => "r1",
            Line::R2 => "r2",
            Line::L1 => "l1",
            Line::L2 => "l2",
        }
    }

    /// The amplifier current field enters after a conjugation.
    pub fn conjugated(self) -> bool {
        matches!(self, Line::B1 | Line::B2)
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One complex coefficient per noise line; absent couplings are stored as zero.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoefficientSet(pub [C64; 9]);

impl CoefficientSet {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn get(&self, line: Line) -> C64 {
        self.0[line.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Line, C64)> + '_ {
        Line::ALL.iter().map(move |&l| (l, self.0[l.index()]))
    }

    pub fn scale(&self, k: C64) -> Self {
        CoefficientSet(self.0.map(|c| c * k))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest entry-wise difference relative to the largest entry of `reference`.
    pub fn max_rel_deviation(&self, reference: &CoefficientSet) -> f64 {
        let scale = reference.max_abs();
        let diff = (*self - *reference).max_abs();
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }
}

impl Index<Line> for CoefficientSet {
    type Output = C64;
    fn index(&self, line: Line) -> &C64 {
        &self.0[line.index()]
    }
}

impl IndexMut<Line> for CoefficientSet {
    fn index_mut(&mut self, line: Line) -> &mut C64 {
        &mut self.0[line.index()]
    }
}

impl Add for CoefficientSet {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        CoefficientSet(core::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for CoefficientSet {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        CoefficientSet(core::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Mul<C64> for CoefficientSet {
    type Output = Self;
    fn mul(self, k: C64) -> Self {
        self.scale(k)
    }
}
