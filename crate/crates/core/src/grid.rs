//! Uniform grids on `[0, 1]`, sampled grid functions and the Hölder-seminorm
//! machinery.
//!
//! A grid function is the vertex list of a polygonal line. For polygonal
//! data the supremum defining the Hölder seminorm is attained on a pair of
//! vertices, so the all-pairs maximum computed here is the exact seminorm of
//! the polygonal extension, not an approximation of it.

use alloc::vec::Vec;
use core::fmt;

// Test builds link std, whose inherent f64 methods shadow these trait
// methods; non-test builds have no std and need the trait.
#[allow(unused_imports)]
use num_traits::Float;

/// Errors from grid construction and grid-function arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridError {
    /// Step outside (0, 1).
    InvalidStep { h: f64 },
    /// Hölder exponent outside (0, 1).
    InvalidExponent { beta: f64 },
    /// Value list length does not match the grid.
    LengthMismatch { expected: usize, got: usize },
    /// A sampled or supplied value is not finite.
    NonFiniteValue { index: usize, t: f64 },
    /// Two grid functions live on different grids.
    GridMismatch,
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidStep { h } => write!(f, "grid step {h} outside (0, 1)"),
            Self::InvalidExponent { beta } => {
                write!(f, "Hölder exponent {beta} outside (0, 1)")
            }
            Self::LengthMismatch { expected, got } => {
                write!(f, "expected {expected} values, got {got}")
            }
            Self::NonFiniteValue { index, t } => {
                write!(f, "non-finite value at node {index} (t = {t})")
            }
            Self::GridMismatch => write!(f, "grid functions live on different grids"),
        }
    }
}

impl core::error::Error for GridError {}

/// Hölder exponent β, restricted to the open interval (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderExponent(f64);

impl HolderExponent {
    pub fn new(beta: f64) -> Result<Self, GridError> {
        if beta.is_finite() && beta > 0.0 && beta < 1.0 {
            Ok(Self(beta))
        } else {
            Err(GridError::InvalidExponent { beta })
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// Uniform subdivision of `[0, 1]` with step `h`: nodes t_k = k·h for
/// k = 0..n where n = ⌊1/h⌋, so n·h ≤ 1 < (n+1)·h.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    h: f64,
    n: usize,
}

impl UniformGrid {
    pub fn new(h: f64) -> Result<Self, GridError> {
        if !h.is_finite() || h <= 0.0 || h >= 1.0 {
            return Err(GridError::InvalidStep { h });
        }
        let mut n = (1.0 / h).floor() as usize;
        // Enforce n·h ≤ 1 < (n+1)·h exactly in floating point.
        while ((n + 1) as f64) * h <= 1.0 {
            n += 1;
        }
        while n > 1 && (n as f64) * h > 1.0 {
            n -= 1;
        }
        Ok(Self { h, n })
    }

    /// Grid with step 2^{−m}; exact in binary floating point.
    pub fn dyadic(m: u32) -> Result<Self, GridError> {
        Self::new(0.5f64.powi(m as i32))
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Index of the last node.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of nodes, n + 1.
    #[inline]
    pub fn num_nodes(&self) -> usize {
        self.n + 1
    }

    #[inline]
    pub fn node(&self, k: usize) -> f64 {
        k as f64 * self.h
    }
}

/// Real values sampled at the grid nodes; the vertex list of a polygonal line.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    grid: UniformGrid,
    values: Vec<f64>,
}

impl GridFn {
    /// Wraps an explicit value list, checking length and finiteness.
    pub fn new(grid: UniformGrid, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.num_nodes() {
            return Err(GridError::LengthMismatch {
                expected: grid.num_nodes(),
                got: values.len(),
            });
        }
        for (k, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(GridError::NonFiniteValue {
                    index: k,
                    t: grid.node(k),
                });
            }
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at every node. A non-finite sample reports the offending node.
    pub fn sample<F: Fn(f64) -> f64>(grid: UniformGrid, f: F) -> Result<Self, GridError> {
        let mut values = Vec::with_capacity(grid.num_nodes());
        for k in 0..grid.num_nodes() {
            let t = grid.node(k);
            let v = f(t);
            if !v.is_finite() {
                return Err(GridError::NonFiniteValue { index: k, t });
            }
            values.push(v);
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: UniformGrid) -> Self {
        Self {
            grid,
            values: alloc::vec![0.0; grid.num_nodes()],
        }
    }

    #[inline]
    pub fn grid(&self) -> UniformGrid {
        self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    /// Nodewise combination of two grid functions on the same grid.
    pub fn combine<F: Fn(f64, f64) -> f64>(
        &self,
        other: &GridFn,
        f: F,
    ) -> Result<GridFn, GridError> {
        if self.grid != other.grid {
            return Err(GridError::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        GridFn::new(self.grid, values)
    }

    /// Nodewise map.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Result<GridFn, GridError> {
        GridFn::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Exact Hölder seminorm of the polygonal extension:
    /// max over node pairs of |v_j − v_i| / (t_j − t_i)^β.
    pub fn holder_seminorm(&self, beta: HolderExponent) -> f64 {
        max_quotient(&self.values, self.grid.h, beta.get(), self.grid.n)
    }

    /// Hölder seminorm of the nodewise difference; symmetric in its arguments.
    pub fn holder_error(&self, other: &GridFn, beta: HolderExponent) -> Result<f64, GridError> {
        let diff = self.combine(other, |a, b| a - b)?;
        Ok(diff.holder_seminorm(beta))
    }

    /// Modulus of continuity in the Hölder quotient: the seminorm restricted
    /// to node pairs with 0 < t_j − t_i ≤ δ. Returns 0 when no pair qualifies.
    pub fn modulus(&self, beta: HolderExponent, delta: f64) -> f64 {
        assert!(delta > 0.0, "modulus requires delta > 0");
        let mut d_max = 0;
        while d_max < self.grid.n && ((d_max + 1) as f64) * self.grid.h <= delta {
            d_max += 1;
        }
        max_quotient(&self.values, self.grid.h, beta.get(), d_max)
    }

    /// CSV rendering with header `t,value`, one row per node, 17 significant
    /// digits per field so the values round-trip losslessly.
    pub fn to_csv(&self) -> alloc::string::String {
        use core::fmt::Write;
        let mut out = alloc::string::String::from("t,value\n");
        for k in 0..=self.grid.n {
            let _ = writeln!(out, "{:.16e},{:.16e}", self.grid.node(k), self.values[k]);
        }
        out
    }
}

// Shared all-pairs scan: gaps handled per distance so the power is evaluated
// once per distance. On a uniform grid t_{i+d} − t_i = d·h.
pub(crate) fn max_quotient_by<T, D>(values: &[T], h: f64, beta: f64, d_max: usize, dist: D) -> f64
where
    D: Fn(&T, &T) -> f64,
{
    let n = values.len() - 1;
    let mut best = 0.0f64;
    for d in 1..=d_max.min(n) {
        let mut num = 0.0f64;
        for i in 0..=(n - d) {
            let q = dist(&values[i + d], &values[i]);
            if q > num {
                num = q;
            }
        }
        let quot = num / ((d as f64) * h).powf(beta);
        if quot > best {
            best = quot;
        }
    }
    best
}

fn max_quotient(values: &[f64], h: f64, beta: f64, d_max: usize) -> f64 {
    max_quotient_by(values, h, beta, d_max, |a, b| (a - b).abs())
}
