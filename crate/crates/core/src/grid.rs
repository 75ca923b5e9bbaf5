//! Grid functions and operator configuration.

use crate::lattice::LatticeSpec;
use crate::{fl, Error, Real, Result};

/// Real samples of a function on a unit-step grid `{base, base+1, ...}`.
///
/// The step is exactly 1 in the lattice variable `s`; the lattice map `x(s)`
/// is what makes the grid non-uniform in `x`-space. The base may be any real
/// (central operators live on half-shifted grids).
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<F> {
    base: F,
    values: Vec<F>,
}

impl<F: Real> GridFunction<F> {
    pub fn new(base: F, values: Vec<F>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidGrid("grid needs at least one sample".into()));
        }
        if !base.is_finite() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("grid base and samples must be finite".into()));
        }
        Ok(Self { base, values })
    }

    /// Samples `f` at `base, base+1, ..., base+count-1`.
    pub fn sample(base: F, count: usize, mut f: impl FnMut(F) -> F) -> Result<Self> {
        let values = (0..count).map(|k| f(base + fl(k as f64))).collect();
        Self::new(base, values)
    }

    pub fn base(&self) -> F {
        self.base
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    /// Grid point of the k-th sample.
    pub fn point(&self, k: usize) -> F {
        self.base + fl(k as f64)
    }

    /// Index of the sample at grid point `z`, if `z` lies on the grid.
    pub fn index_of(&self, z: F) -> Option<usize> {
        let d = z - self.base;
        let r = d.round();
        if (d - r).abs() > fl(1e-6) {
            return None;
        }
        let i = r.to_isize()?;
        if i >= 0 && (i as usize) < self.values.len() {
            Some(i as usize)
        } else {
            None
        }
    }

    /// Sample value at grid point `z`.
    pub fn value_at(&self, z: F) -> Option<F> {
        self.index_of(z).map(|i| self.values[i])
    }

    /// Prepends `k` zero samples, moving the base down by `k`.
    ///
    /// Only valid when the function genuinely extends by zero below its base
    /// (fractional-sum outputs do: their value is an empty sum there).
    pub fn with_zero_prefix(&self, k: usize) -> Self {
        let mut values = vec![F::zero(); k];
        values.extend_from_slice(&self.values);
        Self { base: self.base - fl(k as f64), values }
    }

    /// Drops the first `k` samples, moving the base up by `k`.
    pub fn restricted(&self, k: usize) -> Result<Self> {
        if k >= self.values.len() {
            return Err(Error::Size { needed: k, got: self.values.len() });
        }
        Ok(Self { base: self.base + fl(k as f64), values: self.values[k..].to_vec() })
    }

    /// Max-norm of the samples.
    pub fn max_norm(&self) -> F {
        self.values.iter().fold(F::zero(), |m, v| m.max(v.abs()))
    }
}

/// A fractional order `alpha > 0` with its ceiling integer `m`.
///
/// `m - 1 < alpha <= m`; integral orders have `m = alpha` rather than the
/// next integer up, so compose forms reduce to plain nested differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder<F> {
    alpha: F,
    m: usize,
}

impl<F: Real> FracOrder<F> {
    pub fn new(alpha: F) -> Result<Self> {
        if !alpha.is_finite() || !(alpha > F::zero()) {
            return Err(Error::InvalidOrder(format!("alpha must be finite and > 0, got {}", alpha)));
        }
        let m = if Self::integral(alpha) {
            alpha.round().to_usize().ok_or_else(|| Error::InvalidOrder(format!("alpha {} too large", alpha)))?
        } else {
            alpha.ceil().to_usize().ok_or_else(|| Error::InvalidOrder(format!("alpha {} too large", alpha)))?
        };
        if m == 0 || m > 1_000 {
            return Err(Error::InvalidOrder(format!("alpha {} outside the supported range", alpha)));
        }
        Ok(Self { alpha, m })
    }

    fn integral(alpha: F) -> bool {
        (alpha - alpha.round()).abs() <= fl(1e-12)
    }

    pub fn alpha(&self) -> F {
        self.alpha
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_integer(&self) -> bool {
        Self::integral(self.alpha)
    }
}

/// Lattice, shift and order for the backward (nabla) operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorConfig<F> {
    pub lattice: LatticeSpec<F>,
    pub gamma: F,
    pub order: FracOrder<F>,
}

impl<F: Real> OperatorConfig<F> {
    pub fn new(lattice: LatticeSpec<F>, gamma: F, alpha: F) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::InvalidOrder(format!("gamma must be finite, got {}", gamma)));
        }
        Ok(Self { lattice, gamma, order: FracOrder::new(alpha)? })
    }

    /// Same lattice and shift, different order.
    pub fn with_alpha(&self, alpha: F) -> Result<Self> {
        Ok(Self { lattice: self.lattice, gamma: self.gamma, order: FracOrder::new(alpha)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_order_ceiling() {
        let o = FracOrder::new(0.5f64).unwrap();
        assert_eq!(o.m(), 1);
        assert!(!o.is_integer());
        let o = FracOrder::new(2.0f64).unwrap();
        assert_eq!(o.m(), 2);
        assert!(o.is_integer());
        let o = FracOrder::new(2.3f64).unwrap();
        assert_eq!(o.m(), 3);
        assert!(FracOrder::new(0.0f64).is_err());
        assert!(FracOrder::new(-1.0f64).is_err());
    }

    #[test]
    fn grid_indexing() {
        let g = GridFunction::new(0.25f64, vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(g.index_of(1.25), Some(1));
        assert_eq!(g.index_of(1.5), None);
        assert_eq!(g.value_at(2.25), Some(3.0));
        assert_eq!(g.point(2), 2.25);
        let z = g.with_zero_prefix(2);
        assert_eq!(z.base(), -1.75);
        assert_eq!(z.values()[..2], [0.0, 0.0]);
        let r = g.restricted(1).unwrap();
        assert_eq!(r.base(), 1.25);
        assert_eq!(r.values(), &[2.0, 3.0]);
    }

    #[test]
    fn grid_validation() {
        assert!(GridFunction::<f64>::new(0.0, vec![]).is_err());
        assert!(GridFunction::new(0.0, vec![f64::NAN]).is_err());
        assert!(GridFunction::new(f64::INFINITY, vec![1.0]).is_err());
    }
}
