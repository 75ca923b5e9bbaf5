//! Lattice families, shifted evaluation, symmetric q-brackets, modified
//! q-gamma and generalized power functions.
//!
//! A lattice is a function `x(s)` that is either quadratic in `s`,
//! `x(s) = c1 s^2 + c2 s + c3`, or q-quadratic,
//! `x(s) = c1 q^s + c2 q^{-s} + c3`; the linear and q-linear degenerations
//! keep only the affine (resp. single-exponential) part. The shifted lattice
//! is `x_gamma(s) = x(s + gamma/2)`, and every fractional operator threads
//! such a shift through its kernels.

use crate::gammas::{self, near_integer, SignedLn};
use crate::{fl, Error, Real, Result};

/// The four supported lattice families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeFamily {
    Linear,
    QLinear,
    Quadratic,
    QQuadratic,
}

impl LatticeFamily {
    pub fn is_q_family(self) -> bool {
        matches!(self, LatticeFamily::QLinear | LatticeFamily::QQuadratic)
    }

    pub fn name(self) -> &'static str {
        match self {
            LatticeFamily::Linear => "linear",
            LatticeFamily::QLinear => "q_linear",
            LatticeFamily::Quadratic => "quadratic",
            LatticeFamily::QQuadratic => "q_quadratic",
        }
    }
}

/// Direction of a one-step difference of the lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepDirection {
    Backward,
    Forward,
}

/// A lattice family together with its coefficients and derived constant.
///
/// The derived constant `c` is `c2/c1` for quadratic lattices and
/// `log(c2/c1)/log(q)` for q-quadratic ones; it shifts the second gamma-pair
/// argument of every generalized power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec<F> {
    family: LatticeFamily,
    q: F,
    c1: F,
    c2: F,
    c3: F,
    c: F,
}

impl<F: Real> LatticeSpec<F> {
    /// Linear lattice `x(s) = slope * s + offset`, slope > 0.
    pub fn linear(slope: F, offset: F) -> Result<Self> {
        if !(slope > F::zero()) || !slope.is_finite() || !offset.is_finite() {
            return Err(Error::InvalidLattice(format!(
                "linear lattice needs finite slope > 0, got slope={}",
                slope
            )));
        }
        Ok(Self { family: LatticeFamily::Linear, q: F::one(), c1: F::zero(), c2: slope, c3: offset, c: F::zero() })
    }

    /// The unit linear lattice `x(s) = s`.
    pub fn unit() -> Self {
        Self::linear(F::one(), F::zero()).expect("unit lattice is valid")
    }

    /// Quadratic lattice `x(s) = c1 s^2 + c2 s + c3`, c1 > 0.
    pub fn quadratic(c1: F, c2: F, c3: F) -> Result<Self> {
        if !(c1 > F::zero()) || !c1.is_finite() || !c2.is_finite() || !c3.is_finite() {
            return Err(Error::InvalidLattice(format!(
                "quadratic lattice needs finite c1 > 0, got c1={}",
                c1
            )));
        }
        Ok(Self { family: LatticeFamily::Quadratic, q: F::one(), c1, c2, c3, c: c2 / c1 })
    }

    /// q-linear lattice `x(s) = c1 q^s + c3`, c1 > 0, q > 0, q != 1.
    pub fn q_linear(q: F, c1: F, c3: F) -> Result<Self> {
        Self::check_q(q)?;
        if !(c1 > F::zero()) || !c1.is_finite() || !c3.is_finite() {
            return Err(Error::InvalidLattice(format!(
                "q-linear lattice needs finite c1 > 0, got c1={}",
                c1
            )));
        }
        Ok(Self { family: LatticeFamily::QLinear, q, c1, c2: F::zero(), c3, c: F::zero() })
    }

    /// q-quadratic lattice `x(s) = c1 q^s + c2 q^{-s} + c3` with c1, c2 > 0.
    ///
    /// `c2/c1 > 0` keeps the derived constant `c = log(c2/c1)/log(q)` real;
    /// the positive sign is additionally required so that fractional powers
    /// of the coefficient prefactor stay real.
    pub fn q_quadratic(q: F, c1: F, c2: F, c3: F) -> Result<Self> {
        Self::check_q(q)?;
        if !(c1 > F::zero()) || !(c2 > F::zero()) || !c3.is_finite() {
            return Err(Error::InvalidLattice(format!(
                "q-quadratic lattice needs c1 > 0 and c2 > 0, got c1={} c2={}",
                c1, c2
            )));
        }
        let c = (c2 / c1).ln() / q.ln();
        Ok(Self { family: LatticeFamily::QQuadratic, q, c1, c2, c3, c })
    }

    fn check_q(q: F) -> Result<()> {
        if !(q > F::zero()) || q == F::one() || !q.is_finite() {
            return Err(Error::InvalidLattice(format!("q must be finite, positive and != 1, got {}", q)));
        }
        Ok(())
    }

    pub fn family(&self) -> LatticeFamily {
        self.family
    }

    pub fn q(&self) -> F {
        self.q
    }

    pub fn coefficients(&self) -> (F, F, F) {
        (self.c1, self.c2, self.c3)
    }

    /// The stored derived constant.
    pub fn c(&self) -> F {
        self.c
    }

    /// Recomputes `c` from the coefficients.
    pub fn derived_c(&self) -> F {
        match self.family {
            LatticeFamily::Quadratic => self.c2 / self.c1,
            LatticeFamily::QQuadratic => (self.c2 / self.c1).ln() / self.q.ln(),
            _ => F::zero(),
        }
    }

    /// Lattice value `x(s)`.
    pub fn x(&self, s: F) -> F {
        match self.family {
            LatticeFamily::Linear => self.c2 * s + self.c3,
            LatticeFamily::Quadratic => (self.c1 * s + self.c2) * s + self.c3,
            LatticeFamily::QLinear => self.c1 * self.q.powf(s) + self.c3,
            LatticeFamily::QQuadratic => self.c1 * self.q.powf(s) + self.c2 * self.q.powf(-s) + self.c3,
        }
    }

    /// Shifted lattice value `x_gamma(s) = x(s + gamma/2)`.
    pub fn x_shifted(&self, gamma: F, s: F) -> F {
        self.x(s + gamma / fl(2.0))
    }

    /// One-step difference of the shifted lattice at `s`.
    pub fn step_x(&self, gamma: F, s: F, direction: StepDirection) -> F {
        match direction {
            StepDirection::Backward => self.x_shifted(gamma, s) - self.x_shifted(gamma, s - F::one()),
            StepDirection::Forward => self.x_shifted(gamma, s + F::one()) - self.x_shifted(gamma, s),
        }
    }

    /// Backward step `x_gamma(s) - x_gamma(s-1)`, the nabla measure.
    pub fn nabla_x(&self, gamma: F, s: F) -> F {
        self.step_x(gamma, s, StepDirection::Backward)
    }

    /// Central step `x(t + 1/2) - x(t - 1/2)`, the delta measure.
    pub fn delta_x(&self, t: F) -> F {
        let half = fl::<F>(0.5);
        self.x(t + half) - self.x(t - half)
    }

    /// The symmetric q-bracket; degenerates to `mu` on quadratic lattices.
    pub fn bracket(&self, mu: F) -> F {
        if !self.family.is_q_family() {
            return mu;
        }
        let q = self.q;
        let half = fl::<F>(0.5);
        (q.powf(mu * half) - q.powf(-mu * half)) / (q.powf(half) - q.powf(-half))
    }

    /// `[n]_q! = [1]_q [2]_q ... [n]_q`.
    pub fn bracket_factorial(&self, n: usize) -> F {
        let mut acc = F::one();
        for j in 1..=n {
            acc *= self.bracket(fl(j as f64));
        }
        acc
    }

    /// Log-space modified q-gamma `[Gamma(x)]_q = q^{-(x-1)(x-2)/4} Gamma_q(x)`;
    /// plain Euler gamma on the quadratic and linear families.
    pub fn modified_ln_gamma(&self, x: F) -> Result<SignedLn<F>> {
        if self.family.is_q_family() {
            let base = gammas::ln_q_gamma_signed(self.q, x)?;
            let two = fl::<F>(2.0);
            let ln = base.ln - (x - F::one()) * (x - two) / fl(4.0) * self.q.ln();
            Ok(SignedLn::new(ln, base.sign))
        } else {
            gammas::ln_gamma_signed(x)
        }
    }

    /// The modified q-gamma as a value.
    pub fn modified_gamma(&self, x: F) -> Result<F> {
        Ok(self.modified_ln_gamma(x)?.value())
    }

    /// `[Gamma(a)]_q / [Gamma(b)]_q`, robust across shared poles.
    pub fn modified_gamma_ratio(&self, a: F, b: F) -> Result<SignedLn<F>> {
        if self.family.is_q_family() {
            let base = gammas::q_gamma_ratio(self.q, a, b)?;
            let one = F::one();
            let two = fl::<F>(2.0);
            let d = ((b - one) * (b - two) - (a - one) * (a - two)) / fl(4.0) * self.q.ln();
            Ok(SignedLn::new(base.ln + d, base.sign))
        } else {
            gammas::gamma_ratio(a, b)
        }
    }

    /// Reciprocal `1 / [Gamma(x)]_q`; exactly zero at the poles.
    pub fn modified_gamma_recip(&self, x: F) -> Result<F> {
        if near_integer(x).is_some_and(|n| n <= 0) {
            return Ok(F::zero());
        }
        Ok(self.modified_ln_gamma(x)?.div(SignedLn::one()).powf(-F::one()).value())
    }

    /// Generalized power `[x_nu(s) - x_nu(z)]^(alpha)`.
    ///
    /// Accepts either a non-negative integer exponent (defining product, any
    /// arguments) or `s - z` a positive integer (gamma-ratio branch, any real
    /// exponent). Everything the kernel sums evaluate falls in this set;
    /// other argument combinations are rejected rather than continued.
    pub fn gen_power(&self, nu: F, s: F, z: F, alpha: F) -> Result<F> {
        if let Some(n) = near_integer(alpha) {
            if n >= 0 {
                return self.gen_power_product(nu, s, z, n as usize);
            }
        }
        match near_integer(s - z) {
            Some(n) if n >= 1 => self.gen_power_ratio(nu, s, z, alpha).map(SignedLn::value),
            _ => Err(Error::Domain(format!(
                "generalized power needs an integer exponent or s - z a positive integer; got exponent {} and s - z = {}",
                alpha,
                s - z
            ))),
        }
    }

    /// Analytic extension of the gamma-ratio branch to arbitrary real `s - z`
    /// (series evaluation samples generalized powers off the integer comb).
    pub(crate) fn gen_power_any(&self, nu: F, s: F, z: F, alpha: F) -> Result<F> {
        if let Some(n) = near_integer(alpha) {
            if n >= 0 {
                return self.gen_power_product(nu, s, z, n as usize);
            }
        }
        self.gen_power_ratio(nu, s, z, alpha).map(SignedLn::value)
    }

    fn gen_power_product(&self, nu: F, s: F, z: F, n: usize) -> Result<F> {
        if n > 100_000 {
            return Err(Error::Domain(format!("integer power exponent {} too large", n)));
        }
        let mut acc = F::one();
        let xs = self.x_shifted(nu, s);
        for k in 0..n {
            acc *= xs - self.x_shifted(nu, z - fl(k as f64));
        }
        Ok(acc)
    }

    fn gen_power_ratio(&self, nu: F, s: F, z: F, alpha: F) -> Result<SignedLn<F>> {
        let one = F::one();
        match self.family {
            LatticeFamily::Linear => {
                let r = gammas::gamma_ratio(s - z + alpha, s - z)?;
                Ok(SignedLn::new(r.ln + alpha * self.c2.ln(), r.sign))
            }
            LatticeFamily::Quadratic => {
                let c = self.c;
                let r1 = gammas::gamma_ratio(s - z + alpha, s - z)?;
                let r2 = gammas::gamma_ratio(s + z + nu + c + one, s + z + nu - alpha + c + one)?;
                let out = r1.mul(r2);
                Ok(SignedLn::new(out.ln + alpha * self.c1.ln(), out.sign))
            }
            LatticeFamily::QQuadratic => {
                let (q, c) = (self.q, self.c);
                let r1 = gammas::q_gamma_ratio(q, s - z + alpha, s - z)?;
                let r2 = gammas::q_gamma_ratio(q, s + z + nu - c + one, s + z + nu - alpha - c + one)?;
                let out = r1.mul(r2);
                let two = fl::<F>(2.0);
                let pre = alpha * (self.c1 * (one - q) * (one - q)).ln()
                    + alpha * (c - s - nu / two) * q.ln();
                Ok(SignedLn::new(out.ln + pre, out.sign))
            }
            LatticeFamily::QLinear => {
                let q = self.q;
                if q < one {
                    // (q-1)^alpha is not real for fractional alpha when q < 1.
                    return Err(Error::Domain(
                        "q-linear lattice with 0 < q < 1 supports integer exponents only".into(),
                    ));
                }
                let r = gammas::q_gamma_ratio(q, s - z + alpha, s - z)?;
                let two = fl::<F>(2.0);
                let pre = alpha * (self.c1 * (q - one)).ln()
                    + (alpha * (z + nu / two) - alpha * (alpha - one) / two) * q.ln();
                Ok(SignedLn::new(r.ln + pre, r.sign))
            }
        }
    }
}

/// Plain q-gamma, re-exported at the lattice layer.
pub fn q_gamma<F: Real>(q: F, x: F) -> Result<F> {
    gammas::q_gamma(q, x)
}
