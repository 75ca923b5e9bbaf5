//! Signed log-space gamma and q-gamma kernels.
//!
//! Every lattice kernel is a ratio of (q-)gamma values whose arguments can be
//! large or negative, so all evaluation happens as `(ln |value|, sign)` pairs
//! and only the final kernel is exponentiated. Ratios where numerator and
//! denominator share a pole are resolved by their finite limit; a pole in the
//! denominator alone yields an exact zero.

use crate::{fl, Error, Real, Result};

/// Magnitude/sign representation of a nonzero (or exactly zero) real.
///
/// Zero is encoded as `ln = -inf`, which survives multiplication and
/// exponentiation without special cases.
#[derive(Debug, Clone, Copy)]
pub struct SignedLn<F> {
    pub ln: F,
    pub sign: i32,
}

impl<F: Real> SignedLn<F> {
    pub fn new(ln: F, sign: i32) -> Self {
        Self { ln, sign }
    }

    pub fn zero() -> Self {
        Self { ln: F::neg_infinity(), sign: 1 }
    }

    pub fn one() -> Self {
        Self { ln: F::zero(), sign: 1 }
    }

    /// From a plain nonzero real factor.
    pub fn from_value(v: F) -> Self {
        if v == F::zero() {
            Self::zero()
        } else if v > F::zero() {
            Self { ln: v.ln(), sign: 1 }
        } else {
            Self { ln: (-v).ln(), sign: -1 }
        }
    }

    pub fn mul(self, other: Self) -> Self {
        Self { ln: self.ln + other.ln, sign: self.sign * other.sign }
    }

    pub fn div(self, other: Self) -> Self {
        Self { ln: self.ln - other.ln, sign: self.sign * other.sign }
    }

    /// `value^p` for a positive-valued quantity; caller guarantees sign == 1.
    pub fn powf(self, p: F) -> Self {
        Self { ln: self.ln * p, sign: self.sign }
    }

    pub fn value(self) -> F {
        fl::<F>(self.sign as f64) * self.ln.exp()
    }
}

/// Absolute tolerance for recognizing integer arguments (pole detection).
const INT_TOL: f64 = 1e-9;

pub(crate) fn near_integer<F: Real>(x: F) -> Option<i64> {
    let r = x.round();
    if (x - r).abs() <= fl(INT_TOL) {
        r.to_i64()
    } else {
        None
    }
}

fn is_nonpositive_integer<F: Real>(x: F) -> Option<i64> {
    match near_integer(x) {
        Some(n) if n <= 0 => Some(n),
        _ => None,
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.5203681218851,
    -1259.1392167224028,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507343278686905,
    -0.13857109526572012,
    9.984_369_578_019_572e-6,
    1.5056327351493116e-7,
];

/// `ln |Gamma(x)|` with sign, via Lanczos and the reflection formula.
pub fn ln_gamma_signed<F: Real>(x: F) -> Result<SignedLn<F>> {
    if is_nonpositive_integer(x).is_some() {
        return Err(Error::Pole { arg: x.to_f64().unwrap_or(f64::NAN) });
    }
    let half = fl::<F>(0.5);
    if x >= half {
        return Ok(SignedLn::new(ln_gamma_positive(x), 1));
    }
    // Gamma(x) = pi / (sin(pi x) * Gamma(1 - x))
    let pi = F::PI();
    let s = (pi * x).sin();
    let ln = pi.ln() - s.abs().ln() - ln_gamma_positive(F::one() - x);
    Ok(SignedLn::new(ln, if s > F::zero() { 1 } else { -1 }))
}

fn ln_gamma_positive<F: Real>(x: F) -> F {
    let xm1 = x - F::one();
    let mut t = fl::<F>(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        t += fl::<F>(c) / (xm1 + fl::<F>(i as f64));
    }
    let w = xm1 + fl::<F>(LANCZOS_G) + fl::<F>(0.5);
    (F::PI() + F::PI()).sqrt().ln() + (xm1 + fl::<F>(0.5)) * w.ln() - w + t.ln()
}

/// `Gamma(a) / Gamma(b)` in signed log space.
///
/// Both arguments at poles resolve to the finite limit
/// `(-1)^(nb-na) Gamma(1+nb) / Gamma(1+na)`; a lone denominator pole gives
/// exact zero; a lone numerator pole is an error.
pub fn gamma_ratio<F: Real>(a: F, b: F) -> Result<SignedLn<F>> {
    let ap = is_nonpositive_integer(a);
    let bp = is_nonpositive_integer(b);
    match (ap, bp) {
        (Some(na), Some(nb)) => {
            let (na, nb) = (-na, -nb);
            let ln = ln_gamma_positive(fl::<F>((nb + 1) as f64))
                - ln_gamma_positive(fl::<F>((na + 1) as f64));
            let sign = if (nb - na).rem_euclid(2) == 0 { 1 } else { -1 };
            Ok(SignedLn::new(ln, sign))
        }
        (None, Some(_)) => Ok(SignedLn::zero()),
        (Some(_), None) => Err(Error::Pole { arg: a.to_f64().unwrap_or(f64::NAN) }),
        (None, None) => Ok(ln_gamma_signed(a)?.div(ln_gamma_signed(b)?)),
    }
}

/// Iteration cap for the q-gamma infinite products.
const Q_MAX_ITER: usize = 2_000_000;
/// Geometric tail threshold; factors beyond it are 1 to double precision.
const Q_TAIL: f64 = 1e-18;

/// `ln |Gamma_q(x)|` with sign for q > 0, q != 1.
///
/// For 0 < q < 1 this is the defining infinite product; q > 1 reduces through
/// `Gamma_q(x) = q^((x-1)(x-2)/2) Gamma_{1/q}(x)`.
pub fn ln_q_gamma_signed<F: Real>(q: F, x: F) -> Result<SignedLn<F>> {
    if q > F::one() {
        let base = ln_q_gamma_signed(q.recip(), x)?;
        let ln = base.ln + (x - F::one()) * (x - fl(2.0)) / fl(2.0) * q.ln();
        return Ok(SignedLn::new(ln, base.sign));
    }
    if is_nonpositive_integer(x).is_some() {
        return Err(Error::Pole { arg: x.to_f64().unwrap_or(f64::NAN) });
    }
    let one = F::one();
    let mut ln = (one - x) * (one - q).ln();
    let mut sign = 1;
    let tail = fl::<F>(Q_TAIL);
    let mut k = 0usize;
    loop {
        let kf = fl::<F>(k as f64);
        let num = one - q.powf(kf + one);
        let den = one - q.powf(x + kf);
        ln += num.ln() - den.abs().ln();
        if den < F::zero() {
            sign = -sign;
        }
        k += 1;
        let kf = fl::<F>(k as f64);
        if q.powf(kf + one) < tail && q.powf(x + kf) < tail {
            break;
        }
        if k > Q_MAX_ITER {
            return Err(Error::Divergence { terms: k });
        }
    }
    Ok(SignedLn::new(ln, sign))
}

/// `Gamma_q(a) / Gamma_q(b)` in signed log space, pole-pairs resolved.
pub fn q_gamma_ratio<F: Real>(q: F, a: F, b: F) -> Result<SignedLn<F>> {
    let ap = is_nonpositive_integer(a);
    let bp = is_nonpositive_integer(b);
    match (ap, bp) {
        (Some(na), Some(nb)) => {
            if q > F::one() {
                let base = q_gamma_ratio(q.recip(), a, b)?;
                let two = fl::<F>(2.0);
                let d = ((a - F::one()) * (a - two) - (b - F::one()) * (b - two)) / two;
                return Ok(SignedLn::new(base.ln + d * q.ln(), base.sign));
            }
            // Residue ratio at the poles -na and -nb:
            // prod_{j=1}^{nb} (1 - q^-j) / prod_{j=1}^{na} (1 - q^-j) * (1-q)^(na-nb)
            let (na, nb) = (-na, -nb);
            let mut out = SignedLn::one();
            for j in 1..=nb {
                let v = F::one() - q.powf(fl(-(j as f64)));
                out = out.mul(SignedLn::from_value(v));
            }
            for j in 1..=na {
                let v = F::one() - q.powf(fl(-(j as f64)));
                out = out.div(SignedLn::from_value(v));
            }
            let ln = out.ln + fl::<F>((na - nb) as f64) * (F::one() - q).ln();
            Ok(SignedLn::new(ln, out.sign))
        }
        (None, Some(_)) => Ok(SignedLn::zero()),
        (Some(_), None) => Err(Error::Pole { arg: a.to_f64().unwrap_or(f64::NAN) }),
        (None, None) => Ok(ln_q_gamma_signed(q, a)?.div(ln_q_gamma_signed(q, b)?)),
    }
}

/// The q-gamma function itself.
pub fn q_gamma<F: Real>(q: F, x: F) -> Result<F> {
    if q <= F::zero() || q == F::one() {
        return Err(Error::Domain(format!("q must be positive and != 1, got {}", q)));
    }
    Ok(ln_q_gamma_signed(q, x)?.value())
}
