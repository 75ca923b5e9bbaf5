//! Fractional exponential and trigonometric series, and series solutions of
//! sequential fractional difference equations.
//!
//! The building block is the term family
//! `T_k(z) = [x(z) - x_{k a - 1}(anchor)]^(k a) / [Gamma(k a + 1)]_q`,
//! whose Caputo central difference of order `a` maps `T_k` to `T_{k-1}` and
//! kills `T_0`. The fractional exponential is `e(a, l, z) = sum l^k T_k(z)`;
//! it therefore solves the eigenvalue equation of the Caputo central
//! difference, and its even/odd parts in an imaginary eigenvalue are the
//! fractional cosine and sine.

use num_complex::Complex;

use crate::central::{central_caputo, CentralConfig};
use crate::grid::GridFunction;
use crate::{fl, Error, Real, Result};

/// Eigenvalue, frequency and truncation controls for the series operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSpec<F> {
    /// Eigenvalue of the fractional exponential (may be complex).
    pub lambda: Complex<F>,
    /// Frequency of the trigonometric pair.
    pub omega: F,
    /// Hard cap on the number of series terms.
    pub max_terms: usize,
    /// Relative tail tolerance that stops accumulation.
    pub tail_tol: F,
}

impl<F: Real> SeriesSpec<F> {
    pub fn new(lambda: Complex<F>, omega: F, max_terms: usize, tail_tol: F) -> Result<Self> {
        let s = Self { lambda, omega, max_terms, tail_tol };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_terms == 0 {
            return Err(Error::InvalidOrder("max_terms must be >= 1".into()));
        }
        if !(self.tail_tol > F::zero()) {
            return Err(Error::InvalidOrder(format!("tail_tol must be > 0, got {}", self.tail_tol)));
        }
        if !(self.omega >= F::zero()) {
            return Err(Error::InvalidOrder(format!("omega must be >= 0, got {}", self.omega)));
        }
        if !self.lambda.re.is_finite() || !self.lambda.im.is_finite() {
            return Err(Error::InvalidOrder("lambda must be finite".into()));
        }
        Ok(())
    }
}

/// A truncated series value with its tail estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue<F> {
    pub value: F,
    pub err_estimate: F,
    pub terms: usize,
}

/// Both trigonometric series at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigValue<F> {
    pub cos: F,
    pub sin: F,
    pub err_estimate: F,
}

/// The k-th series term `T_k(z)` for order `alpha` anchored at `cfg.a`.
pub fn exp_term<F: Real>(cfg: &CentralConfig<F>, k: usize, z: F) -> Result<F> {
    let alpha = cfg.order.alpha();
    let ka = fl::<F>(k as f64) * alpha;
    let nu = ka - F::one();
    let two = fl::<F>(2.0);
    let gp = cfg.lattice.gen_power_any(nu, z - nu / two, cfg.a, ka)?;
    let inv_g = cfg.lattice.modified_gamma_ratio(F::one(), ka + F::one())?.value();
    Ok(gp * inv_g)
}

/// Closed form of the first central difference of `T_k`:
/// `[x(z) - x_{k a - 2}(anchor)]^(k a - 1) / [Gamma(k a)]_q`.
///
/// Equality with the difference quotient of `T_k` samples is the pointwise
/// rule that drives the whole eigenvalue algebra; tests check it directly.
pub fn exp_term_diff<F: Real>(cfg: &CentralConfig<F>, k: usize, z: F) -> Result<F> {
    let alpha = cfg.order.alpha();
    let ka = fl::<F>(k as f64) * alpha;
    let nu = ka - fl(2.0);
    let two = fl::<F>(2.0);
    let gp = cfg.lattice.gen_power_any(nu, z - nu / two, cfg.a, ka - F::one())?;
    let inv_g = cfg.lattice.modified_gamma_ratio(F::one(), ka)?.value();
    Ok(gp * inv_g)
}

fn term_from<F: Real>(coef: Complex<F>, t: F) -> Complex<F> {
    coef * Complex::new(t, F::zero())
}

fn sum_series<F: Real>(
    cfg: &CentralConfig<F>,
    z: F,
    mut term_coef: impl FnMut(usize) -> Complex<F>,
    term_index: impl Fn(usize) -> usize,
) -> Result<(Complex<F>, F, usize)> {
    let spec = &cfg.series;
    let floor = fl::<F>(1e-300);
    let mut sum = Complex::new(F::zero(), F::zero());
    let mut last = F::infinity();
    let mut prev = F::infinity();
    // best truncation point seen so far, for the asymptotic regime where
    // terms pass through a minimum and then regrow
    let mut best_sum = sum;
    let mut best_err = F::infinity();
    let mut best_k = 0usize;
    for k in 0..spec.max_terms {
        let coef = term_coef(k);
        let t = exp_term(cfg, term_index(k), z)?;
        if !t.is_finite() {
            return Err(Error::Domain(format!("series term {} is not finite at z = {}", k, z)));
        }
        sum += term_from(coef, t);
        prev = last;
        last = term_from(coef, t).norm();
        // single terms can vanish exactly on lattice points, so stop only
        // after two consecutive small terms
        let bound = spec.tail_tol * sum.norm().max(floor);
        if k > 1 && last <= bound && prev <= bound {
            return Ok((sum, last.max(prev), k + 1));
        }
        if k > 0 && last.max(prev) < best_err {
            best_err = last.max(prev);
            best_sum = sum;
            best_k = k + 1;
        }
        // a tail that regrows far past a genuinely small minimum will not
        // come back down fast enough to beat it: truncate at the minimum
        let scale = best_sum.norm().max(F::one());
        if best_err < fl::<F>(1e-2) * scale && last > best_err * fl(1e6) {
            return Ok((best_sum, best_err, best_k));
        }
        if !sum.norm().is_finite() || last > fl(1e250) {
            if best_err < fl::<F>(1e-2) * scale {
                return Ok((best_sum, best_err, best_k));
            }
            return Err(Error::Divergence { terms: k + 1 });
        }
    }
    if last > prev && last > spec.tail_tol * sum.norm().max(floor) {
        if best_err < fl::<F>(1e-2) * best_sum.norm().max(F::one()) {
            return Ok((best_sum, best_err, best_k));
        }
        return Err(Error::Divergence { terms: spec.max_terms });
    }
    Ok((sum, last, spec.max_terms))
}

/// Fractional exponential at `z` with a complex eigenvalue.
pub fn frac_exp_complex<F: Real>(
    cfg: &CentralConfig<F>,
    lambda: Complex<F>,
    z: F,
) -> Result<(Complex<F>, F, usize)> {
    let mut pow = Complex::new(F::one(), F::zero());
    sum_series(
        cfg,
        z,
        |k| {
            if k == 0 {
                pow = Complex::new(F::one(), F::zero());
            } else {
                pow *= lambda;
            }
            pow
        },
        |k| k,
    )
}

/// Fractional exponential at `z` with the (real) eigenvalue from
/// `cfg.series.lambda`; returns the value, a tail estimate and the number of
/// terms used.
pub fn frac_exp<F: Real>(cfg: &CentralConfig<F>, z: F) -> Result<SeriesValue<F>> {
    let lambda = cfg.series.lambda;
    if lambda.im != F::zero() {
        return Err(Error::Domain("frac_exp needs a real eigenvalue; use frac_exp_complex".into()));
    }
    let (v, err, terms) = frac_exp_complex(cfg, lambda, z)?;
    Ok(SeriesValue { value: v.re, err_estimate: err, terms })
}

/// Fractional exponential sampled on `{base, base+1, ...}`.
pub fn frac_exp_grid<F: Real>(
    cfg: &CentralConfig<F>,
    base: F,
    count: usize,
) -> Result<(GridFunction<F>, Vec<SeriesValue<F>>)> {
    let mut values = Vec::with_capacity(count);
    let mut meta = Vec::with_capacity(count);
    for j in 0..count {
        let v = frac_exp(cfg, base + fl(j as f64))?;
        values.push(v.value);
        meta.push(v);
    }
    Ok((GridFunction::new(base, values)?, meta))
}

/// Fractional cosine and sine at `z` with frequency `cfg.series.omega`.
///
/// Both series are accumulated directly (even and odd terms with alternating
/// signs); the identity with the complex exponential is checked by the
/// verification suite rather than built in.
pub fn frac_trig<F: Real>(cfg: &CentralConfig<F>, z: F) -> Result<TrigValue<F>> {
    let omega = cfg.series.omega;
    let one = Complex::new(F::one(), F::zero());
    let mut sign = one;
    let mut pow = one;
    let (cos, cos_err, _) = sum_series(
        cfg,
        z,
        |k| {
            if k == 0 {
                sign = one;
                pow = one;
            } else {
                sign = -sign;
                pow *= Complex::new(omega * omega, F::zero());
            }
            sign * pow
        },
        |k| 2 * k,
    )?;
    let mut sign = one;
    let mut pow = Complex::new(omega, F::zero());
    let (sin, sin_err, _) = sum_series(
        cfg,
        z,
        |k| {
            if k == 0 {
                sign = one;
                pow = Complex::new(omega, F::zero());
            } else {
                sign = -sign;
                pow *= Complex::new(omega * omega, F::zero());
            }
            sign * pow
        },
        |k| 2 * k + 1,
    )?;
    Ok(TrigValue { cos: cos.re, sin: sin.re, err_estimate: cos_err.max(sin_err) })
}

/// Caputo central difference of the fractional exponential, evaluated
/// through the term recurrence (each term maps to its predecessor).
pub fn caputo_frac_exp<F: Real>(
    cfg: &CentralConfig<F>,
    lambda: Complex<F>,
    z: F,
) -> Result<(Complex<F>, F, usize)> {
    let mut pow = lambda;
    sum_series(
        cfg,
        z,
        |k| {
            if k == 0 {
                pow = lambda;
            } else {
                pow *= lambda;
            }
            pow
        },
        |k| k,
    )
}

/// Grid-level check that the Caputo difference maps the k-th series term to
/// the (k-1)-th: samples `T_k` on its own natural comb (one point below the
/// first sum point) and pushes it through the grid operator.
pub fn caputo_term_defect<F: Real>(cfg: &CentralConfig<F>, k: usize, points: usize) -> Result<F> {
    if k == 0 {
        // the constant term is annihilated
        let base = cfg.a + fl(0.5);
        let ones = GridFunction::sample(base, points + 2, |_| F::one())?;
        let out = central_caputo(cfg, &ones)?;
        return Ok(out.max_norm());
    }
    let alpha = cfg.order.alpha();
    let m = cfg.order.m();
    if m != 1 {
        return Err(Error::Order("term recurrence check assumes 0 < alpha <= 1".into()));
    }
    let two = fl::<F>(2.0);
    let ka = fl::<F>(k as f64) * alpha;
    // base one full step below the first point of the natural comb of T_k'
    let base = cfg.a + (ka + F::one()) / two - F::one();
    let samples = GridFunction::sample(base, points + 2, |z| exp_term(cfg, k, z).unwrap_or(F::nan()))?;
    if samples.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("series term evaluation failed on the sample comb".into()));
    }
    let out = central_caputo(cfg, &samples)?;
    let mut worst = F::zero();
    for i in 0..out.count() {
        let z = out.point(i);
        let want = exp_term(cfg, k - 1, z)?;
        worst = worst.max((out.values()[i] - want).abs());
    }
    Ok(worst)
}

/// One root of the characteristic polynomial with its eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdeRoot<F> {
    pub lambda: Complex<F>,
}

/// Series solution set of a sequential fractional difference equation with
/// constant coefficients `a_0 + a_1 L + ... + a_n L^n` acting through powers
/// of the order-`alpha` Caputo central difference.
#[derive(Debug, Clone, PartialEq)]
pub struct FdeSolution<F> {
    coeffs: Vec<F>,
    roots: Vec<FdeRoot<F>>,
    repeated_roots: bool,
}

impl<F: Real> FdeSolution<F> {
    pub fn roots(&self) -> &[FdeRoot<F>] {
        &self.roots
    }

    /// Distinct roots give independent solutions; repeated roots fall
    /// outside the series ansatz and only raise this flag.
    pub fn has_repeated_roots(&self) -> bool {
        self.repeated_roots
    }

    /// Evaluates the i-th basis solution `e(alpha, lambda_i, z)`.
    pub fn solution(&self, cfg: &CentralConfig<F>, i: usize, z: F) -> Result<Complex<F>> {
        let root = self.roots.get(i).ok_or_else(|| Error::Domain(format!("no root #{}", i)))?;
        Ok(frac_exp_complex(cfg, root.lambda, z)?.0)
    }

    /// Max over roots and points of the operator residual
    /// `|sum_j a_j L^j e(alpha, lambda_i, .)|`, evaluated through the term
    /// recurrence, normalized by the solution magnitude.
    pub fn residual(&self, cfg: &CentralConfig<F>, points: &[F]) -> Result<F> {
        let mut worst = F::zero();
        for root in &self.roots {
            for &z in points {
                let mut acc = Complex::new(F::zero(), F::zero());
                let mut scale = F::zero();
                let mut lam_j = Complex::new(F::one(), F::zero());
                for (j, &aj) in self.coeffs.iter().enumerate() {
                    if j > 0 {
                        lam_j *= root.lambda;
                    }
                    // L^j e = lambda^j e term by term
                    let (e, _, _) = frac_exp_complex(cfg, root.lambda, z)?;
                    acc += Complex::new(aj, F::zero()) * lam_j * e;
                    scale = scale.max((Complex::new(aj, F::zero()) * lam_j * e).norm());
                }
                worst = worst.max(acc.norm() / scale.max(F::one()));
            }
        }
        Ok(worst)
    }
}

/// Finds the characteristic roots of `a_n L^n + ... + a_1 L + a_0` and
/// returns the associated basis of fractional exponentials.
pub fn solve_seq_fde<F: Real>(cfg: &CentralConfig<F>, coeffs: &[F]) -> Result<FdeSolution<F>> {
    if coeffs.len() < 2 {
        return Err(Error::Degenerate("need a polynomial of degree >= 1".into()));
    }
    let lead = *coeffs.last().expect("nonempty");
    if lead == F::zero() || !lead.is_finite() {
        return Err(Error::Degenerate("leading coefficient must be nonzero".into()));
    }
    let alpha = cfg.order.alpha();
    if alpha > F::one() + fl(1e-12) {
        return Err(Error::Order(format!("sequential orders need 0 < alpha <= 1, got {}", alpha)));
    }
    let roots = poly_roots(coeffs)?;
    let scale = roots.iter().fold(F::one(), |m, r| m.max(r.norm()));
    let mut repeated = false;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if (roots[i] - roots[j]).norm() < fl::<F>(1e-8) * scale {
                repeated = true;
            }
        }
    }
    Ok(FdeSolution {
        coeffs: coeffs.to_vec(),
        roots: roots.into_iter().map(|lambda| FdeRoot { lambda }).collect(),
        repeated_roots: repeated,
    })
}

/// Roots of a real polynomial `a_0 + a_1 x + ... + a_n x^n`.
///
/// Degrees one and two use the closed forms (so purely imaginary pairs come
/// out exact); higher degrees run a Durand-Kerner iteration.
pub(crate) fn poly_roots<F: Real>(coeffs: &[F]) -> Result<Vec<Complex<F>>> {
    let n = coeffs.len() - 1;
    let zero = F::zero();
    match n {
        1 => Ok(vec![Complex::new(-coeffs[0] / coeffs[1], zero)]),
        2 => {
            let (a, b, c) = (coeffs[2], coeffs[1], coeffs[0]);
            let two = fl::<F>(2.0);
            let disc = b * b - fl::<F>(4.0) * a * c;
            if disc >= zero {
                let r = disc.sqrt();
                Ok(vec![
                    Complex::new((-b + r) / (two * a), zero),
                    Complex::new((-b - r) / (two * a), zero),
                ])
            } else {
                let r = (-disc).sqrt() / (two * a);
                let re = -b / (two * a);
                Ok(vec![Complex::new(re, r.abs()), Complex::new(re, -r.abs())])
            }
        }
        _ => durand_kerner(coeffs),
    }
}

fn durand_kerner<F: Real>(coeffs: &[F]) -> Result<Vec<Complex<F>>> {
    let n = coeffs.len() - 1;
    let lead = *coeffs.last().expect("nonempty");
    let monic: Vec<Complex<F>> = coeffs.iter().map(|&c| Complex::new(c / lead, F::zero())).collect();
    let eval = |z: Complex<F>| {
        let mut acc = Complex::new(F::zero(), F::zero());
        for &c in monic.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    // standard staggered start inside the unit-ish disc
    let seed = Complex::new(fl::<F>(0.4), fl::<F>(0.9));
    let mut roots: Vec<Complex<F>> = (0..n)
        .map(|i| {
            let mut p = Complex::new(F::one(), F::zero());
            for _ in 0..i {
                p *= seed;
            }
            p * seed
        })
        .collect();
    let tol = fl::<F>(1e-15);
    for _ in 0..500 {
        let mut moved = F::zero();
        for i in 0..n {
            let mut denom = Complex::new(F::one(), F::zero());
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == F::zero() {
                continue;
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < tol {
            break;
        }
    }
    // Newton polish
    let deriv = |z: Complex<F>| {
        let mut acc = Complex::new(F::zero(), F::zero());
        for (k, &c) in monic.iter().enumerate().skip(1) {
            let kf = Complex::new(fl::<F>(k as f64), F::zero());
            let mut p = Complex::new(F::one(), F::zero());
            for _ in 0..k - 1 {
                p *= z;
            }
            acc += kf * c * p;
        }
        acc
    };
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let d = deriv(*r);
            if d.norm() > F::zero() {
                *r = *r - eval(*r) / d;
            }
        }
    }
    Ok(roots)
}
