//! Backward (nabla) fractional calculus on a lattice.
//!
//! Conventions shared by every operator here:
//!
//! - A fractional sum anchored at `a` is zero at and below `a` (empty-sum
//!   convention); its output grid starts at the anchor.
//! - Compose-form differences zero-extend their inner fractional sum before
//!   applying nested differences, so their output starts at the anchor too,
//!   with the anchor value itself 0.
//! - Operators that must difference the raw input (Caputo, the Abel
//!   initial-data form, Taylor expansions) move their anchor up to
//!   `base + m - 1` so every coefficient is computable from the given grid.

use crate::grid::{FracOrder, GridFunction, OperatorConfig};
use crate::lattice::{LatticeFamily, LatticeSpec};
use crate::{fl, Error, Real, Result};

/// Single backward difference quotient against `x_shift`.
fn nabla_single<F: Real>(lat: &LatticeSpec<F>, shift: F, f: &GridFunction<F>) -> Result<GridFunction<F>> {
    if f.count() < 2 {
        return Err(Error::Size { needed: 1, got: f.count() });
    }
    let v = f.values();
    let mut out = Vec::with_capacity(f.count() - 1);
    for i in 1..f.count() {
        let z = f.point(i);
        out.push((v[i] - v[i - 1]) / lat.nabla_x(shift, z));
    }
    GridFunction::new(f.base() + F::one(), out)
}

/// k-fold nested difference; innermost shift is `gamma + k - 1`, outermost
/// `gamma`. Output base moves up by `k`.
pub fn nabla_diff_k<F: Real>(cfg: &OperatorConfig<F>, k: usize, f: &GridFunction<F>) -> Result<GridFunction<F>> {
    nabla_diff_k_at(&cfg.lattice, cfg.gamma, k, f)
}

pub(crate) fn nabla_diff_k_at<F: Real>(
    lat: &LatticeSpec<F>,
    gamma: F,
    k: usize,
    f: &GridFunction<F>,
) -> Result<GridFunction<F>> {
    if f.count() <= k {
        return Err(Error::Size { needed: k, got: f.count() });
    }
    let mut cur = f.clone();
    for j in (0..k).rev() {
        cur = nabla_single(lat, gamma + fl(j as f64), &cur)?;
    }
    Ok(cur)
}

/// Fractional sum anchored at `a`, fed with samples at `a+1 .. a+vals.len()`.
/// Returns values at `a .. a+vals.len()` with 0 at the anchor.
pub(crate) fn frac_sum_anchored<F: Real>(
    lat: &LatticeSpec<F>,
    gamma: F,
    alpha: F,
    a: F,
    vals: &[F],
) -> Result<Vec<F>> {
    let nu = gamma + alpha - F::one();
    let inv_g = lat.modified_gamma_ratio(F::one(), alpha)?.value();
    let mut out = Vec::with_capacity(vals.len() + 1);
    out.push(F::zero());
    for j in 1..=vals.len() {
        let z = a + fl(j as f64);
        let mut acc = F::zero();
        for (i, &fv) in vals[..j].iter().enumerate() {
            let t = a + fl((i + 1) as f64);
            let w = lat.gen_power(nu, z, t - F::one(), alpha - F::one())?;
            acc += w * fv * lat.nabla_x(gamma, t);
        }
        out.push(acc * inv_g);
    }
    Ok(out)
}

/// Fractional sum of order `cfg.order.alpha` with shift `cfg.gamma`.
///
/// The input base is the anchor: the sum runs over `base+1 ..= z`, the value
/// at the base itself is 0 and the sample there is never read.
pub fn frac_sum<F: Real>(cfg: &OperatorConfig<F>, f: &GridFunction<F>) -> Result<GridFunction<F>> {
    frac_sum_order(&cfg.lattice, cfg.gamma, cfg.order.alpha(), f)
}

pub(crate) fn frac_sum_order<F: Real>(
    lat: &LatticeSpec<F>,
    gamma: F,
    alpha: F,
    f: &GridFunction<F>,
) -> Result<GridFunction<F>> {
    let vals = frac_sum_anchored(lat, gamma, alpha, f.base(), &f.values()[1..])?;
    GridFunction::new(f.base(), vals)
}

/// Riemann-Liouville difference as nested differences of a fractional sum.
///
/// For integral alpha this is exactly `nabla_diff_k` (output base moves up by
/// `m`); otherwise the inner sum is zero-extended and the output covers the
/// full input grid with 0 at the anchor.
pub fn rl_diff_compose<F: Real>(cfg: &OperatorConfig<F>, f: &GridFunction<F>) -> Result<GridFunction<F>> {
    rl_compose_order(&cfg.lattice, cfg.gamma, cfg.order, f)
}

pub(crate) fn rl_compose_order<F: Real>(
    lat: &LatticeSpec<F>,
    gamma: F,
    order: FracOrder<F>,
    f: &GridFunction<F>,
) -> Result<GridFunction<F>> {
    if f.count() < 2 {
        return Err(Error::Size { needed: 1, got: f.count() });
    }
    let m = order.m();
    if order.is_integer() {
        return nabla_diff_k_at(lat, gamma, m, f);
    }
    let alpha = order.alpha();
    let mf = fl::<F>(m as f64);
    let u = frac_sum_order(lat, gamma + alpha, mf - alpha, f)?;
    nabla_diff_k_at(lat, gamma, m, &u.with_zero_prefix(m))
}

/// Riemann-Liouville difference as a direct kernel sum with exponent
/// `-alpha - 1`; rejects integral orders, whose kernel normalization has a
/// pole.
pub fn rl_diff_direct<F: Real>(cfg: &OperatorConfig<F>, f: &GridFunction<F>) -> Result<GridFunction<F>> {
    let order = cfg.order;
    if order.is_integer() {
        return Err(Error::IntegerOrder { alpha: order.alpha().to_f64().unwrap_or(f64::NAN) });
    }
    let (lat, gamma, alpha) = (&cfg.lattice, cfg.gamma, order.alpha());
    let a = f.base();
    let nu = gamma - F::one();
    let inv_g = lat.modified_gamma_ratio(F::one(), -alpha)?.value();
    let mut out = Vec::with_capacity(f.count());
    out.push(F::zero());
    for j in 1..f.count() {
        let z = f.point(j);
        let mut acc = F::zero();
        for i in 1..=j {
            let t = f.point(i);
            let w = lat.gen_power(nu, z, t - F::one(), -alpha - F::one())?;
            acc += w * f.values()[i] * lat.nabla_x(gamma + alpha, t);
        }
        out.push(acc * inv_g);
    }
    GridFunction::new(a, out)
}

/// Riemann-Liouville difference as the residue-evaluated finite sum.
///
/// Quadratic family:
/// `c1^{-(a+1)} sum_k f(z-k) dx_{g+a}(z-k) (-a)_k/k! G(B)/G(B+a+1)` with
/// `B = 2z - k + g - 1 + c`; the q-quadratic version replaces plain gammas
/// and Pochhammer symbols by their modified-q counterparts, flips the sign
/// of `c` in the gamma slots, and carries the constant
/// `[c1(1-q)^2]^{-(a+1)} q^{(a+1)(1 - c/2)}`. Both reduce to the plain
/// kernel sum; the equality is exercised numerically by the verification
/// suite. Linear families are rejected (the binomial oracle covers them).
pub fn rl_diff_residue<F: Real>(cfg: &OperatorConfig<F>, f: &GridFunction<F>) -> Result<GridFunction<F>> {
    let lat = &cfg.lattice;
    let (gamma, alpha) = (cfg.gamma, cfg.order.alpha());
    let one = F::one();
    let (scale, c_slot) = match lat.family() {
        LatticeFamily::Quadratic => {
            let (c1, _, _) = lat.coefficients();
            (c1.powf(-(alpha + one)), lat.c())
        }
        LatticeFamily::QQuadratic => {
            let (c1, _, _) = lat.coefficients();
            let q = lat.q();
            let c = lat.c();
            let pre = (c1 * (one - q) * (one - q)).powf(-(alpha + one))
                * q.powf((alpha + one) * (one - c / fl(2.0)));
            (pre, -c)
        }
        fam => return Err(Error::Family(fam.name().into())),
    };
    let a = f.base();
    let mut out = Vec::with_capacity(f.count());
    out.push(F::zero());
    for j in 1..f.count() {
        let z = f.point(j);
        let mut acc = F::zero();
        let mut poch = F::one();
        let mut fact = F::one();
        for k in 0..j {
            if k > 0 {
                poch *= lat.bracket(-alpha + fl((k - 1) as f64));
                fact *= lat.bracket(fl(k as f64));
            }
            let kf = fl::<F>(k as f64);
            let b = z + z - kf + gamma - one + c_slot;
            let d = b + alpha + one;
            let ratio = lat.modified_gamma_ratio(b, d)?.value();
            acc += f.values()[j - k] * lat.nabla_x(gamma + alpha, z - kf) * poch / fact * ratio;
        }
        out.push(acc * scale);
    }
    GridFunction::new(a, out)
}

/// n-th order difference at shift 1 written as a truncated residue sum; the
/// Pochhammer factor cuts the sum at `k = n`.
pub fn nikiforov_diff<F: Real>(lat: &LatticeSpec<F>, n: usize, f: &GridFunction<F>) -> Result<GridFunction<F>> {
    let cfg = OperatorConfig::new(*lat, F::one(), fl(n as f64))?;
    rl_diff_residue(&cfg, f)
}

/// Caputo difference: `m` nested differences at shift `gamma + alpha - m`,
/// then a fractional sum of order `m - alpha` at the same shift. The output
/// anchor is `base + m - 1`.
pub fn caputo_diff<F: Real>(cfg: &OperatorConfig<F>, f: &GridFunction<F>) -> Result<GridFunction<F>> {
    let order = cfg.order;
    let m = order.m();
    if f.count() <= m {
        return Err(Error::Size { needed: m, got: f.count() });
    }
    let (lat, gamma, alpha) = (&cfg.lattice, cfg.gamma, order.alpha());
    let mf = fl::<F>(m as f64);
    let shift = gamma + alpha - mf;
    let u = nabla_diff_k_at(lat, shift, m, f)?;
    if order.is_integer() {
        return Ok(u);
    }
    let a = u.base() - F::one();
    let vals = frac_sum_anchored(lat, shift, mf - alpha, a, u.values())?;
    GridFunction::new(a, vals)
}

/// Which closed form the Abel solver evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbelVariant {
    /// Nested differences of a fractional sum.
    Compose,
    /// Caputo term plus initial-data correction terms.
    InitialData,
}

/// Solves `frac_sum(cfg, g) = f` for `g` on `{a+1 ..}` with `a = base + m - 1`.
///
/// The returned grid starts at the anchor `a` (value 0 there) so that
/// `frac_sum(cfg, g)` reproduces `f` on `{a+1 ..}` directly.
pub fn abel_solve<F: Real>(
    cfg: &OperatorConfig<F>,
    f: &GridFunction<F>,
    variant: AbelVariant,
) -> Result<GridFunction<F>> {
    let order = cfg.order;
    let m = order.m();
    if f.count() < m + 2 {
        return Err(Error::Size { needed: m + 1, got: f.count() });
    }
    let (lat, gamma, alpha) = (&cfg.lattice, cfg.gamma, order.alpha());
    let mf = fl::<F>(m as f64);
    let a = f.base() + mf - F::one();
    // the equation only constrains f on {a+1 ..}; samples at and below the
    // anchor are not data, so integral orders difference the zero-extension
    let padded = || -> Result<GridFunction<F>> {
        let mut vals = vec![F::zero(); m];
        vals.extend_from_slice(&f.values()[m..]);
        GridFunction::new(a - fl(m as f64) + F::one(), vals)
    };
    let integer_solution = || -> Result<GridFunction<F>> {
        let d = nabla_diff_k_at(lat, gamma, m, &padded()?)?;
        let mut vals = vec![F::zero()];
        vals.extend_from_slice(d.values());
        GridFunction::new(a, vals)
    };
    match variant {
        AbelVariant::Compose => {
            if order.is_integer() {
                return integer_solution();
            }
            let u_vals = frac_sum_anchored(lat, gamma + alpha, mf - alpha, a, &f.values()[m..])?;
            let u = GridFunction::new(a, u_vals)?.with_zero_prefix(m);
            nabla_diff_k_at(lat, gamma, m, &u)
        }
        AbelVariant::InitialData => {
            if order.is_integer() {
                // all correction coefficients carry a vanishing reciprocal
                // gamma, so only the zero-extended difference term survives
                return integer_solution();
            }
            let cap = caputo_diff(cfg, f)?;
            let mut out = cap.values().to_vec();
            for k in 0..m {
                let kf = fl::<F>(k as f64);
                // a pole of the normalizing gamma wipes the whole term
                let inv_g = lat.modified_gamma_recip(-alpha + kf + F::one())?;
                if inv_g == F::zero() {
                    continue;
                }
                let dk = nabla_diff_k_at(lat, gamma + alpha - kf, k, f)?;
                let coef = dk
                    .value_at(a)
                    .ok_or_else(|| Error::InvalidGrid("anchor not on difference grid".into()))?;
                for (j, slot) in out.iter_mut().enumerate().skip(1) {
                    let z = a + fl(j as f64);
                    *slot += coef * inv_g * lat.gen_power(gamma - F::one(), z, a, -alpha + kf)?;
                }
            }
            GridFunction::new(a, out)
        }
    }
}

/// Discrete Taylor expansion of integer depth `k` around `a = base + k - 1`.
///
/// Returns the polynomial part (generalized-power terms weighted by nested
/// differences at the anchor) and the remainder (k-th sum of the k-th
/// difference); their pointwise sum reproduces `f` on the output grid.
pub fn taylor_expand_integer<F: Real>(
    cfg: &OperatorConfig<F>,
    k: usize,
    f: &GridFunction<F>,
) -> Result<(GridFunction<F>, GridFunction<F>)> {
    if k == 0 || f.count() <= k {
        return Err(Error::Size { needed: k, got: f.count() });
    }
    let (lat, gamma) = (&cfg.lattice, cfg.gamma);
    let kf = fl::<F>(k as f64);
    let a = f.base() + kf - F::one();
    let u = nabla_diff_k_at(lat, gamma, k, f)?;
    let rem = GridFunction::new(a, frac_sum_anchored(lat, gamma, kf, a, u.values())?)?;

    let mut coefs = Vec::with_capacity(k);
    for j in 0..k {
        let dj = nabla_diff_k_at(lat, gamma + kf - fl(j as f64), j, f)?;
        coefs.push(dj.value_at(a).expect("anchor lies on every difference grid"));
    }
    let nu = gamma + kf - F::one();
    let mut poly = Vec::with_capacity(rem.count());
    for idx in 0..rem.count() {
        let z = a + fl(idx as f64);
        let mut acc = F::zero();
        let mut fact = F::one();
        for (j, &cj) in coefs.iter().enumerate() {
            if j > 0 {
                fact *= lat.bracket(fl(j as f64));
            }
            acc += cj / fact * lat.gen_power(nu, z, a, fl(j as f64))?;
        }
        poly.push(acc);
    }
    Ok((GridFunction::new(a, poly)?, rem))
}

/// Which fractional Taylor identity to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaylorKind {
    Rl,
    Caputo,
}

/// Pointwise defect `LHS - RHS` of the fractional Taylor identity.
///
/// For the Riemann-Liouville kind the correction terms carry fractional
/// operators evaluated at the anchor, which vanish identically under the
/// empty-sum convention, so the right-hand side is `f` itself. The Caputo
/// kind subtracts integer-difference correction terms at the anchor
/// `base + m - 1`.
pub fn frac_taylor_defect<F: Real>(
    cfg: &OperatorConfig<F>,
    f: &GridFunction<F>,
    kind: TaylorKind,
) -> Result<GridFunction<F>> {
    let (lat, gamma, order) = (&cfg.lattice, cfg.gamma, cfg.order);
    let alpha = order.alpha();
    let m = order.m();
    match kind {
        TaylorKind::Rl => {
            let w = rl_compose_order(lat, gamma, order, f)?;
            if order.is_integer() {
                return Err(Error::InvalidOrder(
                    "integer order reduces to the integer Taylor expansion".into(),
                ));
            }
            let s = frac_sum_order(lat, gamma, alpha, &w)?;
            let mut out = Vec::with_capacity(s.count() - 1);
            for j in 1..s.count() {
                let z = s.point(j);
                let fv = f.value_at(z).ok_or_else(|| Error::InvalidGrid("grid mismatch".into()))?;
                out.push(s.values()[j] - fv);
            }
            GridFunction::new(s.base() + F::one(), out)
        }
        TaylorKind::Caputo => {
            let w = caputo_diff(cfg, f)?;
            let a = w.base();
            let s = GridFunction::new(a, frac_sum_anchored(lat, gamma, alpha, a, &w.values()[1..])?)?;
            let mf = fl::<F>(m as f64);
            let shift = gamma + alpha - mf;
            let mut coefs = Vec::with_capacity(m);
            for j in 0..m {
                let dj = nabla_diff_k_at(lat, shift + mf - fl(j as f64), j, f)?;
                coefs.push(dj.value_at(a).expect("anchor lies on every difference grid"));
            }
            let nu = shift + mf - F::one();
            let mut out = Vec::with_capacity(s.count() - 1);
            for idx in 1..s.count() {
                let z = a + fl(idx as f64);
                let mut corr = F::zero();
                let mut fact = F::one();
                for (j, &cj) in coefs.iter().enumerate() {
                    if j > 0 {
                        fact *= lat.bracket(fl(j as f64));
                    }
                    corr += cj / fact * lat.gen_power(nu, z, a, fl(j as f64))?;
                }
                let fv = f.value_at(z).ok_or_else(|| Error::InvalidGrid("grid mismatch".into()))?;
                out.push(s.values()[idx] - (fv - corr));
            }
            GridFunction::new(a + F::one(), out)
        }
    }
}

/// Uniform-lattice fractional sum with rising-factorial binomial weights,
/// summed from the base point itself. Serves as the independent oracle for
/// `frac_sum` on the linear family (after a one-step index shift).
pub fn uniform_binomial_sum<F: Real>(alpha: F, f: &GridFunction<F>) -> GridFunction<F> {
    let n = f.count();
    let mut w = Vec::with_capacity(n);
    w.push(F::one());
    for j in 1..n {
        let jf = fl::<F>(j as f64);
        let prev = w[j - 1];
        w.push(prev * (alpha + jf - F::one()) / jf);
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = F::zero();
        for k in 0..=i {
            acc += w[i - k] * f.values()[k];
        }
        out.push(acc);
    }
    GridFunction::new(f.base(), out).expect("weights and samples are finite")
}

/// Binomial weight `[alpha; n] = alpha (alpha+1) ... (alpha+n-1) / n!`.
pub fn binomial_weight<F: Real>(alpha: F, n: usize) -> F {
    let mut w = F::one();
    for j in 1..=n {
        let jf = fl::<F>(j as f64);
        w = w * (alpha + jf - F::one()) / jf;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> LatticeSpec<f64> {
        LatticeSpec::quadratic(1.0, 0.0, 0.0).unwrap()
    }

    fn gen_quad() -> LatticeSpec<f64> {
        LatticeSpec::quadratic(0.9, 0.5, -0.2).unwrap()
    }

    fn qquad() -> LatticeSpec<f64> {
        LatticeSpec::q_quadratic(0.6, 0.8, 1.7, 0.4).unwrap()
    }

    fn cfg(lat: LatticeSpec<f64>, gamma: f64, alpha: f64) -> OperatorConfig<f64> {
        OperatorConfig::new(lat, gamma, alpha).unwrap()
    }

    /// Deterministic pseudo-random samples in [-1, 1].
    fn noise(base: f64, n: usize, seed: u64) -> GridFunction<f64> {
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
        GridFunction::sample(base, n, |_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 2_000_003) as f64 / 1_000_001.5 - 1.0
        })
        .unwrap()
    }

    fn max_rel(a: &[f64], b: &[f64]) -> f64 {
        assert_eq!(a.len(), b.len());
        let d = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0f64, f64::max);
        let s = a
            .iter()
            .chain(b)
            .map(|v| v.abs())
            .fold(1e-300f64, f64::max);
        d / s
    }

    #[test]
    fn nabla_diff_trivial() {
        let c = cfg(quad(), 0.0, 1.0);
        let f = GridFunction::sample(0.0, 4, |s| s * s).unwrap();
        // k = 0 returns f unchanged
        let d0 = nabla_diff_k(&c, 0, &f).unwrap();
        assert_eq!(d0.values(), f.values());
        // f = x on this lattice, so the quotient is identically 1
        let d1 = nabla_diff_k(&c, 1, &f).unwrap();
        assert_eq!(d1.base(), 1.0);
        for v in d1.values() {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn nabla_diff_compositional() {
        let lat = gen_quad();
        let f = noise(0.37, 9, 5);
        let two = nabla_diff_k(&cfg(lat, 0.3, 1.0), 2, &f).unwrap();
        let inner = nabla_diff_k_at(&lat, 0.3 + 1.0, 1, &f).unwrap();
        let outer = nabla_diff_k_at(&lat, 0.3, 1, &inner).unwrap();
        assert!(max_rel(two.values(), outer.values()) < 1e-14);
    }

    #[test]
    fn frac_sum_alpha_one_is_running_sum() {
        let lat = gen_quad();
        let c = cfg(lat, 0.3, 1.0);
        let f = noise(0.37, 8, 11);
        let s = frac_sum(&c, &f).unwrap();
        let mut acc = 0.0;
        for j in 1..f.count() {
            acc += f.values()[j] * lat.nabla_x(0.3, f.point(j));
            assert!((s.values()[j] - acc).abs() < 1e-13);
        }
        assert_eq!(s.values()[0], 0.0);
    }

    #[test]
    fn frac_sum_of_one_closed_form() {
        for lat in [gen_quad(), qquad()] {
            let a0 = if lat.family() == LatticeFamily::QQuadratic { lat.c() / 2.0 + 0.41 } else { 0.37 };
            let (gamma, alpha) = (0.3, 0.9);
            let c = cfg(lat, gamma, alpha);
            let ones = GridFunction::sample(a0, 9, |_| 1.0).unwrap();
            let s = frac_sum(&c, &ones).unwrap();
            let nu = gamma + alpha - 1.0;
            for j in 1..s.count() {
                let z = s.point(j);
                let want = lat.gen_power(nu, z, a0, alpha).unwrap()
                    / lat.modified_gamma(alpha + 1.0).unwrap();
                assert!((s.values()[j] - want).abs() / want.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn semigroup_property() {
        for lat in [gen_quad(), qquad()] {
            let a0 = if lat.family() == LatticeFamily::QQuadratic { lat.c() / 2.0 + 0.41 } else { 0.37 };
            let f = noise(a0, 10, 17);
            let (gamma, al, be) = (0.3, 0.7, 1.2);
            let inner = frac_sum(&cfg(lat, gamma, al), &f).unwrap();
            let lhs = frac_sum(&cfg(lat, gamma + al, be), &inner).unwrap();
            let rhs = frac_sum(&cfg(lat, gamma, al + be), &f).unwrap();
            assert!(max_rel(lhs.values(), rhs.values()) < 1e-11);
        }
    }

    #[test]
    fn rl_forms_agree_and_left_inverse() {
        for lat in [gen_quad(), qquad()] {
            let a0 = if lat.family() == LatticeFamily::QQuadratic { lat.c() / 2.0 + 0.41 } else { 0.37 };
            let f = noise(a0, 10, 23);
            for alpha in [0.7, 1.5, 2.4] {
                let c = cfg(lat, 0.3, alpha);
                let comp = rl_diff_compose(&c, &f).unwrap();
                let dir = rl_diff_direct(&c, &f).unwrap();
                let res = rl_diff_residue(&c, &f).unwrap();
                assert!(max_rel(&comp.values()[1..], &dir.values()[1..]) < 1e-10);
                assert!(max_rel(&dir.values()[1..], &res.values()[1..]) < 1e-10);
                // left inverse on the sum
                let g = frac_sum(&c, &f).unwrap();
                let back = rl_diff_compose(&c, &g).unwrap();
                assert!(max_rel(&back.values()[1..], &f.values()[1..]) < 1e-10);
            }
        }
    }

    #[test]
    fn rl_direct_rejects_integer_order() {
        let c = cfg(gen_quad(), 0.3, 2.0);
        let f = noise(0.37, 6, 3);
        assert!(matches!(rl_diff_direct(&c, &f), Err(Error::IntegerOrder { .. })));
    }

    #[test]
    fn rl_direct_single_point() {
        let lat = gen_quad();
        let (gamma, alpha) = (0.3, 0.7);
        let c = cfg(lat, gamma, alpha);
        let f = noise(0.37, 4, 29);
        let d = rl_diff_direct(&c, &f).unwrap();
        let a = f.base();
        let want = f.values()[1] * lat.nabla_x(gamma + alpha, a + 1.0)
            * lat.gen_power(gamma - 1.0, a + 1.0, a, -alpha - 1.0).unwrap()
            / lat.modified_gamma(-alpha).unwrap();
        assert!((d.values()[1] - want).abs() / want.abs() < 1e-13);
    }

    #[test]
    fn residue_integer_reduction() {
        for lat in [gen_quad(), qquad()] {
            let a0 = if lat.family() == LatticeFamily::QQuadratic { lat.c() / 2.0 + 0.41 } else { 0.37 };
            let f = noise(a0, 11, 31);
            for n in 1..=3usize {
                let c = cfg(lat, 0.3, n as f64);
                let res = rl_diff_residue(&c, &f).unwrap();
                let nested = nabla_diff_k(&c, n, &f).unwrap();
                // the residue sum cannot reach below the anchor, so the
                // common honest grid starts one step after the nested one
                let lhs = &res.values()[n + 1..];
                let rhs = &nested.values()[1..];
                assert!(max_rel(lhs, rhs) < 1e-11, "family {:?} n={}", lat.family(), n);
            }
        }
    }

    #[test]
    fn residue_rejects_linear_family() {
        let lat = LatticeSpec::linear(1.0, 0.0).unwrap();
        let c = cfg(lat, 0.0, 0.5);
        let f = noise(0.0, 5, 37);
        assert!(matches!(rl_diff_residue(&c, &f), Err(Error::Family(_))));
    }

    #[test]
    fn caputo_kills_constants() {
        for alpha in [0.7, 1.6, 3.0] {
            let c = cfg(gen_quad(), 0.3, alpha);
            let f = GridFunction::sample(0.37, 9, |_| 3.25).unwrap();
            let g = caputo_diff(&c, &f).unwrap();
            for v in g.values() {
                assert!(v.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn caputo_inverse_with_zero_extension() {
        for lat in [gen_quad(), qquad()] {
            let a0 = if lat.family() == LatticeFamily::QQuadratic { lat.c() / 2.0 + 0.41 } else { 0.37 };
            let f = noise(a0, 10, 41);
            for alpha in [0.8, 1.6] {
                let c = cfg(lat, 0.3, alpha);
                let m = c.order.m();
                let g = frac_sum(&c, &f).unwrap().with_zero_prefix(m - 1);
                let back = caputo_diff(&c, &g).unwrap();
                assert!((back.base() - a0).abs() < 1e-12);
                assert!(max_rel(&back.values()[1..], &f.values()[1..]) < 1e-10);
            }
        }
    }

    #[test]
    fn abel_round_trip_and_variant_agreement() {
        for lat in [gen_quad(), qquad()] {
            let a0 = if lat.family() == LatticeFamily::QQuadratic { lat.c() / 2.0 + 0.41 } else { 0.37 };
            let f = noise(a0, 15, 43);
            for alpha in [0.5, 1.0, 1.5] {
                let c = cfg(lat, 0.3, alpha);
                let g1 = abel_solve(&c, &f, AbelVariant::Compose).unwrap();
                let g2 = abel_solve(&c, &f, AbelVariant::InitialData).unwrap();
                assert!(max_rel(&g1.values()[1..], &g2.values()[1..]) < 1e-9);
                for g in [&g1, &g2] {
                    let chk = frac_sum(&c, g).unwrap();
                    let want: Vec<f64> = (1..chk.count())
                        .map(|j| f.value_at(chk.point(j)).unwrap())
                        .collect();
                    assert!(max_rel(&chk.values()[1..], &want) < 1e-9);
                }
            }
        }
    }

    #[test]
    fn abel_alpha_one_is_difference_quotient() {
        let lat = gen_quad();
        let c = cfg(lat, 0.3, 1.0);
        let f = noise(0.37, 8, 47);
        let g = abel_solve(&c, &f, AbelVariant::Compose).unwrap();
        let d = nabla_diff_k(&c, 1, &f).unwrap();
        // the equation's data starts at a+1, so the first solution value
        // differences against zero rather than f(a)
        let first = f.values()[1] / lat.nabla_x(0.3, f.point(1));
        assert!((g.values()[1] - first).abs() < 1e-14);
        assert!(max_rel(&g.values()[2..], &d.values()[1..]) < 1e-14);
    }

    #[test]
    fn taylor_integer_reconstructs() {
        for lat in [gen_quad(), qquad()] {
            let a0 = if lat.family() == LatticeFamily::QQuadratic { lat.c() / 2.0 + 0.41 } else { 0.37 };
            let f = noise(a0, 11, 53);
            for k in 1..=4usize {
                let c = cfg(lat, 0.3, 1.0);
                let (poly, rem) = taylor_expand_integer(&c, k, &f).unwrap();
                for i in 0..poly.count() {
                    let z = poly.point(i);
                    let want = f.value_at(z).unwrap();
                    let got = poly.values()[i] + rem.values()[i];
                    assert!((got - want).abs() < 1e-9 * f.max_norm().max(1.0), "k={} i={}", k, i);
                }
            }
        }
    }

    #[test]
    fn taylor_k1_remainder_is_f_minus_fa() {
        let lat = gen_quad();
        let c = cfg(lat, 0.3, 1.0);
        let f = noise(0.37, 7, 59);
        let (_, rem) = taylor_expand_integer(&c, 1, &f).unwrap();
        for j in 1..rem.count() {
            let want = f.values()[j] - f.values()[0];
            assert!((rem.values()[j] - want).abs() < 1e-13);
        }
    }

    #[test]
    fn taylor_annihilates_low_degree_powers() {
        // a single generalized power of degree j < k has zero remainder
        let lat = gen_quad();
        let (gamma, k) = (0.3, 3usize);
        let a = 0.37 + (k as f64) - 1.0;
        let nu = gamma + k as f64 - 1.0;
        for j in 0..k {
            let f = GridFunction::sample(0.37, 10, |z| lat.gen_power(nu, z, a, j as f64).unwrap())
                .unwrap();
            let c = cfg(lat, gamma, 1.0);
            let (_, rem) = taylor_expand_integer(&c, k, &f).unwrap();
            for v in rem.values() {
                assert!(v.abs() < 1e-9, "j={} rem={}", j, v);
            }
        }
    }

    #[test]
    fn frac_taylor_defects_vanish() {
        for lat in [gen_quad(), qquad()] {
            let a0 = if lat.family() == LatticeFamily::QQuadratic { lat.c() / 2.0 + 0.41 } else { 0.37 };
            let f = noise(a0, 12, 61);
            for alpha in [0.5, 1.5, 2.3] {
                for kind in [TaylorKind::Rl, TaylorKind::Caputo] {
                    let c = cfg(lat, 0.3, alpha);
                    let d = frac_taylor_defect(&c, &f, kind).unwrap();
                    let bound = 1e-9 * f.max_norm();
                    for v in d.values() {
                        assert!(v.abs() < bound, "{:?} alpha={} defect={}", kind, alpha, v);
                    }
                }
            }
        }
    }

    #[test]
    fn mixed_composition_both_signs() {
        for lat in [gen_quad(), qquad()] {
            let a0 = if lat.family() == LatticeFamily::QQuadratic { lat.c() / 2.0 + 0.41 } else { 0.37 };
            let f = noise(a0, 10, 67);
            let gamma = 0.3;
            for (beta, alpha) in [(1.3, 0.4), (0.4, 1.3)] {
                let inner = frac_sum_order(&lat, gamma + beta - alpha, alpha, &f).unwrap();
                let lhs = rl_compose_order(&lat, gamma, FracOrder::new(beta).unwrap(), &inner).unwrap();
                let d: f64 = beta - alpha;
                let rhs = if d > 0.0 {
                    rl_compose_order(&lat, gamma, FracOrder::new(d).unwrap(), &f).unwrap()
                } else {
                    frac_sum_order(&lat, gamma + beta - alpha, -d, &f).unwrap()
                };
                assert!(max_rel(&lhs.values()[1..], &rhs.values()[1..]) < 1e-10);
            }
        }
    }

    #[test]
    fn uniform_binomial_cross_check() {
        // frac_sum on the linear family equals the binomial-weight sum after
        // shifting the base by one
        let lat = LatticeSpec::linear(1.0, 0.0).unwrap();
        let f = noise(0.0, 20, 71);
        for alpha in [0.5, 1.5] {
            let c = cfg(lat, 0.9, alpha); // gamma is irrelevant on a linear lattice
            let s = frac_sum(&c, &f).unwrap();
            let shifted = GridFunction::new(0.0, f.values()[1..].to_vec()).unwrap();
            let b = uniform_binomial_sum(alpha, &shifted);
            // weight-by-weight identity first
            for n in 0..5 {
                let w = binomial_weight(alpha, n);
                let kernel = lat
                    .gen_power(c.gamma + alpha - 1.0, n as f64 + 1.0, 0.0, alpha - 1.0)
                    .unwrap()
                    / lat.modified_gamma(alpha).unwrap();
                assert!((w - kernel).abs() < 1e-12);
            }
            for j in 0..b.count() {
                let want = s.values()[j + 1];
                assert!((b.values()[j] - want).abs() / want.abs().max(1.0) < 1e-11);
            }
        }
        // alpha = 1 reduces to the cumulative sum
        let ones = GridFunction::sample(0.0, 6, |_| 1.0).unwrap();
        let cum = uniform_binomial_sum(1.0, &ones);
        assert_eq!(cum.values(), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(binomial_weight(0.77, 0), 1.0);
    }

    #[test]
    fn sum_by_parts_and_product_rules() {
        let lat = qquad();
        let a0 = lat.c() / 2.0 + 0.41;
        let f = noise(a0, 9, 73);
        let g = noise(a0, 9, 79);
        let gamma = 0.6;
        // product rule, both displayed forms
        for s_idx in 1..f.count() {
            let z = f.point(s_idx);
            let dxg = lat.nabla_x(gamma, z);
            let dv = |h: &GridFunction<f64>| (h.values()[s_idx] - h.values()[s_idx - 1]) / dxg;
            let fg: Vec<f64> = f.values().iter().zip(g.values()).map(|(a, b)| a * b).collect();
            let fg = GridFunction::new(a0, fg).unwrap();
            let lhs = dv(&fg);
            let r1 = f.values()[s_idx - 1] * dv(&g) + g.values()[s_idx] * dv(&f);
            let r2 = g.values()[s_idx - 1] * dv(&f) + f.values()[s_idx] * dv(&g);
            assert!((lhs - r1).abs() < 1e-12 && (lhs - r2).abs() < 1e-12);
        }
        // sum by parts
        let zmax = f.count() - 1;
        let mut lhs = 0.0;
        let mut rhs_sum = 0.0;
        for s_idx in 1..=zmax {
            let z = f.point(s_idx);
            let dxg = lat.nabla_x(gamma, z);
            lhs += g.values()[s_idx] * (f.values()[s_idx] - f.values()[s_idx - 1]);
            rhs_sum += f.values()[s_idx - 1] * (g.values()[s_idx] - g.values()[s_idx - 1]);
            let _ = dxg;
        }
        let rhs = f.values()[zmax] * g.values()[zmax] - f.values()[0] * g.values()[0] - rhs_sum;
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn size_errors() {
        let c = cfg(gen_quad(), 0.0, 2.0);
        let f = noise(0.0, 2, 83);
        assert!(matches!(nabla_diff_k(&c, 3, &f), Err(Error::Size { .. })));
        assert!(matches!(caputo_diff(&c, &f), Err(Error::Size { .. })));
        assert!(matches!(abel_solve(&c, &f, AbelVariant::Compose), Err(Error::Size { .. })));
    }
}
