//! Central (delta) fractional calculus on half-shifted grids.
//!
//! The central difference is `(f(z+1/2) - f(z-1/2)) / (x(z+1/2) - x(z-1/2))`
//! and moves a grid up by half a step; the central fractional sum of order
//! `beta` moves it up by `beta/2`. Compose-form differences zero-extend
//! their inner sum (valid: sums vanish below their base), which makes the
//! inverse and Taylor identities hold on the full grid.

use crate::grid::{FracOrder, GridFunction};
use crate::lattice::LatticeSpec;
use crate::series::SeriesSpec;
use crate::{fl, Error, Real, Result};

/// Lattice, order, series anchor and truncation controls for the central
/// operators. Grid operators take their anchor from the input grid; `a` is
/// the anchor of the series terms (exponential/trigonometric/FDE).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralConfig<F> {
    pub lattice: LatticeSpec<F>,
    pub order: FracOrder<F>,
    pub a: F,
    pub series: SeriesSpec<F>,
}

impl<F: Real> CentralConfig<F> {
    pub fn new(lattice: LatticeSpec<F>, alpha: F, a: F, series: SeriesSpec<F>) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::InvalidOrder(format!("anchor must be finite, got {}", a)));
        }
        series.validate()?;
        Ok(Self { lattice, order: FracOrder::new(alpha)?, a, series })
    }

    pub fn with_alpha(&self, alpha: F) -> Result<Self> {
        Ok(Self { order: FracOrder::new(alpha)?, ..*self })
    }
}

fn delta_single<F: Real>(lat: &LatticeSpec<F>, f: &GridFunction<F>) -> Result<GridFunction<F>> {
    if f.count() < 2 {
        return Err(Error::Size { needed: 1, got: f.count() });
    }
    let half = fl::<F>(0.5);
    let mut out = Vec::with_capacity(f.count() - 1);
    for i in 0..f.count() - 1 {
        let z = f.point(i) + half;
        out.push((f.values()[i + 1] - f.values()[i]) / lat.delta_x(z));
    }
    GridFunction::new(f.base() + half, out)
}

/// k-fold central difference; output base moves up by `k/2`.
pub fn central_diff_k<F: Real>(cfg: &CentralConfig<F>, k: usize, f: &GridFunction<F>) -> Result<GridFunction<F>> {
    central_diff_k_at(&cfg.lattice, k, f)
}

pub(crate) fn central_diff_k_at<F: Real>(
    lat: &LatticeSpec<F>,
    k: usize,
    f: &GridFunction<F>,
) -> Result<GridFunction<F>> {
    if f.count() <= k {
        return Err(Error::Size { needed: k, got: f.count() });
    }
    let mut cur = f.clone();
    for _ in 0..k {
        cur = delta_single(lat, &cur)?;
    }
    Ok(cur)
}

/// Central fractional sum of order `beta > 0`; output base moves up by
/// `beta/2` and the first output point aggregates exactly one term.
pub(crate) fn central_sum_order<F: Real>(
    lat: &LatticeSpec<F>,
    beta: F,
    f: &GridFunction<F>,
) -> Result<GridFunction<F>> {
    if !(beta > F::zero()) {
        return Err(Error::InvalidOrder(format!("sum order must be > 0, got {}", beta)));
    }
    let two = fl::<F>(2.0);
    let b = f.base();
    let nu = beta - two;
    let inv_g = lat.modified_gamma_ratio(F::one(), beta)?.value();
    let mut out = Vec::with_capacity(f.count());
    for j in 0..f.count() {
        let z = b + beta / two + fl(j as f64);
        let mut acc = F::zero();
        for i in 0..=j {
            let t = f.point(i);
            let w = lat.gen_power(nu, z - nu / two, t, beta - F::one())?;
            acc += w * f.values()[i] * lat.delta_x(t);
        }
        out.push(acc * inv_g);
    }
    GridFunction::new(b + beta / two, out)
}

/// Central fractional sum of order `cfg.order.alpha`.
pub fn central_frac_sum<F: Real>(cfg: &CentralConfig<F>, f: &GridFunction<F>) -> Result<GridFunction<F>> {
    central_sum_order(&cfg.lattice, cfg.order.alpha(), f)
}

/// Central fractional sum evaluated at a single point `z`, which must be
/// aligned: `(z - alpha/2) - base` has to be a non-negative integer.
pub fn central_frac_sum_at<F: Real>(cfg: &CentralConfig<F>, f: &GridFunction<F>, z: F) -> Result<F> {
    let alpha = cfg.order.alpha();
    let two = fl::<F>(2.0);
    let d = z - alpha / two - f.base();
    let r = d.round();
    if (d - r).abs() > fl(1e-9) || r < F::zero() {
        return Err(Error::Alignment(format!(
            "point {} is not on the output comb of a sum of order {} anchored at {}",
            z,
            alpha,
            f.base()
        )));
    }
    let s = central_sum_order(&cfg.lattice, alpha, f)?;
    s.value_at(z)
        .ok_or_else(|| Error::Alignment(format!("point {} beyond the available grid", z)))
}

/// Evaluation mode for the central Riemann-Liouville difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CentralMode {
    Compose,
    Direct,
}

/// Central Riemann-Liouville difference of order `alpha`.
///
/// Both modes produce the full grid `{base - alpha/2, ...}` for fractional
/// orders; integral orders reduce to `central_diff_k` in compose mode and
/// are rejected in direct mode.
pub fn central_rl_diff<F: Real>(
    cfg: &CentralConfig<F>,
    f: &GridFunction<F>,
    mode: CentralMode,
) -> Result<GridFunction<F>> {
    central_rl_order(&cfg.lattice, cfg.order, f, mode)
}

pub(crate) fn central_rl_order<F: Real>(
    lat: &LatticeSpec<F>,
    order: FracOrder<F>,
    f: &GridFunction<F>,
    mode: CentralMode,
) -> Result<GridFunction<F>> {
    let alpha = order.alpha();
    let m = order.m();
    match mode {
        CentralMode::Compose => {
            if order.is_integer() {
                return central_diff_k_at(lat, m, f);
            }
            let mf = fl::<F>(m as f64);
            let u = central_sum_order(lat, mf - alpha, f)?;
            central_diff_k_at(lat, m, &u.with_zero_prefix(m))
        }
        CentralMode::Direct => {
            if order.is_integer() {
                return Err(Error::IntegerOrder { alpha: alpha.to_f64().unwrap_or(f64::NAN) });
            }
            let two = fl::<F>(2.0);
            let b = f.base();
            let nu = -alpha - two;
            let inv_g = lat.modified_gamma_ratio(F::one(), -alpha)?.value();
            let mut out = Vec::with_capacity(f.count());
            for j in 0..f.count() {
                let z = b - alpha / two + fl(j as f64);
                let mut acc = F::zero();
                for i in 0..=j {
                    let t = f.point(i);
                    let w = lat.gen_power(nu, z - nu / two, t, -alpha - F::one())?;
                    acc += w * f.values()[i] * lat.delta_x(t);
                }
                out.push(acc * inv_g);
            }
            GridFunction::new(b - alpha / two, out)
        }
    }
}

/// Central Caputo difference: `m` central differences then a central sum of
/// order `m - alpha`. Output base is `base + m - alpha/2`.
pub fn central_caputo<F: Real>(cfg: &CentralConfig<F>, f: &GridFunction<F>) -> Result<GridFunction<F>> {
    central_caputo_order(&cfg.lattice, cfg.order, f)
}

pub(crate) fn central_caputo_order<F: Real>(
    lat: &LatticeSpec<F>,
    order: FracOrder<F>,
    f: &GridFunction<F>,
) -> Result<GridFunction<F>> {
    let m = order.m();
    if f.count() <= m {
        return Err(Error::Size { needed: m, got: f.count() });
    }
    let u = central_diff_k_at(lat, m, f)?;
    if order.is_integer() {
        return Ok(u);
    }
    central_sum_order(lat, fl::<F>(m as f64) - order.alpha(), &u)
}

/// Sequential central difference: the k-fold composition of one
/// Riemann-Liouville central difference of order `alpha`, `0 < alpha <= 1`.
pub fn sequential_diff<F: Real>(cfg: &CentralConfig<F>, k: usize, f: &GridFunction<F>) -> Result<GridFunction<F>> {
    let alpha = cfg.order.alpha();
    if alpha > F::one() + fl(1e-12) {
        return Err(Error::Order(format!("sequential difference needs 0 < alpha <= 1, got {}", alpha)));
    }
    if k == 0 {
        return Err(Error::Order("sequential depth must be >= 1".into()));
    }
    let mut cur = f.clone();
    for _ in 0..k {
        cur = central_rl_order(&cfg.lattice, cfg.order, &cur, CentralMode::Compose)?;
    }
    Ok(cur)
}

/// Which central Taylor-type identity to evaluate as a pointwise defect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CentralTaylorKind<F> {
    /// Integer depth k: k-th sum of the k-th difference against the
    /// generalized-power expansion around `base + k - 1`.
    Integer { k: usize },
    /// Fractional sum of the RL difference; corrections vanish under the
    /// zero-extension convention.
    Rl,
    /// Fractional sum of the Caputo difference against the integer-depth
    /// expansion with `k = m`.
    Caputo,
    /// Sum of order `k alpha` of the k-fold sequential difference.
    Sequential { k: usize },
    /// Sum of order p applied to an RL difference of order q versus the
    /// order-(q-p) operator.
    MixedP5 { p: F, q: F },
    /// RL difference of order p applied to one of order q versus the
    /// order-(p+q) difference.
    MixedP6 { p: F, q: F },
}

/// A correction term of the integer central Taylor expansion.
///
/// Terms are either constants or generalized powers
/// `coef * [x_nu(z - nu/2) - x_nu(anchor)]^(mu)`; taking a central
/// antidifference maps a power to the next-order power minus the constant it
/// spawns at the lower limit, which is exactly how the expansion is built.
#[derive(Debug, Clone, Copy)]
enum CorrTerm<F> {
    Const(F),
    Power { coef: F, nu: F, anchor: F, mu: F },
}

impl<F: Real> CorrTerm<F> {
    fn eval(&self, lat: &LatticeSpec<F>, z: F) -> Result<F> {
        match *self {
            CorrTerm::Const(c) => Ok(c),
            CorrTerm::Power { coef, nu, anchor, mu } => {
                Ok(coef * lat.gen_power(nu, z - nu / fl(2.0), anchor, mu)?)
            }
        }
    }

    /// Central antidifference accumulated from `t0`, i.e. the map
    /// `T(z) -> sum_{t=t0}^{z-1/2} T(t) delta_x(t)`.
    fn antidiff_from(&self, lat: &LatticeSpec<F>, t0: F) -> Result<Vec<CorrTerm<F>>> {
        let half = fl::<F>(0.5);
        match *self {
            CorrTerm::Const(c) => {
                // c * (x(z) - x(t0 - 1/2))
                Ok(vec![CorrTerm::Power { coef: c, nu: F::zero(), anchor: t0 - half, mu: F::one() }])
            }
            CorrTerm::Power { coef, nu, anchor, mu } => {
                let br = lat.bracket(mu + F::one());
                let lifted = CorrTerm::Power { coef: coef / br, nu: nu + F::one(), anchor, mu: mu + F::one() };
                let boundary = lifted.eval(lat, t0 - half)?;
                Ok(vec![lifted, CorrTerm::Const(-boundary)])
            }
        }
    }
}

/// Exact correction terms of `delta^{-k} delta^k f` around `base + k - 1`,
/// built by the same recursion that proves the expansion.
fn central_integer_corrections<F: Real>(
    lat: &LatticeSpec<F>,
    f: &GridFunction<F>,
    k: usize,
) -> Result<Vec<CorrTerm<F>>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    if k == 1 {
        return Ok(vec![CorrTerm::Const(f.values()[0])]);
    }
    let df = delta_single(lat, f)?;
    let inner = central_integer_corrections(lat, &df, k - 1)?;
    let head = f.values()[k - 1];
    let t0 = f.base() + fl((k - 1) as f64) + fl(0.5);
    let mut out = vec![CorrTerm::Const(head)];
    for term in inner {
        out.extend(term.antidiff_from(lat, t0)?);
    }
    Ok(out)
}

/// Pointwise defect `LHS - RHS` of the selected central Taylor identity; an
/// all-zeros result (to rounding) certifies it.
pub fn central_taylor_defect<F: Real>(
    cfg: &CentralConfig<F>,
    f: &GridFunction<F>,
    kind: CentralTaylorKind<F>,
) -> Result<GridFunction<F>> {
    let lat = &cfg.lattice;
    match kind {
        CentralTaylorKind::Integer { k } => {
            if k == 0 || f.count() <= k {
                return Err(Error::Size { needed: k, got: f.count() });
            }
            let r = central_sum_order(lat, fl(k as f64), &central_diff_k_at(lat, k, f)?)?;
            let corr = central_integer_corrections(lat, f, k)?;
            defect_against_corrections(lat, f, &r, &corr)
        }
        CentralTaylorKind::Rl => {
            let r = central_sum_order(
                lat,
                cfg.order.alpha(),
                &central_rl_order(lat, cfg.order, f, CentralMode::Compose)?,
            )?;
            defect_against_corrections(lat, f, &r, &[])
        }
        CentralTaylorKind::Caputo => {
            let m = cfg.order.m();
            let r = central_sum_order(lat, cfg.order.alpha(), &central_caputo_order(lat, cfg.order, f)?)?;
            let corr = central_integer_corrections(lat, f, m)?;
            defect_against_corrections(lat, f, &r, &corr)
        }
        CentralTaylorKind::Sequential { k } => {
            if k == 0 {
                return Err(Error::Order("sequential depth must be >= 1".into()));
            }
            let seq = sequential_diff(cfg, k, f)?;
            let r = central_sum_order(lat, fl::<F>(k as f64) * cfg.order.alpha(), &seq)?;
            defect_against_corrections(lat, f, &r, &[])
        }
        CentralTaylorKind::MixedP5 { p, q } => {
            let dq = central_rl_order(lat, FracOrder::new(q)?, f, CentralMode::Compose)?;
            let lhs = central_sum_order(lat, p, &dq)?;
            let d = q - p;
            let rhs = if d.abs() <= fl(1e-12) {
                f.clone()
            } else if d > F::zero() {
                central_rl_order(lat, FracOrder::new(d)?, f, CentralMode::Compose)?
            } else {
                central_sum_order(lat, -d, f)?
            };
            defect_between(&lhs, &rhs)
        }
        CentralTaylorKind::MixedP6 { p, q } => {
            let dq = central_rl_order(lat, FracOrder::new(q)?, f, CentralMode::Compose)?;
            let lhs = central_rl_order(lat, FracOrder::new(p)?, &dq, CentralMode::Compose)?;
            let rhs = central_rl_order(lat, FracOrder::new(p + q)?, f, CentralMode::Compose)?;
            defect_between(&lhs, &rhs)
        }
    }
}

fn defect_against_corrections<F: Real>(
    lat: &LatticeSpec<F>,
    f: &GridFunction<F>,
    r: &GridFunction<F>,
    corr: &[CorrTerm<F>],
) -> Result<GridFunction<F>> {
    let mut out = Vec::with_capacity(r.count());
    for i in 0..r.count() {
        let z = r.point(i);
        let fv = f
            .value_at(z)
            .ok_or_else(|| Error::Alignment(format!("point {} left the input grid", z)))?;
        let mut c = F::zero();
        for term in corr {
            c += term.eval(lat, z)?;
        }
        out.push(r.values()[i] - (fv - c));
    }
    GridFunction::new(r.base(), out)
}

fn defect_between<F: Real>(lhs: &GridFunction<F>, rhs: &GridFunction<F>) -> Result<GridFunction<F>> {
    let mut out = Vec::new();
    let mut base = None;
    for i in 0..lhs.count() {
        let z = lhs.point(i);
        if let Some(r) = rhs.value_at(z) {
            if base.is_none() {
                base = Some(z);
            }
            out.push(lhs.values()[i] - r);
        }
    }
    match base {
        Some(b) if !out.is_empty() => GridFunction::new(b, out),
        _ => Err(Error::Alignment("operator outputs share no grid points".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeFamily;
    use num_complex::Complex;

    fn gen_quad() -> LatticeSpec<f64> {
        LatticeSpec::quadratic(0.9, 0.5, -0.2).unwrap()
    }

    fn qquad() -> LatticeSpec<f64> {
        LatticeSpec::q_quadratic(0.6, 0.8, 1.7, 0.4).unwrap()
    }

    fn ccfg(lat: LatticeSpec<f64>, alpha: f64, a: f64) -> CentralConfig<f64> {
        CentralConfig::new(lat, alpha, a, SeriesSpec::new(Complex::new(0.5, 0.0), 0.5, 200, 1e-12).unwrap())
            .unwrap()
    }

    fn noise(base: f64, n: usize, seed: u64) -> GridFunction<f64> {
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(11);
        GridFunction::sample(base, n, |_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 2_000_003) as f64 / 1_000_001.5 - 1.0
        })
        .unwrap()
    }

    fn half_base(lat: &LatticeSpec<f64>) -> f64 {
        if lat.family() == LatticeFamily::QQuadratic {
            lat.c() / 2.0 + 0.91
        } else {
            0.87
        }
    }

    fn max_abs(g: &GridFunction<f64>) -> f64 {
        g.values().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    #[test]
    fn diff_of_lattice_square_is_one() {
        let lat = LatticeSpec::quadratic(1.0, 0.0, 0.0).unwrap();
        let cfg = ccfg(lat, 0.5, 0.0);
        let f = GridFunction::sample(0.5, 6, |s| s * s).unwrap();
        let d = central_diff_k(&cfg, 1, &f).unwrap();
        assert_eq!(d.base(), 1.0);
        for v in d.values() {
            assert!((v - 1.0).abs() < 1e-13);
        }
        // k = 0 is the identity
        let d0 = central_diff_k(&cfg, 0, &f).unwrap();
        assert_eq!(d0.values(), f.values());
    }

    #[test]
    fn diff_k_composes() {
        let cfg = ccfg(gen_quad(), 0.5, 0.0);
        let f = noise(0.87, 8, 3);
        let d2 = central_diff_k(&cfg, 2, &f).unwrap();
        let once = central_diff_k(&cfg, 1, &f).unwrap();
        let twice = central_diff_k(&cfg, 1, &once).unwrap();
        assert_eq!(d2.values(), twice.values());
    }

    #[test]
    fn central_sum_alpha_one_is_running_sum() {
        let lat = gen_quad();
        let cfg = ccfg(lat, 1.0, 0.0);
        let f = noise(0.87, 7, 5);
        let s = central_frac_sum(&cfg, &f).unwrap();
        assert!((s.base() - 1.37).abs() < 1e-12);
        let mut acc = 0.0;
        for j in 0..f.count() {
            acc += f.values()[j] * lat.delta_x(f.point(j));
            assert!((s.values()[j] - acc).abs() < 1e-13);
        }
    }

    #[test]
    fn central_sum_order_two_matches_iterated() {
        for lat in [gen_quad(), qquad()] {
            let f = noise(half_base(&lat), 9, 7);
            let once = central_sum_order(&lat, 1.0, &f).unwrap();
            let twice = central_sum_order(&lat, 1.0, &once).unwrap();
            let direct = central_sum_order(&lat, 2.0, &f).unwrap();
            assert!((direct.base() - twice.base()).abs() < 1e-12);
            for (a, b) in direct.values().iter().zip(twice.values()) {
                assert!((a - b).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn central_semigroup() {
        for lat in [gen_quad(), qquad()] {
            let f = noise(half_base(&lat), 9, 9);
            let lhs = central_sum_order(&lat, 0.5, &central_sum_order(&lat, 0.5, &f).unwrap()).unwrap();
            let rhs = central_sum_order(&lat, 1.0, &f).unwrap();
            for (a, b) in lhs.values().iter().zip(rhs.values()) {
                assert!((a - b).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn central_rl_inverse_and_modes() {
        for lat in [gen_quad(), qquad()] {
            let f = noise(half_base(&lat), 9, 13);
            for alpha in [0.5, 1.3] {
                let cfg = ccfg(lat, alpha, 0.0);
                // modes agree on the full output grid
                let comp = central_rl_diff(&cfg, &f, CentralMode::Compose).unwrap();
                let dir = central_rl_diff(&cfg, &f, CentralMode::Direct).unwrap();
                assert!((comp.base() - dir.base()).abs() < 1e-12);
                for (a, b) in comp.values().iter().zip(dir.values()) {
                    assert!((a - b).abs() < 1e-10 * max_abs(&f).max(1.0));
                }
                // delta^alpha of delta^{-alpha} is the identity on the full grid
                let g = central_frac_sum(&cfg, &f).unwrap();
                let back = central_rl_diff(&cfg, &g, CentralMode::Compose).unwrap();
                assert!((back.base() - f.base()).abs() < 1e-12);
                for (a, b) in back.values().iter().zip(f.values()) {
                    assert!((a - b).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn central_rl_integer_reduction_and_direct_rejection() {
        let lat = gen_quad();
        let f = noise(0.87, 8, 17);
        let cfg = ccfg(lat, 2.0, 0.0);
        let comp = central_rl_diff(&cfg, &f, CentralMode::Compose).unwrap();
        let nested = central_diff_k(&cfg, 2, &f).unwrap();
        assert_eq!(comp.values(), nested.values());
        assert!(matches!(
            central_rl_diff(&cfg, &f, CentralMode::Direct),
            Err(Error::IntegerOrder { .. })
        ));
    }

    #[test]
    fn central_caputo_basics() {
        for lat in [gen_quad(), qquad()] {
            // constants die
            let ones = GridFunction::sample(half_base(&lat), 8, |_| 2.2).unwrap();
            let cfg = ccfg(lat, 0.7, 0.0);
            let c = central_caputo(&cfg, &ones).unwrap();
            assert!(max_abs(&c) < 1e-12);
            // caputo of the sum is the identity after zero-extending the sum
            let f = noise(half_base(&lat), 9, 19);
            for alpha in [0.5, 1.3] {
                let cfg = ccfg(lat, alpha, 0.0);
                let m = cfg.order.m();
                let g = central_frac_sum(&cfg, &f).unwrap().with_zero_prefix(m);
                let back = central_caputo(&cfg, &g).unwrap();
                assert!((back.base() - f.base()).abs() < 1e-12);
                for (a, b) in back.values().iter().zip(f.values()) {
                    assert!((a - b).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn central_taylor_defects() {
        for lat in [gen_quad(), qquad()] {
            let f = noise(half_base(&lat), 12, 23);
            let scale = max_abs(&f);
            for k in 1..=3usize {
                let d = central_taylor_defect(&ccfg(lat, 0.5, 0.0), &f, CentralTaylorKind::Integer { k })
                    .unwrap();
                assert!(max_abs(&d) < 1e-9 * scale, "integer k={} defect {}", k, max_abs(&d));
            }
            let d = central_taylor_defect(&ccfg(lat, 0.5, 0.0), &f, CentralTaylorKind::Rl).unwrap();
            assert!(max_abs(&d) < 1e-9 * scale);
            for alpha in [0.5, 1.5, 2.3] {
                let d = central_taylor_defect(&ccfg(lat, alpha, 0.0), &f, CentralTaylorKind::Caputo).unwrap();
                assert!(max_abs(&d) < 1e-9 * scale, "caputo alpha={} defect {}", alpha, max_abs(&d));
            }
            for k in [2usize, 3] {
                let d = central_taylor_defect(&ccfg(lat, 0.5, 0.0), &f, CentralTaylorKind::Sequential { k })
                    .unwrap();
                assert!(max_abs(&d) < 1e-9 * scale, "sequential k={} defect {}", k, max_abs(&d));
            }
            for (p, q) in [(0.4, 1.3), (1.3, 0.4)] {
                let d = central_taylor_defect(&ccfg(lat, 0.5, 0.0), &f, CentralTaylorKind::MixedP5 { p, q })
                    .unwrap();
                assert!(max_abs(&d) < 1e-9 * scale, "p5 defect {}", max_abs(&d));
                let d = central_taylor_defect(&ccfg(lat, 0.5, 0.0), &f, CentralTaylorKind::MixedP6 { p, q })
                    .unwrap();
                assert!(max_abs(&d) < 1e-9 * scale, "p6 defect {}", max_abs(&d));
            }
        }
    }

    #[test]
    fn sequential_reductions() {
        let lat = gen_quad();
        let f = noise(0.87, 9, 29);
        // k = 1 is the RL difference itself
        let cfg = ccfg(lat, 0.5, 0.0);
        let s1 = sequential_diff(&cfg, 1, &f).unwrap();
        let rl = central_rl_diff(&cfg, &f, CentralMode::Compose).unwrap();
        assert_eq!(s1.values(), rl.values());
        // alpha = 1, k = 2 is the plain second central difference
        let cfg1 = ccfg(lat, 1.0, 0.0);
        let s2 = sequential_diff(&cfg1, 2, &f).unwrap();
        let d2 = central_diff_k(&cfg1, 2, &f).unwrap();
        assert_eq!(s2.values(), d2.values());
        // alpha > 1 rejected
        assert!(matches!(sequential_diff(&ccfg(lat, 1.2, 0.0), 2, &f), Err(Error::Order(_))));
    }

    #[test]
    fn sequential_remainder_shrinks_for_exponential_inputs() {
        // Empirical monitor of the sequential expansion: for an exponential
        // input the depth-j coefficients are its eigenvalue powers, so the
        // truncation remainder on the test grid should fall below 1e-6 well
        // before depth 12. Monitored, not asserted as a theorem.
        use crate::series::{exp_term, frac_exp, SeriesSpec};
        use num_complex::Complex as C;
        let lat = LatticeSpec::q_quadratic(0.75, 0.8, 1.7, 0.4).unwrap();
        let alpha = 0.5;
        let lambda = 0.1;
        let a = lat.c() / 2.0 + 0.3;
        let scfg =
            CentralConfig::new(lat, alpha, a, SeriesSpec::new(C::new(lambda, 0.0), 0.0, 300, 1e-14).unwrap())
                .unwrap();
        let grid: Vec<f64> = (0..8).map(|j| a + 0.5 + j as f64).collect();
        let f: Vec<f64> = grid.iter().map(|&z| frac_exp(&scfg, z).unwrap().value).collect();
        let mut last = f64::INFINITY;
        for k in 1..=12usize {
            let mut worst = 0.0f64;
            for (i, &z) in grid.iter().enumerate() {
                let mut partial = 0.0;
                let mut pow = 1.0;
                for j in 0..k {
                    if j > 0 {
                        pow *= lambda;
                    }
                    partial += pow * exp_term(&scfg, j, z).unwrap();
                }
                worst = worst.max((f[i] - partial).abs());
            }
            assert!(worst <= last * 1.5, "remainder regrew at depth {}: {} > {}", k, worst, last);
            last = worst;
        }
        assert!(last < 1e-6, "remainder still {} at depth 12", last);
    }

    #[test]
    fn values_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<LatticeSpec<f64>>();
        assert_send_sync::<GridFunction<f64>>();
        assert_send_sync::<CentralConfig<f64>>();
        assert_send_sync::<crate::OperatorConfig<f64>>();
        // operators run concurrently on shared inputs
        let lat = gen_quad();
        let f = std::sync::Arc::new(noise(0.87, 10, 41));
        let handles: Vec<_> = (0..4)
            .map(|i| {
                let f = std::sync::Arc::clone(&f);
                std::thread::spawn(move || {
                    let cfg = ccfg(lat, 0.4 + 0.1 * i as f64, 0.0);
                    central_frac_sum(&cfg, &f).unwrap().values()[3]
                })
            })
            .collect();
        for h in handles {
            assert!(h.join().unwrap().is_finite());
        }
    }

    #[test]
    fn point_evaluation_alignment() {
        let lat = gen_quad();
        let cfg = ccfg(lat, 0.5, 0.0);
        let f = noise(0.87, 8, 31);
        let s = central_frac_sum(&cfg, &f).unwrap();
        let z = s.point(3);
        let v = central_frac_sum_at(&cfg, &f, z).unwrap();
        assert_eq!(v, s.values()[3]);
        assert!(matches!(central_frac_sum_at(&cfg, &f, z + 0.3), Err(Error::Alignment(_))));
    }

    #[test]
    fn central_euler_beta() {
        // the central kernel-product sum telescopes to the closed form
        for lat in [gen_quad(), qquad()] {
            let aa = half_base(&lat) - 0.5;
            for alpha in [0.5, 1.5] {
                for beta in [0.5, 1.5] {
                    for j in 0..6 {
                        let z = aa + 0.5 + alpha / 2.0 + beta / 2.0 + j as f64;
                        let mut acc = 0.0;
                        for i in 0..=j {
                            let t = aa + 0.5 + alpha / 2.0 + i as f64;
                            acc += lat
                                .gen_power(beta - 2.0, z - (beta - 2.0) / 2.0, t, beta - 1.0)
                                .unwrap()
                                / lat.modified_gamma(beta).unwrap()
                                * lat
                                    .gen_power(alpha - 1.0, t - (alpha - 1.0) / 2.0, aa, alpha)
                                    .unwrap()
                                / lat.modified_gamma(alpha + 1.0).unwrap()
                                * lat.delta_x(t);
                        }
                        let want = lat
                            .gen_power(alpha + beta - 1.0, z - (alpha + beta - 1.0) / 2.0, aa, alpha + beta)
                            .unwrap()
                            / lat.modified_gamma(alpha + beta + 1.0).unwrap();
                        assert!(
                            (acc - want).abs() / want.abs().max(1.0) < 1e-10,
                            "alpha={} beta={} j={}",
                            alpha,
                            beta,
                            j
                        );
                    }
                }
            }
        }
    }
}
