//! The identity evaluations behind the catalog.
//!
//! Every check computes both sides of its identity through the library
//! operators (or a hand-built kernel sum where the identity itself is about
//! the kernels) and returns the maximal relative defect over the valid grid,
//! `||lhs - rhs||_inf / max(||lhs||_inf, ||rhs||_inf)`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nulfrac_core::central::{
    central_caputo, central_frac_sum, central_rl_diff, central_taylor_defect,
    CentralConfig, CentralMode, CentralTaylorKind,
};
use nulfrac_core::nabla::{
    caputo_diff, frac_sum, nabla_diff_k, nikiforov_diff, rl_diff_compose,
    rl_diff_direct, rl_diff_residue, taylor_expand_integer, uniform_binomial_sum,
    TaylorKind,
};
use nulfrac_core::series::{
    caputo_frac_exp, caputo_term_defect, frac_exp_complex, frac_trig, SeriesSpec,
};
use nulfrac_core::{Config64, Error, Grid64, GridFunction, Lattice64, LatticeSpec, OperatorConfig};

use crate::sample::{kernel_dynamic_range, CheckParams};
use crate::{CheckId, Mutation};

type Outcome = Result<(f64, Vec<String>), Error>;

pub(crate) fn evaluate(id: CheckId, p: &CheckParams, mutation: Option<Mutation>) -> Outcome {
    match id {
        CheckId::ProductRule => product_rule(p, false),
        CheckId::QuotientRule => product_rule(p, true),
        CheckId::FundamentalTheorem => fundamental_theorem(p),
        CheckId::PowerIdentities => power_identities(p),
        CheckId::LatticeConstLemma => lattice_const_lemma(p),
        CheckId::EulerBeta => euler_beta(p, mutation),
        CheckId::CentralEulerBeta => central_euler_beta(p),
        CheckId::SumByParts => sum_by_parts(p),
        CheckId::Semigroup => semigroup(p, mutation),
        CheckId::LeftInverse => left_inverse(p),
        CheckId::MixedComposition => mixed_composition(p),
        CheckId::RlFormsAgree => rl_forms_agree(p, mutation),
        CheckId::NikiforovInteger => nikiforov_integer(p),
        CheckId::UniformBinomial => uniform_binomial(p),
        CheckId::TaylorInteger => taylor_integer(p),
        CheckId::TaylorRl => frac_taylor(p, TaylorKind::Rl),
        CheckId::TaylorCaputo => frac_taylor(p, TaylorKind::Caputo),
        CheckId::CaputoRlRelation => caputo_rl_relation(p),
        CheckId::CaputoInverse => caputo_inverse(p),
        CheckId::CentralSemigroup => central_semigroup(p),
        CheckId::CentralInverse => central_inverse(p),
        CheckId::CentralTaylorInteger => central_taylor(p, CentralKind::Integer),
        CheckId::CentralTaylorRl => central_taylor(p, CentralKind::Rl),
        CheckId::CentralTaylorCaputo => central_taylor(p, CentralKind::Caputo),
        CheckId::MixedP5 => central_mixed(p, false),
        CheckId::MixedP6 => central_mixed(p, true),
        CheckId::SequentialTaylor => sequential_taylor(p),
        CheckId::ExpEigen => exp_eigen(p),
        CheckId::TrigPythagoras => trig_pythagoras(p),
    }
}

enum CentralKind {
    Integer,
    Rl,
    Caputo,
}

const FLOOR: f64 = 1e-300;

fn rel(lhs: &[f64], rhs: &[f64]) -> f64 {
    debug_assert_eq!(lhs.len(), rhs.len());
    let d = lhs.iter().zip(rhs).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
    let s = lhs.iter().chain(rhs).map(|v| v.abs()).fold(FLOOR, f64::max);
    d / s
}

/// Relative defect over the grid points both outputs share.
fn aligned_rel(lhs: &Grid64, rhs: &Grid64) -> Result<f64, Error> {
    let mut l = Vec::new();
    let mut r = Vec::new();
    for i in 0..lhs.count() {
        let z = lhs.point(i);
        if let Some(v) = rhs.value_at(z) {
            l.push(lhs.values()[i]);
            r.push(v);
        }
    }
    if l.is_empty() {
        return Err(Error::Alignment("no shared grid points".into()));
    }
    Ok(rel(&l, &r))
}

fn rel_scalar_max(pairs: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    let mut worst = 0.0f64;
    for (a, b) in pairs {
        worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(1.0));
    }
    worst
}

fn cfg(lat: &Lattice64, gamma: f64, alpha: f64) -> Result<Config64, Error> {
    OperatorConfig::new(*lat, gamma, alpha)
}

fn ccfg(lat: &Lattice64, alpha: f64, a: f64) -> Result<CentralConfig<f64>, Error> {
    CentralConfig::new(*lat, alpha, a, SeriesSpec::new(Complex::new(0.5, 0.0), 0.4, 300, 1e-10)?)
}

/// Maps an order into (0, 1] for the sequential/series checks.
fn unit_order(v: f64) -> f64 {
    0.25 + 0.6 * (v - v.floor())
}

fn conditioning(lat: &Lattice64, p: &CheckParams, a: f64) -> Vec<String> {
    let range = kernel_dynamic_range(lat, p.gamma, p.alpha, a, p.n);
    if range > 1e12 {
        vec![format!("sum kernel spans {:.2e} on the {} family", range, lat.family().name())]
    } else {
        Vec::new()
    }
}

fn product_rule(p: &CheckParams, quotient: bool) -> Outcome {
    let mut worst = 0.0f64;
    for (lat, a) in p.lattices() {
        let f = p.noise_grid(a, p.n, 1);
        let g = if quotient {
            // keep the denominator away from zero
            let mut rng = ChaCha8Rng::seed_from_u64(p.rng_seed ^ 0xABCD);
            GridFunction::sample(a, p.n, |_| rng.gen_range(0.5..1.5))?
        } else {
            p.noise_grid(a, p.n, 2)
        };
        let nu = p.gamma;
        let comb = |fa: f64, fb: f64| if quotient { fa / fb } else { fa * fb };
        // backward form at interior points, forward form one step lower
        for i in 1..p.n {
            let s = f.point(i);
            let dxb = lat.nabla_x(nu, s);
            let (f1, f0) = (f.values()[i], f.values()[i - 1]);
            let (g1, g0) = (g.values()[i], g.values()[i - 1]);
            let dv_f = (f1 - f0) / dxb;
            let dv_g = (g1 - g0) / dxb;
            let lhs = (comb(f1, g1) - comb(f0, g0)) / dxb;
            let (r1, r2) = if quotient {
                (
                    (g0 * dv_f - f0 * dv_g) / (g1 * g0),
                    (g1 * dv_f - f1 * dv_g) / (g1 * g0),
                )
            } else {
                (f0 * dv_g + g1 * dv_f, g0 * dv_f + f1 * dv_g)
            };
            let scale = lhs.abs().max(1.0);
            worst = worst.max((lhs - r1).abs() / scale).max((lhs - r2).abs() / scale);
            // forward (delta) form of the same identity
            let dxf = lat.step_x(nu, s - 1.0, nulfrac_core::StepDirection::Forward);
            let du_f = (f1 - f0) / dxf;
            let du_g = (g1 - g0) / dxf;
            let lhs_d = (comb(f1, g1) - comb(f0, g0)) / dxf;
            let (d1, d2) = if quotient {
                (
                    (g1 * du_f - f1 * du_g) / (g0 * g1),
                    (g0 * du_f - f0 * du_g) / (g0 * g1),
                )
            } else {
                (f1 * du_g + g0 * du_f, g1 * du_f + f0 * du_g)
            };
            let scale = lhs_d.abs().max(1.0);
            worst = worst.max((lhs_d - d1).abs() / scale).max((lhs_d - d2).abs() / scale);
        }
    }
    Ok((worst, Vec::new()))
}

fn fundamental_theorem(p: &CheckParams) -> Outcome {
    let mut worst = 0.0f64;
    for (lat, a) in p.lattices() {
        let c = cfg(&lat, p.gamma, 1.0)?;
        let f = p.noise_grid(a, p.n, 3);
        // difference of the running sum gives back the summand
        let s = frac_sum(&c, &f)?;
        let ds = nabla_diff_k(&c, 1, &s)?;
        worst = worst.max(rel(ds.values(), &f.values()[1..]));
        // sum of the difference telescopes
        let df = nabla_diff_k(&c, 1, &f)?;
        let tel = frac_sum(&c, &f)?; // reuse grid shape
        let _ = tel;
        let summed = {
            let anchored = GridFunction::new(a, {
                let mut v = vec![0.0];
                v.extend_from_slice(df.values());
                v
            })?;
            frac_sum(&c, &anchored)?
        };
        let want: Vec<f64> = (1..f.count()).map(|j| f.values()[j] - f.values()[0]).collect();
        worst = worst.max(rel(&summed.values()[1..], &want));
    }
    Ok((worst, Vec::new()))
}

fn power_identities(p: &CheckParams) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(p.rng_seed ^ 0x77);
    let mut worst = 0.0f64;
    for (lat, _) in p.lattices() {
        let base = if lat.family().is_q_family() { lat.c() / 2.0 + 0.5 } else { 0.5 };
        for _ in 0..20 {
            let nu: f64 = rng.gen_range(-1.0..1.5);
            let steps = rng.gen_range(2..10) as f64;
            let s = base + rng.gen_range(2.0..4.0) + steps;
            let z = s - steps;
            let mu = if rng.gen_bool(0.5) { rng.gen_range(0.3..2.2) } else { rng.gen_range(1..3) as f64 };
            let xs = |n: f64, w: f64| lat.x_shifted(n, w);
            let gp = |n: f64, ss: f64, zz: f64, al: f64| lat.gen_power(n, ss, zz, al);
            // shift products
            let top = gp(nu, s, z, mu + 1.0)?;
            worst = worst.max(rel_scalar_max([
                (top, gp(nu, s, z, mu)? * (xs(nu, s) - xs(nu, z - mu))),
                (top, (xs(nu, s) - xs(nu, z)) * gp(nu, s, z - 1.0, mu)?),
                (top, gp(nu - 1.0, s + 1.0, z, mu)? * (xs(nu - mu, s) - xs(nu - mu, z))),
                (top, (xs(nu - mu, s + mu) - xs(nu - mu, z)) * gp(nu - 1.0, s, z, mu)?),
            ]));
            // difference in the second argument and in the first
            let dz = lat.step_x(nu - mu + 1.0, z, nulfrac_core::StepDirection::Forward);
            let lhs = (gp(nu, s, z + 1.0, mu)? - gp(nu, s, z, mu)?) / dz;
            let rhs = -lat.bracket(mu) * gp(nu, s, z, mu - 1.0)?;
            worst = worst.max(rel_scalar_max([(lhs, rhs)]));
            let ds = lat.nabla_x(nu + 1.0, s);
            let lhs = (gp(nu + 1.0, s, z, mu)? - gp(nu + 1.0, s - 1.0, z, mu)?) / ds;
            let rhs = lat.bracket(mu) * gp(nu, s, z, mu - 1.0)?;
            worst = worst.max(rel_scalar_max([(lhs, rhs)]));
            // reciprocal difference rules
            let dzr = lat.nabla_x(nu - mu + 1.0, z);
            let lhs = (1.0 / gp(nu, s, z, mu)? - 1.0 / gp(nu, s, z - 1.0, mu)?) / dzr;
            let rhs = lat.bracket(mu) / gp(nu, s, z, mu + 1.0)?;
            worst = worst.max(rel_scalar_max([(lhs, rhs)]));
            let dsr = lat.step_x(nu - 1.0, s, nulfrac_core::StepDirection::Forward);
            let lhs = -(1.0 / gp(nu - 1.0, s + 1.0, z, mu)? - 1.0 / gp(nu - 1.0, s, z, mu)?) / dsr;
            worst = worst.max(rel_scalar_max([(lhs, rhs)]));
        }
    }
    Ok((worst, Vec::new()))
}

fn lattice_const_lemma(p: &CheckParams) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(p.rng_seed ^ 0x33);
    let mut worst = 0.0f64;
    for (lat, a) in p.lattices() {
        for _ in 0..10 {
            let al: f64 = rng.gen_range(0.1..2.5);
            let be: f64 = rng.gen_range(0.1..2.5);
            let t0: f64 = a + rng.gen_range(0.0..3.0);
            let e = |t: f64| {
                lat.bracket(al + be) * lat.x(t)
                    - lat.bracket(al) * lat.x_shifted(-be, t)
                    - lat.bracket(be) * lat.x_shifted(al, t)
            };
            let scale = e(t0).abs().max(lat.x(t0).abs()).max(1.0);
            worst = worst.max((e(t0) - e(t0 + 1.0)).abs() / scale);
            worst = worst.max((e(t0) - e(t0 + 2.0)).abs() / scale);
        }
    }
    Ok((worst, Vec::new()))
}

fn euler_beta(p: &CheckParams, mutation: Option<Mutation>) -> Outcome {
    let n = p.n.min(30);
    let mut worst = 0.0f64;
    let mut warnings = Vec::new();
    let (mut alpha, beta) = (p.alpha, p.beta);
    let mut flip = 1.0;
    match mutation {
        Some(Mutation::PerturbOrder(d)) => alpha += d,
        Some(Mutation::FlipKernelExponentSign) => flip = -1.0,
        None => {}
    }
    for (lat, a) in p.lattices() {
        warnings.extend(conditioning(&lat, p, a));
        let inv_ga = 1.0 / lat.modified_gamma(p.alpha + 1.0)?;
        let inv_gb = 1.0 / lat.modified_gamma(beta)?;
        let mut lhs = Vec::with_capacity(n);
        let mut rhs = Vec::with_capacity(n);
        for j in 1..=n {
            let z = a + j as f64;
            let mut acc = 0.0;
            for i in 1..=j {
                let t = a + i as f64;
                acc += lat.gen_power(beta, z, t - 1.0, flip * (beta - 1.0))? * inv_gb
                    * lat.gen_power(0.0, t, a, alpha)? * inv_ga
                    * lat.nabla_x(1.0, t);
            }
            lhs.push(acc);
            rhs.push(lat.gen_power(beta, z, a, p.alpha + beta)? / lat.modified_gamma(p.alpha + beta + 1.0)?);
        }
        worst = worst.max(rel(&lhs, &rhs));
    }
    Ok((worst, warnings))
}

fn central_euler_beta(p: &CheckParams) -> Outcome {
    let mut worst = 0.0f64;
    for (lat, a0) in p.lattices() {
        let aa = a0; // anchor of the central kernels
        for (alpha, beta) in [(p.alpha, p.beta), (0.5, 1.5)] {
            for j in 0..p.n.min(12) {
                let z = aa + 0.5 + alpha / 2.0 + beta / 2.0 + j as f64;
                let mut acc = 0.0;
                for i in 0..=j {
                    let t = aa + 0.5 + alpha / 2.0 + i as f64;
                    acc += lat.gen_power(beta - 2.0, z - (beta - 2.0) / 2.0, t, beta - 1.0)?
                        / lat.modified_gamma(beta)?
                        * lat.gen_power(alpha - 1.0, t - (alpha - 1.0) / 2.0, aa, alpha)?
                        / lat.modified_gamma(alpha + 1.0)?
                        * lat.delta_x(t);
                }
                let want = lat
                    .gen_power(alpha + beta - 1.0, z - (alpha + beta - 1.0) / 2.0, aa, alpha + beta)?
                    / lat.modified_gamma(alpha + beta + 1.0)?;
                worst = worst.max((acc - want).abs() / want.abs().max(1.0));
            }
        }
    }
    Ok((worst, Vec::new()))
}

fn sum_by_parts(p: &CheckParams) -> Outcome {
    let mut worst = 0.0f64;
    for (lat, a) in p.lattices() {
        let f = p.noise_grid(a, p.n, 4);
        let g = p.noise_grid(a, p.n, 5);
        for zi in 1..p.n {
            let mut lhs = 0.0;
            let mut corr = 0.0;
            for s in 1..=zi {
                // nabla_g f * nabla x_g telescopes to the plain difference
                lhs += g.values()[s] * (f.values()[s] - f.values()[s - 1]);
                corr += f.values()[s - 1] * (g.values()[s] - g.values()[s - 1]);
            }
            let rhs = f.values()[zi] * g.values()[zi] - f.values()[0] * g.values()[0] - corr;
            worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1.0));
            let _ = &lat;
        }
    }
    Ok((worst, Vec::new()))
}

fn semigroup(p: &CheckParams, mutation: Option<Mutation>) -> Outcome {
    let inner_alpha = match mutation {
        Some(Mutation::PerturbOrder(d)) => p.alpha + d,
        Some(Mutation::FlipKernelExponentSign) => 2.0 - p.alpha,
        None => p.alpha,
    };
    let mut worst = 0.0f64;
    let mut warnings = Vec::new();
    for (lat, a) in p.lattices() {
        warnings.extend(conditioning(&lat, p, a));
        let f = p.noise_grid(a, p.n, 6);
        let inner = frac_sum(&cfg(&lat, p.gamma, inner_alpha)?, &f)?;
        let lhs = frac_sum(&cfg(&lat, p.gamma + p.alpha, p.beta)?, &inner)?;
        let rhs = frac_sum(&cfg(&lat, p.gamma, p.alpha + p.beta)?, &f)?;
        worst = worst.max(rel(lhs.values(), rhs.values()));
    }
    Ok((worst, warnings))
}

fn left_inverse(p: &CheckParams) -> Outcome {
    let mut worst = 0.0f64;
    for (lat, a) in p.lattices() {
        let c = cfg(&lat, p.gamma, p.alpha)?;
        let f = p.noise_grid(a, p.n, 7);
        let g = frac_sum(&c, &f)?;
        let back = rl_diff_compose(&c, &g)?;
        let trimmed = back.restricted(1)?;
        worst = worst.max(aligned_rel(&trimmed, &f)?);
    }
    Ok((worst, Vec::new()))
}

fn mixed_composition(p: &CheckParams) -> Outcome {
    let mut worst = 0.0f64;
    let (lo, hi) = if p.alpha < p.beta { (p.alpha, p.beta) } else { (p.beta, p.alpha) };
    for (lat, a) in p.lattices() {
        let f = p.noise_grid(a, p.n, 8);
        for (beta, alpha) in [(hi, lo), (lo, hi)] {
            let inner = frac_sum(&cfg(&lat, p.gamma + beta - alpha, alpha)?, &f)?;
            let lhs = rl_diff_compose(&cfg(&lat, p.gamma, beta)?, &inner)?;
            let d = beta - alpha;
            let rhs = if d > 0.0 {
                rl_diff_compose(&cfg(&lat, p.gamma, d)?, &f)?
            } else {
                frac_sum(&cfg(&lat, p.gamma + beta - alpha, -d)?, &f)?
            };
            worst = worst.max(aligned_rel(&lhs.restricted(1)?, &rhs)?);
        }
    }
    Ok((worst, Vec::new()))
}

fn rl_forms_agree(p: &CheckParams, mutation: Option<Mutation>) -> Outcome {
    let mut worst = 0.0f64;
    let mut warnings = Vec::new();
    let direct_alpha = match mutation {
        Some(Mutation::PerturbOrder(d)) => p.alpha + d,
        _ => p.alpha,
    };
    for (lat, a) in p.lattices() {
        warnings.extend(conditioning(&lat, p, a));
        let f = p.noise_grid(a, p.n.min(24), 9);
        let c = cfg(&lat, p.gamma, p.alpha)?;
        let comp = rl_diff_compose(&c, &f)?;
        let dir = rl_diff_direct(&cfg(&lat, p.gamma, direct_alpha)?, &f)?;
        let res = rl_diff_residue(&c, &f)?;
        worst = worst.max(rel(&comp.values()[1..], &dir.values()[1..]));
        worst = worst.max(rel(&dir.values()[1..], &res.values()[1..]));
        worst = worst.max(rel(&comp.values()[1..], &res.values()[1..]));
    }
    Ok((worst, warnings))
}

fn nikiforov_integer(p: &CheckParams) -> Outcome {
    let n = p.depth;
    let mut worst = 0.0f64;
    for (lat, a) in p.lattices() {
        let f = p.noise_grid(a, p.n, 10);
        // residue form at the sampled shift
        let c = cfg(&lat, p.gamma, n as f64)?;
        let res = rl_diff_residue(&c, &f)?;
        let nested = nabla_diff_k(&c, n, &f)?;
        worst = worst.max(rel(&res.values()[n + 1..], &nested.values()[1..]));
        // the classical n-th difference formula lives at shift 1
        let c1 = cfg(&lat, 1.0, n as f64)?;
        let nik = nikiforov_diff(&lat, n, &f)?;
        let nested1 = nabla_diff_k(&c1, n, &f)?;
        worst = worst.max(rel(&nik.values()[n + 1..], &nested1.values()[1..]));
    }
    Ok((worst, Vec::new()))
}

fn uniform_binomial(p: &CheckParams) -> Outcome {
    let lat = LatticeSpec::linear(1.0, 0.0)?;
    let f = p.noise_grid(0.0, p.n, 11);
    let mut worst = 0.0f64;
    for alpha in [p.alpha, 0.5, 1.5] {
        let s = frac_sum(&cfg(&lat, p.gamma, alpha)?, &f)?;
        let shifted = GridFunction::new(0.0, f.values()[1..].to_vec())?;
        let b = uniform_binomial_sum(alpha, &shifted);
        worst = worst.max(rel(b.values(), &s.values()[1..]));
    }
    Ok((worst, Vec::new()))
}

fn taylor_integer(p: &CheckParams) -> Outcome {
    let mut worst = 0.0f64;
    for (lat, a) in p.lattices() {
        let f = p.noise_grid(a, p.n, 12);
        let scale = f.max_norm().max(FLOOR);
        for k in 1..=p.depth.clamp(2, 4) {
            let c = cfg(&lat, p.gamma, 1.0)?;
            let (poly, rem) = taylor_expand_integer(&c, k, &f)?;
            for i in 0..poly.count() {
                let z = poly.point(i);
                let want = f.value_at(z).ok_or_else(|| Error::Alignment("taylor grid".into()))?;
                worst = worst.max((poly.values()[i] + rem.values()[i] - want).abs() / scale);
            }
        }
    }
    Ok((worst, Vec::new()))
}

fn frac_taylor(p: &CheckParams, kind: TaylorKind) -> Outcome {
    let mut worst = 0.0f64;
    for (lat, a) in p.lattices() {
        let f = p.noise_grid(a, p.n, 13);
        let scale = f.max_norm().max(FLOOR);
        let d = nulfrac_core::nabla::frac_taylor_defect(&cfg(&lat, p.gamma, p.alpha)?, &f, kind)?;
        worst = worst.max(d.max_norm() / scale);
    }
    Ok((worst, Vec::new()))
}

fn caputo_rl_relation(p: &CheckParams) -> Outcome {
    let mut worst = 0.0f64;
    for (lat, a0) in p.lattices() {
        let f = p.noise_grid(a0, p.n, 14);
        let c = cfg(&lat, p.gamma, p.alpha)?;
        let m = c.order.m();
        let a = a0 + m as f64 - 1.0;
        let lhs = caputo_diff(&c, &f)?;
        // subtract the anchor expansion, then take the RL difference
        let shift = p.gamma + p.alpha - m as f64;
        let mut coefs = Vec::with_capacity(m);
        for j in 0..m {
            let dj = nabla_diff_k(&cfg(&lat, shift + (m - j) as f64, 1.0)?, j, &f)?;
            coefs.push(dj.value_at(a).ok_or_else(|| Error::Alignment("anchor".into()))?);
        }
        let nu = shift + m as f64 - 1.0;
        let mut vvals = Vec::with_capacity(f.count());
        for i in 0..f.count() {
            let z = f.point(i);
            let mut corr = 0.0;
            let mut fact = 1.0;
            for (j, &cj) in coefs.iter().enumerate() {
                if j > 0 {
                    fact *= lat.bracket(j as f64);
                }
                corr += cj / fact * lat.gen_power(nu, z, a, j as f64)?;
            }
            vvals.push(f.values()[i] - corr);
        }
        let v = GridFunction::new(a0, vvals)?.restricted(m - 1)?;
        let rhs = rl_diff_compose(&c, &v)?;
        worst = worst.max(rel(&lhs.values()[1..], &rhs.values()[1..]));
    }
    Ok((worst, Vec::new()))
}

fn caputo_inverse(p: &CheckParams) -> Outcome {
    let mut worst = 0.0f64;
    for (lat, a) in p.lattices() {
        let c = cfg(&lat, p.gamma, p.alpha)?;
        let m = c.order.m();
        let f = p.noise_grid(a, p.n, 15);
        let g = frac_sum(&c, &f)?.with_zero_prefix(m.saturating_sub(1));
        let back = caputo_diff(&c, &g)?;
        worst = worst.max(aligned_rel(&back.restricted(1)?, &f)?);
    }
    Ok((worst, Vec::new()))
}

fn central_base(lat: &Lattice64, a: f64) -> f64 {
    let _ = lat;
    a + 0.5
}

fn central_semigroup(p: &CheckParams) -> Outcome {
    let mut worst = 0.0f64;
    for (lat, a) in p.lattices() {
        let b = central_base(&lat, a);
        let f = p.noise_grid(b, p.n, 16);
        let inner = central_frac_sum(&ccfg(&lat, p.alpha, a)?, &f)?;
        let lhs = central_frac_sum(&ccfg(&lat, p.beta, a)?, &inner)?;
        let rhs = central_frac_sum(&ccfg(&lat, p.alpha + p.beta, a)?, &f)?;
        worst = worst.max(rel(lhs.values(), rhs.values()));
    }
    Ok((worst, Vec::new()))
}

fn central_inverse(p: &CheckParams) -> Outcome {
    let mut worst = 0.0f64;
    for (lat, a) in p.lattices() {
        let b = central_base(&lat, a);
        let f = p.noise_grid(b, p.n, 17);
        let c = ccfg(&lat, p.alpha, a)?;
        let m = c.order.m();
        let g = central_frac_sum(&c, &f)?;
        // RL inverse
        let rl = central_rl_diff(&c, &g, CentralMode::Compose)?;
        worst = worst.max(aligned_rel(&rl, &f)?);
        // Caputo inverse on the zero-extended sum
        let cap = central_caputo(&c, &g.with_zero_prefix(m))?;
        worst = worst.max(aligned_rel(&cap, &f)?);
    }
    Ok((worst, Vec::new()))
}

fn central_taylor(p: &CheckParams, kind: CentralKind) -> Outcome {
    let mut worst = 0.0f64;
    for (lat, a) in p.lattices() {
        let b = central_base(&lat, a);
        let f = p.noise_grid(b, p.n, 18);
        let scale = f.max_norm().max(FLOOR);
        let c = ccfg(&lat, p.alpha, a)?;
        let d = match kind {
            CentralKind::Integer => {
                central_taylor_defect(&c, &f, CentralTaylorKind::Integer { k: p.depth })?
            }
            CentralKind::Rl => central_taylor_defect(&c, &f, CentralTaylorKind::Rl)?,
            CentralKind::Caputo => central_taylor_defect(&c, &f, CentralTaylorKind::Caputo)?,
        };
        worst = worst.max(d.max_norm() / scale);
    }
    Ok((worst, Vec::new()))
}

fn central_mixed(p: &CheckParams, p6: bool) -> Outcome {
    // orders mapped into [0.3, 1.5], clear of 1
    let squash = |v: f64| {
        let r = 0.3 + 1.2 * (v - v.floor());
        if (r - 1.0).abs() < 0.05 {
            r + 0.1
        } else {
            r
        }
    };
    let (oa, ob) = (squash(p.alpha), squash(p.beta));
    let mut worst = 0.0f64;
    for (lat, a) in p.lattices() {
        let b = central_base(&lat, a);
        let f = p.noise_grid(b, p.n, 19);
        let scale = f.max_norm().max(FLOOR);
        let c = ccfg(&lat, p.alpha, a)?;
        for (pp, qq) in [(oa, ob), (ob, oa)] {
            let kind = if p6 {
                CentralTaylorKind::MixedP6 { p: pp, q: qq }
            } else {
                CentralTaylorKind::MixedP5 { p: pp, q: qq }
            };
            let d = central_taylor_defect(&c, &f, kind)?;
            worst = worst.max(d.max_norm() / scale);
        }
    }
    Ok((worst, Vec::new()))
}

fn sequential_taylor(p: &CheckParams) -> Outcome {
    let alpha = unit_order(p.alpha);
    let mut worst = 0.0f64;
    for (lat, a) in p.lattices() {
        let b = central_base(&lat, a);
        let f = p.noise_grid(b, p.n, 20);
        let scale = f.max_norm().max(FLOOR);
        let c = ccfg(&lat, alpha, a)?;
        for k in 1..=p.depth.clamp(2, 3) {
            let d = central_taylor_defect(&c, &f, CentralTaylorKind::Sequential { k })?;
            worst = worst.max(d.max_norm() / scale);
        }
    }
    Ok((worst, Vec::new()))
}

/// Series checks run on the families where the exponential series converges
/// (q-quadratic and linear); on quadratic lattices it is only asymptotic.
fn series_lattices(p: &CheckParams) -> Result<[(Lattice64, f64); 2], Error> {
    Ok([(p.qq_lattice(), p.qq_a), (LatticeSpec::linear(1.0, 0.0)?, 0.3)])
}

fn exp_eigen(p: &CheckParams) -> Outcome {
    let alpha = unit_order(p.alpha);
    let mut worst = 0.0f64;
    for (lat, a) in series_lattices(p)? {
        // the term recurrence under the grid Caputo operator
        let c = ccfg(&lat, alpha, a)?;
        for k in 0..=4usize {
            let d = caputo_term_defect(&c, k, 6)?;
            worst = worst.max(d);
        }
        // eigen relation through the series, both signs of the eigenvalue
        for lambda in [0.5, -0.5] {
            let lam = Complex::new(lambda, 0.0);
            for j in 0..6 {
                let z = a + 0.9 + j as f64;
                let (lhs, _, _) = caputo_frac_exp(&c, lam, z)?;
                let (e, _, _) = frac_exp_complex(&c, lam, z)?;
                let rhs = lam * e;
                worst = worst.max((lhs - rhs).norm() / rhs.norm().max(1.0));
            }
        }
        // alpha = 1: the sampled operator itself satisfies the relation
        let c1 = ccfg(&lat, 1.0, a)?;
        let lambda = 0.5;
        let samples = GridFunction::sample(a + 0.5, 8, |z| {
            frac_exp_complex(&c1, Complex::new(lambda, 0.0), z).map(|(v, _, _)| v.re).unwrap_or(f64::NAN)
        })?;
        let out = central_caputo(&c1, &samples)?;
        for i in 0..out.count() {
            let z = out.point(i);
            let (e, _, _) = frac_exp_complex(&c1, Complex::new(lambda, 0.0), z)?;
            let want = lambda * e.re;
            worst = worst.max((out.values()[i] - want).abs() / want.abs().max(1.0));
        }
    }
    Ok((worst, Vec::new()))
}

fn trig_pythagoras(p: &CheckParams) -> Outcome {
    let alpha = unit_order(p.alpha);
    let omega = 0.2 + 0.5 * (p.beta - p.beta.floor());
    let mut worst = 0.0f64;
    for (lat, a) in series_lattices(p)? {
        let mut c = ccfg(&lat, alpha, a)?;
        c.series.omega = omega;
        for j in 0..6 {
            let z = a + 0.9 + j as f64;
            let t = frac_trig(&c, z)?;
            let (ep, _, _) = frac_exp_complex(&c, Complex::new(0.0, omega), z)?;
            let (em, _, _) = frac_exp_complex(&c, Complex::new(0.0, -omega), z)?;
            let lhs = t.cos * t.cos + t.sin * t.sin;
            let rhs = (ep * em).re;
            worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1.0));
            worst = worst.max((ep * em).im.abs() / rhs.abs().max(1.0));
        }
    }
    Ok((worst, Vec::new()))
}
