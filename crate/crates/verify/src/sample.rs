//! Deterministic parameter sampling for the checks.
//!
//! Orders are drawn from [0.2, 2.5] (kept away from integers where the
//! identity needs a fractional order), q from [0.3, 0.9], grid sizes from
//! [8, 40]; grid samples are i.i.d. uniform on [-1, 1].
//!
//! The identities are exact, but their kernels scale like powers of the
//! lattice values, so a steep lattice window forces double precision to
//! cancel enormous summands down to order-one results. Draws whose lattice
//! window spans too large a ratio (or whose sum kernels span more than 1e12)
//! are rejected and resampled, progressively biasing q upward and n downward
//! so sampling always terminates in a numerically meaningful region.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use nulfrac_core::{GridFunction, Lattice64, LatticeSpec};

use crate::CheckId;

/// Echo of everything a check run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckParams {
    pub trial: u32,
    /// Seed of the per-check generator (grid samples, extra draws).
    pub rng_seed: u64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub n: usize,
    /// Integer depth for the integer-order checks.
    pub depth: usize,
    pub quad_c1: f64,
    pub quad_c2: f64,
    pub quad_c3: f64,
    pub quad_a: f64,
    pub q: f64,
    pub qq_c1: f64,
    pub qq_c2: f64,
    pub qq_c3: f64,
    pub qq_a: f64,
}

/// Largest admissible window-span ratio; beyond it the order-3 identities
/// lose the 1e-8 headroom in double precision.
const SPAN_LIMIT: f64 = 500.0;

impl CheckParams {
    pub fn sample(id: CheckId, seed: u64, trial: u32) -> Self {
        let derived = seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add((id_index(id) as u64) << 32)
            .wrapping_add(trial as u64 + 1);
        let mut rng = ChaCha8Rng::seed_from_u64(derived);
        let needs_fractional = matches!(
            id,
            CheckId::RlFormsAgree
                | CheckId::TaylorRl
                | CheckId::TaylorCaputo
                | CheckId::CaputoRlRelation
                | CheckId::MixedComposition
                | CheckId::CentralTaylorRl
                | CheckId::CentralTaylorCaputo
                | CheckId::MixedP5
                | CheckId::MixedP6
        );
        let mut last = None;
        for attempt in 0..200usize {
            // progressive bias toward flat lattices and short grids
            let q_lo = (0.3 + 0.006 * attempt as f64).min(0.88);
            let n_hi = 40usize.saturating_sub(attempt / 2).max(8);
            let alpha = sample_order(&mut rng, needs_fractional);
            let beta = sample_order(&mut rng, needs_fractional);
            let gamma = rng.gen_range(0.0..1.5);
            let n = rng.gen_range(8..=n_hi);
            let depth = rng.gen_range(1..=3);
            let quad_c1 = rng.gen_range(0.5..1.5);
            let quad_c2 = rng.gen_range(0.0..1.0);
            let quad_c3 = rng.gen_range(-0.5..0.5);
            let quad_a = rng.gen_range(1.9..2.9);
            let q: f64 = rng.gen_range(q_lo..0.9);
            let qq_c1: f64 = rng.gen_range(0.4..1.2);
            let qq_c2: f64 = rng.gen_range(0.4..1.2);
            let qq_c3 = rng.gen_range(-0.3..0.3);
            let qq_c = (qq_c2 / qq_c1).ln() / q.ln();
            let qq_a = qq_c / 2.0 + rng.gen_range(1.9..2.9);
            let params = Self {
                trial,
                rng_seed: rng.gen(),
                alpha,
                beta,
                gamma,
                n,
                depth,
                quad_c1,
                quad_c2,
                quad_c3,
                quad_a,
                q,
                qq_c1,
                qq_c2,
                qq_c3,
                qq_a,
            };
            if params.well_conditioned() {
                return params;
            }
            last = Some(params);
        }
        last.expect("at least one draw was made")
    }

    pub fn quad_lattice(&self) -> Lattice64 {
        LatticeSpec::quadratic(self.quad_c1, self.quad_c2, self.quad_c3).expect("sampled coefficients are valid")
    }

    pub fn qq_lattice(&self) -> Lattice64 {
        LatticeSpec::q_quadratic(self.q, self.qq_c1, self.qq_c2, self.qq_c3)
            .expect("sampled coefficients are valid")
    }

    /// Both test lattices with their grid anchors.
    pub fn lattices(&self) -> [(Lattice64, f64); 2] {
        [(self.quad_lattice(), self.quad_a), (self.qq_lattice(), self.qq_a)]
    }

    /// i.i.d. uniform grid samples on [-1, 1].
    pub fn noise_grid(&self, base: f64, n: usize, salt: u64) -> GridFunction<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed.wrapping_add(salt));
        GridFunction::sample(base, n, |_| rng.gen_range(-1.0..1.0)).expect("finite samples")
    }

    fn well_conditioned(&self) -> bool {
        for (lat, a) in self.lattices() {
            if span_ratio(&lat, a, self.n) > SPAN_LIMIT {
                return false;
            }
            if kernel_dynamic_range(&lat, self.gamma, self.alpha, a, self.n) > 1e12 {
                return false;
            }
        }
        true
    }
}

/// Window span of the lattice over the grid, in units of its smallest
/// backward step; the cancellation the exact identities demand grows with a
/// power of this ratio.
pub fn span_ratio(lat: &Lattice64, a: f64, n: usize) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut min_step = f64::INFINITY;
    let mut t = a - 2.0;
    while t <= a + n as f64 + 3.0 {
        let x = lat.x(t);
        lo = lo.min(x);
        hi = hi.max(x);
        let s = (lat.x(t) - lat.x(t - 1.0)).abs();
        if s > 0.0 {
            min_step = min_step.min(s);
        }
        t += 1.0;
    }
    (hi - lo) / min_step.max(1e-12)
}

/// Ratio of the largest to smallest nonzero sum-kernel magnitude over the
/// grid; a proxy for how much cancellation double precision must absorb.
pub fn kernel_dynamic_range(lat: &Lattice64, gamma: f64, alpha: f64, a: f64, n: usize) -> f64 {
    let nu = gamma + alpha - 1.0;
    let z = a + n as f64;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for t in 1..=n {
        let t = a + t as f64;
        if let Ok(w) = lat.gen_power(nu, z, t - 1.0, alpha - 1.0) {
            let w = (w * lat.nabla_x(gamma, t)).abs();
            if w > 0.0 {
                lo = lo.min(w);
                hi = hi.max(w);
            }
        }
    }
    if lo.is_finite() && lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

fn sample_order(rng: &mut ChaCha8Rng, away_from_integers: bool) -> f64 {
    loop {
        let v: f64 = rng.gen_range(0.2..2.5);
        if !away_from_integers || (v - v.round()).abs() > 0.05 {
            return v;
        }
    }
}

fn id_index(id: CheckId) -> usize {
    CheckId::ALL.iter().position(|&x| x == id).expect("id is in the catalog")
}
