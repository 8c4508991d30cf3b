//! Direct measurement of the Lipschitz ratio of the Duhamel map on pairs of trajectories.

use serde::{Deserialize, Serialize};

use crate::dyadic::lebesgue::norm_mixed;
use crate::error::Result;
use crate::field::{ComplexField, CurrentField};
use crate::gl::picard::{dyadic_difference_norm, free_trajectory, picard_map, PicardConfig};

/// Differences below this fraction of the trajectory size are rounding noise and not recorded.
pub const ROUNDING_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub eps: f64,
    /// `‖Ψ(u₁) − Ψ(u₂)‖ / ‖u₁ − u₂‖` in `L^∞_t L²_x`, one per recorded iteration.
    pub ratios_linf_l2: Vec<f64>,
    /// The same ratios in `F^{n/2} + Z^{n/2}` (empty when not resolvable).
    pub ratios_dyadic: Vec<f64>,
    pub diffs_linf_l2: Vec<f64>,
    /// Last recorded ratio, in the dyadic norm when available.
    pub asymptotic: Option<f64>,
    pub asymptotic_norm: String,
}

/// Applies `Ψ_{u0_shared}` repeatedly to the free evolutions of `u0_shared` and
/// `u0_shared + u0_a`, recording how much each application shrinks their difference.
pub fn measure_contraction(
    u0_a: &ComplexField,
    u0_shared: &ComplexField,
    v: &CurrentField,
    cfg: &PicardConfig,
    iters: usize,
) -> Result<ContractionReport> {
    let mut u1 = free_trajectory(u0_shared, cfg.dt, cfg.slices, cfg.eps)?;
    let mut u2 = free_trajectory(&u0_shared.add(u0_a)?, cfg.dt, cfg.slices, cfg.eps)?;
    let mut rep = ContractionReport {
        eps: cfg.eps,
        ratios_linf_l2: Vec::new(),
        ratios_dyadic: Vec::new(),
        diffs_linf_l2: Vec::new(),
        asymptotic: None,
        asymptotic_norm: String::new(),
    };
    let diff = u1.sub(&u2)?;
    let mut d = norm_mixed(&diff, f64::INFINITY, 2.0)?;
    let mut dz = if cfg.track_dyadic { dyadic_difference_norm(&diff)? } else { None };
    rep.diffs_linf_l2.push(d);
    for _ in 0..iters {
        let size = norm_mixed(&u1, f64::INFINITY, 2.0)?.max(norm_mixed(&u2, f64::INFINITY, 2.0)?);
        if !(d > ROUNDING_FLOOR * size) {
            break;
        }
        let n1 = picard_map(&u1, u0_shared, v, cfg.eps, cfg.coupling)?;
        let n2 = picard_map(&u2, u0_shared, v, cfg.eps, cfg.coupling)?;
        let nd = n1.sub(&n2)?;
        let d_new = norm_mixed(&nd, f64::INFINITY, 2.0)?;
        if !d_new.is_finite() {
            break;
        }
        rep.ratios_linf_l2.push(d_new / d);
        rep.diffs_linf_l2.push(d_new);
        if let Some(prev) = dz {
            if let Some(now) = dyadic_difference_norm(&nd)? {
                if prev > 0.0 {
                    rep.ratios_dyadic.push(now / prev);
                }
                dz = Some(now);
            }
        }
        u1 = n1;
        u2 = n2;
        d = d_new;
    }
    if let Some(&r) = rep.ratios_dyadic.last() {
        rep.asymptotic = Some(r);
        rep.asymptotic_norm = "F+Z".into();
    } else if let Some(&r) = rep.ratios_linf_l2.last() {
        rep.asymptotic = Some(r);
        rep.asymptotic_norm = "Linf-L2".into();
    }
    Ok(rep)
}
