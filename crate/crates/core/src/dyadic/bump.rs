//! Smooth radial cutoff `η` and the dyadic shell multipliers built from it.

/// `η ≡ 1` below this radius.
pub const INNER_RADIUS: f64 = 5.0 / 4.0;
/// `η ≡ 0` above this radius.
pub const OUTER_RADIUS: f64 = 8.0 / 5.0;

/// Rate of the glue `g(s) = exp(-1/s)`; chosen so both glue arguments run over `[0, 1]`.
const GLUE_RATE: f64 = 1.0 / (OUTER_RADIUS - INNER_RADIUS);

/// Smooth, non-increasing cutoff with `η(r) = 1` for `r <= 5/4` and `η(r) = 0` for `r >= 8/5`.
pub fn eta(r: f64) -> f64 {
    let r = r.abs();
    if r <= INNER_RADIUS {
        return 1.0;
    }
    if r >= OUTER_RADIUS {
        return 0.0;
    }
    let a = (OUTER_RADIUS - r) * GLUE_RATE;
    let b = (r - INNER_RADIUS) * GLUE_RATE;
    // g(a)/(g(a)+g(b)) = 1/(1 + exp(1/a - 1/b))
    let e = 1.0 / a - 1.0 / b;
    if e > 700.0 {
        0.0
    } else {
        1.0 / (1.0 + e.exp())
    }
}

fn scale(k: i32) -> f64 {
    2f64.powi(k)
}

/// Low-pass multiplier `χ_{≤k}(ξ) = η(|ξ|/2^k)`.
pub fn chi_leq(k: i32, xi: f64) -> f64 {
    eta(xi / scale(k))
}

/// Shell multiplier `χ_k(ξ) = η(|ξ|/2^k) − η(|ξ|/2^{k−1})`.
pub fn chi(k: i32, xi: f64) -> f64 {
    (eta(xi / scale(k)) - eta(xi / scale(k - 1))).max(0.0)
}

/// Widened shell `χ̃_k = Σ_{l=−9n}^{9n} χ_{k+l}`.
pub fn chi_tilde(k: i32, xi: f64, dim: usize) -> f64 {
    let w = 9 * dim as i32;
    (-w..=w).map(|l| chi(k + l, xi)).sum::<f64>().min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_profile_is_monotone_and_bounded() {
        let mut last = 1.0;
        for i in 0..=2000 {
            let r = i as f64 * 1e-3;
            let v = eta(r);
            assert!((0.0..=1.0).contains(&v));
            assert!(v <= last + 1e-15, "not monotone at r = {r}");
            last = v;
        }
        assert_eq!(eta(1.25), 1.0);
        assert_eq!(eta(1.6), 0.0);
        assert!(eta(1.3) > 0.0 && eta(1.3) < 1.0);
    }

    #[test]
    fn shell_is_flat_on_its_core() {
        for k in -3..5 {
            let s = 2f64.powi(k);
            assert_eq!(chi(k, 0.8 * s), 1.0);
            assert_eq!(chi(k, 1.25 * s), 1.0);
            assert_eq!(chi(k, 1.6 * s), 0.0);
            assert_eq!(chi(k, 0.625 * s), 0.0);
        }
    }

    #[test]
    fn shells_telescope_to_one() {
        for i in 1..1000 {
            let xi = 0.5 + i as f64 * 0.03;
            let s: f64 = (-3..12).map(|k| chi(k, xi)).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }
}
