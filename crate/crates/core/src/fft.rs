//! Cached rustfft plans and strided multi-axis transforms.
//!
//! All transforms here are unitary: each 1-D pass is scaled by `1/sqrt(len)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

fn plans(len: usize) -> PlanPair {
    static CACHE: OnceLock<Mutex<HashMap<usize, PlanPair>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(len)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(len), planner.plan_fft_inverse(len))
        })
        .clone()
}

/// Unitary 1-D transform of every line of length `len` laid out with `stride`
/// inside blocks of `len * stride` contiguous values.
pub fn transform_strided(data: &mut [Complex64], len: usize, stride: usize, inverse: bool) {
    if len <= 1 {
        return;
    }
    let (fwd, inv) = plans(len);
    let plan = if inverse { inv } else { fwd };
    let scale = 1.0 / (len as f64).sqrt();
    let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
    if stride == 1 {
        plan.process_with_scratch(data, &mut scratch);
        data.iter_mut().for_each(|z| *z *= scale);
        return;
    }
    let block = len * stride;
    let mut buf = vec![Complex64::new(0.0, 0.0); block];
    for chunk in data.chunks_mut(block) {
        // transpose so each line is contiguous
        for k in 0..len {
            for j in 0..stride {
                buf[j * len + k] = chunk[k * stride + j];
            }
        }
        plan.process_with_scratch(&mut buf, &mut scratch);
        for k in 0..len {
            for j in 0..stride {
                chunk[k * stride + j] = buf[j * len + k] * scale;
            }
        }
    }
}

/// Unitary transform along one axis of a cubic `n^dim` array.
pub fn transform_axis(data: &mut [Complex64], dim: usize, n: usize, axis: usize, inverse: bool) {
    let stride = n.pow((dim - 1 - axis) as u32);
    transform_strided(data, n, stride, inverse);
}

/// Unitary transform along every axis of a cubic `n^dim` array.
pub fn transform_nd(data: &mut [Complex64], dim: usize, n: usize, inverse: bool) {
    for axis in (0..dim).rev() {
        transform_axis(data, dim, n, axis, inverse);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strided_matches_naive_dft() {
        let len = 6;
        let stride = 3;
        let data: Vec<Complex64> =
            (0..len * stride).map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.7).cos())).collect();
        let mut out = data.clone();
        transform_strided(&mut out, len, stride, false);
        for j in 0..stride {
            for k in 0..len {
                let mut acc = Complex64::new(0.0, 0.0);
                for m in 0..len {
                    let ang = -2.0 * std::f64::consts::PI * (k * m) as f64 / len as f64;
                    acc += data[m * stride + j] * Complex64::from_polar(1.0, ang);
                }
                acc /= (len as f64).sqrt();
                assert!((acc - out[k * stride + j]).norm() < 1e-12);
            }
        }
    }
}
