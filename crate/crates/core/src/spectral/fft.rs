use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::field::Field;

type PlanKey = (usize, bool);

fn plan_cache() -> &'static Mutex<(FftPlanner<f64>, HashMap<PlanKey, Arc<dyn Fft<f64>>>)> {
    static CACHE: OnceLock<Mutex<(FftPlanner<f64>, HashMap<PlanKey, Arc<dyn Fft<f64>>>)>> =
        OnceLock::new();
    CACHE.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())))
}

/// Cached 1-D plan; `negative_exponent` selects `e^{−2πi jk/N}`.
pub(crate) fn plan(len: usize, negative_exponent: bool) -> Arc<dyn Fft<f64>> {
    let mut guard = plan_cache().lock().expect("fft plan cache poisoned");
    let (planner, plans) = &mut *guard;
    plans
        .entry((len, negative_exponent))
        .or_insert_with(|| {
            let dir = if negative_exponent {
                FftDirection::Forward
            } else {
                FftDirection::Inverse
            };
            planner.plan_fft(len, dir)
        })
        .clone()
}

/// Columns gathered per batch when transforming along a strided axis.
const BATCH: usize = 32;

/// Transforms the `count` lines `base + c + k·stride` (`c < width`) in place.
fn strided_lines(
    data: &mut [Complex64],
    fft: &dyn Fft<f64>,
    len: usize,
    stride: usize,
    base: usize,
    buf: &mut [Complex64],
    scratch: &mut [Complex64],
) {
    let mut c0 = 0;
    while c0 < stride {
        let width = BATCH.min(stride - c0);
        for k in 0..len {
            let row = base + k * stride + c0;
            for (c, v) in data[row..row + width].iter().enumerate() {
                buf[c * len + k] = *v;
            }
        }
        for line in buf[..width * len].chunks_exact_mut(len) {
            fft.process_with_scratch(line, scratch);
        }
        for k in 0..len {
            let row = base + k * stride + c0;
            for (c, v) in data[row..row + width].iter_mut().enumerate() {
                *v = buf[c * len + k];
            }
        }
        c0 += width;
    }
}

/// Unnormalized transform of every axis of an `mⁿ` row-major block.
pub(crate) fn fft_nd(data: &mut [Complex64], points: usize, dim: usize, negative_exponent: bool) {
    debug_assert_eq!(data.len(), points.pow(dim as u32));
    for axis in 0..dim {
        fft_axis(data, points, dim, axis, negative_exponent);
    }
}

/// Unnormalized transform along one spatial axis of consecutive `mⁿ` blocks.
pub(crate) fn fft_axis(data: &mut [Complex64], points: usize, dim: usize, axis: usize, negative_exponent: bool) {
    let fft = plan(points, negative_exponent);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let stride = points.pow((dim - 1 - axis) as u32);
    if stride == 1 {
        for chunk in data.chunks_exact_mut(points) {
            fft.process_with_scratch(chunk, &mut scratch);
        }
        return;
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); BATCH * points];
    let block = stride * points;
    for outer in (0..data.len()).step_by(block) {
        strided_lines(data, fft.as_ref(), points, stride, outer, &mut buf, &mut scratch);
    }
}

/// Unnormalized transform along the slow (time) axis of a `frames × points` block.
pub(crate) fn fft_time(data: &mut [Complex64], frames: usize, points: usize, negative_exponent: bool) {
    let fft = plan(frames, negative_exponent);
    let mut buf = vec![Complex64::new(0.0, 0.0); BATCH * frames];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    strided_lines(data, fft.as_ref(), frames, points, 0, &mut buf, &mut scratch);
}

pub(crate) fn forward_in_place(data: &mut [Complex64], grid: &super::Grid) {
    fft_nd(data, grid.points(), grid.dim(), true);
    let w = grid.cell_volume();
    data.iter_mut().for_each(|v| *v *= w);
}

pub(crate) fn inverse_in_place(data: &mut [Complex64], grid: &super::Grid) {
    fft_nd(data, grid.points(), grid.dim(), false);
    let w = 1.0 / grid.volume();
    data.iter_mut().for_each(|v| *v *= w);
}

/// Discrete `𝓕f(ξ) ≈ Σ_x e^{−iξ·x} f(x) dxⁿ`, frequencies in natural FFT order.
pub fn dft_forward(f: &Field) -> Field {
    let mut v = f.values().to_vec();
    forward_in_place(&mut v, f.grid());
    Field::from_raw(*f.grid(), v)
}

/// Inverse of [`dft_forward`]: `f(x) = L^{−n} Σ_ξ e^{iξ·x} F(ξ)`.
pub fn dft_inverse(spectrum: &Field) -> Field {
    let mut v = spectrum.values().to_vec();
    inverse_in_place(&mut v, spectrum.grid());
    Field::from_raw(*spectrum.grid(), v)
}
