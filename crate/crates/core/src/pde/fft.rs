//! Square 2-D FFT built from 1-D rustfft plans: rows, transpose, rows,
//! transpose. Rows are independent and go through [`ExecPolicy`].

use crate::exec::ExecPolicy;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Clone)]
pub struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    policy: ExecPolicy,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("n", &self.n).finish()
    }
}

impl Fft2 {
    pub fn new(n: usize, policy: ExecPolicy) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            policy,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn rows(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let len = plan.get_inplace_scratch_len();
        self.policy.for_each_chunk_mut(data, self.n, |_, row| {
            let mut scratch = vec![Complex64::new(0.0, 0.0); len];
            plan.process_with_scratch(row, &mut scratch);
        });
    }

    fn transpose(&self, data: &mut [Complex64], buf: &mut [Complex64]) {
        let n = self.n;
        {
            let src: &[Complex64] = data;
            self.policy.for_each_chunk_mut(buf, n, |j, row| {
                for (i, v) in row.iter_mut().enumerate() {
                    *v = src[i * n + j];
                }
            });
        }
        data.copy_from_slice(buf);
    }

    /// Unnormalized forward transform, `u_hat[k] = sum u[x] exp(-2 pi i k.x)`.
    pub fn forward(&self, data: &mut [Complex64]) {
        let mut buf = vec![Complex64::new(0.0, 0.0); data.len()];
        self.rows(data, &self.forward);
        self.transpose(data, &mut buf);
        self.rows(data, &self.forward);
        self.transpose(data, &mut buf);
    }

    /// Inverse transform including the `1/n^2` factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        let mut buf = vec![Complex64::new(0.0, 0.0); data.len()];
        self.rows(data, &self.inverse);
        self.transpose(data, &mut buf);
        self.rows(data, &self.inverse);
        self.transpose(data, &mut buf);
        let s = 1.0 / (self.n * self.n) as f64;
        data.iter_mut().for_each(|v| *v *= s);
    }
}

/// Signed integer wavenumber of FFT index `m`.
pub fn wavenumber(m: usize, n: usize) -> f64 {
    if m <= n / 2 {
        m as f64
    } else {
        m as f64 - n as f64
    }
}

/// `|2 pi k|^2` for every mode, in the grid's row-major order.
pub fn laplacian_symbol(n: usize) -> Vec<f64> {
    (0..n * n)
        .map(|k| {
            let kx = 2.0 * PI * wavenumber(k / n, n);
            let ky = 2.0 * PI * wavenumber(k % n, n);
            kx * kx + ky * ky
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_single_mode() {
        let n = 16;
        let f = Fft2::new(n, ExecPolicy::Parallel);
        let mut u: Vec<Complex64> = (0..n * n)
            .map(|k| {
                let (i, j) = ((k / n) as f64, (k % n) as f64);
                Complex64::from_polar(1.0, 2.0 * PI * (2.0 * i - 3.0 * j) / n as f64)
            })
            .collect();
        let orig = u.clone();
        f.forward(&mut u);
        // all the mass sits at (2, -3)
        let peak = 2 * n + (n - 3);
        assert!((u[peak] - Complex64::new((n * n) as f64, 0.0)).norm() < 1e-9);
        let rest: f64 = u
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != peak)
            .map(|(_, v)| v.norm())
            .sum();
        assert!(rest < 1e-9);
        f.inverse(&mut u);
        for (a, b) in u.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn policies_agree_bitwise() {
        let n = 32;
        let mut a: Vec<Complex64> = (0..n * n)
            .map(|k| Complex64::new((k as f64).sin(), (k as f64 * 0.3).cos()))
            .collect();
        let mut b = a.clone();
        Fft2::new(n, ExecPolicy::Sequential).forward(&mut a);
        Fft2::new(n, ExecPolicy::Parallel).forward(&mut b);
        assert_eq!(a, b);
    }

    #[test]
    fn symbol_of_lowest_modes() {
        let l = laplacian_symbol(8);
        assert_eq!(l[0], 0.0);
        assert!((l[1] - 4.0 * PI * PI).abs() < 1e-12);
        assert!((l[7] - 4.0 * PI * PI).abs() < 1e-12);
        assert!((l[9] - 8.0 * PI * PI).abs() < 1e-12);
    }
}
