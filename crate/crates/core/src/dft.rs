//! Unitary DFT pair used by the OFDM modulator and demodulator.
//!
//! Both directions carry a `1/sqrt(N)` factor:
//!
//! ```text
//! inverse: x(n) = 1/sqrt(N) * sum_k X(k) e^{+j 2 pi k n / N}
//! forward: Y(k) = 1/sqrt(N) * sum_n x(n) e^{-j 2 pi k n / N}
//! ```
//!
//! The transform is an iterative radix-2 decimation-in-time FFT.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Precomputed twiddles and bit-reversal permutation for one length.
#[derive(Debug, Clone)]
pub struct DftPlan {
    len: usize,
    twiddles: Vec<Complex64>,
    reversed: Vec<usize>,
    scale: f64,
}

impl DftPlan {
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let bits = len.trailing_zeros();
        let reversed = (0..len)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        // Forward twiddles e^{-j 2 pi t / N}; the inverse conjugates them.
        let twiddles = (0..len / 2)
            .map(|t| Complex64::from_polar(1.0, -2.0 * PI * t as f64 / len as f64))
            .collect();
        Ok(DftPlan {
            len,
            twiddles,
            reversed,
            scale: 1.0 / (len as f64).sqrt(),
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Transforms `buf` in place.
    pub fn process(&self, buf: &mut [Complex64], direction: Direction) -> Result<()> {
        if buf.len() != self.len {
            return Err(Error::BadLength {
                expected: self.len,
                actual: buf.len(),
            });
        }
        for i in 0..self.len {
            let j = self.reversed[i];
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < self.len {
            let stride = self.len / (2 * half);
            for start in (0..self.len).step_by(2 * half) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if direction == Direction::Inverse {
                        w = w.conj();
                    }
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            half *= 2;
        }
        for v in buf.iter_mut() {
            *v *= self.scale;
        }
        Ok(())
    }

    pub fn transform(&self, input: &[Complex64], direction: Direction) -> Result<Vec<Complex64>> {
        let mut buf = input.to_vec();
        self.process(&mut buf, direction)?;
        Ok(buf)
    }
}

/// One-off transform; prefer a [`DftPlan`] when transforming many blocks.
pub fn dft(input: &[Complex64], direction: Direction) -> Result<Vec<Complex64>> {
    DftPlan::new(input.len())?.transform(input, direction)
}
