//! Periodic orthonormal 1-D discrete wavelet transform (Haar and Daubechies-4).
//!
//! Coefficients are laid out coarsest first: `[a_L, d_L, d_{L-1}, ..., d_1]`.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveletFamily {
    Haar,
    Db2,
}

impl std::str::FromStr for WaveletFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "haar" => Ok(Self::Haar),
            "db2" => Ok(Self::Db2),
            other => Err(Error::Parse(format!("unknown wavelet `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WaveletSpec {
    pub family: WaveletFamily,
    pub levels: usize,
}

impl WaveletSpec {
    pub fn new(family: WaveletFamily, levels: usize) -> Self {
        Self { family, levels }
    }

    pub fn check_length(&self, len: usize) -> Result<()> {
        if self.levels == 0 {
            return Err(Error::InvalidArgument("at least one level is required".into()));
        }
        let block = 1usize
            .checked_shl(self.levels as u32)
            .ok_or_else(|| Error::InvalidArgument("too many levels".into()))?;
        if len == 0 || !len.is_multiple_of(block) {
            return Err(Error::Dimension(format!(
                "length {len} is not a positive multiple of 2^{}",
                self.levels
            )));
        }
        Ok(())
    }

    fn lowpass(&self) -> Vec<f64> {
        match self.family {
            WaveletFamily::Haar => vec![std::f64::consts::FRAC_1_SQRT_2; 2],
            WaveletFamily::Db2 => {
                let s3 = 3f64.sqrt();
                let d = 4.0 * std::f64::consts::SQRT_2;
                vec![(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d]
            }
        }
    }
}

/// Quadrature mirror of `h`: `g[j] = (-1)^j h[L-1-j]`.
fn highpass(h: &[f64]) -> Vec<f64> {
    let l = h.len();
    (0..l)
        .map(|j| if j % 2 == 0 { h[l - 1 - j] } else { -h[l - 1 - j] })
        .collect()
}

fn analysis_step(x: &[f64], h: &[f64], g: &[f64], out: &mut [f64]) {
    let n = x.len();
    let half = n / 2;
    for i in 0..half {
        let (mut a, mut d) = (0.0, 0.0);
        for (j, (hj, gj)) in h.iter().zip(g).enumerate() {
            let v = x[(2 * i + j) % n];
            a += hj * v;
            d += gj * v;
        }
        out[i] = a;
        out[half + i] = d;
    }
}

fn synthesis_step(c: &[f64], h: &[f64], g: &[f64], out: &mut [f64]) {
    let n = c.len();
    let half = n / 2;
    out.iter_mut().for_each(|v| *v = 0.0);
    for i in 0..half {
        for (j, (hj, gj)) in h.iter().zip(g).enumerate() {
            out[(2 * i + j) % n] += hj * c[i] + gj * c[half + i];
        }
    }
}

/// Multi-level analysis coefficients of `signal`.
pub fn dwt(signal: &[f64], spec: &WaveletSpec) -> Result<Vec<f64>> {
    spec.check_length(signal.len())?;
    let h = spec.lowpass();
    let g = highpass(&h);
    let mut out = signal.to_vec();
    let mut buf = vec![0.0; signal.len()];
    let mut len = signal.len();
    for _ in 0..spec.levels {
        analysis_step(&out[..len], &h, &g, &mut buf[..len]);
        out[..len].copy_from_slice(&buf[..len]);
        len /= 2;
    }
    Ok(out)
}

/// Inverse of [`dwt`].
pub fn idwt(coeffs: &[f64], spec: &WaveletSpec) -> Result<Vec<f64>> {
    spec.check_length(coeffs.len())?;
    let h = spec.lowpass();
    let g = highpass(&h);
    let mut out = coeffs.to_vec();
    let mut buf = vec![0.0; coeffs.len()];
    let mut len = coeffs.len() >> spec.levels;
    for _ in 0..spec.levels {
        len *= 2;
        synthesis_step(&out[..len], &h, &g, &mut buf[..len]);
        out[..len].copy_from_slice(&buf[..len]);
    }
    Ok(out)
}

/// The `n × n` analysis matrix `Φ` with `Φ x = dwt(x)`; column `j` is `dwt(e_j)`.
pub fn analysis_matrix(n: usize, spec: &WaveletSpec) -> Result<DenseMatrix> {
    spec.check_length(n)?;
    let mut data = Vec::with_capacity(n * n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        data.extend(dwt(&e, spec)?);
        e[j] = 0.0;
    }
    DenseMatrix::new(n, n, data)
}

/// `B Φᵀ`, whose column `j` is `B · idwt(e_j)`; measuring `d` through `B` equals
/// measuring its coefficients `Φ d` through this matrix.
pub fn synthesis_sensing_matrix(b: &DenseMatrix, spec: &WaveletSpec) -> Result<DenseMatrix> {
    let n = b.cols();
    spec.check_length(n)?;
    let mut cols = Vec::with_capacity(n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        cols.push(b.matvec(&idwt(&e, spec)?)?);
        e[j] = 0.0;
    }
    DenseMatrix::from_columns(&cols)
}
