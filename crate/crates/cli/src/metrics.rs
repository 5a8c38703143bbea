//! Reconstruction quality in decibels. A perfect reconstruction is reported as
//! `f64::INFINITY`, printed as `inf`.

use dtam_core::matrix::norm2;
use dtam_core::{Error, Result};

/// `||d - d̂|| <= EXACT_TOL · ||d||` counts as exact.
pub const EXACT_TOL: f64 = 1e-12;

/// `20 log10(||d|| / ||d - d̂||)`.
pub fn snr(d: &[f64], dhat: &[f64]) -> Result<f64> {
    if d.len() != dhat.len() {
        return Err(Error::Dimension("signals differ in length".into()));
    }
    let scale = norm2(d);
    if scale == 0.0 {
        return Err(Error::InvalidArgument("reference signal is zero".into()));
    }
    let err = d.iter().zip(dhat).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    if err <= EXACT_TOL * scale {
        return Ok(f64::INFINITY);
    }
    Ok(20.0 * (scale / err).log10())
}

/// `20 log10(255 / sqrt(MSE))` for data on the 0-255 scale.
pub fn psnr(img: &[f64], imghat: &[f64]) -> Result<f64> {
    if img.is_empty() {
        return Err(Error::InvalidArgument("empty image".into()));
    }
    if img.len() != imghat.len() {
        return Err(Error::Dimension("images differ in size".into()));
    }
    let mse = img.iter().zip(imghat).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / img.len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(20.0 * (255.0 / mse.sqrt()).log10())
}

pub fn format_db(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        format!("{v:.2}")
    }
}
