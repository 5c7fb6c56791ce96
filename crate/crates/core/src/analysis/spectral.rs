use alloc::vec::Vec;

use super::AnalysisError;

const TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 100;
const MAX_DIM: usize = 64;

/// Eigenvalues of a symmetric `d × d` matrix (row-major), ascending, by
/// cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(a: &[f64], d: usize) -> Result<Vec<f64>, AnalysisError> {
    if a.len() != d * d {
        return Err(AnalysisError::InvalidArgument(alloc::format!(
            "expected {} entries for a {d}x{d} matrix, got {}",
            d * d,
            a.len()
        )));
    }
    if d > MAX_DIM {
        return Err(AnalysisError::TooLarge(d));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(AnalysisError::NonFiniteInput);
    }
    let mut a = a.to_vec();
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * d + j] * a[i * d + j])
            .sum();
        if libm::sqrt(off) < TOL {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[p * d + q];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[p * d + p], a[q * d + q]);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..d {
                    let (akp, akq) = (a[k * d + p], a[k * d + q]);
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let (apk, aqk) = (a[p * d + k], a[q * d + k]);
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..d).map(|i| a[i * d + i]).collect();
    eig.sort_unstable_by(f64::total_cmp);
    Ok(eig)
}

/// Largest singular value of a square `d × d` matrix `g` (row-major):
/// `λ_max(gᵀg)^(1/2)`.
pub fn spectral_norm(g: &[f64], d: usize) -> Result<f64, AnalysisError> {
    if g.len() != d * d {
        return Err(AnalysisError::InvalidArgument(alloc::format!(
            "expected {} entries for a {d}x{d} matrix, got {}",
            d * d,
            g.len()
        )));
    }
    if d == 0 {
        return Ok(0.0);
    }
    let mut gtg = alloc::vec![0.0; d * d];
    for i in 0..d {
        for j in i..d {
            let v: f64 = (0..d).map(|r| g[r * d + i] * g[r * d + j]).sum();
            gtg[i * d + j] = v;
            gtg[j * d + i] = v;
        }
    }
    let eig = jacobi_eigenvalues(&gtg, d)?;
    Ok(libm::sqrt(eig[d - 1].max(0.0)))
}
