//! Cyclic Jacobi eigen-decomposition for the small symmetric systems the
//! fitting-based estimators produce (3x3 scatter and 4x4 normal matrices).

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 50;
const OFF_DIAG_TOL: f64 = 1e-15;

fn frobenius<const D: usize>(m: &[[f64; D]; D]) -> f64 {
    m.iter()
        .flat_map(|r| r.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

fn off_diag_norm<const D: usize>(m: &[[f64; D]; D]) -> f64 {
    let mut s = 0.0;
    for i in 0..D {
        for j in 0..D {
            if i != j {
                s += m[i][j] * m[i][j];
            }
        }
    }
    s.sqrt()
}

/// Eigenvalues and eigenvectors (columns of the returned matrix) of a
/// symmetric matrix, unsorted. Tolerance is relative to the Frobenius norm so
/// the factorization is invariant to a global scale on the input.
pub fn sym_eigen<const D: usize>(m: &[[f64; D]; D]) -> Result<([f64; D], [[f64; D]; D])> {
    let scale = frobenius(m);
    let sym_tol = 1e-9 * scale.max(1.0);
    for i in 0..D {
        for j in i + 1..D {
            if (m[i][j] - m[j][i]).abs() > sym_tol {
                return Err(Error::invalid(format!(
                    "matrix is not symmetric: m[{i}][{j}]={} vs m[{j}][{i}]={}",
                    m[i][j], m[j][i]
                )));
            }
        }
    }

    let mut a = *m;
    // Symmetrize exactly so rotations stay consistent.
    for i in 0..D {
        for j in i + 1..D {
            let avg = 0.5 * (a[i][j] + a[j][i]);
            a[i][j] = avg;
            a[j][i] = avg;
        }
    }
    let mut v = [[0.0; D]; D];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    if scale == 0.0 {
        let mut l = [0.0; D];
        for i in 0..D {
            l[i] = a[i][i];
        }
        return Ok((l, v));
    }

    let tol = OFF_DIAG_TOL * scale;
    for _ in 0..MAX_SWEEPS {
        if off_diag_norm(&a) < tol {
            break;
        }
        for p in 0..D {
            for q in p + 1..D {
                let apq = a[p][q];
                // Rotate unless the entry is already negligible at machine
                // precision relative to its diagonal pair; stopping earlier
                // leaves eigenvector residuals well above 1e-6 degrees.
                if apq.abs() <= f64::EPSILON * (a[p][p].abs() + a[q][q].abs()) {
                    continue;
                }
                // Classic Jacobi rotation annihilating a[p][q].
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..D {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..D {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..D {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut l = [0.0; D];
    for i in 0..D {
        l[i] = a[i][i];
    }
    Ok((l, v))
}

/// Unit eigenvector of the smallest eigenvalue. Ties (eigenvalues equal
/// within the factorization tolerance) break deterministically: among the
/// tied candidates, pick the one whose first nonzero component has the
/// largest magnitude, then flip so that component is positive.
pub fn smallest_eigenvector_sym<const D: usize>(m: &[[f64; D]; D]) -> Result<[f64; D]> {
    let (l, v) = sym_eigen(m)?;
    let scale = frobenius(m);
    let lmin = l.iter().cloned().fold(f64::INFINITY, f64::min);
    let tie_tol = OFF_DIAG_TOL * scale.max(1.0);

    let mut best: Option<(usize, usize, f64)> = None; // (col, first_nz_row, |component|)
    for (col, &lam) in l.iter().enumerate() {
        if lam > lmin + tie_tol {
            continue;
        }
        let first_nz = (0..D).find(|&r| v[r][col] != 0.0).unwrap_or(0);
        let mag = v[first_nz][col].abs();
        let better = match best {
            None => true,
            Some((_, _, m0)) => mag > m0,
        };
        if better {
            best = Some((col, first_nz, mag));
        }
    }
    let (col, first_nz, _) = best.expect("at least one eigenvalue");
    let mut out = [0.0; D];
    for r in 0..D {
        out[r] = v[r][col];
    }
    if out[first_nz] < 0.0 {
        for x in &mut out {
            *x = -*x;
        }
    }
    // Jacobi keeps columns orthonormal; renormalize to tidy roundoff.
    let n = out.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        for x in &mut out {
            *x /= n;
        }
    }
    Ok(out)
}
