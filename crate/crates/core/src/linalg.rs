//! Small dense helpers shared by the operator layers.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::{CMatrix, CVector};

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Embeds a single-site operator into the chain space. Site `n` (0-based)
/// among `dims`; the last site is the leftmost Kronecker factor.
pub fn embed_site(op: &CMatrix, site: usize, dims: &[usize]) -> CMatrix {
    let mut out = identity(1);
    for m in (0..dims.len()).rev() {
        out = if m == site { kron(&out, op) } else { kron(&out, &identity(dims[m])) };
    }
    out
}

/// Product state with the last site as the leftmost factor.
pub fn product_state(factors: &[CVector]) -> CVector {
    let mut out = CVector::from_element(1, Complex64::new(1.0, 0.0));
    for f in factors.iter().rev() {
        out = out.kronecker(f);
    }
    out
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

/// Frobenius norm of `a - b`.
pub fn distance(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm()
}

/// Eigenvalues of a general complex matrix via the Schur form.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    let schur = nalgebra::Schur::try_new(m.clone(), 1e-15, 10_000).ok_or(Error::NoConvergence { what: "schur" })?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Unit vector spanning (approximately) the kernel of `m - lambda`.
pub fn eigenvector(m: &CMatrix, lambda: Complex64) -> CVector {
    let n = m.nrows();
    let shifted = m - CMatrix::identity(n, n) * lambda;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, s)| if *s < best.1 { (i, *s) } else { best });
    v_t.row(idx).adjoint()
}

/// Eigenvalues grouped into clusters (relative tolerance `tol`), each with an
/// orthonormal basis of the corresponding kernel of `m - lambda`.
pub fn eigen_decomposition(m: &CMatrix, tol: f64) -> Result<Vec<(Complex64, Vec<CVector>)>> {
    let n = m.nrows();
    let mut values = eigenvalues(m)?;
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let scale = values.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    for v in values {
        match clusters.iter_mut().find(|c| (c[0] - v).norm() < tol * scale) {
            Some(c) => c.push(v),
            None => clusters.push(vec![v]),
        }
    }
    let mut out = Vec::with_capacity(clusters.len());
    for cluster in clusters {
        let lambda = cluster.iter().sum::<Complex64>() / cluster.len() as f64;
        let shifted = m - CMatrix::identity(n, n) * lambda;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.ok_or(Error::NoConvergence { what: "svd" })?;
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
        let vectors = order.iter().take(cluster.len()).map(|&i| v_t.row(i).adjoint()).collect();
        out.push((lambda, vectors));
    }
    Ok(out)
}

/// Ratio of extreme singular values.
pub fn condition_number(m: &CMatrix) -> f64 {
    let s = m.clone().singular_values();
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Sine of the angle between the complex lines spanned by `a` and `b`.
pub fn line_angle(a: &CVector, b: &CVector) -> f64 {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    let ah = a / Complex64::new(na, 0.0);
    let bh = b / Complex64::new(nb, 0.0);
    let overlap = bh.dotc(&ah);
    (&ah - &bh * overlap).norm()
}

/// Coefficients of the least-squares polynomial of degree `degree` through
/// `(xs[i], ys[i])`, fitted per coordinate. Row `k` of the result holds the
/// coefficient of `x^k`.
pub fn polyfit(xs: &[f64], ys: &[CVector], degree: usize) -> Result<Vec<CVector>> {
    if xs.len() != ys.len() || xs.len() < degree + 1 {
        return Err(Error::InvalidArgument(format!(
            "polynomial fit of degree {degree} needs at least {} samples, got {}",
            degree + 1,
            xs.len()
        )));
    }
    let scale = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let vander = DMatrix::from_fn(xs.len(), degree + 1, |i, k| (xs[i] / scale).powi(k as i32));
    let pinv = vander
        .pseudo_inverse(1e-13)
        .map_err(|_| Error::Singular { what: "vandermonde" })?;
    let dim = ys[0].len();
    let mut coeffs = vec![CVector::zeros(dim); degree + 1];
    for (k, coeff) in coeffs.iter_mut().enumerate() {
        let factor = scale.powi(-(k as i32));
        for (i, y) in ys.iter().enumerate() {
            *coeff += y * Complex64::new(pinv[(k, i)] * factor, 0.0);
        }
    }
    Ok(coeffs)
}

/// Least-squares slope of `log(ys)` against `log(xs)`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.max(f64::MIN_POSITIVE).ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Column-major flattening of a matrix, for per-entry fits.
pub fn flatten(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}
