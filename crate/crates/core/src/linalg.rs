//! Dense complex matrix helpers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Below this size the full SVD is cheap enough.
const DENSE_SVD_MAX: usize = 96;

/// Largest singular value.
///
/// Small matrices use a full SVD. Larger ones run Lanczos with full
/// reorthogonalisation on `A^H A`, which only needs matrix-vector products.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let b = a.map(|v| v / scale);
    let s = if b.ncols() <= DENSE_SVD_MAX {
        b.singular_values().max()
    } else {
        lanczos_top_singular(&b)
    };
    s * scale
}

fn lanczos_top_singular(a: &CMatrix) -> f64 {
    let n = a.ncols();
    let kmax = n.min(120);
    let ah = a.adjoint();
    // Deterministic start with weight on every basis vector.
    let mut q = DVector::from_fn(n, |i, _| Complex64::new(1.0 + (i as f64 * 0.618).fract(), (i as f64 * 0.414).fract()));
    q /= Complex64::new(q.norm(), 0.0);
    let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(kmax);
    let (mut alphas, mut betas) = (Vec::with_capacity(kmax), Vec::with_capacity(kmax));
    let mut last = 0.0f64;
    let mut stable = 0;
    for k in 0..kmax {
        let mut v = &ah * (a * &q);
        let alpha = q.dotc(&v).re;
        basis.push(q.clone());
        alphas.push(alpha);
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&v);
                v.axpy(-c, b, Complex64::new(1.0, 0.0));
            }
        }
        let beta = v.norm();
        let top = tridiagonal_top(&alphas, &betas);
        if (top - last).abs() <= 1e-15 * top.abs() {
            stable += 1;
            if stable >= 3 {
                return top.max(0.0).sqrt();
            }
        } else {
            stable = 0;
        }
        last = top;
        if beta <= 1e-13 * top.abs().max(1e-300) || k + 1 == kmax {
            break;
        }
        betas.push(beta);
        q = v / Complex64::new(beta, 0.0);
    }
    if basis.len() == kmax && kmax < n && stable < 3 {
        return a.singular_values().max();
    }
    last.max(0.0).sqrt()
}

fn tridiagonal_top(alphas: &[f64], betas: &[f64]) -> f64 {
    let k = alphas.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    });
    t.symmetric_eigenvalues().max()
}

/// Complex product through four real products, which hit the fast real
/// kernel.
pub fn cmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ai) = (a.map(|v| v.re), a.map(|v| v.im));
    let (br, bi) = (b.map(|v| v.re), b.map(|v| v.im));
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    CMatrix::from_fn(a.nrows(), b.ncols(), |i, j| Complex64::new(re[(i, j)], im[(i, j)]))
}

/// `a^n` by repeated squaring.
pub fn matrix_power(a: &CMatrix, n: usize) -> CMatrix {
    let mut result = CMatrix::identity(a.nrows(), a.ncols());
    let mut base = a.clone();
    let mut k = n;
    let mut first = true;
    while k > 0 {
        if k & 1 == 1 {
            result = if first { base.clone() } else { cmul(&result, &base) };
            first = false;
        }
        k >>= 1;
        if k > 0 {
            base = cmul(&base, &base);
        }
    }
    result
}

/// `diag(d) a diag(d)^-1`.
pub fn similarity_diag(a: &CMatrix, d: &[f64]) -> CMatrix {
    CMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * (d[i] / d[j]))
}

/// Leading `n x n` block.
pub fn leading_block(a: &CMatrix, n: usize) -> CMatrix {
    a.view((0, 0), (n, n)).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sample(n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |i, j| {
            Complex64::new(((i * 7 + j * 3) % 11) as f64 / 11.0 - 0.4, ((i + 5 * j) % 13) as f64 / 13.0 - 0.5)
        })
    }

    #[test]
    fn lanczos_matches_svd() {
        for n in [100, 160] {
            let a = sample(n);
            let want = a.singular_values().max();
            assert!((spectral_norm(&a) - want).abs() < 1e-12 * want, "n={n}");
        }
        let d = CMatrix::from_diagonal(&DVector::from_fn(200, |i, _| c(1.0 - i as f64 * 1e-4)));
        assert!((spectral_norm(&d) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn real_split_product() {
        let (a, b) = (sample(40), sample(40).transpose());
        assert!((cmul(&a, &b) - &a * &b).norm() < 1e-11);
    }

    #[test]
    fn diagonal_power() {
        let a = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(0.5), c(0.25)]));
        let p = matrix_power(&a, 3);
        let want = [1.0, 1.0 / 8.0, 1.0 / 64.0];
        for i in 0..3 {
            assert!((p[(i, i)] - c(want[i])).norm() < 1e-15);
        }
        let id = CMatrix::identity(4, 4);
        assert_eq!(matrix_power(&id, 17), id);
    }

    #[test]
    fn norm_of_rank_one() {
        // u v^H has norm |u| |v|.
        let u = [c(1.0), Complex64::new(0.0, 2.0)];
        let v = [c(3.0), c(4.0)];
        let a = CMatrix::from_fn(2, 2, |i, j| u[i] * v[j].conj());
        assert!((spectral_norm(&a) - 5f64.sqrt() * 5.0).abs() < 1e-12);
    }

    #[test]
    fn power_matches_repeated_product() {
        let a = CMatrix::from_fn(5, 5, |i, j| Complex64::new((i + 2 * j) as f64 * 0.05, (i as f64 - j as f64) * 0.03));
        let mut want = CMatrix::identity(5, 5);
        for _ in 0..7 {
            want = &want * &a;
        }
        assert!((matrix_power(&a, 7) - want).norm() < 1e-12);
    }
}
