//! Eigenvalue routines: cyclic Jacobi for symmetric matrices and a
//! Householder-Hessenberg reduction followed by the classic Francis
//! double-shift QR iteration (EISPACK `hqr` lineage) for real nonsymmetric
//! spectra. Only eigenvalues are needed from the nonsymmetric path.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{cast, Scalar};

/// Symmetric eigendecomposition M = V·diag(values)·Vᵀ, values ascending.
#[derive(Debug, Clone)]
pub struct SymEigen<T> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

/// Cyclic Jacobi for symmetric matrices. Input symmetry is the caller's
/// responsibility; only the upper triangle is trusted.
pub fn sym_eigen<T: Scalar>(m: &Matrix<T>) -> Result<SymEigen<T>> {
    m.require_square()?;
    let n = m.rows();
    let mut a = m.clone();
    // Mirror the upper triangle so stale lower entries cannot leak in.
    for i in 0..n {
        for j in 0..i {
            a[(i, j)] = a[(j, i)];
        }
    }
    let mut v = Matrix::identity(n);
    let eps = T::epsilon();
    let scale = a.max_abs().max(T::min_positive_value());
    let mut converged = n == 1;
    for _ in 0..100 {
        if converged {
            break;
        }
        let mut off = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                off = off.max(a[(i, j)].abs());
            }
        }
        if off <= eps * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= eps * eps * scale {
                    continue;
                }
                // Rotation annihilating a_pq (rational form, numerically
                // stable for |theta| large).
                let theta = (a[(q, q)] - a[(p, p)]) / (cast::<T>(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                let tau = s / (T::one() + c);
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();
                for r in 0..n {
                    if r != p && r != q {
                        let arp = a[(r, p)];
                        let arq = a[(r, q)];
                        a[(r, p)] = arp - s * (arq + tau * arp);
                        a[(r, q)] = arq + s * (arp - tau * arq);
                        a[(p, r)] = a[(r, p)];
                        a[(q, r)] = a[(r, q)];
                    }
                }
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = vrp - s * (vrq + tau * vrp);
                    v[(r, q)] = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }
    if !converged {
        return Err(Error::EigenNoConvergence);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymEigen { values, vectors })
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn sym_min_eigenvalue<T: Scalar>(m: &Matrix<T>) -> Result<T> {
    Ok(sym_eigen(m)?.values[0])
}

/// Eigenvalues of a general real square matrix as (re, im) pairs, sorted by
/// descending real part.
pub fn eigenvalues<T: Scalar>(m: &Matrix<T>) -> Result<Vec<(T, T)>> {
    m.require_square()?;
    let mut h = hessenberg(m);
    let mut eigs = francis_qr(&mut h)?;
    eigs.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite eigenvalues"));
    Ok(eigs)
}

/// Largest real part over the spectrum.
pub fn spectral_abscissa<T: Scalar>(m: &Matrix<T>) -> Result<T> {
    Ok(eigenvalues(m)?[0].0)
}

/// Householder reduction to upper Hessenberg form (similarity transform;
/// eigenvalues preserved). Entries below the subdiagonal are zeroed.
fn hessenberg<T: Scalar>(a: &Matrix<T>) -> Matrix<T> {
    let n = a.rows();
    let mut h = a.clone();
    if n <= 2 {
        return h;
    }
    let mut ort = vec![T::zero(); n];
    for m in 1..n - 1 {
        let mut scale = T::zero();
        for i in m..n {
            scale += h[(i, m - 1)].abs();
        }
        if scale == T::zero() {
            continue;
        }
        let mut hsum = T::zero();
        for i in (m..n).rev() {
            ort[i] = h[(i, m - 1)] / scale;
            hsum += ort[i] * ort[i];
        }
        let mut g = hsum.sqrt();
        if ort[m] > T::zero() {
            g = -g;
        }
        hsum -= ort[m] * g;
        ort[m] -= g;
        // Similarity H ← P H P with P = I − u uᵀ / hsum.
        for j in m..n {
            let mut f = T::zero();
            for i in (m..n).rev() {
                f += ort[i] * h[(i, j)];
            }
            f /= hsum;
            for i in m..n {
                let o = ort[i];
                h[(i, j)] -= f * o;
            }
        }
        for i in 0..n {
            let mut f = T::zero();
            for j in (m..n).rev() {
                f += ort[j] * h[(i, j)];
            }
            f /= hsum;
            for j in m..n {
                let o = ort[j];
                h[(i, j)] -= f * o;
            }
        }
        h[(m, m - 1)] = scale * g;
    }
    // The transform leaves numerically-zero residue below the subdiagonal.
    for i in 2..n {
        for j in 0..i - 1 {
            h[(i, j)] = T::zero();
        }
    }
    h
}

/// Francis implicit double-shift QR on an upper Hessenberg matrix. Ported
/// from the EISPACK `hqr` control flow with signed work indices.
#[allow(clippy::many_single_char_names)]
fn francis_qr<T: Scalar>(hm: &mut Matrix<T>) -> Result<Vec<(T, T)>> {
    let nn = hm.rows();
    let at = |h: &Matrix<T>, i: i64, j: i64| h[(i as usize, j as usize)];
    let eps = T::epsilon();

    let mut wr = vec![T::zero(); nn];
    let mut wi = vec![T::zero(); nn];

    let mut norm = T::zero();
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += hm[(i, j)].abs();
        }
    }

    let low: i64 = 0;
    let mut en: i64 = nn as i64 - 1;
    let mut t = T::zero();
    let mut itn: i64 = 30 * nn as i64;

    'outer: while en >= low {
        let mut its = 0;
        let na = en - 1;
        let enm2 = na - 1;
        loop {
            // Find the smallest l with a negligible subdiagonal entry.
            let mut l = en;
            while l > low {
                let mut s = at(hm, l - 1, l - 1).abs() + at(hm, l, l).abs();
                if s == T::zero() {
                    s = norm;
                }
                if at(hm, l, l - 1).abs() <= eps * s {
                    break;
                }
                l -= 1;
            }

            let mut x = at(hm, en, en);
            if l == en {
                // Single real root.
                wr[en as usize] = x + t;
                wi[en as usize] = T::zero();
                en -= 1;
                continue 'outer;
            }
            let mut y = at(hm, na, na);
            let mut w = at(hm, en, na) * at(hm, na, en);
            if l == na {
                // A 2×2 block splits off.
                let p = (y - x) / cast::<T>(2.0);
                let q = p * p + w;
                let zz = q.abs().sqrt();
                let x = x + t;
                if q >= T::zero() {
                    // Real pair.
                    let zz = if p >= T::zero() { p + zz } else { p - zz };
                    wr[na as usize] = x + zz;
                    wr[en as usize] = if zz == T::zero() { x + zz } else { x - w / zz };
                    wi[na as usize] = T::zero();
                    wi[en as usize] = T::zero();
                } else {
                    // Complex conjugate pair.
                    wr[na as usize] = x + p;
                    wr[en as usize] = x + p;
                    wi[na as usize] = zz;
                    wi[en as usize] = -zz;
                }
                en = enm2;
                continue 'outer;
            }
            if itn == 0 {
                return Err(Error::EigenNoConvergence);
            }
            if its == 10 || its == 20 {
                // Exceptional shift to break symmetry-induced stalls.
                t += x;
                for i in low..=en {
                    let d = at(hm, i, i) - x;
                    hm[(i as usize, i as usize)] = d;
                }
                let s = at(hm, en, na).abs() + at(hm, na, enm2).abs();
                x = cast::<T>(0.75) * s;
                y = x;
                w = cast::<T>(-0.4375) * s * s;
            }
            its += 1;
            itn -= 1;

            // Look for two consecutive small subdiagonal elements.
            let mut m = enm2;
            let (mut p, mut q, mut r);
            loop {
                let zz = at(hm, m, m);
                let rr = x - zz;
                let ss = y - zz;
                p = (rr * ss - w) / at(hm, m + 1, m) + at(hm, m, m + 1);
                q = at(hm, m + 1, m + 1) - zz - rr - ss;
                r = at(hm, m + 2, m + 1);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let tst = p.abs() * (at(hm, m - 1, m - 1).abs() + zz.abs() + at(hm, m + 1, m + 1).abs());
                if at(hm, m, m - 1).abs() * (q.abs() + r.abs()) <= eps * tst {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=en {
                hm[(i as usize, (i - 2) as usize)] = T::zero();
                if i > m + 2 {
                    hm[(i as usize, (i - 3) as usize)] = T::zero();
                }
            }

            // Double QR sweep chasing the bulge from row m to en.
            for k in m..=na {
                let notlast = k != na;
                if k != m {
                    p = at(hm, k, k - 1);
                    q = at(hm, k + 1, k - 1);
                    r = if notlast { at(hm, k + 2, k - 1) } else { T::zero() };
                    x = p.abs() + q.abs() + r.abs();
                    if x == T::zero() {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                let s = {
                    let mag = (p * p + q * q + r * r).sqrt();
                    if p < T::zero() {
                        -mag
                    } else {
                        mag
                    }
                };
                if s == T::zero() {
                    continue;
                }
                if k != m {
                    hm[(k as usize, (k - 1) as usize)] = -s * x;
                } else if l != m {
                    let v = -at(hm, k, k - 1);
                    hm[(k as usize, (k - 1) as usize)] = v;
                }
                p += s;
                x = p / s;
                y = q / s;
                let zz = r / s;
                q /= p;
                r /= p;
                if !notlast {
                    for j in k..=en {
                        let pp = at(hm, k, j) + q * at(hm, k + 1, j);
                        hm[(k as usize, j as usize)] = at(hm, k, j) - pp * x;
                        hm[((k + 1) as usize, j as usize)] = at(hm, k + 1, j) - pp * y;
                    }
                    let jmax = en.min(k + 3);
                    for i in l..=jmax {
                        let pp = x * at(hm, i, k) + y * at(hm, i, k + 1);
                        hm[(i as usize, k as usize)] = at(hm, i, k) - pp;
                        hm[(i as usize, (k + 1) as usize)] = at(hm, i, k + 1) - pp * q;
                    }
                } else {
                    for j in k..=en {
                        let pp = at(hm, k, j) + q * at(hm, k + 1, j) + r * at(hm, k + 2, j);
                        hm[(k as usize, j as usize)] = at(hm, k, j) - pp * x;
                        hm[((k + 1) as usize, j as usize)] = at(hm, k + 1, j) - pp * y;
                        hm[((k + 2) as usize, j as usize)] = at(hm, k + 2, j) - pp * zz;
                    }
                    let jmax = en.min(k + 3);
                    for i in l..=jmax {
                        let pp = x * at(hm, i, k) + y * at(hm, i, k + 1) + zz * at(hm, i, k + 2);
                        hm[(i as usize, k as usize)] = at(hm, i, k) - pp;
                        hm[(i as usize, (k + 1) as usize)] = at(hm, i, k + 1) - pp * q;
                        hm[(i as usize, (k + 2) as usize)] = at(hm, i, k + 2) - pp * r;
                    }
                }
            }
        }
    }
    Ok(wr.into_iter().zip(wi).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn symmetric_eigen_on_known_matrix() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let m = Matrix::<f64>::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let e = sym_eigen(&m).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-12);
        assert!((e.values[1] - 3.0).abs() < 1e-12);
        // Reconstruction V D Vᵀ = M.
        let vd = Matrix::from_fn(2, 2, |i, j| e.vectors[(i, j)] * e.values[j]);
        let rec = vd.matmul_transpose_b(&e.vectors);
        assert!((&rec - &m).max_abs() < 1e-12);
    }

    #[test]
    fn symmetric_eigen_random_reconstruction() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for n in [1, 2, 5, 8] {
            let g = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let m = &g + &g.transpose();
            let e = sym_eigen(&m).unwrap();
            let vd = Matrix::from_fn(n, n, |i, j| e.vectors[(i, j)] * e.values[j]);
            let rec = vd.matmul_transpose_b(&e.vectors);
            assert!((&rec - &m).max_abs() < 1e-11, "n={n}");
            for w in e.values.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }

    #[test]
    fn complex_pair_of_rotation_plus_decay() {
        // [[-1,1],[-1,-2]]: trace −3, det 3 → eigenvalues −1.5 ± i·√3/2.
        let a = Matrix::<f64>::from_rows(&[&[-1.0, 1.0], &[-1.0, -2.0]]);
        let eigs = eigenvalues(&a).unwrap();
        for (re, im) in &eigs {
            assert!((re + 1.5).abs() < 1e-12);
            assert!((im.abs() - 0.75f64.sqrt()).abs() < 1e-12);
        }
        assert!((spectral_abscissa(&a).unwrap() + 1.5).abs() < 1e-12);
    }

    #[test]
    fn purely_imaginary_spectrum() {
        let a = Matrix::<f64>::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let eigs = eigenvalues(&a).unwrap();
        for (re, im) in &eigs {
            assert!(re.abs() < 1e-14);
            assert!((im.abs() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn triangular_matrix_eigenvalues_are_diagonal() {
        let a = Matrix::<f64>::from_rows(&[
            &[3.0, 1.0, -2.0],
            &[0.0, -4.0, 5.0],
            &[0.0, 0.0, 0.5],
        ]);
        let eigs = eigenvalues(&a).unwrap();
        let mut res: Vec<f64> = eigs.iter().map(|e| e.0).collect();
        res.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in res.iter().zip([-4.0, 0.5, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn random_matrices_match_characteristic_invariants() {
        // Trace = Σ re(λ); |det| via singular values is harder, so check
        // trace and the sum of pairwise products (second elementary
        // symmetric polynomial) against the coefficients for small n.
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for n in [2usize, 3, 5, 9] {
            let a = Matrix::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
            let eigs = eigenvalues(&a).unwrap();
            let trace: f64 = (0..n).map(|i| a[(i, i)]).sum();
            let eig_trace: f64 = eigs.iter().map(|e| e.0).sum();
            assert!(
                (trace - eig_trace).abs() < 1e-9 * (1.0 + trace.abs()),
                "n={n}: trace {trace} vs {eig_trace}"
            );
            // Complex eigenvalues must come in conjugate pairs.
            let im_sum: f64 = eigs.iter().map(|e| e.1).sum();
            assert!(im_sum.abs() < 1e-9);
        }
    }

    #[test]
    fn hessenberg_similarity_preserves_symmetric_spectrum() {
        // Cross-check the nonsymmetric path against Jacobi on a symmetric
        // input where both apply.
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let g = Matrix::from_fn(6, 6, |_, _| rng.random_range(-1.0..1.0));
        let m = &g + &g.transpose();
        let sym = sym_eigen(&m).unwrap();
        let mut gen: Vec<f64> = eigenvalues(&m).unwrap().iter().map(|e| e.0).collect();
        gen.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in gen.iter().zip(&sym.values) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }
}
