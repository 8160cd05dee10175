//! Dense Cholesky routines on row-major `t×t` buffers.

/// In-place lower Cholesky factorization; the strict upper triangle is zeroed.
/// Returns `false` if a pivot is not strictly positive.
pub(crate) fn cholesky_in_place(a: &mut [f64], t: usize) -> bool {
    for j in 0..t {
        let d = a[j * t + j] - dot(&a[j * t..j * t + j], &a[j * t..j * t + j]);
        if !(d > 0.0 && d.is_finite()) {
            return false;
        }
        let ljj = d.sqrt();
        a[j * t + j] = ljj;
        for i in j + 1..t {
            let s = a[i * t + j] - dot(&a[i * t..i * t + j], &a[j * t..j * t + j]);
            a[i * t + j] = s / ljj;
        }
    }
    for i in 0..t {
        for v in &mut a[i * t + i + 1..(i + 1) * t] {
            *v = 0.0;
        }
    }
    true
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `L x = b` in place.
pub(crate) fn forward_solve(l: &[f64], t: usize, b: &mut [f64]) {
    for i in 0..t {
        let row = &l[i * t..i * t + i];
        let s: f64 = row.iter().zip(&b[..i]).map(|(a, x)| a * x).sum();
        b[i] = (b[i] - s) / l[i * t + i];
    }
}

/// Solves `Lᵀ x = b` in place.
pub(crate) fn backward_solve(l: &[f64], t: usize, b: &mut [f64]) {
    for i in (0..t).rev() {
        let mut s = b[i];
        for k in i + 1..t {
            s -= l[k * t + i] * b[k];
        }
        b[i] = s / l[i * t + i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_and_solve_spd() {
        let a = vec![4.0, 2.0, 0.4, 2.0, 5.0, 1.0, 0.4, 1.0, 3.0];
        let mut l = a.clone();
        assert!(cholesky_in_place(&mut l, 3));
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| l[i * 3 + k] * l[j * 3 + k]).sum();
                assert!((v - a[i * 3 + j]).abs() < 1e-12);
            }
        }
        let mut x = vec![1.0, -2.0, 0.5];
        forward_solve(&l, 3, &mut x);
        backward_solve(&l, 3, &mut x);
        let b: Vec<f64> = (0..3)
            .map(|i| (0..3).map(|j| a[i * 3 + j] * x[j]).sum())
            .collect();
        for (got, want) in b.iter().zip([1.0, -2.0, 0.5]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn indefinite_fails() {
        let mut a = vec![1.0, 2.0, 2.0, 1.0];
        assert!(!cholesky_in_place(&mut a, 2));
    }
}
