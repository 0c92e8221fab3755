//! Jacobi polynomials P_n^{(a,b)} and their zeros.

/// Value of P_n^{(a,b)}(z) by the three-term recurrence.
pub fn jacobi(n: usize, a: f64, b: f64, z: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = 0.5 * (a - b + (a + b + 2.0) * z);
    for k in 1..n {
        let k = k as f64;
        let s = 2.0 * k + a + b;
        let a1 = 2.0 * (k + 1.0) * (k + a + b + 1.0) * s;
        let a2 = (s + 1.0) * (a * a - b * b);
        let a3 = s * (s + 1.0) * (s + 2.0);
        let a4 = 2.0 * (k + a) * (k + b) * (s + 2.0);
        let p2 = ((a2 + a3 * z) * p1 - a4 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// d/dz P_n^{(a,b)}(z).
pub fn jacobi_deriv(n: usize, a: f64, b: f64, z: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    0.5 * (n as f64 + a + b + 1.0) * jacobi(n - 1, a + 1.0, b + 1.0, z)
}

/// Zeros of P_n^{(a,b)} in ascending order.
///
/// Newton iteration from Chebyshev guesses with deflation of the roots
/// already found.
pub fn jacobi_zeros(n: usize, a: f64, b: f64) -> Vec<f64> {
    const TOL: f64 = 1e-15;
    const MAX_IT: usize = 100;
    let mut z: Vec<f64> = Vec::with_capacity(n);
    for k in 0..n {
        let mut r = -((2 * k + 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos();
        if k > 0 {
            r = 0.5 * (r + z[k - 1]);
        }
        for _ in 0..MAX_IT {
            let s: f64 = z.iter().map(|&zi| 1.0 / (r - zi)).sum();
            let p = jacobi(n, a, b, r);
            let dp = jacobi_deriv(n, a, b, r);
            let delta = -p / (dp - s * p);
            r += delta;
            if delta.abs() < TOL {
                break;
            }
        }
        z.push(r);
    }
    z
}
