//! Orthogonal-polynomial recurrences used by the stable mode shapes.

/// Chebyshev polynomial of the second kind `U_k(u)`; `U_{-1} = 0`.
pub fn chebyshev_u(k: isize, u: f64) -> f64 {
    if k < 0 {
        return 0.0;
    }
    let (mut prev, mut cur) = (1.0, 2.0 * u);
    if k == 0 {
        return prev;
    }
    for _ in 1..k {
        let next = 2.0 * u * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Gegenbauer polynomial `C_k^{(λ)}(u)`; zero for negative `k`.
pub fn gegenbauer(k: isize, lambda: f64, u: f64) -> f64 {
    if k < 0 {
        return 0.0;
    }
    let (mut prev, mut cur) = (1.0, 2.0 * lambda * u);
    if k == 0 {
        return prev;
    }
    for m in 2..=k {
        let m = m as f64;
        let next = (2.0 * u * (m + lambda - 1.0) * cur - (m + 2.0 * lambda - 2.0) * prev) / m;
        prev = cur;
        cur = next;
    }
    cur
}
