//! LLL reduction of rank-3 lattices under an integral positive definite form.

use crate::field::Element;

fn dot(a: &Element, b: &Element, gram: &[[i128; 3]; 3]) -> f64 {
    let mut s = 0i128;
    for i in 0..3 {
        for j in 0..3 {
            s += a[i] * gram[i][j] * b[j];
        }
    }
    s as f64
}

/// LLL with `delta = 0.99`.
pub fn lll_reduce(mut b: [Element; 3], gram: &[[i128; 3]; 3]) -> [Element; 3] {
    let n = 3;
    let mut k = 1;
    let mut guard = 0;
    while k < n {
        guard += 1;
        assert!(guard < 100_000, "LLL did not terminate");
        // Gram-Schmidt in floating point
        let mut mu = [[0f64; 3]; 3];
        let mut bstar = [0f64; 3];
        for i in 0..n {
            for j in 0..i {
                let mut m = dot(&b[i], &b[j], gram);
                for t in 0..j {
                    m -= mu[j][t] * mu[i][t] * bstar[t];
                }
                mu[i][j] = m / bstar[j];
            }
            let mut s = dot(&b[i], &b[i], gram);
            for t in 0..i {
                s -= mu[i][t] * mu[i][t] * bstar[t];
            }
            bstar[i] = s;
        }
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 {
                let qi = q as i128;
                let bj = b[j];
                for (x, y) in b[k].iter_mut().zip(bj) {
                    *x -= qi * y;
                }
                for t in 0..=j {
                    let m = if t == j { 1.0 } else { mu[j][t] };
                    mu[k][t] -= q * m;
                }
            }
        }
        if bstar[k] >= (0.99 - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    b
}
