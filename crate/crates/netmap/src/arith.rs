//! Small integer helpers shared across modules.

/// Nonnegative gcd; gcd(0, 0) = 0.
pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Extended Euclid: returns (g, x, y) with a*x + b*y = g and g = gcd(a,b) >= 0.
pub(crate) fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i64, 0i64);
    let (mut y0, mut y1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

/// Distinct prime factors of |n|, ascending. Empty for |n| <= 1.
pub(crate) fn prime_factors(n: i64) -> Vec<i64> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = 2i64;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Representative of `a` modulo `m > 0` in the balanced interval (-m/2, m/2].
pub(crate) fn balanced_mod(a: i64, m: i64) -> i64 {
    debug_assert!(m > 0);
    let mut r = a.rem_euclid(m);
    if 2 * r > m {
        r -= m;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_gcd_identity() {
        for a in -20..20i64 {
            for b in -20..20i64 {
                let (g, x, y) = extended_gcd(a, b);
                assert_eq!(g, gcd(a, b));
                assert_eq!(a * x + b * y, g);
            }
        }
    }

    #[test]
    fn factors() {
        assert_eq!(prime_factors(1), Vec::<i64>::new());
        assert_eq!(prime_factors(12), vec![2, 3]);
        assert_eq!(prime_factors(-35), vec![5, 7]);
    }

    #[test]
    fn balanced() {
        assert_eq!(balanced_mod(-1, 4), -1);
        assert_eq!(balanced_mod(2, 4), 2);
        assert_eq!(balanced_mod(3, 4), -1);
        assert_eq!(balanced_mod(7, 3), 1);
    }
}
