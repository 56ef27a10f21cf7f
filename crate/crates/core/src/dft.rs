//! Exact roots of unity.

use std::f64::consts::PI;

use num_complex::Complex64;

/// e^{-j 2 pi num / den}, with the exponent reduced modulo `den` in integer
/// arithmetic. Quarter turns are returned exactly.
pub fn twiddle(num: usize, den: usize) -> Complex64 {
    let r = num % den;
    if r == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if (4 * r).is_multiple_of(den) {
        return match 4 * r / den {
            1 => Complex64::new(0.0, -1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, 1.0),
        };
    }
    Complex64::from_polar(1.0, -2.0 * PI * r as f64 / den as f64)
}

/// e^{-j 2 pi (a/da + b/db)} with both fractions reduced exactly.
pub fn twiddle2(a: usize, da: usize, b: usize, db: usize) -> Complex64 {
    twiddle(a, da) * twiddle(b, db)
}
