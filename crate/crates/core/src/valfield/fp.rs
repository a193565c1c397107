//! Arithmetic over the prime field F_p and its univariate function field
//! F_p(x). Both the equal-characteristic coefficient domain (rational
//! functions in `u`) and the residue fields of Gauss extensions (rational
//! functions in the reduced parameter `s`) are instances of [`FpRatFn`].

use crate::{Error, Result};

/// Reduce an i64 into the range [0, p).
pub fn fp_of_i64(v: i64, p: u64) -> u64 {
    let m = v.rem_euclid(p as i64);
    m as u64
}

pub fn fp_add(a: u64, b: u64, p: u64) -> u64 {
    (a + b) % p
}

pub fn fp_sub(a: u64, b: u64, p: u64) -> u64 {
    (a + p - b % p) % p
}

pub fn fp_mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn fp_pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_mul(acc, a, p);
        }
        a = fp_mul(a, a, p);
        e >>= 1;
    }
    acc
}

/// Inverse by Fermat; p is prime throughout the crate.
pub fn fp_inv(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p), "inverse of zero in F_{p}");
    fp_pow(a, p - 2, p)
}

/// Dense polynomial over F_p, coefficients ascending, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpPoly {
    pub p: u64,
    pub coeffs: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpPoly { p, coeffs }
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, coeffs: vec![] }
    }

    pub fn constant(p: u64, c: u64) -> Self {
        Self::new(p, vec![c])
    }

    pub fn monomial(p: u64, c: u64, deg: usize) -> Self {
        let mut v = vec![0; deg + 1];
        v[deg] = c % p;
        Self::new(p, v)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; zero polynomial reports None.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn deg(&self) -> usize {
        self.degree().expect("degree of zero polynomial")
    }

    pub fn lc(&self) -> u64 {
        *self.coeffs.last().expect("lc of zero polynomial")
    }

    /// Order of vanishing at x = 0; zero polynomial reports None.
    pub fn ord(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = self.p;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut v = vec![0u64; n];
        for (i, slot) in v.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or(0);
            let b = other.coeffs.get(i).copied().unwrap_or(0);
            *slot = fp_add(a, b, p);
        }
        Self::new(p, v)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let p = self.p;
        Self::new(p, self.coeffs.iter().map(|&c| fp_sub(0, c, p)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let p = self.p;
        if self.is_zero() || other.is_zero() {
            return Self::zero(p);
        }
        let mut v = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                v[i + j] = fp_add(v[i + j], fp_mul(a, b, p), p);
            }
        }
        Self::new(p, v)
    }

    pub fn scale(&self, c: u64) -> Self {
        let p = self.p;
        Self::new(p, self.coeffs.iter().map(|&a| fp_mul(a, c, p)).collect())
    }

    /// Euclidean division, returns (quotient, remainder).
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let p = self.p;
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut rem = self.clone();
        let dd = d.deg();
        let dinv = fp_inv(d.lc(), p);
        if rem.is_zero() || rem.deg() < dd {
            return (Self::zero(p), rem);
        }
        let mut q = vec![0u64; rem.deg() - dd + 1];
        while !rem.is_zero() && rem.deg() >= dd {
            let k = rem.deg() - dd;
            let c = fp_mul(rem.lc(), dinv, p);
            q[k] = c;
            let sub = d.mul(&Self::monomial(p, c, k));
            rem = rem.sub(&sub);
        }
        (Self::new(p, q), rem)
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(fp_inv(self.lc(), self.p))
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        if self.coeffs.len() <= 1 {
            return Self::zero(p);
        }
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| fp_mul(c, (i as u64) % p, p))
            .collect();
        Self::new(p, v)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let p = self.p;
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = fp_add(fp_mul(acc, x, p), c, p);
        }
        acc
    }

    /// Roots in F_p itself, by exhaustive search. Fine for the small primes
    /// this crate works with.
    pub fn roots_in_fp(&self) -> Vec<u64> {
        (0..self.p).filter(|&x| self.eval(x) == 0).collect()
    }

    /// Coefficient-wise p-th root when the polynomial is of the form g(x^p)
    /// with p-th-power coefficients. Over F_p every constant is its own p-th
    /// root, so this only demands the exponent condition.
    pub fn pth_root(&self) -> Option<Self> {
        let p = self.p as usize;
        if self.is_zero() {
            return Some(self.clone());
        }
        let mut v = vec![];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if i % p == 0 {
                v.push(c);
            } else if c != 0 {
                return None;
            }
        }
        Some(Self::new(self.p, v))
    }

    pub fn to_string_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = vec![];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let term = match (i, c) {
                (0, c) => format!("{c}"),
                (1, 1) => var.to_string(),
                (1, c) => format!("{c}{var}"),
                (i, 1) => format!("{var}^{i}"),
                (i, c) => format!("{c}{var}^{i}"),
            };
            parts.push(term);
        }
        parts.join("+")
    }
}

/// Rational function over F_p: reduced fraction with monic denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpRatFn {
    pub num: FpPoly,
    pub den: FpPoly,
}

impl FpRatFn {
    pub fn new(num: FpPoly, den: FpPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::invalid("zero denominator in F_p(x)"));
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: FpPoly, den: FpPoly) -> Self {
        let p = num.p;
        if num.is_zero() {
            return FpRatFn {
                num: FpPoly::zero(p),
                den: FpPoly::constant(p, 1),
            };
        }
        let g = num.gcd(&den);
        let num = num.divrem(&g).0;
        let den = den.divrem(&g).0;
        let c = fp_inv(den.lc(), p);
        FpRatFn {
            num: num.scale(c),
            den: den.scale(c),
        }
    }

    pub fn from_poly(poly: FpPoly) -> Self {
        let p = poly.p;
        FpRatFn {
            num: poly,
            den: FpPoly::constant(p, 1),
        }
    }

    pub fn constant(p: u64, c: u64) -> Self {
        Self::from_poly(FpPoly::constant(p, c))
    }

    pub fn zero(p: u64) -> Self {
        Self::from_poly(FpPoly::zero(p))
    }

    pub fn one(p: u64) -> Self {
        Self::constant(p, 1)
    }

    pub fn var(p: u64) -> Self {
        Self::from_poly(FpPoly::monomial(p, 1, 1))
    }

    pub fn p(&self) -> u64 {
        self.num.p
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.degree().is_none_or(|d| d == 0) && self.den.deg() == 0
    }

    /// The constant value when this is an element of F_p.
    pub fn as_constant(&self) -> Option<u64> {
        if !self.is_constant() {
            return None;
        }
        Some(self.num.coeffs.first().copied().unwrap_or(0))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::reduced(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        FpRatFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::reduced(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::invalid("division by zero in F_p(x)"));
        }
        Ok(Self::reduced(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    pub fn inv(&self) -> Result<Self> {
        Self::one(self.p()).div(self)
    }

    /// Order of vanishing at x = 0 (negative for poles); None for 0.
    pub fn ord_at_zero(&self) -> Option<i64> {
        let n = self.num.ord()?;
        let d = self.den.ord().expect("nonzero denominator");
        Some(n as i64 - d as i64)
    }

    /// Value at x = 0 when defined (order of vanishing ≥ 0).
    pub fn eval_at_zero(&self) -> Result<u64> {
        match self.ord_at_zero() {
            None => Ok(0),
            Some(o) if o > 0 => Ok(0),
            Some(0) => {
                let n = self.num.coeffs.iter().find(|&&c| c != 0).copied().unwrap();
                // reduced fraction: order 0 numerator and denominator both
                // have nonzero constant term once ord handling is applied
                let d0 = self.den.coeffs[0];
                debug_assert!(d0 != 0);
                Ok(fp_mul(n, fp_inv(d0, self.p()), self.p()))
            }
            Some(_) => Err(Error::invalid("pole at x = 0")),
        }
    }

    /// p-th root when one exists in F_p(x).
    pub fn pth_root(&self) -> Option<Self> {
        Some(Self::reduced(self.num.pth_root()?, self.den.pth_root()?))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(self.p());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn to_string_in(&self, var: &str) -> String {
        let n = self.num.to_string_in(var);
        if self.den.deg() == 0 {
            return n;
        }
        let needs_parens = |s: &str| s.contains('+') || s.contains('-');
        let ns = if needs_parens(&n) {
            format!("({n})")
        } else {
            n
        };
        let d = self.den.to_string_in(var);
        let ds = if needs_parens(&d) {
            format!("({d})")
        } else {
            d
        };
        format!("{ns}/{ds}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_divrem_roundtrip() {
        let p = 5;
        let f = FpPoly::new(p, vec![1, 2, 3, 4]);
        let d = FpPoly::new(p, vec![2, 1]);
        let (q, r) = f.divrem(&d);
        assert_eq!(d.mul(&q).add(&r), f);
    }

    #[test]
    fn gcd_of_common_factor() {
        let p = 3;
        let a = FpPoly::new(p, vec![2, 1]); // x + 2
        let f = a.mul(&FpPoly::new(p, vec![1, 1]));
        let g = a.mul(&FpPoly::new(p, vec![1, 0, 1]));
        assert_eq!(f.gcd(&g), a.monic());
    }

    #[test]
    fn roots_of_artin_schreier() {
        // x^p - x has every element of F_p as a root
        let p = 5;
        let mut v = vec![0u64; 6];
        v[1] = p - 1;
        v[5] = 1;
        let f = FpPoly::new(p, v);
        assert_eq!(f.roots_in_fp(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn ratfn_field_ops() {
        let p = 3;
        let x = FpRatFn::var(p);
        let one = FpRatFn::one(p);
        // (x + 1)/(x) * x/(x + 1) = 1
        let a = FpRatFn::new(x.num.add(&FpPoly::constant(p, 1)), x.num.clone()).unwrap();
        let b = a.inv().unwrap();
        assert_eq!(a.mul(&b), one);
    }

    #[test]
    fn pth_root_detects_powers() {
        let p = 2;
        // x^2 + 1 = (x+1)^2 over F_2
        let f = FpPoly::new(p, vec![1, 0, 1]);
        assert_eq!(f.pth_root(), Some(FpPoly::new(p, vec![1, 1])));
        // x has no square root
        assert_eq!(FpPoly::monomial(p, 1, 1).pth_root(), None);
    }
}
