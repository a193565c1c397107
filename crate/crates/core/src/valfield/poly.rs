//! Dense univariate polynomials over a valued coefficient domain, plus the
//! separability bookkeeping the cluster engine relies on in characteristic p.

use super::{CoeffDomain, Elem};
use crate::{Error, Result};

/// Polynomial with ascending coefficients, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    domain: CoeffDomain,
    coeffs: Vec<Elem>,
}

impl Poly {
    pub fn new(domain: CoeffDomain, mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { domain, coeffs }
    }

    pub fn zero(domain: &CoeffDomain) -> Self {
        Poly {
            domain: domain.clone(),
            coeffs: vec![],
        }
    }

    pub fn constant(c: Elem) -> Self {
        Poly::new(c.domain().clone(), vec![c])
    }

    pub fn monomial(c: Elem, deg: usize) -> Self {
        let domain = c.domain().clone();
        let mut v = vec![domain.zero(); deg + 1];
        v[deg] = c;
        Poly::new(domain, v)
    }

    pub fn var(domain: &CoeffDomain) -> Self {
        Poly::monomial(domain.one(), 1)
    }

    pub fn from_i64_coeffs(domain: &CoeffDomain, coeffs: &[i64]) -> Self {
        Poly::new(
            domain.clone(),
            coeffs.iter().map(|&c| domain.from_i64(c)).collect(),
        )
    }

    /// Monic product of (z - r) over the given roots.
    pub fn from_roots(domain: &CoeffDomain, roots: &[Elem]) -> Self {
        let mut acc = Poly::constant(domain.one());
        for r in roots {
            let lin = Poly::new(domain.clone(), vec![r.neg(), domain.one()]);
            acc = acc.mul(&lin);
        }
        acc
    }

    pub fn domain(&self) -> &CoeffDomain {
        &self.domain
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| self.domain.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

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

    pub fn lc(&self) -> Elem {
        self.coeffs.last().expect("lc of zero polynomial").clone()
    }

    /// Order of vanishing at z = 0.
    pub fn ord(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            v.push(self.coeff(i).add(&other.coeff(i)));
        }
        Poly::new(self.domain.clone(), v)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly::new(
            self.domain.clone(),
            self.coeffs.iter().map(|c| c.neg()).collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.domain);
        }
        let mut v = vec![self.domain.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].add(&a.mul(b));
            }
        }
        Poly::new(self.domain.clone(), v)
    }

    pub fn scale(&self, c: &Elem) -> Poly {
        Poly::new(
            self.domain.clone(),
            self.coeffs.iter().map(|a| a.mul(c)).collect(),
        )
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.domain.one().div(&self.lc()))
    }

    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.deg();
        let mut rem = self.clone();
        if rem.is_zero() || rem.deg() < dd {
            return (Poly::zero(&self.domain), rem);
        }
        let mut q = vec![self.domain.zero(); rem.deg() - dd + 1];
        let dl = d.lc();
        while !rem.is_zero() && rem.deg() >= dd {
            let k = rem.deg() - dd;
            let c = rem.lc().div(&dl);
            q[k] = c.clone();
            rem = rem.sub(&d.mul(&Poly::monomial(c, k)));
        }
        (Poly::new(self.domain.clone(), q), rem)
    }

    /// Exact division; panics if the remainder is nonzero.
    pub fn div_exact(&self, d: &Poly) -> Poly {
        let (q, r) = self.divrem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic gcd by the Euclidean algorithm over the coefficient field.
    pub fn gcd(&self, other: &Poly) -> Poly {
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

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero(&self.domain);
        }
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul(&self.domain.from_i64(i as i64)))
            .collect();
        Poly::new(self.domain.clone(), v)
    }

    pub fn eval(&self, x: &Elem) -> Elem {
        let mut acc = self.domain.zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Taylor shift: the polynomial z ↦ f(z + c), computed by Horner over
    /// the shifted variable so no binomial coefficients are materialised.
    pub fn shift(&self, c: &Elem) -> Poly {
        let lin = Poly::new(self.domain.clone(), vec![c.clone(), self.domain.one()]);
        let mut acc = Poly::zero(&self.domain);
        for a in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&Poly::constant(a.clone()));
        }
        acc
    }

    /// Coefficients of z^d · f(1/z), the reversal at formal degree d ≥ deg f.
    pub fn reverse_at(&self, d: usize) -> Poly {
        assert!(self.degree().is_none_or(|dd| dd <= d));
        let mut v = vec![self.domain.zero(); d + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[d - i] = c.clone();
        }
        Poly::new(self.domain.clone(), v)
    }

    /// Substitute z ↦ z^k.
    pub fn stretch(&self, k: usize) -> Poly {
        assert!(k >= 1);
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![self.domain.zero(); self.deg() * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i * k] = c.clone();
        }
        Poly::new(self.domain.clone(), v)
    }

    /// Inverse of `stretch(p)`: when every nonzero exponent is divisible by
    /// p, the polynomial g with g(z^p) = f. None otherwise.
    pub fn compress(&self, p: usize) -> Option<Poly> {
        let mut v = vec![];
        for (i, c) in self.coeffs.iter().enumerate() {
            if i % p == 0 {
                v.push(c.clone());
            } else if !c.is_zero() {
                return None;
            }
        }
        Some(Poly::new(self.domain.clone(), v))
    }

    /// All nonzero exponents divisible by p?
    pub fn exponents_divisible_by(&self, p: usize) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| i % p == 0 || c.is_zero())
    }
}

/// One separable constituent of a polynomial: `f` contains the factor
/// `poly(z^{p^depth})^{mult}`, with `poly` separable. Each root γ of `poly`
/// corresponds to the root γ^{1/p^depth} of `f`, of multiplicity
/// `mult · p^depth`.
#[derive(Debug, Clone)]
pub struct SepPart {
    pub poly: Poly,
    pub depth: u32,
    pub mult: usize,
}

/// Decompose into separable constituents with pairwise disjoint root sets:
/// f = unit · Π poly_i(z^{p^{depth_i}})^{mult_i}. In characteristic zero this
/// is plain squarefree decomposition with all depths zero.
pub fn separable_parts(f: &Poly) -> Result<Vec<SepPart>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut out = vec![];
    sep_rec(&f.monic(), 0, &mut out)?;
    Ok(out)
}

fn sep_rec(f: &Poly, depth: u32, out: &mut Vec<SepPart>) -> Result<()> {
    if f.degree() == Some(0) || f.is_zero() {
        return Ok(());
    }
    let fd = f.derivative();
    if fd.is_zero() {
        // characteristic p and every exponent divisible by p
        let p = f.domain().p() as usize;
        let s = f
            .compress(p)
            .ok_or_else(|| Error::invalid("vanishing derivative without p-power exponents"))?;
        return sep_rec(&s.monic(), depth + 1, out);
    }
    // Musser's multiplicity ladder; factors whose multiplicity is divisible
    // by p survive in `c` and drop to the recursive call.
    let mut c = f.gcd(&fd);
    let mut w = f.div_exact(&c);
    let mut i = 1usize;
    while w.degree().is_some_and(|d| d > 0) {
        let y = w.gcd(&c);
        let z = w.div_exact(&y);
        if z.degree().is_some_and(|d| d > 0) {
            out.push(SepPart {
                poly: z.monic(),
                depth,
                mult: i,
            });
        }
        i += 1;
        c = c.div_exact(&y);
        w = y;
    }
    if c.degree().is_some_and(|d| d > 0) {
        let p = f.domain().p() as usize;
        let s = c
            .compress(p)
            .ok_or_else(|| Error::invalid("residual multiplicities not p-divisible"))?;
        sep_rec(&s.monic(), depth + 1, out)?;
    }
    Ok(())
}
