//! Exact arithmetic in valued coefficient domains.
//!
//! Three domains are supported: ℚ with the p-adic valuation (mixed
//! characteristic), the rational function field F_p(u) with the u-adic
//! valuation (equal characteristic), and a one-level Gauss extension of
//! either, adjoining a parameter `t` of prescribed valuation ρ. The Gauss
//! extension is the computational stand-in for evaluating at a disk point:
//! the disk of radius-valuation ρ around a center `a` is probed through the
//! generic element `a + t`.
//!
//! The value group is ℚ throughout, normalised so val(p) = 1 (resp.
//! val(u) = 1). Multiplicative radii are c^val with c = 1/p and only appear
//! at I/O boundaries.

pub mod fp;
pub mod poly;
pub mod valq;

pub use valq::{mult_radius_string, qrat, QRat, ValQ};

use crate::{Error, Result};
use fp::{fp_of_i64, FpPoly, FpRatFn};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A valued coefficient domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CoeffDomain {
    /// ℚ with the p-adic valuation.
    MixedChar { p: u64 },
    /// F_p(u) with the u-adic valuation.
    EqualChar { p: u64 },
    /// One-level extension by a parameter t with val(t) = rho ≥ 0.
    GaussExt { base: Box<CoeffDomain>, rho: QRat },
}

impl CoeffDomain {
    pub fn mixed(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        Ok(CoeffDomain::MixedChar { p })
    }

    pub fn equal(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        Ok(CoeffDomain::EqualChar { p })
    }

    /// Extend by a parameter of valuation `rho`. Nesting is capped at one
    /// level: extending an extension is rejected.
    pub fn gauss_extend(&self, rho: QRat) -> Result<Self> {
        if matches!(self, CoeffDomain::GaussExt { .. }) {
            return Err(Error::invalid("Gauss extension of a Gauss extension"));
        }
        if rho < QRat::zero() {
            return Err(Error::invalid("Gauss parameter valuation must be >= 0"));
        }
        Ok(CoeffDomain::GaussExt {
            base: Box::new(self.clone()),
            rho,
        })
    }

    pub fn p(&self) -> u64 {
        match self {
            CoeffDomain::MixedChar { p } | CoeffDomain::EqualChar { p } => *p,
            CoeffDomain::GaussExt { base, .. } => base.p(),
        }
    }

    pub fn is_gauss(&self) -> bool {
        matches!(self, CoeffDomain::GaussExt { .. })
    }

    pub fn gauss_rho(&self) -> Option<QRat> {
        match self {
            CoeffDomain::GaussExt { rho, .. } => Some(*rho),
            _ => None,
        }
    }

    pub fn base(&self) -> &CoeffDomain {
        match self {
            CoeffDomain::GaussExt { base, .. } => base,
            other => other,
        }
    }

    /// True when the residue characteristic equals the characteristic of the
    /// field itself (wild Frobenius phenomena live here).
    pub fn has_char_p(&self) -> bool {
        matches!(self.base(), CoeffDomain::EqualChar { .. })
    }

    pub fn zero(&self) -> Elem {
        self.from_i64(0)
    }

    pub fn one(&self) -> Elem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Elem {
        let payload = match self {
            CoeffDomain::MixedChar { .. } => Payload::Q(BigRational::from_integer(BigInt::from(n))),
            CoeffDomain::EqualChar { p } => Payload::U(FpRatFn::constant(*p, fp_of_i64(n, *p))),
            CoeffDomain::GaussExt { base, .. } => {
                return base.from_i64(n).lift_to(self);
            }
        };
        Elem {
            domain: self.clone(),
            payload,
        }
    }

    /// Exact rational constant num/den.
    pub fn from_ratio(&self, num: i64, den: i64) -> Result<Elem> {
        if den == 0 {
            return Err(Error::invalid("zero denominator"));
        }
        let n = self.from_i64(num);
        let d = self.from_i64(den);
        if d.is_zero() {
            return Err(Error::invalid(format!(
                "denominator {den} vanishes in characteristic {}",
                self.p()
            )));
        }
        Ok(n.div(&d))
    }

    /// The uniformizer: p in mixed characteristic, u in equal characteristic.
    /// In a Gauss extension this is the base uniformizer, not t.
    pub fn uniformizer(&self) -> Elem {
        match self {
            CoeffDomain::MixedChar { p } => Elem {
                domain: self.clone(),
                payload: Payload::Q(BigRational::from_integer(BigInt::from(*p))),
            },
            CoeffDomain::EqualChar { p } => Elem {
                domain: self.clone(),
                payload: Payload::U(FpRatFn::var(*p)),
            },
            CoeffDomain::GaussExt { base, .. } => base.uniformizer().lift_to(self),
        }
    }

    /// The Gauss parameter t; panics outside an extension.
    pub fn parameter(&self) -> Elem {
        match self {
            CoeffDomain::GaussExt { base, rho } => Elem {
                domain: self.clone(),
                payload: match base.as_ref() {
                    CoeffDomain::MixedChar { .. } => {
                        Payload::GQ(GaussFrac::monomial(base.one_q(), 1, *rho))
                    }
                    CoeffDomain::EqualChar { p } => {
                        Payload::GU(GaussFrac::monomial(FpRatFn::one(*p), 1, *rho))
                    }
                    CoeffDomain::GaussExt { .. } => unreachable!("nested extension"),
                },
            },
            _ => panic!("parameter() called on a base domain"),
        }
    }

    fn one_q(&self) -> BigRational {
        BigRational::one()
    }

    /// Denominator bound b of the representable value group: valuations of
    /// nonzero elements form (1/b)ℤ ∩ (ℤ + ρℤ); b = 1 for base domains and
    /// b = den(ρ) for extensions.
    pub fn value_group_denominator(&self) -> i64 {
        match self {
            CoeffDomain::GaussExt { rho, .. } => {
                if rho.is_zero() {
                    1
                } else {
                    *rho.denom()
                }
            }
            _ => 1,
        }
    }

    pub fn representable_val(&self, v: QRat) -> bool {
        self.elem_of_val(v).is_some()
    }

    /// An element of valuation exactly v, when one exists: π^v for integer v
    /// in base domains, t^l·π^m with v = m + lρ in an extension.
    pub fn elem_of_val(&self, v: QRat) -> Option<Elem> {
        match self {
            CoeffDomain::MixedChar { .. } | CoeffDomain::EqualChar { .. } => {
                if !v.is_integer() {
                    return None;
                }
                Some(self.uniformizer().powi(*v.numer()))
            }
            CoeffDomain::GaussExt { rho, .. } => {
                if rho.is_zero() {
                    if !v.is_integer() {
                        return None;
                    }
                    return Some(self.uniformizer().powi(*v.numer()));
                }
                let b = *rho.denom();
                let c = *rho.numer();
                // v = m + l·c/b with integers m, l; needs b·v integral.
                let vb = v * QRat::from_integer(b);
                if !vb.is_integer() {
                    return None;
                }
                let vb = *vb.numer();
                let cinv = mod_inverse(c.rem_euclid(b), b)?;
                let l = (vb.rem_euclid(b) * cinv).rem_euclid(b);
                let m_rat = v - QRat::from_integer(l) * *rho;
                debug_assert!(m_rat.is_integer());
                let m = *m_rat.numer();
                Some(self.parameter().powi(l).mul(&self.uniformizer().powi(m)))
            }
        }
    }

    /// Canonical generator of the residue value: s = t^b · π^{-c} for
    /// ρ = c/b; reduces to t when ρ = 0.
    pub fn residue_parameter_exponents(&self) -> Option<(i64, i64)> {
        match self {
            CoeffDomain::GaussExt { rho, .. } => {
                if rho.is_zero() {
                    Some((1, 0))
                } else {
                    Some((*rho.denom(), *rho.numer()))
                }
            }
            _ => None,
        }
    }
}

fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    // extended Euclid on small integers
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m))
}

impl fmt::Display for CoeffDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffDomain::MixedChar { p } => write!(f, "Q_{p}"),
            CoeffDomain::EqualChar { p } => write!(f, "F_{p}(u)"),
            CoeffDomain::GaussExt { base, rho } => {
                write!(f, "{}(t; val t = {})", base, ValQ::Fin(*rho))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Generic fraction-of-polynomials layer for Gauss extensions
// ---------------------------------------------------------------------------

/// Minimal field interface the Gauss layer needs from its base coefficients.
pub(crate) trait BField: Clone + PartialEq + fmt::Debug {
    fn bzero(&self) -> Self;
    fn bone(&self) -> Self;
    fn bis_zero(&self) -> bool;
    fn badd(&self, o: &Self) -> Self;
    fn bneg(&self) -> Self;
    fn bmul(&self, o: &Self) -> Self;
    fn bdiv(&self, o: &Self) -> Self;
}

impl BField for BigRational {
    fn bzero(&self) -> Self {
        BigRational::zero()
    }
    fn bone(&self) -> Self {
        BigRational::one()
    }
    fn bis_zero(&self) -> bool {
        self.is_zero()
    }
    fn badd(&self, o: &Self) -> Self {
        self + o
    }
    fn bneg(&self) -> Self {
        -self
    }
    fn bmul(&self, o: &Self) -> Self {
        self * o
    }
    fn bdiv(&self, o: &Self) -> Self {
        self / o
    }
}

impl BField for FpRatFn {
    fn bzero(&self) -> Self {
        FpRatFn::zero(self.p())
    }
    fn bone(&self) -> Self {
        FpRatFn::one(self.p())
    }
    fn bis_zero(&self) -> bool {
        self.is_zero()
    }
    fn badd(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn bneg(&self) -> Self {
        self.neg()
    }
    fn bmul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn bdiv(&self, o: &Self) -> Self {
        self.div(o).expect("division by zero in base field")
    }
}

pub(crate) fn bp_trim<B: BField>(mut v: Vec<B>) -> Vec<B> {
    while v.last().is_some_and(|c| c.bis_zero()) {
        v.pop();
    }
    v
}

pub(crate) fn bp_add<B: BField>(a: &[B], b: &[B], model: &B) -> Vec<B> {
    let n = a.len().max(b.len());
    let zero = model.bzero();
    let mut v = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).unwrap_or(&zero);
        let y = b.get(i).unwrap_or(&zero);
        v.push(x.badd(y));
    }
    bp_trim(v)
}

pub(crate) fn bp_neg<B: BField>(a: &[B]) -> Vec<B> {
    a.iter().map(|c| c.bneg()).collect()
}

pub(crate) fn bp_mul<B: BField>(a: &[B], b: &[B], model: &B) -> Vec<B> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let zero = model.bzero();
    let mut v = vec![zero; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.bis_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            v[i + j] = v[i + j].badd(&x.bmul(y));
        }
    }
    bp_trim(v)
}

pub(crate) fn bp_divrem<B: BField>(a: &[B], d: &[B], model: &B) -> (Vec<B>, Vec<B>) {
    assert!(!d.is_empty(), "division by zero polynomial");
    let zero = model.bzero();
    let mut rem: Vec<B> = a.to_vec();
    let dd = d.len() - 1;
    if rem.len() <= dd {
        return (vec![], bp_trim(rem));
    }
    let mut q = vec![zero; rem.len() - dd];
    let dl = d.last().unwrap().clone();
    while rem.len() > dd {
        let k = rem.len() - 1 - dd;
        let c = rem.last().unwrap().bdiv(&dl);
        q[k] = c.clone();
        for (j, dc) in d.iter().enumerate() {
            let t = c.bmul(dc);
            rem[k + j] = rem[k + j].badd(&t.bneg());
        }
        rem = bp_trim(rem);
        if rem.is_empty() {
            break;
        }
    }
    (bp_trim(q), rem)
}

pub(crate) fn bp_gcd<B: BField>(a: &[B], b: &[B], model: &B) -> Vec<B> {
    let mut x = bp_trim(a.to_vec());
    let mut y = bp_trim(b.to_vec());
    while !y.is_empty() {
        let r = bp_divrem(&x, &y, model).1;
        x = y;
        y = r;
    }
    if x.is_empty() {
        return x;
    }
    // monic
    let lead = x.last().unwrap().clone();
    x.iter().map(|c| c.bdiv(&lead)).collect()
}

/// Reduced fraction of polynomials in the Gauss parameter t, denominator
/// monic. The valuation data (ρ, base valuation) lives in the domain.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct GaussFrac<B: BField> {
    pub num: Vec<B>,
    pub den: Vec<B>,
}

impl<B: BField> GaussFrac<B> {
    fn canonical(num: Vec<B>, den: Vec<B>, model: &B) -> Self {
        let num = bp_trim(num);
        let den = bp_trim(den);
        assert!(!den.is_empty(), "zero denominator in Gauss extension");
        if num.is_empty() {
            return GaussFrac {
                num,
                den: vec![model.bone()],
            };
        }
        let g = bp_gcd(&num, &den, model);
        let (num, _) = bp_divrem(&num, &g, model);
        let (den, _) = bp_divrem(&den, &g, model);
        let lead = den.last().unwrap().clone();
        let num = num.iter().map(|c| c.bdiv(&lead)).collect();
        let den = den.iter().map(|c| c.bdiv(&lead)).collect();
        GaussFrac { num, den }
    }

    fn from_base(c: B) -> Self {
        let one = c.bone();
        if c.bis_zero() {
            GaussFrac {
                num: vec![],
                den: vec![one],
            }
        } else {
            GaussFrac {
                num: vec![c],
                den: vec![one],
            }
        }
    }

    fn monomial(c: B, deg: i64, _rho: QRat) -> Self {
        let one = c.bone();
        assert!(deg >= 0);
        let mut num = vec![c.bzero(); deg as usize + 1];
        num[deg as usize] = c;
        GaussFrac {
            num: bp_trim(num),
            den: vec![one],
        }
    }

    fn is_zero(&self) -> bool {
        self.num.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Payload {
    Q(BigRational),
    U(FpRatFn),
    GQ(GaussFrac<BigRational>),
    GU(GaussFrac<FpRatFn>),
}

/// An exact element of a valued coefficient domain, in canonical form:
/// fractions reduced, denominators monic where applicable. Equality is
/// structural.
#[derive(Debug, Clone, PartialEq)]
pub struct Elem {
    pub(crate) domain: CoeffDomain,
    pub(crate) payload: Payload,
}

fn padic_ord_bigint(n: &BigInt, p: u64) -> i64 {
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut k = 0i64;
    loop {
        let (q, r) = num_integer::Integer::div_rem(&n, &p);
        if r.is_zero() {
            k += 1;
            n = q;
        } else {
            return k;
        }
    }
}

fn poly_val<B: BField>(coeffs: &[B], base_val: impl Fn(&B) -> ValQ, rho: QRat) -> ValQ {
    let mut best = ValQ::Inf;
    for (j, c) in coeffs.iter().enumerate() {
        if c.bis_zero() {
            continue;
        }
        let v = base_val(c).add(&ValQ::Fin(rho * QRat::from_integer(j as i64)));
        best = best.min(v);
    }
    best
}

impl Elem {
    pub fn domain(&self) -> &CoeffDomain {
        &self.domain
    }

    pub fn is_zero(&self) -> bool {
        match &self.payload {
            Payload::Q(x) => x.is_zero(),
            Payload::U(x) => x.is_zero(),
            Payload::GQ(x) => x.is_zero(),
            Payload::GU(x) => x.is_zero(),
        }
    }

    /// The additive valuation; val(0) = INF.
    pub fn val(&self) -> ValQ {
        let p = self.domain.p();
        match &self.payload {
            Payload::Q(x) => {
                if x.is_zero() {
                    ValQ::Inf
                } else {
                    ValQ::int(padic_ord_bigint(x.numer(), p) - padic_ord_bigint(x.denom(), p))
                }
            }
            Payload::U(x) => match x.ord_at_zero() {
                None => ValQ::Inf,
                Some(o) => ValQ::int(o),
            },
            Payload::GQ(x) => {
                let rho = self.domain.gauss_rho().unwrap();
                let bv = |c: &BigRational| {
                    if c.is_zero() {
                        ValQ::Inf
                    } else {
                        ValQ::int(padic_ord_bigint(c.numer(), p) - padic_ord_bigint(c.denom(), p))
                    }
                };
                let vn = poly_val(&x.num, bv, rho);
                let vd = poly_val(&x.den, bv, rho);
                match (vn, vd) {
                    (ValQ::Inf, _) => ValQ::Inf,
                    (ValQ::Fin(a), ValQ::Fin(b)) => ValQ::Fin(a - b),
                    _ => unreachable!("nonzero denominator"),
                }
            }
            Payload::GU(x) => {
                let rho = self.domain.gauss_rho().unwrap();
                let bv = |c: &FpRatFn| match c.ord_at_zero() {
                    None => ValQ::Inf,
                    Some(o) => ValQ::int(o),
                };
                let vn = poly_val(&x.num, bv, rho);
                let vd = poly_val(&x.den, bv, rho);
                match (vn, vd) {
                    (ValQ::Inf, _) => ValQ::Inf,
                    (ValQ::Fin(a), ValQ::Fin(b)) => ValQ::Fin(a - b),
                    _ => unreachable!("nonzero denominator"),
                }
            }
        }
    }

    fn assert_same_domain(&self, other: &Elem) {
        assert_eq!(
            self.domain, other.domain,
            "arithmetic on elements of different coefficient domains"
        );
    }

    pub fn add(&self, other: &Elem) -> Elem {
        self.assert_same_domain(other);
        let payload = match (&self.payload, &other.payload) {
            (Payload::Q(a), Payload::Q(b)) => Payload::Q(a + b),
            (Payload::U(a), Payload::U(b)) => Payload::U(a.add(b)),
            (Payload::GQ(a), Payload::GQ(b)) => {
                let model = BigRational::zero();
                let num = bp_add(
                    &bp_mul(&a.num, &b.den, &model),
                    &bp_mul(&b.num, &a.den, &model),
                    &model,
                );
                let den = bp_mul(&a.den, &b.den, &model);
                Payload::GQ(GaussFrac::canonical(num, den, &model))
            }
            (Payload::GU(a), Payload::GU(b)) => {
                let model = FpRatFn::zero(self.domain.p());
                let num = bp_add(
                    &bp_mul(&a.num, &b.den, &model),
                    &bp_mul(&b.num, &a.den, &model),
                    &model,
                );
                let den = bp_mul(&a.den, &b.den, &model);
                Payload::GU(GaussFrac::canonical(num, den, &model))
            }
            _ => unreachable!("payload/domain mismatch"),
        };
        Elem {
            domain: self.domain.clone(),
            payload,
        }
    }

    pub fn sub(&self, other: &Elem) -> Elem {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Elem {
        let payload = match &self.payload {
            Payload::Q(a) => Payload::Q(-a),
            Payload::U(a) => Payload::U(a.neg()),
            Payload::GQ(a) => Payload::GQ(GaussFrac {
                num: bp_neg(&a.num),
                den: a.den.clone(),
            }),
            Payload::GU(a) => Payload::GU(GaussFrac {
                num: bp_neg(&a.num),
                den: a.den.clone(),
            }),
        };
        Elem {
            domain: self.domain.clone(),
            payload,
        }
    }

    pub fn mul(&self, other: &Elem) -> Elem {
        self.assert_same_domain(other);
        let payload = match (&self.payload, &other.payload) {
            (Payload::Q(a), Payload::Q(b)) => Payload::Q(a * b),
            (Payload::U(a), Payload::U(b)) => Payload::U(a.mul(b)),
            (Payload::GQ(a), Payload::GQ(b)) => {
                let model = BigRational::zero();
                Payload::GQ(GaussFrac::canonical(
                    bp_mul(&a.num, &b.num, &model),
                    bp_mul(&a.den, &b.den, &model),
                    &model,
                ))
            }
            (Payload::GU(a), Payload::GU(b)) => {
                let model = FpRatFn::zero(self.domain.p());
                Payload::GU(GaussFrac::canonical(
                    bp_mul(&a.num, &b.num, &model),
                    bp_mul(&a.den, &b.den, &model),
                    &model,
                ))
            }
            _ => unreachable!("payload/domain mismatch"),
        };
        Elem {
            domain: self.domain.clone(),
            payload,
        }
    }

    /// Field division. Panics on a zero divisor, matching the underlying
    /// exact arithmetic types.
    pub fn div(&self, other: &Elem) -> Elem {
        self.assert_same_domain(other);
        assert!(!other.is_zero(), "division by zero element");
        let payload = match (&self.payload, &other.payload) {
            (Payload::Q(a), Payload::Q(b)) => Payload::Q(a / b),
            (Payload::U(a), Payload::U(b)) => Payload::U(a.div(b).unwrap()),
            (Payload::GQ(a), Payload::GQ(b)) => {
                let model = BigRational::zero();
                Payload::GQ(GaussFrac::canonical(
                    bp_mul(&a.num, &b.den, &model),
                    bp_mul(&a.den, &b.num, &model),
                    &model,
                ))
            }
            (Payload::GU(a), Payload::GU(b)) => {
                let model = FpRatFn::zero(self.domain.p());
                Payload::GU(GaussFrac::canonical(
                    bp_mul(&a.num, &b.den, &model),
                    bp_mul(&a.den, &b.num, &model),
                    &model,
                ))
            }
            _ => unreachable!("payload/domain mismatch"),
        };
        Elem {
            domain: self.domain.clone(),
            payload,
        }
    }

    pub fn powi(&self, e: i64) -> Elem {
        if e < 0 {
            return self.domain.one().div(&self.powi(-e));
        }
        let mut acc = self.domain.one();
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Inject a base-domain element into a Gauss extension of that base.
    pub fn lift_to(&self, ext: &CoeffDomain) -> Elem {
        match ext {
            CoeffDomain::GaussExt { base, .. } => {
                assert_eq!(base.as_ref(), &self.domain, "extension of a different base");
                let payload = match &self.payload {
                    Payload::Q(x) => Payload::GQ(GaussFrac::from_base(x.clone())),
                    Payload::U(x) => Payload::GU(GaussFrac::from_base(x.clone())),
                    _ => unreachable!("base element expected"),
                };
                Elem {
                    domain: ext.clone(),
                    payload,
                }
            }
            _ => panic!("lift_to expects a Gauss extension"),
        }
    }

    /// Image in the residue field: F_p for the base domains, F_p(s) for a
    /// Gauss extension where s is the reduced parameter t^b·π^{-c}, ρ = c/b.
    pub fn residue(&self) -> Result<FpRatFn> {
        let v = self.val();
        if v.is_negative() {
            return Err(Error::NegativeValuation);
        }
        let p = self.domain.p();
        if v > ValQ::zero() {
            return Ok(FpRatFn::zero(p));
        }
        match &self.payload {
            Payload::Q(x) => {
                // val 0: numerator and denominator are p-units
                let n = bigint_mod_p(x.numer(), p);
                let d = bigint_mod_p(x.denom(), p);
                Ok(FpRatFn::constant(p, fp::fp_mul(n, fp::fp_inv(d, p), p)))
            }
            Payload::U(x) => Ok(FpRatFn::constant(p, x.eval_at_zero()?)),
            Payload::GQ(_) | Payload::GU(_) => self.residue_gauss(),
        }
    }

    fn residue_gauss(&self) -> Result<FpRatFn> {
        // Reduce numerator and denominator separately at their own levels,
        // then divide; a val-0 element leaves no leftover parameter factor
        // beyond powers of s.
        let p = self.domain.p();
        let rho = self.domain.gauss_rho().unwrap();
        let (b, c) = self.domain.residue_parameter_exponents().unwrap();
        let spow = |k: i64| -> FpRatFn {
            let x = FpPoly::monomial(p, 1, k.unsigned_abs() as usize);
            if k >= 0 {
                FpRatFn::from_poly(x)
            } else {
                FpRatFn::new(FpPoly::constant(p, 1), x).unwrap()
            }
        };
        let reduce_poly = |coeff_val: &dyn Fn(usize) -> ValQ,
                           coeff_res_scaled: &dyn Fn(usize, i64) -> Result<FpRatFn>,
                           len: usize|
         -> Result<(FpRatFn, QRat, i64)> {
            // level = min_j val(c_j) + jρ; returns (residue unit, level, l0)
            let mut level = ValQ::Inf;
            for j in 0..len {
                level = level.min(coeff_val(j).add(&ValQ::Fin(rho * QRat::from_integer(j as i64))));
            }
            let level = level.expect_finite();
            // pick σ = t^{l0}·π^{m0} of valuation `level`
            let sigma = self
                .domain
                .elem_of_val(level)
                .ok_or_else(|| Error::invalid("level not in the value group"))?;
            let (l0, m0) = gauss_monomial_exponents(&sigma);
            let mut acc = FpRatFn::zero(p);
            for j in 0..len {
                let vj = coeff_val(j).add(&ValQ::Fin(rho * QRat::from_integer(j as i64)));
                if vj != ValQ::Fin(level) {
                    continue;
                }
                let d = j as i64 - l0;
                debug_assert_eq!(d.rem_euclid(b), 0, "contributing exponent must align");
                let k = d.div_euclid(b);
                // c_j t^j / σ = (c_j π^{-m0 + c·k}) · s^k
                let unit = coeff_res_scaled(j, -m0 + c * k)?;
                acc = acc.add(&unit.mul(&spow(k)));
            }
            Ok((acc, level, l0))
        };

        match &self.payload {
            Payload::GQ(x) => {
                let base = self.domain.base().clone();
                let pb = |v: &BigRational| Elem {
                    domain: base.clone(),
                    payload: Payload::Q(v.clone()),
                };
                let go = |poly: &Vec<BigRational>| {
                    let cv = |j: usize| pb(&poly[j]).val();
                    let cr =
                        |j: usize, e: i64| pb(&poly[j]).mul(&base.uniformizer().powi(e)).residue();
                    reduce_poly(&cv, &cr, poly.len())
                };
                let (rn, _, _) = go(&x.num)?;
                let (rd, _, _) = go(&x.den)?;
                debug_assert!(!rd.is_zero());
                rn.div(&rd)
            }
            Payload::GU(x) => {
                let base = self.domain.base().clone();
                let pb = |v: &FpRatFn| Elem {
                    domain: base.clone(),
                    payload: Payload::U(v.clone()),
                };
                let go = |poly: &Vec<FpRatFn>| {
                    let cv = |j: usize| pb(&poly[j]).val();
                    let cr =
                        |j: usize, e: i64| pb(&poly[j]).mul(&base.uniformizer().powi(e)).residue();
                    reduce_poly(&cv, &cr, poly.len())
                };
                let (rn, _, _) = go(&x.num)?;
                let (rd, _, _) = go(&x.den)?;
                debug_assert!(!rd.is_zero());
                rn.div(&rd)
            }
            _ => unreachable!(),
        }
    }

    /// p-th root when one exists in the domain. Only meaningful in
    /// characteristic p; mixed characteristic returns None except for 0/±1
    /// style trivialities that never matter to callers.
    pub fn pth_root(&self) -> Option<Elem> {
        if !self.domain.has_char_p() {
            return None;
        }
        let payload = match &self.payload {
            Payload::U(x) => Payload::U(x.pth_root()?),
            Payload::GU(x) => {
                let p = self.domain.p() as usize;
                let root_poly = |poly: &Vec<FpRatFn>| -> Option<Vec<FpRatFn>> {
                    let mut out = vec![];
                    for (j, c) in poly.iter().enumerate() {
                        if j % p == 0 {
                            out.push(c.pth_root()?);
                        } else if !c.bis_zero() {
                            return None;
                        }
                    }
                    Some(out)
                };
                Payload::GU(GaussFrac {
                    num: bp_trim(root_poly(&x.num)?),
                    den: bp_trim(root_poly(&x.den)?),
                })
            }
            _ => return None,
        };
        Some(Elem {
            domain: self.domain.clone(),
            payload,
        })
    }
}

fn gauss_monomial_exponents(e: &Elem) -> (i64, i64) {
    // e is t^l·π^m as constructed by elem_of_val; recover (l, m).
    match &e.payload {
        Payload::GQ(x) => {
            let l = x.num.len() as i64 - 1 - (x.den.len() as i64 - 1);
            let coeff_n = x.num.last().unwrap();
            let p = BigInt::from(e.domain.p());
            let m = padic_ord(coeff_n.numer(), &p) - padic_ord(coeff_n.denom(), &p);
            (l, m)
        }
        Payload::GU(x) => {
            let l = x.num.len() as i64 - 1 - (x.den.len() as i64 - 1);
            let coeff_n = x.num.last().unwrap();
            let m = coeff_n.ord_at_zero().unwrap();
            (l, m)
        }
        _ => panic!("not a Gauss element"),
    }
}

fn padic_ord(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.clone();
    let mut k = 0i64;
    loop {
        let (q, r) = num_integer::Integer::div_rem(&n, p);
        if r.is_zero() {
            k += 1;
            n = q;
        } else {
            return k;
        }
    }
}

fn bigint_mod_p(n: &BigInt, p: u64) -> u64 {
    let m = num_integer::Integer::mod_floor(n, &BigInt::from(p));
    let digits = m.to_u64_digits().1;
    digits.first().copied().unwrap_or(0)
}

fn gauss_poly_string<B: BField>(poly: &[B], show: impl Fn(&B) -> String) -> String {
    if poly.is_empty() {
        return "0".to_string();
    }
    let mut parts = vec![];
    for (j, c) in poly.iter().enumerate() {
        if c.bis_zero() {
            continue;
        }
        let cs = show(c);
        let coeff = if cs.contains('+') || cs.contains('-') || cs.contains('/') {
            format!("({cs})")
        } else {
            cs
        };
        let term = match j {
            0 => coeff,
            1 if coeff == "1" => "t".to_string(),
            1 => format!("{coeff}*t"),
            _ if coeff == "1" => format!("t^{j}"),
            _ => format!("{coeff}*t^{j}"),
        };
        parts.push(term);
    }
    parts.join("+")
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.payload {
            Payload::Q(x) => write!(f, "{x}"),
            Payload::U(x) => write!(f, "{}", x.to_string_in("u")),
            Payload::GQ(x) => {
                let n = gauss_poly_string(&x.num, |c: &BigRational| c.to_string());
                if x.den.len() == 1 && x.den[0].is_one() {
                    write!(f, "{n}")
                } else {
                    let d = gauss_poly_string(&x.den, |c: &BigRational| c.to_string());
                    write!(f, "({n})/({d})")
                }
            }
            Payload::GU(x) => {
                let n = gauss_poly_string(&x.num, |c: &FpRatFn| c.to_string_in("u"));
                let den_is_one = x.den.len() == 1 && x.den[0] == FpRatFn::one(self.domain.p());
                if den_is_one {
                    write!(f, "{n}")
                } else {
                    let d = gauss_poly_string(&x.den, |c: &FpRatFn| c.to_string_in("u"));
                    write!(f, "({n})/({d})")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u64) -> CoeffDomain {
        CoeffDomain::mixed(p).unwrap()
    }

    fn e(p: u64) -> CoeffDomain {
        CoeffDomain::equal(p).unwrap()
    }

    #[test]
    fn padic_valuations() {
        let d = m(3);
        assert_eq!(d.from_i64(9).val(), ValQ::int(2));
        let d5 = m(5);
        assert_eq!(d5.from_ratio(1, 5).unwrap().val(), ValQ::int(-1));
        assert_eq!(d.zero().val(), ValQ::Inf);
    }

    #[test]
    fn gauss_valuation_of_two_plus_t() {
        let d = m(2).gauss_extend(qrat(1, 2)).unwrap();
        let x = d.from_i64(2).add(&d.parameter());
        assert_eq!(x.val(), ValQ::rat(1, 2));
    }

    #[test]
    fn residues() {
        assert_eq!(m(3).from_i64(7).residue().unwrap().as_constant(), Some(1));
        let d = e(2);
        let one_plus_u = d.one().add(&d.uniformizer());
        assert_eq!(one_plus_u.residue().unwrap().as_constant(), Some(1));
        assert!(matches!(
            m(3).from_ratio(1, 3).unwrap().residue(),
            Err(Error::NegativeValuation)
        ));
    }

    #[test]
    fn gauss_residue_with_fractional_rho() {
        // rho = 1/2 over Q_2: s = t^2/2, so t^2/2 has residue s.
        let d = m(2).gauss_extend(qrat(1, 2)).unwrap();
        let t = d.parameter();
        let x = t.mul(&t).div(&d.from_i64(2));
        assert_eq!(x.val(), ValQ::zero());
        let r = x.residue().unwrap();
        assert_eq!(r, FpRatFn::var(2));
    }

    #[test]
    fn elem_of_val_hits_fractional_targets() {
        let d = m(3).gauss_extend(qrat(2, 3)).unwrap();
        for v in [qrat(1, 3), qrat(-1, 3), qrat(5, 3), qrat(2, 1)] {
            let e = d.elem_of_val(v).unwrap();
            assert_eq!(e.val(), ValQ::Fin(v), "target {v}");
        }
        assert!(d.elem_of_val(qrat(1, 2)).is_none());
    }

    #[test]
    fn pth_root_in_equal_char() {
        let d = e(2);
        let u = d.uniformizer();
        let sq = u.mul(&u);
        assert_eq!(sq.pth_root(), Some(u.clone()));
        assert_eq!(u.pth_root(), None);
    }
}
