//! Resultants through fraction-free elimination, and the root-distance
//! oracle built on them: the nonzero roots of R(h) = Res_z(f(z), g(z+h))
//! are exactly the differences α − β between roots of f and roots of g, so
//! the Newton polygon of R reads off the multiset of pairwise distance
//! valuations without ever producing a root.

use crate::polygon::newton_polygon_of;
use crate::valfield::poly::Poly;
use crate::valfield::{CoeffDomain, Elem, QRat};
use crate::{Error, Result};

/// Polynomial in z whose coefficients are polynomials in a second variable.
/// Coefficient index = z-exponent.
pub(crate) struct BiPoly {
    pub coeffs: Vec<Poly>,
    pub domain: CoeffDomain,
}

impl BiPoly {
    fn deg(&self) -> usize {
        debug_assert!(self.coeffs.last().is_some_and(|c| !c.is_zero()));
        self.coeffs.len() - 1
    }
}

/// f(z) viewed as a bivariate with constant outer coefficients.
pub(crate) fn bipoly_const(f: &Poly) -> BiPoly {
    BiPoly {
        coeffs: f
            .coeffs()
            .iter()
            .map(|c| Poly::constant(c.clone()))
            .collect(),
        domain: f.domain().clone(),
    }
}

/// f(z + h) as a polynomial in z with coefficients in h: substitute the
/// linear form and collect. Built by Horner in (z + h).
pub(crate) fn bipoly_shift_by_var(f: &Poly) -> BiPoly {
    let d = f.domain().clone();
    let zero = || Poly::zero(&d);
    let one = Poly::constant(d.one());
    let h = Poly::var(&d);
    // acc is a vector of h-polynomials, index = z-exponent
    let mut acc: Vec<Poly> = vec![];
    for c in f.coeffs().iter().rev() {
        // acc = acc * (z + h) + c
        let mut next: Vec<Poly> = vec![zero(); acc.len() + 1];
        for (i, a) in acc.iter().enumerate() {
            next[i + 1] = next[i + 1].add(&a.mul(&one));
            next[i] = next[i].add(&a.mul(&h));
        }
        next[0] = next[0].add(&Poly::constant(c.clone()));
        while next.last().is_some_and(|p| p.is_zero()) {
            next.pop();
        }
        acc = next;
    }
    BiPoly {
        coeffs: acc,
        domain: d,
    }
}

/// Resultant of two bivariates with respect to z, as a polynomial in the
/// other variable. Bareiss fraction-free elimination on the Sylvester
/// matrix keeps every intermediate entry a polynomial.
pub(crate) fn resultant_z(a: &BiPoly, b: &BiPoly) -> Result<Poly> {
    let d = &a.domain;
    let (m, n) = (a.deg(), b.deg());
    if m == 0 && n == 0 {
        return Ok(Poly::constant(d.one()));
    }
    let size = m + n;
    let zero = || Poly::zero(d);
    let mut mat: Vec<Vec<Poly>> = vec![vec![zero(); size]; size];
    for row in 0..n {
        for (k, c) in a.coeffs.iter().enumerate() {
            mat[row][row + (m - k)] = c.clone();
        }
    }
    for row in 0..m {
        for (k, c) in b.coeffs.iter().enumerate() {
            mat[n + row][row + (n - k)] = c.clone();
        }
    }

    // Bareiss: division-free up to exact divisions by the previous pivot.
    let mut prev = Poly::constant(d.one());
    let mut sign_flip = false;
    for k in 0..size - 1 {
        if mat[k][k].is_zero() {
            let swap = (k + 1..size).find(|&r| !mat[r][k].is_zero());
            match swap {
                Some(r) => {
                    mat.swap(k, r);
                    sign_flip = !sign_flip;
                }
                None => return Ok(Poly::zero(d)),
            }
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let t = mat[i][j].mul(&mat[k][k]).sub(&mat[i][k].mul(&mat[k][j]));
                mat[i][j] = t.div_exact(&prev);
            }
            mat[i][k] = Poly::zero(d);
        }
        prev = mat[k][k].clone();
    }
    let mut det = mat[size - 1][size - 1].clone();
    if sign_flip {
        det = det.neg();
    }
    Ok(det)
}

/// Difference resultant R(h) = Res_z(f(z), g(z + h)).
pub fn difference_resultant(f: &Poly, g: &Poly) -> Result<Poly> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.degree() == Some(0) || g.degree() == Some(0) {
        // no roots on one side: empty distance data, constant resultant
        return Ok(Poly::constant(f.domain().one()));
    }
    resultant_z(&bipoly_const(f), &bipoly_shift_by_var(g))
}

/// Multiset of valuations {val(α − β)}, over ordered pairs of roots α of f
/// and β of g with α ≠ β, counted with root multiplicities. Sorted
/// descending. Pairs at distance zero in the ring (equal roots) are
/// stripped via the h-order of the resultant.
pub fn cross_distance_multiset(f: &Poly, g: &Poly) -> Result<Vec<(QRat, usize)>> {
    let r = difference_resultant(f, g)?;
    if r.is_zero() {
        return Err(Error::invalid("degenerate difference resultant"));
    }
    if r.degree() == Some(0) {
        return Ok(vec![]);
    }
    let np = newton_polygon_of(&r)?;
    Ok(np.root_valuations())
}

/// The multiset {val(α − β) : α ≠ β distinct roots of f}, ordered pairs.
/// The input must be squarefree over the closure; equal-root pairs would
/// otherwise contaminate the h-power being stripped.
pub fn pairwise_distance_multiset(f: &Poly) -> Result<Vec<(QRat, usize)>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    cross_distance_multiset(f, f)
}

/// Flatten a (valuation, count) multiset into a sorted descending list.
pub fn flatten_multiset(ms: &[(QRat, usize)]) -> Vec<QRat> {
    let mut out = vec![];
    for &(v, m) in ms {
        for _ in 0..m {
            out.push(v);
        }
    }
    out.sort();
    out.reverse();
    out
}

/// Elem-level helper used by tests: build Π(z - r) and compare the oracle
/// against directly computed differences.
pub fn direct_pairwise_valuations(roots: &[Elem]) -> Vec<QRat> {
    let mut out = vec![];
    for (i, a) in roots.iter().enumerate() {
        for (j, b) in roots.iter().enumerate() {
            if i != j {
                out.push(a.sub(b).val().expect_finite());
            }
        }
    }
    out.sort();
    out.reverse();
    out
}
