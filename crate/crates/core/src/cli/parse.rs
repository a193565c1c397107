//! The problem-file grammar: named blocks of `key = value` lines.
//!
//! ```text
//! # exact splitting-radius problem
//! [field]
//! mode = mixed            # or: equal
//! p = 3
//!
//! [map]
//! numerator = 0, 0, 1     # coefficients, ascending degree
//! denominator = 1
//!
//! [roots]                 # optional exact fiber roots
//! fiber 9 = 3, -3
//!
//! [skeleton]              # optional user skeleton vertices
//! vertex = 0
//! vertex = inf
//!
//! [queries]
//! eval = 9
//! eval = disk(0; 1/2)
//! eval = inf
//! charts = tuple 1 ; 1
//! charts = radius 1 ; ((0,1),(1,0))
//! charts = m 2 ; 0
//! oracle = 9
//!
//! [budget]
//! edge_samples = 64
//! constancy_samples = 30
//! ```
//!
//! Element literals are expressions over integers and the uniformizer `u`
//! (equal characteristic only) with `+ - * / ^` and parentheses. Radius
//! valuations are rationals `a/b` or `INF`. Points are `inf`, an element,
//! or `disk(center; valuation)`.

use crate::berkline::BerkPoint;
use crate::charts::PolyRadiusTuple;
use crate::splitting::{normalize, RationalMapNF, VerifyBudget};
use crate::valfield::poly::Poly;
use crate::valfield::{CoeffDomain, Elem, QRat, ValQ};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub enum ChartsQuery {
    Tuple { a: Elem, rval: QRat },
    Radius { a: Elem, tuple: PolyRadiusTuple },
    M { mpp: ValQ, delta: QRat },
}

#[derive(Debug, Clone)]
pub enum Query {
    Eval(BerkPoint),
    Charts(ChartsQuery),
    Oracle(Elem),
}

#[derive(Debug, Clone)]
pub struct ProblemFile {
    pub domain: CoeffDomain,
    pub map: RationalMapNF,
    pub hints: Vec<(Elem, Vec<Elem>)>,
    pub skeleton: Option<Vec<BerkPoint>>,
    pub queries: Vec<Query>,
    pub budget: VerifyBudget,
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
    col0: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str, line: usize, col0: usize) -> Self {
        Cursor {
            s: s.as_bytes(),
            pos: 0,
            line,
            col0,
        }
    }

    fn col(&self) -> usize {
        self.col0 + self.pos + 1
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && (self.s[self.pos] == b' ' || self.s[self.pos] == b'\t') {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        match self.bump() {
            Some(x) if x == c => Ok(()),
            _ => Err(perr(
                self.line,
                self.col(),
                format!("expected '{}'", c as char),
            )),
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn parse_uint(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(perr(self.line, self.col(), "expected a number"));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse::<u64>()
            .map_err(|_| perr(self.line, self.col(), "number too large"))
    }

    // expr := term (('+'|'-') term)*
    fn parse_elem(&mut self, domain: &CoeffDomain) -> Result<Elem> {
        let mut acc = self.parse_term(domain)?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.parse_term(domain)?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.parse_term(domain)?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self, domain: &CoeffDomain) -> Result<Elem> {
        let mut acc = self.parse_unary(domain)?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.parse_unary(domain)?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.parse_unary(domain)?;
                    if d.is_zero() {
                        return Err(perr(self.line, self.col(), "division by zero"));
                    }
                    acc = acc.div(&d);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_unary(&mut self, domain: &CoeffDomain) -> Result<Elem> {
        if self.eat(b'-') {
            return Ok(self.parse_unary(domain)?.neg());
        }
        self.parse_power(domain)
    }

    fn parse_power(&mut self, domain: &CoeffDomain) -> Result<Elem> {
        let base = self.parse_atom(domain)?;
        if self.eat(b'^') {
            let neg = self.eat(b'-');
            let e = self.parse_uint()? as i64;
            let e = if neg { -e } else { e };
            if e < 0 && base.is_zero() {
                return Err(perr(self.line, self.col(), "zero to a negative power"));
            }
            return Ok(base.powi(e));
        }
        Ok(base)
    }

    fn parse_atom(&mut self, domain: &CoeffDomain) -> Result<Elem> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.parse_elem(domain)?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'u') => {
                if !domain.has_char_p() {
                    return Err(perr(
                        self.line,
                        self.col(),
                        "the variable u only exists in equal characteristic",
                    ));
                }
                self.pos += 1;
                Ok(domain.uniformizer())
            }
            Some(b't') => {
                if !domain.is_gauss() {
                    return Err(perr(
                        self.line,
                        self.col(),
                        "the parameter t only exists in a Gauss extension",
                    ));
                }
                self.pos += 1;
                Ok(domain.parameter())
            }
            Some(c) if c.is_ascii_digit() => {
                // digit-by-digit accumulation keeps large literals exact
                let start_line = self.line;
                let _ = start_line;
                let mut acc = domain.zero();
                let ten = domain.from_i64(10);
                self.skip_ws();
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    let d = (self.s[self.pos] - b'0') as i64;
                    acc = acc.mul(&ten).add(&domain.from_i64(d));
                    self.pos += 1;
                }
                Ok(acc)
            }
            _ => Err(perr(self.line, self.col(), "expected an element literal")),
        }
    }

    fn parse_qrat(&mut self) -> Result<QRat> {
        let neg = self.eat(b'-');
        let n = self.parse_uint()? as i64;
        let d = if self.eat(b'/') {
            self.parse_uint()? as i64
        } else {
            1
        };
        if d == 0 {
            return Err(perr(self.line, self.col(), "zero denominator"));
        }
        let q = QRat::new(n, d);
        Ok(if neg { -q } else { q })
    }

    fn parse_valq(&mut self) -> Result<ValQ> {
        self.skip_ws();
        if self.s[self.pos..].starts_with(b"INF") {
            self.pos += 3;
            return Ok(ValQ::Inf);
        }
        Ok(ValQ::Fin(self.parse_qrat()?))
    }

    fn parse_point(&mut self, domain: &CoeffDomain) -> Result<BerkPoint> {
        self.skip_ws();
        if self.s[self.pos..].starts_with(b"inf") {
            self.pos += 3;
            return Ok(BerkPoint::Infinity);
        }
        if self.s[self.pos..].starts_with(b"disk(") {
            self.pos += 5;
            let c = self.parse_elem(domain)?;
            self.expect(b';')?;
            let v = self.parse_qrat()?;
            self.expect(b')')?;
            return Ok(BerkPoint::type_ii(c, v));
        }
        Ok(BerkPoint::TypeI(self.parse_elem(domain)?))
    }

    fn parse_tuple(&mut self) -> Result<PolyRadiusTuple> {
        self.expect(b'(')?;
        self.expect(b'(')?;
        let v11 = self.parse_valq()?;
        self.expect(b',')?;
        let v12 = self.parse_valq()?;
        self.expect(b')')?;
        self.expect(b',')?;
        self.expect(b'(')?;
        let v21 = self.parse_valq()?;
        self.expect(b',')?;
        let v22 = self.parse_valq()?;
        self.expect(b')')?;
        self.expect(b')')?;
        Ok(PolyRadiusTuple::two_by_two(v11, v12, v21, v22))
    }

    fn parse_elem_list(&mut self, domain: &CoeffDomain) -> Result<Vec<Elem>> {
        let mut out = vec![self.parse_elem(domain)?];
        while self.eat(b',') {
            out.push(self.parse_elem(domain)?);
        }
        Ok(out)
    }
}

struct RawLine {
    line_no: usize,
    section: String,
    key: String,
    key_col: usize,
    value: String,
    value_col: usize,
}

fn split_lines(text: &str) -> Result<Vec<RawLine>> {
    let mut out = vec![];
    let mut section = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let stripped = match raw.find('#') {
            Some(k) => &raw[..k],
            None => raw,
        };
        let t = stripped.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(name) = t.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| perr(line_no, raw.len(), "unterminated section header"))?;
            section = name.trim().to_string();
            continue;
        }
        let eq = stripped
            .find('=')
            .ok_or_else(|| perr(line_no, 1, "expected 'key = value'"))?;
        if section.is_empty() {
            return Err(perr(line_no, 1, "content before the first section header"));
        }
        let key = stripped[..eq].trim().to_string();
        let key_col = stripped.find(|c: char| !c.is_whitespace()).unwrap_or(0) + 1;
        let value = stripped[eq + 1..].trim().to_string();
        let value_col = eq + 2 + stripped[eq + 1..].len() - stripped[eq + 1..].trim_start().len();
        out.push(RawLine {
            line_no,
            section: section.clone(),
            key,
            key_col,
            value,
            value_col,
        });
    }
    Ok(out)
}

pub fn parse_problem(text: &str) -> Result<ProblemFile> {
    let lines = split_lines(text)?;

    // the field block first: everything else needs the domain
    let mut mode: Option<String> = None;
    let mut p: Option<u64> = None;
    for l in lines.iter().filter(|l| l.section == "field") {
        match l.key.as_str() {
            "mode" => mode = Some(l.value.clone()),
            "p" => {
                p = Some(
                    l.value
                        .parse::<u64>()
                        .map_err(|_| perr(l.line_no, l.value_col, "p must be a number"))?,
                )
            }
            other => {
                return Err(perr(
                    l.line_no,
                    l.key_col,
                    format!("unknown field key '{other}'"),
                ))
            }
        }
    }
    let p = p.ok_or_else(|| perr(1, 1, "missing [field] p"))?;
    let domain = match mode.as_deref() {
        Some("mixed") => CoeffDomain::mixed(p),
        Some("equal") => CoeffDomain::equal(p),
        Some(other) => {
            return Err(perr(
                1,
                1,
                format!("mode must be mixed or equal, got '{other}'"),
            ))
        }
        None => return Err(perr(1, 1, "missing [field] mode")),
    }
    .map_err(|e| perr(1, 1, e.to_string()))?;

    let mut num: Option<Vec<Elem>> = None;
    let mut den: Option<Vec<Elem>> = None;
    let mut hints: Vec<(Elem, Vec<Elem>)> = vec![];
    let mut skeleton: Vec<BerkPoint> = vec![];
    let mut queries: Vec<Query> = vec![];
    let mut budget = VerifyBudget::default();

    for l in &lines {
        let mut cur = Cursor::new(&l.value, l.line_no, l.value_col);
        match (l.section.as_str(), l.key.as_str()) {
            ("field", _) => {}
            ("map", "numerator") => {
                num = Some(cur.parse_elem_list(&domain)?);
            }
            ("map", "denominator") => {
                den = Some(cur.parse_elem_list(&domain)?);
            }
            ("roots", k) => {
                let fk = k
                    .strip_prefix("fiber")
                    .ok_or_else(|| perr(l.line_no, l.key_col, "roots keys look like 'fiber <x>'"))?
                    .trim();
                let mut kc = Cursor::new(fk, l.line_no, l.key_col);
                let at = kc.parse_elem(&domain)?;
                if !kc.at_end() {
                    return Err(perr(
                        l.line_no,
                        l.key_col,
                        "trailing input after fiber point",
                    ));
                }
                let roots = cur.parse_elem_list(&domain)?;
                hints.push((at, roots));
            }
            ("skeleton", "vertex") => {
                skeleton.push(cur.parse_point(&domain)?);
            }
            ("queries", "eval") => queries.push(Query::Eval(cur.parse_point(&domain)?)),
            ("queries", "oracle") => queries.push(Query::Oracle(cur.parse_elem(&domain)?)),
            ("queries", "charts") => {
                cur.skip_ws();
                let rest = &l.value;
                if let Some(arg) = rest.strip_prefix("tuple ") {
                    let mut c = Cursor::new(arg, l.line_no, l.value_col + 6);
                    let a = c.parse_elem(&domain)?;
                    c.expect(b';')?;
                    let rval = c.parse_qrat()?;
                    queries.push(Query::Charts(ChartsQuery::Tuple { a, rval }));
                } else if let Some(arg) = rest.strip_prefix("radius ") {
                    let mut c = Cursor::new(arg, l.line_no, l.value_col + 7);
                    let a = c.parse_elem(&domain)?;
                    c.expect(b';')?;
                    let tuple = c.parse_tuple()?;
                    queries.push(Query::Charts(ChartsQuery::Radius { a, tuple }));
                } else if let Some(arg) = rest.strip_prefix("m ") {
                    let mut c = Cursor::new(arg, l.line_no, l.value_col + 2);
                    let mpp = c.parse_valq()?;
                    c.expect(b';')?;
                    let delta = c.parse_qrat()?;
                    queries.push(Query::Charts(ChartsQuery::M { mpp, delta }));
                } else {
                    return Err(perr(
                        l.line_no,
                        l.value_col,
                        "charts queries: 'tuple <a> ; <v>', 'radius <a> ; <tuple>' or 'm <v> ; <d>'",
                    ));
                }
            }
            ("budget", "edge_samples") => {
                budget.edge_samples = l
                    .value
                    .parse()
                    .map_err(|_| perr(l.line_no, l.value_col, "expected a number"))?;
            }
            ("budget", "constancy_samples") => {
                budget.constancy_samples = l
                    .value
                    .parse()
                    .map_err(|_| perr(l.line_no, l.value_col, "expected a number"))?;
            }
            (s, k) => {
                return Err(perr(
                    l.line_no,
                    l.key_col,
                    format!("unknown entry [{s}] {k}"),
                ));
            }
        }
    }

    let num = num.ok_or_else(|| perr(1, 1, "missing [map] numerator"))?;
    let den = den.ok_or_else(|| perr(1, 1, "missing [map] denominator"))?;
    let map = normalize(
        &Poly::new(domain.clone(), num),
        &Poly::new(domain.clone(), den),
    )?;

    Ok(ProblemFile {
        domain,
        map,
        hints,
        skeleton: if skeleton.is_empty() {
            None
        } else {
            Some(skeleton)
        },
        queries,
        budget,
    })
}

/// Merge the [roots] block of an auxiliary hint file.
pub fn merge_hints(problem: &mut ProblemFile, text: &str) -> Result<()> {
    let lines = split_lines(text)?;
    for l in lines.iter().filter(|l| l.section == "roots") {
        let fk = l
            .key
            .strip_prefix("fiber")
            .ok_or_else(|| perr(l.line_no, l.key_col, "roots keys look like 'fiber <x>'"))?
            .trim();
        let mut kc = Cursor::new(fk, l.line_no, l.key_col);
        let at = kc.parse_elem(&problem.domain)?;
        let mut cur = Cursor::new(&l.value, l.line_no, l.value_col);
        let roots = cur.parse_elem_list(&problem.domain)?;
        problem.hints.push((at, roots));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: &str = "\
# the squaring map over Q_3
[field]
mode = mixed
p = 3

[map]
numerator = 0, 0, 1
denominator = 1

[queries]
eval = 9
eval = disk(0; 1/2)
eval = inf
charts = tuple 1 ; 1
charts = m 2 ; 0
oracle = 9
";

    #[test]
    fn parses_square_problem() {
        let pf = parse_problem(SQUARE).unwrap();
        assert_eq!(pf.map.d_sep, 2);
        assert_eq!(pf.queries.len(), 6);
        assert!(pf.skeleton.is_none());
    }

    #[test]
    fn element_expressions() {
        let d = CoeffDomain::equal(2).unwrap();
        let mut c = Cursor::new("(1+u)^3/u - u^2", 1, 1);
        let e = c.parse_elem(&d).unwrap();
        let u = d.uniformizer();
        let expect = d.one().add(&u).powi(3).div(&u).sub(&u.mul(&u));
        assert_eq!(e, expect);
    }

    #[test]
    fn gauss_parameter_literal() {
        use crate::valfield::qrat;
        let d = CoeffDomain::mixed(3)
            .unwrap()
            .gauss_extend(qrat(1, 2))
            .unwrap();
        let mut c = Cursor::new("3 + t^2/3", 1, 1);
        let e = c.parse_elem(&d).unwrap();
        assert_eq!(e.val(), crate::valfield::ValQ::Fin(qrat(0, 1)));
        let mut bad = Cursor::new("t", 1, 1);
        assert!(bad.parse_elem(&CoeffDomain::mixed(3).unwrap()).is_err());
    }

    #[test]
    fn parse_errors_carry_position() {
        let bad = "[field]\nmode = mixed\np = x\n";
        match parse_problem(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn big_integer_literus() {
        let d = CoeffDomain::mixed(3).unwrap();
        let mut c = Cursor::new("123456789012345678901234567890", 1, 1);
        let e = c.parse_elem(&d).unwrap();
        assert_eq!(e.to_string(), "123456789012345678901234567890");
    }
}
