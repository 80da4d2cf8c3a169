//! Homogeneous polynomials over `Q`: representation, parsing, derivatives,
//! and monomial enumeration.
//!
//! A [`HomogPoly`] is a term map from exponent vectors to nonzero rational
//! coefficients, all of one total degree.  The parser accepts the ASCII
//! grammar
//!
//! ```text
//! expr   := [sign] term ( ('+'|'-') term )*
//! term   := [coeff '*'] factor ( '*' factor )*
//! factor := var [ '^' positive-integer ]
//! coeff  := ['-'] integer [ '/' integer ]
//! ```
//!
//! with whitespace ignored and variables drawn from a declared list.
//! Homogeneity is checked on the raw term list *before* cancellation, so
//! `x^2 - x^2 + y^3` is rejected even though the offending terms cancel;
//! a polynomial that cancels to zero is rejected separately.
//!
//! Monomial bases of the graded pieces are enumerated in descending
//! graded-reverse-lexicographic order ([`monomials_of_degree`]), the order
//! every matrix in this crate indexes its rows and columns by.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use thiserror::Error;

use crate::Rat;

/// Exponent vector of a monomial; its length is the ambient variable count.
pub type ExponentVector = Vec<u32>;

/// Errors raised while reading a polynomial from text.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseError {
    /// The input does not match the polynomial grammar.
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    /// Two raw terms (before any cancellation) have different total degrees.
    #[error("polynomial is not homogeneous: found terms of degree {degree_a} and {degree_b}")]
    NotHomogeneous { degree_a: u32, degree_b: u32 },
    /// All terms cancelled; the zero polynomial has no degree.
    #[error("polynomial is identically zero after collecting terms")]
    ZeroPolynomial,
}

fn syn(pos: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        pos,
        msg: msg.into(),
    }
}

/// A homogeneous polynomial in `n_vars ≥ 2` variables with rational
/// coefficients.
///
/// Invariants: every stored exponent vector has length `n_vars` and total
/// degree `degree`; no zero coefficients are stored.  The zero polynomial
/// (empty term map) never results from parsing or [`HomogPoly::from_terms`],
/// but partial derivatives may be zero, so an empty map is representable and
/// [`HomogPoly::is_zero`] reports it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogPoly {
    n_vars: usize,
    degree: u32,
    terms: BTreeMap<ExponentVector, Rat>,
}

impl HomogPoly {
    /// Build a polynomial from raw terms, collecting duplicates.
    ///
    /// Degrees are compared across the raw list before collection, matching
    /// the parser's behaviour.  Returns `ZeroPolynomial` if everything
    /// cancels.  Panics on structural misuse (empty input, wrong exponent
    /// lengths, fewer than two variables, degree zero): those are programmer
    /// errors, not data errors.
    pub fn from_terms(
        n_vars: usize,
        terms: impl IntoIterator<Item = (ExponentVector, Rat)>,
    ) -> Result<Self, ParseError> {
        assert!(n_vars >= 2, "need at least two variables");
        let mut map: BTreeMap<ExponentVector, Rat> = BTreeMap::new();
        let mut degree: Option<u32> = None;
        let mut any = false;
        for (e, c) in terms {
            any = true;
            assert_eq!(e.len(), n_vars, "exponent vector length mismatch");
            let deg: u32 = e.iter().sum();
            match degree {
                None => degree = Some(deg),
                Some(d0) if d0 != deg => {
                    return Err(ParseError::NotHomogeneous {
                        degree_a: d0,
                        degree_b: deg,
                    })
                }
                _ => {}
            }
            if c.is_zero() {
                continue;
            }
            let entry = map.entry(e).or_insert_with(Rat::zero);
            *entry += c;
        }
        map.retain(|_, c| !c.is_zero());
        assert!(any, "no terms supplied");
        let degree = degree.unwrap();
        assert!(degree >= 1, "degree must be at least 1");
        if map.is_empty() {
            return Err(ParseError::ZeroPolynomial);
        }
        Ok(HomogPoly {
            n_vars,
            degree,
            terms: map,
        })
    }

    fn raw(n_vars: usize, degree: u32, terms: BTreeMap<ExponentVector, Rat>) -> Self {
        HomogPoly {
            n_vars,
            degree,
            terms,
        }
    }

    /// Number of ambient variables.
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Total degree of every term.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// The term map (exponent vector → nonzero coefficient).
    pub fn terms(&self) -> &BTreeMap<ExponentVector, Rat> {
        &self.terms
    }

    /// True for the zero polynomial (possible only via differentiation).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the given monomial, zero if absent.
    pub fn coeff(&self, e: &[u32]) -> Rat {
        self.terms.get(e).cloned().unwrap_or_else(Rat::zero)
    }

    /// All `n` partial derivatives, in variable order.  The `i`-th entry is
    /// `∂f/∂x_i`, of degree `d − 1`; it is the zero polynomial when `x_i`
    /// does not occur in `f`.
    pub fn partials(&self) -> Vec<HomogPoly> {
        (0..self.n_vars)
            .map(|i| {
                let mut map = BTreeMap::new();
                for (e, c) in &self.terms {
                    if e[i] > 0 {
                        let mut e2 = e.clone();
                        e2[i] -= 1;
                        let coeff = c * Rat::from(BigInt::from(e[i]));
                        let slot = map.entry(e2).or_insert_with(Rat::zero);
                        *slot += coeff;
                    }
                }
                map.retain(|_, c: &mut Rat| !c.is_zero());
                HomogPoly::raw(self.n_vars, self.degree.saturating_sub(1), map)
            })
            .collect()
    }

    /// Product of two polynomials over the same variables.
    pub fn mul(&self, other: &HomogPoly) -> HomogPoly {
        assert_eq!(self.n_vars, other.n_vars);
        let mut map: BTreeMap<ExponentVector, Rat> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: ExponentVector = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let slot = map.entry(e).or_insert_with(Rat::zero);
                *slot += ca * cb;
            }
        }
        map.retain(|_, c| !c.is_zero());
        HomogPoly::raw(self.n_vars, self.degree + other.degree, map)
    }

    /// `self` raised to the power `e ≥ 1`.
    pub fn pow(&self, e: u32) -> HomogPoly {
        assert!(e >= 1);
        let mut acc = self.clone();
        for _ in 1..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `self` scaled by a nonzero rational.
    pub fn scaled(&self, c: &Rat) -> HomogPoly {
        assert!(!c.is_zero());
        let terms = self
            .terms
            .iter()
            .map(|(e, v)| (e.clone(), v * c))
            .collect();
        HomogPoly::raw(self.n_vars, self.degree, terms)
    }

    /// Sum of two polynomials of equal degree; `Err(ZeroPolynomial)` if the
    /// result cancels to zero.
    pub fn add(&self, other: &HomogPoly) -> Result<HomogPoly, ParseError> {
        assert_eq!(self.n_vars, other.n_vars);
        assert_eq!(self.degree, other.degree, "degree mismatch in sum");
        let mut map = self.terms.clone();
        for (e, c) in &other.terms {
            let slot = map.entry(e.clone()).or_insert_with(Rat::zero);
            *slot += c;
        }
        map.retain(|_, c| !c.is_zero());
        if map.is_empty() {
            return Err(ParseError::ZeroPolynomial);
        }
        Ok(HomogPoly::raw(self.n_vars, self.degree, map))
    }

    /// Difference of two polynomials of equal degree.
    pub fn sub(&self, other: &HomogPoly) -> Result<HomogPoly, ParseError> {
        self.add(&other.scaled(&-Rat::one()))
    }

    /// The terms scaled by the positive rational that clears denominators
    /// and removes integer content, sorted in descending grevlex order.
    ///
    /// The result is a primitive integer polynomial that is a positive
    /// rational multiple of `self`; every matrix built from `f` uses this
    /// normal form so that ranks and kernels are computed over `Z`.
    pub fn integer_terms(&self) -> Vec<(ExponentVector, BigInt)> {
        if self.terms.is_empty() {
            return Vec::new();
        }
        let mut lcm = BigInt::one();
        for c in self.terms.values() {
            lcm = lcm.lcm(c.denom());
        }
        let mut out: Vec<(ExponentVector, BigInt)> = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), c.numer() * (&lcm / c.denom())))
            .collect();
        let mut content = BigInt::zero();
        for (_, c) in &out {
            content = content.gcd(c);
        }
        if !content.is_one() {
            for (_, c) in &mut out {
                *c = &*c / &content;
            }
        }
        out.sort_by(|a, b| grevlex_cmp(&b.0, &a.0));
        out
    }

    /// Integer partial derivatives of the primitive integer form of `f`,
    /// each sorted in descending grevlex order.
    ///
    /// All `n` lists come from one common scaling of `f`, so they are the
    /// partials of a single polynomial — the property every Koszul-complex
    /// matrix relies on.  Entry `i` is empty when `∂f/∂x_i = 0`.
    pub fn integer_partials(&self) -> Vec<Vec<(ExponentVector, BigInt)>> {
        let base = self.integer_terms();
        (0..self.n_vars)
            .map(|i| {
                let mut v: Vec<(ExponentVector, BigInt)> = base
                    .iter()
                    .filter(|(e, _)| e[i] > 0)
                    .map(|(e, c)| {
                        let mut e2 = e.clone();
                        e2[i] -= 1;
                        (e2, c * BigInt::from(e[i]))
                    })
                    .collect();
                v.sort_by(|a, b| grevlex_cmp(&b.0, &a.0));
                v
            })
            .collect()
    }

    /// For a ternary polynomial: is the monomial support contained in one
    /// affine line of the degree-`d` simplex slice?  (`None` when
    /// `n_vars ≠ 3`.)  Curves with collinear support are the known source of
    /// failures of the delta-positivity condition on the candidate set.
    pub fn is_extremely_degenerated(&self) -> Option<bool> {
        if self.n_vars != 3 {
            return None;
        }
        // Project to the first two exponents: the third is determined by the
        // degree, so collinearity in the simplex slice is plane collinearity.
        let pts: Vec<(i64, i64)> = self
            .terms
            .keys()
            .map(|e| (e[0] as i64, e[1] as i64))
            .collect();
        if pts.len() <= 2 {
            return Some(true);
        }
        let (x0, y0) = pts[0];
        let (vx, vy) = (pts[1].0 - x0, pts[1].1 - y0);
        Some(
            pts[2..]
                .iter()
                .all(|&(x, y)| vx * (y - y0) - vy * (x - x0) == 0),
        )
    }

    /// Render using the given variable names, terms in descending grevlex
    /// order.  The output re-parses to an equal polynomial.
    pub fn format(&self, vars: &[String]) -> String {
        assert_eq!(vars.len(), self.n_vars);
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut keys: Vec<&ExponentVector> = self.terms.keys().collect();
        keys.sort_by(|a, b| grevlex_cmp(b, a));
        let mut out = String::new();
        for (idx, e) in keys.iter().enumerate() {
            let c = &self.terms[*e];
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut pieces: Vec<String> = Vec::new();
            if !abs.is_one() {
                pieces.push(crate::rat_string(&abs));
            }
            for (i, &p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => pieces.push(vars[i].clone()),
                    _ => pieces.push(format!("{}^{}", vars[i], p)),
                }
            }
            if pieces.is_empty() {
                pieces.push(crate::rat_string(&abs));
            }
            out.push_str(&pieces.join("*"));
        }
        out
    }
}

/// Graded reverse lexicographic comparison of exponent vectors.
///
/// `a` exceeds `b` when its total degree is larger, or, at equal degree,
/// when the last nonzero entry of `a − b` is negative (equivalently:
/// scanning from the last variable towards the first, at the first
/// difference the smaller entry wins).
pub fn grevlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    debug_assert_eq!(a.len(), b.len());
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    match da.cmp(&db) {
        Ordering::Equal => {}
        other => return other,
    }
    for i in (0..a.len()).rev() {
        match a[i].cmp(&b[i]) {
            Ordering::Equal => continue,
            Ordering::Less => return Ordering::Greater,
            Ordering::Greater => return Ordering::Less,
        }
    }
    Ordering::Equal
}

/// All exponent vectors of length `n_vars` and total degree `k`, in
/// descending grevlex order.  The list has `C(k + n − 1, n − 1)` entries and
/// is the basis every graded matrix in this crate indexes by.
pub fn monomials_of_degree(n_vars: usize, k: u32) -> Vec<ExponentVector> {
    assert!(n_vars >= 1);
    let mut out = Vec::new();
    let mut cur = vec![0u32; n_vars];
    fn rec(i: usize, rem: u32, cur: &mut ExponentVector, out: &mut Vec<ExponentVector>) {
        if i + 1 == cur.len() {
            cur[i] = rem;
            out.push(cur.clone());
            return;
        }
        for e in 0..=rem {
            cur[i] = e;
            rec(i + 1, rem - e, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, k, &mut cur, &mut out);
    out.sort_by(|a, b| grevlex_cmp(b, a));
    out
}

/// Dimension of the degree-`k` piece of the polynomial ring in `n_vars`
/// variables: `C(k + n − 1, n − 1)`.
pub fn ring_dim(n_vars: usize, k: i64) -> i64 {
    if k < 0 {
        return 0;
    }
    let mut num: i64 = 1;
    for j in 1..=(n_vars as i64 - 1) {
        num = num
            .checked_mul(k + j)
            .expect("ring dimension overflows i64");
        num /= j;
    }
    num
}

// ======================================================================
// Parsing
// ======================================================================

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

struct Lexer {
    toks: Vec<(usize, Tok)>,
    end: usize,
    pos: usize,
}

impl Lexer {
    fn new(text: &str) -> Result<Lexer, ParseError> {
        let bytes = text.as_bytes();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let b = bytes[i];
            match b {
                b' ' | b'\t' | b'\r' | b'\n' => i += 1,
                b'+' => {
                    toks.push((i, Tok::Plus));
                    i += 1;
                }
                b'-' => {
                    toks.push((i, Tok::Minus));
                    i += 1;
                }
                b'*' => {
                    toks.push((i, Tok::Star));
                    i += 1;
                }
                b'^' => {
                    toks.push((i, Tok::Caret));
                    i += 1;
                }
                b'/' => {
                    toks.push((i, Tok::Slash));
                    i += 1;
                }
                b'(' => {
                    toks.push((i, Tok::LParen));
                    i += 1;
                }
                b')' => {
                    toks.push((i, Tok::RParen));
                    i += 1;
                }
                b'0'..=b'9' => {
                    let start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let n: BigInt = text[start..i].parse().unwrap();
                    toks.push((start, Tok::Int(n)));
                }
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    let start = i;
                    while i < bytes.len()
                        && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                    {
                        i += 1;
                    }
                    toks.push((start, Tok::Ident(text[start..i].to_string())));
                }
                _ => {
                    return Err(syn(i, format!("unexpected character {:?}", b as char)));
                }
            }
        }
        Ok(Lexer {
            toks,
            end: text.len(),
            pos: 0,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek_pos(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<usize, ParseError> {
        match self.next() {
            Some((p, t)) if t == want => Ok(p),
            Some((p, _)) => Err(syn(p, format!("expected {what}"))),
            None => Err(syn(self.end, format!("expected {what}, found end of input"))),
        }
    }
}

struct Parser<'a> {
    lx: Lexer,
    vars: &'a [String],
}

type RawTerm = (ExponentVector, Rat, usize); // exponents, coefficient, source offset

impl<'a> Parser<'a> {
    fn var_index(&self, name: &str, pos: usize) -> Result<usize, ParseError> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| syn(pos, format!("unknown variable `{name}`")))
    }

    /// positive-integer exponent (u32)
    fn exponent(&mut self) -> Result<u32, ParseError> {
        match self.lx.next() {
            Some((p, Tok::Int(n))) => {
                if n.is_zero() {
                    return Err(syn(p, "exponent must be positive"));
                }
                u32::try_from(&n).map_err(|_| syn(p, "exponent too large"))
            }
            Some((p, _)) => Err(syn(p, "expected exponent")),
            None => Err(syn(self.lx.end, "expected exponent, found end of input")),
        }
    }

    /// factor := var ['^' natural]; adds exponents into `e`
    fn factor(&mut self, e: &mut ExponentVector) -> Result<(), ParseError> {
        match self.lx.next() {
            Some((p, Tok::Ident(name))) => {
                let i = self.var_index(&name, p)?;
                let mut pw = 1u32;
                if matches!(self.lx.peek(), Some(Tok::Caret)) {
                    self.lx.next();
                    pw = self.exponent()?;
                }
                e[i] = e[i]
                    .checked_add(pw)
                    .ok_or_else(|| syn(p, "exponent too large"))?;
                Ok(())
            }
            Some((p, _)) => Err(syn(p, "expected variable")),
            None => Err(syn(self.lx.end, "expected variable, found end of input")),
        }
    }

    /// coeff := integer ['/' integer]   (sign already consumed by caller)
    fn coeff_tail(&mut self, first: BigInt) -> Result<Rat, ParseError> {
        if matches!(self.lx.peek(), Some(Tok::Slash)) {
            self.lx.next();
            match self.lx.next() {
                Some((p, Tok::Int(den))) => {
                    if den.is_zero() {
                        return Err(syn(p, "zero denominator"));
                    }
                    Ok(Rat::new(first, den))
                }
                Some((p, _)) => Err(syn(p, "expected denominator")),
                None => Err(syn(self.lx.end, "expected denominator, found end of input")),
            }
        } else {
            Ok(Rat::from(first))
        }
    }

    /// term := [coeff '*'] factor ('*' factor)*
    fn term(&mut self, sign: i32) -> Result<RawTerm, ParseError> {
        let start = self.lx.peek_pos();
        let mut coeff = if sign < 0 { -Rat::one() } else { Rat::one() };
        // optional signed coefficient
        let mut neg_inner = false;
        if matches!(self.lx.peek(), Some(Tok::Minus)) {
            // a sign directly inside the term, e.g. after a '+' separator
            self.lx.next();
            neg_inner = true;
        }
        if let Some(Tok::Int(_)) = self.lx.peek() {
            let Some((_, Tok::Int(n))) = self.lx.next() else {
                unreachable!()
            };
            let c = self.coeff_tail(n)?;
            if c.is_zero() {
                return Err(syn(start, "zero coefficient"));
            }
            coeff *= c;
            self.lx.expect(Tok::Star, "`*` after coefficient")?;
        } else if neg_inner {
            return Err(syn(start, "expected coefficient after sign"));
        }
        if neg_inner {
            coeff = -coeff;
        }
        let mut e = vec![0u32; self.vars.len()];
        self.factor(&mut e)?;
        while matches!(self.lx.peek(), Some(Tok::Star)) {
            self.lx.next();
            self.factor(&mut e)?;
        }
        Ok((e, coeff, start))
    }

    /// expr := [sign] term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Vec<RawTerm>, ParseError> {
        let mut out = Vec::new();
        let mut sign = 1;
        match self.lx.peek() {
            Some(Tok::Plus) => {
                self.lx.next();
            }
            Some(Tok::Minus) => {
                self.lx.next();
                sign = -1;
            }
            _ => {}
        }
        out.push(self.term(sign)?);
        loop {
            match self.lx.peek() {
                Some(Tok::Plus) => {
                    self.lx.next();
                    out.push(self.term(1)?);
                }
                Some(Tok::Minus) => {
                    self.lx.next();
                    out.push(self.term(-1)?);
                }
                _ => break,
            }
        }
        Ok(out)
    }
}

fn check_vars(variables: &[String]) {
    assert!(variables.len() >= 2, "need at least two variables");
    for (i, v) in variables.iter().enumerate() {
        assert!(
            !v.is_empty()
                && v.as_bytes()[0].is_ascii_alphabetic()
                && v.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_'),
            "invalid variable name `{v}`"
        );
        assert!(
            !variables[..i].contains(v),
            "duplicate variable name `{v}`"
        );
    }
}

fn collect(n_vars: usize, raw: Vec<RawTerm>) -> Result<HomogPoly, ParseError> {
    // homogeneity is judged on the raw term list, before cancellation
    let mut degree: Option<u32> = None;
    for (e, _, _) in &raw {
        let d: u32 = e.iter().sum();
        match degree {
            None => degree = Some(d),
            Some(d0) if d0 != d => {
                return Err(ParseError::NotHomogeneous {
                    degree_a: d0,
                    degree_b: d,
                })
            }
            _ => {}
        }
    }
    let degree = degree.expect("parser yields at least one term");
    let mut map: BTreeMap<ExponentVector, Rat> = BTreeMap::new();
    for (e, c, _) in raw {
        let slot = map.entry(e).or_insert_with(Rat::zero);
        *slot += c;
    }
    map.retain(|_, c| !c.is_zero());
    if map.is_empty() {
        return Err(ParseError::ZeroPolynomial);
    }
    Ok(HomogPoly::raw(n_vars, degree, map))
}

/// Parse a homogeneous polynomial over the declared variables.
///
/// See the module documentation for the grammar.  Parentheses are not part
/// of this grammar; use [`parse_factored`] for products of parenthesised
/// forms.
pub fn parse_poly(text: &str, variables: &[String]) -> Result<HomogPoly, ParseError> {
    check_vars(variables);
    let lx = Lexer::new(text)?;
    let mut p = Parser { lx, vars: variables };
    let raw = p.expr()?;
    if let Some((pos, _)) = p.lx.next() {
        return Err(syn(pos, "trailing input after polynomial"));
    }
    collect(variables.len(), raw)
}

/// Parse a polynomial given as a list of terms with no homogeneity
/// requirement — the shape local singularity equations come in.
///
/// Same grammar as [`parse_poly`], but mixed degrees are allowed and the
/// result is returned as a plain term list (collected, zero terms dropped).
pub fn parse_terms_any_degree(
    text: &str,
    variables: &[String],
) -> Result<Vec<(ExponentVector, Rat)>, ParseError> {
    check_vars(variables);
    let lx = Lexer::new(text)?;
    let mut p = Parser { lx, vars: variables };
    let raw = p.expr()?;
    if let Some((pos, _)) = p.lx.next() {
        return Err(syn(pos, "trailing input after polynomial"));
    }
    let mut map: BTreeMap<ExponentVector, Rat> = BTreeMap::new();
    for (e, c, _) in raw {
        let slot = map.entry(e).or_insert_with(Rat::zero);
        *slot += c;
    }
    map.retain(|_, c| !c.is_zero());
    if map.is_empty() {
        return Err(ParseError::ZeroPolynomial);
    }
    Ok(map.into_iter().collect())
}

/// One factor of a parsed product: the base polynomial and its exponent.
pub type Factor = (HomogPoly, u32);

/// Parse a product of polynomial factors, as used for hyperplane
/// arrangements: `x*y*z*(x+3*z)*(x+y+z)^2` style.
///
/// Grammar extension over [`parse_poly`]:
///
/// ```text
/// product := pfactor ('*' pfactor)*
/// pfactor := var ['^' n] | coeff | '(' expr ')' ['^' n]
/// ```
///
/// Returns the overall scalar (product of bare coefficients) and the list
/// of polynomial factors with their exponents, in input order.
pub fn parse_factored(
    text: &str,
    variables: &[String],
) -> Result<(Rat, Vec<Factor>), ParseError> {
    check_vars(variables);
    let lx = Lexer::new(text)?;
    let mut p = Parser { lx, vars: variables };
    let mut scalar = Rat::one();
    if matches!(p.lx.peek(), Some(Tok::Minus)) {
        p.lx.next();
        scalar = -scalar;
    }
    let mut factors: Vec<Factor> = Vec::new();
    loop {
        match p.lx.next() {
            Some((pos, Tok::Ident(name))) => {
                let i = p.var_index(&name, pos)?;
                let mut pw = 1u32;
                if matches!(p.lx.peek(), Some(Tok::Caret)) {
                    p.lx.next();
                    pw = p.exponent()?;
                }
                let mut e = vec![0u32; variables.len()];
                e[i] = 1;
                let poly = HomogPoly::raw(
                    variables.len(),
                    1,
                    BTreeMap::from([(e, Rat::one())]),
                );
                factors.push((poly, pw));
            }
            Some((pos, Tok::Int(n))) => {
                let c = p.coeff_tail(n)?;
                if c.is_zero() {
                    return Err(syn(pos, "zero coefficient"));
                }
                scalar *= c;
            }
            Some((_, Tok::LParen)) => {
                let raw = p.expr()?;
                p.lx.expect(Tok::RParen, "`)`")?;
                let mut pw = 1u32;
                if matches!(p.lx.peek(), Some(Tok::Caret)) {
                    p.lx.next();
                    pw = p.exponent()?;
                }
                let poly = collect(variables.len(), raw)?;
                factors.push((poly, pw));
            }
            Some((pos, _)) => return Err(syn(pos, "expected factor")),
            None => {
                return Err(syn(p.lx.end, "expected factor, found end of input"))
            }
        }
        match p.lx.peek() {
            Some(Tok::Star) => {
                p.lx.next();
            }
            None => break,
            Some(_) => {
                return Err(syn(p.lx.peek_pos(), "expected `*` between factors"))
            }
        }
    }
    Ok((scalar, factors))
}

/// Expand a factored product into a single polynomial.
pub fn expand_product(scalar: &Rat, factors: &[Factor]) -> Result<HomogPoly, ParseError> {
    let mut iter = factors.iter();
    let first = iter
        .next()
        .ok_or_else(|| syn(0, "empty product"))?;
    let mut acc = first.0.pow(first.1);
    for (f, e) in iter {
        acc = acc.mul(&f.pow(*e));
    }
    if scalar.is_zero() {
        return Err(ParseError::ZeroPolynomial);
    }
    Ok(acc.scaled(scalar))
}
