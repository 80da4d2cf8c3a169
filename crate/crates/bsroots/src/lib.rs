//! Roots of Bernstein–Sato polynomials of homogeneous polynomials whose
//! singular locus consists of isolated weighted-homogeneous points.
//!
//! For a homogeneous `f ∈ Q[x_1..x_n]` of degree `d` whose projective zero
//! set `Z` has only isolated singularities, each analytically equivalent to a
//! weighted-homogeneous singularity, the roots of the reduced Bernstein–Sato
//! polynomial split into a local part (read off the singularity weights) and
//! a part `R_f^0` supported at the origin of the affine cone.  This crate
//! determines `R_f^0` — or an explicit undetermined set when the available
//! criteria do not decide every candidate — using nothing but exact linear
//! algebra on the graded pieces of the Koszul complex of the partial
//! derivatives.  No Gröbner bases, no floating point.
//!
//! The computation pipeline:
//!
//! 1. [`polyring`] — arithmetic for homogeneous polynomials over `Q`,
//!    monomial enumeration in graded reverse lexicographic order, parsing.
//! 2. [`gradedla`] — exact linear algebra: a dense fraction-free kernel for
//!    small matrices and a sparse incremental echelon engine (with checked
//!    `i128`, big-integer, and modular coefficient back-ends) for the graded
//!    pieces, which run to a few thousand columns.
//! 3. [`koszul`] — the graded tables: Hilbert function `μ_k` of the Jacobian
//!    ring, binomial background `γ_k`, defects `ν_k`, the splitting
//!    `μ = μ' + μ''`, the differences `δ_k`, and second-page corrections
//!    `μ²_k`, `ν²_k`.
//! 4. [`localspec`] — local data at each singular point: spectrum of a
//!    weighted-homogeneous germ, local Milnor numbers, local Bernstein–Sato
//!    roots, and aggregation over the singular locus.
//! 5. [`bsengine`] — the decision layer combining the tables and local data
//!    into a classified set of candidate roots with evidence.
//! 6. [`cli`] — the `bsroots` command-line interface.
//!
//! Everything is deterministic: tables, reports, and serialized output are
//! byte-stable across runs and thread counts.

pub mod bsengine;
pub mod cli;
pub mod gradedla;
pub mod koszul;
pub mod localspec;
pub mod polyring;

/// Convenient alias: arbitrary-precision rational numbers used throughout.
pub type Rat = num_rational::BigRational;

/// An exact set of rationals, ordered; membership tests are exact equality.
pub type RationalSet = std::collections::BTreeSet<Rat>;

/// Render a rational as `p/q`, or `p` when the denominator is one.
pub fn rat_string(r: &Rat) -> String {
    use num_traits::One;
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `p` or `p/q` into a rational.  Rejects zero denominators.
pub fn parse_rat(s: &str) -> Option<Rat> {
    use num_bigint::BigInt;
    use num_traits::Zero;
    let s = s.trim();
    let (np, dp) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), Some(b.trim())),
        None => (s, None),
    };
    let numer: BigInt = np.parse().ok()?;
    let denom: BigInt = match dp {
        Some(b) => b.parse().ok()?,
        None => BigInt::from(1),
    };
    if denom.is_zero() {
        return None;
    }
    Some(Rat::new(numer, denom))
}
