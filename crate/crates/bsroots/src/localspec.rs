//! Local data of weighted-homogeneous isolated hypersurface singularities.
//!
//! A germ `h` in `n' = n−1` variables that is weighted homogeneous with
//! weights `w_1..w_{n'}` (each monomial `x^a` of `h` satisfying
//! `Σ w_i a_i = 1`) and has an isolated critical point carries:
//!
//! * a Milnor number `μ_h = Π (1/w_i − 1)`;
//! * a spectrum, the multiset of exponents of
//!   `Sp(h) = Π_j (t^{w_j} − t)/(1 − t^{w_j})`, computed exactly over
//!   `T = t^{1/m}` with `m` the common denominator of the weights;
//! * local Bernstein–Sato roots: the negatives of the roots of `b_h(s)/(s+1)`
//!   are exactly the distinct spectral numbers, and the full root set adds 1.
//!
//! The spectrum is symmetric about `n'/2` and its minimum `Σ_j w_j` is the
//! point's log-canonical-type invariant `α̃`.  Aggregating over every
//! singular point of the projective hypersurface `Z` gives the sets
//! `R̃_Z` (union of reduced local root sets), `R_Z = R̃_Z ∪ {1}`, the minima
//! `α̃_Z = min R̃_Z`, `α_Z = min(α̃_Z, 1)`, and the global Milnor sum `μ_Z`,
//! which under the weighted-homogeneity hypothesis equals the total Tjurina
//! number `τ_Z` of the global tables.
//!
//! Singular points are *supplied*, not discovered: as explicit weights, as
//! ADE type names, or as a local defining polynomial from which weights are
//! solved linearly on the support.  The one situation where the tool does
//! locate singular points itself is the line-arrangement convenience input,
//! where the combinatorics are elementary: every intersection point of `m`
//! concurrent lines is an ordinary `m`-fold point with weights `(1/m, 1/m)`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Deserialize;
use thiserror::Error;

use crate::gradedla::rref_in_place;
use crate::polyring::{parse_terms_any_degree, ExponentVector, Factor, HomogPoly};
use crate::{parse_rat, rat_string, Rat, RationalSet};

/// Largest admitted common denominator of a weight system; the spectrum is
/// computed as a dense polynomial in `T = t^{1/m}`.
const MAX_WEIGHT_DENOM_LCM: u64 = 4096;

/// Errors raised while handling local singularity data.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LocalError {
    /// The spectrum product does not clear its denominators — the weights
    /// do not belong to any weighted-homogeneous isolated singularity.
    #[error("spectrum of weights ({weights}) is not a polynomial; invalid weight system")]
    NotPolynomial { weights: String },
    /// `Π (1/w_i − 1)` is not a positive integer.
    #[error("milnor number Π(1/w_i − 1) = {product} of weights ({weights}) is not a positive integer")]
    NonIntegerMilnor { weights: String, product: String },
    /// A weight outside the open interval (0, 1).
    #[error("weight {w} is outside the admissible range (0, 1)")]
    InvalidWeight { w: String },
    /// Unrecognized singularity type name.
    #[error("unknown singularity type {0:?} (expected Ak with k >= 1, Dk with k >= 4, E6, E7, E8)")]
    UnknownType(String),
    /// The linear system `Σ w_i a_i = 1` over the support has no solution
    /// or does not determine the weights.
    #[error("local polynomial is not weighted homogeneous: {0}")]
    NotWeightedHomogeneous(String),
    /// Structurally invalid singularity record.
    #[error("invalid singularity record: {0}")]
    BadRecord(String),
    /// Record dimension disagrees with the ambient chart dimension `n−1`.
    #[error("singularity record has {got} weights but the hypersurface chart has dimension {expected}")]
    WrongAmbient { expected: usize, got: usize },
    /// The singularity file is not valid JSON of the documented shape.
    #[error("cannot parse singularity file: {0}")]
    Json(String),
    /// The line-arrangement input is not a reduced arrangement of distinct
    /// lines in the projective plane.
    #[error("invalid line arrangement: {0}")]
    DegenerateArrangement(String),
}

fn weights_display(weights: &[Rat]) -> String {
    weights
        .iter()
        .map(rat_string)
        .collect::<Vec<_>>()
        .join(", ")
}

// ======================================================================
// LocalSingularity
// ======================================================================

/// One class of singular points of `Z`: the weights of the defining
/// weighted-homogeneous germ and how many points of `Z` carry them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalSingularity {
    weights: Vec<Rat>,
    count: u64,
    milnor: u64,
}

impl LocalSingularity {
    /// Validates the weight system: every `w_i ∈ (0, 1)` and
    /// `Π (1/w_i − 1)` a positive integer.  `count ≥ 1`.
    pub fn new(weights: Vec<Rat>, count: u64) -> Result<Self, LocalError> {
        if count == 0 {
            return Err(LocalError::BadRecord("count must be at least 1".into()));
        }
        if weights.is_empty() {
            return Err(LocalError::BadRecord("empty weight list".into()));
        }
        let milnor = milnor_number(&weights)?;
        Ok(LocalSingularity {
            weights,
            count,
            milnor,
        })
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Milnor number of one point of this class.
    pub fn milnor(&self) -> u64 {
        self.milnor
    }

    /// `α̃` of the point: the smallest spectral number `Σ_j w_j`.
    pub fn alpha_tilde(&self) -> Rat {
        self.weights.iter().sum()
    }

    pub fn spectrum(&self) -> Result<SpectrumMultiset, LocalError> {
        spectrum(&self.weights)
    }
}

// ======================================================================
// Spectrum
// ======================================================================

/// The spectrum of a weighted-homogeneous germ: a sorted multiset of
/// rationals in `(0, n')`, all with denominator dividing `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumMultiset {
    /// Spectral numbers, ascending, with multiplicity.
    pub entries: Vec<Rat>,
    /// Common denominator: lcm of the weight denominators.
    pub m: u64,
}

impl SpectrumMultiset {
    /// Distinct spectral numbers.
    pub fn reduced_set(&self) -> RationalSet {
        self.entries.iter().cloned().collect()
    }

    /// Smallest spectral number.
    pub fn min(&self) -> &Rat {
        &self.entries[0]
    }

    /// Display as `Σ c_e T^e` over `T = t^{1/m}`, highest exponent first,
    /// e.g. `T^17+T^15+...+2T^11+...+T^5`.
    pub fn display_t_powers(&self) -> String {
        let mut mults: BTreeMap<i64, u64> = BTreeMap::new();
        for a in &self.entries {
            let e = (a * Rat::from_integer(BigInt::from(self.m)))
                .to_integer()
                .to_i64()
                .expect("spectrum exponents fit i64");
            *mults.entry(e).or_insert(0) += 1;
        }
        let mut out = String::new();
        for (e, c) in mults.iter().rev() {
            if !out.is_empty() {
                out.push('+');
            }
            if *c > 1 {
                out.push_str(&c.to_string());
            }
            out.push_str(&format!("T^{e}"));
        }
        out
    }
}

fn validate_weights(weights: &[Rat]) -> Result<(), LocalError> {
    for w in weights {
        if !(w.is_positive() && *w < Rat::one()) {
            return Err(LocalError::InvalidWeight { w: rat_string(w) });
        }
    }
    Ok(())
}

/// lcm of the weight denominators, bounded by [`MAX_WEIGHT_DENOM_LCM`].
fn weight_denom_lcm(weights: &[Rat]) -> Result<u64, LocalError> {
    let mut m = BigInt::one();
    for w in weights {
        m = m.lcm(w.denom());
    }
    m.to_u64()
        .filter(|&m| m <= MAX_WEIGHT_DENOM_LCM)
        .ok_or_else(|| {
            LocalError::BadRecord(format!(
                "weight denominator lcm {m} exceeds the supported bound {MAX_WEIGHT_DENOM_LCM}"
            ))
        })
}

/// Multiply dense ascending-coefficient polynomials (skipping zero terms,
/// since the spectrum factors are two-term polynomials of high degree).
fn poly_mul(a: &[i128], b: &[i128]) -> Vec<i128> {
    let mut out = vec![0i128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Exact division of dense polynomials where `den[0] = 1`; `None` when the
/// remainder is nonzero.
fn poly_div_exact(num: &[i128], den: &[i128]) -> Option<Vec<i128>> {
    debug_assert_eq!(den[0], 1);
    if num.len() < den.len() {
        return num.iter().all(|&c| c == 0).then(Vec::new);
    }
    let den_nz: Vec<(usize, i128)> = den
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(j, &c)| (j, c))
        .collect();
    let qlen = num.len() - den.len() + 1;
    let mut work = num.to_vec();
    let mut q = vec![0i128; qlen];
    for i in 0..qlen {
        let c = work[i];
        if c == 0 {
            continue;
        }
        q[i] = c;
        for &(j, dj) in &den_nz {
            work[i + j] -= c * dj;
        }
    }
    work.iter().all(|&c| c == 0).then_some(q)
}

/// Spectrum of the weight system: exponent multiset of
/// `Π_j (T^{m w_j} − T^m) / (1 − T^{m w_j})` over `T = t^{1/m}`,
/// divided by `m`.
///
/// The division is exact over `Z[T]` precisely when the weights come from
/// a weighted-homogeneous isolated singularity; a nonzero remainder or a
/// negative coefficient raises `NotPolynomial`.
pub fn spectrum(weights: &[Rat]) -> Result<SpectrumMultiset, LocalError> {
    validate_weights(weights)?;
    let mu = milnor_number(weights)?;
    let m = weight_denom_lcm(weights)?;
    let m_rat = Rat::from_integer(BigInt::from(m));
    let mut num = vec![1i128];
    let mut den = vec![1i128];
    for w in weights {
        let a = (w * &m_rat).to_integer().to_usize().expect("m*w fits usize");
        // numerator factor T^a − T^m
        let mut nf = vec![0i128; m as usize + 1];
        nf[a] += 1;
        nf[m as usize] -= 1;
        num = poly_mul(&num, &nf);
        // denominator factor 1 − T^a
        let mut df = vec![0i128; a + 1];
        df[0] = 1;
        df[a] -= 1;
        den = poly_mul(&den, &df);
    }
    let not_poly = || LocalError::NotPolynomial {
        weights: weights_display(weights),
    };
    let q = poly_div_exact(&num, &den).ok_or_else(not_poly)?;
    if q.iter().any(|&c| c < 0) {
        return Err(not_poly());
    }
    let mut entries = Vec::with_capacity(mu as usize);
    for (e, &c) in q.iter().enumerate() {
        for _ in 0..c {
            entries.push(Rat::new(BigInt::from(e), BigInt::from(m)));
        }
    }
    // Both |Sp| = μ and the symmetry α ↔ n' − α are theorems for genuine
    // weight systems; violations mean the input was not one.
    if entries.len() as u64 != mu {
        return Err(not_poly());
    }
    let np = Rat::from_integer(BigInt::from(weights.len()));
    let symmetric = entries
        .iter()
        .zip(entries.iter().rev())
        .all(|(a, b)| a + b == np);
    if !symmetric {
        return Err(not_poly());
    }
    Ok(SpectrumMultiset { entries, m })
}

/// Milnor number `Π_j (1/w_j − 1)`, validated to be a positive integer.
pub fn milnor_number(weights: &[Rat]) -> Result<u64, LocalError> {
    validate_weights(weights)?;
    let mut prod = Rat::one();
    for w in weights {
        prod *= w.recip() - Rat::one();
    }
    if prod.is_integer() && prod.is_positive() {
        if let Some(mu) = prod.to_integer().to_u64() {
            return Ok(mu);
        }
    }
    Err(LocalError::NonIntegerMilnor {
        weights: weights_display(weights),
        product: rat_string(&prod),
    })
}

/// Local Bernstein–Sato roots (up to sign): `reduced` is the set of
/// distinct spectral numbers (roots of `b_h(s)/(s+1)`), `full` adds 1.
pub fn local_bs_roots(weights: &[Rat]) -> Result<(RationalSet, RationalSet), LocalError> {
    let sp = spectrum(weights)?;
    let reduced = sp.reduced_set();
    let mut full = reduced.clone();
    full.insert(Rat::one());
    Ok((full, reduced))
}

// ======================================================================
// ADE presets
// ======================================================================

/// Weights of the standard simple singularities, padded with `1/2` per
/// additional variable up to the chart dimension `ambient`.
///
/// Two-variable forms: `A_k: (1/2, 1/(k+1))`, `D_k: (1/(k−1), (k−2)/(2(k−1)))`,
/// `E6: (1/3, 1/4)`, `E7: (1/3, 2/9)`, `E8: (1/3, 1/5)`.
pub fn ade_weights(name: &str, ambient: usize) -> Result<Vec<Rat>, LocalError> {
    if ambient < 2 {
        return Err(LocalError::BadRecord(format!(
            "ambient chart dimension {ambient} is too small for a surface singularity type"
        )));
    }
    let t = name.trim().replace('_', "");
    let unknown = || LocalError::UnknownType(name.to_string());
    let (letter, idx) = t.split_at(1.min(t.len()));
    let k: u64 = idx.parse().map_err(|_| unknown())?;
    let r = |p: i64, q: i64| Rat::new(BigInt::from(p), BigInt::from(q));
    let base: Vec<Rat> = match (letter.to_ascii_uppercase().as_str(), k) {
        ("A", k) if k >= 1 => vec![r(1, 2), r(1, (k + 1) as i64)],
        ("D", k) if k >= 4 => vec![r(1, (k - 1) as i64), r((k - 2) as i64, 2 * (k - 1) as i64)],
        ("E", 6) => vec![r(1, 3), r(1, 4)],
        ("E", 7) => vec![r(1, 3), r(2, 9)],
        ("E", 8) => vec![r(1, 3), r(1, 5)],
        _ => return Err(unknown()),
    };
    let mut weights = base;
    weights.resize(ambient, r(1, 2));
    Ok(weights)
}

// ======================================================================
// Aggregation
// ======================================================================

/// Everything the decision layer needs about the singular locus of `Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularityData {
    pub singularities: Vec<LocalSingularity>,
    /// Union of the reduced local root sets.
    pub r_tilde: RationalSet,
    /// `R̃_Z ∪ {1}`.
    pub r_z: RationalSet,
    /// `min R̃_Z`.
    pub alpha_tilde: Rat,
    /// `min(α̃_Z, 1)`.
    pub alpha: Rat,
    /// `Σ count · μ` over all singular points.
    pub mu_z: u64,
}

/// Union the local data over the whole singular locus.
pub fn aggregate(singularities: Vec<LocalSingularity>) -> Result<SingularityData, LocalError> {
    assert!(
        !singularities.is_empty(),
        "aggregate requires at least one singular point"
    );
    let mut r_tilde = RationalSet::new();
    let mut mu_z: u64 = 0;
    for s in &singularities {
        let (_, reduced) = local_bs_roots(s.weights())?;
        r_tilde.extend(reduced);
        mu_z += s.count() * s.milnor();
    }
    let alpha_tilde = r_tilde.first().expect("nonempty root set").clone();
    let mut r_z = r_tilde.clone();
    r_z.insert(Rat::one());
    let alpha = alpha_tilde.clone().min(Rat::one());
    Ok(SingularityData {
        singularities,
        r_tilde,
        r_z,
        alpha_tilde,
        alpha,
        mu_z,
    })
}

impl SingularityData {
    /// Exact membership `r ∈ R_Z`.
    pub fn contains(&self, r: &Rat) -> bool {
        self.r_z.contains(r)
    }

    /// Membership `r ∈ R_Z + Z_{<0}`: some element of `R_Z` exceeds `r`
    /// by a positive integer.
    pub fn in_r_z_shifted(&self, r: &Rat) -> bool {
        self.r_z.iter().any(|s| {
            let diff = s - r;
            diff.is_integer() && diff.is_positive()
        })
    }
}

// ======================================================================
// Singularity file parsing
// ======================================================================

#[derive(Deserialize)]
#[serde(untagged)]
enum SingRecord {
    Weights {
        weights: Vec<String>,
        count: u64,
    },
    Type {
        #[serde(rename = "type")]
        type_name: String,
        count: u64,
    },
    LocalPoly {
        local_poly: String,
        vars: Vec<String>,
        count: u64,
    },
}

/// Parse the JSON singularity file: a list of records, each one of
/// `{"weights": ["3/14","1/7"], "count": 1}`,
/// `{"type": "A1", "count": 52}`, or
/// `{"local_poly": "x^4*z+z^7", "vars": ["x","z"], "count": 1}`.
///
/// `ambient` is the chart dimension `n−1`; weight lists must have exactly
/// that length, type presets and local polynomials in fewer variables are
/// padded with weights `1/2` (suspension does not change the singularity
/// class data used here beyond the documented spectrum shift).
pub fn parse_sing_file(text: &str, ambient: usize) -> Result<Vec<LocalSingularity>, LocalError> {
    let records: Vec<SingRecord> =
        serde_json::from_str(text).map_err(|e| LocalError::Json(e.to_string()))?;
    if records.is_empty() {
        return Err(LocalError::BadRecord(
            "singularity file lists no singular points; omit the file for a smooth hypersurface"
                .into(),
        ));
    }
    records
        .into_iter()
        .map(|rec| match rec {
            SingRecord::Weights { weights, count } => {
                let ws = weights
                    .iter()
                    .map(|s| {
                        parse_rat(s).ok_or_else(|| {
                            LocalError::BadRecord(format!("cannot parse weight {s:?}"))
                        })
                    })
                    .collect::<Result<Vec<Rat>, LocalError>>()?;
                if ws.len() != ambient {
                    return Err(LocalError::WrongAmbient {
                        expected: ambient,
                        got: ws.len(),
                    });
                }
                LocalSingularity::new(ws, count)
            }
            SingRecord::Type { type_name, count } => {
                LocalSingularity::new(ade_weights(&type_name, ambient)?, count)
            }
            SingRecord::LocalPoly {
                local_poly,
                vars,
                count,
            } => {
                if vars.len() < 2 || vars.len() > ambient {
                    return Err(LocalError::BadRecord(format!(
                        "local polynomial must use between 2 and {ambient} variables, got {}",
                        vars.len()
                    )));
                }
                let terms = parse_terms_any_degree(&local_poly, &vars)
                    .map_err(|e| LocalError::BadRecord(format!("{local_poly:?}: {e}")))?;
                let mut ws = weights_from_local_poly(&terms, vars.len())?;
                ws.resize(ambient, Rat::new(BigInt::one(), BigInt::from(2)));
                LocalSingularity::new(ws, count)
            }
        })
        .collect()
}

/// Solve `Σ_i w_i a_i = 1` over the support exponents `a` of a local
/// polynomial.  The system must be consistent and determine every weight.
pub fn weights_from_local_poly(
    terms: &[(ExponentVector, Rat)],
    n_vars: usize,
) -> Result<Vec<Rat>, LocalError> {
    if terms.is_empty() {
        return Err(LocalError::NotWeightedHomogeneous(
            "empty local polynomial".into(),
        ));
    }
    // augmented matrix [a | 1]
    let mut rows: Vec<Vec<Rat>> = terms
        .iter()
        .map(|(e, _)| {
            let mut row: Vec<Rat> = e
                .iter()
                .map(|&a| Rat::from_integer(BigInt::from(a)))
                .collect();
            row.push(Rat::one());
            row
        })
        .collect();
    let (rref, pivots) = rref_in_place(&mut rows);
    if pivots.contains(&n_vars) {
        return Err(LocalError::NotWeightedHomogeneous(
            "support equations Σ w·a = 1 are inconsistent".into(),
        ));
    }
    if pivots.len() < n_vars {
        return Err(LocalError::NotWeightedHomogeneous(
            "support equations do not determine the weights (underdetermined system)".into(),
        ));
    }
    let mut ws = vec![Rat::one(); n_vars];
    for (r, &c) in pivots.iter().enumerate() {
        ws[c] = rref[r][n_vars].clone();
    }
    validate_weights(&ws)?;
    Ok(ws)
}

// ======================================================================
// Line arrangements
// ======================================================================

/// One intersection point of the arrangement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrangementPoint {
    /// Projective coordinates, integral, content-free, first nonzero
    /// coordinate positive.
    pub coords: Vec<BigInt>,
    /// Indices (into the input factor list) of the lines through the point.
    pub lines: Vec<usize>,
}

/// A reduced line arrangement in the projective plane, expanded and
/// analyzed: the defining polynomial, every intersection point, and the
/// singularity classes (an `m`-fold intersection is an ordinary `m`-fold
/// point, weights `(1/m, 1/m)`).
#[derive(Debug, Clone)]
pub struct LineArrangement {
    pub poly: HomogPoly,
    pub points: Vec<ArrangementPoint>,
    /// Grouped by multiplicity, ascending.
    pub singularities: Vec<LocalSingularity>,
}

/// Analyze a product of pairwise distinct linear forms in three variables.
pub fn analyze_line_arrangement(
    scalar: &Rat,
    factors: &[Factor],
) -> Result<LineArrangement, LocalError> {
    if factors.is_empty() {
        return Err(LocalError::DegenerateArrangement("no factors".into()));
    }
    let n = factors[0].0.n_vars();
    if n != 3 {
        return Err(LocalError::DegenerateArrangement(format!(
            "line arrangements live in the projective plane; got {n} variables"
        )));
    }
    let mut lines: Vec<Vec<BigInt>> = Vec::with_capacity(factors.len());
    for (i, (g, e)) in factors.iter().enumerate() {
        if g.degree() != 1 {
            return Err(LocalError::DegenerateArrangement(format!(
                "factor {} has degree {}, expected a linear form",
                i + 1,
                g.degree()
            )));
        }
        if *e != 1 {
            return Err(LocalError::DegenerateArrangement(format!(
                "factor {} appears with exponent {e}; repeated lines give a non-reduced polynomial",
                i + 1
            )));
        }
        let mut v = vec![BigInt::zero(); 3];
        for (exp, c) in g.integer_terms() {
            let pos = exp.iter().position(|&a| a == 1).expect("linear form");
            v[pos] = c;
        }
        lines.push(v);
    }
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            if lines[i] == lines[j] {
                return Err(LocalError::DegenerateArrangement(format!(
                    "lines {} and {} coincide",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    // all pairwise intersection points, grouped projectively
    let mut by_point: BTreeMap<Vec<BigInt>, BTreeSet<usize>> = BTreeMap::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let p = normalize_point(cross(&lines[i], &lines[j]));
            let entry = by_point.entry(p).or_default();
            entry.insert(i);
            entry.insert(j);
        }
    }
    let points: Vec<ArrangementPoint> = by_point
        .into_iter()
        .map(|(coords, ls)| ArrangementPoint {
            coords,
            lines: ls.into_iter().collect(),
        })
        .collect();
    let mut mult_counts: BTreeMap<usize, u64> = BTreeMap::new();
    for p in &points {
        *mult_counts.entry(p.lines.len()).or_insert(0) += 1;
    }
    let singularities = mult_counts
        .into_iter()
        .map(|(m, count)| {
            let w = Rat::new(BigInt::one(), BigInt::from(m));
            LocalSingularity::new(vec![w.clone(), w], count)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let poly = crate::polyring::expand_product(scalar, factors).map_err(|e| {
        LocalError::DegenerateArrangement(format!("cannot expand the product: {e}"))
    })?;
    Ok(LineArrangement {
        poly,
        points,
        singularities,
    })
}

fn cross(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn normalize_point(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for c in &v {
        g = g.gcd(c);
    }
    assert!(!g.is_zero(), "proportional lines slipped past validation");
    for c in &mut v {
        *c = &*c / &g;
    }
    if v.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
        for c in &mut v {
            *c = -&*c;
        }
    }
    v
}
