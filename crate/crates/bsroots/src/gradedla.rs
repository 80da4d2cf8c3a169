//! Exact linear algebra over `Z` and `Q` for graded pieces.
//!
//! Two engines live here.
//!
//! * [`ExactMatrix`] — a dense arbitrary-precision integer matrix with
//!   [`ExactMatrix::rank`] (fraction-free Bareiss elimination with partial
//!   pivoting on magnitude), [`ExactMatrix::kernel_basis`] (canonical
//!   reduced-echelon kernel vectors, denominators cleared, content removed),
//!   and [`ExactMatrix::cokernel_dim`].  This is the reference engine; every
//!   sparse result can be cross-checked against it.
//!
//! * A sparse incremental echelon engine ([`Echelon`]) generic over a
//!   coefficient back-end ([`Coeff`]): checked `i128` (fast path, signals
//!   [`Overflow`]), `BigInt` (infallible fallback), and `Fp` (arithmetic
//!   modulo a 62-bit prime).  Rows are kept fully back-reduced, so a row of
//!   a rank-`r` space in `c` coordinates stores at most `c − r + 1` entries
//!   — the property that makes degree-by-degree Hilbert-function sweeps over
//!   spaces with thousands of coordinates affordable in exact arithmetic.
//!
//! The modular path never replaces an exact answer silently: callers either
//! run two independent primes and fall back to exact arithmetic on
//! disagreement ([`ExactMatrix::rank_modular`], and the table builders'
//! modular mode), or use single-prime ranks only where a one-sided bound is
//! mathematically sufficient.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rat;

/// Verified 62-bit primes used by the modular paths.
pub const MODULAR_PRIMES: [u64; 8] = [
    4611686018427387847,
    4611686018427387817,
    4611686018427387787,
    4611686018427387761,
    4611686018427387751,
    4611686018427387737,
    4611686018427387733,
    4611686018427387709,
];

// ======================================================================
// Dense exact matrices
// ======================================================================

/// Dense matrix of arbitrary-precision integers, row-major.
///
/// Callers clear denominators before building one (all matrices in this
/// crate come from integer polynomial data, so this costs nothing).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<BigInt>,
}

impl ExactMatrix {
    /// The zero matrix of the given shape.
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        ExactMatrix {
            nrows,
            ncols,
            data: vec![BigInt::zero(); nrows * ncols],
        }
    }

    /// Build from a list of equal-length rows.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend(r);
        }
        ExactMatrix { nrows, ncols, data }
    }

    /// Build from sparse columns: `cols[j]` lists `(row, value)` pairs.
    pub fn from_sparse_cols(nrows: usize, cols: &[Vec<(u32, BigInt)>]) -> Self {
        let ncols = cols.len();
        let mut m = ExactMatrix::zero(nrows, ncols);
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col {
                m.data[*i as usize * ncols + j] = v.clone();
            }
        }
        m
    }

    /// The `n × n` identity.
    pub fn identity(n: usize) -> Self {
        let mut m = ExactMatrix::zero(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Entry at `(i, j)`.
    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.ncols + j]
    }

    /// Transposed copy.
    pub fn transpose(&self) -> Self {
        let mut t = ExactMatrix::zero(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t.data[j * self.nrows + i] = self.at(i, j).clone();
            }
        }
        t
    }

    /// Exact rank over the rationals, by fraction-free Bareiss elimination
    /// with partial pivoting on magnitude.
    pub fn rank(&self) -> usize {
        if self.nrows == 0 || self.ncols == 0 {
            return 0;
        }
        let mut a: Vec<Vec<BigInt>> = (0..self.nrows)
            .map(|i| self.data[i * self.ncols..(i + 1) * self.ncols].to_vec())
            .collect();
        let mut prev = BigInt::one();
        let mut r = 0usize;
        for c in 0..self.ncols {
            // choose the largest-magnitude pivot in this column
            let mut piv: Option<usize> = None;
            for i in r..self.nrows {
                if !Zero::is_zero(&a[i][c])
                    && piv.is_none_or(|p| a[i][c].magnitude() > a[p][c].magnitude())
                {
                    piv = Some(i);
                }
            }
            let Some(p) = piv else { continue };
            a.swap(r, p);
            let (top, rest) = a.split_at_mut(r + 1);
            let prow = &top[r];
            for row in rest.iter_mut() {
                if Zero::is_zero(&row[c]) {
                    // still must be rescaled to keep the Bareiss invariant
                    for j in (c + 1)..self.ncols {
                        if !Zero::is_zero(&row[j]) {
                            row[j] = &prow[c] * &row[j] / &prev;
                        }
                    }
                    continue;
                }
                for j in (c + 1)..self.ncols {
                    row[j] = (&prow[c] * &row[j] - &row[c] * &prow[j]) / &prev;
                }
                row[c] = BigInt::zero();
            }
            prev = a[r][c].clone();
            r += 1;
            if r == self.nrows {
                break;
            }
        }
        r
    }

    /// Canonical basis of the right null space `{v : M·v = 0}`.
    ///
    /// The basis comes from the (unique) reduced row echelon form: one
    /// vector per free column, denominators cleared, integer content
    /// removed, entry at the free column positive.  Size is
    /// `cols − rank(M)`; in test builds the rank–nullity identity is
    /// asserted against the independent Bareiss rank on every call.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        let (rref, pivots) = self.rref_rational();
        let rank = pivots.len();
        debug_assert_eq!(rank, self.rank(), "echelon rank disagrees with Bareiss rank");
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.ncols];
            for &c in &pivots {
                v[c] = true;
            }
            v
        };
        let mut basis = Vec::with_capacity(self.ncols - rank);
        for free in 0..self.ncols {
            if is_pivot[free] {
                continue;
            }
            // rational kernel vector: 1 at `free`, back-substituted pivots
            let mut vec_q = vec![Rat::zero(); self.ncols];
            vec_q[free] = Rat::one();
            for (row, &pc) in pivots.iter().enumerate() {
                vec_q[pc] = -rref[row][free].clone();
            }
            // clear denominators, strip content; `free` entry stays positive
            let mut lcm = BigInt::one();
            for q in &vec_q {
                lcm = Integer::lcm(&lcm, q.denom());
            }
            let mut vec_z: Vec<BigInt> = vec_q
                .iter()
                .map(|q| q.numer() * (&lcm / q.denom()))
                .collect();
            let mut content = BigInt::zero();
            for x in &vec_z {
                content = Integer::gcd(&content, x);
            }
            if !Zero::is_zero(&content) && !content.is_one() {
                for x in &mut vec_z {
                    *x = &*x / &content;
                }
            }
            basis.push(vec_z);
        }
        debug_assert_eq!(rank + basis.len(), self.ncols, "rank-nullity violated");
        basis
    }

    /// `rows − rank`: the dimension of the cokernel of the column map.
    pub fn cokernel_dim(&self) -> usize {
        self.nrows - self.rank()
    }

    /// Rank via two distinct randomly chosen 62-bit primes; falls back to
    /// the exact computation if the two modular ranks disagree.
    pub fn rank_modular(&self) -> usize {
        use rand::prelude::*;
        let mut rng = rand::thread_rng();
        let mut idx: Vec<usize> = (0..MODULAR_PRIMES.len()).collect();
        idx.shuffle(&mut rng);
        let (p1, p2) = (MODULAR_PRIMES[idx[0]], MODULAR_PRIMES[idx[1]]);
        let cols = self.to_sparse_cols();
        let r1 = cols.rank_mod(p1);
        let r2 = cols.rank_mod(p2);
        if r1 == r2 {
            r1
        } else {
            self.rank()
        }
    }

    fn to_sparse_cols(&self) -> SparseCols {
        let cols = (0..self.ncols)
            .map(|j| {
                (0..self.nrows)
                    .filter(|&i| !Zero::is_zero(self.at(i, j)))
                    .map(|i| (i as u32, self.at(i, j).clone()))
                    .collect()
            })
            .collect();
        SparseCols {
            ncoords: self.nrows,
            cols,
        }
    }

    /// Reduced row echelon form over `Q`; returns the reduced rows and the
    /// pivot column indices.  The RREF of a matrix is unique, so this is
    /// deterministic by construction.
    fn rref_rational(&self) -> (Vec<Vec<Rat>>, Vec<usize>) {
        let mut m: Vec<Vec<Rat>> = (0..self.nrows)
            .map(|i| {
                (0..self.ncols)
                    .map(|j| Rat::from(self.at(i, j).clone()))
                    .collect()
            })
            .collect();
        rref_in_place(&mut m)
    }
}

/// In-place reduced row echelon form over `Q` for a small dense system.
/// Returns the rows (reordered, normalized) and pivot column indices.
pub(crate) fn rref_in_place(m: &mut Vec<Vec<Rat>>) -> (Vec<Vec<Rat>>, Vec<usize>) {
    let nrows = m.len();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..ncols {
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for j in c..ncols {
            let v = &m[r][j] * &inv;
            m[r][j] = v;
        }
        for i in 0..nrows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..ncols {
                    let v = &m[i][j] - &f * &m[r][j];
                    m[i][j] = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == nrows {
            break;
        }
    }
    (std::mem::take(m), pivots)
}

// ======================================================================
// Coefficient back-ends for the sparse engine
// ======================================================================

/// Raised by the checked `i128` back-end when a product or difference
/// leaves the representable range; callers convert state to `BigInt` and
/// resume.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overflow;

/// Coefficient arithmetic for the sparse echelon engine.
///
/// Ring back-ends (`i128`, `BigInt`) use fraction-free elimination with
/// content stripping; the field back-end ([`Fp`]) makes `gcd(a, b) = a`, so
/// the very same elimination formulas produce ordinary monic reduction.
pub trait Coeff: Clone + Send + Sync + PartialEq + std::fmt::Debug {
    fn is_zero(&self) -> bool;
    /// `self · other`; `None` signals overflow.
    fn mul(&self, other: &Self) -> Option<Self>;
    /// `self − other`; `None` signals overflow.
    fn sub(&self, other: &Self) -> Option<Self>;
    fn neg(&self) -> Self;
    /// For rings: a non-negative gcd.  For fields: the first argument, which
    /// turns the cross-multiplication reduction into monic reduction.
    fn gcd(&self, other: &Self) -> Self;
    /// Exact division (caller guarantees divisibility / invertibility).
    fn exact_div(&self, other: &Self) -> Self;
    /// Ring sign (fields report `false`); drives pivot-sign normalization.
    fn is_negative(&self) -> bool;
}

/// Coefficients that embed into `Z` — everything except `Fp`.
pub trait IntegerCoeff: Coeff {
    fn from_bigint(v: &BigInt) -> Option<Self>;
    fn to_bigint(&self) -> BigInt;
}

impl Coeff for i128 {
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        self.checked_mul(*other)
    }
    fn sub(&self, other: &Self) -> Option<Self> {
        self.checked_sub(*other)
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn gcd(&self, other: &Self) -> Self {
        // num-integer's gcd is non-negative and handles i128::MIN safely
        // only away from the extremes; entries here are bounded well below
        // that by the overflow checks in mul/sub.
        Integer::gcd(self, other)
    }
    fn exact_div(&self, other: &Self) -> Self {
        debug_assert!(*other != 0 && self % other == 0);
        self / other
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
}

impl IntegerCoeff for i128 {
    fn from_bigint(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Coeff for BigInt {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        Some(self * other)
    }
    fn sub(&self, other: &Self) -> Option<Self> {
        Some(self - other)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn exact_div(&self, other: &Self) -> Self {
        debug_assert!(!Zero::is_zero(other) && Zero::is_zero(&(self % other)));
        self / other
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

impl IntegerCoeff for BigInt {
    fn from_bigint(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
}

/// An element of `Z/p` for a (runtime) 62-bit prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fp {
    pub v: u64,
    pub p: u64,
}

impl Fp {
    pub fn new(v: u64, p: u64) -> Self {
        Fp { v: v % p, p }
    }

    /// Reduce an arbitrary integer mod `p` into `[0, p)`.
    pub fn from_bigint(x: &BigInt, p: u64) -> Self {
        let m = x.mod_floor(&BigInt::from(p));
        Fp {
            v: m.to_u64().expect("mod_floor result fits u64"),
            p,
        }
    }

    fn inv(&self) -> Self {
        // Fermat: p prime, v ≠ 0
        debug_assert!(self.v != 0);
        let mut base = self.v as u128;
        let mut e = self.p - 2;
        let p = self.p as u128;
        let mut acc: u128 = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        Fp {
            v: acc as u64,
            p: self.p,
        }
    }
}

impl Coeff for Fp {
    fn is_zero(&self) -> bool {
        self.v == 0
    }
    fn mul(&self, other: &Self) -> Option<Self> {
        debug_assert_eq!(self.p, other.p);
        Some(Fp {
            v: (self.v as u128 * other.v as u128 % self.p as u128) as u64,
            p: self.p,
        })
    }
    fn sub(&self, other: &Self) -> Option<Self> {
        debug_assert_eq!(self.p, other.p);
        let v = if self.v >= other.v {
            self.v - other.v
        } else {
            self.v + self.p - other.v
        };
        Some(Fp { v, p: self.p })
    }
    fn neg(&self) -> Self {
        Fp {
            v: if self.v == 0 { 0 } else { self.p - self.v },
            p: self.p,
        }
    }
    fn gcd(&self, _other: &Self) -> Self {
        // field convention: gcd(a, b) = a, so the fraction-free update
        // x ← (a/g)·x − (b/g)·y becomes x ← x − (b/a)·y
        *self
    }
    fn exact_div(&self, other: &Self) -> Self {
        self.mul(&other.inv()).unwrap()
    }
    fn is_negative(&self) -> bool {
        false
    }
}

// ======================================================================
// Sparse incremental echelon engine
// ======================================================================

/// A sparse row: strictly ascending coordinates with nonzero coefficients.
pub type SparseRow<C> = Vec<(u32, C)>;

/// `ma·x − mb·y` on sorted sparse rows, dropping cancelled entries.
fn combine<C: Coeff>(
    ma: &C,
    x: &SparseRow<C>,
    mb: &C,
    y: &SparseRow<C>,
) -> Result<SparseRow<C>, Overflow> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0usize, 0usize);
    while i < x.len() || j < y.len() {
        let cx = x.get(i).map(|e| e.0);
        let cy = y.get(j).map(|e| e.0);
        match (cx, cy) {
            (Some(a), Some(b)) if a == b => {
                let va = ma.mul(&x[i].1).ok_or(Overflow)?;
                let vb = mb.mul(&y[j].1).ok_or(Overflow)?;
                let v = va.sub(&vb).ok_or(Overflow)?;
                if !v.is_zero() {
                    out.push((a, v));
                }
                i += 1;
                j += 1;
            }
            (Some(a), Some(b)) if a < b => {
                let v = ma.mul(&x[i].1).ok_or(Overflow)?;
                if !v.is_zero() {
                    out.push((a, v));
                }
                i += 1;
            }
            (Some(_), Some(b)) => {
                let v = mb.mul(&y[j].1).ok_or(Overflow)?.neg();
                if !v.is_zero() {
                    out.push((b, v));
                }
                j += 1;
            }
            (Some(a), None) => {
                let v = ma.mul(&x[i].1).ok_or(Overflow)?;
                if !v.is_zero() {
                    out.push((a, v));
                }
                i += 1;
            }
            (None, Some(b)) => {
                let v = mb.mul(&y[j].1).ok_or(Overflow)?.neg();
                if !v.is_zero() {
                    out.push((b, v));
                }
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    Ok(out)
}

/// Strip ring content and normalize the sign of the leading entry.  For the
/// field back-end this rescales the row monic (see [`Coeff::gcd`]).
fn normalize_row<C: Coeff>(row: &mut SparseRow<C>) {
    if row.is_empty() {
        return;
    }
    let mut g = row[0].1.gcd(&row[0].1);
    for (_, c) in row.iter().skip(1) {
        g = g.gcd(c);
    }
    let negate = row[0].1.is_negative();
    for (_, c) in row.iter_mut() {
        *c = c.exact_div(&g);
        if negate {
            *c = c.neg();
        }
    }
}

const STRIP_EVERY: usize = 4;

const NO_PIVOT: u32 = u32::MAX;

/// Incremental reduced echelon form of a growing row space.
///
/// Rows are primitive (content-stripped, positive leading coefficient — or
/// monic over `Fp`) and fully back-reduced: a row has entries only at its
/// own pivot and at non-pivot coordinates.  The stored basis is therefore
/// the unique reduced echelon basis of the span, independent of insertion
/// order, and its row sparsity is bounded by the corank plus one.
#[derive(Debug, Clone)]
pub struct Echelon<C: Coeff> {
    ncoords: usize,
    rows: Vec<SparseRow<C>>,
    pivot_of: Vec<u32>, // coordinate → row index, NO_PIVOT if free
}

impl<C: Coeff> Echelon<C> {
    pub fn new(ncoords: usize) -> Self {
        Echelon {
            ncoords,
            rows: Vec::new(),
            pivot_of: vec![NO_PIVOT; ncoords],
        }
    }

    pub fn ncoords(&self) -> usize {
        self.ncoords
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Pivot coordinates in insertion order.
    pub fn pivot_coords(&self) -> impl Iterator<Item = u32> + '_ {
        self.rows.iter().map(|r| r[0].0)
    }

    /// The reduced rows (pivot first, then non-pivot coordinates).
    pub fn rows(&self) -> &[SparseRow<C>] {
        &self.rows
    }

    /// Reduce a candidate against the current rows without inserting it.
    /// The result is either empty (candidate lies in the span) or a row
    /// whose leading coordinate is pivot-free, normalized.
    pub fn reduce(&self, cand: SparseRow<C>) -> Result<SparseRow<C>, Overflow> {
        debug_assert!(cand.windows(2).all(|w| w[0].0 < w[1].0));
        let mut v = cand;
        v.retain(|(_, c)| !c.is_zero());
        let mut i = 0usize;
        let mut since_strip = 0usize;
        while i < v.len() {
            let coord = v[i].0;
            let row_idx = self.pivot_of[coord as usize];
            if row_idx == NO_PIVOT {
                i += 1;
                continue;
            }
            let row = &self.rows[row_idx as usize];
            let pivc = &row[0].1;
            let vc = &v[i].1;
            let g = pivc.gcd(vc);
            let ma = pivc.exact_div(&g);
            let mb = vc.exact_div(&g);
            v = combine(&ma, &v, &mb, row)?;
            since_strip += 1;
            if since_strip == STRIP_EVERY {
                normalize_row(&mut v);
                since_strip = 0;
            }
            // the entry at `coord` cancelled; position i now holds a larger
            // coordinate (or the row ended)
        }
        normalize_row(&mut v);
        Ok(v)
    }

    /// Reduce and, if independent, insert the candidate; back-reduces the
    /// existing rows so the basis stays in reduced echelon form.  Returns
    /// whether the rank grew.
    ///
    /// On `Overflow` the echelon still spans the same space with the same
    /// pivots but may be only partially back-reduced; convert via
    /// [`Echelon::to_bigint`] and repeat the insertion there.
    pub fn insert(&mut self, cand: SparseRow<C>) -> Result<bool, Overflow> {
        let v = self.reduce(cand)?;
        if v.is_empty() {
            return Ok(false);
        }
        let coord = v[0].0;
        let new_idx = self.rows.len() as u32;
        self.pivot_of[coord as usize] = new_idx;
        self.rows.push(v);
        self.back_reduce(coord)?;
        Ok(true)
    }

    /// Eliminate the given pivot coordinate from every other row.
    fn back_reduce(&mut self, coord: u32) -> Result<(), Overflow> {
        let own = self.pivot_of[coord as usize] as usize;
        let pivot_row = self.rows[own].clone();
        let pivc = &pivot_row[0].1;
        for idx in 0..self.rows.len() {
            if idx == own {
                continue;
            }
            let Ok(pos) = self.rows[idx].binary_search_by_key(&coord, |e| e.0) else {
                continue;
            };
            let vc = self.rows[idx][pos].1.clone();
            let g = pivc.gcd(&vc);
            let ma = pivc.exact_div(&g);
            let mb = vc.exact_div(&g);
            let mut merged = combine(&ma, &self.rows[idx], &mb, &pivot_row)?;
            normalize_row(&mut merged);
            self.rows[idx] = merged;
        }
        Ok(())
    }

    /// Number of pivots with coordinate strictly below `boundary`.
    ///
    /// Because every row's first nonzero entry is its pivot, rows pivoted at
    /// or beyond `boundary` vanish on the lower block, so this equals the
    /// rank of the lower-block projection of the inserted vectors — the fact
    /// the stacked-matrix rank computations rely on.
    pub fn pivots_below(&self, boundary: u32) -> usize {
        self.pivot_coords().filter(|&c| c < boundary).count()
    }
}

impl<C: IntegerCoeff> Echelon<C> {
    /// Convert the state to the `BigInt` back-end (used to escalate after
    /// an [`Overflow`]); spans, pivots, and row order are preserved.
    pub fn to_bigint(&self) -> Echelon<BigInt> {
        Echelon {
            ncoords: self.ncoords,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|(c, v)| (*c, v.to_bigint())).collect())
                .collect(),
            pivot_of: self.pivot_of.clone(),
        }
    }
}

impl Echelon<BigInt> {
    /// `insert` for the infallible back-end.
    pub fn insert_big(&mut self, cand: SparseRow<BigInt>) -> bool {
        self.insert(cand).expect("BigInt arithmetic cannot overflow")
    }

    /// Restore full back-reduction for every pivot (used once after an
    /// overflow escalation, whose aborted update may have left rows
    /// reduced against only part of the basis).
    pub fn repair(&mut self) {
        let coords: Vec<u32> = self.pivot_coords().collect();
        for c in coords {
            self.back_reduce(c)
                .expect("BigInt arithmetic cannot overflow");
        }
    }
}

/// A sparse matrix stored column-wise over `Z`, with exact and modular rank
/// computations built on [`Echelon`].
#[derive(Debug, Clone)]
pub struct SparseCols {
    pub ncoords: usize,
    pub cols: Vec<SparseRow<BigInt>>,
}

impl SparseCols {
    pub fn new(ncoords: usize) -> Self {
        SparseCols {
            ncoords,
            cols: Vec::new(),
        }
    }

    pub fn push_col(&mut self, col: SparseRow<BigInt>) {
        debug_assert!(col.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(col.iter().all(|(c, v)| (*c as usize) < self.ncoords && !Zero::is_zero(v)));
        self.cols.push(col);
    }

    /// Exact column rank: checked `i128` first, escalating the live state
    /// to `BigInt` on overflow.
    pub fn rank_exact(&self) -> usize {
        self.echelon_exact().rank()
    }

    /// (pivots below `boundary`, total rank), exact — see
    /// [`Echelon::pivots_below`].
    pub fn pivot_split_exact(&self, boundary: u32) -> (usize, usize) {
        let e = self.echelon_exact();
        (e.pivots_below(boundary), e.rank())
    }

    /// Column rank modulo `p` (a lower bound on the exact rank, equal for
    /// all but finitely many primes).
    pub fn rank_mod(&self, p: u64) -> usize {
        self.echelon_mod(p).rank()
    }

    /// (pivots below `boundary`, total rank) modulo `p`.
    pub fn pivot_split_mod(&self, p: u64, boundary: u32) -> (usize, usize) {
        let e = self.echelon_mod(p);
        (e.pivots_below(boundary), e.rank())
    }

    /// Run the exact echelon over all columns, starting on `i128` and
    /// escalating to `BigInt` if any elimination overflows.
    pub fn echelon_exact(&self) -> EchelonInt {
        let mut small: Echelon<i128> = Echelon::new(self.ncoords);
        let mut big: Option<Echelon<BigInt>> = None;
        'cols: for col in self.cols.iter() {
            if big.is_none() {
                let conv: Option<SparseRow<i128>> = col
                    .iter()
                    .map(|(c, v)| i128::from_bigint(v).map(|x| (*c, x)))
                    .collect();
                if let Some(cand) = conv {
                    match small.insert(cand) {
                        Ok(_) => continue 'cols,
                        Err(Overflow) => {}
                    }
                }
                // escalate: convert state, repair back-reduction, retry
                let mut b = small.to_bigint();
                b.repair();
                big = Some(b);
            }
            let b = big.as_mut().unwrap();
            b.insert_big(col.clone());
        }
        match big {
            Some(b) => EchelonInt::Big(b),
            None => EchelonInt::Small(small),
        }
    }

    fn echelon_mod(&self, p: u64) -> Echelon<Fp> {
        let mut e: Echelon<Fp> = Echelon::new(self.ncoords);
        for col in &self.cols {
            let cand: SparseRow<Fp> = col
                .iter()
                .map(|(c, v)| (*c, Fp::from_bigint(v, p)))
                .filter(|(_, v)| v.v != 0)
                .collect();
            e.insert(cand).expect("field arithmetic cannot overflow");
        }
        e
    }
}

/// Result of an exact sparse elimination: whichever back-end finished.
pub enum EchelonInt {
    Small(Echelon<i128>),
    Big(Echelon<BigInt>),
}

impl EchelonInt {
    pub fn rank(&self) -> usize {
        match self {
            EchelonInt::Small(e) => e.rank(),
            EchelonInt::Big(e) => e.rank(),
        }
    }

    pub fn pivots_below(&self, boundary: u32) -> usize {
        match self {
            EchelonInt::Small(e) => e.pivots_below(boundary),
            EchelonInt::Big(e) => e.pivots_below(boundary),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn dense(rows: &[&[i64]]) -> ExactMatrix {
        ExactMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| bi(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_basics() {
        assert_eq!(ExactMatrix::zero(0, 5).rank(), 0);
        assert_eq!(ExactMatrix::zero(5, 0).rank(), 0);
        assert_eq!(ExactMatrix::identity(4).rank(), 4);
        assert_eq!(dense(&[&[2, 4], &[1, 2]]).rank(), 1);
        assert_eq!(dense(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]).rank(), 2);
    }

    #[test]
    fn kernel_basics() {
        assert!(ExactMatrix::identity(3).kernel_basis().is_empty());
        let z = ExactMatrix::zero(2, 3);
        let k = z.kernel_basis();
        assert_eq!(k.len(), 3);
        // canonical: standard basis vectors
        assert_eq!(k[0], vec![bi(1), bi(0), bi(0)]);
        assert_eq!(k[2], vec![bi(0), bi(0), bi(1)]);

        let m = dense(&[&[1, 1, 0]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 2);
        assert_eq!(k[0], vec![bi(-1), bi(1), bi(0)]);
        assert_eq!(k[1], vec![bi(0), bi(0), bi(1)]);
    }

    #[test]
    fn kernel_vectors_annihilate_and_are_primitive() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let nrows = rng.gen_range(1..6);
            let ncols = rng.gen_range(1..7);
            let m = ExactMatrix::from_rows(
                (0..nrows)
                    .map(|_| (0..ncols).map(|_| bi(rng.gen_range(-6..=6))).collect())
                    .collect(),
            );
            let kb = m.kernel_basis();
            assert_eq!(m.rank() + kb.len(), ncols);
            for v in &kb {
                // exact annihilation
                for i in 0..nrows {
                    let dot: BigInt = (0..ncols).map(|j| m.at(i, j) * &v[j]).sum();
                    assert!(Zero::is_zero(&dot));
                }
                // primitive content
                let mut g = BigInt::zero();
                for x in v {
                    g = Integer::gcd(&g, x);
                }
                assert!(g.is_one(), "kernel vector not primitive: {v:?}");
            }
        }
    }

    #[test]
    fn cokernel_basics() {
        assert_eq!(ExactMatrix::identity(3).cokernel_dim(), 0);
        assert_eq!(ExactMatrix::zero(3, 2).cokernel_dim(), 3);
        assert_eq!(dense(&[&[1, 1], &[2, 2], &[0, 0]]).cokernel_dim(), 2);
    }

    #[test]
    fn rank_equals_transpose_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let nrows = rng.gen_range(1..8);
            let ncols = rng.gen_range(1..8);
            let m = ExactMatrix::from_rows(
                (0..nrows)
                    .map(|_| (0..ncols).map(|_| bi(rng.gen_range(-9..=9))).collect())
                    .collect(),
            );
            assert_eq!(m.rank(), m.transpose().rank());
        }
    }

    #[test]
    fn modular_rank_agrees_with_exact_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..8 {
            let nrows = rng.gen_range(1..=50);
            let ncols = rng.gen_range(1..=50);
            let m = ExactMatrix::from_rows(
                (0..nrows)
                    .map(|_| {
                        (0..ncols)
                            .map(|_| bi(rng.gen_range(-1_000_000..=1_000_000)))
                            .collect()
                    })
                    .collect(),
            );
            assert_eq!(m.rank_modular(), m.rank());
        }
    }

    #[test]
    fn bareiss_handles_rank_deficient_blocks() {
        // repeated rows, zero columns, and a wide block
        let m = dense(&[
            &[0, 3, 0, 6],
            &[0, 3, 0, 6],
            &[0, 1, 0, 2],
            &[1, 0, 0, 0],
        ]);
        assert_eq!(m.rank(), 2);
        let kb = m.kernel_basis();
        assert_eq!(kb.len(), 2);
    }

    // ---------------- sparse engine ----------------

    fn sparse_from_dense(m: &ExactMatrix) -> SparseCols {
        let mut s = SparseCols::new(m.nrows());
        for j in 0..m.ncols() {
            let col: SparseRow<BigInt> = (0..m.nrows())
                .filter(|&i| !Zero::is_zero(m.at(i, j)))
                .map(|i| (i as u32, m.at(i, j).clone()))
                .collect();
            s.push_col(col);
        }
        s
    }

    #[test]
    fn sparse_rank_matches_dense_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for round in 0..30 {
            let nrows = rng.gen_range(1..10);
            let ncols = rng.gen_range(1..10);
            let m = ExactMatrix::from_rows(
                (0..nrows)
                    .map(|_| {
                        (0..ncols)
                            .map(|_| {
                                if rng.gen_bool(0.4) {
                                    bi(0)
                                } else {
                                    bi(rng.gen_range(-8..=8))
                                }
                            })
                            .collect()
                    })
                    .collect(),
            );
            let s = sparse_from_dense(&m);
            assert_eq!(s.rank_exact(), m.rank(), "round {round}");
            for p in [MODULAR_PRIMES[0], MODULAR_PRIMES[5]] {
                assert_eq!(s.rank_mod(p), m.rank(), "round {round} mod {p}");
            }
        }
    }

    #[test]
    fn echelon_rows_stay_reduced_and_primitive() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut e: Echelon<i128> = Echelon::new(8);
        for _ in 0..12 {
            let mut cand: SparseRow<i128> = Vec::new();
            for c in 0..8u32 {
                if rng.gen_bool(0.5) {
                    let v: i128 = rng.gen_range(-5..=5);
                    if v != 0 {
                        cand.push((c, v));
                    }
                }
            }
            e.insert(cand).unwrap();
        }
        let pivots: Vec<u32> = e.pivot_coords().collect();
        for row in e.rows() {
            // leading coordinate is the pivot; no other pivot coordinate occurs
            assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
            for (c, v) in row.iter().skip(1) {
                assert!(!pivots.contains(c), "row not back-reduced");
                assert!(*v != 0);
            }
            // primitive, positive leading
            let mut g: i128 = 0;
            for (_, v) in row {
                g = Integer::gcd(&g, v);
            }
            assert_eq!(g, 1, "row content not stripped");
            assert!(row[0].1 > 0);
        }
    }

    #[test]
    fn echelon_is_insertion_order_independent() {
        // the reduced echelon basis of a span is unique, so shuffling the
        // candidate order must not change the stored rows
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let cands: Vec<SparseRow<i128>> = vec![
            vec![(0, 2), (2, 4), (5, -2)],
            vec![(1, 3), (2, 1)],
            vec![(0, 1), (1, 1), (5, 7)],
            vec![(2, 5)],
            vec![(0, 2), (2, 9), (5, -2)],
        ];
        let mut reference: Option<Vec<SparseRow<i128>>> = None;
        for _ in 0..6 {
            let mut order: Vec<usize> = (0..cands.len()).collect();
            use rand::seq::SliceRandom;
            order.shuffle(&mut rng);
            let mut e: Echelon<i128> = Echelon::new(6);
            for &i in &order {
                e.insert(cands[i].clone()).unwrap();
            }
            let mut rows = e.rows().to_vec();
            rows.sort_by_key(|r| r[0].0);
            match &reference {
                None => reference = Some(rows),
                Some(r) => assert_eq!(&rows, r),
            }
        }
    }

    #[test]
    fn overflow_escalates_to_bigint() {
        // entries too large for i128 at all
        let huge: BigInt = BigInt::from(1u8) << 200;
        let mut s = SparseCols::new(2);
        s.push_col(vec![(0, huge.clone()), (1, bi(1))]);
        s.push_col(vec![(0, bi(1)), (1, huge.clone())]);
        assert_eq!(s.rank_exact(), 2);

        // entries that fit i128 but whose elimination products overflow
        let big127: BigInt = BigInt::from(1u8) << 126;
        let mut s = SparseCols::new(3);
        s.push_col(vec![(0, big127.clone()), (1, bi(3))]);
        s.push_col(vec![(0, bi(3)), (1, big127.clone()), (2, bi(1))]);
        s.push_col(vec![(0, big127.clone()), (1, big127.clone()), (2, big127)]);
        let dense_m = ExactMatrix::from_sparse_cols(3, &s.cols);
        assert_eq!(s.rank_exact(), dense_m.rank());
    }

    #[test]
    fn pivot_split_counts_lower_block_rank() {
        // stack [A; D]: A occupies coordinates 0..2, D occupies 2..4
        // columns: (a_j, d_j)
        let mut s = SparseCols::new(4);
        s.push_col(vec![(0, bi(1)), (2, bi(1))]); // A-part e0
        s.push_col(vec![(0, bi(2)), (2, bi(5))]); // A-part dependent, D-part new
        s.push_col(vec![(3, bi(1))]); // pure D
        let (below, total) = s.pivot_split_exact(2);
        assert_eq!(below, 1); // rank of A = 1
        assert_eq!(total, 3);
        let (below_m, total_m) = s.pivot_split_mod(MODULAR_PRIMES[2], 2);
        assert_eq!((below_m, total_m), (below, total));
    }

    #[test]
    fn fp_arithmetic() {
        let p = MODULAR_PRIMES[0];
        let a = Fp::new(12345678901234567, p);
        let inv = a.inv();
        assert_eq!(a.mul(&inv).unwrap().v, 1);
        let z = a.sub(&a).unwrap();
        assert!(z.is_zero());
        assert_eq!(Fp::from_bigint(&bi(-1), p).v, p - 1);
    }
}
