//! Graded dimension tables attached to a homogeneous polynomial `f`.
//!
//! Throughout, `R = Q[x_1..x_n]`, `d = deg f`, and `Ω^p` denotes global
//! polynomial `p`-forms graded with `deg x_i = deg dx_i = 1`, so
//! `dim Ω^p_k = C(n,p) · dim R_{k−p}`.  The complex of interest is
//! `(Ω^•, df∧)`, whose differential raises internal degree by `d`.
//!
//! The tables:
//!
//! * `γ_k` — coefficients of `(t + ⋯ + t^{d−1})^n`, the Hilbert function of
//!   the Jacobian ring of a smooth hypersurface of degree `d`;
//! * `μ_k = dim (R/(∂f))_{k−n}` — the Milnor algebra, computed by a
//!   degree-by-degree sparse echelon sweep (the ideal's graded piece in
//!   degree `j` is spanned by `x_i ·` its piece in degree `j−1`, so each
//!   degree reuses the previous reduced basis);
//! * `ν_k = μ_k − γ_k ≥ 0`, stabilizing at `τ_Z`, the total Tjurina number
//!   of the singular points of the projective hypersurface;
//! * the splitting `μ_k = μ'_k + μ''_k` with `μ''_k = τ_Z − ν_{nd−k}`;
//! * `δ_k = μ_k − ν_{k+d}`;
//! * the second-page corrections `μ²_k = dim coker(d⁽¹⁾: N_{k+d} → M_k)`
//!   and `ν²_{k+d} = dim ker(d⁽¹⁾)`, where `M = H^n(Ω^•, df∧)`,
//!   `N_{k+d} ⊂ H^{n−1}` is represented by forms in `Ω^{n−1}_k`, and `d⁽¹⁾`
//!   is induced by the exterior derivative.
//!
//! `d⁽¹⁾` dimensions are obtained without materializing kernel bases: with
//! `A = df∧: Ω^{n−1}_k → Ω^n_{k+d}`, `D = d: Ω^{n−1}_k → Ω^n_k`, and
//! `J = df∧: Ω^{n−1}_{k−d} → Ω^n_k`, one elimination of the stacked columns
//! `{(A e_s, D e_s)} ∪ {(0, J e_t)}` yields both `rank A` (pivots in the
//! upper block) and `rank A + dim(D·ker A + J)` (total rank), hence
//! `dim im d⁽¹⁾ = dim(D·ker A + J) − rank J`.

use std::collections::HashMap;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::gradedla::{Coeff, Echelon, Fp, Overflow, SparseCols, MODULAR_PRIMES};
use crate::polyring::{monomials_of_degree, ring_dim, ExponentVector, HomogPoly};

/// Errors raised while building tables.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum KoszulError {
    /// `ν_k < 0` — mathematically impossible, signals an upstream bug.
    #[error("negative defect nu[{k}] = {value}; table data is inconsistent")]
    NegativeNu { k: i64, value: i64 },
    /// A split value went negative — likewise impossible.
    #[error("negative split value {label}[{k}] = {value}; table data is inconsistent")]
    NegativeSplit {
        label: &'static str,
        k: i64,
        value: i64,
    },
    /// The Milnor table does not satisfy the stabilization identities.
    #[error("milnor table not stabilized: mu[{k_low}] = {v_low} but mu[{k_high}] = {v_high}")]
    NotStabilized {
        k_low: i64,
        v_low: i64,
        k_high: i64,
        v_high: i64,
    },
    /// The Hilbert function of the Jacobian ring keeps moving past `nd`:
    /// the singular locus has positive dimension (or `f` is non-reduced).
    #[error(
        "singular locus is not isolated: mu still changes between degrees {k_a} and {k_b} ({v_a} -> {v_b})"
    )]
    NotIsolated { k_a: i64, v_a: i64, k_b: i64, v_b: i64 },
}

/// Which arithmetic backs rank computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArithMode {
    /// Fraction-free integer arithmetic end to end (the default).
    #[default]
    Exact,
    /// Ranks modulo two independent random 62-bit primes, falling back to
    /// exact arithmetic whenever the primes disagree.
    Modular,
}

fn two_random_primes() -> (u64, u64) {
    use rand::prelude::*;
    let mut rng = rand::thread_rng();
    let mut idx: Vec<usize> = (0..MODULAR_PRIMES.len()).collect();
    idx.shuffle(&mut rng);
    (MODULAR_PRIMES[idx[0]], MODULAR_PRIMES[idx[1]])
}

fn sparse_rank(cols: &SparseCols, mode: ArithMode) -> usize {
    match mode {
        ArithMode::Exact => cols.rank_exact(),
        ArithMode::Modular => {
            let (p1, p2) = two_random_primes();
            let r1 = cols.rank_mod(p1);
            let r2 = cols.rank_mod(p2);
            if r1 == r2 {
                r1
            } else {
                cols.rank_exact()
            }
        }
    }
}

fn sparse_pivot_split(cols: &SparseCols, boundary: u32, mode: ArithMode) -> (usize, usize) {
    match mode {
        ArithMode::Exact => cols.pivot_split_exact(boundary),
        ArithMode::Modular => {
            let (p1, p2) = two_random_primes();
            let s1 = cols.pivot_split_mod(p1, boundary);
            let s2 = cols.pivot_split_mod(p2, boundary);
            if s1 == s2 {
                s1
            } else {
                cols.pivot_split_exact(boundary)
            }
        }
    }
}

// ======================================================================
// Graded tables
// ======================================================================

/// Which invariant a [`GradedTable`] stores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableLabel {
    Gamma,
    Mu,
    Nu,
    MuPrime,
    MuDblPrime,
    Delta,
    Mu2,
    Nu2,
}

impl TableLabel {
    /// The ASCII row label used in TSV/text output.
    pub fn name(self) -> &'static str {
        match self {
            TableLabel::Gamma => "gamma",
            TableLabel::Mu => "mu",
            TableLabel::Nu => "nu",
            TableLabel::MuPrime => "mu_prime",
            TableLabel::MuDblPrime => "mu_dblprime",
            TableLabel::Delta => "delta",
            TableLabel::Mu2 => "mu2",
            TableLabel::Nu2 => "nu2",
        }
    }
}

/// One graded integer-valued function `k ↦ value`, stored on a finite
/// window with an optional constant continuation above it.
///
/// Reads below `offset` return 0; reads above the stored window return
/// `stable_tail` (or 0 when there is none).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GradedTable {
    pub label: TableLabel,
    /// Degree of `values[0]`.
    pub offset: i64,
    pub values: Vec<i64>,
    pub n: usize,
    pub d: u32,
    /// Value for every degree above the stored window, if constant.
    pub stable_tail: Option<i64>,
}

impl GradedTable {
    /// Value at degree `k` (0 below the window, tail above it).
    pub fn get(&self, k: i64) -> i64 {
        if k < self.offset {
            0
        } else if let Some(v) = self.values.get((k - self.offset) as usize) {
            *v
        } else {
            self.stable_tail.unwrap_or(0)
        }
    }

    /// Highest degree stored explicitly.
    pub fn hi(&self) -> i64 {
        self.offset + self.values.len() as i64 - 1
    }

    fn assert_compatible(&self, other: &GradedTable) {
        assert_eq!(
            (self.n, self.d),
            (other.n, other.d),
            "tables from different (n, d)"
        );
    }
}

/// Coefficients of `(t + ⋯ + t^{d−1})^n`: the Hilbert function
/// `k ↦ dim (R/(∂g))_{k−n}` of any smooth `g` of degree `d`.  Symmetric
/// about `nd/2`, supported on `[n, nd−n]`.
pub fn gamma_table(n: usize, d: u32) -> GradedTable {
    assert!(n >= 2 && d >= 2, "gamma table needs n >= 2, d >= 2");
    // (t + ... + t^{d-1})^n by iterated convolution
    let base = vec![1i64; (d - 1) as usize]; // coefficients of t^1..t^{d-1}, shifted
    let mut acc = vec![1i64];
    for _ in 0..n {
        let mut next = vec![0i64; acc.len() + base.len() - 1];
        for (i, &a) in acc.iter().enumerate() {
            if a != 0 {
                for (j, &b) in base.iter().enumerate() {
                    next[i + j] += a * b;
                }
            }
        }
        acc = next;
    }
    // acc[i] is the coefficient of t^{n + i}
    let nd = n as i64 * d as i64;
    let mut values = vec![0i64; (nd + 1) as usize];
    for (i, &a) in acc.iter().enumerate() {
        let k = n as i64 + i as i64;
        if k <= nd {
            values[k as usize] = a;
        }
    }
    GradedTable {
        label: TableLabel::Gamma,
        offset: 0,
        values,
        n,
        d,
        stable_tail: Some(0),
    }
}

/// The Arnold bound `Ar_{n−1}(d) = γ_{⌊(n−1)d/2⌋ + 1}` — the largest value
/// the total Milnor number of a degree-`d` hypersurface with only ordinary
/// double points can take.
pub fn arnold_number(n: usize, d: u32) -> i64 {
    assert!(n >= 3 && d >= 2);
    let k = (n as i64 - 1) * d as i64 / 2 + 1;
    gamma_table(n, d).get(k)
}

// ======================================================================
// The Milnor sweep
// ======================================================================

/// Mutable sweep state: the reduced echelon basis of the degree-`j` piece
/// of the Jacobian ideal, in coordinates indexed by `monomials_of_degree(n, j)`.
struct SweepState<C: Coeff> {
    j: i64,
    basis: Vec<ExponentVector>,
    ech: Echelon<C>,
}

/// Generators converted to backend coefficients, sorted by coordinate.
fn convert_gens<C: Coeff>(
    parts: &[Vec<(ExponentVector, BigInt)>],
    index: &HashMap<ExponentVector, u32>,
    conv: &(dyn Fn(&BigInt) -> Option<C> + Sync),
) -> Option<Vec<Vec<(u32, C)>>> {
    parts
        .iter()
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.iter()
                .map(|(e, c)| conv(c).map(|v| (index[e], v)))
                .collect::<Option<Vec<(u32, C)>>>()
        })
        .collect()
}

/// Build the degree-`j+1` state from the degree-`j` state.  Candidates are
/// `x_i ·` the current reduced rows (grevlex order is preserved by monomial
/// multiplication, so coordinate lists stay sorted), plus fresh generators
/// at the degree where the ideal starts.  Pure: the input state is left
/// untouched, so an overflow can be retried on another backend.
fn advance<C: Coeff>(
    n: usize,
    st: &SweepState<C>,
    extra_gens: Vec<Vec<(u32, C)>>,
) -> Result<SweepState<C>, Overflow> {
    let j1 = st.j + 1;
    let basis1 = monomials_of_degree(n, j1 as u32);
    let index1: HashMap<ExponentVector, u32> = basis1
        .iter()
        .enumerate()
        .map(|(i, e)| (e.clone(), i as u32))
        .collect();
    let mut cands: Vec<Vec<(u32, C)>> = extra_gens;
    cands.reserve(st.ech.rank() * n);
    for row in st.ech.rows() {
        for i in 0..n {
            let mapped: Vec<(u32, C)> = row
                .iter()
                .map(|(c, v)| {
                    let mut e = st.basis[*c as usize].clone();
                    e[i] += 1;
                    (index1[&e], v.clone())
                })
                .collect();
            cands.push(mapped);
        }
    }
    let mut ech = Echelon::new(basis1.len());
    // block insertion: serial inserts interleaved with parallel reduction
    // of the remaining candidates against the frozen partial basis
    const BLOCK: usize = 32;
    const PAR_MIN: usize = 96;
    let mut remaining = cands;
    while !remaining.is_empty() {
        let take = BLOCK.min(remaining.len());
        let batch: Vec<_> = remaining.drain(..take).collect();
        for cand in batch {
            ech.insert(cand)?;
        }
        if remaining.len() >= PAR_MIN {
            let reduced: Result<Vec<_>, Overflow> = remaining
                .into_par_iter()
                .map(|c| ech.reduce(c))
                .collect();
            remaining = reduced?;
            remaining.retain(|c| !c.is_empty());
        }
    }
    Ok(SweepState {
        j: j1,
        basis: basis1,
        ech,
    })
}

/// Milnor-sweep driver for integer backends, escalating `i128 → BigInt` on
/// overflow (the failed degree is redone, earlier degrees are converted in
/// place) and dropping back when entries fit comfortably again.
struct ExactSweep {
    n: usize,
    d: u32,
    parts: Vec<Vec<(ExponentVector, BigInt)>>,
    small: Option<SweepState<i128>>,
    big: Option<SweepState<BigInt>>,
    /// dims[j] = dim (R/(∂f))_j for processed degrees
    dims: Vec<i64>,
}

impl ExactSweep {
    fn new(f: &HomogPoly) -> Self {
        ExactSweep {
            n: f.n_vars(),
            d: f.degree(),
            parts: f.integer_partials(),
            small: Some(SweepState {
                j: -1,
                basis: Vec::new(),
                ech: Echelon::new(0),
            }),
            big: None,
            dims: Vec::new(),
        }
    }

    fn gens_at<C: Coeff>(
        &self,
        j1: i64,
        conv: &(dyn Fn(&BigInt) -> Option<C> + Sync),
    ) -> Result<Vec<Vec<(u32, C)>>, Overflow> {
        if j1 != (self.d as i64 - 1) {
            return Ok(Vec::new());
        }
        let basis1 = monomials_of_degree(self.n, j1 as u32);
        let index1: HashMap<ExponentVector, u32> = basis1
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i as u32))
            .collect();
        convert_gens(&self.parts, &index1, conv).ok_or(Overflow)
    }

    /// Process ring degrees up to and including `jmax`.
    fn advance_to(&mut self, jmax: i64) {
        while self.current_j() < jmax {
            let j1 = self.current_j() + 1;
            if let Some(st) = &self.small {
                let attempt = self
                    .gens_at::<i128>(j1, &|c| num_traits::ToPrimitive::to_i128(c))
                    .and_then(|gens| advance(self.n, st, gens));
                match attempt {
                    Ok(next) => {
                        self.record(next.ech.rank(), j1);
                        self.small = Some(next);
                        continue;
                    }
                    Err(Overflow) => {
                        // convert the (untouched, fully reduced) state
                        let st = self.small.take().unwrap();
                        self.big = Some(SweepState {
                            j: st.j,
                            basis: st.basis.clone(),
                            ech: st.ech.to_bigint(),
                        });
                    }
                }
            }
            let st = self.big.as_ref().unwrap();
            let gens = self
                .gens_at::<BigInt>(j1, &|c| Some(c.clone()))
                .expect("BigInt conversion cannot fail");
            let next =
                advance(self.n, st, gens).expect("BigInt arithmetic cannot overflow");
            self.record(next.ech.rank(), j1);
            // drop back to i128 when every entry fits in i64 again
            let fits = next.ech.rows().iter().all(|r| {
                r.iter()
                    .all(|(_, v)| num_traits::ToPrimitive::to_i64(v).is_some())
            });
            if fits {
                let small_rows: Vec<Vec<(u32, i128)>> = next
                    .ech
                    .rows()
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|(c, v)| (*c, num_traits::ToPrimitive::to_i128(v).unwrap()))
                            .collect()
                    })
                    .collect();
                let mut ech = Echelon::new(next.basis.len());
                for row in small_rows {
                    ech.insert(row).expect("converted rows cannot overflow");
                }
                self.small = Some(SweepState {
                    j: next.j,
                    basis: next.basis,
                    ech,
                });
                self.big = None;
            } else {
                self.big = Some(next);
            }
        }
    }

    fn current_j(&self) -> i64 {
        self.small
            .as_ref()
            .map(|s| s.j)
            .or(self.big.as_ref().map(|s| s.j))
            .unwrap()
    }

    fn record(&mut self, rank: usize, j: i64) {
        debug_assert_eq!(self.dims.len() as i64, j);
        self.dims.push(ring_dim(self.n, j) - rank as i64);
    }
}

/// Single-prime modular sweep (no escalation needed over a field).
fn modular_sweep_dims(f: &HomogPoly, jmax: i64, p: u64) -> Vec<i64> {
    let n = f.n_vars();
    let parts = f.integer_partials();
    let mut st = SweepState::<Fp> {
        j: -1,
        basis: Vec::new(),
        ech: Echelon::new(0),
    };
    let mut dims = Vec::new();
    while st.j < jmax {
        let j1 = st.j + 1;
        let gens = if j1 == f.degree() as i64 - 1 {
            let basis1 = monomials_of_degree(n, j1 as u32);
            let index1: HashMap<ExponentVector, u32> = basis1
                .iter()
                .enumerate()
                .map(|(i, e)| (e.clone(), i as u32))
                .collect();
            convert_gens(&parts, &index1, &|c| {
                let v = Fp::from_bigint(c, p);
                Some(v)
            })
            .unwrap()
            .into_iter()
            .map(|col| col.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect()
        } else {
            Vec::new()
        };
        st = advance(n, &st, gens).expect("field arithmetic cannot overflow");
        dims.push(ring_dim(n, st.j) - st.ech.rank() as i64);
    }
    dims
}

/// Hilbert function of `R/(∂f)` in ring degrees `0..=jmax`.
fn jacobian_dims(f: &HomogPoly, jmax: i64, mode: ArithMode) -> Vec<i64> {
    match mode {
        ArithMode::Exact => {
            let mut sweep = ExactSweep::new(f);
            sweep.advance_to(jmax);
            sweep.dims
        }
        ArithMode::Modular => {
            let (p1, p2) = two_random_primes();
            let d1 = modular_sweep_dims(f, jmax, p1);
            let d2 = modular_sweep_dims(f, jmax, p2);
            if d1 == d2 {
                d1
            } else {
                let mut sweep = ExactSweep::new(f);
                sweep.advance_to(jmax);
                sweep.dims
            }
        }
    }
}

/// Milnor table: `μ_k = dim (R/(∂f))_{k−n}` for `k ∈ [0, nd]`, with the
/// stable tail.
///
/// Stabilization: under an isolated singular locus, `μ` is constant from
/// `nd − n` on.  When `μ_{nd−n} ≠ μ_{nd}` (which happens for smooth `f`,
/// where the Milnor algebra is finite-dimensional: its socle degree
/// `n(d−2)` sits between the two read points), the sweep is extended to
/// degrees `nd + d` and `nd + 2d`; a still-constant continuation is
/// accepted as the tail, anything else raises `NotIsolated`.  Three read
/// points `d` apart rule out any non-constant Hilbert polynomial of degree
/// ≤ 2, i.e. every singular locus of positive dimension at these sizes.
pub fn milnor_table(f: &HomogPoly, mode: ArithMode) -> Result<GradedTable, KoszulError> {
    let n = f.n_vars();
    let d = f.degree();
    let nd = n as i64 * d as i64;
    let top_j = nd - n as i64; // ring degree of mu_{nd}
    let mut sweep = ExactSweep::new(f);
    let dims: Vec<i64>;
    match mode {
        ArithMode::Exact => {
            sweep.advance_to(top_j);
            dims = sweep.dims.clone();
        }
        ArithMode::Modular => {
            dims = jacobian_dims(f, top_j, mode);
        }
    }
    let mu_at = |k: i64| -> i64 {
        let j = k - n as i64;
        if j < 0 {
            0
        } else {
            dims[j as usize]
        }
    };
    let read_low = mu_at(nd - n as i64);
    let read_high = mu_at(nd);
    let tail = if read_low == read_high {
        read_high
    } else {
        // extend to nd + d and nd + 2d (ring degrees top_j + d, top_j + 2d)
        let ext = match mode {
            ArithMode::Exact => {
                sweep.advance_to(top_j + 2 * d as i64);
                sweep.dims.clone()
            }
            ArithMode::Modular => jacobian_dims(f, top_j + 2 * d as i64, mode),
        };
        let v1 = ext[(top_j + d as i64) as usize];
        let v2 = ext[(top_j + 2 * d as i64) as usize];
        if read_high == v1 && v1 == v2 {
            read_high
        } else if read_high != v1 {
            return Err(KoszulError::NotIsolated {
                k_a: nd,
                v_a: read_high,
                k_b: nd + d as i64,
                v_b: v1,
            });
        } else {
            return Err(KoszulError::NotIsolated {
                k_a: nd + d as i64,
                v_a: v1,
                k_b: nd + 2 * d as i64,
                v_b: v2,
            });
        }
    };
    let values: Vec<i64> = (0..=nd).map(mu_at).collect();
    Ok(GradedTable {
        label: TableLabel::Mu,
        offset: 0,
        values,
        n,
        d,
        stable_tail: Some(tail),
    })
}

/// Total Tjurina number `τ_Z`, read from a stabilized Milnor table.
///
/// The isolated-singularity identities give `μ_{nd−n} = μ_{nd} = τ_Z`; both
/// reads are compared and, when the table carries a verified stable tail
/// (the smooth case reads `1 ≠ 0` here precisely because the finite Milnor
/// algebra dies between the two points), the tail wins.  A table with
/// disagreeing reads and no verified tail raises `NotStabilized`.
pub fn tau_from_mu(mu: &GradedTable) -> Result<i64, KoszulError> {
    let nd = mu.n as i64 * mu.d as i64;
    let low = mu.get(nd - mu.n as i64);
    let high = mu.get(nd);
    match mu.stable_tail {
        Some(t) if t == high => Ok(t),
        None if low == high => Ok(high),
        _ => Err(KoszulError::NotStabilized {
            k_low: nd - mu.n as i64,
            v_low: low,
            k_high: nd,
            v_high: high,
        }),
    }
}

/// Defect table `ν_k = μ_k − γ_k`; must be point-wise non-negative.
pub fn nu_table(mu: &GradedTable, gamma: &GradedTable) -> Result<GradedTable, KoszulError> {
    mu.assert_compatible(gamma);
    let nd = mu.n as i64 * mu.d as i64;
    let mut values = Vec::with_capacity((nd + 1) as usize);
    for k in 0..=nd {
        let v = mu.get(k) - gamma.get(k);
        if v < 0 {
            return Err(KoszulError::NegativeNu { k, value: v });
        }
        values.push(v);
    }
    Ok(GradedTable {
        label: TableLabel::Nu,
        offset: 0,
        values,
        n: mu.n,
        d: mu.d,
        stable_tail: mu.stable_tail,
    })
}

/// The splitting `μ = μ' + μ''` with `μ''_k = τ_Z − ν_{nd−k}`.
///
/// `μ''` is the part of the Milnor algebra coming from the singular points
/// of `Z`; `μ'` is the finite-length complement, symmetric about `nd/2`.
pub fn split_table(
    mu: &GradedTable,
    nu: &GradedTable,
    tau: i64,
) -> Result<(GradedTable, GradedTable), KoszulError> {
    mu.assert_compatible(nu);
    let nd = mu.n as i64 * mu.d as i64;
    let mut dbl = Vec::with_capacity((nd + 1) as usize);
    let mut prime = Vec::with_capacity((nd + 1) as usize);
    for k in 0..=nd {
        let mdd = tau - nu.get(nd - k);
        if mdd < 0 {
            return Err(KoszulError::NegativeSplit {
                label: "mu_dblprime",
                k,
                value: mdd,
            });
        }
        let mp = mu.get(k) - mdd;
        if mp < 0 {
            return Err(KoszulError::NegativeSplit {
                label: "mu_prime",
                k,
                value: mp,
            });
        }
        dbl.push(mdd);
        prime.push(mp);
    }
    let mk = |label, values, tail| GradedTable {
        label,
        offset: 0,
        values,
        n: mu.n,
        d: mu.d,
        stable_tail: Some(tail),
    };
    Ok((
        mk(TableLabel::MuPrime, prime, 0),
        mk(TableLabel::MuDblPrime, dbl, tau),
    ))
}

/// Difference table `δ_k = μ_k − ν_{k+d}` for `k ∈ [0, nd)`.
///
/// Values may be negative only at `k ∈ d·R_Z`; they are stored raw because
/// the classifier consumes them unclamped.
pub fn delta_table(mu: &GradedTable, nu: &GradedTable) -> GradedTable {
    mu.assert_compatible(nu);
    let nd = mu.n as i64 * mu.d as i64;
    let values: Vec<i64> = (0..nd)
        .map(|k| mu.get(k) - nu.get(k + mu.d as i64))
        .collect();
    GradedTable {
        label: TableLabel::Delta,
        offset: 0,
        values,
        n: mu.n,
        d: mu.d,
        stable_tail: Some(0),
    }
}

// ======================================================================
// Form bases and the df∧ / d matrices
// ======================================================================

/// Binomial coefficient, small arguments.
fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k.min(n - k) {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Lexicographically ascending `p`-element subsets of `0..n`.
fn subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binom(n, p));
    let mut cur = Vec::with_capacity(p);
    fn rec(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, p, cur, out);
            cur.pop();
        }
    }
    rec(0, n, p, &mut cur, &mut out);
    out
}

/// `dim Ω^p_k = C(n,p) · dim R_{k−p}`.
pub fn form_dim(n: usize, p: usize, k: i64) -> i64 {
    if p > n {
        return 0;
    }
    binom(n, p) as i64 * ring_dim(n, k - p as i64)
}

/// Basis bookkeeping for one graded piece `Ω^p_k`: component subsets and
/// the monomial basis of the coefficients, with coordinates laid out
/// component-major.
struct FormBasis {
    subsets: Vec<Vec<usize>>,
    monos: Vec<ExponentVector>,
    index: HashMap<ExponentVector, u32>,
}

impl FormBasis {
    fn new(n: usize, p: usize, k: i64) -> Option<FormBasis> {
        if p > n || k < p as i64 {
            return None;
        }
        let monos = monomials_of_degree(n, (k - p as i64) as u32);
        let index = monos
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i as u32))
            .collect();
        Some(FormBasis {
            subsets: subsets(n, p),
            monos,
            index,
        })
    }

    fn dim(&self) -> usize {
        self.subsets.len() * self.monos.len()
    }

    fn coord(&self, subset_idx: usize, mono_idx: u32) -> u32 {
        (subset_idx * self.monos.len()) as u32 + mono_idx
    }
}

/// Columns of `df∧ : Ω^p_k → Ω^{p+1}_{k+d}` in the component-major bases.
///
/// For a domain element `m·dx_S` the image is
/// `Σ_{i∉S} (−1)^{|{s∈S : s<i}|} (m·∂_i f) dx_{S∪{i}}`.
fn wedge_df_cols(
    parts: &[Vec<(ExponentVector, BigInt)>],
    n: usize,
    p: usize,
    dom: &FormBasis,
    cod: &FormBasis,
) -> Vec<Vec<(u32, BigInt)>> {
    debug_assert_eq!(dom.subsets.len(), binom(n, p));
    // position of each (p+1)-subset in the codomain ordering
    let cod_pos: HashMap<&[usize], usize> = cod
        .subsets
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_slice(), i))
        .collect();
    let mut cols = Vec::with_capacity(dom.dim());
    for s in &dom.subsets {
        for m in &dom.monos {
            let mut col: Vec<(u32, BigInt)> = Vec::new();
            for i in 0..n {
                if s.contains(&i) || parts[i].is_empty() {
                    continue;
                }
                let below = s.iter().filter(|&&x| x < i).count();
                let neg = below % 2 == 1;
                let mut t: Vec<usize> = s.clone();
                t.insert(below, i);
                let ti = cod_pos[t.as_slice()];
                for (e, c) in &parts[i] {
                    let prod: ExponentVector =
                        m.iter().zip(e).map(|(a, b)| a + b).collect();
                    let coord = cod.coord(ti, cod.index[&prod]);
                    let v = if neg { -c.clone() } else { c.clone() };
                    col.push((coord, v));
                }
            }
            col.sort_by_key(|e| e.0);
            // merge duplicates (distinct i never collide in component, but
            // one partial may hit the same monomial twice)
            let mut merged: Vec<(u32, BigInt)> = Vec::with_capacity(col.len());
            for (c, v) in col {
                match merged.last_mut() {
                    Some((lc, lv)) if *lc == c => *lv += v,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|(_, v)| !num_traits::Zero::is_zero(v));
            cols.push(merged);
        }
    }
    cols
}

/// Columns of the exterior derivative `d : Ω^{n−1}_k → Ω^n_k`.
///
/// With `(n−1)`-subsets in ascending lex order, the subset at position `s`
/// omits variable `i = n−1−s`, and `d(m·dx_{omit i}) = (−1)^i ∂_i(m)·vol`.
fn ext_d_cols(n: usize, dom: &FormBasis, cod: &FormBasis) -> Vec<Vec<(u32, BigInt)>> {
    let mut cols = Vec::with_capacity(dom.dim());
    for (si, _s) in dom.subsets.iter().enumerate() {
        let i = n - 1 - si;
        let neg = i % 2 == 1;
        for m in &dom.monos {
            let mut col = Vec::new();
            if m[i] > 0 {
                let mut e = m.clone();
                e[i] -= 1;
                let v = BigInt::from(m[i]);
                col.push((cod.index[&e], if neg { -v } else { v }));
            }
            cols.push(col);
        }
    }
    cols
}

/// Dimension of the degree-`k` piece of `H^j(Ω^•, df∧)`:
/// `dim Ω^j_k − rank(df∧ on Ω^j_k) − rank(df∧ on Ω^{j−1}_{k−d})`.
///
/// This recomputes each rank from scratch, so it serves as an oracle,
/// independent of the incremental sweep, for `μ` (`j = n`) and `ν`
/// (`j = n−1`, internal degree shifted by `−d`), and checks the vanishing
/// `H^j = 0` for `j ≤ n−2` under an isolated singular locus.
pub fn koszul_h_dim(f: &HomogPoly, j: usize, k: i64, mode: ArithMode) -> i64 {
    let n = f.n_vars();
    assert!(j <= n, "cohomological index out of range");
    let d = f.degree() as i64;
    let parts = f.integer_partials();
    let dim_here = form_dim(n, j, k);
    if dim_here == 0 {
        return 0;
    }
    let rank_out = if j == n {
        0
    } else {
        rank_of_wedge(&parts, n, j, k, d, mode)
    };
    let rank_in = if j == 0 {
        0
    } else {
        rank_of_wedge(&parts, n, j - 1, k - d, d, mode)
    };
    let h = dim_here - rank_out as i64 - rank_in as i64;
    assert!(h >= 0, "negative cohomology dimension — rank bookkeeping bug");
    h
}

fn rank_of_wedge(
    parts: &[Vec<(ExponentVector, BigInt)>],
    n: usize,
    p: usize,
    k: i64,
    d: i64,
    mode: ArithMode,
) -> usize {
    let (Some(dom), Some(cod)) = (FormBasis::new(n, p, k), FormBasis::new(n, p + 1, k + d))
    else {
        return 0;
    };
    let cols = wedge_df_cols(parts, n, p, &dom, &cod);
    let mut sc = SparseCols::new(cod.dim());
    for c in cols {
        sc.push_col(c);
    }
    sparse_rank(&sc, mode)
}

// ======================================================================
// E2 dimensions
// ======================================================================

/// Second-page dimensions `μ²_k` and `ν²_{k+d}` for every `k` in range.
///
/// Builds the Milnor and defect tables internally; use
/// [`e2_tables_with`] to reuse tables you already have.
pub fn e2_tables(
    f: &HomogPoly,
    k_range: RangeInclusive<i64>,
    mode: ArithMode,
) -> Result<(GradedTable, GradedTable), KoszulError> {
    let mu = milnor_table(f, mode)?;
    let gamma = gamma_table(f.n_vars(), f.degree());
    let nu = nu_table(&mu, &gamma)?;
    e2_tables_with(f, k_range, mode, &mu, &nu)
}

/// Second-page dimensions, reusing existing `μ` and `ν` tables.
///
/// Per degree `k` this runs one sparse elimination of the stacked columns
/// described in the module documentation; `rank J` is not recomputed but
/// read off `μ_k = dim Ω^n_k − rank J`.  Degrees are independent and run
/// in parallel.
pub fn e2_tables_with(
    f: &HomogPoly,
    k_range: RangeInclusive<i64>,
    mode: ArithMode,
    mu: &GradedTable,
    nu: &GradedTable,
) -> Result<(GradedTable, GradedTable), KoszulError> {
    let n = f.n_vars();
    let d = f.degree() as i64;
    let parts = f.integer_partials();
    let ks: Vec<i64> = k_range.clone().collect();
    let dims: Vec<(i64, i64)> = ks
        .par_iter()
        .map(|&k| {
            let mu_k = mu.get(k);
            let nu_kd = nu.get(k + d);
            if form_dim(n, n - 1, k) == 0 {
                // no (n−1)-forms: both spaces are zero or untouched
                return (mu_k, nu_kd);
            }
            let im = d1_image_dim(&parts, n, d, k, mu_k, mode);
            let mu2 = mu_k - im;
            let nu2 = nu_kd - im;
            assert!(
                mu2 >= 0 && nu2 >= 0,
                "negative E2 dimension at k = {k} — rank bookkeeping bug"
            );
            (mu2, nu2)
        })
        .collect();
    let lo = *ks.first().expect("empty degree range");
    let mu2 = GradedTable {
        label: TableLabel::Mu2,
        offset: lo,
        values: dims.iter().map(|p| p.0).collect(),
        n,
        d: f.degree(),
        stable_tail: None,
    };
    let nu2 = GradedTable {
        label: TableLabel::Nu2,
        offset: lo + d,
        values: dims.iter().map(|p| p.1).collect(),
        n,
        d: f.degree(),
        stable_tail: None,
    };
    Ok((mu2, nu2))
}

/// `dim im(d⁽¹⁾: N_{k+d} → M_k)` by the stacked elimination.
fn d1_image_dim(
    parts: &[Vec<(ExponentVector, BigInt)>],
    n: usize,
    d: i64,
    k: i64,
    mu_k: i64,
    mode: ArithMode,
) -> i64 {
    let dom = FormBasis::new(n, n - 1, k).expect("caller checked the domain");
    // upper block: Ω^n_{k+d}; lower block: Ω^n_k
    let cod_a = FormBasis::new(n, n, k + d);
    let cod_d = FormBasis::new(n, n, k);
    let dim_a = cod_a.as_ref().map_or(0, |b| b.dim());
    let dim_d = cod_d.as_ref().map_or(0, |b| b.dim());
    let boundary = dim_a as u32;
    let a_cols = cod_a
        .as_ref()
        .map(|cod| wedge_df_cols(parts, n, n - 1, &dom, cod))
        .unwrap_or_else(|| vec![Vec::new(); dom.dim()]);
    let d_cols = cod_d
        .as_ref()
        .map(|cod| ext_d_cols(n, &dom, cod))
        .unwrap_or_else(|| vec![Vec::new(); dom.dim()]);
    let mut sc = SparseCols::new(dim_a + dim_d);
    for (ac, dc) in a_cols.into_iter().zip(d_cols) {
        let mut col = ac;
        col.extend(dc.into_iter().map(|(c, v)| (c + boundary, v)));
        sc.push_col(col);
    }
    // J columns: df∧ from Ω^{n−1}_{k−d} into the lower block
    if let (Some(jdom), Some(cod)) = (FormBasis::new(n, n - 1, k - d), cod_d.as_ref()) {
        for col in wedge_df_cols(parts, n, n - 1, &jdom, cod) {
            sc.push_col(col.into_iter().map(|(c, v)| (c + boundary, v)).collect());
        }
    }
    let (rank_a, total) = sparse_pivot_split(&sc, boundary, mode);
    // rank J = dim Ω^n_k − μ_k
    let rank_j = dim_d as i64 - mu_k;
    let im = (total as i64 - rank_a as i64) - rank_j;
    assert!(im >= 0, "stacked elimination produced negative image at k = {k}");
    im
}

// ======================================================================
// Bundles and rendering
// ======================================================================

/// Everything the table subcommands and the classifier consume.
#[derive(Debug, Clone, Serialize)]
pub struct TableBundle {
    pub n: usize,
    pub d: u32,
    pub tau: i64,
    pub gamma: GradedTable,
    pub mu: GradedTable,
    pub nu: GradedTable,
    pub mu_prime: GradedTable,
    pub mu_dblprime: GradedTable,
    pub delta: GradedTable,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu2: Option<GradedTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu2: Option<GradedTable>,
}

/// Build all first-page tables (and, on request, the E2 pair over
/// `[n − d, nd]`, which covers every printed column of both).
pub fn compute_tables(
    f: &HomogPoly,
    mode: ArithMode,
    with_e2: bool,
) -> Result<TableBundle, KoszulError> {
    let n = f.n_vars();
    let d = f.degree();
    let nd = n as i64 * d as i64;
    let gamma = gamma_table(n, d);
    let mu = milnor_table(f, mode)?;
    let nu = nu_table(&mu, &gamma)?;
    let tau = tau_from_mu(&mu)?;
    let (mu_prime, mu_dblprime) = split_table(&mu, &nu, tau)?;
    let delta = delta_table(&mu, &nu);
    let (mu2, nu2) = if with_e2 {
        let (a, b) = e2_tables_with(f, (n as i64 - d as i64)..=nd, mode, &mu, &nu)?;
        (Some(a), Some(b))
    } else {
        (None, None)
    };
    Ok(TableBundle {
        n,
        d,
        tau,
        gamma,
        mu,
        nu,
        mu_prime,
        mu_dblprime,
        delta,
        mu2,
        nu2,
    })
}

impl TableBundle {
    /// Row order used by the text and TSV renderings.
    fn rows(&self) -> Vec<&GradedTable> {
        let mut rows = vec![&self.gamma, &self.mu, &self.nu];
        if let Some(m2) = &self.mu2 {
            rows.push(m2);
        }
        if let Some(n2) = &self.nu2 {
            rows.push(n2);
        }
        rows.push(&self.mu_dblprime);
        rows.push(&self.mu_prime);
        rows.push(&self.delta);
        rows
    }

    /// Tab-separated block: header `k  n..nd`, one row per table.
    pub fn to_tsv(&self) -> String {
        self.to_tsv_until(self.n as i64 * self.d as i64)
    }

    /// [`Self::to_tsv`] with columns up to degree `k_hi` instead of `nd`
    /// (stable tails extend past the stored window).
    pub fn to_tsv_until(&self, k_hi: i64) -> String {
        let ks: Vec<i64> = (self.n as i64..=k_hi).collect();
        let mut out = String::new();
        out.push('k');
        for k in &ks {
            out.push('\t');
            out.push_str(&k.to_string());
        }
        out.push('\n');
        for t in self.rows() {
            out.push_str(t.label.name());
            for &k in &ks {
                out.push('\t');
                out.push_str(&t.get(k).to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Fixed-width text block of the same data.
    pub fn to_text(&self) -> String {
        self.to_text_until(self.n as i64 * self.d as i64)
    }

    /// [`Self::to_text`] with columns up to degree `k_hi` instead of `nd`.
    pub fn to_text_until(&self, k_hi: i64) -> String {
        let ks: Vec<i64> = (self.n as i64..=k_hi).collect();
        let rows = self.rows();
        let label_w = rows
            .iter()
            .map(|t| t.label.name().len())
            .max()
            .unwrap()
            .max(1);
        // column widths
        let widths: Vec<usize> = ks
            .iter()
            .map(|&k| {
                rows.iter()
                    .map(|t| t.get(k).to_string().len())
                    .max()
                    .unwrap()
                    .max(k.to_string().len())
            })
            .collect();
        let mut out = String::new();
        out.push_str(&format!("{:label_w$}", "k"));
        for (i, &k) in ks.iter().enumerate() {
            out.push_str(&format!(" {:>w$}", k, w = widths[i]));
        }
        out.push('\n');
        for t in rows {
            out.push_str(&format!("{:label_w$}", t.label.name()));
            for (i, &k) in ks.iter().enumerate() {
                out.push_str(&format!(" {:>w$}", t.get(k), w = widths[i]));
            }
            out.push('\n');
        }
        out.push_str(&format!("tau = {}\n", self.tau));
        out
    }
}
