//! The decision layer: from graded tables and local singularity data to a
//! classified set of Bernstein–Sato root candidates with evidence.
//!
//! Every candidate root supported at the origin is a rational `k/d` with
//! `k ∈ [1, nd)`.  Writing `δ_k = μ_k − ν_{k+d}` for the defect computed in
//! [`koszul`](crate::koszul), and `R_Z` for the union of the local
//! Bernstein–Sato root sets aggregated in [`localspec`](crate::localspec),
//! the classification rests on three facts that hold once every singular
//! point of `Z` is weighted homogeneous (so that the pole-order spectral
//! sequence degenerates at its second page):
//!
//! * `δ_k > 0` forces `k/d` to be a root supported at the origin; in
//!   particular every candidate in `[n/d, α_Z)` is one, because there the
//!   defect is automatically positive.
//! * `δ_k = 0` excludes `k/d` **provided** no local root exceeds it by a
//!   positive integer (the integer-shift test); candidates below
//!   `α_f = min(α_Z, n/d)` are excluded unconditionally, `α_f` being the
//!   smallest root the polynomial can have at all.
//! * candidates lying in `R_Z` itself are already roots by restriction to
//!   the singular points; the tables say nothing further about them.
//!
//! One gap remains: `δ_k ≤ 0` at a candidate that *is* an integer shift of a
//! local root decides nothing, and the only honest verdict is
//! [`Status::Undetermined`].  The candidates where this can happen form the
//! [`critical_set`]: integer-shifted local roots inside the spectral window
//! `[α_Z, n−2−α_Z]` that are not local roots themselves.  When every
//! critical candidate has a positive defect (see
//! [`critical_deltas_positive`]), the classification is complete.
//!
//! Around the classification proper, this module offers consistency and
//! completeness diagnostics:
//!
//! * [`validate_w`] — the weighted-homogeneity gate.  The stable tail of the
//!   global `μ` table is the total Tjurina number of `Z`, while the local
//!   data aggregates Milnor numbers; the two agree exactly when every
//!   singularity is weighted homogeneous **and** the singularity list is
//!   complete, so a mismatch rejects the input before any verdict is
//!   emitted.
//! * [`euler_char`] — the Euler characteristic of the hypersurface
//!   complement, over-determined by the tables: the binomial sums give one
//!   value per nonzero residue class mod `d`, and the defect rows must
//!   reproduce it in every residue class.  Any disagreement signals broken
//!   invariants upstream and aborts the analysis.
//! * [`connectedness`] — whether the defect support outside `d·R_Z` fills an
//!   integer interval `{k_min, …, k_max}` with gaps only at integers of
//!   `d·R_Z`.
//! * [`roots_from_support`] — when that interval starts exactly at `n` and
//!   reaches far enough, the origin roots are the whole interval minus
//!   `d·R_Z`, in closed form.
//! * [`tail_window_check`] — sufficient conditions for the interval shape,
//!   comparing the total Milnor number against windows of the binomial
//!   table around the half-degree (with a special branch when every
//!   singular point is an ordinary double point), and predicting
//!   `k_min = n`, `k_max = n(d−1) − min(d, β_f)`.
//!
//! All functions here are pure decision logic over precomputed tables —
//! no arithmetic heavier than rational comparisons — and are safe to call
//! concurrently on distinct inputs.

use std::collections::BTreeSet;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::koszul::{arnold_number, GradedTable, TableBundle};
use crate::localspec::SingularityData;
use crate::{rat_string, Rat, RationalSet};

// ======================================================================
// Errors
// ======================================================================

/// Rejections and consistency failures of the decision layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    /// The global Jacobian-ring tail (total Tjurina number of `Z`)
    /// disagrees with the total Milnor number of the declared local types.
    #[error(
        "weighted-homogeneity check failed: the global Jacobian tail is {tau_global} \
         but the declared singularities total {mu_z}; either some singular point is \
         not weighted homogeneous, or the singularity list is incomplete"
    )]
    WViolation { tau_global: i64, mu_z: i64 },

    /// The Euler characteristic of the complement is over-determined and
    /// two determinations disagree — the input violates the hypotheses or
    /// an invariant broke upstream; no report is produced.
    #[error("Euler-characteristic cross-check failed ({context}): expected {expected}, found {found}")]
    ChiMismatch {
        context: String,
        expected: i64,
        found: i64,
    },

    /// The support-window estimates require the degree to be at least the
    /// number of variables.
    #[error("the support-window estimates need d >= n, got n = {n}, d = {d}")]
    NotApplicable { n: usize, d: u32 },

    /// More ordinary double points were declared than a hypersurface of
    /// this degree can carry.
    #[error(
        "{count} ordinary double points exceed the maximum {bound} possible on a \
         degree-{d} hypersurface in P^{m}; the input is impossible",
        m = n - 1
    )]
    TooManyNodes {
        count: i64,
        bound: i64,
        n: usize,
        d: u32,
    },
}

// ======================================================================
// Statuses and evidence
// ======================================================================

/// Verdict for one candidate `k/d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    /// `δ_k > 0` and `k/d ∉ R_Z`: a root supported at the origin.
    RootR0,
    /// Not a root: either below `α_f`, or defect-free and not an integer
    /// shift of any local root.
    NonRoot,
    /// `k/d ∈ R_Z`: a root contributed by the singular points; the tables
    /// carry no separate verdict about the origin for it.
    InRz,
    /// `δ_k ≤ 0` on an integer-shifted local root: the method cannot
    /// decide.  Never silently upgraded.
    Undetermined,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::RootR0 => "ROOT_R0",
            Status::NonRoot => "NON_ROOT",
            Status::InRz => "IN_RZ",
            Status::Undetermined => "UNDETERMINED",
        })
    }
}

/// The raw facts a verdict was derived from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Evidence {
    /// `δ_k = μ_k − ν_{k+d}`.
    pub delta: i64,
    /// `k/d` is *not* an integer shift of a local root (no element of
    /// `R_Z` exceeds it by a positive integer).
    pub outside_shifted_rz: bool,
    /// `k/d < α_f = min(α_Z, n/d)`.
    pub below_alpha_f: bool,
}

/// One classified candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootStatus {
    /// Numerator: the candidate is `k/d`.
    pub k: i64,
    /// The candidate value `k/d`, reduced.
    #[serde(serialize_with = "ser_rat")]
    pub value: Rat,
    pub status: Status,
    pub evidence: Evidence,
}

// ======================================================================
// Classification
// ======================================================================

/// Smallest possible root `α_f = min(α_Z, n/d)`; with no singular points
/// the local minimum is vacuous and `α_f = n/d`.
pub fn alpha_f(szd: Option<&SingularityData>, n: usize, d: u32) -> Rat {
    let nd = kd(n as i64, d);
    match szd {
        Some(s) => s.alpha.clone().min(nd),
        None => nd,
    }
}

/// Integer-shifted local roots inside the spectral window: all integers `k`
/// with `k/d ∈ [α_Z, n−2−α_Z]`, `k/d ∉ R_Z`, and `k/d` an integer shift of
/// some element of `R_Z`.  These are exactly the candidates on which the
/// defect method can fail to decide.
pub fn critical_set(szd: &SingularityData, n: usize, d: u32) -> BTreeSet<i64> {
    let lo = ceil_i64(&(&szd.alpha * Rat::from_integer(i64::from(d).into())));
    let window_hi = (Rat::from_integer((n as i64 - 2).into()) - &szd.alpha)
        * Rat::from_integer(i64::from(d).into());
    let hi = floor_i64(&window_hi);
    (lo..=hi)
        .filter(|&k| {
            let v = kd(k, d);
            !szd.contains(&v) && szd.in_r_z_shifted(&v)
        })
        .collect()
}

/// Whether `δ_k > 0` for every critical candidate.  When this holds the
/// classification below contains no [`Status::Undetermined`] entries and
/// the origin root set is exactly the positive-defect candidates outside
/// `R_Z`.
pub fn critical_deltas_positive(delta: &GradedTable, critical: &BTreeSet<i64>) -> bool {
    critical.iter().all(|&k| delta.get(k) > 0)
}

/// Classify every candidate `k/d`, `k ∈ [1, nd)`.  Pass `szd = None` for a
/// smooth hypersurface (empty `R_Z`).
///
/// Order of the rules: membership in `R_Z` first, then positive defect,
/// then the two exclusion tests; what survives is undetermined.
pub fn classify(
    delta: &GradedTable,
    szd: Option<&SingularityData>,
    n: usize,
    d: u32,
) -> Vec<RootStatus> {
    let nd = n as i64 * i64::from(d);
    let af = alpha_f(szd, n, d);
    (1..nd)
        .map(|k| {
            let value = kd(k, d);
            let dk = delta.get(k);
            let in_rz = szd.map_or(false, |s| s.contains(&value));
            let shifted = szd.map_or(false, |s| s.in_r_z_shifted(&value));
            let below = value < af;
            let status = if in_rz {
                Status::InRz
            } else if dk > 0 {
                Status::RootR0
            } else if below || !shifted {
                Status::NonRoot
            } else {
                Status::Undetermined
            };
            RootStatus {
                k,
                value,
                status,
                evidence: Evidence {
                    delta: dk,
                    outside_shifted_rz: !shifted,
                    below_alpha_f: below,
                },
            }
        })
        .collect()
}

// ======================================================================
// Support diagnostics
// ======================================================================

/// Support of the defect outside `d·R_Z`, and whether it is an integer
/// interval with gaps only at integers of `d·R_Z`.
///
/// Returns `(connected_outside, k_min, k_max)`; an empty support is
/// trivially connected with no endpoints.
pub fn connectedness(
    delta: &GradedTable,
    szd: Option<&SingularityData>,
    d: u32,
) -> (bool, Option<i64>, Option<i64>) {
    let in_rz = |k: i64| szd.map_or(false, |s| s.contains(&kd(k, d)));
    let support: Vec<i64> = (delta.offset..=delta.hi())
        .filter(|&k| delta.get(k) != 0 && !in_rz(k))
        .collect();
    let (Some(&k_min), Some(&k_max)) = (support.first(), support.last()) else {
        return (true, None, None);
    };
    let set: BTreeSet<i64> = support.into_iter().collect();
    let connected = (k_min..=k_max).all(|k| set.contains(&k) || in_rz(k));
    (connected, Some(k_min), Some(k_max))
}

/// `β_f`: least `k` with `μ'_k ≠ 0`, minus `n`; `None` when `μ'` vanishes
/// identically (the defect then has no interior part at all).
pub fn beta_f(mu_prime: &GradedTable) -> Option<i64> {
    (mu_prime.offset..=mu_prime.hi())
        .find(|&k| mu_prime.get(k) != 0)
        .map(|k| k - mu_prime.n as i64)
}

/// Closed form for the origin roots from the support interval.
///
/// Applicable when the support outside `d·R_Z` is connected, starts exactly
/// at `k_min = n`, and `k_max` reaches at least `max(d·R_Z ∩ Z) − d` (so
/// that everything above `k_max` is excluded by the integer-shift test).
/// With `n3_kmax_variant` set and `n = 3`, the reach condition is replaced
/// by `k_max ≥ d − 1`.  Returns the numerator set `d·R_f^0 =
/// {n, …, k_max} \ d·R_Z` when applicable, `None` otherwise.
pub fn roots_from_support(
    connected: bool,
    k_min: Option<i64>,
    k_max: Option<i64>,
    szd: Option<&SingularityData>,
    n: usize,
    d: u32,
    n3_kmax_variant: bool,
) -> Option<BTreeSet<i64>> {
    let (Some(k_min), Some(k_max)) = (k_min, k_max) else {
        return None;
    };
    if !connected || k_min != n as i64 {
        return None;
    }
    let reach_ok = if n3_kmax_variant && n == 3 {
        k_max >= i64::from(d) - 1
    } else {
        // Largest integer of d·R_Z, if any; an empty set imposes nothing.
        let max_drz = szd.and_then(|s| {
            s.r_z
                .iter()
                .filter_map(|r| {
                    let dr = r * Rat::from_integer(i64::from(d).into());
                    dr.is_integer().then(|| floor_i64(&dr))
                })
                .max()
        });
        max_drz.map_or(true, |m| k_max >= m - i64::from(d))
    };
    if !reach_ok {
        return None;
    }
    Some(
        (n as i64..=k_max)
            .filter(|&k| !szd.map_or(false, |s| s.contains(&kd(k, d))))
            .collect(),
    )
}

// ======================================================================
// Window estimates for the support interval
// ======================================================================

/// Outcome of [`tail_window_check`].
///
/// The `simple_*` fields describe the coarse sufficient condition
/// `τ_Z < min(2γ_{m0}, γ_{m1})` with `m0 = ⌈d·α̃_Z⌉` and
/// `m1 = min(⌈d(n−1)/2⌉, ⌈d(α̃_Z+1)⌉)`.  The `m0/m1/m2` fields describe the
/// refined three-window condition, each index being the extremal integer in
/// its window that avoids `d·R_Z` (`None` when the window contains no such
/// integer, in which case that inequality is vacuously true):
///
/// * `m0 = min [d·α̃_Z, d(n−1)/2]`, requiring `τ_Z < 2γ_{m0}`,
/// * `m1 = min (d(n−1)/2, dn/2)` (open window), requiring `τ_Z < γ_{m1}`,
/// * `m2 = max [dn/2, d(n−1−α̃_Z)]`, requiring `τ_Z < γ_{m2}`.
///
/// `applicable` is true when the ordinary-double-point branch, the coarse
/// condition, or all three refined windows succeed; the predicted interval
/// endpoints are then `k_min = n` and `k_max = n(d−1) − min(d, β_f)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TailWindowCheck {
    /// Every declared singular point is an ordinary double point.
    pub odp_case: bool,
    pub simple_m0: i64,
    pub simple_m1: i64,
    pub simple_holds: bool,
    pub m0: Option<i64>,
    pub m1: Option<i64>,
    pub m2: Option<i64>,
    pub window0_holds: bool,
    pub window1_holds: bool,
    pub window2_holds: bool,
    pub applicable: bool,
    pub predicted_k_min: Option<i64>,
    pub predicted_k_max: Option<i64>,
}

/// Every singularity has all weights `1/2` — an ordinary double point.
pub fn all_ordinary_double_points(szd: &SingularityData) -> bool {
    let half = Rat::new(1.into(), 2.into());
    szd.singularities
        .iter()
        .all(|s| s.weights().iter().all(|w| *w == half))
}

/// Sufficient conditions for the defect support to be the full interval
/// `{n, …, n(d−1) − min(d, β_f)}` outside `d·R_Z`.
///
/// Requires `d ≥ n`.  In the ordinary-double-point case the windows are
/// bypassed, but the node count must respect the Arnold bound
/// (`γ_{⌊(n−1)d/2⌋+1}`, the most nodes a degree-`d` hypersurface admits) —
/// a larger count rejects the input as impossible.  `beta` is `β_f`
/// (`None` meaning `μ' ≡ 0`, which caps the subtraction at `d`).
pub fn tail_window_check(
    tau: i64,
    gamma: &GradedTable,
    szd: &SingularityData,
    n: usize,
    d: u32,
    all_odp: bool,
    beta: Option<i64>,
) -> Result<TailWindowCheck, EngineError> {
    if (d as usize) < n {
        return Err(EngineError::NotApplicable { n, d });
    }
    if all_odp && n >= 3 {
        let bound = arnold_number(n, d);
        if tau > bound {
            return Err(EngineError::TooManyNodes {
                count: tau,
                bound,
                n,
                d,
            });
        }
    }

    let di = i64::from(d);
    let dr = Rat::from_integer(di.into());
    let d_alpha = &dr * &szd.alpha_tilde;
    let half_low = Rat::new((di * (n as i64 - 1)).into(), 2.into()); // d(n−1)/2
    let half_high = Rat::new((di * n as i64).into(), 2.into()); // dn/2

    // Coarse condition.
    let simple_m0 = ceil_i64(&d_alpha);
    let simple_m1 = ceil_i64(&half_low).min(ceil_i64(&(&d_alpha + &dr)));
    let simple_holds = tau < (2 * gamma.get(simple_m0)).min(gamma.get(simple_m1));

    // Refined windows, skipping integers of d·R_Z.
    let avoids_rz = |m: i64| !szd.contains(&kd(m, d));
    let m0 = (ceil_i64(&d_alpha)..=floor_i64(&half_low)).find(|&m| avoids_rz(m));
    let m1 = (floor_i64(&half_low) + 1..ceil_i64(&half_high))
        .filter(|&m| Rat::from_integer(m.into()) > half_low) // strict: open window
        .find(|&m| avoids_rz(m));
    let upper2 = &dr * (Rat::from_integer((n as i64 - 1).into()) - &szd.alpha_tilde);
    let m2 = (ceil_i64(&half_high)..=floor_i64(&upper2))
        .rev()
        .find(|&m| avoids_rz(m));
    let window0_holds = m0.map_or(true, |m| tau < 2 * gamma.get(m));
    let window1_holds = m1.map_or(true, |m| tau < gamma.get(m));
    let window2_holds = m2.map_or(true, |m| tau < gamma.get(m));

    let applicable =
        all_odp || simple_holds || (window0_holds && window1_holds && window2_holds);
    let predicted_k_min = applicable.then_some(n as i64);
    let predicted_k_max =
        applicable.then(|| n as i64 * (di - 1) - beta.map_or(di, |b| b.min(di)));

    Ok(TailWindowCheck {
        odp_case: all_odp,
        simple_m0,
        simple_m1,
        simple_holds,
        m0,
        m1,
        m2,
        window0_holds,
        window1_holds,
        window2_holds,
        applicable,
        predicted_k_min,
        predicted_k_max,
    })
}

// ======================================================================
// Consistency checks
// ======================================================================

/// Weighted-homogeneity gate: the stable tail of the global `μ` table (the
/// total Tjurina number of `Z`) must equal the total Milnor number of the
/// declared singularities — `0` for a smooth hypersurface.  A mismatch
/// means a non-weighted-homogeneous point or a missing one; both make the
/// downstream verdicts unsound, so the input is rejected.
pub fn validate_w(tau_global: i64, szd: Option<&SingularityData>) -> Result<(), EngineError> {
    let mu_z = szd.map_or(0, |s| s.mu_z as i64);
    if tau_global == mu_z {
        Ok(())
    } else {
        Err(EngineError::WViolation {
            tau_global,
            mu_z,
        })
    }
}

/// Euler characteristic `χ(U)` of the complement `U` of the hypersurface,
/// over-determined by the tables.
///
/// Each nonzero residue `k mod d` determines `(−1)^{n−1} χ(U)` as
/// `Σ_{j=0}^{n−1} γ_{jd+k} − μ_Z`; residue `0` determines it as
/// `Σ_{j≥1} γ_{jd} − μ_Z − (−1)^n`.  Independently, the defect sums per
/// residue class must give `(−1)^{n−1}·χ(U)` (nonzero residues) and
/// `(−1)^{n−1}·(χ(U)−1)` (residue zero).  All determinations must agree.
pub fn euler_char(
    gamma: &GradedTable,
    delta: &GradedTable,
    mu_z: i64,
    n: usize,
    d: u32,
) -> Result<i64, EngineError> {
    let di = i64::from(d);
    let nd = n as i64 * di;
    let sign = if n % 2 == 0 { -1 } else { 1 }; // (−1)^{n−1}

    // Binomial sums, one per nonzero residue class.
    let mut signed_chi: Option<i64> = None;
    for k in 1..di {
        let s: i64 = (0..n as i64).map(|j| gamma.get(j * di + k)).sum();
        let this = s - mu_z;
        match signed_chi {
            None => signed_chi = Some(this),
            Some(first) if first != this => {
                return Err(EngineError::ChiMismatch {
                    context: format!("binomial sums, residue {k} of {d}"),
                    expected: first,
                    found: this,
                })
            }
            _ => {}
        }
    }
    let signed_chi = signed_chi.expect("degree is at least two");
    let chi = sign * signed_chi;

    // Residue zero of the binomial sums.
    let s0: i64 = (1..n as i64).map(|j| gamma.get(j * di)).sum();
    let minus_1_n = if n % 2 == 0 { 1 } else { -1 };
    if s0 - mu_z - minus_1_n != signed_chi {
        return Err(EngineError::ChiMismatch {
            context: format!("binomial sums, residue 0 of {d}"),
            expected: signed_chi,
            found: s0 - mu_z - minus_1_n,
        });
    }

    // Plane-curve count: for n = 3 the complement of a degree-d curve with
    // total Milnor number μ_Z has χ = (d−1)(d−2) + 1 − μ_Z.
    if n == 3 {
        let plane = (di - 1) * (di - 2) + 1 - mu_z;
        if chi != plane {
            return Err(EngineError::ChiMismatch {
                context: "plane-curve count".to_string(),
                expected: plane,
                found: chi,
            });
        }
    }

    // Defect sums per residue class.
    for r in 0..di {
        let mut s = 0;
        let mut k = r;
        while k < nd {
            s += delta.get(k);
            k += di;
        }
        let expected = if r == 0 {
            sign * (chi - 1)
        } else {
            sign * chi
        };
        if s != expected {
            return Err(EngineError::ChiMismatch {
                context: format!("defect sums, residue {r} of {d}"),
                expected,
                found: s,
            });
        }
    }

    Ok(chi)
}

// ======================================================================
// The report
// ======================================================================

/// Options steering [`analyze`].
#[derive(Debug, Clone, Copy, Default)]
pub struct AnalyzeOptions {
    /// For `n = 3`, replace the reach condition of [`roots_from_support`]
    /// by `k_max ≥ d − 1`.
    pub n3_kmax_variant: bool,
}

/// Everything the command line prints about one polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootReport {
    pub n: usize,
    pub d: u32,
    /// Stable tail of the `μ` table — the total Tjurina number of `Z`.
    pub tau: i64,
    /// Total Milnor number of the declared singularities.
    pub mu_z: i64,
    /// Euler characteristic of the hypersurface complement.
    pub chi_u: i64,
    /// `min(α_Z, n/d)` — the smallest possible root.
    #[serde(serialize_with = "ser_rat")]
    pub alpha_f: Rat,
    /// Verdict for every candidate `k/d`, `k ∈ [1, nd)`.
    pub statuses: Vec<RootStatus>,
    /// Numerators of the critical candidates (integer-shifted local roots
    /// in the spectral window).
    pub critical_set: BTreeSet<i64>,
    /// `δ_k > 0` on every critical candidate — the classification is then
    /// complete, with no undetermined entries.
    pub critical_deltas_positive: bool,
    /// The defect support outside `d·R_Z` is an interval with gaps only at
    /// integers of `d·R_Z`.
    pub connected_outside: bool,
    pub k_min: Option<i64>,
    pub k_max: Option<i64>,
    /// `None` means `μ' ≡ 0` (serialized as the string `"infinity"`).
    #[serde(serialize_with = "ser_beta")]
    pub beta_f: Option<i64>,
    /// Window estimates; `None` when the hypersurface is smooth or `d < n`.
    pub tail_window: Option<TailWindowCheck>,
    /// `d·R_f^0` in closed form from the support interval, when the rule
    /// applies.
    pub droots_from_support: Option<BTreeSet<i64>>,
    /// Local roots `R_Z` (empty for a smooth hypersurface).
    #[serde(serialize_with = "ser_rat_set")]
    pub r_z: RationalSet,
    /// Origin roots: the values classified [`Status::RootR0`].
    #[serde(serialize_with = "ser_rat_set")]
    pub r_f0: RationalSet,
    /// Candidates the method could not decide.
    #[serde(serialize_with = "ser_rat_set")]
    pub undetermined: RationalSet,
    /// `R_Z ∪ R_f^0` — all certain roots, without multiplicities.  A lower
    /// bound for the full root set unless `r_f_complete`.
    #[serde(serialize_with = "ser_rat_set")]
    pub r_f: RationalSet,
    /// No candidate was left undetermined.
    pub r_f_complete: bool,
}

/// Run the whole decision layer over precomputed tables.
///
/// Pass `szd = None` for a hypersurface declared smooth; the tables must
/// then have a zero tail, which [`validate_w`] enforces.  Rejections
/// ([`EngineError::WViolation`], [`EngineError::ChiMismatch`],
/// [`EngineError::TooManyNodes`]) abort instead of producing a report that
/// could mislead.
pub fn analyze(
    tables: &TableBundle,
    szd: Option<&SingularityData>,
    opts: &AnalyzeOptions,
) -> Result<RootReport, EngineError> {
    let (n, d) = (tables.n, tables.d);
    validate_w(tables.tau, szd)?;
    let mu_z = szd.map_or(0, |s| s.mu_z as i64);
    let chi_u = euler_char(&tables.gamma, &tables.delta, mu_z, n, d)?;

    let critical = szd.map(|s| critical_set(s, n, d)).unwrap_or_default();
    let statuses = classify(&tables.delta, szd, n, d);
    let deltas_positive = critical_deltas_positive(&tables.delta, &critical);
    let (connected, k_min, k_max) = connectedness(&tables.delta, szd, d);
    let beta = beta_f(&tables.mu_prime);

    let tail_window = match szd {
        Some(s) if d as usize >= n => Some(tail_window_check(
            tables.tau,
            &tables.gamma,
            s,
            n,
            d,
            all_ordinary_double_points(s),
            beta,
        )?),
        _ => None,
    };
    let droots = roots_from_support(connected, k_min, k_max, szd, n, d, opts.n3_kmax_variant);

    let collect = |status: Status| -> RationalSet {
        statuses
            .iter()
            .filter(|s| s.status == status)
            .map(|s| s.value.clone())
            .collect()
    };
    let r_f0 = collect(Status::RootR0);
    let undetermined = collect(Status::Undetermined);
    let r_z = szd.map(|s| s.r_z.clone()).unwrap_or_default();
    let r_f: RationalSet = r_z.union(&r_f0).cloned().collect();
    let r_f_complete = undetermined.is_empty();

    Ok(RootReport {
        n,
        d,
        tau: tables.tau,
        mu_z,
        chi_u,
        alpha_f: alpha_f(szd, n, d),
        statuses,
        critical_set: critical,
        critical_deltas_positive: deltas_positive,
        connected_outside: connected,
        k_min,
        k_max,
        beta_f: beta,
        tail_window,
        droots_from_support: droots,
        r_z,
        r_f0,
        undetermined,
        r_f,
        r_f_complete,
    })
}

// ======================================================================
// Small helpers
// ======================================================================

/// The candidate value `k/d`, reduced.
fn kd(k: i64, d: u32) -> Rat {
    Rat::new(k.into(), i64::from(d).into())
}

fn ceil_i64(r: &Rat) -> i64 {
    use num_traits::ToPrimitive;
    r.ceil().to_integer().to_i64().expect("window index fits i64")
}

fn floor_i64(r: &Rat) -> i64 {
    use num_traits::ToPrimitive;
    r.floor().to_integer().to_i64().expect("window index fits i64")
}

fn ser_rat<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rat_string(r))
}

fn ser_rat_set<S: Serializer>(set: &RationalSet, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(set.iter().map(rat_string))
}

fn ser_beta<S: Serializer>(b: &Option<i64>, s: S) -> Result<S::Ok, S::Error> {
    match b {
        Some(v) => s.serialize_i64(*v),
        None => s.serialize_str("infinity"),
    }
}

// ======================================================================
// Tests
// ======================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::koszul::{compute_tables, ArithMode, TableLabel};
    use crate::localspec::{aggregate, LocalSingularity};
    use crate::parse_rat;
    use crate::polyring::{parse_poly, HomogPoly};
    use once_cell::sync::Lazy;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn poly(text: &str, names: &[&str]) -> HomogPoly {
        parse_poly(text, &vars(names)).unwrap()
    }

    fn tables(f: &HomogPoly) -> TableBundle {
        compute_tables(f, ArithMode::Exact, false).unwrap()
    }

    fn szd(points: &[(&[&str], u64)]) -> SingularityData {
        let sings = points
            .iter()
            .map(|(ws, c)| {
                LocalSingularity::new(ws.iter().map(|w| parse_rat(w).unwrap()).collect(), *c)
                    .unwrap()
            })
            .collect();
        aggregate(sings).unwrap()
    }

    fn rat(s: &str) -> Rat {
        parse_rat(s).unwrap()
    }

    fn rats(ss: &[&str]) -> RationalSet {
        ss.iter().map(|s| rat(s)).collect()
    }

    fn ks(list: &[i64]) -> BTreeSet<i64> {
        list.iter().copied().collect()
    }

    // One cusp-like point on a degree-5 curve: x^5 + y^4 at [0:0:1].
    static F1: Lazy<(TableBundle, SingularityData)> = Lazy::new(|| {
        let f = poly("x^5 + y^4*z", &["x", "y", "z"]);
        (tables(&f), szd(&[(&["1/5", "1/4"], 1)]))
    });

    // Same local type, different global geometry.
    static F2: Lazy<(TableBundle, SingularityData)> = Lazy::new(|| {
        let f = poly("x^5 + x^2*y^3 + y^4*z", &["x", "y", "z"]);
        (tables(&f), szd(&[(&["1/5", "1/4"], 1)]))
    });

    // Two singular points on a degree-7 curve.
    static F4: Lazy<(TableBundle, SingularityData)> = Lazy::new(|| {
        let f = poly("x^4*y^2*z + z^7", &["x", "y", "z"]);
        (
            tables(&f),
            szd(&[(&["3/14", "1/7"], 1), (&["3/7", "1/7"], 1)]),
        )
    });

    // Degree-7 curve with one big point and two nodes.
    static F5: Lazy<(TableBundle, SingularityData)> = Lazy::new(|| {
        let f = poly("x^5*y*z + x^4*y^2*z + z^7", &["x", "y", "z"]);
        (
            tables(&f),
            szd(&[(&["3/14", "1/7"], 1), (&["1/2", "1/2"], 2)]),
        )
    });

    // 52 nodes on a degree-6 surface in P^3.
    static F6: Lazy<(TableBundle, SingularityData)> = Lazy::new(|| {
        let names = ["x", "y", "z", "w"];
        let q = poly("x^2 + y^2 + z^2 + w^2", &names).pow(3);
        let f = q.sub(&poly("x^6 + y^6 + z^6 + w^6", &names)).unwrap();
        (tables(&f), szd(&[(&["1/2", "1/2", "1/2"], 52)]))
    });

    // 10 nodes on a degree-3 threefold in P^4 (a Cayley-type example).
    static F7: Lazy<(TableBundle, SingularityData)> = Lazy::new(|| {
        let names = ["u", "v", "x", "y", "z"];
        let s = poly("u^3 + v^3 + x^3 + y^3 + z^3", &names);
        let l = poly("u + v + x + y + z", &names).pow(3);
        (tables(&s.sub(&l).unwrap()), szd(&[(&["1/2", "1/2", "1/2", "1/2"], 10)]))
    });

    static FERMAT: Lazy<TableBundle> =
        Lazy::new(|| tables(&poly("x^5 + y^5 + z^5", &["x", "y", "z"])));

    fn report(pair: &(TableBundle, SingularityData)) -> RootReport {
        analyze(&pair.0, Some(&pair.1), &AnalyzeOptions::default()).unwrap()
    }

    // ------------------------------------------------------------------
    // critical set
    // ------------------------------------------------------------------

    #[test]
    fn critical_set_of_the_goldens() {
        assert!(critical_set(&F1.1, 3, 5).is_empty());
        assert!(critical_set(&F2.1, 3, 5).is_empty());
        assert_eq!(critical_set(&F4.1, 3, 7), ks(&[3]));
        assert_eq!(critical_set(&F5.1, 3, 7), ks(&[3]));
        assert!(critical_set(&F6.1, 4, 6).is_empty());
        assert!(critical_set(&F7.1, 5, 3).is_empty());
    }

    #[test]
    fn critical_set_brute_force_agreement() {
        // Same set by scanning every candidate against the definition.
        for (szd, n, d) in [(&F1.1, 3usize, 5u32), (&F4.1, 3, 7), (&F6.1, 4, 6)] {
            let window_lo = &szd.alpha;
            let window_hi = Rat::from_integer((n as i64 - 2).into()) - &szd.alpha;
            let brute: BTreeSet<i64> = (1..n as i64 * i64::from(d))
                .filter(|&k| {
                    let v = kd(k, d);
                    v >= *window_lo
                        && v <= window_hi
                        && !szd.contains(&v)
                        && szd.in_r_z_shifted(&v)
                })
                .collect();
            assert_eq!(critical_set(szd, n, d), brute);
        }
    }

    // ------------------------------------------------------------------
    // classification
    // ------------------------------------------------------------------

    fn values_with(report: &RootReport, status: Status) -> RationalSet {
        report
            .statuses
            .iter()
            .filter(|s| s.status == status)
            .map(|s| s.value.clone())
            .collect()
    }

    #[test]
    fn classify_first_curve_roots_above_one() {
        let rep = report(&F1);
        assert_eq!(rep.r_f0, rats(&["6/5", "7/5", "8/5", "9/5"]));
        assert!(rep.undetermined.is_empty());
        assert!(rep.r_f_complete);
        assert_eq!(values_with(&rep, Status::InRz), rats(&["1"]));
        assert!(rep.critical_deltas_positive);
        assert_eq!(rep.alpha_f, rat("9/20"));
    }

    #[test]
    fn classify_second_curve_roots_below_one() {
        let rep = report(&F2);
        assert_eq!(rep.r_f0, rats(&["3/5", "4/5", "6/5", "7/5"]));
        assert!(rep.undetermined.is_empty());
        assert!(rep.r_f_complete);
    }

    #[test]
    fn classify_two_point_curve_reports_the_gap_honestly() {
        let rep = report(&F4);
        assert_eq!(rep.r_f0, rats(&["11/7", "12/7", "13/7"]));
        assert_eq!(rep.undetermined, rats(&["3/7"]));
        assert!(!rep.critical_deltas_positive);
        assert!(!rep.r_f_complete);
        // The undetermined candidate in detail: zero defect on an
        // integer-shifted local root above the global minimum.
        let s3 = &rep.statuses[2];
        assert_eq!(s3.k, 3);
        assert_eq!(s3.status, Status::Undetermined);
        assert_eq!(s3.evidence.delta, 0);
        assert!(!s3.evidence.outside_shifted_rz);
        assert!(!s3.evidence.below_alpha_f);
    }

    #[test]
    fn classify_node_examples_and_root_assembly() {
        let rep7 = report(&F7);
        assert_eq!(rep7.r_f0, rats(&["5/3", "7/3"]));
        assert_eq!(rep7.r_f, rats(&["1", "5/3", "2", "7/3"]));
        assert!(rep7.r_f_complete);

        let rep6 = report(&F6);
        let expect: RationalSet = [4, 5, 7, 8, 10, 11, 12, 13, 14, 15, 16]
            .iter()
            .map(|&k| kd(k, 6))
            .collect();
        assert_eq!(rep6.r_f0, expect);
        assert!(rep6.r_f_complete);
    }

    #[test]
    fn full_root_set_matches_the_published_values() {
        // Two singular points, d = 7: every root of the polynomial, scaled
        // by 14, is {5} ∪ {7..24} ∪ {26}.
        let rep = report(&F4);
        let mut expect = RationalSet::new();
        expect.insert(rat("5/14"));
        for m in 7..=24 {
            expect.insert(Rat::new(m.into(), 14.into()));
        }
        expect.insert(rat("26/14"));
        assert_eq!(rep.r_f, expect);
    }

    #[test]
    fn completeness_flag_matches_critical_outcome() {
        for rep in [report(&F1), report(&F2), report(&F4), report(&F5), report(&F6), report(&F7)] {
            assert_eq!(rep.critical_deltas_positive, rep.undetermined.is_empty());
            // Undetermined candidates sit inside the critical set.
            for v in &rep.undetermined {
                let num = v * Rat::from_integer(i64::from(rep.d).into());
                assert!(num.is_integer());
                assert!(rep.critical_set.contains(&floor_i64(&num)));
            }
        }
    }

    #[test]
    fn soundness_of_every_verdict_on_the_goldens() {
        for rep in [report(&F1), report(&F2), report(&F4), report(&F5), report(&F6), report(&F7)] {
            let n_rat = Rat::from_integer((rep.n as i64).into());
            let nd_over_d = kd(rep.n as i64, rep.d);
            for s in &rep.statuses {
                match s.status {
                    Status::RootR0 => {
                        assert!(s.evidence.delta > 0);
                        assert!(!rep.r_z.contains(&s.value));
                        assert!(s.value >= nd_over_d && s.value < n_rat);
                    }
                    Status::NonRoot => {
                        assert!(
                            s.evidence.below_alpha_f || s.evidence.outside_shifted_rz
                        );
                        assert!(s.evidence.delta <= 0);
                    }
                    Status::InRz => assert!(rep.r_z.contains(&s.value)),
                    Status::Undetermined => {
                        assert!(s.evidence.delta <= 0);
                        assert!(!s.evidence.outside_shifted_rz);
                        assert!(!s.evidence.below_alpha_f);
                        assert!(!rep.r_z.contains(&s.value));
                    }
                }
            }
        }
    }

    #[test]
    fn candidates_below_the_local_minimum_are_roots() {
        // Where n/d < α_Z the defect is forced positive: on the nodal
        // sextic those candidates are 4/6 and 5/6.
        let rep = report(&F6);
        for s in &rep.statuses {
            if s.value >= kd(4, 6) && s.value < rat("1") {
                assert_eq!(s.status, Status::RootR0, "at {}", s.value);
            }
        }
    }

    #[test]
    fn classification_is_invariant_under_scaling_and_permutation() {
        let base = report(&F1);
        let scaled = {
            let f = poly("x^5 + y^4*z", &["x", "y", "z"]).scaled(&rat("-7/3"));
            analyze(&tables(&f), Some(&F1.1), &AnalyzeOptions::default()).unwrap()
        };
        let permuted = {
            let f = poly("z^5 + y^4*x", &["x", "y", "z"]);
            analyze(&tables(&f), Some(&F1.1), &AnalyzeOptions::default()).unwrap()
        };
        assert_eq!(base.statuses, scaled.statuses);
        assert_eq!(base.statuses, permuted.statuses);
    }

    // ------------------------------------------------------------------
    // support diagnostics
    // ------------------------------------------------------------------

    #[test]
    fn connectedness_of_the_goldens() {
        let conn = |pair: &(TableBundle, SingularityData)| {
            connectedness(&pair.0.delta, Some(&pair.1), pair.0.d)
        };
        assert_eq!(conn(&F1), (true, Some(6), Some(9)));
        assert_eq!(conn(&F2), (true, Some(3), Some(7)));
        assert_eq!(conn(&F4), (true, Some(11), Some(13)));
        assert_eq!(conn(&F6), (true, Some(4), Some(16)));
        assert_eq!(conn(&F7), (true, Some(5), Some(7)));
    }

    #[test]
    fn gap_outside_local_roots_breaks_connectedness() {
        // Hand-built defect row with support {3, 6}; neither 4/5 nor 5/5
        // bridges the gap at 4 (the local roots only cover 5), so the
        // interval is broken.
        let mut values = vec![0i64; 15];
        values[3] = 1;
        values[6] = 1;
        let delta = GradedTable {
            label: TableLabel::Delta,
            offset: 0,
            values,
            n: 3,
            d: 5,
            stable_tail: Some(0),
        };
        assert_eq!(
            connectedness(&delta, Some(&F1.1), 5),
            (false, Some(3), Some(6))
        );
        // Empty support is trivially connected.
        let zero = GradedTable {
            values: vec![0; 15],
            ..delta
        };
        assert_eq!(connectedness(&zero, Some(&F1.1), 5), (true, None, None));
    }

    #[test]
    fn support_rule_on_the_goldens() {
        let rule = |pair: &(TableBundle, SingularityData), variant: bool| {
            let (c, lo, hi) = connectedness(&pair.0.delta, Some(&pair.1), pair.0.d);
            roots_from_support(c, lo, hi, Some(&pair.1), pair.0.n, pair.0.d, variant)
        };
        assert_eq!(rule(&F2, false), Some(ks(&[3, 4, 6, 7])));
        assert_eq!(rule(&F7, false), Some(ks(&[5, 7])));
        assert_eq!(
            rule(&F6, false),
            Some(ks(&[4, 5, 7, 8, 10, 11, 12, 13, 14, 15, 16]))
        );
        // Support starts above n: the rule must decline even though the
        // classification itself is complete.
        assert_eq!(rule(&F1, false), None);
        assert_eq!(rule(&F4, false), None);
        // Agreement with the direct classification where applicable.
        for pair in [&*F2, &*F6, &*F7] {
            let rep = report(pair);
            if let Some(droots) = rule(pair, false) {
                let from_classify: BTreeSet<i64> = rep
                    .r_f0
                    .iter()
                    .map(|v| floor_i64(&(v * Rat::from_integer(i64::from(rep.d).into()))))
                    .collect();
                assert_eq!(droots, from_classify);
            }
        }
    }

    #[test]
    fn alternate_reach_condition_is_stricter_for_curves() {
        // Synthetic connected support {3, 4} over the two-point curve
        // data: the default reach condition holds (the largest integer
        // local-root numerator is 10, and 4 ≥ 10 − 7), the alternate one
        // (k_max ≥ d − 1 = 6) does not.
        let default = roots_from_support(true, Some(3), Some(4), Some(&F4.1), 3, 7, false);
        let variant = roots_from_support(true, Some(3), Some(4), Some(&F4.1), 3, 7, true);
        assert_eq!(default, Some(ks(&[3]))); // 4/7 is a local root, dropped
        assert_eq!(variant, None);
    }

    #[test]
    fn interior_onset_of_the_goldens() {
        assert_eq!(beta_f(&F1.0.mu_prime), Some(3));
        assert_eq!(beta_f(&F2.0.mu_prime), None);
        assert_eq!(beta_f(&F4.0.mu_prime), Some(5));
        assert_eq!(beta_f(&F6.0.mu_prime), Some(4));
        assert_eq!(beta_f(&F7.0.mu_prime), None);
    }

    // ------------------------------------------------------------------
    // window estimates
    // ------------------------------------------------------------------

    #[test]
    fn windows_on_the_nodal_sextic() {
        let (t, s) = &*F6;
        let check = tail_window_check(t.tau, &t.gamma, s, 4, 6, true, Some(4)).unwrap();
        assert!(check.odp_case);
        // Coarse indices hit the binomial value 52 = τ exactly, so the
        // strict coarse inequality fails...
        assert_eq!((check.simple_m0, check.simple_m1), (9, 9));
        assert!(!check.simple_holds);
        // ...but the refined windows dodge 9 (a local-root multiple) and
        // succeed, as does the double-point branch.
        assert_eq!((check.m0, check.m1, check.m2), (None, Some(10), None));
        assert!(check.window0_holds && check.window1_holds && check.window2_holds);
        assert!(check.applicable);
        assert_eq!(check.predicted_k_min, Some(4));
        assert_eq!(check.predicted_k_max, Some(16));
        // The prediction matches the measured support interval.
        let (c, lo, hi) = connectedness(&t.delta, Some(s), 6);
        assert!(c);
        assert_eq!((lo, hi), (check.predicted_k_min, check.predicted_k_max));
    }

    #[test]
    fn windows_fail_on_the_first_curve() {
        // Here the support interval genuinely starts above n, so no
        // correct sufficient condition may apply.
        let (t, s) = &*F1;
        let check = tail_window_check(t.tau, &t.gamma, s, 3, 5, false, Some(3)).unwrap();
        assert!(!check.simple_holds);
        assert_eq!(check.m0, Some(3));
        assert!(!check.window0_holds);
        assert!(!check.applicable);
        assert_eq!(check.predicted_k_min, None);
    }

    #[test]
    fn window_rejections() {
        // Degree below the variable count.
        let (t, s) = &*F7;
        assert_eq!(
            tail_window_check(t.tau, &t.gamma, s, 5, 3, true, None),
            Err(EngineError::NotApplicable { n: 5, d: 3 })
        );
        // More nodes than a sextic surface can carry: the bound is the
        // binomial value just past the half-degree, 68.
        let gamma6 = crate::koszul::gamma_table(4, 6);
        let heavy = szd(&[(&["1/2", "1/2", "1/2"], 69)]);
        assert_eq!(
            tail_window_check(69, &gamma6, &heavy, 4, 6, true, None),
            Err(EngineError::TooManyNodes {
                count: 69,
                bound: 68,
                n: 4,
                d: 6
            })
        );
        assert_eq!(arnold_number(4, 6), 68);
    }

    #[test]
    fn detects_ordinary_double_points() {
        assert!(all_ordinary_double_points(&F6.1));
        assert!(all_ordinary_double_points(&F7.1));
        assert!(!all_ordinary_double_points(&F1.1));
        assert!(!all_ordinary_double_points(&F5.1));
    }

    // ------------------------------------------------------------------
    // consistency checks
    // ------------------------------------------------------------------

    #[test]
    fn euler_characteristic_goldens() {
        let chi = |pair: &(TableBundle, SingularityData)| {
            euler_char(
                &pair.0.gamma,
                &pair.0.delta,
                pair.1.mu_z as i64,
                pair.0.n,
                pair.0.d,
            )
            .unwrap()
        };
        assert_eq!(chi(&F1), 1);
        assert_eq!(chi(&F2), 1);
        assert_eq!(chi(&F4), 1);
        assert_eq!(chi(&F5), 7);
        assert_eq!(chi(&F6), -52);
        assert_eq!(chi(&F7), 1);
        // Smooth plane quintic complement: (d−1)(d−2) + 1.
        assert_eq!(
            euler_char(&FERMAT.gamma, &FERMAT.delta, 0, 3, 5).unwrap(),
            13
        );
    }

    #[test]
    fn euler_mismatch_aborts() {
        // A wrong Milnor total slips past the residue agreement of the
        // binomial sums (they all shift together) but not past the defect
        // sums.
        let err = euler_char(&F1.0.gamma, &F1.0.delta, 11, 3, 5).unwrap_err();
        assert!(matches!(err, EngineError::ChiMismatch { .. }));
        // A corrupted defect row trips the per-residue defect sums.
        let mut delta = F1.0.delta.clone();
        let idx = (6 - delta.offset) as usize;
        delta.values[idx] += 1;
        let err = euler_char(&F1.0.gamma, &delta, 12, 3, 5).unwrap_err();
        match err {
            EngineError::ChiMismatch { context, .. } => {
                assert!(context.contains("defect sums"), "{context}")
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn weighted_homogeneity_gate() {
        // A point that is not weighted homogeneous: its Milnor number 12
        // exceeds the global Tjurina tail 11.
        let f3 = poly("x^5 + x^3*y^2 + y^4*z", &["x", "y", "z"]);
        let t3 = tables(&f3);
        assert_eq!(t3.tau, 11);
        let claimed = szd(&[(&["1/5", "1/4"], 1)]);
        assert_eq!(
            validate_w(t3.tau, Some(&claimed)),
            Err(EngineError::WViolation {
                tau_global: 11,
                mu_z: 12
            })
        );

        // A missing node: the five-term curve has Tjurina total 24, but
        // only 23 is declared.
        let incomplete = szd(&[(&["3/14", "1/7"], 1), (&["1/2", "1/2"], 1)]);
        assert_eq!(F5.0.tau, 24);
        assert_eq!(
            validate_w(F5.0.tau, Some(&incomplete)),
            Err(EngineError::WViolation {
                tau_global: 24,
                mu_z: 23
            })
        );
        assert!(validate_w(F5.0.tau, Some(&F5.1)).is_ok());

        // Smooth declarations must have a zero tail.
        assert!(validate_w(0, None).is_ok());
        assert_eq!(
            validate_w(F1.0.tau, None),
            Err(EngineError::WViolation {
                tau_global: 12,
                mu_z: 0
            })
        );
    }

    // ------------------------------------------------------------------
    // full reports
    // ------------------------------------------------------------------

    #[test]
    fn report_on_the_two_point_curve() {
        let rep = report(&F4);
        assert_eq!((rep.n, rep.d, rep.tau, rep.mu_z), (3, 7, 30, 30));
        assert_eq!(rep.chi_u, 1);
        assert_eq!(rep.statuses.len(), 20);
        assert_eq!(rep.critical_set, ks(&[3]));
        assert!(!rep.critical_deltas_positive);
        assert!(rep.connected_outside);
        assert_eq!((rep.k_min, rep.k_max), (Some(11), Some(13)));
        assert_eq!(rep.beta_f, Some(5));
        assert_eq!(rep.droots_from_support, None);
        assert_eq!(rep.alpha_f, rat("5/14"));
    }

    #[test]
    fn report_on_the_nodal_sextic() {
        let rep = report(&F6);
        assert_eq!(rep.chi_u, -52);
        assert!(rep.r_f_complete);
        assert!(rep.critical_set.is_empty());
        assert!(rep.critical_deltas_positive);
        let tw = rep.tail_window.as_ref().unwrap();
        assert!(tw.applicable);
        assert_eq!(tw.predicted_k_min, rep.k_min);
        assert_eq!(tw.predicted_k_max, rep.k_max);
        assert_eq!(
            rep.droots_from_support,
            Some(ks(&[4, 5, 7, 8, 10, 11, 12, 13, 14, 15, 16]))
        );
        assert_eq!(rep.beta_f, Some(4));
    }

    #[test]
    fn report_on_a_smooth_quintic() {
        let rep = analyze(&FERMAT, None, &AnalyzeOptions::default()).unwrap();
        assert_eq!(rep.tau, 0);
        assert_eq!(rep.chi_u, 13);
        assert!(rep.r_z.is_empty());
        assert!(rep.tail_window.is_none());
        assert!(rep.critical_set.is_empty());
        assert!(rep.r_f_complete);
        // All of [n, nd−n] is a root of the quintic Fermat cone.
        let expect: RationalSet = (3..=12).map(|k| kd(k, 5)).collect();
        assert_eq!(rep.r_f0, expect);
        assert_eq!(rep.r_f, expect);
        assert_eq!((rep.k_min, rep.k_max), (Some(3), Some(12)));
        assert_eq!(rep.droots_from_support, Some((3..=12).collect()));
        assert_eq!(rep.alpha_f, rat("3/5"));
        assert_eq!(rep.beta_f, Some(0));
    }

    #[test]
    fn analysis_rejects_bad_inputs_outright() {
        // Wrong weighted-homogeneity data aborts before any verdicts.
        let f3 = poly("x^5 + x^3*y^2 + y^4*z", &["x", "y", "z"]);
        let claimed = szd(&[(&["1/5", "1/4"], 1)]);
        let err = analyze(&tables(&f3), Some(&claimed), &AnalyzeOptions::default()).unwrap_err();
        assert!(matches!(err, EngineError::WViolation { .. }));
        // A singular table declared smooth does the same.
        let err = analyze(&F1.0, None, &AnalyzeOptions::default()).unwrap_err();
        assert!(matches!(err, EngineError::WViolation { .. }));
    }

    #[test]
    fn report_serialization_shapes() {
        let rep = report(&F7);
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["beta_f"], serde_json::json!("infinity"));
        assert_eq!(json["r_f"], serde_json::json!(["1", "5/3", "2", "7/3"]));
        assert_eq!(json["statuses"][4]["status"], serde_json::json!("ROOT_R0"));
        assert_eq!(json["statuses"][4]["value"], serde_json::json!("5/3"));
        let rep6 = report(&F6);
        let json6 = serde_json::to_value(&rep6).unwrap();
        assert_eq!(json6["beta_f"], serde_json::json!(4));
        assert_eq!(json6["statuses"][5]["status"], serde_json::json!("IN_RZ"));
        assert_eq!(
            json6["statuses"][0]["status"],
            serde_json::json!("NON_ROOT")
        );
    }
}
