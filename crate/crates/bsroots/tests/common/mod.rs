//! Helpers shared by the integration test suites.
#![allow(dead_code)]

use bsroots::localspec::{aggregate, LocalSingularity, SingularityData};
use bsroots::polyring::{parse_poly, HomogPoly};
use bsroots::{parse_rat, Rat, RationalSet};
use std::collections::BTreeSet;

/// Parse a polynomial over the given comma-separated variables.
pub fn poly(text: &str, vars: &str) -> HomogPoly {
    let names: Vec<String> = vars.split(',').map(|s| s.trim().to_string()).collect();
    parse_poly(text, &names).unwrap_or_else(|e| panic!("bad test polynomial {text:?}: {e}"))
}

pub fn rat(s: &str) -> Rat {
    parse_rat(s).unwrap_or_else(|| panic!("bad test rational {s:?}"))
}

pub fn rats(list: &[&str]) -> RationalSet {
    list.iter().map(|s| rat(s)).collect()
}

pub fn ks(list: &[i64]) -> BTreeSet<i64> {
    list.iter().copied().collect()
}

/// Rational `p/q` from machine integers.
pub fn frac(p: i64, q: i64) -> Rat {
    Rat::new(p.into(), q.into())
}

/// Aggregate singularity data from `(weights, count)` germ descriptions.
pub fn szd(germs: &[(&[&str], u64)]) -> SingularityData {
    let mut sings = Vec::new();
    for (ws, count) in germs {
        let weights: Vec<Rat> = ws.iter().map(|w| rat(w)).collect();
        sings.push(
            LocalSingularity::new(weights, *count).unwrap_or_else(|e| panic!("bad germ: {e}")),
        );
    }
    aggregate(sings).unwrap_or_else(|e| panic!("bad singularity data: {e}"))
}
