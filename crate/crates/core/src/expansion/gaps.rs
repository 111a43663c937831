//! Occurrence gaps `N_{m,n}(u,v)` and the run-separation structure of expansions.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{circuit_symbols, cumulative_runs, edge_starts, level_len_u32};
use crate::covering::CoveringSpec;
use crate::error::{Error, Result};
#[cfg(test)]
use crate::symbol::Symbol;
use crate::window::{Compressed, PairCollector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapQuery {
    pub u: u32,
    pub v: u32,
    pub max_gap: u64,
    /// Report `0` when `u = v` occurs.
    pub include_zero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapSet {
    pub level: usize,
    pub m: usize,
    pub u: u32,
    pub v: u32,
    pub max_gap: u64,
    pub include_zero: bool,
    pub gaps: Vec<u64>,
}

impl GapSet {
    pub fn contains(&self, l: u64) -> bool {
        self.gaps.binary_search(&l).is_ok()
    }

    /// Maximal runs of consecutive gaps, inclusive.
    pub fn intervals(&self) -> Vec<(u64, u64)> {
        let mut out: Vec<(u64, u64)> = Vec::new();
        for &g in &self.gaps {
            match out.last_mut() {
                Some((_, hi)) if *hi + 1 == g => *hi = g,
                _ => out.push((g, g)),
            }
        }
        out
    }

    /// Whether every integer of `[lo, hi]` is a gap.
    pub fn covers(&self, lo: u64, hi: u64) -> bool {
        self.intervals().iter().any(|&(a, b)| a <= lo && hi <= b)
    }
}

pub fn gap_set(
    spec: &CoveringSpec,
    m: usize,
    n: usize,
    u: u32,
    v: u32,
    max_gap: u64,
    cap: u64,
) -> Result<GapSet> {
    gap_set_with(spec, m, n, &GapQuery { u, v, max_gap, include_zero: false }, cap)
}

/// Materializes the walk when `l_m + 1 ≤ cap`, else folds a compressed profile.
pub fn gap_set_with(spec: &CoveringSpec, m: usize, n: usize, q: &GapQuery, cap: u64) -> Result<GapSet> {
    spec.check_pair(m, n)?;
    let l_n = level_len_u32(spec, n)?;
    if q.u >= l_n || q.v >= l_n {
        return Err(Error::Precondition(format!("vertex ids must be below l_{n} = {l_n}")));
    }
    if q.max_gap == 0 {
        return Err(Error::Precondition("max_gap must be at least 1".into()));
    }
    let l_m = spec.circuit_length(m)?;
    let width = BigUint::from(q.max_gap).min(l_m.clone()).to_u64().unwrap_or(u64::MAX);
    let mut gaps = if l_m.clone() + 1u32 <= BigUint::from(cap) {
        let word = circuit_symbols(spec, m, n, cap)?;
        let mut walk = edge_starts(&word, l_n);
        walk.push(0);
        materialized_gaps(&walk, q.u, q.v, width as usize)
    } else {
        // Profile memory is counted in 64-bit words.
        let needed = PairCollector::size(width as usize, l_n as usize).div_ceil(64);
        if needed > cap as u128 {
            return Err(Error::too_large(needed, cap));
        }
        let profile = walk_profile(spec, m, n, width as usize)?;
        (1..=width).filter(|&l| profile.collector.contains(q.u, q.v, l as usize)).collect()
    };
    // Vertex u occurs in every walk: the center always does and c_n is traversed at least once.
    if q.include_zero && q.u == q.v {
        gaps.insert(0, 0);
    }
    Ok(GapSet { level: n, m, u: q.u, v: q.v, max_gap: q.max_gap, include_zero: q.include_zero, gaps })
}

/// Gaps in `[1, width]` between occurrences of `u` and later occurrences of `v`.
pub(crate) fn materialized_gaps(walk: &[u32], u: u32, v: u32, width: usize) -> Vec<u64> {
    if width == 0 {
        return Vec::new();
    }
    let words = walk.len().div_ceil(64) + 1;
    let mut vbits = vec![0u64; words + width.div_ceil(64) + 1];
    for (i, &x) in walk.iter().enumerate() {
        if x == v {
            vbits[i / 64] |= 1 << (i % 64);
        }
    }
    let out_words = (width + 1).div_ceil(64);
    let mut found = vec![0u64; out_words];
    let full_mask_bits = width;
    let mut seen = 0usize;
    for (p, &x) in walk.iter().enumerate() {
        if x != u {
            continue;
        }
        // found[l] |= vbits[p + l] for l in 0..=width.
        let shift = p % 64;
        let base = p / 64;
        for w in 0..out_words {
            let lo = vbits[base + w] >> shift;
            let hi = if shift == 0 { 0 } else { vbits[base + w + 1] << (64 - shift) };
            found[w] |= lo | hi;
        }
        seen += 1;
        if seen % 256 == 0 && count_bits(&found, width) == full_mask_bits {
            break;
        }
    }
    (1..=width as u64).filter(|&l| found[l as usize / 64] >> (l % 64) & 1 == 1).collect()
}

fn count_bits(found: &[u64], width: usize) -> usize {
    (1..=width).filter(|&l| found[l / 64] >> (l % 64) & 1 == 1).count()
}

/// Pair profile of the walk of `c_{m,n}` (final center vertex included), span ≤ `width`.
pub fn walk_profile(spec: &CoveringSpec, m: usize, n: usize, width: usize) -> Result<Compressed<PairCollector>> {
    spec.check_pair(m, n)?;
    let l_n = level_len_u32(spec, n)?;
    let fresh = || PairCollector::new(width, l_n as usize);
    let base: Vec<u32> = (0..l_n).collect();
    let mut prof = Compressed::from_word(&base, fresh());
    for k in n..m {
        let lm = spec.level(k)?;
        let mut next = Compressed::empty(fresh());
        for (j, &x) in lm.a().iter().enumerate() {
            if j > 0 {
                next = next.concat(&prof);
            }
            if x > 0 {
                next = next.concat(&Compressed::run(0, x as u128, fresh()));
            }
        }
        prof = next;
    }
    Ok(prof.concat(&Compressed::from_word(&[0], fresh())))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauRealization {
    pub k: usize,
    pub tau: String,
    pub realized: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapStructureReport {
    pub m: usize,
    pub n: usize,
    /// Every map in `[n, m)` has `t, t' ≥ 2`.
    pub restricted: bool,
    pub cc_present: bool,
    /// `C E^{τ(k,n)} C` for `n ≤ k ≤ m-2`.
    pub tau: Vec<TauRealization>,
    /// All `E`-run lengths occurring between two `C`s, zero excluded.
    pub separations: Vec<String>,
}

/// Run structure of a traversal word.
#[derive(Clone, Debug)]
struct RunSummary {
    all_e: bool,
    lead: u128,
    trail: u128,
    inner: BTreeSet<u128>,
}

impl RunSummary {
    fn e_run(k: u128) -> Self {
        RunSummary { all_e: true, lead: k, trail: k, inner: BTreeSet::new() }
    }

    fn c() -> Self {
        RunSummary { all_e: false, lead: 0, trail: 0, inner: BTreeSet::new() }
    }

    fn concat(&self, o: &RunSummary) -> Result<RunSummary> {
        let add = |a: u128, b: u128| a.checked_add(b).ok_or_else(|| Error::Overflow("run length".into()));
        Ok(match (self.all_e, o.all_e) {
            (true, true) => RunSummary::e_run(add(self.lead, o.lead)?),
            (true, false) => RunSummary { lead: add(self.lead, o.lead)?, ..o.clone() },
            (false, true) => RunSummary { trail: add(self.trail, o.trail)?, ..self.clone() },
            (false, false) => {
                let mut inner = self.inner.clone();
                inner.extend(o.inner.iter().copied());
                inner.insert(add(self.trail, o.lead)?);
                RunSummary { all_e: false, lead: self.lead, trail: o.trail, inner }
            }
        })
    }
}

pub fn gap_structure_report(spec: &CoveringSpec, m: usize, n: usize) -> Result<GapStructureReport> {
    spec.check_pair(m, n)?;
    let restricted = (n..m).all(|k| spec.level(k).map(|l| l.restricted().is_some()).unwrap_or(false));
    let mut summary = RunSummary::c();
    for k in n..m {
        let lm = spec.level(k)?;
        let mut next = RunSummary::e_run(0);
        for (j, &x) in lm.a().iter().enumerate() {
            if j > 0 {
                next = next.concat(&summary)?;
            }
            next = next.concat(&RunSummary::e_run(x as u128))?;
        }
        summary = next;
    }
    let mut tau = Vec::new();
    for k in n..m.saturating_sub(1) {
        let t = cumulative_runs(spec, k, n)?.tau;
        let realized = t.to_u128().map(|x| summary.inner.contains(&x)).unwrap_or(false);
        tau.push(TauRealization { k, tau: t.to_string(), realized });
    }
    Ok(GapStructureReport {
        m,
        n,
        restricted,
        cc_present: summary.inner.contains(&0),
        tau,
        separations: summary.inner.iter().filter(|&&x| x > 0).map(|x| x.to_string()).collect(),
    })
}

/// Same as the run summary but scanned on the materialized word; test oracle.
#[cfg(test)]
fn scanned_inner_runs(spec: &CoveringSpec, m: usize, n: usize) -> BTreeSet<u128> {
    let w = circuit_symbols(spec, m, n, u64::MAX).unwrap();
    let mut out = BTreeSet::new();
    let mut last_c: Option<usize> = None;
    for (i, &s) in w.iter().enumerate() {
        if s == Symbol::C {
            if let Some(p) = last_c {
                out.insert((i - p - 1) as u128);
            }
            last_c = Some(i);
        }
    }
    out
}
