//! Finite-level evidence for the mixing classes, read off gap sets `N_{m,n}(u,v)`.

use num_bigint::BigUint;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covering::{CoveringSpec, FamilyTag};
use crate::error::{Error, Result};
use crate::expansion::{d_length, gap_set, materialized_gaps, measured_core_length, walk_profile};
use crate::window::PairCollector;

/// All `N_{m,n}(u,v)` up to `width` for every ordered pair, by whichever route fits the cap.
struct AllPairs {
    /// `gaps[u * l_n + v]`, ascending.
    gaps: Vec<Vec<u64>>,
}

impl AllPairs {
    fn compute(spec: &CoveringSpec, m: usize, n: usize, width: u64, cap: u64) -> Result<Self> {
        spec.check_pair(m, n)?;
        let l_n = spec.circuit_length_u64(n)?;
        let l_m = spec.circuit_length(m)?;
        let width = BigUint::from(width).min(l_m.clone());
        let width = num_traits::ToPrimitive::to_usize(&width).unwrap_or(usize::MAX);
        let pairs: Vec<(u32, u32)> =
            (0..l_n as u32).flat_map(|u| (0..l_n as u32).map(move |v| (u, v))).collect();
        let gaps = if l_m + 1u32 <= BigUint::from(cap) {
            let walk = crate::expansion::expand_vertex_walk(spec, m, n, cap)?.vertices;
            pairs.par_iter().map(|&(u, v)| materialized_gaps(&walk, u, v, width)).collect()
        } else {
            let needed = PairCollector::size(width, l_n as usize).div_ceil(64);
            if needed > cap as u128 {
                return Err(Error::too_large(needed, cap));
            }
            let prof = walk_profile(spec, m, n, width)?;
            pairs
                .par_iter()
                .map(|&(u, v)| {
                    (1..=width as u64).filter(|&l| prof.collector.contains(u, v, l as usize)).collect()
                })
                .collect()
        };
        Ok(AllPairs { gaps })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixingWindowReport {
    pub m: usize,
    pub n: usize,
    /// `3·l_n`.
    pub lo: u64,
    /// `2(m - n)`.
    pub hi: u64,
    pub precondition_violations: Vec<String>,
    pub pairs_checked: usize,
    /// `(u, v, smallest missing gap)`.
    pub failures: Vec<(u32, u32, u64)>,
    pub pass: bool,
}

/// Whether `[3·l_n, 2(m-n)] ⊆ N_{m,n}(u,v)` for every ordered vertex pair.
pub fn mixing_window_check(spec: &CoveringSpec, m: usize, n: usize, cap: u64) -> Result<MixingWindowReport> {
    let spec = super::deepen(spec, m.saturating_sub(1));
    spec.check_pair(m, n)?;
    if m == n {
        return Err(Error::InvalidLevels { m, n, reason: "need n < m".into() });
    }
    let mut violations = Vec::new();
    for k in n..m {
        let a = spec.level(k)?.a();
        if a[0] != 1 || a[a.len() - 1] != 1 {
            violations.push(format!("level {k}: outer runs are ({}, {}), not (1, 1)", a[0], a[a.len() - 1]));
        }
        if spec.circuit_length(k)?.is_even() {
            violations.push(format!("level {k}: l = {} is even", spec.circuit_length(k)?));
        }
    }
    let l_n = spec.circuit_length_u64(n)?;
    let (lo, hi) = (3 * l_n, 2 * (m - n) as u64);
    if hi <= lo {
        violations.push(format!("2(m-n) = {hi} does not exceed 3·l_n = {lo}"));
    }
    let mut failures = Vec::new();
    let mut pairs_checked = 0;
    if lo <= hi {
        let all = AllPairs::compute(&spec, m, n, hi, cap)?;
        for u in 0..l_n as u32 {
            for v in 0..l_n as u32 {
                pairs_checked += 1;
                let g = &all.gaps[(u as u64 * l_n + v as u64) as usize];
                if let Some(miss) = (lo..=hi).find(|x| g.binary_search(x).is_err()) {
                    failures.push((u, v, miss));
                }
            }
        }
    }
    let pass = lo <= hi && failures.is_empty();
    Ok(MixingWindowReport { m, n, lo, hi, precondition_violations: violations, pairs_checked, failures, pass })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueViolation {
    pub u: u32,
    pub v: u32,
    pub gap: u64,
    pub expected_residue: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueReport {
    pub n: usize,
    pub m: usize,
    pub p: u64,
    pub max_gap: u64,
    /// Gaps examined for `(v1, v1)` and `(v1, v2)`.
    pub examined: (usize, usize),
    pub violations: Vec<ResidueViolation>,
    pub pass: bool,
}

/// Checks `N_{m,n}(v1, v1) ⊆ pℤ` and `N_{m,n}(v1, v2) ⊆ 1 + pℤ`, where `vi` is the vertex at offset `i`.
///
/// `p = None` takes the modulus recorded by the `NotWeakMix` generator.
pub fn residue_obstruction(
    spec: &CoveringSpec,
    n: usize,
    p: Option<u64>,
    m: usize,
    max_gap: u64,
    cap: u64,
) -> Result<ResidueReport> {
    let p = match p {
        Some(p) => p,
        None => spec
            .family
            .as_ref()
            .filter(|f| f.tag == FamilyTag::NotWeakMix)
            .and_then(|f| f.params.get("p").and_then(|x| x.as_u64()))
            .ok_or_else(|| Error::Precondition("no modulus given and none recorded".into()))?,
    };
    if p == 0 {
        return Err(Error::Precondition("modulus must be positive".into()));
    }
    let spec = super::deepen(spec, m.saturating_sub(1));
    if spec.circuit_length_u64(n)? < 3 {
        return Err(Error::Precondition(format!("level {n} has no vertex at offset 2")));
    }
    let same = gap_set(&spec, m, n, 1, 1, max_gap, cap)?;
    let next = gap_set(&spec, m, n, 1, 2, max_gap, cap)?;
    let mut violations = Vec::new();
    for (set, v, r) in [(&same, 1u32, 0u64), (&next, 2, 1 % p)] {
        for &g in &set.gaps {
            if g % p != r {
                violations.push(ResidueViolation { u: 1, v, gap: g, expected_residue: r });
            }
        }
    }
    Ok(ResidueReport {
        n,
        m,
        p,
        max_gap,
        examined: (same.gaps.len(), next.gaps.len()),
        pass: violations.is_empty(),
        violations,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairWindow {
    pub u: u32,
    pub v: u32,
    /// Consecutive non-gaps from the window start; `None` if none is a gap up to the scan limit.
    pub width: Option<u64>,
    /// Pairs through the center are reported but not required to have a window.
    pub through_center: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageWindows {
    pub base: usize,
    pub boundary: usize,
    /// Length of `d_{m+1,n}` from the run arithmetic.
    pub d_len_arith: String,
    /// Same length measured on the stripped expansion.
    pub d_len_measured: String,
    /// Deepest circuit scanned.
    pub m_prime: usize,
    pub start: u64,
    pub scan_limit: u64,
    pub pairs: Vec<PairWindow>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForbiddenWindowReport {
    pub stages: Vec<StageWindows>,
    pub pass: bool,
}

/// For each recorded stage (or only `stage_level`), the empty gap window starting at
/// `l(d_{m+1,n}) + 1` in `N_{m',n}(u,v)` for the deepest presented `m'`.
pub fn forbidden_window_report(spec: &CoveringSpec, stage_level: Option<usize>, cap: u64) -> Result<ForbiddenWindowReport> {
    let stages = spec
        .family
        .as_ref()
        .map(|f| f.stages.clone())
        .filter(|s| !s.is_empty())
        .ok_or(Error::NoStageMetadata)?;
    let chosen: Vec<_> = match stage_level {
        Some(m) => {
            let s: Vec<_> = stages.iter().copied().filter(|s| s.boundary == m).collect();
            if s.is_empty() {
                return Err(Error::Precondition(format!("level {m} is not a stage boundary")));
            }
            s
        }
        None => stages,
    };
    let mut out = Vec::new();
    for st in chosen {
        let (m, n) = (st.boundary, st.base);
        let arith = d_length(spec, m + 1, n)?;
        let measured = measured_core_length(spec, m + 1, n, cap)?;
        if arith != measured {
            return Err(Error::Precondition(format!("d length disagrees: {arith} vs {measured}")));
        }
        let d = num_traits::ToPrimitive::to_u64(&arith).ok_or_else(|| Error::Overflow("d length".into()))?;
        let start = d + 1;
        let s = spec.level(m)?.a()[0];
        let scan_limit = start + d + 2 * s + 2;
        let m_prime = spec.top();
        let l_n = spec.circuit_length_u64(n)?;
        let all = AllPairs::compute(spec, m_prime, n, scan_limit, cap)?;
        let mut pairs = Vec::new();
        for u in 0..l_n as u32 {
            for v in 0..l_n as u32 {
                let g = &all.gaps[(u as u64 * l_n + v as u64) as usize];
                let first = g.iter().copied().find(|&x| x >= start);
                pairs.push(PairWindow {
                    u,
                    v,
                    width: first.map(|f| f - start),
                    through_center: u == 0 || v == 0,
                });
            }
        }
        let pass = pairs.iter().filter(|p| !p.through_center).all(|p| p.width.map_or(true, |w| w >= 1));
        out.push(StageWindows {
            base: n,
            boundary: m,
            d_len_arith: arith.to_string(),
            d_len_measured: measured.to_string(),
            m_prime,
            start,
            scan_limit,
            pairs,
            pass,
        });
    }
    let pass = out.iter().all(|s| s.pass);
    Ok(ForbiddenWindowReport { stages: out, pass })
}
