//! The subshift side: factor languages, array rows, orbit simulation from
//! finite seeds, and the finite-level mixing evidence checks.

mod checks;
mod seed;
mod witness;

pub use checks::{
    forbidden_window_report, mixing_window_check, residue_obstruction, ForbiddenWindowReport,
    MixingWindowReport, PairWindow, ResidueReport, ResidueViolation, StageWindows,
};
pub use seed::{
    array_block, stable_point, unstable_point, ArrayBlock, ArrayRow, Frame, LevelState, PointSeed,
};
pub use witness::{
    level1_separation_check, li_yorke_witness, random_seed, LiYorkeWitness, SeparationReport,
};

use serde::{Deserialize, Serialize};

use crate::covering::CoveringSpec;
use crate::error::{Error, Result};
use crate::symbol::Symbol;
use crate::window::{Compressed, FactorCollector};

/// Deepest level a family spec is regenerated to when a computation runs past its presented depth.
pub const MAX_AUTO_DEPTH: usize = 64;

/// Returns `spec` with at least `depth` maps when its family can regenerate, else `spec` itself.
pub(crate) fn deepen(spec: &CoveringSpec, depth: usize) -> CoveringSpec {
    if depth <= spec.depth() {
        return spec.clone();
    }
    spec.extended_to(depth.min(MAX_AUTO_DEPTH)).unwrap_or_else(|_| spec.clone())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCount {
    pub m: usize,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageReport {
    pub level: usize,
    pub len: usize,
    /// Sorted words over `E`/`C`, one letter per time step.
    pub words: Vec<String>,
    pub stable: bool,
    /// First `m` of the run of unchanged factor sets.
    pub stabilized_at: Option<usize>,
    pub examined: Vec<LevelCount>,
}

fn code(s: Symbol) -> u32 {
    match s {
        Symbol::E => 0,
        Symbol::C => 1,
    }
}

/// Length-`len` factors of the level-`n` rows of `c_{m,n}` for `m = n+1, n+2, ...` until the set
/// is unchanged across `stabilize_window` consecutive steps.
pub fn language(spec: &CoveringSpec, n: usize, len: usize, stabilize_window: usize) -> Result<LanguageReport> {
    spec.check_circuit_level(n)?;
    if stabilize_window == 0 {
        return Err(Error::Precondition("stabilize_window must be at least 1".into()));
    }
    let fresh = || FactorCollector::new(len, 2);
    fresh()?;
    let mut cur = spec.clone();
    let l_n = spec.circuit_length(n)?;
    let l_n: u128 = num_traits::ToPrimitive::to_u128(&l_n).ok_or(Error::Overflow("l_n".into()))?;
    let mut prof = Compressed::run(code(Symbol::C), l_n, fresh()?);
    let mut examined = Vec::new();
    let mut prev: Option<std::collections::HashSet<u64>> = None;
    let mut unchanged = 0usize;
    let mut m = n;
    loop {
        if m + 1 > cur.top() {
            cur = deepen(&cur, m + 8);
            if m + 1 > cur.top() {
                break;
            }
        }
        let next_len = cur.circuit_length(m + 1)?;
        if num_traits::ToPrimitive::to_u128(&next_len).is_none() {
            break;
        }
        let lm = cur.level(m)?;
        let mut next = Compressed::empty(fresh()?);
        for (j, &x) in lm.a().iter().enumerate() {
            if j > 0 {
                next = next.concat(&prof);
            }
            if x > 0 {
                next = next.concat(&Compressed::run(code(Symbol::E), x as u128, fresh()?));
            }
        }
        prof = next;
        m += 1;
        let set = &prof.collector.factors;
        examined.push(LevelCount { m, count: set.len() });
        match &prev {
            Some(p) if !set.is_empty() && p == set => unchanged += 1,
            _ => unchanged = 0,
        }
        prev = Some(set.clone());
        if unchanged >= stabilize_window {
            return Ok(report(n, len, &prof.collector, true, Some(m - stabilize_window), examined));
        }
    }
    Ok(report(n, len, &prof.collector, false, None, examined))
}

fn report(
    n: usize,
    len: usize,
    c: &FactorCollector,
    stable: bool,
    stabilized_at: Option<usize>,
    examined: Vec<LevelCount>,
) -> LanguageReport {
    let mut words: Vec<String> = c
        .sorted()
        .into_iter()
        .map(|w| w.into_iter().map(|x| if x == 0 { 'E' } else { 'C' }).collect())
        .collect();
    words.sort();
    LanguageReport { level: n, len, words, stable, stabilized_at, examined }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexityRow {
    pub len: usize,
    pub count: usize,
    /// `log2 p(L) / L`.
    pub normalized: f64,
    pub stable: bool,
}

/// `p(L) = |language(spec, 1, L)|` for `L = 1..=max_len`.
pub fn complexity_profile(spec: &CoveringSpec, max_len: usize, stabilize_window: usize) -> Result<Vec<ComplexityRow>> {
    (1..=max_len)
        .map(|len| {
            let r = language(spec, 1, len, stabilize_window)?;
            let count = r.words.len();
            Ok(ComplexityRow { len, count, normalized: (count as f64).log2() / len as f64, stable: r.stable })
        })
        .collect()
}

/// CSV with header `L,p,log2p_over_L`.
pub fn complexity_csv(rows: &[ComplexityRow]) -> String {
    let mut out = String::from("L,p,log2p_over_L\n");
    for r in rows {
        out.push_str(&format!("{},{},{:.6}\n", r.len, r.count, r.normalized));
    }
    out
}

/// Level-`n` row of `c_{m,n}`, one symbol per time step.
#[cfg(test)]
pub(crate) fn positional_row(spec: &CoveringSpec, m: usize, n: usize, cap: u64) -> Result<Vec<Symbol>> {
    let word = crate::expansion::expand_circuit_word(spec, m, n, cap)?;
    let l_n = spec.circuit_length_u64(n)?;
    let mut out = Vec::new();
    for s in word.symbols {
        match s {
            Symbol::E => out.push(Symbol::E),
            Symbol::C => out.extend(std::iter::repeat(Symbol::C).take(l_n as usize)),
        }
    }
    Ok(out)
}
