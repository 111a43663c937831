//! Expansions of circuits between levels and the `d_{m,n}` calculus.

mod gaps;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::covering::{c_count, CoveringSpec};
use crate::error::{Error, Result};
use crate::symbol::{CircuitWord, Symbol};

pub use gaps::{
    gap_set, gap_set_with, gap_structure_report, walk_profile, GapQuery, GapSet, GapStructureReport,
    TauRealization,
};
pub(crate) use gaps::materialized_gaps;

/// A walk in `G_n`. Vertex ids are offsets along `c_n`; id 0 is the center `v_{n,0}`,
/// which is also the only vertex of the loop `e_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexWalk {
    pub level: usize,
    pub vertices: Vec<u32>,
}

impl VertexWalk {
    pub fn edge_count(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }
}

/// `s(k,n)`, `s'(k,n)`, `τ(k,n) = s + s'`; all zero for `k = n - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CumulativeRuns {
    pub s: BigUint,
    pub s_prime: BigUint,
    pub tau: BigUint,
}

#[cfg(test)]
fn u128_of(x: &BigUint, what: &str) -> Result<u128> {
    x.to_u128().ok_or_else(|| Error::Overflow(format!("{what} = {x}")))
}

fn check_cap(needed: &BigUint, cap: u64) -> Result<()> {
    if *needed > BigUint::from(cap) {
        return Err(Error::too_large(needed, cap));
    }
    Ok(())
}

/// Traversal count of `c_{m,n}`.
pub fn symbol_count(spec: &CoveringSpec, m: usize, n: usize) -> Result<BigUint> {
    spec.check_pair(m, n)?;
    let c = c_count(spec, m, n)?;
    let e = spec.circuit_length(m)? - &c * spec.circuit_length(n)?;
    Ok(c + e)
}

/// `c_{m,n}` as traversals, for `n ≤ m` (`c_{n,n}` is the single symbol `C`).
pub(crate) fn circuit_symbols(spec: &CoveringSpec, m: usize, n: usize, cap: u64) -> Result<Vec<Symbol>> {
    check_cap(&symbol_count(spec, m, n)?, cap)?;
    let mut word = vec![Symbol::C];
    for k in n..m {
        let lm = spec.level(k)?;
        let mut next = Vec::new();
        for (j, &x) in lm.a().iter().enumerate() {
            if j > 0 {
                next.extend_from_slice(&word);
            }
            next.extend(std::iter::repeat(Symbol::E).take(x as usize));
        }
        word = next;
    }
    Ok(word)
}

pub fn expand_circuit_word(spec: &CoveringSpec, m: usize, n: usize, cap: u64) -> Result<CircuitWord> {
    spec.check_pair(m, n)?;
    if m == n {
        return Err(Error::InvalidLevels { m, n, reason: "expansion needs n < m".into() });
    }
    let symbols = circuit_symbols(spec, m, n, cap)?;
    Ok(CircuitWord { level: n, symbols, provenance: Some((m, n)) })
}

/// Edge-start vertices of a traversal word at a level with `l_n = len_c`.
pub(crate) fn edge_starts(word: &[Symbol], len_c: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(word.len());
    for &s in word {
        match s {
            Symbol::E => out.push(0),
            Symbol::C => out.extend(0..len_c),
        }
    }
    out
}

pub(crate) fn level_len_u32(spec: &CoveringSpec, n: usize) -> Result<u32> {
    let l = spec.circuit_length(n)?;
    l.to_u32().ok_or_else(|| Error::Overflow(format!("l_{n} = {l}")))
}

/// Vertex walk of `c_{m,n}` for `n ≤ m`; its length in edges is `l_m`.
pub fn expand_vertex_walk(spec: &CoveringSpec, m: usize, n: usize, cap: u64) -> Result<VertexWalk> {
    spec.check_pair(m, n)?;
    let vertices_needed = spec.circuit_length(m)? + BigUint::from(1u32);
    check_cap(&vertices_needed, cap)?;
    let len_c = level_len_u32(spec, n)?;
    let word = circuit_symbols(spec, m, n, cap)?;
    let mut vertices = edge_starts(&word, len_c);
    vertices.push(0);
    Ok(VertexWalk { level: n, vertices })
}

/// `s(k,n)`, `s'(k,n)` with `s(i) = a(i,0)` and `s'(i) = a(i,b(i))`; `k ≥ n - 1`.
pub fn cumulative_runs(spec: &CoveringSpec, k: usize, n: usize) -> Result<CumulativeRuns> {
    if n == 0 || k + 1 < n {
        return Err(Error::InvalidLevels { m: k, n, reason: "need k ≥ n - 1".into() });
    }
    let mut s = BigUint::from(0u32);
    let mut sp = BigUint::from(0u32);
    for i in n..=k {
        let a = spec.level(i)?.a();
        s += BigUint::from(a[0]);
        sp += BigUint::from(a[a.len() - 1]);
    }
    let tau = &s + &sp;
    Ok(CumulativeRuns { s, s_prime: sp, tau })
}

/// Leading and trailing `E`-runs of `c_{m,n}`, by recursion arithmetic.
pub fn e_run_margins(spec: &CoveringSpec, m: usize, n: usize) -> Result<(BigUint, BigUint)> {
    spec.check_pair(m, n)?;
    if m == n {
        return Err(Error::InvalidLevels { m, n, reason: "margins need n < m".into() });
    }
    let r = cumulative_runs(spec, m - 1, n)?;
    Ok((r.s, r.s_prime))
}

/// `d_{m,n}` built by the recursion
/// `d_{k+1,n} = (d E^{τ(k-1,n)})^{t-1} d a_{k,n} (d E^{τ(k-1,n)})^{t'-1} d`
/// with `a_{k,n} = E^{s'(k-1,n)} φ_{k,n}(a_mid) E^{s(k-1,n)}` and `φ_{k,n}(C) = c_{k,n}`.
/// Accepts any split with `t, t' ≥ 1`; the canonical split is used.
pub fn d_word(spec: &CoveringSpec, m: usize, n: usize, cap: u64) -> Result<CircuitWord> {
    spec.check_pair(m, n)?;
    let forms = spec.restricted_range(m, n)?;
    let mut d: Vec<Symbol> = vec![Symbol::C];
    let (mut s_acc, mut sp_acc) = (0u128, 0u128);
    for f in &forms {
        let tau = s_acc + sp_acc;
        let dl = d.len() as u128;
        let c_len = s_acc + dl + sp_acc;
        let a_len = tau + f.s2() as u128 + f.t2() as u128 * c_len;
        let next_len = (f.t + f.t_prime) as u128 * dl
            + (f.t + f.t_prime - 2) as u128 * tau
            + a_len;
        if next_len > cap as u128 {
            return Err(Error::too_large(next_len, cap));
        }
        let e_run = |w: &mut Vec<Symbol>, k: u128| w.extend(std::iter::repeat(Symbol::E).take(k as usize));
        let mut next = Vec::with_capacity(next_len as usize);
        for _ in 1..f.t {
            next.extend_from_slice(&d);
            e_run(&mut next, tau);
        }
        next.extend_from_slice(&d);
        e_run(&mut next, sp_acc);
        for sym in f.a_mid_word() {
            match sym {
                Symbol::E => next.push(Symbol::E),
                Symbol::C => {
                    e_run(&mut next, s_acc);
                    next.extend_from_slice(&d);
                    e_run(&mut next, sp_acc);
                }
            }
        }
        e_run(&mut next, s_acc);
        for _ in 1..f.t_prime {
            next.extend_from_slice(&d);
            e_run(&mut next, tau);
        }
        next.extend_from_slice(&d);
        debug_assert_eq!(next.len() as u128, next_len);
        d = next;
        s_acc += f.s as u128;
        sp_acc += f.s_prime as u128;
    }
    Ok(CircuitWord { level: n, symbols: d, provenance: Some((m, n)) })
}

/// Vertex length `l(d_{m,n})` by the recursion arithmetic alone.
pub fn d_length(spec: &CoveringSpec, m: usize, n: usize) -> Result<BigUint> {
    spec.check_pair(m, n)?;
    let forms = spec.restricted_range(m, n)?;
    let mut len = spec.circuit_length(n)?;
    let mut l_k = len.clone();
    let mut tau = BigUint::from(0u32);
    for (i, f) in forms.iter().enumerate() {
        let k = n + i;
        let big = |x: u64| BigUint::from(x);
        let a_len = &tau + big(f.s2()) + big(f.t2()) * &l_k;
        let next = big(f.t + f.t_prime) * &len + big(f.t + f.t_prime - 2) * &tau + a_len;
        len = next;
        tau += big(f.s + f.s_prime);
        l_k = spec.level(k)?.next_length(&l_k);
    }
    Ok(len)
}

/// Vertex length of `c_{m,n}` with its outer `E`-runs removed, measured on the expansion.
pub fn measured_core_length(spec: &CoveringSpec, m: usize, n: usize, cap: u64) -> Result<BigUint> {
    let w = expand_circuit_word(spec, m, n, cap)?;
    let lead = w.symbols.iter().take_while(|&&s| s == Symbol::E).count();
    let trail = w.symbols.iter().rev().take_while(|&&s| s == Symbol::E).count();
    let core = &w.symbols[lead..w.symbols.len() - trail];
    let l_n = spec.circuit_length(n)?;
    let c = core.iter().filter(|&&s| s == Symbol::C).count();
    Ok(BigUint::from(core.len() - c) + l_n * BigUint::from(c))
}

#[cfg(test)]
fn margins_u128(spec: &CoveringSpec, m: usize, n: usize) -> Result<(u128, u128)> {
    let (a, b) = e_run_margins(spec, m, n)?;
    Ok((u128_of(&a, "s(m-1,n)")?, u128_of(&b, "s'(m-1,n)")?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::{gen_family, FamilyTag, LevelMap};
    use crate::symbol::{parse_word, render_word};

    const CAP: u64 = 10_000_000;

    fn prop55(depth: usize) -> CoveringSpec {
        gen_family(FamilyTag::Prop55, &serde_json::json!({ "depth": depth })).unwrap()
    }

    #[test]
    fn prop55_expansions() {
        let spec = prop55(4);
        assert_eq!(expand_circuit_word(&spec, 2, 1, CAP).unwrap().to_string(), "ECECE");
        assert_eq!(expand_circuit_word(&spec, 3, 2, CAP).unwrap().to_string(), "ECCECCE");
        assert!(expand_circuit_word(&spec, 2, 2, CAP).is_err());
        let w = expand_vertex_walk(&spec, 2, 1, CAP).unwrap();
        assert_eq!(w.vertices, vec![0, 0, 1, 0, 0, 1, 0, 0]);
        assert_eq!(w.edge_count(), 7);
        assert_eq!(expand_vertex_walk(&spec, 3, 1, CAP).unwrap().edge_count(), 31);
    }

    #[test]
    fn cap_is_enforced() {
        let spec = prop55(6);
        assert!(matches!(expand_circuit_word(&spec, 7, 1, 100), Err(Error::ExpansionTooLarge { .. })));
        assert!(matches!(expand_vertex_walk(&spec, 4, 1, 100), Err(Error::ExpansionTooLarge { .. })));
    }

    #[test]
    fn margins_examples() {
        let spec = prop55(4);
        let (a, b) = e_run_margins(&spec, 3, 1).unwrap();
        assert_eq!((a, b), (BigUint::from(2u32), BigUint::from(2u32)));
        let s = CoveringSpec::new(3, vec![LevelMap::new(vec![4, 0, 2, 5]).unwrap()]);
        let (a, b) = e_run_margins(&s, 2, 1).unwrap();
        assert_eq!((a, b), (BigUint::from(4u32), BigUint::from(5u32)));
    }

    #[test]
    fn d_word_base_cases() {
        let spec = prop55(4);
        assert_eq!(d_word(&spec, 2, 2, CAP).unwrap().to_string(), "C");
        assert_eq!(d_word(&spec, 3, 2, CAP).unwrap().to_string(), "CCECC");
        // Level 1 of the Prop55 spec is E C E C E: t = t' = 1, a_mid = E.
        assert_eq!(d_word(&spec, 2, 1, CAP).unwrap().to_string(), "CEC");
    }

    #[test]
    fn d_word_prop55_two_levels() {
        let spec = prop55(5);
        let d = d_word(&spec, 4, 2, CAP).unwrap();
        assert_eq!(d.to_string(), "CCECCEECCECCEEECCECCEECCECC");
    }

    #[test]
    fn d_word_blank_middle() {
        // a_mid blank, t̄ = 4: d_{n+2,n} = (d_{n+1,n} E^{τ(n,n)})^3 d_{n+1,n}.
        let lm = LevelMap::new(vec![1, 0, 0, 0, 1]).unwrap();
        let spec = CoveringSpec::new(3, vec![lm.clone(), lm]);
        let d1 = "CCCC";
        let expected = format!("{d1}EE{d1}EE{d1}EE{d1}");
        assert_eq!(d_word(&spec, 3, 1, CAP).unwrap().to_string(), expected);
    }

    #[test]
    fn strip_identity_prop55() {
        let spec = prop55(5);
        for n in 1..=4 {
            for m in n + 1..=6 {
                let c = expand_circuit_word(&spec, m, n, CAP).unwrap();
                let d = d_word(&spec, m, n, CAP).unwrap();
                let (s, sp) = margins_u128(&spec, m, n).unwrap();
                let mut rebuilt = vec![Symbol::E; s as usize];
                rebuilt.extend_from_slice(&d.symbols);
                rebuilt.extend(std::iter::repeat(Symbol::E).take(sp as usize));
                assert_eq!(render_word(&rebuilt), c.to_string(), "m={m} n={n}");
                assert_eq!(d_length(&spec, m, n).unwrap(), measured_core_length(&spec, m, n, CAP).unwrap());
            }
        }
    }

    #[test]
    fn d_word_with_c_in_middle() {
        let js = r#"{"l1": 2, "levels": [{"s": 1, "t": 2, "a_mid": "ECE", "t'": 2, "s'": 2},
                     {"s": 2, "t": 3, "a_mid": "CEEC", "t'": 2, "s'": 1}]}"#;
        let spec = CoveringSpec::from_json(js).unwrap();
        let c = expand_circuit_word(&spec, 3, 1, CAP).unwrap();
        let d = d_word(&spec, 3, 1, CAP).unwrap();
        let (s, sp) = margins_u128(&spec, 3, 1).unwrap();
        let stripped = &c.symbols[s as usize..c.symbols.len() - sp as usize];
        assert_eq!(render_word(stripped), d.to_string());
        assert_eq!(parse_word(&d.to_string()).unwrap(), d.symbols);
    }

    #[test]
    fn d_word_needs_split() {
        let spec = CoveringSpec::new(2, vec![LevelMap::new(vec![1, 1]).unwrap()]);
        assert!(matches!(d_word(&spec, 2, 1, CAP), Err(Error::NotRestricted(1))));
    }

    #[test]
    fn cumulative_runs_base() {
        let spec = prop55(3);
        let r = cumulative_runs(&spec, 0, 1).unwrap();
        assert_eq!(r.tau, BigUint::from(0u32));
        let r = cumulative_runs(&spec, 2, 1).unwrap();
        assert_eq!((r.s, r.s_prime, r.tau), (BigUint::from(2u32), BigUint::from(2u32), BigUint::from(4u32)));
    }
}
