//! Finite-horizon orbit comparisons: Li–Yorke event search and level-1 separation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::seed::{Frame, LevelState, PointSeed};
use crate::covering::CoveringSpec;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiYorkeWitness {
    pub seed_a: PointSeed,
    pub seed_b: PointSeed,
    pub horizon: u64,
    pub backward: bool,
    pub k_target: usize,
    /// Deepest level (at most `k_target`) at which the orbits ever share a vertex; 0 if never.
    pub best_k: usize,
    /// Times at which the orbits share their level-`best_k` vertex.
    pub proximal_events: Vec<i128>,
    /// Times at which the level-1 symbols differ.
    pub separation_events: Vec<i128>,
}

/// Compares the orbits over `[0, horizon]`, or `[-horizon, 0]` when `backward`.
pub fn li_yorke_witness(
    spec: &CoveringSpec,
    seed_a: &PointSeed,
    seed_b: &PointSeed,
    horizon: u64,
    k_target: usize,
    backward: bool,
) -> Result<LiYorkeWitness> {
    if seed_a.base_level != 1 || seed_b.base_level != 1 {
        return Err(Error::InvalidSeed("witness seeds must start at level 1".into()));
    }
    let reach = seed_a.top_level.min(seed_b.top_level);
    if k_target == 0 || k_target > reach {
        return Err(Error::Precondition(format!("k_target must lie in 1..={reach}")));
    }
    let fa = Frame::new(spec, 1, seed_a.top_level)?;
    let fb = Frame::new(spec, 1, seed_b.top_level)?;
    let (pa, pb) = (fa.position(seed_a)?, fb.position(seed_b)?);
    let times: Box<dyn Iterator<Item = i128>> = if backward {
        Box::new((-(horizon as i128)..=0).rev())
    } else {
        Box::new(0..=horizon as i128)
    };
    let mut depth_at = Vec::new();
    let mut separation_events = Vec::new();
    for t in times {
        let sa = fa.states_at(pa, t)?;
        let sb = fb.states_at(pb, t)?;
        if sa[0].symbol() != sb[0].symbol() {
            separation_events.push(t);
        }
        // Points are vertex sequences; a shared level-k vertex forces shared vertices below it.
        let d = (1..=k_target).rev().find(|&k| sa[k - 1].vertex() == sb[k - 1].vertex()).unwrap_or(0);
        depth_at.push((t, d));
    }
    let best_k = depth_at.iter().map(|&(_, d)| d).max().unwrap_or(0);
    let mut proximal_events: Vec<i128> =
        if best_k == 0 { Vec::new() } else { depth_at.iter().filter(|&&(_, d)| d == best_k).map(|&(t, _)| t).collect() };
    proximal_events.sort_unstable();
    separation_events.sort_unstable();
    Ok(LiYorkeWitness {
        seed_a: seed_a.clone(),
        seed_b: seed_b.clone(),
        horizon,
        backward,
        k_target,
        best_k,
        proximal_events,
        separation_events,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub level: usize,
    pub len: u64,
    /// Depth of the circuit the segments are drawn from.
    pub source_level: usize,
    pub samples: usize,
    pub separated: usize,
    /// Largest padding any pair needed.
    pub max_padding: u64,
    pub padding_bound: u64,
    /// Start positions of pairs not separated within the bound.
    pub failures: Vec<(u64, u64)>,
    pub pass: bool,
}

/// Samples pairs of distinct level-`n` segments of length `len` from a deep circuit and finds,
/// for each, the least padding `p ≤ l_n` such that the level-1 symbols on the segments widened
/// by `p` on both sides differ.
pub fn level1_separation_check(
    spec: &CoveringSpec,
    n: usize,
    len: u64,
    samples: usize,
    rng_seed: u64,
    cap: u64,
) -> Result<SeparationReport> {
    if n < 2 {
        return Err(Error::LevelOutOfRange { level: n, min: 2, max: spec.top() });
    }
    if len == 0 {
        return Err(Error::Precondition("segment length must be at least 1".into()));
    }
    let mut spec = super::deepen(spec, n + 1);
    spec.check_circuit_level(n)?;
    let pad = spec.circuit_length_u64(n)?;
    let need = num_bigint::BigUint::from((len + 2 * pad) * 8);
    let mut source = n + 1;
    loop {
        if source > spec.top() {
            spec = super::deepen(&spec, source);
            spec.check_circuit_level(source)?;
        }
        if spec.circuit_length(source)? >= need {
            break;
        }
        source += 1;
    }
    let frame = Frame::new(&spec, 1, source)?;
    let span = frame.span();
    if span + 1 > cap as u128 {
        return Err(Error::too_large(span + 1, cap));
    }
    let span = span as u64;
    if span < len + 2 * pad + 1 {
        return Err(Error::Precondition(format!("circuit {source} is too short to sample segments")));
    }
    let (rows, level1): (Vec<LevelState>, Vec<bool>) = (0..span)
        .map(|q| {
            let s = frame.states(q as u128);
            (s[n - 1], s[0] == LevelState::Loop)
        })
        .unzip();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let (lo, hi) = (pad, span - len - pad);
    let mut separated = 0;
    let mut max_padding = 0;
    let mut failures = Vec::new();
    let mut drawn = 0;
    let mut attempts = 0usize;
    while drawn < samples {
        attempts += 1;
        if attempts > samples * 1000 + 1000 {
            return Err(Error::Precondition("too few distinct segments to sample".into()));
        }
        let i = rng.gen_range(lo..=hi);
        let j = rng.gen_range(lo..=hi);
        let (si, sj) = (&rows[i as usize..(i + len) as usize], &rows[j as usize..(j + len) as usize]);
        if si == sj {
            continue;
        }
        drawn += 1;
        let found = (0..=pad).find(|&p| {
            let a = &level1[(i - p) as usize..(i + len + p) as usize];
            let b = &level1[(j - p) as usize..(j + len + p) as usize];
            a != b
        });
        match found {
            Some(p) => {
                separated += 1;
                max_padding = max_padding.max(p);
            }
            None => failures.push((i, j)),
        }
    }
    Ok(SeparationReport {
        level: n,
        len,
        source_level: source,
        samples,
        separated,
        max_padding,
        padding_bound: pad,
        pass: failures.is_empty(),
        failures,
    })
}

/// A seed with time 0 uniform among positions leaving `before`/`after` determined steps.
pub fn random_seed(
    spec: &CoveringSpec,
    top: usize,
    before: u64,
    after: u64,
    rng: &mut impl Rng,
) -> Result<PointSeed> {
    let frame = Frame::new(spec, 1, top)?;
    let span = frame.span();
    if before as u128 + after as u128 >= span {
        return Err(Error::WindowUndetermined(after as i128));
    }
    let q = rng.gen_range(before as u128..span - after as u128);
    frame.seed_at(q)
}
