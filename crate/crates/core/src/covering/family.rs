//! Generators for the example families, with per-level constraint records and
//! closed-form bounds on `1 - r(n)`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{CoveringSpec, LevelMap};
use crate::error::{Error, Result};
use crate::rational::{ratio, serde_ratio};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyTag {
    Prop55,
    Mixing,
    WeakMixNotMix,
    NotWeakMix,
    Custom,
}

impl std::str::FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "prop55" => Ok(FamilyTag::Prop55),
            "mixing" => Ok(FamilyTag::Mixing),
            "weakmixnotmix" => Ok(FamilyTag::WeakMixNotMix),
            "notweakmix" => Ok(FamilyTag::NotWeakMix),
            "custom" => Ok(FamilyTag::Custom),
            _ => Err(Error::FamilyParams(format!("unknown family tag {s:?}"))),
        }
    }
}

/// Closed-form bound on the terms `1 - r(i)`, valid for every level the generator produces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TermBound {
    /// `1 - r(i) ≤ c·rho^i`, `rho < 1`: the series converges.
    Geometric {
        #[serde(with = "serde_ratio")]
        c: BigRational,
        #[serde(with = "serde_ratio")]
        rho: BigRational,
    },
    /// `1 - r(i) ≥ delta > 0` at every level: the series diverges.
    LowerBound {
        #[serde(with = "serde_ratio")]
        delta: BigRational,
    },
    /// `1 - r(i) ≥ delta` at the listed levels, one per stage of an unbounded construction.
    LowerBoundOnStages {
        #[serde(with = "serde_ratio")]
        delta: BigRational,
        levels: Vec<usize>,
    },
}

impl TermBound {
    /// Bound for the covering telescoped to `keep`; new level `j` covers old `[keep[j-1], keep[j])`.
    pub fn telescoped(&self, keep: &[usize]) -> TermBound {
        match self {
            // 1 - ∏ r(i) ≤ Σ c·rho^i ≤ c·rho^{keep[j-1]}/(1-rho) and keep[j-1] ≥ j.
            TermBound::Geometric { c, rho } => TermBound::Geometric {
                c: c / (BigRational::one() - rho),
                rho: rho.clone(),
            },
            // 1 - ∏ r(i) ≥ 1 - r(keep[j-1]).
            TermBound::LowerBound { delta } => TermBound::LowerBound { delta: delta.clone() },
            TermBound::LowerBoundOnStages { delta, levels } => {
                let mut mapped: Vec<usize> = levels
                    .iter()
                    .filter_map(|&i| {
                        keep.windows(2).position(|w| w[0] <= i && i < w[1]).map(|j| j + 1)
                    })
                    .collect();
                mapped.dedup();
                TermBound::LowerBoundOnStages { delta: delta.clone(), levels: mapped }
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            TermBound::Geometric { c, rho } => format!(
                "1-r(i) <= {}*({})^i with ratio < 1, so the series converges",
                crate::rational::display(c),
                crate::rational::display(rho)
            ),
            TermBound::LowerBound { delta } => format!(
                "1-r(i) >= {} at every level, so the series diverges",
                crate::rational::display(delta)
            ),
            TermBound::LowerBoundOnStages { delta, levels } => format!(
                "1-r(i) >= {} at every stage boundary (presented: {:?}), so the series diverges",
                crate::rational::display(delta),
                levels
            ),
        }
    }
}

/// One checkable claim about a level. `Circuit*` refers to `l_level`, `Map*` to `φ_{level+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constraint {
    CircuitOdd,
    CircuitAtLeast { bound: u64 },
    CircuitMultipleOf { p: u64 },
    MapOuterRuns { s: u64, s_prime: u64 },
    MapRunsMultipleOf { p: u64 },
    MapTBarOdd,
    MapTBarAtLeast { bound: u64 },
    /// `s̄(n) ≥ t̄(n)·l_n`.
    MapHeavyMiddle,
    /// `s(m) = s'(m)` and `2·s(m) > 3·l(d_{m+1,base})`.
    StageBoundary { base: usize },
    /// `2(m - base) > 3·l_base`.
    MixingWindow { base: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCheck {
    pub level: usize,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    /// First circuit level of the stage, `n(k)`.
    pub base: usize,
    /// Level `m` whose map carries the large outer runs; the next stage starts at `m + 1`.
    pub boundary: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family {
    pub tag: FamilyTag,
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<TermBound>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub level_checks: Vec<LevelCheck>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stages: Vec<Stage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub telescoped_from: Option<Vec<usize>>,
}

impl Family {
    fn bare(tag: FamilyTag, params: serde_json::Value) -> Self {
        Family {
            tag,
            params,
            certificate: None,
            level_checks: Vec::new(),
            stages: Vec::new(),
            telescoped_from: None,
        }
    }

    pub fn telescoped(&self, keep: &[usize]) -> Family {
        Family {
            tag: self.tag,
            params: self.params.clone(),
            certificate: self.certificate.as_ref().map(|c| c.telescoped(keep)),
            level_checks: Vec::new(),
            stages: Vec::new(),
            telescoped_from: Some(keep.to_vec()),
        }
    }

    pub fn regenerate(&self, depth: usize) -> Result<CoveringSpec> {
        let mut params = self.params.clone();
        let obj = params
            .as_object_mut()
            .ok_or_else(|| Error::FamilyParams("params must be an object".into()))?;
        match self.tag {
            FamilyTag::WeakMixNotMix => {
                let current = gen_family(self.tag, &self.params)?.depth();
                let p: WeakMixParams = serde_json::from_value(self.params.clone())?;
                let extra = depth.saturating_sub(current);
                obj.insert("tail".into(), (p.tail + extra).into());
            }
            FamilyTag::Custom => {
                return Err(Error::FamilyParams("Custom specs have no generator".into()))
            }
            _ => {
                obj.insert("depth".into(), depth.into());
            }
        }
        gen_family(self.tag, &params)
    }

    /// Re-evaluates every recorded constraint against `spec`.
    pub fn verify_checks(&self, spec: &CoveringSpec) -> std::result::Result<(), Vec<String>> {
        let mut failures = Vec::new();
        for lc in &self.level_checks {
            for c in &lc.constraints {
                match check_constraint(spec, lc.level, c) {
                    Ok(true) => {}
                    Ok(false) => failures.push(format!("level {}: {:?} fails", lc.level, c)),
                    Err(e) => failures.push(format!("level {}: {:?}: {e}", lc.level, c)),
                }
            }
        }
        if failures.is_empty() {
            Ok(())
        } else {
            Err(failures)
        }
    }
}

fn check_constraint(spec: &CoveringSpec, level: usize, c: &Constraint) -> Result<bool> {
    let big = |x: u64| BigUint::from(x);
    Ok(match c {
        Constraint::CircuitOdd => spec.circuit_length(level)?.is_odd(),
        Constraint::CircuitAtLeast { bound } => spec.circuit_length(level)? >= big(*bound),
        Constraint::CircuitMultipleOf { p } => (spec.circuit_length(level)? % big(*p)).is_zero(),
        Constraint::MapOuterRuns { s, s_prime } => {
            let a = spec.level(level)?.a();
            a[0] == *s && a[a.len() - 1] == *s_prime
        }
        Constraint::MapRunsMultipleOf { p } => spec.level(level)?.a().iter().all(|x| x % p == 0),
        Constraint::MapTBarOdd => spec.level(level)?.b() % 2 == 1,
        Constraint::MapTBarAtLeast { bound } => spec.level(level)?.b() >= *bound,
        Constraint::MapHeavyMiddle => {
            let lm = spec.level(level)?;
            let r = lm.decompose().ok_or(Error::NotRestricted(level))?;
            big(r.s_bar()) >= big(r.t_bar()) * spec.circuit_length(level)?
        }
        Constraint::StageBoundary { base } => {
            let a = spec.level(level)?.a();
            let s = a[0];
            let d = crate::expansion::d_length(spec, level + 1, *base)?;
            s == a[a.len() - 1] && big(2) * big(s) > big(3) * d
        }
        Constraint::MixingWindow { base } => {
            level > *base
                && big(2 * (level - base) as u64) > big(3) * spec.circuit_length(*base)?
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Prop55Params {
    pub depth: usize,
}

impl Default for Prop55Params {
    fn default() -> Self {
        Prop55Params { depth: 6 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MixingParams {
    pub l1: u64,
    pub depth: usize,
    pub t: u64,
    pub t_prime: u64,
    /// Base `E`-count of `a_mid` before parity padding.
    pub extra: u64,
    /// Make `s̄(n) ≥ t̄(n)·l_n` at every level.
    pub heavy: bool,
}

impl Default for MixingParams {
    fn default() -> Self {
        MixingParams { l1: 11, depth: 6, t: 2, t_prime: 2, extra: 0, heavy: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct WeakMixParams {
    pub l1: u64,
    pub t_bar: u64,
    pub stages: usize,
    /// Maps appended after the last stage boundary.
    pub tail: usize,
}

impl Default for WeakMixParams {
    fn default() -> Self {
        WeakMixParams { l1: 3, t_bar: 3, stages: 1, tail: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct NotWeakMixParams {
    pub p: u64,
    pub depth: usize,
    pub s: u64,
    pub s_prime: u64,
    pub t_bar: u64,
    pub l1: u64,
}

impl Default for NotWeakMixParams {
    fn default() -> Self {
        NotWeakMixParams { p: 3, depth: 4, s: 3, s_prime: 3, t_bar: 2, l1: 3 }
    }
}

/// Longest stage the generator will lay out, in levels.
const MAX_STAGE_LEVELS: u64 = 4096;

pub fn gen_family(tag: FamilyTag, params: &serde_json::Value) -> Result<CoveringSpec> {
    let params = if params.is_null() { serde_json::json!({}) } else { params.clone() };
    match tag {
        FamilyTag::Prop55 => gen_prop55(serde_json::from_value(params)?),
        FamilyTag::Mixing => gen_mixing(serde_json::from_value(params)?),
        FamilyTag::WeakMixNotMix => gen_weakmix(serde_json::from_value(params)?),
        FamilyTag::NotWeakMix => gen_notweakmix(serde_json::from_value(params)?),
        FamilyTag::Custom => Err(Error::FamilyParams("Custom specs have no generator".into())),
    }
}

/// The worked-example covering with `depth` maps.
pub fn prop55(depth: usize) -> CoveringSpec {
    gen_prop55(Prop55Params { depth }).expect("prop55 parameters are valid")
}

fn gen_prop55(p: Prop55Params) -> Result<CoveringSpec> {
    if p.depth == 0 {
        return Err(Error::FamilyParams("depth must be at least 1".into()));
    }
    let mut levels = vec![LevelMap::new(vec![1, 1, 1])?];
    for _ in 1..p.depth {
        levels.push(LevelMap::new(vec![1, 0, 1, 0, 1])?);
    }
    let mut fam = Family::bare(FamilyTag::Prop55, serde_json::to_value(&p)?);
    // 1 - r(i) = 3/l_{i+1} and l_{i+1} ≥ 7·4^{i-1}.
    fam.certificate = Some(TermBound::Geometric { c: ratio(12, 7), rho: ratio(1, 4) });
    Ok(CoveringSpec { l1: 2, levels, family: Some(fam) })
}

fn outer_map(s: u64, t: u64, mid: u64, t_prime: u64, s_prime: u64) -> Result<LevelMap> {
    let mut a = vec![s];
    a.extend(std::iter::repeat(0).take(t as usize - 1));
    a.push(mid);
    a.extend(std::iter::repeat(0).take(t_prime as usize - 1));
    a.push(s_prime);
    LevelMap::new(a)
}

fn blank_map(s: u64, t_bar: u64, s_prime: u64) -> Result<LevelMap> {
    let mut a = vec![s];
    a.extend(std::iter::repeat(0).take(t_bar as usize - 1));
    a.push(s_prime);
    LevelMap::new(a)
}

fn to_u64(x: &BigUint, what: &str) -> Result<u64> {
    x.to_u64().ok_or_else(|| Error::FamilyParams(format!("{what} = {x} does not fit in 64 bits")))
}

fn gen_mixing(p: MixingParams) -> Result<CoveringSpec> {
    if p.l1 < 11 || p.l1 % 2 == 0 {
        return Err(Error::FamilyParams(format!("l1 must be odd and at least 11, got {}", p.l1)));
    }
    if p.t < 2 || p.t_prime < 2 {
        return Err(Error::FamilyParams("t and t' must be at least 2".into()));
    }
    let t_bar = p.t + p.t_prime;
    let mut levels = Vec::with_capacity(p.depth);
    let mut checks = Vec::new();
    let mut l = BigUint::from(p.l1);
    for n in 1..=p.depth {
        let mut s2 = if p.heavy {
            to_u64(&(BigUint::from(t_bar) * &l), "t̄·l_n")?
                .checked_sub(2)
                .ok_or_else(|| Error::FamilyParams("level too short".into()))?
        } else {
            p.extra
        };
        // l_{n+1} ≡ s'' + t̄ (mod 2) since s + s' = 2 and l_n is odd.
        if (s2 + t_bar) % 2 == 0 {
            s2 += 1;
        }
        let lm = outer_map(1, p.t, s2, p.t_prime, 1)?;
        let mut cs = vec![Constraint::MapOuterRuns { s: 1, s_prime: 1 }];
        if p.heavy {
            cs.push(Constraint::MapHeavyMiddle);
        }
        checks.push(LevelCheck {
            level: n,
            constraints: [
                vec![Constraint::CircuitOdd, Constraint::CircuitAtLeast { bound: 11 }],
                cs,
            ]
            .concat(),
        });
        l = lm.next_length(&l);
        levels.push(lm);
    }
    checks.push(LevelCheck {
        level: p.depth + 1,
        constraints: vec![Constraint::CircuitOdd, Constraint::CircuitAtLeast { bound: 11 }],
    });
    let certificate = if p.heavy {
        TermBound::LowerBound { delta: ratio(1, 2) }
    } else {
        // s̄ ≤ extra + 3 and l_{i+1} ≥ t̄·l_i, so 1 - r(i) ≤ ((extra + 3)/l1)·t̄^{-i}.
        TermBound::Geometric { c: ratio(p.extra + 3, p.l1), rho: ratio(1, t_bar) }
    };
    let mut fam = Family::bare(FamilyTag::Mixing, serde_json::to_value(&p)?);
    fam.certificate = Some(certificate);
    fam.level_checks = checks;
    Ok(CoveringSpec { l1: p.l1, levels, family: Some(fam) })
}

fn gen_weakmix(p: WeakMixParams) -> Result<CoveringSpec> {
    if p.l1 < 3 || p.l1 % 2 == 0 {
        return Err(Error::FamilyParams(format!("l1 must be odd and at least 3, got {}", p.l1)));
    }
    if p.t_bar < 3 || p.t_bar % 2 == 0 {
        return Err(Error::FamilyParams("t_bar must be odd and at least 3".into()));
    }
    if p.stages == 0 {
        return Err(Error::FamilyParams("at least one stage is required".into()));
    }
    let mut spec = CoveringSpec::new(p.l1, Vec::new());
    let mut checks = Vec::new();
    let mut stages = Vec::new();
    let plain = |lvl: usize| LevelCheck {
        level: lvl,
        constraints: vec![
            Constraint::CircuitOdd,
            Constraint::MapOuterRuns { s: 1, s_prime: 1 },
            Constraint::MapTBarOdd,
            Constraint::MapTBarAtLeast { bound: 3 },
        ],
    };
    let mut base = 1usize;
    for k in 0..p.stages {
        let l_base = spec.circuit_length(base)?;
        // Smallest m with 2(m - base) > 3·l_base.
        let span = to_u64(&(BigUint::from(3u32) * &l_base / BigUint::from(2u32)), "stage span")? + 1;
        if span > MAX_STAGE_LEVELS {
            return Err(Error::FamilyParams(format!(
                "stage {} needs {span} levels above base {base} (l = {l_base}); limit is {MAX_STAGE_LEVELS}",
                k + 1
            )));
        }
        let m = base + span as usize;
        for lvl in base..m {
            spec.levels.push(blank_map(1, p.t_bar, 1)?);
            checks.push(plain(lvl));
        }
        // d_{m+1,base} does not depend on s(m), s'(m).
        spec.levels.push(blank_map(1, p.t_bar, 1)?);
        let d = crate::expansion::d_length(&spec, m + 1, base)?;
        let s = to_u64(&(BigUint::from(3u32) * d / BigUint::from(2u32)), "boundary run")? + 1;
        *spec.levels.last_mut().unwrap() = blank_map(s, p.t_bar, s)?;
        checks.push(LevelCheck {
            level: m,
            constraints: vec![
                Constraint::CircuitOdd,
                Constraint::StageBoundary { base },
                Constraint::MixingWindow { base },
                Constraint::MapTBarOdd,
                Constraint::MapTBarAtLeast { bound: 3 },
            ],
        });
        stages.push(Stage { base, boundary: m });
        base = m + 1;
    }
    for _ in 0..p.tail {
        spec.levels.push(blank_map(1, p.t_bar, 1)?);
        checks.push(plain(spec.levels.len()));
    }
    let mut fam = Family::bare(FamilyTag::WeakMixNotMix, serde_json::to_value(&p)?);
    fam.certificate = Some(TermBound::LowerBoundOnStages {
        delta: ratio(3, 7),
        levels: stages.iter().map(|s| s.boundary).collect(),
    });
    fam.level_checks = checks;
    fam.stages = stages;
    spec.family = Some(fam);
    Ok(spec)
}

fn gen_notweakmix(p: NotWeakMixParams) -> Result<CoveringSpec> {
    if p.p < 3 {
        return Err(Error::FamilyParams("modulus p must be at least 3".into()));
    }
    if p.l1 < 3 || p.l1 % p.p != 0 {
        return Err(Error::FamilyParams("l1 must be a multiple of p and at least 3".into()));
    }
    if p.s == 0 || p.s_prime == 0 || p.s % p.p != 0 || p.s_prime % p.p != 0 {
        return Err(Error::FamilyParams("s and s' must be positive multiples of p".into()));
    }
    if p.t_bar == 0 {
        return Err(Error::FamilyParams("t_bar must be positive".into()));
    }
    let mut levels = Vec::with_capacity(p.depth);
    let mut checks = Vec::new();
    for n in 1..=p.depth {
        levels.push(blank_map(p.s, p.t_bar, p.s_prime)?);
        checks.push(LevelCheck {
            level: n,
            constraints: vec![
                Constraint::CircuitMultipleOf { p: p.p },
                Constraint::MapRunsMultipleOf { p: p.p },
            ],
        });
    }
    checks.push(LevelCheck {
        level: p.depth + 1,
        constraints: vec![Constraint::CircuitMultipleOf { p: p.p }],
    });
    let mut fam = Family::bare(FamilyTag::NotWeakMix, serde_json::to_value(&p)?);
    if p.t_bar >= 2 {
        // l_{i+1} ≥ t̄·l_i, so 1 - r(i) ≤ ((s + s')/l1)·t̄^{-i}.
        fam.certificate =
            Some(TermBound::Geometric { c: ratio(p.s + p.s_prime, p.l1), rho: ratio(1, p.t_bar) });
    }
    fam.level_checks = checks;
    Ok(CoveringSpec { l1: p.l1, levels, family: Some(fam) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn prop55_shape() {
        let spec = prop55(3);
        assert_eq!(spec.l1, 2);
        assert_eq!(spec.levels[0].a(), &[1, 1, 1]);
        assert_eq!(spec.levels[1].a(), &[1, 0, 1, 0, 1]);
        assert_eq!(spec.levels[2].a(), &[1, 0, 1, 0, 1]);
    }

    #[test]
    fn notweakmix_lengths_are_multiples() {
        let params = serde_json::json!({"p": 3, "depth": 4, "s": 3, "s_prime": 3, "t_bar": 2, "l1": 3});
        let spec = gen_family(FamilyTag::NotWeakMix, &params).unwrap();
        let ls: Vec<u64> = spec.lengths().iter().map(|x| x.to_u64().unwrap()).collect();
        assert_eq!(ls, vec![3, 12, 30, 66, 138]);
        assert!(ls.iter().all(|l| l % 3 == 0));
        assert!(spec.family.as_ref().unwrap().verify_checks(&spec).is_ok());
        let bad = serde_json::json!({"p": 3, "s": 2});
        assert!(gen_family(FamilyTag::NotWeakMix, &bad).is_err());
    }

    #[test]
    fn mixing_lengths_odd() {
        let params = serde_json::json!({"depth": 5, "l1": 11});
        let spec = gen_family(FamilyTag::Mixing, &params).unwrap();
        let ls: Vec<u64> = spec.lengths().iter().map(|x| x.to_u64().unwrap()).collect();
        assert_eq!(ls[..3], [11, 47, 191]);
        assert!(ls.iter().all(|l| l % 2 == 1 && *l >= 11));
        for lm in &spec.levels {
            let r = lm.restricted().unwrap();
            assert_eq!((r.s, r.s_prime), (1, 1));
        }
        assert!(spec.family.as_ref().unwrap().verify_checks(&spec).is_ok());
        assert!(gen_family(FamilyTag::Mixing, &serde_json::json!({"l1": 12})).is_err());
        assert!(gen_family(FamilyTag::Mixing, &serde_json::json!({"l1": 9})).is_err());
    }

    #[test]
    fn weakmix_single_stage() {
        let spec = gen_family(FamilyTag::WeakMixNotMix, &serde_json::json!({})).unwrap();
        let fam = spec.family.as_ref().unwrap();
        assert_eq!(fam.stages, vec![Stage { base: 1, boundary: 6 }]);
        assert_eq!(spec.levels[5].a(), &[4355, 0, 0, 4355]);
        let ls: Vec<u64> = spec.lengths().iter().map(|x| x.to_u64().unwrap()).collect();
        assert_eq!(ls[..7], [3, 11, 35, 107, 323, 971, 11623]);
        assert!(fam.verify_checks(&spec).is_ok());
        let two = gen_family(FamilyTag::WeakMixNotMix, &serde_json::json!({"stages": 2}));
        assert!(matches!(two, Err(Error::FamilyParams(_))));
    }

    #[test]
    fn regenerate_extends() {
        let spec = prop55(3);
        let deeper = spec.extended_to(7).unwrap();
        assert_eq!(deeper.depth(), 7);
        assert_eq!(&deeper.levels[..3], &spec.levels[..]);
        let wm = gen_family(FamilyTag::WeakMixNotMix, &serde_json::json!({})).unwrap();
        let deeper = wm.extended_to(wm.depth() + 2).unwrap();
        assert_eq!(deeper.depth(), wm.depth() + 2);
        assert_eq!(&deeper.levels[..wm.depth()], &wm.levels[..]);
    }

    #[test]
    fn broken_checks_detected() {
        let mut spec = gen_family(FamilyTag::Mixing, &serde_json::json!({"depth": 3})).unwrap();
        spec.levels[1] = LevelMap::new(vec![1, 0, 0, 0, 1]).unwrap();
        let fam = spec.family.clone().unwrap();
        assert!(fam.verify_checks(&spec).is_err());
    }

    #[test]
    fn family_json_round_trip() {
        for tag in [FamilyTag::Prop55, FamilyTag::Mixing, FamilyTag::WeakMixNotMix, FamilyTag::NotWeakMix] {
            let spec = gen_family(tag, &serde_json::Value::Null).unwrap();
            let back = CoveringSpec::from_json(&spec.to_json()).unwrap();
            assert_eq!(back, spec);
        }
    }

    #[test]
    fn telescoped_stage_bound() {
        let b = TermBound::LowerBoundOnStages { delta: ratio(3, 7), levels: vec![6] };
        match b.telescoped(&[1, 3, 6, 7, 9]) {
            TermBound::LowerBoundOnStages { levels, .. } => assert_eq!(levels, vec![3]),
            _ => unreachable!(),
        }
    }
}
