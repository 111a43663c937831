//! Finite presentations of rank-2 proximal KR-coverings.
//!
//! Level `n` has two circuits: the loop `e_n` of length 1 and `c_n` of length
//! `l_n`. A [`LevelMap`] records how `c_{n+1}` winds around level `n`:
//! `e^{a(0)} (c e^{a(1)}) ... (c e^{a(b)})`.

mod family;
mod level;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use family::{
    gen_family, prop55, Constraint, Family, FamilyTag, LevelCheck, MixingParams, NotWeakMixParams,
    Prop55Params, TermBound, WeakMixParams,
};
pub use level::{LevelMap, RestrictedForm, RunBuilder};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoveringSpec {
    pub l1: u64,
    pub levels: Vec<LevelMap>,
    #[serde(default)]
    pub family: Option<Family>,
}

impl CoveringSpec {
    pub fn new(l1: u64, levels: Vec<LevelMap>) -> Self {
        CoveringSpec { l1, levels, family: None }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: CoveringSpec = serde_json::from_str(s)?;
        if spec.l1 == 0 {
            return Err(Error::InvalidSpec("l1 must be positive".into()));
        }
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Number of presented level maps `N`; circuits `c_1..c_{N+1}` are defined.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Highest level whose circuit is defined.
    pub fn top(&self) -> usize {
        self.levels.len() + 1
    }

    /// Map `φ_{n+1}` for `1 ≤ n ≤ N`.
    pub fn level(&self, n: usize) -> Result<&LevelMap> {
        if n == 0 || n > self.levels.len() {
            return Err(Error::LevelOutOfRange { level: n, min: 1, max: self.levels.len() });
        }
        Ok(&self.levels[n - 1])
    }

    /// `l_1, ..., l_{N+1}`.
    pub fn lengths(&self) -> Vec<BigUint> {
        let mut out = Vec::with_capacity(self.levels.len() + 1);
        let mut l = BigUint::from(self.l1);
        out.push(l.clone());
        for lm in &self.levels {
            l = lm.next_length(&l);
            out.push(l.clone());
        }
        out
    }

    pub fn circuit_length(&self, n: usize) -> Result<BigUint> {
        self.check_circuit_level(n)?;
        let mut l = BigUint::from(self.l1);
        for lm in &self.levels[..n - 1] {
            l = lm.next_length(&l);
        }
        Ok(l)
    }

    pub fn circuit_length_u64(&self, n: usize) -> Result<u64> {
        let l = self.circuit_length(n)?;
        l.to_u64().ok_or_else(|| Error::Overflow(format!("l_{n} = {l}")))
    }

    pub fn check_circuit_level(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.top() {
            return Err(Error::LevelOutOfRange { level: n, min: 1, max: self.top() });
        }
        Ok(())
    }

    /// Checks `1 ≤ n ≤ m ≤ N+1`.
    pub fn check_pair(&self, m: usize, n: usize) -> Result<()> {
        self.check_circuit_level(n)?;
        self.check_circuit_level(m)?;
        if m < n {
            return Err(Error::InvalidLevels { m, n, reason: "m must be at least n".into() });
        }
        Ok(())
    }

    /// Restricted decomposition of every map in `[n, m)`.
    pub fn restricted_range(&self, m: usize, n: usize) -> Result<Vec<RestrictedForm>> {
        (n..m)
            .map(|k| self.level(k)?.decompose().ok_or(Error::NotRestricted(k)))
            .collect()
    }

    /// Class membership (`t, t' ≥ 2`) of every presented level.
    pub fn is_class_s(&self) -> bool {
        self.levels.iter().all(|lm| lm.restricted().is_some())
    }

    /// Regenerates from the family parameters with at least `depth` maps.
    pub fn extended_to(&self, depth: usize) -> Result<CoveringSpec> {
        if depth <= self.depth() {
            return Ok(self.clone());
        }
        match &self.family {
            Some(f) if f.telescoped_from.is_none() => f.regenerate(depth),
            _ => Err(Error::LevelOutOfRange { level: depth + 1, min: 1, max: self.top() }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelValidation {
    pub level: usize,
    pub a0_positive: bool,
    pub ab_positive: bool,
    pub b_positive: bool,
    pub cantor_warning: bool,
}

impl LevelValidation {
    pub fn ok(&self) -> bool {
        self.a0_positive && self.ab_positive && self.b_positive
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub l1_ok: bool,
    pub levels: Vec<LevelValidation>,
    pub family_checks_ok: Option<bool>,
    pub warnings: Vec<String>,
    pub valid: bool,
}

pub fn validate(spec: &CoveringSpec) -> ValidationReport {
    let mut warnings = Vec::new();
    let l1_ok = spec.l1 >= 2;
    if !l1_ok {
        warnings.push(format!("l1 = {} is below 2", spec.l1));
    }
    let levels: Vec<LevelValidation> = spec
        .levels
        .iter()
        .enumerate()
        .map(|(i, lm)| {
            let a = lm.a();
            let b = lm.b();
            let v = LevelValidation {
                level: i + 1,
                a0_positive: a[0] > 0,
                ab_positive: a[a.len() - 1] > 0,
                b_positive: b >= 1,
                cantor_warning: b == 1,
            };
            if v.cantor_warning {
                warnings.push(format!("level {}: b = 1, Cantor condition fails here", i + 1));
            }
            v
        })
        .collect();
    let family_checks_ok = spec.family.as_ref().map(|f| f.verify_checks(spec).is_ok());
    if family_checks_ok == Some(false) {
        warnings.push("family level checks do not hold".into());
    }
    let valid = l1_ok && levels.iter().all(|l| l.ok()) && family_checks_ok != Some(false);
    ValidationReport { l1_ok, levels, family_checks_ok, warnings, valid }
}

/// Composes consecutive levels; `keep` lists the circuit levels retained.
pub fn telescope(spec: &CoveringSpec, keep: &[usize]) -> Result<CoveringSpec> {
    if keep.is_empty() {
        return Err(Error::Precondition("keep list is empty".into()));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("keep list must be strictly increasing".into()));
    }
    for &k in keep {
        spec.check_circuit_level(k)?;
    }
    let l1 = spec.circuit_length_u64(keep[0])?;
    let mut levels = Vec::with_capacity(keep.len() - 1);
    for w in keep.windows(2) {
        levels.push(compose_range(spec, w[1], w[0])?);
    }
    let family = spec.family.as_ref().map(|f| f.telescoped(keep));
    Ok(CoveringSpec { l1, levels, family })
}

/// The map of `c_m` over level `n`, i.e. the composition `φ_{n+1} ∘ ... ∘ φ_m`.
pub fn compose_range(spec: &CoveringSpec, m: usize, n: usize) -> Result<LevelMap> {
    if m <= n {
        return Err(Error::InvalidLevels { m, n, reason: "need n < m".into() });
    }
    let mut acc = spec.level(n)?.clone();
    for k in n + 1..m {
        acc = spec.level(k)?.compose_over(&acc);
    }
    Ok(acc)
}

/// Count of `C` traversals in `c_{m,n}`: `∏_{i=n}^{m-1} b(i)`.
pub fn c_count(spec: &CoveringSpec, m: usize, n: usize) -> Result<BigUint> {
    let mut p = BigUint::from(1u32);
    for k in n..m {
        p *= BigUint::from(spec.level(k)?.b());
    }
    Ok(p)
}

/// Count of `E` traversals in `c_{m,n}`.
pub fn e_count(spec: &CoveringSpec, m: usize, n: usize) -> Result<BigUint> {
    spec.check_pair(m, n)?;
    let lm = spec.circuit_length(m)?;
    let ln = spec.circuit_length(n)?;
    let c = c_count(spec, m, n)?;
    Ok(lm - c * ln)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::family::prop55;

    fn lm(a: &[u64]) -> LevelMap {
        LevelMap::new(a.to_vec()).unwrap()
    }

    #[test]
    fn prop55_lengths() {
        let spec = prop55(6);
        let ls: Vec<u64> = spec.lengths().iter().map(|x| x.to_u64().unwrap()).collect();
        assert_eq!(ls, vec![2, 7, 31, 127, 511, 2047, 8191]);
        assert_eq!(spec.circuit_length(2).unwrap(), BigUint::from(7u32));
        assert!(spec.circuit_length(8).is_err());
        assert!(spec.circuit_length(0).is_err());
    }

    #[test]
    fn smallest_map_length() {
        let spec = CoveringSpec::new(2, vec![lm(&[1, 1])]);
        assert_eq!(spec.circuit_length_u64(2).unwrap(), 4);
    }

    #[test]
    fn validation_examples() {
        let r = validate(&CoveringSpec::new(2, vec![lm(&[1, 1])]));
        assert!(r.valid);
        assert!(r.levels[0].cantor_warning);
        let r = validate(&CoveringSpec::new(2, vec![lm(&[0, 1])]));
        assert!(!r.valid);
        assert!(!r.levels[0].a0_positive);
        let r = validate(&CoveringSpec::new(2, vec![lm(&[1, 0, 1, 0, 1])]));
        assert!(r.valid);
        assert!(!r.levels[0].cantor_warning);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn telescope_prop55_keep_1_3() {
        let spec = prop55(4);
        let t = telescope(&spec, &[1, 3]).unwrap();
        assert_eq!(t.levels.len(), 1);
        let m = &t.levels[0];
        assert_eq!(m.b(), 8);
        assert_eq!(m.e_total(), BigUint::from(15u32));
        assert_eq!(t.circuit_length_u64(2).unwrap(), 31);
    }

    #[test]
    fn telescope_two_level_example() {
        let spec = CoveringSpec::new(2, vec![lm(&[1, 0, 1]), lm(&[1, 0, 1])]);
        let t = telescope(&spec, &[1, 3]).unwrap();
        assert_eq!(t.levels[0].e_total(), BigUint::from(6u32));
        assert_eq!(t.levels[0].b(), 4);
        assert_eq!(t.circuit_length_u64(2).unwrap(), 14);
        assert_eq!(spec.circuit_length_u64(3).unwrap(), 14);
    }

    #[test]
    fn telescope_identity_and_errors() {
        let spec = prop55(3);
        let all: Vec<usize> = (1..=spec.top()).collect();
        let t = telescope(&spec, &all).unwrap();
        assert_eq!(t.l1, spec.l1);
        assert_eq!(t.levels, spec.levels);
        assert!(telescope(&spec, &[]).is_err());
        assert!(telescope(&spec, &[2, 2]).is_err());
        assert!(telescope(&spec, &[3, 1]).is_err());
        assert!(telescope(&spec, &[1, 9]).is_err());
    }

    #[test]
    fn json_round_trip_and_restricted_input() {
        let js = r#"{"l1": 2, "levels": [{"a": [1,1,1], "b": 2},
            {"s": 1, "t": 2, "a_mid": "E", "t'": 2, "s'": 1}], "family": null}"#;
        let spec = CoveringSpec::from_json(js).unwrap();
        assert_eq!(spec.levels[1].a(), &[1, 0, 1, 0, 1]);
        let back = CoveringSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
        assert!(CoveringSpec::from_json(r#"{"l1": 2, "levels": [{"a": [1,1], "b": 2}]}"#).is_err());
    }

    #[test]
    fn counts() {
        let spec = prop55(4);
        assert_eq!(c_count(&spec, 3, 1).unwrap(), BigUint::from(8u32));
        assert_eq!(e_count(&spec, 3, 1).unwrap(), BigUint::from(15u32));
    }
}
