//! Substitutions on finite alphabets and the factor languages of their fixed words.
//!
//! Languages are never read off a materialized infinite word: each letter keeps a
//! compressed factor profile of `σ^k(a)`, and `σ^{k+1}(a)` is profiled by
//! concatenating the profiles of the letters of `σ(a)`.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::covering::CoveringSpec;
use crate::error::{Error, Result};
use crate::window::{Compressed, FactorCollector};

/// Iteration depth after which a factor language search gives up.
pub const MAX_ITERATIONS: usize = 96;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<char, String>,
}

impl Substitution {
    /// Alphabet is the key set; every image is nonempty and over the alphabet.
    pub fn new(map: BTreeMap<char, String>) -> Result<Self> {
        if map.is_empty() {
            return Err(Error::InvalidSubstitution("empty alphabet".into()));
        }
        for (a, img) in &map {
            if img.is_empty() {
                return Err(Error::InvalidSubstitution(format!("image of {a:?} is empty")));
            }
            if let Some(bad) = img.chars().find(|c| !map.contains_key(c)) {
                return Err(Error::InvalidSubstitution(format!("image of {a:?} uses foreign letter {bad:?}")));
            }
        }
        Ok(Substitution { map })
    }

    pub fn from_pairs(pairs: &[(char, &str)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(a, w)| (a, w.to_string())).collect())
    }

    /// `{"0": "001", "1": "1"}`.
    pub fn from_json(s: &str) -> Result<Self> {
        let raw: BTreeMap<String, String> = serde_json::from_str(s)?;
        let mut map = BTreeMap::new();
        for (k, v) in raw {
            let mut chars = k.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => {
                    map.insert(c, v);
                }
                _ => return Err(Error::InvalidSubstitution(format!("key {k:?} is not a single letter"))),
            }
        }
        Self::new(map)
    }

    pub fn to_json(&self) -> String {
        let raw: BTreeMap<String, &String> = self.map.iter().map(|(k, v)| (k.to_string(), v)).collect();
        serde_json::to_string(&raw).expect("string map serializes")
    }

    pub fn alphabet(&self) -> Vec<char> {
        self.map.keys().copied().collect()
    }

    pub fn image(&self, a: char) -> Result<&str> {
        self.map.get(&a).map(String::as_str).ok_or(Error::ForeignLetter(a))
    }

    pub fn apply(&self, word: &str) -> Result<String> {
        let mut out = String::new();
        for c in word.chars() {
            out.push_str(self.image(c)?);
        }
        Ok(out)
    }

    /// `|σ^k(w)|`, exactly.
    pub fn iterate_len(&self, word: &str, k: usize) -> Result<BigUint> {
        let letters = self.alphabet();
        let idx = |c: char| letters.iter().position(|&x| x == c).ok_or(Error::ForeignLetter(c));
        let mut counts = vec![BigUint::from(0u32); letters.len()];
        for c in word.chars() {
            counts[idx(c)?] += 1u32;
        }
        for _ in 0..k {
            let mut next = vec![BigUint::from(0u32); letters.len()];
            for (i, &a) in letters.iter().enumerate() {
                for c in self.map[&a].chars() {
                    next[idx(c)?] += &counts[i];
                }
            }
            counts = next;
        }
        Ok(counts.into_iter().sum())
    }

    /// `σ^k(word)`, refused when longer than `cap`.
    pub fn iterate_word(&self, word: &str, k: usize, cap: u64) -> Result<String> {
        let len = self.iterate_len(word, k)?;
        if len > BigUint::from(cap) {
            return Err(Error::too_large(len, cap));
        }
        let mut w = word.to_string();
        for _ in 0..k {
            w = self.apply(&w)?;
        }
        Ok(w)
    }

    pub fn iterate(&self, letter: char, k: usize, cap: u64) -> Result<String> {
        self.image(letter)?;
        self.iterate_word(&letter.to_string(), k, cap)
    }

    /// `a ↦ b, b ↦ a` on a two-letter alphabet, everything else fixed.
    pub fn swap(a: char, b: char) -> Self {
        Substitution { map: [(a, b.to_string()), (b, a.to_string())].into_iter().collect() }
    }
}

/// `0 ↦ 001, 1 ↦ 1`.
pub fn tau() -> Substitution {
    Substitution::from_pairs(&[('0', "001"), ('1', "1")]).expect("valid")
}

/// `τ²`: `0 ↦ 0010011, 1 ↦ 1`.
pub fn alpha() -> Substitution {
    Substitution::from_pairs(&[('0', "0010011"), ('1', "1")]).expect("valid")
}

/// `0 ↦ 1001001, 1 ↦ 1`.
pub fn beta() -> Substitution {
    Substitution::from_pairs(&[('0', "1001001"), ('1', "1")]).expect("valid")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorLanguage {
    pub len: usize,
    pub seed: char,
    /// Sorted.
    pub factors: Vec<String>,
    /// First `k` with the union over `1..=k` equal to the union over `1..=k+1`.
    pub stabilized_at: usize,
}

impl FactorLanguage {
    pub fn to_text(&self) -> String {
        self.factors.iter().map(|f| format!("{f}\n")).collect()
    }
}

/// Union of the length-`len` factors of `σ^k(seed)`, `k = 1, 2, ...`, until two consecutive unions agree.
///
/// An empty union never counts as stable while `|σ^k(seed)|` still grows.
pub fn factor_language(sub: &Substitution, seed: char, len: usize) -> Result<FactorLanguage> {
    sub.image(seed)?;
    let letters = sub.alphabet();
    let code = |c: char| letters.iter().position(|&x| x == c).expect("checked alphabet") as u32;
    let fresh = || FactorCollector::new(len, letters.len());
    let proto = fresh()?;
    // profiles[i] summarizes σ^k(letters[i]).
    let mut profiles: Vec<Compressed<FactorCollector>> =
        letters.iter().map(|&c| Compressed::from_word(&[code(c)], proto.clone())).collect();
    let seed_i = code(seed) as usize;
    let mut union: HashSet<u64> = HashSet::new();
    let mut prev_len = 1u128;
    for k in 1..=MAX_ITERATIONS {
        let mut next = Vec::with_capacity(letters.len());
        for &a in &letters {
            let mut acc = Compressed::empty(proto.clone());
            for c in sub.image(a)?.chars() {
                let p = &profiles[code(c) as usize];
                acc.len.checked_add(p.len).ok_or_else(|| Error::Overflow("iterate length".into()))?;
                acc = acc.concat(p);
            }
            next.push(acc);
        }
        profiles = next;
        let seed_prof = &profiles[seed_i];
        let grew = seed_prof.len > prev_len;
        prev_len = seed_prof.len;
        let before = union.len();
        union.extend(seed_prof.collector.factors.iter().copied());
        if k > 1 && union.len() == before && (!union.is_empty() || !grew) {
            let mut factors: Vec<String> = union
                .iter()
                .map(|&c| proto.unpack(c).into_iter().map(|i| letters[i as usize]).collect())
                .collect();
            factors.sort();
            return Ok(FactorLanguage { len, seed, factors, stabilized_at: k - 1 });
        }
    }
    Err(Error::too_large(format!("more than {MAX_ITERATIONS} iterations"), MAX_ITERATIONS as u64))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageComparison {
    pub len: usize,
    pub equal: bool,
    pub depth_a: usize,
    pub depth_b: usize,
    pub only_a: Vec<String>,
    pub only_b: Vec<String>,
}

pub fn languages_equal(a: &Substitution, seed_a: char, b: &Substitution, seed_b: char, len: usize) -> Result<LanguageComparison> {
    let la = factor_language(a, seed_a, len)?;
    let lb = factor_language(b, seed_b, len)?;
    Ok(compare(len, &la.factors, &lb.factors, la.stabilized_at, lb.stabilized_at))
}

fn compare(len: usize, a: &[String], b: &[String], depth_a: usize, depth_b: usize) -> LanguageComparison {
    let only_a: Vec<String> = a.iter().filter(|w| b.binary_search(w).is_err()).cloned().collect();
    let only_b: Vec<String> = b.iter().filter(|w| a.binary_search(w).is_err()).cloned().collect();
    LanguageComparison { len, equal: only_a.is_empty() && only_b.is_empty(), depth_a, depth_b, only_a, only_b }
}

/// `a(b(x)) = b(a(x))` for every letter; substitutions on different alphabets never commute.
pub fn commute_check(a: &Substitution, b: &Substitution) -> bool {
    a.alphabet() == b.alphabet()
        && a.alphabet().into_iter().all(|x| {
            let ab = b.image(x).and_then(|w| a.apply(w));
            let ba = a.image(x).and_then(|w| b.apply(w));
            matches!((ab, ba), (Ok(p), Ok(q)) if p == q)
        })
}

/// `α^k(1^l 0) = β^k(1^{l-k} 0 1^k)` as literal words.
pub fn conjugation_identity(k: usize, l: usize, cap: u64) -> Result<bool> {
    if k < 1 || l <= k {
        return Err(Error::Precondition(format!("need l > k ≥ 1, got k = {k}, l = {l}")));
    }
    let lhs = alpha().iterate_word(&format!("{}0", "1".repeat(l)), k, cap)?;
    let rhs = beta().iterate_word(&format!("{}0{}", "1".repeat(l - k), "1".repeat(k)), k, cap)?;
    Ok(lhs == rhs)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgeReport {
    pub len: usize,
    pub covering_level: usize,
    pub covering_stabilized_at: Option<usize>,
    pub comparison: LanguageComparison,
}

/// Level-1 row language of `spec` with `E ↦ 1`, `C ↦ 0`, against `factor_language(β, '0', len)`.
pub fn prop55_bridge_with(spec: &CoveringSpec, len: usize, stabilize_window: usize) -> Result<BridgeReport> {
    let cov = crate::dynamics::language(spec, 1, len, stabilize_window)?;
    if !cov.stable {
        return Err(Error::too_large("an unstabilized covering language", crate::dynamics::MAX_AUTO_DEPTH as u64));
    }
    let mut mapped: Vec<String> =
        cov.words.iter().map(|w| w.chars().map(|c| if c == 'E' { '1' } else { '0' }).collect()).collect();
    mapped.sort();
    let sub = factor_language(&beta(), '0', len)?;
    let comparison = compare(len, &mapped, &sub.factors, cov.stabilized_at.unwrap_or(0), sub.stabilized_at);
    Ok(BridgeReport { len, covering_level: 1, covering_stabilized_at: cov.stabilized_at, comparison })
}

/// The bridge on the worked example's covering.
pub fn prop55_bridge(len: usize) -> Result<BridgeReport> {
    prop55_bridge_with(&crate::covering::prop55(8), len, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::prop55;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn brute(sub: &Substitution, seed: char, len: usize, k: usize) -> Vec<String> {
        let mut set = BTreeSet::new();
        for j in 1..=k {
            let w: Vec<char> = sub.iterate(seed, j, 1 << 24).unwrap().chars().collect();
            for win in w.windows(len) {
                set.insert(win.iter().collect::<String>());
            }
        }
        set.into_iter().collect()
    }

    #[test]
    fn apply_examples() {
        assert_eq!(tau().apply("0").unwrap(), "001");
        assert_eq!(tau().apply(&tau().apply("0").unwrap()).unwrap(), "0010011");
        assert_eq!(tau().apply("0").and_then(|w| tau().apply(&w)).unwrap(), alpha().image('0').unwrap());
        assert_eq!(beta().apply("").unwrap(), "");
        assert_eq!(tau().apply("02"), Err(Error::ForeignLetter('2')));
    }

    #[test]
    fn iterate_examples() {
        for k in 0..6 {
            assert_eq!(alpha().iterate('1', k, 100).unwrap(), "1");
        }
        assert_eq!(beta().iterate('0', 2, 100).unwrap().len(), 31);
        assert_eq!(beta().iterate('0', 0, 100).unwrap(), "0");
        assert!(matches!(beta().iterate('0', 12, 1000), Err(Error::ExpansionTooLarge { .. })));
        assert_eq!(beta().iterate_len("0", 40).unwrap(), prop55(40).circuit_length(41).unwrap());
    }

    #[test]
    fn length_tracks_circuits() {
        let spec = prop55(8);
        for k in 1..=7 {
            assert_eq!(beta().iterate_len("0", k).unwrap(), spec.circuit_length(k + 1).unwrap());
        }
        // The base circuit has two edges while β⁰(0) = "0" has one letter.
        assert_ne!(beta().iterate_len("0", 0).unwrap(), spec.circuit_length(1).unwrap());
    }

    #[test]
    fn language_examples() {
        assert_eq!(factor_language(&alpha(), '0', 1).unwrap().factors, vec!["0", "1"]);
        assert_eq!(factor_language(&alpha(), '0', 2).unwrap().factors, vec!["00", "01", "10", "11"]);
        for len in [3, 6, 10] {
            let l = factor_language(&alpha(), '0', len).unwrap();
            assert_eq!(l.factors, brute(&alpha(), '0', len, l.stabilized_at + 2), "L = {len}");
        }
    }

    #[test]
    fn equality_examples() {
        for len in [1, 5, 12] {
            assert!(languages_equal(&alpha(), '0', &beta(), '0', len).unwrap().equal);
            assert!(languages_equal(&alpha(), '0', &tau(), '0', len).unwrap().equal);
        }
        let id = Substitution::from_pairs(&[('0', "0"), ('1', "1")]).unwrap();
        let c = languages_equal(&alpha(), '0', &id, '0', 2).unwrap();
        assert!(!c.equal);
        assert!(c.only_b.is_empty());
        assert_eq!(c.only_a.len(), 4);
    }

    #[test]
    fn commute_examples() {
        assert!(commute_check(&alpha(), &beta()));
        assert!(commute_check(&alpha(), &alpha()));
        assert!(!commute_check(&alpha(), &Substitution::swap('0', '1')));
        let other = Substitution::from_pairs(&[('a', "ab"), ('b', "a")]).unwrap();
        assert!(!commute_check(&alpha(), &other));
    }

    #[test]
    fn conjugation_examples() {
        assert_eq!(alpha().apply("110").unwrap(), "110010011");
        assert_eq!(beta().apply("101").unwrap(), "110010011");
        assert!(conjugation_identity(1, 2, 1 << 20).unwrap());
        assert!(conjugation_identity(3, 5, 1 << 20).unwrap());
        assert!(conjugation_identity(2, 2, 1 << 20).is_err());
    }

    #[test]
    fn bridge_examples() {
        let r = prop55_bridge(1).unwrap();
        assert!(r.comparison.equal);
        let r = prop55_bridge(7).unwrap();
        assert!(r.comparison.equal);
        let l = factor_language(&beta(), '0', 7).unwrap();
        assert!(l.factors.contains(&"1001001".to_string()));
    }

    #[test]
    fn json_round_trip() {
        let s = Substitution::from_json(r#"{"0": "001", "1": "1"}"#).unwrap();
        assert_eq!(s, tau());
        assert_eq!(Substitution::from_json(&s.to_json()).unwrap(), s);
        assert!(Substitution::from_json(r#"{"0": "002"}"#).is_err());
        assert!(Substitution::from_json(r#"{"01": "0"}"#).is_err());
        assert!(Substitution::from_json(r#"{"0": ""}"#).is_err());
    }

    proptest! {
        #[test]
        fn commuting_powers_agree(a in 0usize..3, b in 0usize..3, w in "[01]{0,6}") {
            let lhs = alpha().iterate_word(&beta().iterate_word(&w, a, 1 << 22).unwrap(), b, 1 << 22).unwrap();
            let rhs = beta().iterate_word(&alpha().iterate_word(&w, b, 1 << 22).unwrap(), a, 1 << 22).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn language_monotone(len in 1usize..10) {
            let l = factor_language(&beta(), '0', len).unwrap();
            let shallow = brute(&beta(), '0', len, l.stabilized_at);
            prop_assert!(shallow.iter().all(|w| l.factors.binary_search(w).is_ok()));
        }
    }
}
