use num_bigint::BigUint;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::symbol::{parse_word, render_word, Symbol};

/// `φ_{n+1}(c_{n+1}) = e^{a(0)} ∏_{j=1..b} (c e^{a(j)})`; always `a.len() = b + 1 ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LevelMap {
    a: Vec<u64>,
}

impl LevelMap {
    pub fn new(a: Vec<u64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidSpec("level map needs at least one e-run".into()));
        }
        Ok(LevelMap { a })
    }

    pub fn from_word(word: &[Symbol]) -> Self {
        let mut rb = RunBuilder::default();
        for &s in word {
            match s {
                Symbol::E => rb.push_e(1),
                Symbol::C => rb.push_c(),
            }
        }
        rb.finish()
    }

    pub fn a(&self) -> &[u64] {
        &self.a
    }

    pub fn b(&self) -> u64 {
        (self.a.len() - 1) as u64
    }

    pub fn e_total(&self) -> BigUint {
        self.a.iter().map(|&x| BigUint::from(x)).sum()
    }

    /// Traversal count `Σa + b`.
    pub fn symbol_count(&self) -> BigUint {
        self.e_total() + BigUint::from(self.b())
    }

    pub fn next_length(&self, l: &BigUint) -> BigUint {
        self.e_total() + l * BigUint::from(self.b())
    }

    pub fn to_word(&self) -> Vec<Symbol> {
        let mut w = Vec::new();
        for (j, &x) in self.a.iter().enumerate() {
            if j > 0 {
                w.push(Symbol::C);
            }
            w.extend(std::iter::repeat(Symbol::E).take(x as usize));
        }
        w
    }

    /// `self ∘ lower`: each `C` of `self` is replaced by the word of `lower`.
    pub fn compose_over(&self, lower: &LevelMap) -> LevelMap {
        let mut rb = RunBuilder::default();
        for (j, &x) in self.a.iter().enumerate() {
            if j > 0 {
                rb.push_e(lower.a[0]);
                for &y in &lower.a[1..] {
                    rb.push_c();
                    rb.push_e(y);
                }
            }
            rb.push_e(x);
        }
        rb.finish()
    }

    /// Canonical split `e^s c^t a_mid c^{t'} e^{s'}` with `t, t' ≥ 1`: the outer
    /// `C`-runs are maximal, and an `E`-free middle is split as evenly as possible.
    pub fn decompose(&self) -> Option<RestrictedForm> {
        let b = self.a.len() - 1;
        if b < 2 {
            return None;
        }
        let a = &self.a;
        let inner_all_zero = a[1..b].iter().all(|&x| x == 0);
        let (t, tp) = if inner_all_zero {
            (b.div_ceil(2), b / 2)
        } else {
            let lead = a[1..b].iter().take_while(|&&x| x == 0).count();
            let trail = a[1..b].iter().rev().take_while(|&&x| x == 0).count();
            (lead + 1, trail + 1)
        };
        Some(RestrictedForm {
            s: a[0],
            t: t as u64,
            mid: a[t..=b - tp].to_vec(),
            t_prime: tp as u64,
            s_prime: a[b],
        })
    }

    /// Decomposition when the map lies in the restricted class (`t, t' ≥ 2`, `s, s' ≥ 1`).
    pub fn restricted(&self) -> Option<RestrictedForm> {
        self.decompose().filter(|r| r.in_class())
    }
}

impl Serialize for LevelMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("LevelMap", 2)?;
        st.serialize_field("a", &self.a)?;
        st.serialize_field("b", &self.b())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for LevelMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            General {
                a: Vec<u64>,
                b: u64,
            },
            Restricted {
                s: u64,
                t: u64,
                a_mid: String,
                #[serde(rename = "t'")]
                t_prime: u64,
                #[serde(rename = "s'")]
                s_prime: u64,
            },
        }
        match Raw::deserialize(d)? {
            Raw::General { a, b } => {
                if a.len() as u64 != b + 1 {
                    return Err(serde::de::Error::custom(format!(
                        "level map has {} e-runs but b = {b}",
                        a.len()
                    )));
                }
                LevelMap::new(a).map_err(serde::de::Error::custom)
            }
            Raw::Restricted { s, t, a_mid, t_prime, s_prime } => {
                if t == 0 || t_prime == 0 {
                    return Err(serde::de::Error::custom("t and t' must be positive"));
                }
                let mid_word = parse_word(&a_mid).map_err(serde::de::Error::custom)?;
                let r = RestrictedForm { s, t, mid: mid_runs(&mid_word), t_prime, s_prime };
                Ok(r.to_level_map())
            }
        }
    }
}

/// `e^s c^t a_mid c^{t'} e^{s'}`; `mid` holds the `E`-runs of `a_mid`, one more than its `C` count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedForm {
    pub s: u64,
    pub t: u64,
    pub mid: Vec<u64>,
    pub t_prime: u64,
    pub s_prime: u64,
}

impl RestrictedForm {
    pub fn in_class(&self) -> bool {
        self.t >= 2 && self.t_prime >= 2 && self.s >= 1 && self.s_prime >= 1
    }

    pub fn to_level_map(&self) -> LevelMap {
        let mut rb = RunBuilder::default();
        rb.push_e(self.s);
        for _ in 0..self.t {
            rb.push_c();
        }
        for (i, &x) in self.mid.iter().enumerate() {
            if i > 0 {
                rb.push_c();
            }
            rb.push_e(x);
        }
        for _ in 0..self.t_prime {
            rb.push_c();
        }
        rb.push_e(self.s_prime);
        rb.finish()
    }

    pub fn a_mid_word(&self) -> Vec<Symbol> {
        LevelMap { a: self.mid.clone() }.to_word()
    }

    pub fn a_mid_string(&self) -> String {
        render_word(&self.a_mid_word())
    }

    /// `s''`: number of `E` in `a_mid`.
    pub fn s2(&self) -> u64 {
        self.mid.iter().sum()
    }

    /// `t''`: number of `C` in `a_mid`.
    pub fn t2(&self) -> u64 {
        (self.mid.len() - 1) as u64
    }

    pub fn s_bar(&self) -> u64 {
        self.s + self.s_prime + self.s2()
    }

    pub fn t_bar(&self) -> u64 {
        self.t + self.t_prime + self.t2()
    }
}

fn mid_runs(word: &[Symbol]) -> Vec<u64> {
    let mut runs = vec![0u64];
    for &s in word {
        match s {
            Symbol::E => *runs.last_mut().unwrap() += 1,
            Symbol::C => runs.push(0),
        }
    }
    runs
}

/// Accumulates a traversal word as merged `E`-runs between single `C`s.
#[derive(Default, Debug, Clone)]
pub struct RunBuilder {
    a: Vec<u64>,
}

impl RunBuilder {
    pub fn push_e(&mut self, count: u64) {
        match self.a.last_mut() {
            Some(x) => *x += count,
            None => self.a.push(count),
        }
    }

    pub fn push_c(&mut self) {
        if self.a.is_empty() {
            self.a.push(0);
        }
        self.a.push(0);
    }

    pub fn finish(mut self) -> LevelMap {
        if self.a.is_empty() {
            self.a.push(0);
        }
        LevelMap { a: self.a }
    }
}
