//! Finite seeds for points of the inverse limit and the array rows they determine.
//!
//! Time steps are edges and every level sees the same clock: an edge of `G_{n+1}`
//! covers exactly one edge of `G_n`. A seed fixes time 0 inside one traversal of
//! `c_N`, so it determines exactly the times `t` with `0 ≤ P + t < l_N`, where `P`
//! is the edge index of time 0 along that traversal.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::covering::CoveringSpec;
use crate::error::{Error, Result};
use crate::symbol::Symbol;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointSeed {
    pub base_level: usize,
    pub top_level: usize,
    /// Entry `i` picks the level-`(base + i)` block among the symbols of its parent's expansion.
    pub slot_path: Vec<u64>,
    /// Edge index of time 0 inside the base-level block.
    pub offset: u64,
}

/// The edge traversed at one level: the loop `e_n`, or the edge of `c_n` leaving offset `o`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LevelState {
    Loop,
    Circuit(u128),
}

impl LevelState {
    /// Start vertex; the center is 0.
    pub fn vertex(self) -> u128 {
        match self {
            LevelState::Loop => 0,
            LevelState::Circuit(o) => o,
        }
    }

    pub fn symbol(self) -> Symbol {
        match self {
            LevelState::Loop => Symbol::E,
            LevelState::Circuit(_) => Symbol::C,
        }
    }

    /// A cut falls before this edge exactly when it leaves the center.
    pub fn is_cut(self) -> bool {
        self.vertex() == 0
    }
}

/// Block tables for levels `base..=top`, shared by every seed with those bounds.
#[derive(Clone, Debug)]
pub struct Frame {
    base: usize,
    top: usize,
    /// `lens[i] = l_{base+i}`.
    lens: Vec<u128>,
    /// Per level `n = base+i < top`: start time of each `C` block in `φ_{n+1}(c_{n+1})`.
    c_starts: Vec<Vec<u128>>,
    /// Same blocks, as symbol indices.
    c_slots: Vec<Vec<u64>>,
    /// Symbol count of `φ_{n+1}(c_{n+1})`.
    widths: Vec<u64>,
}

impl Frame {
    pub fn new(spec: &CoveringSpec, base: usize, top: usize) -> Result<Self> {
        spec.check_circuit_level(base)?;
        spec.check_circuit_level(top)?;
        if base > top {
            return Err(Error::InvalidLevels { m: top, n: base, reason: "need base ≤ top".into() });
        }
        let mut lens = Vec::new();
        for n in base..=top {
            let l = spec.circuit_length(n)?;
            lens.push(l.to_u128().ok_or_else(|| Error::Overflow(format!("l_{n} = {l}")))?);
        }
        let mut c_starts = Vec::new();
        let mut c_slots = Vec::new();
        let mut widths = Vec::new();
        for n in base..top {
            let l_n = lens[n - base];
            let a = spec.level(n)?.a();
            let (mut t, mut slot) = (0u128, 0u64);
            let (mut starts, mut slots) = (Vec::new(), Vec::new());
            for (j, &x) in a.iter().enumerate() {
                if j > 0 {
                    starts.push(t);
                    slots.push(slot);
                    t += l_n;
                    slot += 1;
                }
                t += x as u128;
                slot += x;
            }
            c_starts.push(starts);
            c_slots.push(slots);
            widths.push(slot);
        }
        Ok(Frame { base, top, lens, c_starts, c_slots, widths })
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn len(&self, n: usize) -> u128 {
        self.lens[n - self.base]
    }

    /// Edge count of the top circuit, the number of determined positions.
    pub fn span(&self) -> u128 {
        self.len(self.top)
    }

    /// Level-`n` state under the level-`(n+1)` state `upper`.
    pub fn project(&self, n: usize, upper: LevelState) -> LevelState {
        match upper {
            LevelState::Loop => LevelState::Loop,
            LevelState::Circuit(o) => {
                let i = n - self.base;
                let starts = &self.c_starts[i];
                let k = starts.partition_point(|&s| s <= o);
                if k > 0 && o < starts[k - 1] + self.lens[i] {
                    LevelState::Circuit(o - starts[k - 1])
                } else {
                    LevelState::Loop
                }
            }
        }
    }

    /// States at levels `base..=top` for position `q` of the top circuit.
    pub fn states(&self, q: u128) -> Vec<LevelState> {
        debug_assert!(q < self.span());
        let mut out = vec![LevelState::Loop; self.top - self.base + 1];
        let mut cur = LevelState::Circuit(q);
        out[self.top - self.base] = cur;
        for n in (self.base..self.top).rev() {
            cur = self.project(n, cur);
            out[n - self.base] = cur;
        }
        out
    }

    fn check_seed(&self, seed: &PointSeed) -> Result<()> {
        if seed.base_level != self.base || seed.top_level != self.top {
            return Err(Error::InvalidSeed(format!(
                "seed spans levels {}..={}, frame spans {}..={}",
                seed.base_level, seed.top_level, self.base, self.top
            )));
        }
        if seed.slot_path.len() != self.top - self.base {
            return Err(Error::InvalidSeed(format!(
                "slot path has {} entries, expected {}",
                seed.slot_path.len(),
                self.top - self.base
            )));
        }
        Ok(())
    }

    /// Position `P` of time 0 along the top circuit.
    pub fn position(&self, seed: &PointSeed) -> Result<u128> {
        self.check_seed(seed)?;
        let mut p = 0u128;
        let mut on_c = true;
        for n in (self.base..self.top).rev() {
            let i = n - self.base;
            let slot = seed.slot_path[i];
            if !on_c {
                if slot != 0 {
                    return Err(Error::InvalidSeed(format!("level {n}: an E block has a single slot")));
                }
                continue;
            }
            if slot >= self.widths[i] {
                return Err(Error::InvalidSeed(format!(
                    "level {n}: slot {slot} outside 0..{}",
                    self.widths[i]
                )));
            }
            let slots = &self.c_slots[i];
            let k = slots.partition_point(|&s| s < slot);
            if k < slots.len() && slots[k] == slot {
                p += self.c_starts[i][k];
            } else {
                p += (slot - k as u64) as u128 + k as u128 * self.lens[i];
                on_c = false;
            }
        }
        let limit = if on_c { self.len(self.base) } else { 1 };
        if seed.offset as u128 >= limit {
            return Err(Error::InvalidSeed(format!("offset {} outside the base block", seed.offset)));
        }
        Ok(p + seed.offset as u128)
    }

    /// The seed placing time 0 at position `q` of the top circuit.
    pub fn seed_at(&self, q: u128) -> Result<PointSeed> {
        if q >= self.span() {
            return Err(Error::InvalidSeed(format!("position {q} outside 0..{}", self.span())));
        }
        let states = self.states(q);
        let mut slot_path = vec![0u64; self.top - self.base];
        for n in self.base..self.top {
            let i = n - self.base;
            let LevelState::Circuit(o) = states[i + 1] else { continue };
            slot_path[i] = match states[i] {
                LevelState::Circuit(_) => {
                    let k = self.c_starts[i].partition_point(|&s| s <= o) - 1;
                    self.c_slots[i][k]
                }
                LevelState::Loop => {
                    let k = self.c_starts[i].partition_point(|&s| s <= o) as u128;
                    (o - k * self.lens[i] + k) as u64
                }
            };
        }
        let offset = match states[0] {
            LevelState::Circuit(o) => o as u64,
            LevelState::Loop => 0,
        };
        Ok(PointSeed { base_level: self.base, top_level: self.top, slot_path, offset })
    }

    /// A uniformly random truncated path: each block picks a slot of its parent uniformly.
    pub fn random_path(&self, rng: &mut impl rand::Rng) -> PointSeed {
        let mut slot_path = vec![0u64; self.top - self.base];
        let mut on_c = true;
        for n in (self.base..self.top).rev() {
            let i = n - self.base;
            if on_c {
                let slot = rng.gen_range(0..self.widths[i]);
                slot_path[i] = slot;
                on_c = self.c_slots[i].binary_search(&slot).is_ok();
            }
        }
        let offset = if on_c { rng.gen_range(0..self.len(self.base)) as u64 } else { 0 };
        PointSeed { base_level: self.base, top_level: self.top, slot_path, offset }
    }

    /// States at time `t` of the orbit through `p`.
    pub fn states_at(&self, p: u128, t: i128) -> Result<Vec<LevelState>> {
        let q = p as i128 + t;
        if q < 0 || q as u128 >= self.span() {
            return Err(Error::WindowUndetermined(t));
        }
        Ok(self.states(q as u128))
    }

    /// Times `t` the seed determines, inclusive.
    pub fn determined(&self, p: u128) -> (i128, i128) {
        (-(p as i128), (self.span() - 1 - p) as i128)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayRow {
    pub level: usize,
    /// One `E`/`C` per time step.
    pub symbols: String,
    /// Start vertex of each edge.
    pub vertices: Vec<u128>,
    /// Times `t` with a cut immediately before `t`.
    pub cuts: Vec<i128>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayBlock {
    pub t0: i128,
    pub t1: i128,
    /// Ascending by level.
    pub rows: Vec<ArrayRow>,
}

impl ArrayBlock {
    /// One line per level, top level first; `|` marks a cut.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let width = self.rows.iter().map(|r| r.level.to_string().len()).max().unwrap_or(1);
        for row in self.rows.iter().rev() {
            out.push_str(&format!("{:>width$} ", row.level));
            for (i, ch) in row.symbols.chars().enumerate() {
                let t = self.t0 + i as i128;
                out.push(if row.cuts.binary_search(&t).is_ok() { '|' } else { ' ' });
                out.push(ch);
            }
            out.push('\n');
        }
        out
    }

    /// Every (n+1)-cut is an n-cut.
    pub fn cuts_nested(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].cuts.iter().all(|t| w[0].cuts.binary_search(t).is_ok()))
    }

    /// Row `n` is the projection of row `n + 1` under `frame`'s maps.
    pub fn projection_consistent(&self, frame: &Frame) -> bool {
        self.rows.windows(2).all(|w| {
            let (lo, hi) = (&w[0], &w[1]);
            hi.symbols.chars().zip(&hi.vertices).zip(lo.symbols.chars().zip(&lo.vertices)).all(
                |((hs, &hv), (ls, &lv))| {
                    let upper = if hs == 'E' { LevelState::Loop } else { LevelState::Circuit(hv) };
                    let want = frame.project(lo.level, upper);
                    let got = if ls == 'E' { LevelState::Loop } else { LevelState::Circuit(lv) };
                    want == got
                },
            )
        })
    }
}

/// Rows for levels `base..=top` of the seed over times `t0..=t1`.
pub fn array_block(spec: &CoveringSpec, seed: &PointSeed, t0: i128, t1: i128) -> Result<ArrayBlock> {
    if t0 > t1 {
        return Err(Error::Precondition("window start exceeds its end".into()));
    }
    let frame = Frame::new(spec, seed.base_level, seed.top_level)?;
    let p = frame.position(seed)?;
    let (lo, hi) = frame.determined(p);
    if t0 < lo {
        return Err(Error::WindowUndetermined(t0));
    }
    if t1 > hi {
        return Err(Error::WindowUndetermined(hi + 1));
    }
    let levels = frame.top() - frame.base() + 1;
    let mut rows: Vec<ArrayRow> = (0..levels)
        .map(|i| ArrayRow {
            level: frame.base() + i,
            symbols: String::new(),
            vertices: Vec::new(),
            cuts: Vec::new(),
        })
        .collect();
    for t in t0..=t1 {
        for (row, st) in rows.iter_mut().zip(frame.states_at(p, t)?) {
            row.symbols.push(st.symbol().as_char());
            row.vertices.push(st.vertex());
            if st.is_cut() {
                row.cuts.push(t);
            }
        }
    }
    Ok(ArrayBlock { t0, t1, rows })
}

/// Time 0 on the last `c_1` edge of `c_N`, so every later determined level-1 symbol is `E`.
pub fn stable_point(spec: &CoveringSpec, top: usize) -> Result<PointSeed> {
    extremal_point(spec, top, true)
}

/// Time 0 on the first `c_1` edge of `c_N`, so every earlier determined level-1 symbol is `E`.
pub fn unstable_point(spec: &CoveringSpec, top: usize) -> Result<PointSeed> {
    extremal_point(spec, top, false)
}

fn extremal_point(spec: &CoveringSpec, top: usize, last: bool) -> Result<PointSeed> {
    spec.check_circuit_level(top)?;
    if top < 2 {
        return Err(Error::LevelOutOfRange { level: top, min: 2, max: spec.top() });
    }
    let mut slot_path = Vec::with_capacity(top - 1);
    for n in 1..top {
        let a = spec.level(n)?.a();
        let width: u64 = a.iter().sum::<u64>() + (a.len() as u64 - 1);
        slot_path.push(if last { width - 1 - a[a.len() - 1] } else { a[0] });
    }
    let offset = if last { spec.l1 - 1 } else { 0 };
    Ok(PointSeed { base_level: 1, top_level: top, slot_path, offset })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::{gen_family, FamilyTag};
    use crate::dynamics::positional_row;
    use crate::expansion::{cumulative_runs, expand_vertex_walk};
    use crate::symbol::render_word;
    use proptest::prelude::*;

    fn prop55(depth: usize) -> CoveringSpec {
        gen_family(FamilyTag::Prop55, &serde_json::json!({ "depth": depth })).unwrap()
    }

    #[test]
    fn states_match_walks() {
        let spec = prop55(4);
        let frame = Frame::new(&spec, 1, 4).unwrap();
        for n in 1..=3 {
            let walk = expand_vertex_walk(&spec, 4, n, 1 << 20).unwrap().vertices;
            let row = positional_row(&spec, 4, n, 1 << 20).unwrap();
            for q in 0..frame.span() {
                let st = frame.states(q)[n - 1];
                assert_eq!(st.vertex(), walk[q as usize] as u128);
                assert_eq!(st.symbol(), row[q as usize]);
            }
        }
    }

    #[test]
    fn array_example() {
        let spec = prop55(3);
        // Level-2 block: first C slot of c_3 (index 1); level-1 block: second C slot of c_2 (index 3).
        let seed = PointSeed { base_level: 1, top_level: 3, slot_path: vec![3, 1], offset: 0 };
        let frame = Frame::new(&spec, 1, 3).unwrap();
        let p = frame.position(&seed).unwrap();
        assert_eq!(p, 1 + 4);
        let block = array_block(&spec, &seed, -2, 4).unwrap();
        let row1 = render_word(&positional_row(&spec, 3, 1, 1 << 20).unwrap());
        let lo = (p as i128 - 2) as usize;
        assert_eq!(block.rows[0].symbols, row1[lo..lo + 7]);
        assert_eq!(block.rows[0].symbols, "CECCEEC");
        assert_eq!(block.rows[0].cuts, vec![-1, 0, 2, 3, 4]);
        assert!(block.cuts_nested());
        assert!(block.projection_consistent(&frame));
        let text = block.render_text();
        assert_eq!(text.lines().last().unwrap(), "1  C|E|C C|E|E|C");
        assert!(matches!(array_block(&spec, &seed, -6, 0), Err(Error::WindowUndetermined(-6))));
    }

    #[test]
    fn seed_validation() {
        let spec = prop55(3);
        let frame = Frame::new(&spec, 1, 3).unwrap();
        let bad = |slot_path: Vec<u64>, offset| PointSeed { base_level: 1, top_level: 3, slot_path, offset };
        assert!(frame.position(&bad(vec![0, 7], 0)).is_err());
        assert!(frame.position(&bad(vec![1, 0], 0)).is_err());
        assert!(frame.position(&bad(vec![1, 1], 2)).is_err());
        assert!(frame.position(&bad(vec![0, 0], 1)).is_err());
        assert!(frame.position(&bad(vec![0], 0)).is_err());
        assert_eq!(frame.position(&bad(vec![0, 0], 0)).unwrap(), 0);
    }

    #[test]
    fn stable_and_unstable_examples() {
        let spec = prop55(5);
        for top in 2..=6 {
            let frame = Frame::new(&spec, 1, top).unwrap();
            let walk = expand_vertex_walk(&spec, top, 1, 1 << 20).unwrap().vertices;
            let on_c: Vec<usize> = (0..walk.len() - 1).filter(|&i| !(walk[i] == 0 && walk[i + 1] == 0)).collect();
            let st = frame.position(&stable_point(&spec, top).unwrap()).unwrap();
            let un = frame.position(&unstable_point(&spec, top).unwrap()).unwrap();
            assert_eq!(st as usize, *on_c.last().unwrap());
            assert_eq!(un as usize, on_c[0]);
            let s = cumulative_runs(&spec, top - 1, 1).unwrap().s;
            assert_eq!(num_bigint::BigUint::from(un), s);
            assert_ne!(stable_point(&spec, top).unwrap(), unstable_point(&spec, top).unwrap());
        }
        assert_eq!(frame_pos(&spec, 2, &stable_point(&spec, 2).unwrap()), 5);
    }

    fn frame_pos(spec: &CoveringSpec, top: usize, seed: &PointSeed) -> u128 {
        Frame::new(spec, 1, top).unwrap().position(seed).unwrap()
    }

    #[test]
    fn stable_tail_is_blank() {
        let spec = gen_family(FamilyTag::Mixing, &serde_json::json!({"depth": 3})).unwrap();
        let seed = stable_point(&spec, 4).unwrap();
        let frame = Frame::new(&spec, 1, 4).unwrap();
        let p = frame.position(&seed).unwrap();
        let (_, hi) = frame.determined(p);
        assert_eq!(frame.states_at(p, 0).unwrap()[0].symbol(), Symbol::C);
        for t in 1..=hi {
            assert_eq!(frame.states_at(p, t).unwrap()[0], LevelState::Loop);
        }
        let useed = unstable_point(&spec, 4).unwrap();
        let pu = frame.position(&useed).unwrap();
        for t in frame.determined(pu).0..0 {
            assert_eq!(frame.states_at(pu, t).unwrap()[0], LevelState::Loop);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn seed_position_round_trip(q in 0u128..2047, t0 in -20i128..0, w in 0i128..20) {
            let spec = prop55(5);
            let frame = Frame::new(&spec, 1, 6).unwrap();
            let seed = frame.seed_at(q).unwrap();
            prop_assert_eq!(frame.position(&seed).unwrap(), q);
            let (lo, hi) = frame.determined(q);
            let (a, b) = (t0.max(lo), (t0 + w).min(hi - 1));
            if a <= b {
                let block = array_block(&spec, &seed, a, b).unwrap();
                prop_assert!(block.cuts_nested());
                prop_assert!(block.projection_consistent(&frame));
                let next = frame.seed_at(q + 1).unwrap();
                let shifted = array_block(&spec, &next, a - 1, b - 1).unwrap();
                prop_assert_eq!(&shifted.rows.iter().map(|r| r.symbols.clone()).collect::<Vec<_>>(),
                                &block.rows.iter().map(|r| r.symbols.clone()).collect::<Vec<_>>());
                prop_assert_eq!(shifted.rows[0].vertices.clone(), block.rows[0].vertices.clone());
            }
        }
    }
}
