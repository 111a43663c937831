//! Ordered Bratteli diagrams for rank-2 proximal coverings.
//!
//! Diagram level `n ≥ 1` holds one vertex per circuit of `G_n`; vertex 0 is `e_n`
//! and vertex 1 is `c_n` in diagrams built here. Edges into `c_{n+1}` are the
//! symbols of `φ_{n+1}(c_{n+1})` in order, so ordinal `j` is symbol `j-1`. An edge
//! in `E_n` runs from `V_{n-1}` to `V_n`; `V_0` is the root.

use serde::{Deserialize, Serialize};

use crate::covering::{CoveringSpec, LevelMap};
use crate::dynamics::PointSeed;
use crate::error::{Error, Result};
use crate::symbol::Symbol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    /// The edge lies in `E_lvl`, from `V_{lvl-1}` to `V_lvl`.
    pub lvl: usize,
    pub src: usize,
    pub dst: usize,
    /// Position among the edges into `dst`, from 1.
    pub ord: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderedBratteliDiagram {
    /// Vertex names per level; `levels[0]` is the root alone.
    pub levels: Vec<Vec<String>>,
    /// Sorted by `(lvl, dst, ord)`.
    pub edges: Vec<Edge>,
    /// Top vertex through which the infinite maximal path, equal to the minimal one, is known to pass.
    #[serde(default)]
    pub max_certified: Option<usize>,
}

/// `incoming[n][v]`: edges into vertex `v` of level `n`, indexed by `ord - 1`.
type Incoming = Vec<Vec<Vec<Edge>>>;

impl OrderedBratteliDiagram {
    /// Number of levels below the root.
    pub fn depth(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    fn sort_edges(&mut self) {
        self.edges.sort_by_key(|e| (e.lvl, e.dst, e.ord, e.src));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagram serializes")
    }

    /// Parses and normalizes edge order; the structure must index consistently.
    pub fn from_json(s: &str) -> Result<Self> {
        let mut d: OrderedBratteliDiagram = serde_json::from_str(s)?;
        d.sort_edges();
        let problems = d.structure_problems();
        if let Some(p) = problems.first() {
            return Err(Error::InvalidDiagram(p.clone()));
        }
        Ok(d)
    }

    fn structure_problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.levels.first().map(Vec::len) != Some(1) {
            out.push("V_0 must be a single vertex".into());
            return out;
        }
        for (n, vs) in self.levels.iter().enumerate().skip(1) {
            if vs.is_empty() {
                out.push(format!("V_{n} is empty"));
            }
        }
        for e in &self.edges {
            if e.lvl == 0 || e.lvl > self.depth() {
                out.push(format!("edge {e:?}: level outside 1..={}", self.depth()));
            } else if e.src >= self.levels[e.lvl - 1].len() || e.dst >= self.levels[e.lvl].len() {
                out.push(format!("edge {e:?}: vertex index out of range"));
            }
        }
        if !out.is_empty() {
            return out;
        }
        let inc = self.group();
        let mut has_out: Vec<Vec<bool>> = self.levels.iter().map(|vs| vec![false; vs.len()]).collect();
        for e in &self.edges {
            has_out[e.lvl - 1][e.src] = true;
        }
        for n in 1..=self.depth() {
            for (v, ins) in inc[n].iter().enumerate() {
                if ins.is_empty() {
                    out.push(format!("vertex {v} of level {n} has no incoming edge"));
                }
                if ins.iter().enumerate().any(|(i, e)| e.ord != i as u64 + 1) {
                    out.push(format!("ordinals into vertex {v} of level {n} are not 1..{}", ins.len()));
                }
            }
        }
        for n in 0..self.depth() {
            for (v, &o) in has_out[n].iter().enumerate() {
                if !o {
                    out.push(format!("vertex {v} of level {n} has no outgoing edge"));
                }
            }
        }
        out
    }

    fn group(&self) -> Incoming {
        let mut inc: Incoming = self.levels.iter().map(|vs| vec![Vec::new(); vs.len()]).collect();
        for e in &self.edges {
            inc[e.lvl][e.dst].push(*e);
        }
        for lvl in &mut inc {
            for ins in lvl {
                ins.sort_by_key(|e| e.ord);
            }
        }
        inc
    }

    fn incoming(&self) -> Result<Incoming> {
        match self.structure_problems().into_iter().next() {
            Some(p) => Err(Error::InvalidDiagram(p)),
            None => Ok(self.group()),
        }
    }
}

/// The diagram of levels `1..=depth`, extending a family spec when `depth` exceeds its top.
pub fn covering_to_diagram(spec: &CoveringSpec, depth: usize) -> Result<OrderedBratteliDiagram> {
    let spec = spec.extended_to(depth.saturating_sub(1))?;
    if depth > 0 {
        spec.check_circuit_level(depth)?;
    }
    let mut levels = vec![vec!["root".to_string()]];
    let mut edges = Vec::new();
    for n in 1..=depth {
        levels.push(vec![format!("e{n}"), format!("c{n}")]);
        edges.push(Edge { lvl: n, src: 0, dst: 0, ord: 1 });
        let sources: Vec<usize> = if n == 1 {
            vec![0; spec.l1 as usize]
        } else {
            let word = spec.level(n - 1)?.to_word();
            word.into_iter().map(|s| if s == Symbol::E { 0 } else { 1 }).collect()
        };
        for (j, src) in sources.into_iter().enumerate() {
            edges.push(Edge { lvl: n, src, dst: 1, ord: j as u64 + 1 });
        }
    }
    let mut d = OrderedBratteliDiagram { levels, edges, max_certified: (depth > 0).then_some(0) };
    d.sort_edges();
    Ok(d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extremity {
    Min,
    Max,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedFailure {
    pub level: usize,
    pub vertex: usize,
    pub extremity: Extremity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramReport {
    pub depth: usize,
    /// `#V_n` for `n = 1..=depth`.
    pub ranks: Vec<usize>,
    pub structure: Vec<String>,
    /// Lowest level at which the minimal paths to the top vertices disagree.
    pub min_split: Option<usize>,
    pub max_split: Option<usize>,
    /// Checked only at levels whose extremal vertex below is already pinned down.
    pub reduced_failures: Vec<ReducedFailure>,
    /// The unique minimal and maximal prefixes coincide.
    pub proximal: bool,
    /// Some level past the root has a single vertex.
    pub degenerate_rank1: bool,
    pub pass: bool,
}

/// Edges of the extremal path ending at `v` on level `n`, bottom first.
fn extremal_path(inc: &Incoming, n: usize, v: usize, ext: Extremity) -> Vec<Edge> {
    let mut out = Vec::with_capacity(n);
    let mut v = v;
    for k in (1..=n).rev() {
        let ins = &inc[k][v];
        let e = match ext {
            Extremity::Min => ins[0],
            Extremity::Max => ins[ins.len() - 1],
        };
        out.push(e);
        v = e.src;
    }
    out.reverse();
    out
}

/// The first disagreeing level among extremal paths to the top vertices, and the agreed prefix below it.
fn extremal_prefix(inc: &Incoming, depth: usize, ext: Extremity) -> (Option<usize>, Vec<Edge>) {
    let paths: Vec<Vec<Edge>> = (0..inc[depth].len()).map(|v| extremal_path(inc, depth, v, ext)).collect();
    let mut prefix = Vec::new();
    for k in 0..depth.saturating_sub(1) {
        let e = paths[0][k];
        if paths.iter().any(|p| p[k] != e) {
            return (Some(k + 1), prefix);
        }
        prefix.push(e);
    }
    (None, prefix)
}

/// Checks essential simplicity, reduced form and proximality as far as the presented levels allow.
pub fn validate_diagram(d: &OrderedBratteliDiagram) -> DiagramReport {
    let depth = d.depth();
    let ranks: Vec<usize> = d.levels.iter().skip(1).map(Vec::len).collect();
    let degenerate_rank1 = ranks.iter().any(|&r| r == 1);
    let structure = d.structure_problems();
    if !structure.is_empty() || depth == 0 {
        let pass = structure.is_empty() && depth == 0;
        return DiagramReport {
            depth,
            ranks,
            structure,
            min_split: None,
            max_split: None,
            reduced_failures: Vec::new(),
            proximal: pass,
            degenerate_rank1,
            pass,
        };
    }
    let inc = d.group();
    let (min_split, min_prefix) = extremal_prefix(&inc, depth, Extremity::Min);
    let (max_split, max_prefix) = extremal_prefix(&inc, depth, Extremity::Max);
    let mut reduced_failures = Vec::new();
    for (ext, prefix) in [(Extremity::Min, &min_prefix), (Extremity::Max, &max_prefix)] {
        // Level n needs the extremal vertex of level n-1, pinned by the prefix edge at n-1.
        for n in 2..=prefix.len() + 1 {
            let want = prefix[n - 2].dst;
            for (v, ins) in inc[n].iter().enumerate() {
                let e = match ext {
                    Extremity::Min => ins[0],
                    Extremity::Max => ins[ins.len() - 1],
                };
                if e.src != want {
                    reduced_failures.push(ReducedFailure { level: n, vertex: v, extremity: ext });
                }
            }
        }
    }
    reduced_failures.sort_by_key(|f| (f.level, f.vertex, f.extremity == Extremity::Max));
    let proximal = min_split.is_none() && max_split.is_none() && min_prefix == max_prefix;
    let pass = min_split.is_none()
        && max_split.is_none()
        && reduced_failures.is_empty()
        && proximal
        && !degenerate_rank1;
    DiagramReport {
        depth,
        ranks,
        structure,
        min_split,
        max_split,
        reduced_failures,
        proximal,
        degenerate_rank1,
        pass,
    }
}

/// Reads level maps off a validated rank-2 proximal diagram in reduced form.
///
/// The `e`-vertex of each level is the one on the minimal path; at the top level it is
/// the vertex whose only incoming edge leaves the `e`-vertex below.
pub fn diagram_to_covering(d: &OrderedBratteliDiagram) -> Result<CoveringSpec> {
    let report = validate_diagram(d);
    if let Some(p) = report.structure.first() {
        return Err(Error::InvalidDiagram(p.clone()));
    }
    let depth = d.depth();
    if depth == 0 {
        return Err(Error::InvalidDiagram("no levels below the root".into()));
    }
    if let Some(n) = report.ranks.iter().position(|&r| r != 2) {
        return Err(Error::NotRank2Proximal(format!("level {} has {} vertices", n + 1, report.ranks[n])));
    }
    if let Some(k) = report.min_split {
        return Err(Error::NotRank2Proximal(format!("minimal paths split at level {k}")));
    }
    if let Some(k) = report.max_split {
        return Err(Error::NotRank2Proximal(format!("maximal paths split at level {k}")));
    }
    if !report.proximal {
        return Err(Error::NotRank2Proximal("maximal and minimal paths differ".into()));
    }
    if let Some(f) = report.reduced_failures.first() {
        return Err(Error::NotReducedForm(format!(
            "level {}: {:?} edge into vertex {} leaves the wrong vertex",
            f.level, f.extremity, f.vertex
        )));
    }
    let inc = d.group();
    let (_, prefix) = extremal_prefix(&inc, depth, Extremity::Min);
    let is_loop = |n: usize, v: usize, below: usize| inc[n][v].len() == 1 && inc[n][v][0].src == below;
    let mut e_vertex = vec![0usize; depth + 1];
    for n in 1..=depth {
        let below = e_vertex[n - 1];
        e_vertex[n] = if n < depth {
            prefix[n - 1].dst
        } else {
            (0..2).find(|&v| is_loop(n, v, below)).ok_or_else(|| {
                Error::NotRank2Proximal(format!("level {n} has no vertex with a single edge from the e-vertex"))
            })?
        };
        if !is_loop(n, e_vertex[n], below) {
            return Err(Error::NotRank2Proximal(format!("the e-vertex of level {n} has more than one edge")));
        }
    }
    let c = |n: usize| 1 - e_vertex[n];
    let l1 = inc[1][c(1)].len() as u64;
    let mut levels = Vec::with_capacity(depth - 1);
    for n in 2..=depth {
        let word: Vec<Symbol> =
            inc[n][c(n)].iter().map(|e| if e.src == e_vertex[n - 1] { Symbol::E } else { Symbol::C }).collect();
        levels.push(LevelMap::from_word(&word));
    }
    Ok(CoveringSpec::new(l1, levels))
}

/// Keeps diagram levels `keep` (strictly increasing, within `1..=depth`); new edges are the paths
/// between kept levels, ordered with the upper edge most significant.
pub fn telescope_diagram(d: &OrderedBratteliDiagram, keep: &[usize], cap: u64) -> Result<OrderedBratteliDiagram> {
    let inc = d.incoming()?;
    if keep.is_empty() || keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("keep list must be nonempty and strictly increasing".into()));
    }
    if keep[0] == 0 || *keep.last().unwrap() > d.depth() {
        return Err(Error::LevelOutOfRange { level: *keep.last().unwrap(), min: 1, max: d.depth() });
    }
    let mut levels = vec![d.levels[0].clone()];
    let mut edges = Vec::new();
    let mut prev = 0;
    let mut total = 0u64;
    for (i, &k) in keep.iter().enumerate() {
        // sources[v]: level-`prev` start of every path into v, in path order.
        let mut sources: Vec<Vec<usize>> = (0..d.levels[prev].len()).map(|v| vec![v]).collect();
        for n in prev + 1..=k {
            let mut next = Vec::with_capacity(d.levels[n].len());
            for ins in &inc[n] {
                let mut s = Vec::new();
                for e in ins {
                    s.extend_from_slice(&sources[e.src]);
                }
                total += s.len() as u64;
                if total > cap {
                    return Err(Error::too_large(total as u128, cap));
                }
                next.push(s);
            }
            sources = next;
        }
        for (v, s) in sources.iter().enumerate() {
            for (j, &src) in s.iter().enumerate() {
                edges.push(Edge { lvl: i + 1, src, dst: v, ord: j as u64 + 1 });
            }
        }
        levels.push(d.levels[k].clone());
        prev = k;
    }
    let max_certified = if prev == d.depth() { d.max_certified } else { None };
    let mut out = OrderedBratteliDiagram { levels, edges, max_certified };
    out.sort_edges();
    Ok(out)
}

/// A path from the root; `ordinals[k]` is the ordinal of its edge into level `k+1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinitePath {
    /// Vertex reached at the last level.
    pub end: usize,
    pub ordinals: Vec<u64>,
}

impl FinitePath {
    /// The least path into `end` of a depth-`depth` diagram.
    pub fn minimal(end: usize, depth: usize) -> Self {
        FinitePath { end, ordinals: vec![1; depth] }
    }
}

/// Edges of `path`, bottom first.
fn resolve(inc: &Incoming, path: &FinitePath) -> Result<Vec<Edge>> {
    let depth = inc.len() - 1;
    if path.ordinals.len() != depth {
        return Err(Error::InvalidPath(format!("path has {} edges, diagram has {depth} levels", path.ordinals.len())));
    }
    if depth == 0 || path.end >= inc[depth].len() {
        return Err(Error::InvalidPath(format!("end vertex {} is not on the top level", path.end)));
    }
    let mut out = vec![Edge { lvl: 0, src: 0, dst: 0, ord: 0 }; depth];
    let mut v = path.end;
    for n in (1..=depth).rev() {
        let ord = path.ordinals[n - 1];
        let e = *ord
            .checked_sub(1)
            .and_then(|i| inc[n][v].get(i as usize))
            .ok_or_else(|| Error::InvalidPath(format!("level {n}: ordinal {ord} outside 1..={}", inc[n][v].len())))?;
        out[n - 1] = e;
        v = e.src;
    }
    Ok(out)
}

/// Lexicographic successor within the presented levels.
///
/// An all-maximal path has no successor here unless it ends at the certified vertex, where the
/// maximal path is final and maps to the minimal path.
pub fn vershik_successor(d: &OrderedBratteliDiagram, path: &FinitePath) -> Result<FinitePath> {
    let inc = d.incoming()?;
    let edges = resolve(&inc, path)?;
    let bump = edges.iter().position(|e| (e.ord as usize) < inc[e.lvl][e.dst].len());
    match bump {
        Some(k) => {
            let mut ordinals = path.ordinals.clone();
            ordinals[k] += 1;
            // The least path into the new source takes the first edge at every level.
            ordinals[..k].iter_mut().for_each(|o| *o = 1);
            Ok(FinitePath { end: path.end, ordinals })
        }
        None if d.max_certified == Some(path.end) => Ok(FinitePath::minimal(path.end, d.depth())),
        None => Err(Error::TruncatedMaximal),
    }
}

/// The path of a level-1-based seed in a diagram built by [`covering_to_diagram`] with `top_level` levels.
pub fn path_from_seed(seed: &PointSeed) -> Result<FinitePath> {
    if seed.base_level != 1 {
        return Err(Error::InvalidSeed("paths start at level 1".into()));
    }
    let mut ordinals = Vec::with_capacity(seed.slot_path.len() + 1);
    ordinals.push(seed.offset + 1);
    ordinals.extend(seed.slot_path.iter().map(|s| s + 1));
    Ok(FinitePath { end: 1, ordinals })
}

/// Inverse of [`path_from_seed`]; the path must end at the top `c`-vertex.
pub fn seed_from_path(path: &FinitePath) -> Result<PointSeed> {
    if path.end != 1 || path.ordinals.is_empty() || path.ordinals.contains(&0) {
        return Err(Error::InvalidPath("seed paths end at the top c-vertex and use ordinals from 1".into()));
    }
    Ok(PointSeed {
        base_level: 1,
        top_level: path.ordinals.len(),
        slot_path: path.ordinals[1..].iter().map(|o| o - 1).collect(),
        offset: path.ordinals[0] - 1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

/// Deterministic serialization; DOT puts one rank per level, top-down, with ordinals as edge labels.
pub fn export(d: &OrderedBratteliDiagram, format: ExportFormat) -> Vec<u8> {
    match format {
        ExportFormat::Json => d.to_json().into_bytes(),
        ExportFormat::Dot => {
            let mut s = String::from("digraph bratteli {\n  rankdir=TB;\n");
            for (n, vs) in d.levels.iter().enumerate() {
                s.push_str("  { rank=same;");
                for (v, name) in vs.iter().enumerate() {
                    s.push_str(&format!(" v{n}_{v} [label=\"{}\"];", name.replace('"', "\\\"")));
                }
                s.push_str(" }\n");
            }
            for e in &d.edges {
                s.push_str(&format!("  v{}_{} -> v{}_{} [label=\"{}\"];\n", e.lvl - 1, e.src, e.lvl, e.dst, e.ord));
            }
            s.push_str("}\n");
            s.into_bytes()
        }
    }
}
