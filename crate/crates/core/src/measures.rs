//! Exact invariant-measure calculus: `r(n)`, the projections `ξ_{m,n}`, edge
//! measures on figure-eight graphs, and ergodicity classification.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::covering::{c_count, CoveringSpec, TermBound};
use crate::error::{Error, Result};
use crate::rational::{display, from_biguint, serde_ratio, serde_ratio_vec};

/// `r(n) = b(n)·l_n / l_{n+1}`.
pub fn r_value(spec: &CoveringSpec, n: usize) -> Result<BigRational> {
    let lm = spec.level(n)?;
    let l_n = spec.circuit_length(n)?;
    let l_next = lm.next_length(&l_n);
    Ok(from_biguint(&(l_n * BigUint::from(lm.b())), &l_next))
}

pub fn one_minus_r(spec: &CoveringSpec, n: usize) -> Result<BigRational> {
    Ok(BigRational::one() - r_value(spec, n)?)
}

/// `r(m,n) = ∏_{i=n}^{m-1} r(i)`.
pub fn r_product(spec: &CoveringSpec, m: usize, n: usize) -> Result<BigRational> {
    spec.check_pair(m, n)?;
    if m == n {
        return Err(Error::InvalidLevels { m, n, reason: "need n < m".into() });
    }
    let mut p = BigRational::one();
    for i in n..m {
        p *= r_value(spec, i)?;
    }
    Ok(p)
}

/// `(#C in c_{m,n})·l_n / l_m`, computed from counts instead of the product.
pub fn c_fraction(spec: &CoveringSpec, m: usize, n: usize) -> Result<BigRational> {
    spec.check_pair(m, n)?;
    let c = c_count(spec, m, n)?;
    Ok(from_biguint(&(c * spec.circuit_length(n)?), &spec.circuit_length(m)?))
}

/// A point `w_e·ẽ_n + w_c·c̃_n` of the level-`n` simplex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplexPoint {
    pub level: usize,
    #[serde(with = "serde_ratio")]
    pub w_e: BigRational,
    #[serde(with = "serde_ratio")]
    pub w_c: BigRational,
}

impl SimplexPoint {
    pub fn new(level: usize, w_e: BigRational, w_c: BigRational) -> Result<Self> {
        if w_e.is_negative() || w_c.is_negative() || &w_e + &w_c != BigRational::one() {
            return Err(Error::Precondition("simplex weights must be nonnegative and sum to 1".into()));
        }
        Ok(SimplexPoint { level, w_e, w_c })
    }

    pub fn e(level: usize) -> Self {
        SimplexPoint { level, w_e: BigRational::one(), w_c: BigRational::zero() }
    }

    pub fn c(level: usize) -> Self {
        SimplexPoint { level, w_e: BigRational::zero(), w_c: BigRational::one() }
    }
}

/// `ẽ_m ↦ ẽ_n`, `c̃_m ↦ (1 - r(m,n)) ẽ_n + r(m,n) c̃_n`, extended linearly.
pub fn xi_project(spec: &CoveringSpec, m: usize, n: usize, x: &SimplexPoint) -> Result<SimplexPoint> {
    if x.level != m {
        return Err(Error::Precondition(format!("point lives at level {}, not {m}", x.level)));
    }
    let r = r_product(spec, m, n)?;
    let w_c = &x.w_c * &r;
    let w_e = &x.w_e + &x.w_c * (BigRational::one() - &r);
    Ok(SimplexPoint { level: n, w_e, w_c })
}

/// Circuits of lengths `lengths[i]` glued at one center vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gf8Graph {
    pub lengths: Vec<u64>,
}

impl Gf8Graph {
    /// Level-`n` graph of a rank-2 covering: the loop, then `c_n`.
    pub fn rank2(l_n: u64) -> Self {
        Gf8Graph { lengths: vec![1, l_n] }
    }

    pub fn edge_count(&self) -> usize {
        self.lengths.iter().map(|&l| l as usize).sum()
    }

    /// Index of edge `pos` of circuit `circuit`; edges run from offset `pos` to `pos + 1`.
    pub fn edge_index(&self, circuit: usize, pos: u64) -> usize {
        self.lengths[..circuit].iter().map(|&l| l as usize).sum::<usize>() + pos as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureVector {
    pub level: usize,
    pub graph: Gf8Graph,
    #[serde(with = "serde_ratio_vec")]
    pub weights: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureCheck {
    pub nonnegative: bool,
    /// Vertices `(circuit, offset)` where inflow differs from outflow; the center is `(0, 0)`.
    pub unbalanced: Vec<(usize, u64)>,
    #[serde(with = "serde_ratio")]
    pub total: BigRational,
}

impl MeasureCheck {
    pub fn ok(&self) -> bool {
        self.nonnegative && self.unbalanced.is_empty() && self.total.is_one()
    }
}

impl MeasureVector {
    pub fn check(&self) -> MeasureCheck {
        let g = &self.graph;
        let w = |c: usize, p: u64| &self.weights[g.edge_index(c, p)];
        let mut unbalanced = Vec::new();
        let mut center_in = BigRational::zero();
        let mut center_out = BigRational::zero();
        for (c, &len) in g.lengths.iter().enumerate() {
            center_out += w(c, 0);
            center_in += w(c, len - 1);
            for p in 1..len {
                if w(c, p - 1) != w(c, p) {
                    unbalanced.push((c, p));
                }
            }
        }
        if center_in != center_out {
            unbalanced.insert(0, (0, 0));
        }
        MeasureCheck {
            nonnegative: self.weights.iter().all(|x| !x.is_negative()),
            unbalanced,
            total: self.weights.iter().fold(BigRational::zero(), |a, b| a + b),
        }
    }

    pub fn loop_weight(&self) -> &BigRational {
        &self.weights[0]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    /// The Dirac measure at the fixed point.
    Fixed,
    /// `ξ_{m,n}(c̃_m)` spread over edges by occurrence counts in `c_{m,n}`.
    Nonatomic,
}

pub fn vertex_measure(spec: &CoveringSpec, n: usize, m: usize, which: MeasureKind) -> Result<MeasureVector> {
    spec.check_circuit_level(n)?;
    let l_n = spec.circuit_length_u64(n)?;
    let graph = Gf8Graph::rank2(l_n);
    let mut weights = vec![BigRational::zero(); graph.edge_count()];
    match which {
        MeasureKind::Fixed => weights[0] = BigRational::one(),
        MeasureKind::Nonatomic => {
            spec.check_pair(m, n)?;
            if m == n {
                return Err(Error::InvalidLevels { m, n, reason: "horizon must exceed n".into() });
            }
            let l_m = spec.circuit_length(m)?;
            let c = c_count(spec, m, n)?;
            let e = &l_m - &c * BigUint::from(l_n);
            weights[0] = from_biguint(&e, &l_m);
            let wc = from_biguint(&c, &l_m);
            for w in weights.iter_mut().skip(1) {
                *w = wc.clone();
            }
        }
    }
    Ok(MeasureVector { level: n, graph, weights })
}

/// Nonatomic vectors at horizons `m` and `m + 1` and the change in loop weight.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HorizonPair {
    pub at_m: MeasureVector,
    pub at_next: MeasureVector,
    #[serde(with = "serde_ratio")]
    pub loop_gap: BigRational,
}

pub fn nonatomic_horizons(spec: &CoveringSpec, n: usize, m: usize) -> Result<HorizonPair> {
    let at_m = vertex_measure(spec, n, m, MeasureKind::Nonatomic)?;
    let at_next = vertex_measure(spec, n, m + 1, MeasureKind::Nonatomic)?;
    let loop_gap = at_next.loop_weight() - at_m.loop_weight();
    Ok(HorizonPair { at_m, at_next, loop_gap })
}

/// Sums level-`(n+1)` edge weights over preimages of each level-`n` edge under `φ_{n+1}`.
pub fn push_forward(spec: &CoveringSpec, upper: &MeasureVector) -> Result<MeasureVector> {
    let n = upper
        .level
        .checked_sub(1)
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::Precondition("cannot push below level 1".into()))?;
    let l_n = spec.circuit_length_u64(n)?;
    let lm = spec.level(n)?;
    let graph = Gf8Graph::rank2(l_n);
    let mut weights = vec![BigRational::zero(); graph.edge_count()];
    // Loop of level n+1 maps to the loop of level n.
    weights[0] += &upper.weights[0];
    let mut pos = 0u64;
    let up = |p: u64| &upper.weights[upper.graph.edge_index(1, p)];
    for (j, &x) in lm.a().iter().enumerate() {
        if j > 0 {
            for q in 0..l_n {
                weights[graph.edge_index(1, q)] += up(pos);
                pos += 1;
            }
        }
        for _ in 0..x {
            weights[0] += up(pos);
            pos += 1;
        }
    }
    Ok(MeasureVector { level: n, graph, weights })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    UniquelyErgodic { certificate: String },
    TwoErgodic { certificate: String },
    Undetermined { reason: String },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::UniquelyErgodic { .. } => "UniquelyErgodic",
            Verdict::TwoErgodic { .. } => "TwoErgodic",
            Verdict::Undetermined { .. } => "Undetermined",
        }
    }

    pub fn is_certified(&self) -> bool {
        !matches!(self, Verdict::Undetermined { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErgodicityReport {
    /// Levels `1..=terms.len()`.
    #[serde(with = "serde_ratio_vec")]
    pub terms: Vec<BigRational>,
    #[serde(with = "serde_ratio_vec")]
    pub partial_sums: Vec<BigRational>,
    /// `r(i+1, 1)` for each listed `i`.
    #[serde(with = "serde_ratio_vec")]
    pub partial_products: Vec<BigRational>,
    pub verdict: Verdict,
}

impl ErgodicityReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,one_minus_r,partial_sum,partial_product\n");
        for (i, ((t, s), p)) in
            self.terms.iter().zip(&self.partial_sums).zip(&self.partial_products).enumerate()
        {
            out.push_str(&format!("{},{},{},{}\n", i + 1, display(t), display(s), display(p)));
        }
        out
    }
}

fn pow(r: &BigRational, e: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= r;
    }
    acc
}

/// Uses the family's term bound when one is recorded and holds on every listed level.
pub fn classify_ergodicity(spec: &CoveringSpec, depth: usize) -> Result<ErgodicityReport> {
    let spec = if depth > spec.depth() {
        spec.extended_to(depth).unwrap_or_else(|_| spec.clone())
    } else {
        spec.clone()
    };
    let upto = depth.min(spec.depth());
    let mut terms = Vec::with_capacity(upto);
    let mut partial_sums = Vec::with_capacity(upto);
    let mut partial_products = Vec::with_capacity(upto);
    let mut sum = BigRational::zero();
    let mut prod = BigRational::one();
    for i in 1..=upto {
        let r = r_value(&spec, i)?;
        let t = BigRational::one() - &r;
        sum += &t;
        prod *= &r;
        terms.push(t);
        partial_sums.push(sum.clone());
        partial_products.push(prod.clone());
    }
    let cert = spec.family.as_ref().and_then(|f| f.certificate.clone());
    let verdict = match cert {
        None => Verdict::Undetermined { reason: "no closed-form bound on 1-r(i) is recorded".into() },
        Some(b) => judge(&b, &terms),
    };
    Ok(ErgodicityReport { terms, partial_sums, partial_products, verdict })
}

fn judge(bound: &TermBound, terms: &[BigRational]) -> Verdict {
    let zero = BigRational::zero();
    match bound {
        TermBound::Geometric { c, rho } => {
            if rho.is_negative() || *rho >= BigRational::one() || c.is_negative() {
                return Verdict::Undetermined { reason: "geometric bound needs 0 <= rho < 1".into() };
            }
            if let Some(i) = terms.iter().enumerate().position(|(i, t)| *t > c * pow(rho, i + 1)) {
                return Verdict::Undetermined {
                    reason: format!("recorded bound fails at level {}", i + 1),
                };
            }
            Verdict::TwoErgodic { certificate: bound.describe() }
        }
        TermBound::LowerBound { delta } => {
            if *delta <= zero {
                return Verdict::Undetermined { reason: "lower bound must be positive".into() };
            }
            if let Some(i) = terms.iter().position(|t| t < delta) {
                return Verdict::Undetermined {
                    reason: format!("recorded bound fails at level {}", i + 1),
                };
            }
            Verdict::UniquelyErgodic { certificate: bound.describe() }
        }
        TermBound::LowerBoundOnStages { delta, levels } => {
            if *delta <= zero || levels.is_empty() {
                return Verdict::Undetermined { reason: "no stage carries a positive bound".into() };
            }
            for &i in levels {
                match terms.get(i.wrapping_sub(1)) {
                    Some(t) if t >= delta => {}
                    Some(_) => {
                        return Verdict::Undetermined { reason: format!("stage bound fails at level {i}") }
                    }
                    None => {
                        return Verdict::Undetermined {
                            reason: format!("stage level {i} lies beyond the examined depth"),
                        }
                    }
                }
            }
            Verdict::UniquelyErgodic { certificate: bound.describe() }
        }
    }
}

/// Exact fraction of `C`-edges in a materialized walk; test and CLI oracle.
pub fn walk_c_fraction(walk: &[u32]) -> BigRational {
    let edges = walk.len() - 1;
    let on_c = (0..edges).filter(|&i| !(walk[i] == 0 && walk[i + 1] == 0)).count();
    BigRational::new(BigInt::from(on_c), BigInt::from(edges))
}
