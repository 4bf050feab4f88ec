//! Exact synthesis of 4×2 isometries over `Z[i, 1/(1+i)]` into Clifford+CS
//! circuits.
//!
//! The search runs A* from `W'` towards a state whose entries are all Gaussian
//! integers, applying gates on the left. Monomial gates (permutations and
//! `i^k` diagonals: X, CNOT, SWAP, S, Z, CZ, CS) never change denominator
//! exponents, so states are taken modulo left multiplication by monomials and
//! every move is "monomial, then H on qubit 0". Up to that quotient there are
//! twelve distinct moves: three ways to pair the four rows times a relative
//! phase in `{1, i}` inside each pair. When the goal is reached the leftover
//! monomial is removed by [`finalize_monomial`] and the collected gates are
//! inverted into the output circuit, which is then checked by exact
//! evaluation.

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::hash::{Hash, Hasher};

use hashbrown::HashMap;
use thiserror::Error;

use crate::circuit::{associate_exponent, evaluate, gate_matrix, Circuit, Gate, GateKind, PhasedMatrix};
use crate::isometry::{is_isometry, Isometry};
use crate::ring::RingElem;

/// Default node budget (expanded states).
pub const DEFAULT_BUDGET: usize = 5_000_000;
/// Default divisor applied to the sde sum in the heuristic.
pub const DEFAULT_HEURISTIC_SCALE: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("input is not an exact isometry (W'†W' ≠ I)")]
    NotIsometry,
    #[error("search budget exhausted after expanding {expanded} states")]
    BudgetExhausted { expanded: usize },
    #[error("goal state is not monomial: {0}")]
    NotMonomial(&'static str),
    #[error("synthesized circuit does not reproduce the isometry")]
    Mismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthOptions {
    /// Maximum number of expanded states.
    pub budget: usize,
    /// The heuristic is `Σ sde / heuristic_scale`.
    pub heuristic_scale: u32,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            heuristic_scale: DEFAULT_HEURISTIC_SCALE,
        }
    }
}

/// A search node: the current 4×2 matrix and the global phase exponent
/// accumulated by the gates applied so far.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SynthState {
    pub cols: Isometry,
    pub phase_exp: u8,
}

impl SynthState {
    pub fn new(cols: Isometry) -> Self {
        Self { cols, phase_exp: 0 }
    }

    /// Sum of the denominator exponents of the eight entries.
    pub fn sde_sum(&self) -> u32 {
        sde_sum(&self.cols)
    }

    pub fn heuristic(&self, scale: u32) -> f64 {
        self.sde_sum() as f64 / scale.max(1) as f64
    }

    pub fn is_goal(&self) -> bool {
        self.sde_sum() == 0
    }

    /// Applies a gate on the left.
    pub fn apply(&self, g: &Gate) -> SynthState {
        let m = gate_matrix(g);
        let cols = core::array::from_fn(|r| {
            core::array::from_fn(|c| {
                (0..4).fold(RingElem::zero(), |acc, k| &acc + &(&m.mat[r][k] * &self.cols[k][c]))
            })
        });
        SynthState {
            cols,
            phase_exp: (self.phase_exp + m.phase) % 8,
        }
    }
}

fn sde_sum(cols: &Isometry) -> u32 {
    cols.iter().flatten().map(RingElem::sde).sum()
}

/// The generating set, each with its exact matrix and its inverse.
pub fn generators() -> Vec<(Gate, PhasedMatrix, Gate)> {
    let gates = [
        Gate::one(GateKind::H, 0),
        Gate::one(GateKind::H, 1),
        Gate::one(GateKind::S, 0),
        Gate::one(GateKind::S, 1),
        Gate::one(GateKind::X, 0),
        Gate::one(GateKind::X, 1),
        Gate::two(GateKind::CZ, 0, 1),
        Gate::two(GateKind::CNOT, 0, 1),
        Gate::two(GateKind::CNOT, 1, 0),
        Gate::two(GateKind::SWAP, 0, 1),
        Gate::two(GateKind::CS, 0, 1),
        Gate::two(GateKind::CSdg, 0, 1),
    ];
    gates.iter().map(|g| (*g, gate_matrix(g), g.inverse())).collect()
}

/// A 4×4 monomial matrix: basis state `j` goes to `perm[j]` with factor
/// `i^exps[j]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    perm: [u8; 4],
    exps: [u8; 4],
}

impl Monomial {
    pub const IDENTITY: Monomial = Monomial {
        perm: [0, 1, 2, 3],
        exps: [0; 4],
    };

    pub fn new(perm: [u8; 4], exps: [u8; 4]) -> Self {
        Self {
            perm,
            exps: exps.map(|e| e % 4),
        }
    }

    /// `self ∘ rhs`: apply `rhs` first.
    pub fn compose(&self, rhs: &Monomial) -> Monomial {
        Monomial::new(
            core::array::from_fn(|j| self.perm[rhs.perm[j] as usize]),
            core::array::from_fn(|j| self.exps[rhs.perm[j] as usize] + rhs.exps[j]),
        )
    }

    /// The same monomial up to a global `i^k`, normalised so basis state 0
    /// carries no phase.
    fn projective(&self) -> Monomial {
        let e0 = self.exps[0];
        Monomial::new(self.perm, self.exps.map(|e| e + 4 - e0))
    }

    pub fn apply(&self, cols: &Isometry) -> Isometry {
        let mut out: Isometry = Default::default();
        for j in 0..4 {
            let t = self.perm[j] as usize;
            out[t] = [cols[j][0].mul_unit(self.exps[j] as i64), cols[j][1].mul_unit(self.exps[j] as i64)];
        }
        out
    }

    /// Reads a monomial gate off its exact matrix.
    pub fn of_gate(g: &Gate) -> Option<Monomial> {
        let m = gate_matrix(g);
        if m.phase != 0 {
            return None;
        }
        let mut perm = [0u8; 4];
        let mut exps = [0u8; 4];
        for j in 0..4 {
            let rows: Vec<usize> = (0..4).filter(|&r| !m.mat[r][j].is_zero()).collect();
            let [r] = rows[..] else { return None };
            let e = &m.mat[r][j];
            if !e.is_gaussian() || e.num().norm() != 1.into() {
                return None;
            }
            perm[j] = r as u8;
            exps[j] = associate_exponent(e.num()) as u8;
        }
        Some(Monomial::new(perm, exps))
    }
}

/// Shortest gate words for every monomial up to global phase.
struct MonomialWords {
    words: HashMap<Monomial, Vec<Gate>>,
}

impl MonomialWords {
    fn build() -> Self {
        let gens: Vec<(Gate, Monomial)> = [
            Gate::one(GateKind::X, 0),
            Gate::one(GateKind::X, 1),
            Gate::two(GateKind::CNOT, 0, 1),
            Gate::two(GateKind::CNOT, 1, 0),
            Gate::two(GateKind::SWAP, 0, 1),
            Gate::one(GateKind::S, 0),
            Gate::one(GateKind::S, 1),
            Gate::one(GateKind::Sdg, 0),
            Gate::one(GateKind::Sdg, 1),
            Gate::one(GateKind::Z, 0),
            Gate::one(GateKind::Z, 1),
            Gate::two(GateKind::CZ, 0, 1),
            Gate::two(GateKind::CS, 0, 1),
            Gate::two(GateKind::CSdg, 0, 1),
        ]
        .into_iter()
        .map(|g| (g, Monomial::of_gate(&g).expect("monomial generator")))
        .collect();
        let mut words: HashMap<Monomial, Vec<Gate>> = HashMap::new();
        let start = Monomial::IDENTITY;
        words.insert(start, Vec::new());
        let mut queue = VecDeque::from([start]);
        while let Some(m) = queue.pop_front() {
            let word = words[&m].clone();
            for (g, gm) in &gens {
                let next = gm.compose(&m).projective();
                if !words.contains_key(&next) {
                    let mut w = word.clone();
                    w.push(*g);
                    words.insert(next, w);
                    queue.push_back(next);
                }
            }
        }
        Self { words }
    }

    fn word(&self, m: &Monomial) -> &[Gate] {
        &self.words[&m.projective()]
    }

    /// Shortest word for `f ∘ pending` over all `f` taking the goal state
    /// `cols` to the identity columns up to a unit. Rows of `cols` that are
    /// zero leave `f` partly free, which often saves gates.
    fn finish(&self, cols: &Isometry, pending: &Monomial) -> &[Gate] {
        let mut best: Option<(usize, Monomial)> = None;
        for f in self.words.keys() {
            let image = f.apply(cols);
            let Some(unit) = image[0][0].is_gaussian().then(|| image[0][0].clone()) else { continue };
            let hit = (0..4).all(|r| {
                (0..2).all(|c| {
                    let want = if r == c { unit.clone() } else { RingElem::zero() };
                    image[r][c] == want
                })
            });
            if !hit || unit.is_zero() {
                continue;
            }
            let m = f.compose(pending).projective();
            let key = (self.words[&m].len(), m);
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
        let (_, m) = best.expect("goal states are monomial");
        &self.words[&m]
    }
}

/// Row pairings fed into H on qubit 0, which mixes rows (0, 2) and (1, 3).
const PAIRINGS: [[usize; 4]; 3] = [[0, 1, 2, 3], [0, 2, 1, 3], [0, 3, 1, 2]];

/// One search move: rows `(a, b)` and `(c, d)` of the pairing are sent to
/// `(0, 2)` and `(1, 3)`, rows `b` and `d` pick up `i^t1` and `i^t2`, then H
/// acts on qubit 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Move {
    pairing: u8,
    t1: u8,
    t2: u8,
}

impl Move {
    fn all() -> impl Iterator<Item = Move> {
        (0..3u8).flat_map(|pairing| (0..4u8).map(move |t| Move { pairing, t1: t & 1, t2: t >> 1 }))
    }

    fn monomial(&self) -> Monomial {
        let [a, b, c, d] = PAIRINGS[self.pairing as usize];
        let mut perm = [0u8; 4];
        let mut exps = [0u8; 4];
        perm[a] = 0;
        perm[c] = 1;
        perm[b] = 2;
        perm[d] = 3;
        exps[b] = self.t1;
        exps[d] = self.t2;
        Monomial::new(perm, exps)
    }
}

/// Ring part of H on qubit 0 (the full gate carries a further `ζ8^7`).
fn apply_h0(cols: &Isometry) -> Isometry {
    // ζ8·H = (i/(1+i))·[[1, 1], [1, −1]]
    let mix = |x: &RingElem, y: &RingElem, minus: bool| {
        let s = if minus { x - y } else { x + y };
        s.mul_unit(1).div_lambda_pow(1)
    };
    let mut out: Isometry = Default::default();
    for c in 0..2 {
        for (hi, lo) in [(0, 2), (1, 3)] {
            out[hi][c] = reduce_elem(mix(&cols[hi][c], &cols[lo][c], false));
            out[lo][c] = reduce_elem(mix(&cols[hi][c], &cols[lo][c], true));
        }
    }
    out
}

fn reduce_elem(x: RingElem) -> RingElem {
    RingElem::reduce(x.num().clone(), x.k())
}

/// Canonical representative of `cols` modulo left monomials, with the
/// monomial that produces it.
fn canonicalize(cols: &Isometry) -> (Isometry, Monomial) {
    let mut exps = [0u8; 4];
    for (j, row) in cols.iter().enumerate() {
        if let Some(e) = row.iter().find(|e| !e.is_zero()) {
            exps[j] = ((4 - associate_exponent(e.num())) % 4) as u8;
        }
    }
    let rows: [[RingElem; 2]; 4] =
        core::array::from_fn(|j| [cols[j][0].mul_unit(exps[j] as i64), cols[j][1].mul_unit(exps[j] as i64)]);
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&x, &y| rows[x].cmp(&rows[y]).then(x.cmp(&y)));
    let mut perm = [0u8; 4];
    for (pos, &j) in order.iter().enumerate() {
        perm[j] = pos as u8;
    }
    let m = Monomial::new(perm, exps);
    (m.apply(cols), m)
}

/// FNV-1a, for deterministic tie-breaking.
struct Fnv(u64);

impl Hasher for Fnv {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 ^= *b as u64;
            self.0 = self.0.wrapping_mul(0x100_0000_01b3);
        }
    }
}

fn state_hash(cols: &Isometry) -> u64 {
    let mut h = Fnv(0xcbf2_9ce4_8422_2325);
    cols.hash(&mut h);
    h.finish()
}

struct Node {
    cols: Isometry,
    parent: Option<usize>,
    /// Monomial applied before the H layer, and the canonicalizer after it.
    step: Option<(Monomial, Monomial)>,
}

#[derive(PartialEq, Eq)]
struct Frontier {
    /// `depth·scale + sde_sum`, i.e. `scale·(g + h)`.
    f: u64,
    h: u32,
    depth: u32,
    hash: u64,
    index: usize,
}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap, so every key is reversed
        other
            .f
            .cmp(&self.f)
            .then(other.h.cmp(&self.h))
            .then(other.depth.cmp(&self.depth))
            .then(other.hash.cmp(&self.hash))
            .then(other.index.cmp(&self.index))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Synthesis {
    pub circuit: Circuit,
    /// `evaluate(circuit)` has first two columns `ζ8^phase_exp · W'`.
    pub phase_exp: u8,
    pub expanded: usize,
}

/// Finds `k` with the first two columns of `m` equal to `ζ8^k · w`.
pub fn match_columns(m: &PhasedMatrix, w: &Isometry) -> Option<u8> {
    // ζ8 is not in Q(i), so only even relative phases i^t can occur
    (0..4u8).find_map(|t| {
        let hit = (0..4).all(|r| (0..2).all(|c| m.mat[r][c] == w[r][c].mul_unit(t as i64)));
        hit.then_some((m.phase + 2 * t) % 8)
    })
}

/// Gates taking a goal state (one unit entry per column over `Z[i]`) to the
/// first two identity columns, up to a global phase.
pub fn finalize_monomial(cols: &Isometry) -> Result<Vec<Gate>, SynthError> {
    goal_monomial(cols)?;
    let words = MonomialWords::build();
    Ok(words.finish(cols, &Monomial::IDENTITY).to_vec())
}

fn goal_monomial(cols: &Isometry) -> Result<Monomial, SynthError> {
    let mut pivots = [(0usize, 0u8); 2];
    for (c, pivot) in pivots.iter_mut().enumerate() {
        let rows: Vec<usize> = (0..4).filter(|&r| !cols[r][c].is_zero()).collect();
        let [r] = rows[..] else {
            return Err(SynthError::NotMonomial("column without exactly one nonzero entry"));
        };
        let e = &cols[r][c];
        if !e.is_gaussian() || e.num().norm() != 1.into() {
            return Err(SynthError::NotMonomial("pivot is not a unit of Z[i]"));
        }
        *pivot = (r, ((4 - associate_exponent(e.num())) % 4) as u8);
    }
    let (r0, e0) = pivots[0];
    let (r1, e1) = pivots[1];
    if r0 == r1 {
        return Err(SynthError::NotMonomial("columns share a pivot row"));
    }
    let mut perm = [0u8; 4];
    let mut exps = [0u8; 4];
    perm[r0] = 0;
    perm[r1] = 1;
    exps[r0] = e0;
    exps[r1] = e1;
    let mut next = 2;
    for (r, slot) in perm.iter_mut().enumerate() {
        if r != r0 && r != r1 {
            *slot = next;
            next += 1;
        }
    }
    Ok(Monomial::new(perm, exps))
}

/// Searches for a circuit whose unitary has `w` (up to `ζ8^k`) as its first
/// two columns.
pub fn synthesize(w: &Isometry, opts: &SynthOptions) -> Result<Synthesis, SynthError> {
    if !is_isometry(w) {
        return Err(SynthError::NotIsometry);
    }
    let scale = opts.heuristic_scale.max(1) as u64;
    let (start, c0) = canonicalize(w);
    let mut nodes = vec![Node {
        cols: start.clone(),
        parent: None,
        step: Some((Monomial::IDENTITY, c0)),
    }];
    let mut best: HashMap<Isometry, u32> = HashMap::new();
    best.insert(start.clone(), 0);
    let mut heap = BinaryHeap::new();
    let h0 = sde_sum(&start);
    heap.push(Frontier {
        f: h0 as u64,
        h: h0,
        depth: 0,
        hash: state_hash(&start),
        index: 0,
    });
    let moves: Vec<(Move, Monomial)> = Move::all().map(|m| (m, m.monomial())).collect();
    let mut expanded = 0;
    let goal = loop {
        let Some(top) = heap.pop() else {
            return Err(SynthError::BudgetExhausted { expanded });
        };
        if top.h == 0 {
            break top.index;
        }
        if best.get(&nodes[top.index].cols).is_some_and(|&d| d < top.depth) {
            continue;
        }
        expanded += 1;
        if expanded > opts.budget {
            return Err(SynthError::BudgetExhausted { expanded: expanded - 1 });
        }
        let depth = top.depth + 1;
        for (_, pre) in &moves {
            let mixed = apply_h0(&pre.apply(&nodes[top.index].cols));
            let (canon, post) = canonicalize(&mixed);
            if best.get(&canon).is_some_and(|&d| d <= depth) {
                continue;
            }
            best.insert(canon.clone(), depth);
            let h = sde_sum(&canon);
            let hash = state_hash(&canon);
            nodes.push(Node {
                cols: canon,
                parent: Some(top.index),
                step: Some((*pre, post)),
            });
            heap.push(Frontier {
                f: depth as u64 * scale + h as u64,
                h,
                depth,
                hash,
                index: nodes.len() - 1,
            });
        }
    };

    let circuit = reconstruct(&nodes, goal)?;
    let m = evaluate(&circuit);
    let phase_exp = match_columns(&m, w).ok_or(SynthError::Mismatch)?;
    Ok(Synthesis {
        circuit,
        phase_exp,
        expanded,
    })
}

/// Turns the path to `goal` into the output circuit (the inverse of the
/// gates applied during the search).
fn reconstruct(nodes: &[Node], goal: usize) -> Result<Circuit, SynthError> {
    let words = MonomialWords::build();
    let mut steps = Vec::new();
    let mut at = Some(goal);
    while let Some(i) = at {
        steps.push(nodes[i].step.expect("every node records its step"));
        at = nodes[i].parent;
    }
    steps.reverse();
    // applied order: c0, (pre1, H, post1), (pre2, H, post2), ..., finish
    let h0 = Gate::one(GateKind::H, 0);
    let mut applied: Vec<Gate> = Vec::new();
    let mut pending = Monomial::IDENTITY;
    for (i, (pre, post)) in steps.iter().enumerate() {
        if i == 0 {
            pending = *post;
            continue;
        }
        applied.extend_from_slice(words.word(&pre.compose(&pending)));
        applied.push(h0);
        pending = *post;
    }
    goal_monomial(&nodes[goal].cols)?;
    applied.extend_from_slice(words.finish(&nodes[goal].cols, &pending));
    Ok(Circuit::new(applied.iter().rev().map(Gate::inverse).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::identity4;
    use crate::isometry::isometry_from_vectors;
    use crate::pauli::QuatVec;
    use crate::ring::GaussianInt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn first_two_columns(m: &PhasedMatrix) -> Isometry {
        core::array::from_fn(|r| [m.mat[r][0].clone(), m.mat[r][1].clone()])
    }

    fn unit_col(r: usize) -> [RingElem; 4] {
        core::array::from_fn(|j| if j == r { RingElem::one() } else { RingElem::zero() })
    }

    fn cols_of(a: [RingElem; 4], b: [RingElem; 4]) -> Isometry {
        core::array::from_fn(|r| [a[r].clone(), b[r].clone()])
    }

    fn assert_reproduces(w: &Isometry) -> Synthesis {
        let out = synthesize(w, &SynthOptions::default()).unwrap();
        let m = evaluate(&out.circuit);
        assert_eq!(match_columns(&m, w), Some(out.phase_exp));
        out
    }

    #[test]
    fn identity_columns_need_no_gates() {
        let w = first_two_columns(&PhasedMatrix { mat: identity4(), phase: 0 });
        let out = assert_reproduces(&w);
        assert!(out.circuit.is_empty());
        assert_eq!(out.phase_exp, 0);
    }

    #[test]
    fn cs_columns_need_no_gates_beyond_cliffords() {
        // the first two columns of CS are e1, e2, so no CS is needed at all
        let cs = gate_matrix(&Gate::two(GateKind::CS, 0, 1));
        let out = assert_reproduces(&first_two_columns(&cs));
        assert!(out.circuit.gates.iter().all(|g| g.kind().is_clifford()));
    }

    #[test]
    fn cs_conjugated_columns_use_one_cs() {
        // SWAP·X0·CS·X0·SWAP moves the i phase onto basis state 1
        let x = Gate::one(GateKind::X, 1);
        let c = Circuit::new(vec![x, Gate::two(GateKind::CS, 0, 1), x]);
        let m = evaluate(&c);
        let out = assert_reproduces(&first_two_columns(&m));
        let cs = out.circuit.gates.iter().filter(|g| !g.kind().is_clifford()).count();
        assert!(cs <= 1, "{:?}", out.circuit.gates);
    }

    #[test]
    fn plan_isometries_synthesize() {
        for (n, u0, u1) in [
            (1, [1, 0, 0, 0], [0, 1, 0, 0]),
            (2, [2, 0, 0, 0], [0, 0, 0, 0]),
            (2, [1, 1, 0, 0], [1, 0, 1, 0]),
            (3, [2, 1, 1, 0], [1, 1, 0, 0]),
            (4, [3, 2, 1, 1], [1, 0, 0, 0]),
        ] {
            let w = isometry_from_vectors(n, &QuatVec::from_i64(u0), &QuatVec::from_i64(u1));
            assert_reproduces(&w);
        }
    }

    #[test]
    fn round_trip_random_circuits() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let len = rng.gen_range(0..=20);
            let c = Circuit::random(len, &mut rng);
            assert_reproduces(&first_two_columns(&evaluate(&c)));
        }
    }

    #[test]
    fn rejects_non_isometry() {
        let two = RingElem::from_gaussian(GaussianInt::new(2, 0));
        let w = cols_of(
            [two, RingElem::zero(), RingElem::zero(), RingElem::zero()],
            unit_col(1),
        );
        assert_eq!(synthesize(&w, &SynthOptions::default()), Err(SynthError::NotIsometry));
    }

    #[test]
    fn tiny_budget_is_reported() {
        let w = isometry_from_vectors(4, &QuatVec::from_i64([3, 2, 1, 1]), &QuatVec::from_i64([1, 0, 0, 0]));
        let opts = SynthOptions {
            budget: 1,
            ..SynthOptions::default()
        };
        assert!(matches!(synthesize(&w, &opts), Err(SynthError::BudgetExhausted { .. })));
    }

    #[test]
    fn generator_set() {
        let gens = generators();
        assert!(gens.len() >= 11);
        let cs = gens.iter().find(|(g, _, _)| g.kind() == GateKind::CS).unwrap();
        assert_eq!(cs.1.phase, 0);
        assert_eq!(cs.1.mat[3][3], RingElem::unit(1));
        for (_, m, inv) in &gens {
            assert_eq!(gate_matrix(inv).mul(m).normalized(), PhasedMatrix::identity());
        }
    }

    #[test]
    fn heuristic_examples() {
        let w = isometry_from_vectors(1, &QuatVec::from_i64([1, 0, 0, 0]), &QuatVec::from_i64([0, 1, 0, 0]));
        let s = SynthState::new(w);
        assert_eq!(s.sde_sum(), 4);
        assert_eq!(s.heuristic(8), 0.5);
        let goal = SynthState::new(cols_of(unit_col(0), unit_col(1)));
        assert_eq!(goal.heuristic(8), 0.0);
        assert!(goal.is_goal());
    }

    #[test]
    fn monomial_gates_keep_sde_and_h_moves_it_by_one_per_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let c = Circuit::random(15, &mut rng);
            let s = SynthState::new(first_two_columns(&evaluate(&c)));
            for (g, _, _) in generators() {
                let t = s.apply(&g);
                if g.kind() != GateKind::H {
                    assert_eq!(t.sde_sum(), s.sde_sum());
                    continue;
                }
                let q = g.qubits()[0];
                let pairs: [(usize, usize); 2] = if q == 0 { [(0, 2), (1, 3)] } else { [(0, 1), (2, 3)] };
                for col in 0..2 {
                    for (a, b) in pairs {
                        let before = s.cols[a][col].sde().max(s.cols[b][col].sde()) as i64;
                        let after = t.cols[a][col].sde().max(t.cols[b][col].sde()) as i64;
                        assert!((after - before).abs() <= 1);
                    }
                }
            }
        }
    }

    #[test]
    fn finalize_examples() {
        assert!(finalize_monomial(&cols_of(unit_col(0), unit_col(1))).unwrap().is_empty());

        for w in [
            cols_of(unit_col(1), unit_col(0)),
            cols_of(unit_col(0).map(|e| e.mul_unit(1)), unit_col(1)),
            cols_of(unit_col(3).map(|e| e.mul_unit(3)), unit_col(2).map(|e| e.mul_unit(2))),
        ] {
            let gates = finalize_monomial(&w).unwrap();
            let mut s = SynthState::new(w.clone());
            for g in &gates {
                s = s.apply(g);
            }
            let target = cols_of(unit_col(0), unit_col(1));
            let m = PhasedMatrix {
                mat: core::array::from_fn(|r| core::array::from_fn(|c| if c < 2 { s.cols[r][c].clone() } else { RingElem::zero() })),
                phase: s.phase_exp,
            };
            assert!(match_columns(&m, &target).is_some(), "{gates:?}");
        }
        let bad = cols_of(unit_col(0), unit_col(0));
        assert!(finalize_monomial(&bad).is_err());
    }

    #[test]
    fn search_is_deterministic() {
        let w = isometry_from_vectors(4, &QuatVec::from_i64([3, 2, 1, 1]), &QuatVec::from_i64([1, 0, 0, 0]));
        let a = synthesize(&w, &SynthOptions::default()).unwrap();
        let b = synthesize(&w, &SynthOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn monomial_words_cover_the_group() {
        let words = MonomialWords::build();
        // 24 permutations times 4^3 relative phases
        assert_eq!(words.words.len(), 24 * 64);
        for (m, word) in &words.words {
            let got = word
                .iter()
                .fold(Monomial::IDENTITY, |acc, g| Monomial::of_gate(g).unwrap().compose(&acc));
            assert_eq!(got.projective(), *m);
        }
    }
}
