//! Two-qubit Clifford+CS circuits and their exact evaluation.
//!
//! Qubit 0 is the ancilla and the most significant bit of the basis index, so
//! the basis order is `|q0 q1⟩ = 00, 01, 10, 11`. Unitaries are stored as
//! `ζ8^phase · mat` with `mat` over `Z[i, 1/(1+i)]`; the Hadamard gate is the
//! only generator that needs a nonzero phase.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
use num_traits::Signed;
use rand::Rng;
use thiserror::Error;

use crate::ring::{GaussianInt, RingElem};

pub type Mat4 = [[RingElem; 4]; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    H,
    S,
    Sdg,
    X,
    Z,
    CZ,
    CNOT,
    SWAP,
    CS,
    CSdg,
}

impl GateKind {
    pub const ALL: [GateKind; 10] = [
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::X,
        GateKind::Z,
        GateKind::CZ,
        GateKind::CNOT,
        GateKind::SWAP,
        GateKind::CS,
        GateKind::CSdg,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::H | GateKind::S | GateKind::Sdg | GateKind::X | GateKind::Z => 1,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::Sdg => "Sdg",
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::CZ => "CZ",
            GateKind::CNOT => "CNOT",
            GateKind::SWAP => "SWAP",
            GateKind::CS => "CS",
            GateKind::CSdg => "CSdg",
        }
    }

    pub fn inverse(self) -> GateKind {
        match self {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::CS => GateKind::CSdg,
            GateKind::CSdg => GateKind::CS,
            k => k,
        }
    }

    pub fn is_clifford(self) -> bool {
        !matches!(self, GateKind::CS | GateKind::CSdg)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GateError {
    #[error("unknown gate kind `{0}`")]
    UnknownKind(String),
    #[error("{kind} acts on {want} qubit(s), got {got}")]
    Arity { kind: GateKind, want: usize, got: usize },
    #[error("qubit index {0} out of range (expected 0 or 1)")]
    QubitRange(u8),
    #[error("two-qubit gate needs distinct qubits")]
    RepeatedQubit,
}

impl FromStr for GateKind {
    type Err = GateError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| GateError::UnknownKind(s.into()))
    }
}

/// A gate on one or two of the qubits `{0, 1}`. For controlled gates the
/// first qubit is the control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gate {
    kind: GateKind,
    qubits: [u8; 2],
}

impl Gate {
    pub fn new(kind: GateKind, qubits: &[u8]) -> Result<Self, GateError> {
        if qubits.len() != kind.arity() {
            return Err(GateError::Arity {
                kind,
                want: kind.arity(),
                got: qubits.len(),
            });
        }
        if let Some(&q) = qubits.iter().find(|&&q| q > 1) {
            return Err(GateError::QubitRange(q));
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(GateError::RepeatedQubit);
        }
        let second = if qubits.len() == 2 { qubits[1] } else { 0 };
        Ok(Self {
            kind,
            qubits: [qubits[0], second],
        })
    }

    pub fn one(kind: GateKind, q: u8) -> Self {
        Self::new(kind, &[q]).expect("valid single-qubit gate")
    }

    pub fn two(kind: GateKind, a: u8, b: u8) -> Self {
        Self::new(kind, &[a, b]).expect("valid two-qubit gate")
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[u8] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn inverse(&self) -> Gate {
        Gate {
            kind: self.kind.inverse(),
            qubits: self.qubits,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.qubits() {
            [a] => write!(f, "{}({a})", self.kind),
            [a, b] => write!(f, "{}({a},{b})", self.kind),
            _ => unreachable!(),
        }
    }
}

/// `ζ8^phase · mat`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhasedMatrix {
    pub mat: Mat4,
    pub phase: u8,
}

fn zero4() -> Mat4 {
    core::array::from_fn(|_| core::array::from_fn(|_| RingElem::zero()))
}

pub fn identity4() -> Mat4 {
    core::array::from_fn(|r| core::array::from_fn(|c| if r == c { RingElem::one() } else { RingElem::zero() }))
}

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    core::array::from_fn(|r| {
        core::array::from_fn(|c| {
            (0..4).fold(RingElem::zero(), |acc, k| {
                if a[r][k].is_zero() || b[k][c].is_zero() {
                    acc
                } else {
                    &acc + &(&a[r][k] * &b[k][c])
                }
            })
        })
    })
}

pub fn adjoint(a: &Mat4) -> Mat4 {
    core::array::from_fn(|r| core::array::from_fn(|c| a[c][r].conj()))
}

fn bit(index: usize, q: u8) -> usize {
    (index >> (1 - q)) & 1
}

/// `i^t` on the diagonal.
fn diagonal(exps: [i64; 4]) -> Mat4 {
    let mut m = zero4();
    for (j, e) in exps.into_iter().enumerate() {
        m[j][j] = RingElem::unit(e);
    }
    m
}

/// Permutation matrix sending basis state `j` to `perm[j]`.
fn permutation(perm: [usize; 4]) -> Mat4 {
    let mut m = zero4();
    for (j, &t) in perm.iter().enumerate() {
        m[t][j] = RingElem::one();
    }
    m
}

impl PhasedMatrix {
    pub fn identity() -> Self {
        Self {
            mat: identity4(),
            phase: 0,
        }
    }

    /// Moves unit factors of `mat` into the phase so that the first nonzero
    /// entry has a numerator with positive real part and nonnegative
    /// imaginary part.
    pub fn normalized(mut self) -> Self {
        let first = self.mat.iter().flatten().find(|e| !e.is_zero()).cloned();
        if let Some(e) = first {
            let t = associate_exponent(e.num());
            if t != 0 {
                for row in self.mat.iter_mut() {
                    for x in row.iter_mut() {
                        *x = x.mul_unit(-t);
                    }
                }
                self.phase = (self.phase + 2 * t as u8) % 8;
            }
        }
        self
    }

    pub fn mul(&self, rhs: &PhasedMatrix) -> PhasedMatrix {
        PhasedMatrix {
            mat: mat_mul(&self.mat, &rhs.mat),
            phase: (self.phase + rhs.phase) % 8,
        }
    }

    pub fn is_unitary(&self) -> bool {
        mat_mul(&adjoint(&self.mat), &self.mat) == identity4()
    }

    pub fn to_complex(&self) -> [[Complex64; 4]; 4] {
        let ph = Complex64::from_polar(1.0, self.phase as f64 * core::f64::consts::FRAC_PI_4);
        core::array::from_fn(|r| core::array::from_fn(|c| ph * self.mat[r][c].to_complex()))
    }
}

/// The `t ∈ 0..4` with `z = i^t · z'` and `z'` in the normalised associate
/// class (`re > 0, im ≥ 0`).
pub(crate) fn associate_exponent(z: &GaussianInt) -> i64 {
    let (re, im) = (&z.re, &z.im);
    if re.is_positive() && !im.is_negative() {
        0
    } else if im.is_positive() && !re.is_positive() {
        1
    } else if re.is_negative() && !im.is_positive() {
        2
    } else {
        3
    }
}

/// Exact matrix of a gate.
pub fn gate_matrix(g: &Gate) -> PhasedMatrix {
    let q = g.qubits();
    let diag_by = |f: &dyn Fn(usize) -> i64| diagonal(core::array::from_fn(f));
    let perm_by = |f: &dyn Fn(usize) -> usize| permutation(core::array::from_fn(f));
    let mat = match g.kind() {
        GateKind::H => {
            // ζ8·H = (i/(1+i))·[[1, 1], [1, −1]]
            let w = RingElem::reduce(GaussianInt::i(), 1);
            let mut m = zero4();
            for r in 0..4 {
                for c in 0..4 {
                    let other = 1 - q[0];
                    if bit(r, other) != bit(c, other) {
                        continue;
                    }
                    m[r][c] = if bit(r, q[0]) == 1 && bit(c, q[0]) == 1 { -&w } else { w.clone() };
                }
            }
            return PhasedMatrix { mat: m, phase: 7 };
        }
        GateKind::S => diag_by(&|j| bit(j, q[0]) as i64),
        GateKind::Sdg => diag_by(&|j| -(bit(j, q[0]) as i64)),
        GateKind::Z => diag_by(&|j| 2 * bit(j, q[0]) as i64),
        GateKind::X => perm_by(&|j| j ^ (1 << (1 - q[0]))),
        GateKind::CZ => diag_by(&|j| 2 * (bit(j, 0) & bit(j, 1)) as i64),
        GateKind::CS => diag_by(&|j| (bit(j, 0) & bit(j, 1)) as i64),
        GateKind::CSdg => diag_by(&|j| -((bit(j, 0) & bit(j, 1)) as i64)),
        GateKind::CNOT => perm_by(&|j| if bit(j, q[0]) == 1 { j ^ (1 << (1 - q[1])) } else { j }),
        GateKind::SWAP => perm_by(&|j| ((j & 1) << 1) | (j >> 1)),
    };
    PhasedMatrix { mat, phase: 0 }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Circuit {
    pub gates: Vec<Gate>,
    pub name: String,
    pub metadata: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct CircuitStats {
    pub total: usize,
    /// CS and CS† gates.
    pub cs: usize,
    pub depth: usize,
}

impl Circuit {
    pub fn new(gates: Vec<Gate>) -> Self {
        Self {
            gates,
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// The inverse circuit: gates reversed and individually inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            name: self.name.clone(),
            metadata: self.metadata.clone(),
        }
    }

    /// Uniformly random gate kinds on random qubits.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Circuit {
        let gates = (0..len)
            .map(|_| {
                let kind = GateKind::ALL[rng.gen_range(0..GateKind::ALL.len())];
                let a: u8 = rng.gen_range(0..2);
                if kind.arity() == 1 {
                    Gate::one(kind, a)
                } else {
                    Gate::two(kind, a, 1 - a)
                }
            })
            .collect();
        Circuit::new(gates)
    }
}

/// Product of the gate matrices, first gate rightmost.
pub fn evaluate(c: &Circuit) -> PhasedMatrix {
    let out = c
        .gates
        .iter()
        .fold(PhasedMatrix::identity(), |acc, g| gate_matrix(g).mul(&acc))
        .normalized();
    debug_assert!(out.is_unitary());
    out
}

/// Complex-double product of the gates, independent of the ring arithmetic.
pub fn evaluate_complex(c: &Circuit) -> [[Complex64; 4]; 4] {
    let mut acc: [[Complex64; 4]; 4] = core::array::from_fn(|r| {
        core::array::from_fn(|c| if r == c { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
    });
    for g in &c.gates {
        let m = gate_complex(g);
        acc = core::array::from_fn(|r| core::array::from_fn(|c| (0..4).map(|k| m[r][k] * acc[k][c]).sum()));
    }
    acc
}

/// Textbook complex matrix of a gate.
pub fn gate_complex(g: &Gate) -> [[Complex64; 4]; 4] {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let q = g.qubits();
    let mut m = [[zero; 4]; 4];
    match g.kind() {
        GateKind::H => {
            let h = core::f64::consts::FRAC_1_SQRT_2;
            for r in 0..4 {
                for c in 0..4 {
                    let other = 1 - q[0];
                    if bit(r, other) == bit(c, other) {
                        let sign = if bit(r, q[0]) == 1 && bit(c, q[0]) == 1 { -1.0 } else { 1.0 };
                        m[r][c] = Complex64::new(sign * h, 0.0);
                    }
                }
            }
        }
        kind => {
            for j in 0..4 {
                let (target, value) = match kind {
                    GateKind::S => (j, if bit(j, q[0]) == 1 { i } else { one }),
                    GateKind::Sdg => (j, if bit(j, q[0]) == 1 { -i } else { one }),
                    GateKind::Z => (j, if bit(j, q[0]) == 1 { -one } else { one }),
                    GateKind::CZ => (j, if j == 3 { -one } else { one }),
                    GateKind::CS => (j, if j == 3 { i } else { one }),
                    GateKind::CSdg => (j, if j == 3 { -i } else { one }),
                    GateKind::X => (j ^ (1 << (1 - q[0])), one),
                    GateKind::CNOT => (if bit(j, q[0]) == 1 { j ^ (1 << (1 - q[1])) } else { j }, one),
                    GateKind::SWAP => (((j & 1) << 1) | (j >> 1), one),
                    GateKind::H => unreachable!(),
                };
                m[target][j] = value;
            }
        }
    }
    m
}

pub fn stats(c: &Circuit) -> CircuitStats {
    let mut level = [0usize; 2];
    let mut cs = 0;
    for g in &c.gates {
        if !g.kind().is_clifford() {
            cs += 1;
        }
        let l = g.qubits().iter().map(|&q| level[q as usize]).max().unwrap_or(0) + 1;
        for &q in g.qubits() {
            level[q as usize] = l;
        }
    }
    CircuitStats {
        total: c.gates.len(),
        cs,
        depth: level[0].max(level[1]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::{prop_assert_eq, prop_assume, proptest};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(re: i64, im: i64) -> RingElem {
        RingElem::from_gaussian(GaussianInt::new(re, im))
    }

    fn close(a: &[[Complex64; 4]; 4], b: &[[Complex64; 4]; 4], tol: f64) -> bool {
        a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn cs_is_diagonal() {
        let m = gate_matrix(&Gate::two(GateKind::CS, 0, 1));
        assert_eq!(m.phase, 0);
        assert_eq!(m.mat, diagonal([0, 0, 0, 1]));
        assert_eq!(m.mat[3][3], g(0, 1));
    }

    #[test]
    fn x_on_ancilla_swaps_halves() {
        let m = gate_matrix(&Gate::one(GateKind::X, 0));
        assert_eq!(m.mat, permutation([2, 3, 0, 1]));
    }

    #[test]
    fn hadamard_on_target() {
        let m = gate_matrix(&Gate::one(GateKind::H, 1));
        assert_eq!(m.phase, 7);
        let w = RingElem::reduce(GaussianInt::i(), 1);
        let z = RingElem::zero();
        let want = [
            [w.clone(), w.clone(), z.clone(), z.clone()],
            [w.clone(), -&w, z.clone(), z.clone()],
            [z.clone(), z.clone(), w.clone(), w.clone()],
            [z.clone(), z, w.clone(), -&w],
        ];
        assert_eq!(m.mat, want);
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(evaluate(&Circuit::default()), PhasedMatrix::identity());
        let c = Circuit::new(vec![Gate::two(GateKind::CS, 0, 1), Gate::two(GateKind::CSdg, 0, 1)]);
        assert_eq!(evaluate(&c), PhasedMatrix::identity());
        let c = Circuit::new(vec![Gate::one(GateKind::H, 1), Gate::one(GateKind::H, 1)]);
        assert_eq!(evaluate(&c), PhasedMatrix::identity());
    }

    #[test]
    fn cnot_orientation() {
        // control 0, target 1: |10> -> |11>
        let m = gate_matrix(&Gate::two(GateKind::CNOT, 0, 1));
        assert_eq!(m.mat, permutation([0, 1, 3, 2]));
        let m = gate_matrix(&Gate::two(GateKind::CNOT, 1, 0));
        assert_eq!(m.mat, permutation([0, 3, 2, 1]));
    }

    #[test]
    fn stats_examples() {
        let cs = Gate::two(GateKind::CS, 0, 1);
        let h0 = Gate::one(GateKind::H, 0);
        assert_eq!(stats(&Circuit::new(vec![cs])), CircuitStats { total: 1, cs: 1, depth: 1 });
        let s = stats(&Circuit::new(vec![h0, cs, h0]));
        assert_eq!((s.total, s.cs, s.depth), (3, 1, 3));
        assert_eq!(stats(&Circuit::default()), CircuitStats::default());
        let par = Circuit::new(vec![Gate::one(GateKind::H, 0), Gate::one(GateKind::S, 1)]);
        assert_eq!(stats(&par).depth, 1);
    }

    #[test]
    fn gate_validation() {
        assert!(matches!(Gate::new(GateKind::CS, &[0]), Err(GateError::Arity { .. })));
        assert_eq!(Gate::new(GateKind::CS, &[1, 1]), Err(GateError::RepeatedQubit));
        assert_eq!(Gate::new(GateKind::H, &[2]), Err(GateError::QubitRange(2)));
        assert!(matches!("T".parse::<GateKind>(), Err(GateError::UnknownKind(_))));
        assert_eq!("CSdg".parse::<GateKind>(), Ok(GateKind::CSdg));
    }

    #[test]
    fn gates_match_textbook_matrices() {
        for kind in GateKind::ALL {
            for a in 0..2u8 {
                let gate = if kind.arity() == 1 { Gate::one(kind, a) } else { Gate::two(kind, a, 1 - a) };
                let exact = gate_matrix(&gate);
                assert!(exact.is_unitary(), "{gate}");
                assert!(close(&exact.to_complex(), &gate_complex(&gate), 1e-14), "{gate}");
                let inv = gate_matrix(&gate.inverse()).mul(&exact).normalized();
                assert_eq!(inv, PhasedMatrix::identity(), "{gate}");
            }
        }
    }

    #[test]
    fn random_circuits_are_unitary_and_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let len = rng.gen_range(0..=50);
            let c = Circuit::random(len, &mut rng);
            let m = evaluate(&c);
            assert!(m.is_unitary());
            assert!(close(&m.to_complex(), &evaluate_complex(&c), 1e-10));
        }
    }

    #[test]
    fn inverse_circuit_cancels() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let c = Circuit::random(30, &mut rng);
            let mut both = c.clone();
            both.gates.extend(c.inverse().gates);
            assert_eq!(evaluate(&both), PhasedMatrix::identity());
        }
    }

    proptest! {
        #[test]
        fn clifford_identity_pairs_keep_cs_count(seed in 0u64..500, at in 0usize..20, pick in 0usize..10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = Circuit::random(20, &mut rng);
            let kind = GateKind::ALL[pick];
            prop_assume!(kind.is_clifford());
            let gate = if kind.arity() == 1 { Gate::one(kind, 0) } else { Gate::two(kind, 0, 1) };
            let mut padded = c.clone();
            let at = at.min(padded.len());
            padded.gates.insert(at, gate.inverse());
            padded.gates.insert(at, gate);
            prop_assert_eq!(stats(&padded).cs, stats(&c).cs);
            prop_assert_eq!(evaluate(&padded), evaluate(&c));
        }
    }
}
