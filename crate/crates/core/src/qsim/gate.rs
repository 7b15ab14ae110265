use std::fmt;
use std::sync::Arc;

use super::linalg::{c, unitarity_deviation, CMatrix, C64, I, ONE, ZERO};
use super::state::{scatter_bits, DensityMatrix, PureState};
use crate::error::{Error, Result};

pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    H,
    X,
    Y,
    Z,
    Cnot,
    Cz,
    Swap,
    /// |0⟩⟨0|⊗I + |1⟩⟨1|⊗(I − 2|φ⟩⟨φ|); wires = [control, register...].
    ControlledReflection(Arc<PureState>),
    /// Arbitrary unitary on the listed wires (wires[0] is the low bit).
    Custom(Arc<CMatrix>),
}

impl GateKind {
    pub fn is_rotation(&self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz)
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::Cnot => "cnot",
            GateKind::Cz => "cz",
            GateKind::Swap => "swap",
            GateKind::ControlledReflection(_) => "creflect",
            GateKind::Custom(_) => "custom",
        }
    }

    fn arity(&self) -> Option<usize> {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::H | GateKind::X | GateKind::Y | GateKind::Z => Some(1),
            GateKind::Cnot | GateKind::Cz | GateKind::Swap => Some(2),
            GateKind::ControlledReflection(phi) => Some(1 + phi.n()),
            GateKind::Custom(m) => super::linalg::log2_exact(m.nrows()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub wires: Vec<usize>,
    /// Rotation angle in radians; ignored for fixed gates.
    pub param: f64,
}

impl Gate {
    pub fn new(kind: GateKind, wires: Vec<usize>, param: f64) -> Result<Self> {
        let arity = kind.arity().ok_or_else(|| Error::InvalidWires("custom matrix size".into()))?;
        if wires.len() != arity {
            return Err(Error::InvalidWires(format!("{} expects {arity} wires, got {}", kind.name(), wires.len())));
        }
        let mut sorted = wires.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != wires.len() {
            return Err(Error::InvalidWires(format!("repeated wire in {wires:?}")));
        }
        if let GateKind::Custom(m) = &kind {
            let dev = unitarity_deviation(m);
            if dev > UNITARY_TOL {
                return Err(Error::NonUnitary(dev));
            }
        }
        Ok(Self { kind, wires, param })
    }

    pub fn rx(w: usize, theta: f64) -> Self {
        Self { kind: GateKind::Rx, wires: vec![w], param: theta }
    }
    pub fn ry(w: usize, theta: f64) -> Self {
        Self { kind: GateKind::Ry, wires: vec![w], param: theta }
    }
    pub fn rz(w: usize, theta: f64) -> Self {
        Self { kind: GateKind::Rz, wires: vec![w], param: theta }
    }
    pub fn h(w: usize) -> Self {
        Self { kind: GateKind::H, wires: vec![w], param: 0.0 }
    }
    pub fn x(w: usize) -> Self {
        Self { kind: GateKind::X, wires: vec![w], param: 0.0 }
    }
    pub fn y(w: usize) -> Self {
        Self { kind: GateKind::Y, wires: vec![w], param: 0.0 }
    }
    pub fn z(w: usize) -> Self {
        Self { kind: GateKind::Z, wires: vec![w], param: 0.0 }
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        assert_ne!(control, target);
        Self { kind: GateKind::Cnot, wires: vec![control, target], param: 0.0 }
    }
    pub fn cz(a: usize, b: usize) -> Self {
        assert_ne!(a, b);
        Self { kind: GateKind::Cz, wires: vec![a, b], param: 0.0 }
    }
    pub fn swap(a: usize, b: usize) -> Self {
        assert_ne!(a, b);
        Self { kind: GateKind::Swap, wires: vec![a, b], param: 0.0 }
    }
    pub fn controlled_reflection(control: usize, register: &[usize], phi: Arc<PureState>) -> Result<Self> {
        let mut wires = vec![control];
        wires.extend_from_slice(register);
        Self::new(GateKind::ControlledReflection(phi), wires, 0.0)
    }
    pub fn custom(wires: Vec<usize>, m: CMatrix) -> Result<Self> {
        Self::new(GateKind::Custom(Arc::new(m)), wires, 0.0)
    }

    /// Local matrix; bit b of the row/column index belongs to wires[b].
    pub fn matrix(&self) -> CMatrix {
        let t = self.param / 2.0;
        let (s, co) = t.sin_cos();
        match &self.kind {
            GateKind::Rx => CMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)]),
            GateKind::Ry => CMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)]),
            GateKind::Rz => CMatrix::from_row_slice(2, 2, &[C64::from_polar(1.0, -t), ZERO, ZERO, C64::from_polar(1.0, t)]),
            GateKind::H => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)])
            }
            GateKind::X => CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
            GateKind::Y => CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
            GateKind::Z => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
            GateKind::Cnot => permutation(4, |i| if i & 1 == 1 { i ^ 2 } else { i }),
            GateKind::Cz => CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, ONE, ONE, -ONE])),
            GateKind::Swap => permutation(4, |i| ((i & 1) << 1) | (i >> 1)),
            GateKind::ControlledReflection(phi) => {
                let d = phi.dim();
                let mut m = CMatrix::identity(2 * d, 2 * d);
                let a = phi.amps();
                for r in 0..d {
                    for k in 0..d {
                        m[(2 * r + 1, 2 * k + 1)] -= c(2.0, 0.0) * a[r] * a[k].conj();
                    }
                }
                m
            }
            GateKind::Custom(m) => (**m).clone(),
        }
    }

    pub fn inverse(&self) -> Gate {
        let mut g = self.clone();
        match &self.kind {
            GateKind::Rx | GateKind::Ry | GateKind::Rz => g.param = -self.param,
            GateKind::Custom(m) => g.kind = GateKind::Custom(Arc::new(m.adjoint())),
            _ => {}
        }
        g
    }

    pub fn max_wire(&self) -> usize {
        *self.wires.iter().max().unwrap()
    }
}

fn permutation(d: usize, f: impl Fn(usize) -> usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        m[(f(i), i)] = ONE;
    }
    m
}

/// Applies a local matrix on `wires` to a raw amplitude slice of `n` qubits.
pub(crate) fn apply_local(amps: &mut [C64], n: usize, wires: &[usize], m: &CMatrix) {
    let k = wires.len();
    let dk = 1usize << k;
    let mask: usize = wires.iter().map(|w| 1usize << w).sum();
    let offsets: Vec<usize> = (0..dk).map(|j| scatter_bits(j, wires)).collect();
    let mut buf = vec![ZERO; dk];
    for base in 0..(1usize << n) {
        if base & mask != 0 {
            continue;
        }
        for (j, off) in offsets.iter().enumerate() {
            buf[j] = amps[base | off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (j, b) in buf.iter().enumerate() {
                acc += m[(r, j)] * b;
            }
            amps[base | off] = acc;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Self { n, gates: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gates_mut(&mut self) -> &mut [Gate] {
        &mut self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, g: Gate) -> Result<&mut Self> {
        if g.max_wire() >= self.n {
            return Err(Error::InvalidWires(format!("wire {} on a {}-qubit circuit", g.max_wire(), self.n)));
        }
        self.gates.push(g);
        Ok(self)
    }

    pub fn with(mut self, g: Gate) -> Result<Self> {
        self.push(g)?;
        Ok(self)
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        for g in &other.gates {
            self.push(g.clone())?;
        }
        Ok(())
    }

    pub fn inverse(&self) -> Circuit {
        Circuit { n: self.n, gates: self.gates.iter().rev().map(Gate::inverse).collect() }
    }

    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        if state.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: state.n() });
        }
        let mut out = state.clone();
        self.apply_in_place(&mut out);
        Ok(out)
    }

    pub(crate) fn apply_in_place(&self, state: &mut PureState) {
        let n = state.n();
        for g in &self.gates {
            apply_gate(state.amps_mut(), n, g);
        }
    }

    pub fn apply_density(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: rho.n() });
        }
        let u = self.unitary();
        Ok(DensityMatrix::from_matrix_unchecked(&u * rho.matrix() * u.adjoint()))
    }

    pub fn unitary(&self) -> CMatrix {
        let d = 1usize << self.n;
        let mut u = CMatrix::zeros(d, d);
        for col in 0..d {
            let mut s = PureState::basis(self.n, col);
            self.apply_in_place(&mut s);
            for (r, a) in s.amps().iter().enumerate() {
                u[(r, col)] = *a;
            }
        }
        u
    }

    pub fn param_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind.is_rotation()).count()
    }

    pub fn params(&self) -> Vec<f64> {
        self.gates.iter().filter(|g| g.kind.is_rotation()).map(|g| g.param).collect()
    }

    pub fn set_params(&mut self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.param_count() {
            return Err(Error::DimensionMismatch { expected: self.param_count(), got: theta.len() });
        }
        let mut it = theta.iter();
        for g in self.gates.iter_mut().filter(|g| g.kind.is_rotation()) {
            g.param = *it.next().unwrap();
        }
        Ok(())
    }

    /// One gate per line: `kind wires [param]`, wires comma separated.
    pub fn to_text(&self) -> Result<String> {
        let mut s = format!("# qubits {}\n", self.n);
        for g in &self.gates {
            let wires: Vec<String> = g.wires.iter().map(|w| w.to_string()).collect();
            match &g.kind {
                GateKind::ControlledReflection(_) | GateKind::Custom(_) => {
                    return Err(Error::Parse(format!("{} gates have no text form", g.kind.name())))
                }
                k if k.is_rotation() => s.push_str(&format!("{} {} {:.17e}\n", k.name(), wires.join(","), g.param)),
                k => s.push_str(&format!("{} {}\n", k.name(), wires.join(","))),
            }
        }
        Ok(s)
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut n: Option<usize> = None;
        let mut gates = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let mut parts = rest.split_whitespace();
                if parts.next() == Some("qubits") {
                    n = parts.next().and_then(|v| v.parse().ok());
                }
                continue;
            }
            let err = |m: &str| Error::Parse(format!("line {}: {m}", lineno + 1));
            let mut parts = line.split_whitespace();
            let kind = match parts.next().unwrap() {
                "rx" => GateKind::Rx,
                "ry" => GateKind::Ry,
                "rz" => GateKind::Rz,
                "h" => GateKind::H,
                "x" => GateKind::X,
                "y" => GateKind::Y,
                "z" => GateKind::Z,
                "cnot" => GateKind::Cnot,
                "cz" => GateKind::Cz,
                "swap" => GateKind::Swap,
                other => return Err(err(&format!("unknown gate {other}"))),
            };
            let wires: Vec<usize> = parts
                .next()
                .ok_or_else(|| err("missing wires"))?
                .split(',')
                .map(|w| w.parse().map_err(|_| err("bad wire")))
                .collect::<Result<_>>()?;
            let param = if kind.is_rotation() {
                parts.next().ok_or_else(|| err("missing angle"))?.parse().map_err(|_| err("bad angle"))?
            } else {
                0.0
            };
            gates.push(Gate::new(kind, wires, param)?);
        }
        let width = n.unwrap_or_else(|| gates.iter().map(|g| g.max_wire() + 1).max().unwrap_or(1));
        let mut c = Circuit::new(width);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }
}

pub(crate) fn apply_gate(amps: &mut [C64], n: usize, g: &Gate) {
    match g.kind {
        GateKind::X => {
            let b = 1usize << g.wires[0];
            for i in 0..amps.len() {
                if i & b == 0 {
                    amps.swap(i, i | b);
                }
            }
        }
        GateKind::Cnot => {
            let (cb, tb) = (1usize << g.wires[0], 1usize << g.wires[1]);
            for i in 0..amps.len() {
                if i & cb != 0 && i & tb == 0 {
                    amps.swap(i, i | tb);
                }
            }
        }
        GateKind::Cz => {
            let m = (1usize << g.wires[0]) | (1usize << g.wires[1]);
            for (i, a) in amps.iter_mut().enumerate() {
                if i & m == m {
                    *a = -*a;
                }
            }
        }
        GateKind::Z => {
            let b = 1usize << g.wires[0];
            for (i, a) in amps.iter_mut().enumerate() {
                if i & b != 0 {
                    *a = -*a;
                }
            }
        }
        _ => apply_local(amps, n, &g.wires, &g.matrix()),
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gates {
            write!(f, "{}{:?}", g.kind.name(), g.wires)?;
            if g.kind.is_rotation() {
                write!(f, "({:.4})", g.param)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl Circuit {
    /// Same gates on a wider register.
    pub fn widened(&self, n: usize) -> Result<Circuit> {
        if n < self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: n });
        }
        Ok(Circuit { n, gates: self.gates.clone() })
    }
}
