//! Declarative encoder/ansatz specifications compiled to gate lists.
//!
//! An ansatz block is one Ry rotation per qubit followed by a fixed
//! entangler layer; the block repeats `depth` times, so the trainable
//! parameter count is always `width * depth`. Entangler pair lists use a
//! canonical deterministic ordering (documented per kind below) so that
//! circuit-reduction claims can be checked empirically rather than assumed.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::Error;
use crate::state::{circuit_unitary, Gate, MAX_UNITARY_QUBITS};
use crate::Result;

/// Entangler topology: which ordered (control, target) pairs make up one
/// entangling layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntanglerKind {
    /// Nearest-neighbor chain (i, i+1), ascending.
    Linear,
    /// Linear plus the closing pair (width-1, 0).
    Circular,
    /// Ring distances 1 and 2: for k in 1..=2, (i, (i+k) mod width).
    Circular2,
    /// Ring distances 1 through 4.
    Circular4,
    /// All pairs (i, j) with i < j, lexicographic.
    Full,
}

impl EntanglerKind {
    pub const ALL: [EntanglerKind; 5] = [
        EntanglerKind::Linear,
        EntanglerKind::Circular,
        EntanglerKind::Circular2,
        EntanglerKind::Circular4,
        EntanglerKind::Full,
    ];

    /// Smallest width for which the topology is defined.
    pub fn min_width(&self) -> usize {
        match self {
            EntanglerKind::Linear | EntanglerKind::Circular | EntanglerKind::Full => 2,
            EntanglerKind::Circular2 => 3,
            EntanglerKind::Circular4 => 5,
        }
    }

    /// Number of pairs emitted for a given width.
    pub fn pair_count(&self, width: usize) -> usize {
        match self {
            EntanglerKind::Linear => width - 1,
            EntanglerKind::Circular => width,
            EntanglerKind::Circular2 => 2 * width,
            EntanglerKind::Circular4 => 4 * width,
            EntanglerKind::Full => width * (width - 1) / 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EntanglerKind::Linear => "linear",
            EntanglerKind::Circular => "circular",
            EntanglerKind::Circular2 => "circular2",
            EntanglerKind::Circular4 => "circular4",
            EntanglerKind::Full => "full",
        }
    }
}

impl fmt::Display for EntanglerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EntanglerKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "linear" => Ok(EntanglerKind::Linear),
            "circular" => Ok(EntanglerKind::Circular),
            "circular2" => Ok(EntanglerKind::Circular2),
            "circular4" => Ok(EntanglerKind::Circular4),
            "full" => Ok(EntanglerKind::Full),
            other => Err(format!("unknown entangler '{other}'")),
        }
    }
}

/// Which two-qubit gate the entangler uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TwoQubitGate {
    Cx,
    Cz,
}

impl TwoQubitGate {
    pub fn name(&self) -> &'static str {
        match self {
            TwoQubitGate::Cx => "cx",
            TwoQubitGate::Cz => "cz",
        }
    }

    fn gate(&self, control: usize, target: usize) -> Gate {
        match self {
            TwoQubitGate::Cx => Gate::cx(control, target),
            TwoQubitGate::Cz => Gate::cz(control, target),
        }
    }
}

impl fmt::Display for TwoQubitGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TwoQubitGate {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "cx" => Ok(TwoQubitGate::Cx),
            "cz" => Ok(TwoQubitGate::Cz),
            other => Err(format!("unknown two-qubit gate '{other}'")),
        }
    }
}

/// Trainable ansatz description: `depth` blocks of per-qubit Ry rotations
/// followed by one entangler layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AnsatzSpec {
    pub width: usize,
    pub depth: usize,
    pub entangler: EntanglerKind,
    pub two_qubit_gate: TwoQubitGate,
}

impl AnsatzSpec {
    pub fn new(
        width: usize,
        depth: usize,
        entangler: EntanglerKind,
        two_qubit_gate: TwoQubitGate,
    ) -> Result<Self> {
        let spec = AnsatzSpec {
            width,
            depth,
            entangler,
            two_qubit_gate,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Width must be 2..=12 and large enough for the entangler. Depth 0 is
    /// a legal degenerate ansatz (no gates, no parameters).
    pub fn validate(&self) -> Result<()> {
        if self.width < 2 || self.width > 12 {
            return Err(Error::AnsatzWidthOutOfRange(self.width));
        }
        if self.width < self.entangler.min_width() {
            return Err(Error::EntanglerWidthTooSmall {
                kind: self.entangler.name(),
                min: self.entangler.min_width(),
                width: self.width,
            });
        }
        Ok(())
    }

    pub fn parameter_count(&self) -> usize {
        self.width * self.depth
    }
}

/// How each qubit receives a feature angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EncoderLayout {
    /// 5 qubits, one feature per qubit.
    FiveX,
    /// 10 qubits, feature i redundantly on qubits 2i and 2i+1.
    TenXX,
    /// 10 qubits, feature i on qubit 2i and its square on qubit 2i+1.
    TenXX2,
}

impl EncoderLayout {
    pub fn n_qubits(&self) -> usize {
        match self {
            EncoderLayout::FiveX => 5,
            EncoderLayout::TenXX | EncoderLayout::TenXX2 => 10,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EncoderLayout::FiveX => "five_x",
            EncoderLayout::TenXX => "ten_xx",
            EncoderLayout::TenXX2 => "ten_xx2",
        }
    }
}

impl fmt::Display for EncoderLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EncoderLayout {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "five_x" => Ok(EncoderLayout::FiveX),
            "ten_xx" => Ok(EncoderLayout::TenXX),
            "ten_xx2" => Ok(EncoderLayout::TenXX2),
            other => Err(format!("unknown encoder layout '{other}'")),
        }
    }
}

/// Map from a scaled feature value to an Ry rotation angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AngleMap {
    /// theta = pi * x. Not injective as an encoded state on [-1, 1].
    PiX,
    /// theta = arctan(x) + pi/2, injective on all of R.
    ArctanShift,
}

impl AngleMap {
    pub fn name(&self) -> &'static str {
        match self {
            AngleMap::PiX => "pi_x",
            AngleMap::ArctanShift => "arctan_shift",
        }
    }
}

impl fmt::Display for AngleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AngleMap {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "pi_x" => Ok(AngleMap::PiX),
            "arctan_shift" => Ok(AngleMap::ArctanShift),
            other => Err(format!("unknown angle map '{other}'")),
        }
    }
}

/// Encoder description: wire layout plus feature-to-angle map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EncoderSpec {
    pub layout: EncoderLayout,
    pub angle_map: AngleMap,
}

/// Ordered gate list over a fixed qubit count, with optional symbolic Ry
/// slots filled in by [`Circuit::bind_parameters`].
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    parameter_slots: Vec<usize>,
    bound: bool,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > crate::state::MAX_QUBITS {
            return Err(Error::QubitCountOutOfRange(n_qubits));
        }
        Ok(Circuit {
            n_qubits,
            gates: Vec::new(),
            parameter_slots: Vec::new(),
            bound: true,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Indices into `gates` of the symbolic Ry rotations, in binding order.
    pub fn parameter_slots(&self) -> &[usize] {
        &self.parameter_slots
    }

    pub fn parameter_count(&self) -> usize {
        self.parameter_slots.len()
    }

    /// True when every parameter slot carries a concrete angle.
    pub fn is_bound(&self) -> bool {
        self.bound
    }

    /// Append a concrete gate.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        self.validate_gate(&gate)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Append a symbolic Ry whose angle is supplied later by
    /// `bind_parameters`. Until then the circuit is unbound.
    pub fn push_parameterized_ry(&mut self, qubit: usize) -> Result<()> {
        let gate = Gate::ry(qubit, 0.0);
        self.validate_gate(&gate)?;
        self.parameter_slots.push(self.gates.len());
        self.gates.push(gate);
        self.bound = false;
        Ok(())
    }

    fn validate_gate(&self, gate: &Gate) -> Result<()> {
        for index in gate.qubits() {
            if index >= self.n_qubits {
                return Err(Error::QubitIndexOutOfRange {
                    index,
                    n_qubits: self.n_qubits,
                });
            }
        }
        if let Gate::Cx { control, target } | Gate::Cz { control, target } = *gate {
            if control == target {
                return Err(Error::ControlEqualsTarget(control));
            }
        }
        Ok(())
    }

    /// Fill every parameter slot with a concrete angle, preserving slot
    /// order. Rebinding a bound circuit is allowed and idempotent for
    /// identical values.
    pub fn bind_parameters(&self, params: &[f64]) -> Result<Circuit> {
        if params.len() != self.parameter_slots.len() {
            return Err(Error::WrongParameterCount {
                expected: self.parameter_slots.len(),
                got: params.len(),
            });
        }
        let mut bound = self.clone();
        for (slot, &angle) in bound.parameter_slots.iter().zip(params) {
            match &mut bound.gates[*slot] {
                Gate::Ry { angle: a, .. } => *a = angle,
                _ => unreachable!("parameter slots reference only Ry gates"),
            }
        }
        bound.bound = true;
        Ok(bound)
    }

    /// Concatenate another circuit's gates after this one's. Parameter
    /// slots of `other` are carried over (shifted).
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::RegisterSizeMismatch(self.n_qubits, other.n_qubits));
        }
        let offset = self.gates.len();
        self.gates.extend_from_slice(&other.gates);
        self.parameter_slots
            .extend(other.parameter_slots.iter().map(|s| s + offset));
        self.bound = self.bound && other.bound;
        Ok(())
    }
}

/// Ordered (control, target) pairs of one entangler layer.
///
/// Canonical ordering: Linear is (i, i+1) ascending; Circular appends
/// (width-1, 0); Circular2/Circular4 iterate ring distance k = 1..=K
/// outer, qubit i = 0..width inner, emitting (i, (i+k) mod width); Full is
/// lexicographic (i, j) with i < j.
pub fn entangler_pairs(kind: EntanglerKind, width: usize) -> Result<Vec<(usize, usize)>> {
    if width < kind.min_width() {
        return Err(Error::EntanglerWidthTooSmall {
            kind: kind.name(),
            min: kind.min_width(),
            width,
        });
    }
    let pairs = match kind {
        EntanglerKind::Linear => (0..width - 1).map(|i| (i, i + 1)).collect(),
        EntanglerKind::Circular => {
            let mut pairs: Vec<_> = (0..width - 1).map(|i| (i, i + 1)).collect();
            pairs.push((width - 1, 0));
            pairs
        }
        EntanglerKind::Circular2 => ring_pairs(width, 2),
        EntanglerKind::Circular4 => ring_pairs(width, 4),
        EntanglerKind::Full => {
            let mut pairs = Vec::with_capacity(width * (width - 1) / 2);
            for i in 0..width {
                for j in i + 1..width {
                    pairs.push((i, j));
                }
            }
            pairs
        }
    };
    Ok(pairs)
}

fn ring_pairs(width: usize, max_distance: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(max_distance * width);
    for k in 1..=max_distance {
        for i in 0..width {
            pairs.push((i, (i + k) % width));
        }
    }
    pairs
}

/// Compile an ansatz spec into a circuit with one symbolic Ry per qubit
/// per block, then the entangler. Parameter slots are ordered
/// (block, qubit).
pub fn build_ansatz(spec: &AnsatzSpec) -> Result<Circuit> {
    spec.validate()?;
    let pairs = entangler_pairs(spec.entangler, spec.width)?;
    let mut circuit = Circuit::new(spec.width)?;
    for _ in 0..spec.depth {
        for qubit in 0..spec.width {
            circuit.push_parameterized_ry(qubit)?;
        }
        for &(control, target) in &pairs {
            circuit.push(spec.two_qubit_gate.gate(control, target))?;
        }
    }
    Ok(circuit)
}

/// Compile an encoder into a concrete circuit: one Ry per qubit with the
/// given per-qubit angles (already produced by the feature pipeline).
pub fn build_encoder(spec: &EncoderSpec, angles: &[f64]) -> Result<Circuit> {
    let expected = spec.layout.n_qubits();
    if angles.len() != expected {
        return Err(Error::WrongAngleCount {
            expected,
            got: angles.len(),
        });
    }
    let mut circuit = Circuit::new(expected)?;
    for (qubit, &angle) in angles.iter().enumerate() {
        circuit.push(Gate::ry(qubit, angle))?;
    }
    Ok(circuit)
}

/// Outcome of a unitary comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equivalence {
    pub equivalent: bool,
    pub max_deviation: f64,
}

/// Tolerance for unitary equality.
pub const EQUIVALENCE_TOL: f64 = 1e-9;

/// Compare two concrete circuits by their full unitaries. With
/// `up_to_global_phase`, the first unitary is rotated by the phase that
/// minimizes the Frobenius distance (the phase of tr(A^dagger B)) before
/// the elementwise comparison.
pub fn unitary_equivalent(a: &Circuit, b: &Circuit, up_to_global_phase: bool) -> Result<Equivalence> {
    if a.n_qubits() != b.n_qubits() {
        return Err(Error::RegisterSizeMismatch(a.n_qubits(), b.n_qubits()));
    }
    if a.n_qubits() > MAX_UNITARY_QUBITS {
        return Err(Error::RegisterTooLarge {
            n_qubits: a.n_qubits(),
            limit: MAX_UNITARY_QUBITS,
        });
    }
    let ua = circuit_unitary(a)?;
    let ub = circuit_unitary(b)?;
    let phase = if up_to_global_phase {
        let trace = ua.dagger_mul(&ub).trace();
        if trace.norm() > 1e-12 {
            trace / trace.norm()
        } else {
            Complex64::new(1.0, 0.0)
        }
    } else {
        Complex64::new(1.0, 0.0)
    };
    let dim = ua.dim();
    let mut max_deviation = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let dev = (ua.get(i, j) * phase - ub.get(i, j)).norm();
            max_deviation = max_deviation.max(dev);
        }
    }
    Ok(Equivalence {
        equivalent: max_deviation <= EQUIVALENCE_TOL,
        max_deviation,
    })
}
