//! Dense state-vector engine for small qubit registers.
//!
//! Amplitudes are stored with qubit 0 as the most significant bit of the
//! basis index: for an n-qubit register, the bit of qubit `q` in basis
//! index `i` is `(i >> (n - 1 - q)) & 1`. This matches top-to-bottom wire
//! diagrams where the top wire is qubit 0 and the bottom wire is qubit
//! n-1.
//!
//! Gates are applied in place with stride arithmetic; full 2^n x 2^n
//! matrices are only materialized by [`circuit_unitary`].

use num_complex::Complex64;

use crate::circuit::Circuit;
use crate::error::Error;
use crate::Result;

/// Largest register the engine accepts.
pub const MAX_QUBITS: usize = 14;

/// Largest register for which a full unitary may be extracted.
pub const MAX_UNITARY_QUBITS: usize = 10;

/// Absolute tolerance for state-level assertions (norms, Hermiticity, traces).
pub const STATE_TOL: f64 = 1e-10;

/// A single gate: Ry rotation or a controlled two-qubit gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    /// Rotation about the Y axis: [[cos t/2, -sin t/2], [sin t/2, cos t/2]].
    Ry { qubit: usize, angle: f64 },
    /// Controlled-X (CNOT).
    Cx { control: usize, target: usize },
    /// Controlled-Z.
    Cz { control: usize, target: usize },
}

impl Gate {
    pub fn ry(qubit: usize, angle: f64) -> Self {
        Gate::Ry { qubit, angle }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Gate::Cx { control, target }
    }

    pub fn cz(control: usize, target: usize) -> Self {
        Gate::Cz { control, target }
    }

    /// Qubit indices the gate touches.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Ry { qubit, .. } => vec![qubit],
            Gate::Cx { control, target } | Gate::Cz { control, target } => vec![control, target],
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        let check = |index: usize| {
            if index >= n_qubits {
                Err(Error::QubitIndexOutOfRange { index, n_qubits })
            } else {
                Ok(())
            }
        };
        match *self {
            Gate::Ry { qubit, .. } => check(qubit),
            Gate::Cx { control, target } | Gate::Cz { control, target } => {
                check(control)?;
                check(target)?;
                if control == target {
                    return Err(Error::ControlEqualsTarget(control));
                }
                Ok(())
            }
        }
    }
}

/// Normalized vector of 2^n complex amplitudes for an n-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The |0...0> state on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitCountOutOfRange(n_qubits));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    /// Build a state from raw amplitudes. The length must be 2^n for n in
    /// 1..=14 and the vector must already be normalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::QubitCountOutOfRange(0));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::QubitCountOutOfRange(n_qubits));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > 1e-6 {
            return Err(Error::NotADensityMatrix(format!(
                "amplitude vector has squared norm {norm_sqr}, expected 1"
            )));
        }
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Sum of |a_i|^2; stays within 1e-10 of 1 under gate application.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Bit mask selecting `qubit` in a basis index (qubit 0 = MSB).
    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    /// Apply one gate in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match *gate {
            Gate::Ry { qubit, angle } => {
                let half = 0.5 * angle;
                let c = half.cos();
                let s = half.sin();
                let mask = self.mask(qubit);
                let block = mask << 1;
                let dim = self.amplitudes.len();
                let mut base = 0;
                while base < dim {
                    for offset in 0..mask {
                        let i0 = base + offset;
                        let i1 = i0 + mask;
                        let a0 = self.amplitudes[i0];
                        let a1 = self.amplitudes[i1];
                        self.amplitudes[i0] = a0 * c - a1 * s;
                        self.amplitudes[i1] = a0 * s + a1 * c;
                    }
                    base += block;
                }
            }
            Gate::Cx { control, target } => {
                let mc = self.mask(control);
                let mt = self.mask(target);
                for i in 0..self.amplitudes.len() {
                    if i & mc != 0 && i & mt == 0 {
                        self.amplitudes.swap(i, i | mt);
                    }
                }
            }
            Gate::Cz { control, target } => {
                let mc = self.mask(control);
                let mt = self.mask(target);
                for i in 0..self.amplitudes.len() {
                    if i & mc != 0 && i & mt != 0 {
                        self.amplitudes[i] = -self.amplitudes[i];
                    }
                }
            }
        }
        Ok(())
    }

    /// Apply every gate of a fully bound circuit, in order.
    pub fn run(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(Error::RegisterSizeMismatch(
                circuit.n_qubits(),
                self.n_qubits,
            ));
        }
        if !circuit.is_bound() {
            return Err(Error::UnboundParameters);
        }
        for gate in circuit.gates() {
            self.apply(gate)?;
        }
        Ok(())
    }

    /// Expectation value of Pauli Z on one qubit, in [-1, 1].
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitIndexOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        let mask = self.mask(qubit);
        let mut value = 0.0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            if i & mask == 0 {
                value += p;
            } else {
                value -= p;
            }
        }
        Ok(value)
    }

    /// |<self|other>|^2 in [0, 1].
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::RegisterSizeMismatch(self.n_qubits, other.n_qubits));
        }
        let overlap: Complex64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(overlap.norm_sqr())
    }

    /// Partial trace over every qubit except `qubit`.
    pub fn reduced_density_matrix(&self, qubit: usize) -> Result<DensityMatrix1Q> {
        if self.n_qubits < 2 {
            return Err(Error::QubitCountOutOfRange(self.n_qubits));
        }
        if qubit >= self.n_qubits {
            return Err(Error::QubitIndexOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        let mask = self.mask(qubit);
        let mut p00 = 0.0;
        let mut p11 = 0.0;
        let mut coh = Complex64::new(0.0, 0.0);
        for (i, a) in self.amplitudes.iter().enumerate() {
            if i & mask == 0 {
                let b = self.amplitudes[i | mask];
                p00 += a.norm_sqr();
                p11 += b.norm_sqr();
                coh += a * b.conj();
            }
        }
        Ok(DensityMatrix1Q {
            entries: [
                [Complex64::new(p00, 0.0), coh],
                [coh.conj(), Complex64::new(p11, 0.0)],
            ],
        })
    }
}

/// 2x2 Hermitian, trace-1 reduced state of a single qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix1Q {
    entries: [[Complex64; 2]; 2],
}

impl DensityMatrix1Q {
    /// Validating constructor: Hermitian within 1e-10, trace 1 within
    /// 1e-10, eigenvalues within [-1e-10, 1 + 1e-10].
    pub fn new(entries: [[Complex64; 2]; 2]) -> Result<Self> {
        if entries[0][0].im.abs() > STATE_TOL || entries[1][1].im.abs() > STATE_TOL {
            return Err(Error::NotADensityMatrix(
                "diagonal entries are not real".into(),
            ));
        }
        if (entries[0][1] - entries[1][0].conj()).norm() > STATE_TOL {
            return Err(Error::NotADensityMatrix("matrix is not Hermitian".into()));
        }
        let trace = entries[0][0].re + entries[1][1].re;
        if (trace - 1.0).abs() > STATE_TOL {
            return Err(Error::NotADensityMatrix(format!(
                "trace is {trace}, expected 1"
            )));
        }
        let rho = DensityMatrix1Q { entries };
        let (lo, hi) = rho.eigenvalues();
        if lo < -STATE_TOL || hi > 1.0 + STATE_TOL {
            return Err(Error::NotADensityMatrix(format!(
                "eigenvalues ({lo}, {hi}) outside [0, 1]"
            )));
        }
        Ok(rho)
    }

    pub fn entries(&self) -> &[[Complex64; 2]; 2] {
        &self.entries
    }

    /// Eigenvalues (smaller, larger), via the closed form for 2x2
    /// Hermitian matrices.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let a = self.entries[0][0].re;
        let d = self.entries[1][1].re;
        let mid = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + self.entries[0][1].norm_sqr()).sqrt();
        (mid - radius, mid + radius)
    }

    /// Von Neumann entropy in base 2: -sum lambda_i log2 lambda_i, with
    /// 0 log 0 = 0. Lies in [0, 1] for a single qubit.
    pub fn entropy_log2(&self) -> f64 {
        let (lo, hi) = self.eigenvalues();
        let term = |l: f64| {
            let l = l.clamp(0.0, 1.0);
            if l > 0.0 {
                -l * l.log2()
            } else {
                0.0
            }
        };
        term(lo) + term(hi)
    }
}

/// Dense 2^n x 2^n complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    dim: usize,
    data: Vec<Complex64>,
}

impl Unitary {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    /// Conjugate-transpose product: self^dagger * other.
    pub fn dagger_mul(&self, other: &Unitary) -> Unitary {
        assert_eq!(self.dim, other.dim);
        let dim = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                let a = self.data[k * dim + i].conj();
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..dim {
                    data[i * dim + j] += a * other.data[k * dim + j];
                }
            }
        }
        Unitary { dim, data }
    }

    /// Largest elementwise deviation from the identity.
    pub fn max_deviation_from_identity(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let expected = if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                worst = worst.max((self.get(i, j) - expected).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }
}

/// Full unitary of a bound circuit: column j is the circuit applied to
/// basis state j. Limited to 10 qubits.
pub fn circuit_unitary(circuit: &Circuit) -> Result<Unitary> {
    let n = circuit.n_qubits();
    if n > MAX_UNITARY_QUBITS {
        return Err(Error::RegisterTooLarge {
            n_qubits: n,
            limit: MAX_UNITARY_QUBITS,
        });
    }
    if !circuit.is_bound() {
        return Err(Error::UnboundParameters);
    }
    let dim = 1 << n;
    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
    for col in 0..dim {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[col] = Complex64::new(1.0, 0.0);
        let mut state = StateVector {
            n_qubits: n,
            amplitudes,
        };
        state.run(circuit)?;
        for row in 0..dim {
            data[row * dim + col] = state.amplitudes[row];
        }
    }
    Ok(Unitary { dim, data })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Circuit;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn bell_state() -> StateVector {
        let mut state = StateVector::zero(2).unwrap();
        state.apply(&Gate::ry(0, PI / 2.0)).unwrap();
        state.apply(&Gate::cx(0, 1)).unwrap();
        state
    }

    #[test]
    fn zero_state_examples() {
        let one = StateVector::zero(1).unwrap();
        assert_eq!(one.amplitudes(), &[c(1.0), c(0.0)]);

        let two = StateVector::zero(2).unwrap();
        assert_eq!(two.amplitudes(), &[c(1.0), c(0.0), c(0.0), c(0.0)]);

        let five = StateVector::zero(5).unwrap();
        assert_eq!(five.amplitudes().len(), 32);
        assert_eq!(five.amplitudes()[0], c(1.0));
        assert!(five.amplitudes()[1..].iter().all(|a| a.norm_sqr() == 0.0));
    }

    #[test]
    fn zero_state_rejects_out_of_range_counts() {
        assert!(matches!(
            StateVector::zero(0),
            Err(Error::QubitCountOutOfRange(0))
        ));
        assert!(matches!(
            StateVector::zero(15),
            Err(Error::QubitCountOutOfRange(15))
        ));
    }

    #[test]
    fn ry_half_rotation_makes_uniform_superposition() {
        let mut state = StateVector::zero(1).unwrap();
        state.apply(&Gate::ry(0, PI / 2.0)).unwrap();
        assert_close(state.amplitudes()[0].re, FRAC_1_SQRT_2, 1e-12);
        assert_close(state.amplitudes()[1].re, FRAC_1_SQRT_2, 1e-12);
    }

    #[test]
    fn cx_after_flipping_control_gives_11() {
        let mut state = StateVector::zero(2).unwrap();
        state.apply(&Gate::ry(0, PI)).unwrap();
        state.apply(&Gate::cx(0, 1)).unwrap();
        // |11> is basis index 3 with qubit 0 as MSB
        assert_close(state.amplitudes()[3].norm_sqr(), 1.0, 1e-12);
    }

    #[test]
    fn cz_flips_phase_of_11_component() {
        let mut state = bell_state();
        state.apply(&Gate::cz(0, 1)).unwrap();
        assert_close(state.amplitudes()[0].re, FRAC_1_SQRT_2, 1e-12);
        assert_close(state.amplitudes()[3].re, -FRAC_1_SQRT_2, 1e-12);
    }

    #[test]
    fn gate_validation_errors() {
        let mut state = StateVector::zero(2).unwrap();
        assert!(matches!(
            state.apply(&Gate::ry(2, 0.1)),
            Err(Error::QubitIndexOutOfRange { index: 2, .. })
        ));
        assert!(matches!(
            state.apply(&Gate::cx(1, 1)),
            Err(Error::ControlEqualsTarget(1))
        ));
    }

    #[test]
    fn expectation_z_examples() {
        let zero = StateVector::zero(1).unwrap();
        assert_close(zero.expectation_z(0).unwrap(), 1.0, 1e-15);

        for theta in [0.0, PI / 3.0, PI / 2.0, PI] {
            let mut state = StateVector::zero(1).unwrap();
            state.apply(&Gate::ry(0, theta)).unwrap();
            assert_close(state.expectation_z(0).unwrap(), theta.cos(), 1e-12);
        }

        let bell = bell_state();
        assert_close(bell.expectation_z(1).unwrap(), 0.0, 1e-12);
    }

    #[test]
    fn fidelity_examples() {
        let bell = bell_state();
        assert_close(bell.fidelity(&bell).unwrap(), 1.0, 1e-12);

        let zero = StateVector::zero(1).unwrap();
        let mut one = StateVector::zero(1).unwrap();
        one.apply(&Gate::ry(0, PI)).unwrap();
        assert_close(zero.fidelity(&one).unwrap(), 0.0, 1e-12);

        let mut plus = StateVector::zero(1).unwrap();
        plus.apply(&Gate::ry(0, PI / 2.0)).unwrap();
        assert_close(zero.fidelity(&plus).unwrap(), 0.5, 1e-12);

        let two = StateVector::zero(2).unwrap();
        assert!(zero.fidelity(&two).is_err());
    }

    #[test]
    fn reduced_density_matrix_of_product_state_is_pure() {
        let theta = 0.77;
        let mut state = StateVector::zero(2).unwrap();
        state.apply(&Gate::ry(0, theta)).unwrap();
        let rho = state.reduced_density_matrix(0).unwrap();
        let half = theta / 2.0;
        let e = rho.entries();
        assert_close(e[0][0].re, half.cos() * half.cos(), 1e-12);
        assert_close(e[1][1].re, half.sin() * half.sin(), 1e-12);
        assert_close(e[0][1].re, half.cos() * half.sin(), 1e-12);
        assert_close(rho.entropy_log2(), 0.0, 1e-12);
    }

    #[test]
    fn reduced_density_matrix_of_bell_state_is_maximally_mixed() {
        let bell = bell_state();
        for qubit in [0, 1] {
            let rho = bell.reduced_density_matrix(qubit).unwrap();
            let e = rho.entries();
            assert_close(e[0][0].re, 0.5, 1e-12);
            assert_close(e[1][1].re, 0.5, 1e-12);
            assert_close(e[0][1].norm(), 0.0, 1e-12);
            assert_close(rho.entropy_log2(), 1.0, 1e-12);
        }
    }

    #[test]
    fn entropy_of_quarter_three_quarter_mixture() {
        let rho = DensityMatrix1Q::new([[c(0.25), c(0.0)], [c(0.0), c(0.75)]]).unwrap();
        // direct evaluation of -sum lambda log2 lambda
        let expected = -(0.25f64 * 0.25f64.log2() + 0.75 * 0.75f64.log2());
        assert_close(rho.entropy_log2(), expected, 1e-15);
        assert_close(rho.entropy_log2(), 0.811278, 1e-6);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix1Q::new([[c(0.25), c(0.1)], [c(0.3), c(0.75)]]).is_err());
        assert!(DensityMatrix1Q::new([[c(0.5), c(0.0)], [c(0.0), c(0.6)]]).is_err());
        // trace 1 but an eigenvalue above 1
        assert!(DensityMatrix1Q::new([[c(1.5), c(0.0)], [c(0.0), c(-0.5)]]).is_err());
    }

    #[test]
    fn circuit_unitary_examples() {
        let empty = Circuit::new(2).unwrap();
        let u = circuit_unitary(&empty).unwrap();
        assert!(u.max_deviation_from_identity() < 1e-15);

        let mut cx = Circuit::new(2).unwrap();
        cx.push(Gate::cx(0, 1)).unwrap();
        let u = circuit_unitary(&cx).unwrap();
        // CX with control as MSB swaps the last two columns of the identity
        let expected = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ];
        for (i, row) in expected.iter().enumerate() {
            for (j, want) in row.iter().enumerate() {
                assert_close(u.get(i, j).re, *want, 1e-15);
                assert_close(u.get(i, j).im, 0.0, 1e-15);
            }
        }

        let theta = 1.234;
        let mut ry = Circuit::new(1).unwrap();
        ry.push(Gate::ry(0, theta)).unwrap();
        let u = circuit_unitary(&ry).unwrap();
        let half = theta / 2.0;
        assert_close(u.get(0, 0).re, half.cos(), 1e-12);
        assert_close(u.get(0, 1).re, -half.sin(), 1e-12);
        assert_close(u.get(1, 0).re, half.sin(), 1e-12);
        assert_close(u.get(1, 1).re, half.cos(), 1e-12);
    }

    #[test]
    fn circuit_unitary_rejects_large_registers() {
        let circuit = Circuit::new(11).unwrap();
        assert!(matches!(
            circuit_unitary(&circuit),
            Err(Error::RegisterTooLarge { n_qubits: 11, .. })
        ));
    }
}
