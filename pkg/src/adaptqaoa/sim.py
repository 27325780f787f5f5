"""Dense statevector simulation primitives.

Qubit ``q`` is bit ``q`` of the amplitude index (qubit 0 is the least
significant bit). All operations are pure: they return new states.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

NORM_TOL = 1e-9
HERMITICITY_TOL = 1e-10
MAX_QUBITS = 20

AXES = ("X", "Y", "Z")


class SizeError(ValueError):
    """Qubit count outside the supported range."""


class ContractError(ValueError):
    """Operand violates an operation's preconditions."""


class NumericIntegrityError(ArithmeticError):
    """A quantity that must be real came out with an imaginary residue."""


@dataclass(frozen=True)
class QuantumState:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        _check_size(self.n_qubits)
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.n_qubits,):
            raise ContractError(
                f"expected {2**self.n_qubits} amplitudes, got shape {amps.shape}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @classmethod
    def from_vector(cls, vec) -> "QuantumState":
        vec = np.asarray(vec, dtype=complex)
        n = int(round(np.log2(vec.size)))
        return cls(n, vec / np.linalg.norm(vec))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class PauliTerm:
    """coefficient * (product of single-qubit Paulis on distinct qubits)."""

    factors: tuple[tuple[int, str], ...]
    coefficient: float = 1.0

    def __post_init__(self):
        factors = tuple(sorted((int(q), str(a).upper()) for q, a in self.factors))
        qubits = [q for q, _ in factors]
        if len(set(qubits)) != len(qubits):
            raise ContractError(f"repeated qubit in Pauli term {factors}")
        if any(q < 0 for q in qubits) or any(a not in AXES for _, a in factors):
            raise ContractError(f"malformed Pauli term {factors}")
        if not np.isfinite(self.coefficient):
            raise ContractError("Pauli coefficient must be finite")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "coefficient", float(self.coefficient))

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.factors)

    @property
    def is_diagonal(self) -> bool:
        return all(a == "Z" for _, a in self.factors)

    @property
    def x_mask(self) -> int:
        return sum(1 << q for q, a in self.factors if a in "XY")

    @property
    def z_mask(self) -> int:
        return sum(1 << q for q, a in self.factors if a in "YZ")

    @property
    def n_y(self) -> int:
        return sum(a == "Y" for _, a in self.factors)

    @property
    def label(self) -> str:
        return "".join(f"{a}{q}" for q, a in self.factors) or "I"

    def input_phases(self, n: int) -> np.ndarray:
        """Phase picked up by each input basis state: P|b> = phase[b] |b ^ x_mask>.

        Uses Y = iXZ, so P = i^{n_y} X^x Z^z.
        """
        idx = np.arange(2**n)
        parity = np.zeros(idx.size, dtype=np.int64)
        z = self.z_mask
        for q in range(n):
            if z >> q & 1:
                parity ^= (idx >> q) & 1
        return (1j**self.n_y) * (1 - 2 * parity)


def pauli(label: str, coefficient: float = 1.0) -> PauliTerm:
    """Parse a compact label such as ``"X0Y4"`` or ``"Z1Z2"``."""
    factors = []
    i = 0
    while i < len(label):
        axis = label[i].upper()
        j = i + 1
        while j < len(label) and label[j].isdigit():
            j += 1
        if axis not in AXES or j == i + 1:
            raise ContractError(f"cannot parse Pauli label {label!r}")
        factors.append((int(label[i + 1 : j]), axis))
        i = j
    return PauliTerm(tuple(factors), coefficient)


# A mixer is either a single string or a commuting sum of strings.
Operator = Union[PauliTerm, Sequence[PauliTerm]]


def _terms(op) -> tuple[PauliTerm, ...]:
    if isinstance(op, PauliTerm):
        return (op,)
    terms = getattr(op, "terms", op)
    terms = tuple(terms)
    if not terms or not all(isinstance(t, PauliTerm) for t in terms):
        raise ContractError(f"malformed operator {op!r}")
    return terms


def _check_size(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_QUBITS:
        raise SizeError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n!r}")


def _check_support(term: PauliTerm, n: int) -> None:
    if term.factors and max(term.qubits) >= n:
        raise ContractError(f"term {term.label} acts outside {n} qubits")


def _checked(n: int, amps: np.ndarray) -> QuantumState:
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > NORM_TOL:
        raise NumericIntegrityError(f"norm drifted to {norm!r}")
    return QuantumState(n, amps)


def init_plus_state(n: int) -> QuantumState:
    _check_size(n)
    return QuantumState(n, np.full(2**n, 2 ** (-n / 2), dtype=complex))


def init_symmetry_broken_state(n: int) -> QuantumState:
    """Qubit 0 in |1>, all others in |+>."""
    _check_size(n)
    amps = np.zeros(2**n, dtype=complex)
    amps[1::2] = 2 ** (-(n - 1) / 2)
    return QuantumState(n, amps)


def basis_state(n: int, index: int) -> QuantumState:
    _check_size(n)
    amps = np.zeros(2**n, dtype=complex)
    amps[index] = 1.0
    return QuantumState(n, amps)


def apply_pauli(state: QuantumState, term: PauliTerm) -> np.ndarray:
    """Return P|psi> as a raw vector (coefficient ignored)."""
    _check_support(term, state.n_qubits)
    out = np.empty_like(state.amplitudes)
    idx = np.arange(state.amplitudes.size)
    out[idx ^ term.x_mask] = term.input_phases(state.n_qubits) * state.amplitudes
    return out


def apply_operator(state: QuantumState, op: Operator) -> np.ndarray:
    """Return (sum_k c_k P_k)|psi> as a raw vector."""
    out = np.zeros_like(state.amplitudes)
    for term in _terms(op):
        out += term.coefficient * apply_pauli(state, term)
    return out


def diagonal_energies(hamiltonian: Iterable[PauliTerm], n: int) -> np.ndarray:
    """Eigenvalue of an all-Z Hamiltonian on every computational basis state."""
    idx = np.arange(2**n)
    energies = np.zeros(2**n)
    for term in hamiltonian:
        if not term.is_diagonal:
            raise ContractError(f"non-diagonal term {term.label} in diagonal Hamiltonian")
        _check_support(term, n)
        parity = np.zeros(idx.size, dtype=np.int64)
        for q in term.qubits:
            parity ^= (idx >> q) & 1
        energies += term.coefficient * (1 - 2 * parity)
    return energies


def apply_diagonal_evolution(
    state: QuantumState, hamiltonian: Iterable[PauliTerm], gamma: float
) -> QuantumState:
    """exp(-i gamma H)|psi> for diagonal H."""
    energies = diagonal_energies(hamiltonian, state.n_qubits)
    return _checked(state.n_qubits, np.exp(-1j * gamma * energies) * state.amplitudes)


def apply_pauli_rotation(state: QuantumState, op: Operator, beta: float) -> QuantumState:
    """exp(-i beta A)|psi> for a Pauli string or a sum of commuting strings.

    Each string is exponentiated in closed form,
    exp(-i t P) = cos(t) I - i sin(t) P with t = beta * coefficient.
    Sums are applied factor by factor, which is exact only when the strings
    commute (true for every pool element and for sum_i X_i, sum_i Y_i).
    """
    terms = _terms(op)
    amps = state.amplitudes
    for term in terms:
        t = beta * term.coefficient
        rotated = apply_pauli(QuantumState(state.n_qubits, amps), term)
        amps = np.cos(t) * amps - 1j * np.sin(t) * rotated
    return _checked(state.n_qubits, amps)


def expectation(state: QuantumState, hamiltonian: Iterable[PauliTerm]) -> float:
    total = 0j
    for term in hamiltonian:
        total += term.coefficient * np.vdot(state.amplitudes, apply_pauli(state, term))
    if abs(total.imag) > HERMITICITY_TOL:
        raise NumericIntegrityError(f"expectation has imaginary part {total.imag!r}")
    return float(total.real)


def commutator_expectation(
    state: QuantumState, a: Operator, h: Iterable[PauliTerm]
) -> float:
    """i<psi|[A, H]|psi>, the derivative of <exp(i b A) H exp(-i b A)> at b = 0."""
    a_psi = apply_operator(state, a)
    h_terms = tuple(h)
    h_psi = apply_operator(state, h_terms) if h_terms else np.zeros_like(a_psi)
    overlap = np.vdot(a_psi, h_psi)  # <psi|A H|psi>
    value = 1j * (overlap - np.conj(overlap))
    if abs(value.imag) > HERMITICITY_TOL:
        raise NumericIntegrityError(f"commutator expectation not real: {value!r}")
    return float(value.real)

