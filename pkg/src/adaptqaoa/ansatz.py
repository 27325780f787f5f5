"""Layered QAOA / ADAPT-QAOA ansatz programs.

A program with ``p`` layers prepares

    prod_{l=1..p} exp(-i beta_l A_l) exp(-i gamma_l H) |reference>

with parameters ordered (gamma_1, beta_1, gamma_2, beta_2, ...). The hot path
(energy evaluation inside the optimizer) runs through a compiled kernel; the
pure-numpy route through ``sim`` is kept as ``evaluate_reference``.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numba
import numpy as np

from . import sim
from .problem import CostHamiltonian
from .sim import ContractError, PauliTerm, QuantumState

DEFAULT_GAMMA0 = 0.01


class Reference(enum.Enum):
    ALL_PLUS = "plus"
    SYMMETRY_BROKEN = "broken"

    def state(self, n: int) -> QuantumState:
        if self is Reference.ALL_PLUS:
            return sim.init_plus_state(n)
        return sim.init_symmetry_broken_state(n)


@dataclass(frozen=True)
class MixerOperator:
    """Hermitian mixer generator: one Pauli string or a commuting sum of them."""

    token: str
    terms: tuple[PauliTerm, ...]
    n_qubits: int

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted({q for t in self.terms for q in t.qubits}))

    @property
    def is_global(self) -> bool:
        return len(self.terms) > 1

    @property
    def is_two_qubit(self) -> bool:
        return len(self.terms) == 1 and len(self.terms[0].factors) == 2

    @property
    def is_single_qubit(self) -> bool:
        return len(self.terms) == 1 and len(self.terms[0].factors) == 1

    @cached_property
    def kernel_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        xmasks = np.array([t.x_mask for t in self.terms], dtype=np.int64)
        phases = np.array([t.input_phases(self.n_qubits) for t in self.terms], dtype=complex)
        coefs = np.array([t.coefficient for t in self.terms], dtype=float)
        return xmasks, phases, coefs

    def __str__(self):
        return self.token


def global_x(n: int) -> MixerOperator:
    return MixerOperator("M", tuple(PauliTerm(((q, "X"),)) for q in range(n)), n)


def global_y(n: int) -> MixerOperator:
    return MixerOperator("N", tuple(PauliTerm(((q, "Y"),)) for q in range(n)), n)


_TOKEN_RE = re.compile(r"([XYZ])(\d+)")


def mixer_from_token(token: str, n: int) -> MixerOperator:
    """Inverse of ``MixerOperator.token``: "M", "N", "X3", "X0Y4", "Y2Z5", ..."""
    if token == "M":
        return global_x(n)
    if token == "N":
        return global_y(n)
    parts = _TOKEN_RE.findall(token)
    if not parts or "".join(a + q for a, q in parts) != token:
        raise ContractError(f"unknown mixer token {token!r}")
    # keep the written order: "Y3X0" and "X0Y3" name the same operator
    term = PauliTerm(tuple((int(q), a) for a, q in parts))
    if max(term.qubits) >= n:
        raise ContractError(f"mixer {token} acts outside {n} qubits")
    return MixerOperator(token, (term,), n)


@dataclass(frozen=True)
class AnsatzProgram:
    reference: Reference
    mixers: tuple[MixerOperator, ...] = ()

    @property
    def n_layers(self) -> int:
        return len(self.mixers)

    @property
    def n_params(self) -> int:
        return 2 * len(self.mixers)

    def append(self, mixer: MixerOperator) -> "AnsatzProgram":
        return AnsatzProgram(self.reference, self.mixers + (mixer,))

    def truncate(self, n_layers: int) -> "AnsatzProgram":
        return AnsatzProgram(self.reference, self.mixers[:n_layers])

    @property
    def tokens(self) -> list[str]:
        return [m.token for m in self.mixers]


def standard_qaoa(n: int, p: int, reference: Reference = Reference.ALL_PLUS) -> AnsatzProgram:
    return AnsatzProgram(reference, (global_x(n),) * p)


@numba.njit(cache=True)
def _run_layers(psi, diag, params, offsets, xmasks, phases, coefs):
    dim = psi.size
    tmp = np.empty_like(psi)
    for layer in range(offsets.size - 1):
        gamma = params[2 * layer]
        beta = params[2 * layer + 1]
        for k in range(dim):
            psi[k] *= np.exp(-1j * gamma * diag[k])
        for t in range(offsets[layer], offsets[layer + 1]):
            x = xmasks[t]
            for k in range(dim):
                tmp[k ^ x] = phases[t, k] * psi[k]
            c = np.cos(beta * coefs[t])
            s = np.sin(beta * coefs[t])
            for k in range(dim):
                psi[k] = c * psi[k] - 1j * s * tmp[k]
    return psi


@numba.njit(cache=True)
def _diag_expectation(psi, diag):
    total = 0.0
    for k in range(psi.size):
        total += (psi[k].real ** 2 + psi[k].imag ** 2) * diag[k]
    return total


class CompiledAnsatz:
    """A program bound to a diagonal cost Hamiltonian, ready for repeated evaluation."""

    def __init__(self, program: AnsatzProgram, h: CostHamiltonian):
        self.program = program
        self.h = h
        n = h.n_qubits
        for m in program.mixers:
            if m.n_qubits != n:
                raise ContractError(f"mixer {m.token} built for {m.n_qubits} qubits, not {n}")
        self.n_qubits = n
        self.reference = program.reference.state(n).amplitudes
        self.diag = np.ascontiguousarray(h.diagonal, dtype=float)
        counts = [len(m.terms) for m in program.mixers]
        self.offsets = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        if program.mixers:
            arrays = [m.kernel_arrays for m in program.mixers]
            self.xmasks = np.concatenate([a[0] for a in arrays])
            self.phases = np.ascontiguousarray(np.concatenate([a[1] for a in arrays]))
            self.coefs = np.concatenate([a[2] for a in arrays])
        else:
            self.xmasks = np.zeros(0, dtype=np.int64)
            self.phases = np.zeros((0, 2**n), dtype=complex)
            self.coefs = np.zeros(0)

    def _check(self, params) -> np.ndarray:
        params = np.asarray(params, dtype=float)
        if params.shape != (self.program.n_params,):
            raise ContractError(
                f"expected {self.program.n_params} parameters, got {params.shape}"
            )
        return params

    def amplitudes(self, params) -> np.ndarray:
        params = self._check(params)
        return _run_layers(
            self.reference.copy(), self.diag, params,
            self.offsets, self.xmasks, self.phases, self.coefs,
        )

    def state(self, params) -> QuantumState:
        return QuantumState(self.n_qubits, self.amplitudes(params))

    def energy(self, params) -> float:
        return float(_diag_expectation(self.amplitudes(params), self.diag))

    __call__ = energy


def evaluate(program: AnsatzProgram, params, h: CostHamiltonian, n: int | None = None) -> QuantumState:
    if n is not None and n != h.n_qubits:
        raise ContractError(f"Hamiltonian acts on {h.n_qubits} qubits, not {n}")
    return CompiledAnsatz(program, h).state(params)


def energy_of(program: AnsatzProgram, params, h: CostHamiltonian, n: int | None = None) -> float:
    if n is not None and n != h.n_qubits:
        raise ContractError(f"Hamiltonian acts on {h.n_qubits} qubits, not {n}")
    return CompiledAnsatz(program, h).energy(params)


def evaluate_reference(program: AnsatzProgram, params, h: CostHamiltonian) -> QuantumState:
    """Same as ``evaluate`` but composed from the ``sim`` primitives."""
    params = np.asarray(params, dtype=float)
    if params.shape != (program.n_params,):
        raise ContractError(f"expected {program.n_params} parameters, got {params.shape}")
    state = program.reference.state(h.n_qubits)
    for layer, mixer in enumerate(program.mixers):
        state = sim.apply_diagonal_evolution(state, h.terms, params[2 * layer])
        state = sim.apply_pauli_rotation(state, mixer.terms, params[2 * layer + 1])
    return state


def warm_start_params(previous_optimal: Sequence[float], gamma0: float = DEFAULT_GAMMA0) -> np.ndarray:
    return np.concatenate([np.asarray(previous_optimal, dtype=float), [gamma0, 0.0]])


def program_to_json(program: AnsatzProgram, params) -> list[dict]:
    params = np.asarray(params, dtype=float)
    return [
        {"gamma": float(params[2 * l]), "beta": float(params[2 * l + 1]), "mixer": m.token}
        for l, m in enumerate(program.mixers)
    ]


def program_from_json(
    layers: list[dict], n: int, reference: Reference = Reference.ALL_PLUS
) -> tuple[AnsatzProgram, np.ndarray]:
    mixers = tuple(mixer_from_token(layer["mixer"], n) for layer in layers)
    params = np.array([v for layer in layers for v in (layer["gamma"], layer["beta"])], dtype=float)
    return AnsatzProgram(reference, mixers), params
