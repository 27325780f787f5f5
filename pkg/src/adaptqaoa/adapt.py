"""ADAPT-QAOA: operator pools, gradient-based mixer selection, and the layer-growth loop.

The same loop drives standard QAOA (mixer fixed to sum_i X_i, no selection).
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import entanglement as ent
from .ansatz import (
    DEFAULT_GAMMA0, AnsatzProgram, CompiledAnsatz, MixerOperator, Reference,
    global_x, global_y, warm_start_params,
)
from .optimizer import NonFiniteObjective, OptimizerConfig, minimize
from .problem import (
    DEFAULT_FIELD, CostHamiltonian, ProblemInstance, brute_force, normalized_error,
)
from .records import LayerRow, RunRecord
from .resources import cnot_cost_of_layer
from .sim import ContractError, PauliTerm, QuantumState

log = logging.getLogger(__name__)

DEGENERATE_TOL = 1e-10
PAIR_TYPES = ("XX", "YY", "XY", "XZ", "YZ")


class Connectivity(enum.Enum):
    FULL = "full"
    LADDER = "ladder"
    LINEAR = "linear"


class Mode(enum.Enum):
    PRESERVE = "preserve"
    BREAK = "break"


def coupling_pairs(n: int, connectivity: Connectivity) -> set[tuple[int, int]]:
    """Unordered qubit pairs allowed to carry two-qubit pool elements.

    The ladder places qubit q at grid position (q mod 2, q div 2) on a
    2 x (n/2) grid.
    """
    if connectivity is Connectivity.FULL:
        return {(j, k) for j in range(n) for k in range(j + 1, n)}
    if connectivity is Connectivity.LINEAR:
        return {(q, q + 1) for q in range(n - 1)}
    if n % 2:
        raise ContractError(f"ladder pool needs an even qubit count, got {n}")
    rungs = {(q, q + 1) for q in range(0, n, 2)}
    rails = {(q, q + 2) for q in range(n - 2)}
    return rungs | rails


@dataclass(frozen=True)
class OperatorPool:
    connectivity: Connectivity
    elements: tuple[MixerOperator, ...]
    n_qubits: int

    def __len__(self):
        return len(self.elements)

    @cached_property
    def tokens(self) -> list[str]:
        return [m.token for m in self.elements]

    @cached_property
    def two_qubit_mask(self) -> np.ndarray:
        return np.array([m.is_two_qubit for m in self.elements])

    @cached_property
    def _gather(self):
        # one row per Pauli string across all elements
        dim = 2**self.n_qubits
        idx = np.arange(dim)
        rows, phases, coefs, owner = [], [], [], []
        for e, m in enumerate(self.elements):
            xmasks, ph, cf = m.kernel_arrays
            for x, p, c in zip(xmasks, ph, cf):
                rows.append(idx ^ x)
                phases.append(p)
                coefs.append(c)
                owner.append(e)
        return np.array(rows), np.array(phases), np.array(coefs), np.array(owner)

    def gradients(self, state: np.ndarray, h_diag: np.ndarray) -> np.ndarray:
        """i<psi|[A, H]|psi> = -2 Im <A psi|H psi> for every element A, H diagonal."""
        rows, phases, coefs, owner = self._gather
        a_psi = (phases * state)[np.arange(len(rows))[:, None], rows]
        per_term = -2.0 * np.imag(a_psi.conj() @ (h_diag * state)) * coefs
        return np.bincount(owner, weights=per_term, minlength=len(self.elements))


def build_pool(n: int, connectivity: Connectivity | str = Connectivity.FULL) -> OperatorPool:
    """Canonical order: M, N, (X_q, Y_q) by qubit, then pairs by (type, j, k).

    Both orderings (j, k) and (k, j) are kept for every pair type, so the
    full pool has 2 + 2n + 5 n (n - 1) elements; for XX and YY the two
    orderings are the same operator and the first one wins ties.
    """
    connectivity = Connectivity(connectivity)
    if n < 2:
        raise ContractError("pool needs at least 2 qubits")
    allowed = coupling_pairs(n, connectivity)
    elements = [global_x(n), global_y(n)]
    for q in range(n):
        for axis in "XY":
            elements.append(MixerOperator(f"{axis}{q}", (PauliTerm(((q, axis),)),), n))
    for a, b in PAIR_TYPES:
        for j in range(n):
            for k in range(n):
                if j != k and (min(j, k), max(j, k)) in allowed:
                    term = PauliTerm(((j, a), (k, b)))
                    elements.append(MixerOperator(f"{a}{j}{b}{k}", (term,), n))
    return OperatorPool(connectivity, tuple(elements), n)


def qaoa_pool(n: int) -> OperatorPool:
    return OperatorPool(Connectivity.FULL, (global_x(n),), n)


@dataclass
class SelectionReport:
    tokens: list[str]
    gradients: np.ndarray
    scaled_gradients: np.ndarray
    chosen_index: int
    chosen: MixerOperator
    delta: float
    degenerate: bool

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.tokens, self.gradients.tolist()))


def penalty_scaling(pool: OperatorPool, delta: float) -> np.ndarray:
    if not abs(delta) < 1:
        raise ValueError(f"|delta| must be < 1, got {delta}")
    return np.where(pool.two_qubit_mask, 1.0 - delta, 1.0)


def select_mixer(
    state_prev: QuantumState | np.ndarray,
    h: CostHamiltonian,
    pool: OperatorPool,
    gamma0: float = DEFAULT_GAMMA0,
    delta: float = 0.0,
) -> SelectionReport:
    """Pick the pool element with the largest (penalty-scaled) energy gradient.

    Gradients are taken on exp(-i gamma0 H)|state_prev>, i.e. with the new
    layer's cost angle at gamma0 and its mixer angle at 0. Two-qubit elements
    have their magnitude scaled by (1 - delta). Ties go to the earliest element.
    """
    if len(pool) == 0:
        raise ContractError("empty operator pool")
    amps = getattr(state_prev, "amplitudes", state_prev)
    diag = h.diagonal
    psi = np.exp(-1j * gamma0 * diag) * amps
    grads = pool.gradients(psi, diag)
    scaled = np.abs(grads) * penalty_scaling(pool, delta)
    best = int(np.argmax(scaled))  # argmax returns the first maximum
    degenerate = bool(scaled[best] < DEGENERATE_TOL)
    return SelectionReport(pool.tokens, grads, scaled, best, pool.elements[best], delta, degenerate)


def anticommutes_with_parity(mixer: MixerOperator) -> bool:
    """True if the element anticommutes with F = prod_i X_i (odd number of Y/Z factors per string)."""
    return all(sum(a in "YZ" for _, a in t.factors) % 2 == 1 for t in mixer.terms)


def _entropies(state: QuantumState, mode: Mode) -> tuple[float, float]:
    n = state.n_qubits
    if n < 2:
        return 0.0, 0.0
    cut = ent.middle_cut(n)
    if mode is Mode.PRESERVE and n >= 3:
        return (ent.symmetry_preserving_entropy(state, cut),
                ent.symmetry_preserving_single_qubit_entropy(state))
    return ent.entropy(state, cut), ent.average_single_qubit_entropy(state)


def mode_hamiltonian(instance: ProblemInstance, mode: Mode) -> CostHamiltonian:
    """H in the symmetry-preserving mode, H + f Z_0 in the symmetry-breaking one."""
    zz = instance.hamiltonian.zz_terms
    if mode is Mode.PRESERVE:
        return CostHamiltonian(instance.n, zz, 0.0)
    return CostHamiltonian(instance.n, zz, instance.f if instance.f > 0 else DEFAULT_FIELD)


def grow_and_optimize(
    instance: ProblemInstance,
    pool: OperatorPool | None,
    p_max: int,
    delta: float = 0.0,
    mode: Mode | str = Mode.PRESERVE,
    optimizer_config: OptimizerConfig | None = None,
    gamma0: float = DEFAULT_GAMMA0,
    algo: str = "adapt",
    instance_id: int | None = None,
    keep_selections: bool = True,
) -> RunRecord:
    """Grow the ansatz one layer at a time, re-optimizing all parameters after each addition.

    ``algo="qaoa"`` ignores ``pool`` and uses the fixed mixer sum_i X_i.
    """
    mode = Mode(mode)
    if algo not in ("adapt", "qaoa"):
        raise ValueError(f"unknown algorithm {algo!r}")
    if algo == "adapt" and pool is None:
        raise ContractError("ADAPT needs an operator pool")
    config = optimizer_config or OptimizerConfig()
    n = instance.n
    h = mode_hamiltonian(instance, mode)
    # the symmetry-broken reference belongs to ADAPT; standard QAOA always starts from |+...+>
    if mode is Mode.BREAK and algo == "adapt":
        reference = Reference.SYMMETRY_BROKEN
    else:
        reference = Reference.ALL_PLUS
    truth = brute_force(h)

    record = RunRecord(
        instance_id=instance.seed if instance_id is None else instance_id,
        algo=algo,
        mode=mode.value,
        pool=pool.connectivity.value if (algo == "adapt") else "qaoa",
        delta=float(delta) if algo == "adapt" else 0.0,
    )
    program = AnsatzProgram(reference)
    params = np.zeros(0)
    compiled = CompiledAnsatz(program, h)
    state = compiled.state(params)
    energy = compiled.energy(params)
    record.rows.append(LayerRow(0, energy, normalized_error(energy, truth), *_entropies(state, mode),
                                "", 0, 0, 0))
    cnots = 0
    mixer_m = global_x(n)
    for layer in range(1, p_max + 1):
        if algo == "adapt":
            report = select_mixer(state, h, pool, gamma0, delta)
            if report.degenerate:
                record.diagnostics.append(f"layer {layer}: degenerate selection, all gradients ~0")
            if keep_selections:
                record.selections.append(report)
            mixer = report.chosen
        else:
            mixer = mixer_m
        program = program.append(mixer)
        compiled = CompiledAnsatz(program, h)
        x0 = warm_start_params(params, gamma0)
        record.start_energies.append(compiled.energy(x0))
        try:
            result = minimize(compiled.energy, x0, config)
            params, evals = result.best_params, result.evaluations
            if not result.converged:
                record.diagnostics.append(f"layer {layer}: {result.message}")
        except NonFiniteObjective as exc:
            params = exc.best_params if exc.best_params is not None else x0
            evals = exc.evaluations
            record.diagnostics.append(f"layer {layer}: optimizer aborted: {exc}")
            log.warning("instance %s layer %d: %s", record.instance_id, layer, exc)
        state = compiled.state(params)
        energy = compiled.energy(params)
        cnots += cnot_cost_of_layer(h, mixer)
        record.rows.append(LayerRow(
            layer, energy, normalized_error(energy, truth), *_entropies(state, mode),
            mixer.token, cnots, len(params), evals,
        ))
    record.params = params
    return record

