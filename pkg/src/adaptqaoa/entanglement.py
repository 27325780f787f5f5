"""Bipartite entanglement: Schmidt coefficients, entropies, spectra, Haar baseline."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .sim import ContractError, QuantumState

EIGEN_CUTOFF = 1e-12
PARAM_RANGE = 20 * np.pi


class LogBase(enum.Enum):
    TWO = 2.0
    NATURAL = np.e

    def log(self, x):
        return np.log2(x) if self is LogBase.TWO else np.log(x)


@dataclass(frozen=True)
class Bipartition:
    subsystem_a: tuple[int, ...]
    n_qubits: int

    def __post_init__(self):
        a = tuple(sorted(set(int(q) for q in self.subsystem_a)))
        if not a or len(a) >= self.n_qubits or a[0] < 0 or a[-1] >= self.n_qubits:
            raise ContractError(f"invalid bipartition {a} of {self.n_qubits} qubits")
        object.__setattr__(self, "subsystem_a", a)

    @property
    def subsystem_b(self) -> tuple[int, ...]:
        return tuple(q for q in range(self.n_qubits) if q not in self.subsystem_a)

    def swapped(self) -> "Bipartition":
        return Bipartition(self.subsystem_b, self.n_qubits)


def middle_cut(n: int) -> Bipartition:
    """Qubits 0..n/2-1 against the rest."""
    return Bipartition(tuple(range(n // 2)), n)


def _matricize(amps: np.ndarray, n: int, cut: Bipartition) -> np.ndarray:
    tensor = amps.reshape((2,) * n)  # axis k holds qubit n-1-k
    axes = [n - 1 - q for q in cut.subsystem_a] + [n - 1 - q for q in cut.subsystem_b]
    return tensor.transpose(axes).reshape(2 ** len(cut.subsystem_a), -1)


def schmidt_coefficients(state: QuantumState, cut: Bipartition) -> np.ndarray:
    if cut.n_qubits != state.n_qubits:
        raise ContractError("bipartition and state disagree on qubit count")
    return np.linalg.svd(_matricize(state.amplitudes, state.n_qubits, cut), compute_uv=False)


def _entropy_from_probs(lam: np.ndarray, base: LogBase) -> float:
    lam = lam[lam > EIGEN_CUTOFF]
    return float(max(0.0, -np.sum(lam * base.log(lam))))


def entropy(state: QuantumState, cut: Bipartition, base: LogBase = LogBase.TWO) -> float:
    return _entropy_from_probs(schmidt_coefficients(state, cut) ** 2, base)


def average_single_qubit_entropy(
    state: QuantumState, base: LogBase = LogBase.TWO, qubits=None
) -> float:
    n = state.n_qubits
    if n < 2:
        raise ContractError("single-qubit cuts need at least 2 qubits")
    qubits = range(n) if qubits is None else qubits
    return float(np.mean([entropy(state, Bipartition((q,), n), base) for q in qubits]))


def project_qubit(state: QuantumState, qubit: int, outcome: int) -> tuple[QuantumState, float]:
    """Projective Z measurement of ``qubit`` post-selected on ``outcome``."""
    if outcome not in (0, 1) or not 0 <= qubit < state.n_qubits:
        raise ContractError(f"bad projection qubit={qubit} outcome={outcome}")
    bits = (np.arange(state.amplitudes.size) >> qubit) & 1
    amps = np.where(bits == outcome, state.amplitudes, 0)
    prob = float(np.vdot(amps, amps).real)
    if prob <= EIGEN_CUTOFF:
        raise ContractError(f"outcome {outcome} on qubit {qubit} has zero probability")
    return QuantumState(state.n_qubits, amps / np.sqrt(prob)), prob


def _branches(state: QuantumState, qubit: int):
    for outcome in (0, 1):
        try:
            yield project_qubit(state, qubit, outcome)
        except ContractError:
            continue


def symmetry_preserving_entropy(
    state: QuantumState, cut: Bipartition, base: LogBase = LogBase.TWO, qubit: int = 0
) -> float:
    """Entropy across ``cut`` after measuring ``qubit``, averaged over outcomes.

    The measured qubit is left in a basis state, so it contributes nothing on
    whichever side of the cut it sits.
    """
    if state.n_qubits < 3:
        raise ContractError("need at least 3 qubits")
    return float(sum(p * entropy(s, cut, base) for s, p in _branches(state, qubit)))


def symmetry_preserving_single_qubit_entropy(
    state: QuantumState, base: LogBase = LogBase.TWO, qubit: int = 0
) -> float:
    """Single-qubit-cut entropy over the unmeasured qubits, averaged over outcomes."""
    if state.n_qubits < 3:
        raise ContractError("need at least 3 qubits")
    rest = [q for q in range(state.n_qubits) if q != qubit]
    return float(
        sum(p * average_single_qubit_entropy(s, base, rest) for s, p in _branches(state, qubit))
    )


def entanglement_spectrum(state: QuantumState, cut: Bipartition) -> np.ndarray:
    """Levels -ln(lambda_k) in ascending order; clamped eigenvalues give +inf."""
    lam = schmidt_coefficients(state, cut) ** 2
    with np.errstate(divide="ignore"):
        return np.where(lam > EIGEN_CUTOFF, -np.log(np.maximum(lam, EIGEN_CUTOFF)), np.inf)


@dataclass
class SpectrumStats:
    levels_mean: np.ndarray
    levels_std: np.ndarray
    mean_entropy_middle: float
    mean_entropy_single: float
    std_entropy_middle: float
    n_samples: int


def _summarize(states, cut: Bipartition) -> SpectrumStats:
    spectra, middle, single = [], [], []
    for s in states:
        spectra.append(entanglement_spectrum(s, cut))
        middle.append(entropy(s, cut))
        single.append(average_single_qubit_entropy(s))
    spectra = np.array(spectra)
    finite = np.isfinite(spectra)
    keep = finite.any(axis=0)
    masked = np.where(finite, spectra, np.nan)[:, keep]
    return SpectrumStats(
        levels_mean=np.nanmean(masked, axis=0),
        levels_std=np.nanstd(masked, axis=0),
        mean_entropy_middle=float(np.mean(middle)),
        mean_entropy_single=float(np.mean(single)),
        std_entropy_middle=float(np.std(middle)),
        n_samples=len(middle),
    )


def spectrum_sample(program, h, n_samples: int, seed: int, cut: Bipartition | None = None) -> SpectrumStats:
    """Statistics of the ansatz output with parameters drawn uniformly from [0, 20 pi)."""
    from .ansatz import CompiledAnsatz

    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    compiled = CompiledAnsatz(program, h)
    cut = cut or middle_cut(h.n_qubits)
    rng = np.random.default_rng(seed)
    draws = rng.uniform(0.0, PARAM_RANGE, size=(n_samples, program.n_params))
    return _summarize((compiled.state(x) for x in draws), cut)


def haar_states(n: int, n_samples: int, seed: int):
    rng = np.random.default_rng(seed)
    for _ in range(n_samples):
        v = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
        yield QuantumState(n, v / np.linalg.norm(v))


def haar_baseline(n: int, cut: Bipartition | None, n_samples: int, seed: int) -> SpectrumStats:
    return _summarize(haar_states(n, n_samples, seed), cut or middle_cut(n))


def page_entropy(dim_a: int, dim_b: int, base: LogBase = LogBase.TWO) -> float:
    """Closed-form mean entanglement entropy of Haar states (Page), for dim_a <= dim_b."""
    if dim_a > dim_b:
        dim_a, dim_b = dim_b, dim_a
    nats = sum(1.0 / k for k in range(dim_b + 1, dim_a * dim_b + 1)) - (dim_a - 1) / (2 * dim_b)
    return nats / np.log(base.value)
