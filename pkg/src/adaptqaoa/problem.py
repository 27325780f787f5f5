"""Weighted Max-Cut instances, their Ising cost Hamiltonians, and a brute-force oracle."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from pathlib import Path

import numpy as np

from .sim import PauliTerm, SizeError, diagonal_energies

WEIGHT_SET = tuple(k / 10 for k in range(1, 10))
DEFAULT_FIELD = 0.05
MAX_BRUTE_FORCE_QUBITS = 24


class InstanceError(ValueError):
    """Infeasible or degenerate problem instance."""


@dataclass(frozen=True)
class WeightedGraph:
    n_vertices: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        edges = tuple((int(i), int(j), float(w)) for i, j, w in self.edges)
        seen = set()
        for i, j, _ in edges:
            if not 0 <= i < j < self.n_vertices:
                raise InstanceError(f"edge ({i}, {j}) must satisfy 0 <= i < j < n")
            if (i, j) in seen:
                raise InstanceError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))
        object.__setattr__(self, "edges", edges)

    @property
    def total_weight(self) -> float:
        return sum(w for _, _, w in self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.n_vertices
        for i, j, _ in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def cut_value(self, bits: int) -> float:
        return sum(w for i, j, w in self.edges if (bits >> i & 1) != (bits >> j & 1))


def _regular_edge_set(n: int, degree: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    if degree == n - 1:
        return list(combinations(range(n), 2))
    # pairing model with rejection
    stubs = np.repeat(np.arange(n), degree)
    for _ in range(10_000):
        rng.shuffle(stubs)
        pairs = stubs.reshape(-1, 2)
        edges = {(int(min(a, b)), int(max(a, b))) for a, b in pairs}
        if len(edges) == len(pairs) and all(a != b for a, b in edges):
            return sorted(edges)
    raise InstanceError(f"pairing model failed to produce a simple {degree}-regular graph on {n}")


def generate_instance(n: int, degree: int, seed: int) -> WeightedGraph:
    """Random ``degree``-regular graph with weights drawn uniformly from 0.1..0.9."""
    if n < 2 or not 1 <= degree < n or (n * degree) % 2:
        raise InstanceError(f"no simple {degree}-regular graph on {n} vertices")
    rng = np.random.default_rng(seed)
    pairs = _regular_edge_set(n, degree, rng)
    picks = rng.integers(0, len(WEIGHT_SET), size=len(pairs))
    return WeightedGraph(n, tuple((i, j, WEIGHT_SET[k]) for (i, j), k in zip(pairs, picks)))


@dataclass(frozen=True)
class CostHamiltonian:
    """(1/2) sum_ij w_ij Z_i Z_j, plus f Z_0 when ``field`` > 0."""

    n_qubits: int
    zz_terms: tuple[tuple[int, int, float], ...]
    field: float = 0.0

    @property
    def symmetry_breaking(self) -> bool:
        return self.field > 0

    @cached_property
    def terms(self) -> tuple[PauliTerm, ...]:
        out = []
        if self.field > 0:
            out.append(PauliTerm(((0, "Z"),), self.field))
        out += [PauliTerm(((i, "Z"), (j, "Z")), c) for i, j, c in self.zz_terms]
        return tuple(out)

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    @cached_property
    def diagonal(self) -> np.ndarray:
        energies = diagonal_energies(self.terms, self.n_qubits)
        energies.flags.writeable = False
        return energies

    def without_field(self) -> "CostHamiltonian":
        return CostHamiltonian(self.n_qubits, self.zz_terms, 0.0)


def build_hamiltonian(g: WeightedGraph, f: float = 0.0) -> CostHamiltonian:
    if f < 0:
        raise ValueError(f"field strength must be nonnegative, got {f}")
    return CostHamiltonian(g.n_vertices, tuple((i, j, w / 2) for i, j, w in g.edges), float(f))


@dataclass(frozen=True)
class GroundTruth:
    min_energy: float
    max_cut_value: float
    ground_bitstrings: tuple[int, ...]

    @property
    def degeneracy(self) -> int:
        return len(self.ground_bitstrings)


def brute_force(h: CostHamiltonian, n: int | None = None) -> GroundTruth:
    """Exact minimum over all 2^n basis states.

    The Max-Cut value always refers to the unperturbed couplings, using
    MaxCut = sum(w)/2 - min(H_zz).
    """
    n = h.n_qubits if n is None else n
    if n > MAX_BRUTE_FORCE_QUBITS:
        raise SizeError(f"brute force limited to {MAX_BRUTE_FORCE_QUBITS} qubits")
    energies = h.diagonal
    e_min = float(energies.min())
    ground = np.flatnonzero(np.abs(energies - e_min) <= 1e-9)
    zz_only = h.without_field().diagonal
    half_total = sum(c for _, _, c in h.zz_terms)
    return GroundTruth(e_min, half_total - float(zz_only.min()), tuple(int(b) for b in ground))


def normalized_error(energy: float, truth: GroundTruth) -> float:
    if truth.max_cut_value <= 0:
        raise InstanceError("Max-Cut value is zero; normalized error undefined")
    return (energy - truth.min_energy) / truth.max_cut_value


@dataclass(frozen=True)
class ProblemInstance:
    graph: WeightedGraph
    degree: int
    seed: int
    f: float = 0.0

    @property
    def n(self) -> int:
        return self.graph.n_vertices

    @cached_property
    def hamiltonian(self) -> CostHamiltonian:
        return build_hamiltonian(self.graph, self.f)

    @cached_property
    def truth(self) -> GroundTruth:
        return brute_force(self.hamiltonian)

    @classmethod
    def generate(cls, n: int, degree: int, seed: int, f: float = 0.0) -> "ProblemInstance":
        return cls(generate_instance(n, degree, seed), degree, seed, f)

    def with_field(self, f: float) -> "ProblemInstance":
        return ProblemInstance(self.graph, self.degree, self.seed, f)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "degree": self.degree,
            "seed": self.seed,
            "edges": [[i, j, w] for i, j, w in self.graph.edges],
            "f": self.f,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ProblemInstance":
        graph = WeightedGraph(int(data["n"]), tuple(tuple(e) for e in data["edges"]))
        return cls(graph, int(data["degree"]), int(data["seed"]), float(data.get("f", 0.0)))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()) + "\n")

    @classmethod
    def load(cls, path) -> "ProblemInstance":
        return cls.from_json(json.loads(Path(path).read_text()))
