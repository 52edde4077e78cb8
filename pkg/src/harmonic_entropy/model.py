"""Oscillator systems on graphs: ordered pinned chains and Anderson-type disorder.

The Hamiltonian is ``sum_xy hq[x,y] q_x q_y + hp[x,y] p_x p_y``. For the
spring model with on-site constants ``k_x``, mass ``m`` and coupling
``lam`` this gives ``hp = Id / (2m)`` and ``hq = diag(k) + lam * L`` with
each undirected edge entering the graph Laplacian ``L`` once.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .errors import AssumptionViolation, BipartitionError, SingularityError

# Relative floor for negative powers of the analytic chain spectrum. The
# eigenvalues are exact closed forms, so this only has to exclude zero.
ANALYTIC_POWER_FLOOR = 1e-15
_CHUNK = 1 << 16


@dataclass(frozen=True)
class Graph:
    vertices: tuple
    edges: frozenset
    degree_bound: int

    def __post_init__(self):
        vertices = tuple(self.vertices)
        if len(set(vertices)) != len(vertices):
            raise ValueError("duplicate vertex ids")
        vset = set(vertices)
        edges = set()
        for e in self.edges:
            x, y = tuple(e)
            if x == y:
                raise ValueError(f"self-loop at {x!r}")
            if x not in vset or y not in vset:
                raise ValueError(f"edge {e!r} has an endpoint outside the vertex set")
            edges.add(frozenset((x, y)))
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", frozenset(edges))
        if self.degree_bound < 1:
            raise ValueError("degree bound must be a positive integer")
        if self.max_degree() > self.degree_bound:
            raise ValueError(
                f"max degree {self.max_degree()} exceeds degree bound {self.degree_bound}"
            )

    @property
    def size(self) -> int:
        return len(self.vertices)

    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    def degrees(self) -> np.ndarray:
        idx = self.index()
        deg = np.zeros(self.size, dtype=int)
        for e in self.edges:
            for v in e:
                deg[idx[v]] += 1
        return deg

    def max_degree(self) -> int:
        return int(self.degrees().max()) if self.size else 0

    def index_pairs(self) -> list[tuple[int, int]]:
        idx = self.index()
        pairs = [tuple(sorted(idx[v] for v in e)) for e in self.edges]
        return sorted(pairs)

    def laplacian(self) -> np.ndarray:
        n = self.size
        lap = np.zeros((n, n))
        for i, j in self.index_pairs():
            lap[i, i] += 1.0
            lap[j, j] += 1.0
            lap[i, j] -= 1.0
            lap[j, i] -= 1.0
        return lap

    def distances(self) -> np.ndarray:
        """All-pairs graph distance by breadth first search (``inf`` if disconnected)."""
        n = self.size
        nbrs = [[] for _ in range(n)]
        for i, j in self.index_pairs():
            nbrs[i].append(j)
            nbrs[j].append(i)
        dist = np.full((n, n), np.inf)
        for s in range(n):
            dist[s, s] = 0
            frontier = [s]
            d = 0
            while frontier:
                d += 1
                nxt = []
                for u in frontier:
                    for w in nbrs[u]:
                        if dist[s, w] == np.inf:
                            dist[s, w] = d
                            nxt.append(w)
                frontier = nxt
        return dist

    @classmethod
    def path(cls, n: int) -> "Graph":
        if n < 1:
            raise ValueError("path needs at least one site")
        edges = frozenset(frozenset((i, i + 1)) for i in range(n - 1))
        return cls(tuple(range(n)), edges, 2)

    @classmethod
    def grid(cls, shape: Sequence[int]) -> "Graph":
        """Open-boundary hypercubic grid with nearest-neighbour edges."""
        shape = tuple(int(s) for s in shape)
        verts = tuple(product(*(range(s) for s in shape)))
        vset = set(verts)
        edges = set()
        for v in verts:
            for axis in range(len(shape)):
                w = list(v)
                w[axis] += 1
                w = tuple(w)
                if w in vset:
                    edges.add(frozenset((v, w)))
        return cls(verts, frozenset(edges), 2 * len(shape))

    def to_dict(self) -> dict:
        return {
            "vertices": [list(v) if isinstance(v, tuple) else v for v in self.vertices],
            "edges": [list(p) for p in self.index_pairs()],
            "degree_bound": self.degree_bound,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Graph":
        verts = tuple(tuple(v) if isinstance(v, list) else v for v in d["vertices"])
        edges = frozenset(frozenset((verts[i], verts[j])) for i, j in d["edges"])
        return cls(verts, edges, int(d["degree_bound"]))


@dataclass(frozen=True)
class Region:
    """Ordered subset of positions ``0..parent_size-1`` of a parent region."""

    parent_size: int
    indices: tuple

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if self.parent_size < 1:
            raise BipartitionError("parent region must be non-empty")
        if not idx:
            raise BipartitionError("region is empty")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise BipartitionError("region indices must be strictly increasing")
        if idx[0] < 0 or idx[-1] >= self.parent_size:
            raise BipartitionError(
                f"region indices out of range for parent of size {self.parent_size}"
            )

    def __len__(self):
        return len(self.indices)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.intp)

    @property
    def is_proper(self) -> bool:
        return len(self.indices) < self.parent_size

    def complement(self) -> "Region":
        if not self.is_proper:
            raise BipartitionError("complement of the full region is empty")
        keep = set(self.indices)
        return Region(self.parent_size, tuple(i for i in range(self.parent_size) if i not in keep))

    def boundary(self, graph: Graph) -> tuple:
        """Sites of the region with at least one edge leaving it."""
        if graph.size != self.parent_size:
            raise BipartitionError("graph size does not match parent region size")
        inside = set(self.indices)
        out = set()
        for i, j in graph.index_pairs():
            if (i in inside) != (j in inside):
                out.add(i if i in inside else j)
        return tuple(sorted(out))

    @classmethod
    def leading(cls, n_sub: int, n_full: int) -> "Region":
        if not 1 <= n_sub <= n_full:
            raise BipartitionError(f"need 1 <= n_sub <= n_full, got {n_sub}, {n_full}")
        return cls(n_full, tuple(range(n_sub)))

    @classmethod
    def centered(cls, n_sub: int, n_full: int) -> "Region":
        """Centered block; for unequal parity the extra site goes to the right."""
        if not 1 <= n_sub <= n_full:
            raise BipartitionError(f"need 1 <= n_sub <= n_full, got {n_sub}, {n_full}")
        offset = (n_full - n_sub) // 2
        return cls(n_full, tuple(range(offset, offset + n_sub)))

    @classmethod
    def for_lattice(cls, lattice: str, n_sub: int, n_full: int) -> "Region":
        lattice = normalize_lattice(lattice)
        return cls.centered(n_sub, n_full) if lattice == "Z" else cls.leading(n_sub, n_full)


def normalize_lattice(lattice: str) -> str:
    key = str(lattice).strip().lower()
    if key in ("z", "full", "full_line", "integers"):
        return "Z"
    if key in ("n", "half", "half_line", "naturals"):
        return "N"
    raise ValueError(f"unknown lattice {lattice!r}; expected 'Z' or 'N'")


@dataclass(frozen=True, eq=False)
class OscillatorSystem:
    graph: Graph
    hq: np.ndarray
    hp: np.ndarray
    label: str = ""

    def __post_init__(self):
        hq = linalg.symmetrize(self.hq)
        hp = linalg.symmetrize(self.hp)
        if hq.shape != hp.shape or hq.shape[0] != self.graph.size:
            raise ValueError(
                f"matrix shapes {hq.shape}, {hp.shape} do not match graph size {self.graph.size}"
            )
        for name, mat in (("h^(q)", hq), ("h^(p)", hp)):
            lam_min = float(np.linalg.eigvalsh(mat)[0])
            if lam_min <= 1e-14 * max(1.0, float(np.abs(mat).max())):
                raise AssumptionViolation(
                    f"{name} is not positive definite (smallest eigenvalue {lam_min:.3e})"
                )
        hq.setflags(write=False)
        hp.setflags(write=False)
        object.__setattr__(self, "hq", hq)
        object.__setattr__(self, "hp", hp)

    @property
    def size(self) -> int:
        return self.graph.size

    def to_dict(self, ensemble: "DisorderEnsemble | None" = None, realization: int | None = None) -> dict:
        d = {
            "schema": "harmonic_entropy.system/1",
            "label": self.label,
            "graph": self.graph.to_dict(),
            "hq": self.hq.tolist(),
            "hp": self.hp.tolist(),
        }
        if ensemble is not None:
            d["ensemble"] = ensemble.to_dict()
            d["realization"] = realization
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(**kw))

    @classmethod
    def from_dict(cls, d: dict) -> "OscillatorSystem":
        return cls(Graph.from_dict(d["graph"]), np.array(d["hq"]), np.array(d["hp"]), d.get("label", ""))


@dataclass(frozen=True)
class DisorderEnsemble:
    """I.i.d. spring constants with Philox streams keyed by (seed, realization)."""

    mass: float = 0.5
    coupling: float = 1.0
    distribution: str = "uniform"
    low: float = 0.0
    high: float = 8.0
    constant: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.mass <= 0 or self.coupling <= 0:
            raise ValueError("mass and coupling must be positive")
        if self.distribution == "uniform":
            if not self.high > self.low >= 0:
                raise ValueError(f"need high > low >= 0, got low={self.low}, high={self.high}")
        elif self.distribution == "constant":
            if self.constant < 0:
                raise ValueError("constant spring value must be non-negative")
        else:
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def generator(self, realization: int) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(realization),))
        return np.random.Generator(np.random.Philox(ss))

    def spring_constants(self, n_sites: int, realization: int = 0) -> np.ndarray:
        """Site ``x`` of realization ``r`` always consumes the x-th draw of stream r."""
        if self.distribution == "constant":
            return np.full(n_sites, float(self.constant))
        u = self.generator(realization).random(n_sites)
        return self.low + (self.high - self.low) * u

    def to_dict(self) -> dict:
        return {
            "mass": self.mass,
            "coupling": self.coupling,
            "distribution": self.distribution,
            "low": self.low,
            "high": self.high,
            "constant": self.constant,
            "seed": int(self.seed),
            "rng": "philox4x64-10/SeedSequence(seed, spawn_key=(realization,))",
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DisorderEnsemble":
        keys = ("mass", "coupling", "distribution", "low", "high", "constant", "seed")
        return cls(**{k: d[k] for k in keys if k in d})


def ordered_chain(n: int) -> OscillatorSystem:
    """Chain of ``n`` unit-mass-1/2 oscillators pinned at both ends."""
    if n < 1:
        raise ValueError("chain length must be >= 1")
    hq = 2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    return OscillatorSystem(Graph.path(n), hq, np.eye(n), label=f"ordered_chain({n})")


def spring_system(graph: Graph, springs: np.ndarray, mass: float = 0.5, coupling: float = 1.0,
                  label: str = "") -> OscillatorSystem:
    springs = np.asarray(springs, dtype=float)
    if springs.shape != (graph.size,):
        raise ValueError("need one spring constant per vertex")
    hq = np.diag(springs) + coupling * graph.laplacian()
    hp = np.eye(graph.size) / (2.0 * mass)
    return OscillatorSystem(graph, hq, hp, label=label)


def anderson_system(graph: Graph, ens: DisorderEnsemble, realization: int = 0) -> OscillatorSystem:
    """Disordered spring system; raises :class:`AssumptionViolation` if ``hq`` is singular."""
    k = ens.spring_constants(graph.size, realization)
    return spring_system(graph, k, ens.mass, ens.coupling, label=f"anderson(r={realization})")


def one_particle_operator(sys: OscillatorSystem, method: str | None = None) -> np.ndarray:
    """``hp^{1/2} hq hp^{1/2}``."""
    root = linalg.matrix_power(sys.hp, 0.5, method)
    return linalg.symmetrize(root @ sys.hq @ root)


@dataclass(frozen=True)
class AssumptionReport:
    norm_hp: float
    norm_hp_inv: float
    norm_hq: float
    d_bound: float

    @property
    def max_norm(self) -> float:
        return max(self.norm_hp, self.norm_hp_inv, self.norm_hq)

    @property
    def passes(self) -> bool:
        return self.max_norm <= self.d_bound


def check_assumption(sys: OscillatorSystem, d_bound: float) -> AssumptionReport:
    wp = np.linalg.eigvalsh(sys.hp)
    wq = np.linalg.eigvalsh(sys.hq)
    return AssumptionReport(
        norm_hp=float(np.abs(wp).max()),
        norm_hp_inv=float(1.0 / wp[0]) if wp[0] > 0 else float("inf"),
        norm_hq=float(np.abs(wq).max()),
        d_bound=float(d_bound),
    )


def chain_eigenvalues(n: int) -> np.ndarray:
    j = np.arange(1, n + 1)
    return 4.0 * np.sin(j * np.pi / (2.0 * (n + 1))) ** 2


def _sine_block(rows: np.ndarray, cols: np.ndarray, n: int) -> np.ndarray:
    """``sqrt(2/(n+1)) sin(r c pi / (n+1))`` with the integer product reduced exactly."""
    period = 2 * (n + 1)
    arg = np.mod(np.multiply.outer(rows.astype(np.int64), cols.astype(np.int64)), period)
    return np.sqrt(2.0 / (n + 1)) * np.sin(arg * (np.pi / (n + 1)))


def chain_spectrum(n: int) -> linalg.EigenDecomposition:
    """Closed-form eigendecomposition of the pinned chain's ``hq`` (discrete sine basis)."""
    if n < 1:
        raise ValueError("chain length must be >= 1")
    idx = np.arange(1, n + 1)
    return linalg.EigenDecomposition(chain_eigenvalues(n), _sine_block(idx, idx, n))


def _chain_power_weights(d: np.ndarray, alpha: float, floor: float) -> np.ndarray:
    if alpha == 0:
        return np.ones_like(d)
    if alpha < 0 and d.min() <= floor * d.max():
        raise SingularityError(
            f"chain spectrum floor violated for power {alpha}", smallest_eigenvalue=float(d[0])
        )
    return d**alpha


def truncated_chain_powers(n_sub: int, n_full: int, alphas: Iterable[float], lattice: str = "N",
                           indices: Sequence[int] | None = None,
                           floor: float = ANALYTIC_POWER_FLOOR) -> dict:
    """Blocks ``iota^* (hq)^alpha iota`` of the pinned chain of length ``n_full``.

    The block is the leading one for ``lattice='N'`` and the centered one for
    ``lattice='Z'``, unless explicit 0-based ``indices`` are supplied. Entries
    are accumulated over the analytic spectrum in chunks, so memory stays
    ``O(n_sub * chunk)`` even for chains of millions of sites.
    """
    alphas = [float(a) for a in alphas]
    if indices is None:
        region = Region.for_lattice(lattice, n_sub, n_full)
    else:
        region = Region(n_full, tuple(indices))
        n_sub = len(region)
    rows = region.array + 1
    out = {a: np.zeros((n_sub, n_sub)) for a in alphas}
    lam_min = 4.0 * np.sin(np.pi / (2.0 * (n_full + 1))) ** 2
    lam_max = 4.0 * np.sin(n_full * np.pi / (2.0 * (n_full + 1))) ** 2
    _chain_power_weights(np.array([lam_min, lam_max]), min(alphas), floor)
    for start in range(1, n_full + 1, _CHUNK):
        ls = np.arange(start, min(n_full, start + _CHUNK - 1) + 1)
        o = _sine_block(rows, ls, n_full)
        d = 4.0 * np.sin(ls * np.pi / (2.0 * (n_full + 1))) ** 2
        for a in alphas:
            out[a] += (o * _chain_power_weights(d, a, 0.0)) @ o.T
    return {a: linalg.symmetrize(m) for a, m in out.items()}


def truncated_chain_power(n_sub: int, n_full: int, alpha: float, lattice: str = "N",
                          indices: Sequence[int] | None = None,
                          floor: float = ANALYTIC_POWER_FLOOR) -> np.ndarray:
    return truncated_chain_powers(n_sub, n_full, [alpha], lattice, indices, floor)[float(alpha)]
