"""Strongly connected components, hereditary sets and connectivity checks.

The condensation of the union digraph drives everything downstream: the
component order stored here makes every colour matrix block upper
triangular, hereditary vertex sets are the ones closed under taking path
sources, and the assumption report gates the temperature-sweep engine.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ._digraph import (
    reflexive_transitive_closure,
    succ_lists,
    tarjan_sccs,
    transitive_closure,
    weak_components,
)
from .skeleton import Skeleton
from .spectral import spectral_radius


@dataclass(frozen=True)
class ComponentDecomposition:
    """SCC partition in an order that block-upper-triangularises every colour.

    ``components[c]`` is a sorted tuple of vertex indices. ``leq[c][d]`` is
    the partial order "component c receives a path from component d"; with
    the stored order this relation only ever points from earlier to later
    components.
    """

    components: tuple[tuple[int, ...], ...]
    trivial: tuple[bool, ...]
    coordinatewise_irreducible: tuple[bool, ...]
    radii: tuple[tuple[float, ...], ...]
    leq: tuple[tuple[bool, ...], ...]

    @property
    def count(self) -> int:
        return len(self.components)

    def component_of(self, vertex: int) -> int:
        for c, comp in enumerate(self.components):
            if vertex in comp:
                return c
        raise ValueError(f"vertex {vertex} not in any component")

    def vertex_order(self) -> list[int]:
        """Vertex permutation realising the block-triangular form."""
        return [v for comp in self.components for v in comp]


@dataclass(frozen=True)
class AssumptionReport:
    """Connectivity preconditions for the KMS engine.

    a1: no trivial components (single vertex without any loop) and no
    isolated pieces; a2: every component coordinatewise irreducible with all
    per-colour spectral radii above 1; a3: a bridge between two components
    in one colour forces bridges in every colour. ``per_colour_reach_consistent``
    records the derived fact that single-colour reachability between
    components is then colour-independent.
    """

    a1_no_trivial: bool
    trivial_components: tuple[int, ...]
    a1_no_isolated: bool
    isolated_pieces: tuple[tuple[int, ...], ...]
    a2_irreducible_and_rho_gt_1: bool
    a2_offenders: tuple[tuple[int, int], ...]
    a3_colour_uniform_bridges: bool
    a3_offenders: tuple[tuple[int, int, int, int], ...]
    per_colour_reach_consistent: bool
    reach_offenders: tuple[tuple[int, int], ...]
    all_pass: bool


def union_adjacency(skel: Skeleton) -> np.ndarray:
    """adj[v, w] = True when some colour has an edge with range v, source w."""
    return skel.union_support()


def reachability_matrix(skel: Skeleton) -> np.ndarray:
    """R[v, w] = True when a path (possibly trivial) has range v and source w."""
    return reflexive_transitive_closure(union_adjacency(skel))


def reaches(skel: Skeleton, v: int, w: int) -> bool:
    """Whether some path has range ``v`` and source ``w`` (v == w counts)."""
    return bool(reachability_matrix(skel)[v, w])


def colour_reachability(skel: Skeleton, colour: int) -> np.ndarray:
    """Single-colour closure: paths of length >= 1 entirely in one colour."""
    return transitive_closure(skel.colour_support(colour))


def hereditary_closure(skel: Skeleton, vertices: Iterable[int]) -> frozenset[int]:
    """Smallest hereditary superset: add every source of a path into the set."""
    seeds = sorted(set(int(v) for v in vertices))
    if not seeds:
        return frozenset()
    reach = reachability_matrix(skel)
    mask = np.zeros(skel.n, dtype=bool)
    for v in seeds:
        mask |= reach[v]
    return frozenset(int(w) for w in np.flatnonzero(mask))


def is_hereditary(skel: Skeleton, vertices: Iterable[int]) -> bool:
    vs = frozenset(int(v) for v in vertices)
    return hereditary_closure(skel, vs) == vs


def colour_block_irreducible(skel: Skeleton, comp: tuple[int, ...], colour: int) -> bool:
    idx = list(comp)
    block = skel.colour_support(colour)[np.ix_(idx, idx)]
    if len(idx) == 1:
        return bool(block[0, 0])
    return len(tarjan_sccs(succ_lists(block))) == 1


def decompose(skel: Skeleton) -> ComponentDecomposition:
    """SCC decomposition with a deterministic condensation order.

    Components come out topologically sorted so that every colour matrix is
    block upper triangular under the induced vertex order; ties are broken
    by the smallest original vertex index. Per-component flags and per-colour
    Perron roots are attached.
    """
    adj = union_adjacency(skel)
    comps = [tuple(c) for c in tarjan_sccs(succ_lists(adj))]
    comp_of = {}
    for c, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = c

    # Order constraint: if v in C_a receives an edge from w in C_b, then a
    # must come before b. Kahn's algorithm over those constraints, smallest
    # original vertex first among the ready components.
    ncomp = len(comps)
    succ: list[set[int]] = [set() for _ in range(ncomp)]
    indeg = [0] * ncomp
    for v in range(skel.n):
        for w in np.flatnonzero(adj[v]):
            a, b = comp_of[v], comp_of[int(w)]
            if a != b and b not in succ[a]:
                succ[a].add(b)
                indeg[b] += 1
    ready = [(comps[c][0], c) for c in range(ncomp) if indeg[c] == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        _, c = heapq.heappop(ready)
        order.append(c)
        for d in succ[c]:
            indeg[d] -= 1
            if indeg[d] == 0:
                heapq.heappush(ready, (comps[d][0], d))
    components = tuple(comps[c] for c in order)

    trivial = []
    irreducible = []
    radii = []
    for comp in components:
        single = len(comp) == 1
        v = comp[0]
        trivial.append(single and all(mat[v][v] == 0 for mat in skel.matrices))
        irreducible.append(
            all(colour_block_irreducible(skel, comp, i) for i in range(skel.k))
        )
        idx = list(comp)
        radii.append(
            tuple(
                spectral_radius([[skel.matrices[i][a][b] for b in idx] for a in idx])
                for i in range(skel.k)
            )
        )

    reach = reachability_matrix(skel)
    leq = tuple(
        tuple(
            bool(reach[np.ix_(list(components[c]), list(components[d]))].any())
            for d in range(ncomp)
        )
        for c in range(ncomp)
    )
    return ComponentDecomposition(
        components=components,
        trivial=tuple(trivial),
        coordinatewise_irreducible=tuple(irreducible),
        radii=tuple(radii),
        leq=leq,
    )


def check_assumptions(skel: Skeleton, decomposition: ComponentDecomposition | None = None) -> AssumptionReport:
    """Evaluate the engine's standing connectivity assumptions."""
    if skel.n == 0:
        return AssumptionReport(
            True, (), True, (), True, (), True, (), True, (), True
        )
    decomp = decomposition if decomposition is not None else decompose(skel)

    trivial_idx = tuple(c for c, t in enumerate(decomp.trivial) if t)
    pieces = weak_components(union_adjacency(skel))
    isolated = tuple(tuple(p) for p in pieces) if len(pieces) > 1 else ()

    a2_offenders = []
    for c in range(decomp.count):
        for i in range(skel.k):
            blocked = colour_block_irreducible(skel, decomp.components[c], i)
            if not blocked or decomp.radii[c][i] <= 1.0 + 1e-9:
                a2_offenders.append((c, i))

    a3_offenders = []
    for c in range(decomp.count):
        for d in range(decomp.count):
            if c == d:
                continue
            present = [
                i
                for i in range(skel.k)
                if any(
                    skel.matrices[i][v][w]
                    for v in decomp.components[c]
                    for w in decomp.components[d]
                )
            ]
            if present and len(present) < skel.k:
                missing = [i for i in range(skel.k) if i not in present]
                for miss in missing:
                    a3_offenders.append((c, d, present[0], miss))

    # Derived colour-uniform reachability between components.
    supports = []
    for i in range(skel.k):
        closure = colour_reachability(skel, i)
        supports.append(
            [
                [
                    bool(closure[np.ix_(list(decomp.components[c]), list(decomp.components[d]))].any())
                    for d in range(decomp.count)
                ]
                for c in range(decomp.count)
            ]
        )
    reach_offenders = []
    for c in range(decomp.count):
        for d in range(decomp.count):
            if c == d:
                continue
            vals = {supports[i][c][d] for i in range(skel.k)}
            if len(vals) > 1:
                reach_offenders.append((c, d))

    a1_no_trivial = not trivial_idx
    a1_no_isolated = not isolated
    a2 = not a2_offenders
    a3 = not a3_offenders
    reach_ok = not reach_offenders
    return AssumptionReport(
        a1_no_trivial=a1_no_trivial,
        trivial_components=trivial_idx,
        a1_no_isolated=a1_no_isolated,
        isolated_pieces=isolated,
        a2_irreducible_and_rho_gt_1=a2,
        a2_offenders=tuple(a2_offenders),
        a3_colour_uniform_bridges=a3,
        a3_offenders=tuple(a3_offenders),
        per_colour_reach_consistent=reach_ok,
        reach_offenders=tuple(reach_offenders),
        all_pass=a1_no_trivial and a1_no_isolated and a2 and a3 and reach_ok,
    )


def restrict(skel: Skeleton, hereditary_set: Iterable[int]) -> Skeleton:
    """Remove a hereditary vertex set, keeping the induced skeleton.

    The removed set must be hereditary (closed under path sources), which
    guarantees the surviving matrices still commute. When the input graph
    satisfies the standing assumptions the result has no zero rows or
    columns; otherwise sources may appear and are left to the caller's
    flags rather than treated as fatal.
    """
    removed = frozenset(int(v) for v in hereditary_set)
    bad = removed - set(range(skel.n))
    if bad:
        raise ValueError(f"unknown vertex indices {sorted(bad)}")
    if not is_hereditary(skel, removed):
        raise ValueError("removal set is not hereditary")
    keep = [v for v in range(skel.n) if v not in removed]
    labels = tuple(skel.vertex_labels[v] for v in keep)
    mats = tuple(
        tuple(tuple(m[v][w] for w in keep) for v in keep) for m in skel.matrices
    )
    return Skeleton(labels, mats)


def split_isolated(skel: Skeleton) -> list[Skeleton]:
    """Split into weakly connected pieces; a connected skeleton maps to itself."""
    if skel.n == 0:
        return []
    pieces = weak_components(union_adjacency(skel))
    if len(pieces) == 1:
        return [skel]
    out = []
    for piece in pieces:
        labels = tuple(skel.vertex_labels[v] for v in piece)
        mats = tuple(
            tuple(tuple(m[v][w] for w in piece) for v in piece) for m in skel.matrices
        )
        out.append(Skeleton(labels, mats))
    return out
