"""Perron roots and eigenvector machinery for commuting nonnegative matrices.

Spectral radii are computed per strongly connected block by shifted power
iteration, so reducible matrices are handled exactly as the maximum over
their diagonal blocks. The extension step takes the common Perron vector of
a hereditary component's colour blocks and solves a dense linear system per
colour to continue it across the components that feed from it; a truncated
path-weight series is kept alongside as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._digraph import is_strongly_connected, succ_lists, tarjan_sccs, transitive_closure

POWER_TOL = 1e-14
POWER_MAXITER = 100_000
SOLVE_RESIDUAL_TOL = 1e-10
RADIUS_BAND_RTOL = 1e-9

STATUS_NOT_MET = "hypothesis-not-met"
STATUS_HOLDS = "conclusion-holds"
STATUS_CONTRADICTION = "CONTRADICTION"


class EigenConsistencyError(RuntimeError):
    """A cross-check between two computation routes disagreed."""


@dataclass(frozen=True)
class PFResult:
    """Perron root of one matrix plus the (shared) unimodular eigenvector."""

    radius: float
    vector: tuple[float, ...]
    residual: float


@dataclass(frozen=True)
class ExtensionResult:
    """Eigenvector of the full vertex matrices built from a hereditary component.

    ``d``, ``f`` and ``h`` partition the vertex set: the component itself,
    the vertices that receive a path from it, and the rest. ``z`` agrees
    with the component's Perron vector on ``d``, with the solved weight
    vector ``y`` on ``f``, and vanishes on ``h``; it is an eigenvector of
    every colour matrix with eigenvalue the component's per-colour Perron
    root.
    """

    d: tuple[int, ...]
    f: tuple[int, ...]
    h: tuple[int, ...]
    component_radii: tuple[float, ...]
    x: tuple[float, ...]
    y: tuple[float, ...]
    z: tuple[float, ...]
    solved_colours: tuple[int, ...]
    per_colour_residuals: tuple[float, ...]
    cross_colour_discrepancy: float
    exchange_identity_discrepancy: float


@dataclass(frozen=True)
class OrderingVerdict:
    """Outcome of the per-colour dominance check for a hereditary component.

    The status reports whether the ordering conclusion (the tested
    component's Perron root strictly dominates every other component in
    every colour) is true for this input. When it fails, the status says
    whether a hypothesis violation explains it (``hypothesis-not-met``) or
    not (``CONTRADICTION``, which must never occur and indicates a bug or
    invalid input). ``missing_bridges`` lists (component index, colour)
    pairs with no single-colour path into that component from the tested
    one; ``reversals`` lists (component index, colour, its radius, the
    tested component's radius) wherever dominance fails.
    """

    status: str
    hypothesis_met: bool
    dominant_colour_ok: bool
    missing_bridges: tuple[tuple[int, int], ...]
    reversals: tuple[tuple[int, int, float, float], ...]
    degenerate: tuple[str, ...]


def _as_float_matrix(matrix) -> np.ndarray:
    arr = np.array(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("expected a square matrix")
    if arr.size and arr.min() < 0:
        raise ValueError("expected a nonnegative matrix")
    return arr


def _power_block(block: np.ndarray) -> tuple[float, np.ndarray, float]:
    """Perron root and direction of an irreducible nonnegative block.

    Power iteration runs on block + I, which is primitive whenever the block
    is irreducible, so convergence is geometric. Returns (radius, unit-sum
    vector, eigen residual in max norm).
    """
    d = block.shape[0]
    if d == 1:
        return float(block[0, 0]), np.ones(1), 0.0
    shifted = block + np.eye(d)
    x = np.full(d, 1.0 / d)
    lam = 1.0
    for _ in range(POWER_MAXITER):
        y = shifted @ x
        lam = float(y.sum())
        y = y / lam
        done = float(np.max(np.abs(y - x))) < POWER_TOL
        x = y
        if done:
            break
    rho = lam - 1.0
    residual = float(np.max(np.abs(block @ x - rho * x)))
    return rho, x, residual


def spectral_radius(matrix) -> float:
    """Perron root of a square nonnegative matrix, reducible or not.

    Computed blockwise over the strongly connected components of the
    support digraph and maximised, so no assumption of irreducibility is
    needed.
    """
    arr = _as_float_matrix(matrix)
    n = arr.shape[0]
    if n == 0:
        return 0.0
    best = 0.0
    for comp in tarjan_sccs(succ_lists(arr > 0)):
        block = arr[np.ix_(comp, comp)]
        rho, _, _ = _power_block(block)
        best = max(best, rho)
    return best


def pf_vector(matrix) -> PFResult:
    """Perron root and unit-sum eigenvector of one irreducible matrix."""
    arr = _as_float_matrix(matrix)
    if not _irreducible(arr):
        raise ValueError("matrix is not irreducible")
    rho, x, residual = _power_block(arr)
    return PFResult(radius=rho, vector=tuple(float(t) for t in x), residual=residual)


def _irreducible(arr: np.ndarray) -> bool:
    if arr.shape[0] == 1:
        return bool(arr[0, 0] > 0)
    return is_strongly_connected(arr > 0)


def common_pf_eigenvector(family: Sequence, tol: float = 1e-9) -> list[PFResult]:
    """Shared unimodular Perron vector of commuting irreducible matrices.

    The vector is computed once, from the sum of the family, then verified
    against every member; a residual above tolerance means the family was
    not simultaneously diagonalisable at the Perron root, i.e. the stated
    preconditions (irreducibility, commutation) were violated.
    """
    mats = [_as_float_matrix(m) for m in family]
    if not mats:
        raise ValueError("empty matrix family")
    shape = mats[0].shape
    if any(m.shape != shape for m in mats):
        raise ValueError("family members differ in dimension")
    for i, m in enumerate(mats):
        if not _irreducible(m):
            raise ValueError(f"family member {i} is not irreducible")
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if not np.allclose(mats[i] @ mats[j], mats[j] @ mats[i], rtol=0, atol=1e-9):
                raise ValueError(f"family members {i} and {j} do not commute")

    total = np.zeros(shape)
    for m in mats:
        total += m
    _, x, _ = _power_block(total)
    results = []
    for i, m in enumerate(mats):
        rho = spectral_radius(m)
        residual = float(np.max(np.abs(m @ x - rho * x)))
        if residual > tol * max(1.0, rho):
            raise EigenConsistencyError(
                f"family not simultaneously diagonalisable at the Perron root: "
                f"member {i} residual {residual:.3e}"
            )
        results.append(PFResult(radius=rho, vector=tuple(float(t) for t in x), residual=residual))
    return results


def _partition_for(skel, component: Iterable[int]) -> tuple[list[int], list[int], list[int]]:
    """Split vertices into (feeders F, component D, untouched H) for one component."""
    from .components import decompose, is_hereditary, reachability_matrix

    d = sorted(set(int(v) for v in component))
    decomp = decompose(skel)
    if tuple(d) not in decomp.components:
        raise ValueError(f"{d} is not a strongly connected component")
    if not is_hereditary(skel, d):
        raise ValueError(f"component {d} is not hereditary")
    reach = reachability_matrix(skel)
    f, h = [], []
    for v in range(skel.n):
        if v in d:
            continue
        if any(reach[v, w] for w in d):
            f.append(v)
        else:
            h.append(v)
    return f, d, h


def _blocks(skel, f: list[int], d: list[int]):
    """Per-colour float blocks (feeder square block, feeder-to-component block)."""
    arrays = skel.as_arrays()
    e_blocks = [a[np.ix_(f, f)] if f else np.zeros((0, 0)) for a in arrays]
    b_blocks = [a[np.ix_(f, d)] if f else np.zeros((0, len(d))) for a in arrays]
    d_blocks = [a[np.ix_(d, d)] for a in arrays]
    return e_blocks, b_blocks, d_blocks


def dominated_colours(skel, component: Iterable[int]) -> frozenset[int]:
    """Colours in which the component's Perron root beats every feeder block."""
    f, d, _ = _partition_for(skel, component)
    e_blocks, _, d_blocks = _blocks(skel, f, d)
    out = set()
    for i in range(skel.k):
        rho_d = spectral_radius(d_blocks[i])
        rho_e = spectral_radius(e_blocks[i]) if f else 0.0
        if rho_d - rho_e > RADIUS_BAND_RTOL * max(1.0, rho_d):
            out.add(i)
    return frozenset(out)


def extend_eigenvector(skel, component: Iterable[int], colours: Iterable[int] | None = None) -> ExtensionResult:
    """Extend the component's Perron vector to an eigenvector of every colour.

    For each colour ``i`` in the dominated set, the weight vector over the
    feeders solves ``(rho_i I - E_i) y = B_i x`` where ``E_i`` and ``B_i``
    are the feeder and bridge blocks; dominance makes the system
    nonsingular, and commutation makes the answer colour-independent. The
    solve is repeated for every admissible colour and the spread recorded;
    the exchange identity ``(rho_i I - E_i) B_j x = (rho_j I - E_j) B_i x``
    is checked for all colour pairs as a further consistency probe.
    """
    f, d, h = _partition_for(skel, component)
    e_blocks, b_blocks, d_blocks = _blocks(skel, f, d)
    pf = common_pf_eigenvector(d_blocks)
    x = np.array(pf[0].vector)
    radii = tuple(r.radius for r in pf)

    if colours is None:
        admissible = sorted(dominated_colours(skel, component))
    else:
        admissible = sorted(set(int(i) for i in colours))
        for i in admissible:
            if i < 0 or i >= skel.k:
                raise ValueError(f"colour {i} out of range")
            rho_e = spectral_radius(e_blocks[i]) if f else 0.0
            if radii[i] - rho_e <= RADIUS_BAND_RTOL * max(1.0, radii[i]):
                raise ValueError(
                    f"colour {i}: component root {radii[i]:.6g} does not dominate "
                    f"the feeder block root {rho_e:.6g}; system is singular"
                )
    if not admissible:
        raise ValueError("no colour dominates the feeder blocks; extension undefined")

    nf = len(f)
    if nf == 0:
        y = np.zeros(0)
        cross = 0.0
    else:
        solutions = []
        for i in admissible:
            system = radii[i] * np.eye(nf) - e_blocks[i]
            rhs = b_blocks[i] @ x
            sol = np.linalg.solve(system, rhs)
            residual = float(np.max(np.abs(system @ sol - rhs)))
            if residual > SOLVE_RESIDUAL_TOL * max(1.0, float(np.max(np.abs(rhs)))):
                raise EigenConsistencyError(
                    f"linear solve residual {residual:.3e} above tolerance in colour {i}"
                )
            solutions.append(sol)
        y = solutions[0]
        cross = 0.0
        for other in solutions[1:]:
            cross = max(cross, float(np.max(np.abs(other - y))))

    # Exchange identity across all colour pairs, admissible or not.
    exchange = 0.0
    for i in range(skel.k):
        for j in range(skel.k):
            if i == j or nf == 0:
                continue
            lhs = (radii[i] * np.eye(nf) - e_blocks[i]) @ (b_blocks[j] @ x)
            rhs = (radii[j] * np.eye(nf) - e_blocks[j]) @ (b_blocks[i] @ x)
            exchange = max(exchange, float(np.max(np.abs(lhs - rhs))))

    z = np.zeros(skel.n)
    for pos, v in enumerate(f):
        z[v] = y[pos]
    for pos, v in enumerate(d):
        z[v] = x[pos]
    arrays = skel.as_arrays()
    residuals = tuple(
        float(np.max(np.abs(arrays[i] @ z - radii[i] * z))) for i in range(skel.k)
    )
    if y.size and float(y.min()) < -1e-12:
        raise EigenConsistencyError("extension weight vector has negative entries")

    return ExtensionResult(
        d=tuple(d),
        f=tuple(f),
        h=tuple(h),
        component_radii=radii,
        x=tuple(float(t) for t in x),
        y=tuple(float(t) for t in y),
        z=tuple(float(t) for t in z),
        solved_colours=tuple(admissible),
        per_colour_residuals=residuals,
        cross_colour_discrepancy=cross,
        exchange_identity_discrepancy=exchange,
    )


def quick_exit_weight(skel, component: Iterable[int], colour: int, truncation: int) -> np.ndarray:
    """Truncated series of single-colour path weights leaving the component.

    Sums ``rho^-(n+1) E^n B x`` for ``n`` up to the truncation order; the
    series converges geometrically to the solved weight vector ``y`` and
    serves as an independent oracle for it.
    """
    f, d, _ = _partition_for(skel, component)
    e_blocks, b_blocks, d_blocks = _blocks(skel, f, d)
    if not f:
        return np.zeros(0)
    pf = common_pf_eigenvector(d_blocks)
    x = np.array(pf[0].vector)
    rho = pf[colour].radius
    term = b_blocks[colour] @ x
    total = term / rho
    scale = rho
    for _ in range(int(truncation)):
        term = e_blocks[colour] @ term
        scale *= rho
        total = total + term / scale
    return total


def check_spectral_ordering(skel, component: Iterable[int], colour: int) -> OrderingVerdict:
    """Test whether one colour's dominance by a hereditary component propagates.

    Hypothesis: every component is coordinatewise irreducible, the tested
    component is hereditary, every other component receives single-colour
    paths from it in every colour, and its Perron root in the given colour
    strictly beats every other component's. Conclusion: the same strict
    dominance holds in every colour. Whenever the hypothesis is met the
    conclusion must hold; the verdict records which side failed otherwise.
    """
    from .components import decompose, is_hereditary

    d = tuple(sorted(set(int(v) for v in component)))
    decomp = decompose(skel)
    if d not in decomp.components:
        raise ValueError(f"{sorted(d)} is not a strongly connected component")
    d_idx = decomp.components.index(d)
    degenerate: list[str] = []

    hypothesis_ok = True
    if not all(decomp.coordinatewise_irreducible):
        hypothesis_ok = False
        degenerate.append("a component is not coordinatewise irreducible")
    if not is_hereditary(skel, d):
        hypothesis_ok = False
        degenerate.append("component under test is not hereditary")

    closures = [transitive_closure(skel.colour_support(i)) for i in range(skel.k)]
    missing = []
    for c in range(decomp.count):
        if c == d_idx:
            continue
        for i in range(skel.k):
            block = closures[i][np.ix_(list(decomp.components[c]), list(d))]
            if not block.any():
                missing.append((c, i))
    if missing:
        hypothesis_ok = False

    rho_d = decomp.radii[d_idx]
    dominant_ok = True
    for c in range(decomp.count):
        if c == d_idx:
            continue
        gap = rho_d[colour] - decomp.radii[c][colour]
        band = RADIUS_BAND_RTOL * max(1.0, rho_d[colour])
        if gap <= band:
            dominant_ok = False
            if abs(gap) <= band:
                degenerate.append(
                    f"radii nearly tie in colour {colour} between components {c} and {d_idx}; tighten input"
                )
    if not dominant_ok:
        hypothesis_ok = False

    reversals = []
    for c in range(decomp.count):
        if c == d_idx:
            continue
        for i in range(skel.k):
            gap = rho_d[i] - decomp.radii[c][i]
            if gap <= RADIUS_BAND_RTOL * max(1.0, rho_d[i]):
                reversals.append((c, i, decomp.radii[c][i], rho_d[i]))

    if not reversals:
        status = STATUS_HOLDS
    elif hypothesis_ok:
        status = STATUS_CONTRADICTION
    else:
        status = STATUS_NOT_MET
    return OrderingVerdict(
        status=status,
        hypothesis_met=hypothesis_ok,
        dominant_colour_ok=dominant_ok,
        missing_bridges=tuple(missing),
        reversals=tuple(reversals),
        degenerate=tuple(degenerate),
    )
