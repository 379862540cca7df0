"""Vertex-matrix skeletons of finite higher-rank graphs.

A rank-k skeleton is a list of k square nonnegative-integer matrices over a
single labeled vertex set. Entry ``A_i(v, w)`` counts the colour-i edges
with range ``v`` and source ``w``, and the matrices must commute pairwise
for the coloured graph to underlie a k-graph. Entries are kept as exact
Python integers; floating point only enters downstream in the spectral
layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

IntMatrix = tuple[tuple[int, ...], ...]

RULE_LABELS = "labels-distinct"
RULE_COLOURS = "colour-count"
RULE_SQUARE = "matrix-square"
RULE_DIMENSION = "matrix-dimension"
RULE_INTEGER = "entry-integer"
RULE_NONNEGATIVE = "entry-nonnegative"
RULE_COMMUTE = "colour-commutation"
RULE_NO_SOURCE = "no-zero-row"
RULE_NO_SINK = "no-zero-column"


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str
    where: tuple = ()


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    violations: tuple[Violation, ...]

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}


def _freeze_matrix(rows) -> IntMatrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


def _int_product(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    n = len(a)
    return tuple(
        tuple(sum(a[i][l] * b[l][j] for l in range(n)) for j in range(n))
        for i in range(n)
    )


def _identity(n: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class Skeleton:
    """Immutable skeleton: distinct vertex labels plus k commuting matrices.

    Construction enforces the structural invariants (square matrices of one
    dimension, nonnegative integer entries, exact pairwise commutation).
    Zero rows or columns are tolerated structurally so that quotients of
    ill-connected graphs remain representable; ``validate_skeleton`` reports
    them against the full no-source/no-sink contract.
    """

    vertex_labels: tuple[str, ...]
    matrices: tuple[IntMatrix, ...]

    def __post_init__(self):
        labels = tuple(str(x) for x in self.vertex_labels)
        mats = tuple(_freeze_matrix(m) for m in self.matrices)
        object.__setattr__(self, "vertex_labels", labels)
        object.__setattr__(self, "matrices", mats)
        if len(set(labels)) != len(labels):
            raise ValueError("vertex labels must be distinct")
        if not mats:
            raise ValueError("need at least one colour matrix")
        n = len(labels)
        for i, m in enumerate(mats):
            if len(m) != n or any(len(row) != n for row in m):
                raise ValueError(f"matrix {i} is not {n}x{n}")
            if any(x < 0 for row in m for x in row):
                raise ValueError(f"matrix {i} has negative entries")
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                if _int_product(mats[i], mats[j]) != _int_product(mats[j], mats[i]):
                    raise ValueError(f"matrices {i} and {j} do not commute")

    @classmethod
    def empty(cls, k: int) -> "Skeleton":
        return cls((), ((),) * k)

    @property
    def n(self) -> int:
        return len(self.vertex_labels)

    @property
    def k(self) -> int:
        return len(self.matrices)

    def index_of(self, label: str) -> int:
        return self.vertex_labels.index(label)

    def as_arrays(self) -> list[np.ndarray]:
        """Float copies for the numeric layer."""
        if self.n == 0:
            return [np.zeros((0, 0)) for _ in range(self.k)]
        return [np.array(m, dtype=float) for m in self.matrices]

    def union_support(self) -> np.ndarray:
        """Boolean matrix with True where any colour has an edge."""
        out = np.zeros((self.n, self.n), dtype=bool)
        for m in self.matrices:
            for v, row in enumerate(m):
                for w, x in enumerate(row):
                    if x:
                        out[v, w] = True
        return out

    def colour_support(self, i: int) -> np.ndarray:
        return np.array([[x > 0 for x in row] for row in self.matrices[i]], dtype=bool).reshape(
            (self.n, self.n)
        )

    def zero_rows(self) -> list[tuple[int, int]]:
        """(colour, vertex) pairs whose row is all zero (colour-i sources)."""
        out = []
        for i, m in enumerate(self.matrices):
            for v, row in enumerate(m):
                if not any(row):
                    out.append((i, v))
        return out

    def zero_columns(self) -> list[tuple[int, int]]:
        """(colour, vertex) pairs whose column is all zero (colour-i sinks)."""
        out = []
        for i, m in enumerate(self.matrices):
            for w in range(self.n):
                if not any(m[v][w] for v in range(self.n)):
                    out.append((i, w))
        return out

    @property
    def has_sources(self) -> bool:
        return bool(self.zero_rows())

    @property
    def has_sinks(self) -> bool:
        return bool(self.zero_columns())


def validate_skeleton(vertex_labels: Sequence[str], matrices) -> ValidationReport:
    """Check candidate input against every skeleton invariant.

    Shape, integrality, sign, exact commutation and the no-source/no-sink
    requirements are all reported as violations rather than exceptions; a
    passing report guarantees ``Skeleton(vertex_labels, matrices)`` succeeds.
    An empty vertex set is a valid degenerate skeleton.
    """
    violations: list[Violation] = []
    labels = [str(x) for x in vertex_labels]
    n = len(labels)
    if len(set(labels)) != n:
        dupes = sorted({x for x in labels if labels.count(x) > 1})
        violations.append(Violation(RULE_LABELS, f"duplicate vertex labels {dupes}", tuple(dupes)))
    if not matrices:
        violations.append(Violation(RULE_COLOURS, "at least one colour matrix required"))
        return ValidationReport(False, tuple(violations))

    grids: list[list[list[int]] | None] = []
    for i, m in enumerate(matrices):
        rows = list(m)
        row_lens = [len(r) if hasattr(r, "__len__") else -1 for r in rows]
        if any(l != len(rows) for l in row_lens):
            violations.append(Violation(RULE_SQUARE, f"matrix {i} is not square", (i,)))
            grids.append(None)
            continue
        if len(rows) != n:
            violations.append(
                Violation(RULE_DIMENSION, f"matrix {i} is {len(rows)}x{len(rows)}, expected {n}x{n}", (i,))
            )
            grids.append(None)
            continue
        grid: list[list[int]] = []
        ok = True
        for v, row in enumerate(rows):
            out_row = []
            for w, x in enumerate(row):
                if isinstance(x, bool) or not isinstance(x, (int, np.integer)):
                    if isinstance(x, float) and float(x).is_integer():
                        x = int(x)
                    else:
                        violations.append(
                            Violation(RULE_INTEGER, f"entry A_{i}({v},{w})={x!r} is not an integer", (i, v, w))
                        )
                        ok = False
                        continue
                x = int(x)
                if x < 0:
                    violations.append(
                        Violation(RULE_NONNEGATIVE, f"entry A_{i}({v},{w})={x} is negative", (i, v, w))
                    )
                    ok = False
                out_row.append(x)
            grid.append(out_row)
        grids.append(grid if ok else None)

    clean = [g for g in grids if g is not None]
    if len(clean) == len(grids) and n > 0:
        frozen = [_freeze_matrix(g) for g in clean]
        for i in range(len(frozen)):
            for j in range(i + 1, len(frozen)):
                left = _int_product(frozen[i], frozen[j])
                right = _int_product(frozen[j], frozen[i])
                if left != right:
                    bad = [
                        (v, w)
                        for v in range(n)
                        for w in range(n)
                        if left[v][w] != right[v][w]
                    ]
                    violations.append(
                        Violation(
                            RULE_COMMUTE,
                            f"A_{i} A_{j} != A_{j} A_{i} at entries {bad}",
                            (i, j),
                        )
                    )
        for i, m in enumerate(frozen):
            for v in range(n):
                if not any(m[v]):
                    violations.append(
                        Violation(RULE_NO_SOURCE, f"row {v} of A_{i} is zero (source)", (i, v))
                    )
                if not any(m[u][v] for u in range(n)):
                    violations.append(
                        Violation(RULE_NO_SINK, f"column {v} of A_{i} is zero (sink)", (i, v))
                    )

    return ValidationReport(not violations, tuple(violations))


def degree_power(skel: Skeleton, powers: Sequence[int]) -> IntMatrix:
    """Exact integer product of the colour matrices raised to ``powers``.

    The empty product (all powers zero) is the identity. Arbitrary-precision
    integers make the computation exact for any exponent vector, and the
    result is order-independent because the matrices commute.
    """
    if len(powers) != skel.k:
        raise ValueError(f"expected {skel.k} exponents, got {len(powers)}")
    exps = [int(p) for p in powers]
    if any(p < 0 for p in exps):
        raise ValueError("exponents must be nonnegative")
    result = _identity(skel.n)
    for mat, p in zip(skel.matrices, exps):
        for _ in range(p):
            result = _int_product(result, mat)
    return result
