"""Rational quadratic spaces.

Constructors for the rank-six lattices U^2 + <a> + <b> that drive the
whole workbench, orthogonal complements, the CM field attached to such a
lattice through its even Clifford algebra, and the Kuenneth-exponent
enumeration for powers of a surface.
"""

from __future__ import annotations

from dataclasses import dataclass

from .field import FieldSpec, RATIONALS, squarefree_part
from .matrix import (
    DegenerateFormError,
    ExactMatrix,
    kernel_basis,
    matrix_from_json,
    matrix_to_json,
)

U_GRAM = ((0, 1), (1, 0))


@dataclass(frozen=True)
class QuadraticSpace:
    """Finite-dimensional rational vector space with symmetric nondegenerate Gram."""

    gram: ExactMatrix
    labels: tuple = ()

    def __post_init__(self):
        if not self.gram.is_symmetric():
            raise ValueError("Gram matrix must be symmetric")
        if not self.gram.det():
            raise DegenerateFormError("Gram matrix must be nondegenerate")
        if not self.labels:
            object.__setattr__(
                self, "labels", tuple(f"e{i+1}" for i in range(self.gram.rows))
            )
        if len(self.labels) != self.gram.rows:
            raise ValueError("one label per basis vector")

    @property
    def dim(self) -> int:
        return self.gram.rows

    def pairing(self, v, w):
        """psi(v, w) for coordinate vectors."""
        gv = self.gram.apply(w)
        acc = self.gram.field.zero()
        for a, b in zip(v, gv):
            acc = acc + a * b
        return acc

    def direct_sum(self, other: QuadraticSpace) -> QuadraticSpace:
        return QuadraticSpace(
            ExactMatrix.block_diag([self.gram, other.gram]),
            self.labels + other.labels,
        )

    def to_json(self):
        return {"labels": list(self.labels), "gram": matrix_to_json(self.gram)}

    @classmethod
    def from_json(cls, payload) -> QuadraticSpace:
        gram = matrix_from_json(payload["gram"])
        return cls(gram, tuple(payload.get("labels", ())))


def hyperbolic_plane(labels=("e", "f")) -> QuadraticSpace:
    return QuadraticSpace(ExactMatrix(U_GRAM), tuple(labels))


def diagonal_space(values, labels=()) -> QuadraticSpace:
    return QuadraticSpace(ExactMatrix.diagonal(values), tuple(labels))


def k3_16_lattice(a: int, b: int) -> QuadraticSpace:
    """The rank-six space U + U + <a> + <b> for negative integers a, b."""
    if a >= 0 or b >= 0:
        raise ValueError("both diagonal entries must be negative")
    gram = ExactMatrix.block_diag(
        [ExactMatrix(U_GRAM), ExactMatrix(U_GRAM), ExactMatrix.diagonal([a, b])]
    )
    return QuadraticSpace(gram, ("e1", "f1", "e2", "f2", "v1", "v2"))


def weil_cm_field(a: int, b: int) -> FieldSpec:
    """The imaginary quadratic field Q(sqrt(-ab)) attached to U^2+<a>+<b>.

    Returns the squarefree d < 0 with Q(sqrt d) = Q(sqrt(-ab)); it is also
    the square class of the even Clifford volume element of <a>+<b>.
    """
    if a >= 0 or b >= 0:
        raise ValueError("both diagonal entries must be negative")
    return FieldSpec(squarefree_part(-a * b))


def orthogonal_complement(space: QuadraticSpace, vectors):
    """Basis of {v : psi(v, w) = 0 for all input w}."""
    field = space.gram.field
    if not vectors:
        return [
            tuple(field.one() if i == j else field.zero() for j in range(space.dim))
            for i in range(space.dim)
        ]
    rows = []
    for w in vectors:
        if len(w) != space.dim:
            raise ValueError("vector outside the space")
        rows.append(space.gram.apply(w))
    return [tuple(v) for v in kernel_basis(ExactMatrix(rows, field))]


def kunneth_summands(n: int, k: int):
    """All (a,b,c,d) >= 0 with 2k = 2a+2b+4d and a+b+c+d = n, lex sorted."""
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    out = []
    for d in range(min(n, k // 2) + 1):
        rest = k - 2 * d
        if rest < 0:
            continue
        for a in range(rest + 1):
            b = rest - a
            c = n - a - b - d
            if c >= 0:
                out.append((a, b, c, d))
    out.sort()
    return out
