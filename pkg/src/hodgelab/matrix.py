"""Dense exact matrices and the elimination routines built on them.

Entries are :class:`~hodgelab.field.QuadFieldElement` sharing one
:class:`~hodgelab.field.FieldSpec`.  Provides reduced row echelon form,
right kernels, linear solving, congruent diagonalization of symmetric
forms and signatures.  Pivoting is deterministic (lowest index) and
kernel/diagonalization outputs are normalized to primitive integer
vectors with positive leading coordinate, so results are reproducible
byte for byte.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .field import FieldError, FieldSpec, QuadFieldElement, RATIONALS, as_element


class DegenerateFormError(ValueError):
    """A symmetric form required to be nondegenerate is not."""


class ExactMatrix:
    """Immutable rectangular matrix over Q or Q(sqrt d)."""

    __slots__ = ("rows", "cols", "field", "data")

    def __init__(self, data, field: FieldSpec | None = None):
        if field is None:
            field = _infer_field(data)
        rows = tuple(
            tuple(as_element(entry, field) for entry in row) for row in data
        )
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged rows")
        object.__setattr__(self, "data", rows)
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", len(rows[0]) if rows else 0)
        object.__setattr__(self, "field", field)

    def __setattr__(self, name, value):
        raise AttributeError("ExactMatrix is immutable")

    # -- constructors ---------------------------------------------------

    @classmethod
    def identity(cls, n: int, field: FieldSpec = RATIONALS) -> ExactMatrix:
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], field)

    @classmethod
    def zeros(cls, rows: int, cols: int, field: FieldSpec = RATIONALS) -> ExactMatrix:
        return cls([[0] * cols for _ in range(rows)], field)

    @classmethod
    def diagonal(cls, values, field: FieldSpec = RATIONALS) -> ExactMatrix:
        values = list(values)
        n = len(values)
        return cls(
            [[values[i] if i == j else 0 for j in range(n)] for i in range(n)], field
        )

    @classmethod
    def block_diag(cls, blocks) -> ExactMatrix:
        blocks = list(blocks)
        field = blocks[0].field if blocks else RATIONALS
        n = sum(b.rows for b in blocks)
        m = sum(b.cols for b in blocks)
        out = [[field.zero()] * m for _ in range(n)]
        r = c = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    out[r + i][c + j] = b.data[i][j]
            r += b.rows
            c += b.cols
        return cls(out, field)

    @classmethod
    def from_columns(cls, columns, field: FieldSpec | None = None) -> ExactMatrix:
        columns = [list(c) for c in columns]
        n = len(columns[0]) if columns else 0
        return cls([[columns[j][i] for j in range(len(columns))] for i in range(n)], field)

    # -- access ---------------------------------------------------------

    def row(self, i: int) -> tuple:
        return self.data[i]

    def column(self, j: int) -> list:
        return [self.data[i][j] for i in range(self.rows)]

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def tolists(self) -> list:
        return [list(r) for r in self.data]

    # -- algebra ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.data == other.data

    def __hash__(self):
        return hash(self.data)

    def __neg__(self) -> ExactMatrix:
        return ExactMatrix([[-x for x in r] for r in self.data], self.field)

    def __add__(self, other: ExactMatrix) -> ExactMatrix:
        self._shape_check(other)
        return ExactMatrix(
            [
                [self.data[i][j] + other.data[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ],
            self._join_field(other),
        )

    def __sub__(self, other: ExactMatrix) -> ExactMatrix:
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, ExactMatrix):
            if self.cols != other.rows:
                raise ValueError("shape mismatch in product")
            field = self._join_field(other)
            out = []
            for i in range(self.rows):
                row = []
                for j in range(other.cols):
                    acc = field.zero()
                    for k in range(self.cols):
                        acc = acc + self.data[i][k] * other.data[k][j]
                    row.append(acc)
                out.append(row)
            return ExactMatrix(out, field)
        return ExactMatrix(
            [[x * other for x in r] for r in self.data], self.field
        )

    def __rmul__(self, other):
        return self * other

    def transpose(self) -> ExactMatrix:
        return ExactMatrix(
            [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)],
            self.field,
        )

    def trace(self) -> QuadFieldElement:
        acc = self.field.zero()
        for i in range(min(self.rows, self.cols)):
            acc = acc + self.data[i][i]
        return acc

    def apply(self, vector) -> list:
        """Matrix times coordinate vector."""
        if len(vector) != self.cols:
            raise ValueError("vector length mismatch")
        vec = [as_element(v, self.field) for v in vector]
        return [
            sum((self.data[i][j] * vec[j] for j in range(self.cols)), self.field.zero())
            for i in range(self.rows)
        ]

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self.data[i][j] == self.data[j][i]
            for i in range(self.rows)
            for j in range(i + 1, self.cols)
        )

    def is_alternating(self) -> bool:
        return (
            self.rows == self.cols
            and all(not self.data[i][i] for i in range(self.rows))
            and all(
                self.data[i][j] == -self.data[j][i]
                for i in range(self.rows)
                for j in range(i + 1, self.cols)
            )
        )

    def det(self) -> QuadFieldElement:
        if self.rows != self.cols:
            raise ValueError("determinant of non-square matrix")
        work = [list(r) for r in self.data]
        n = self.rows
        det = self.field.one()
        for k in range(n):
            piv = None
            for i in range(k, n):
                if work[i][k]:
                    piv = i
                    break
            if piv is None:
                return self.field.zero()
            if piv != k:
                work[k], work[piv] = work[piv], work[k]
                det = -det
            det = det * work[k][k]
            inv = work[k][k].inverse()
            for i in range(k + 1, n):
                if not work[i][k]:
                    continue
                f = work[i][k] * inv
                for j in range(k, n):
                    work[i][j] = work[i][j] - f * work[k][j]
        return det

    def inverse(self) -> ExactMatrix:
        if self.rows != self.cols:
            raise ValueError("inverse of non-square matrix")
        n = self.rows
        aug = [
            list(self.data[i])
            + [self.field.one() if i == j else self.field.zero() for j in range(n)]
            for i in range(n)
        ]
        reduced, pivots = _rref(aug)
        if pivots != list(range(n)):
            raise ValueError("singular matrix")
        return ExactMatrix([row[n:] for row in reduced], self.field)

    def _shape_check(self, other: ExactMatrix) -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    def _join_field(self, other: ExactMatrix) -> FieldSpec:
        if self.field.d == other.field.d:
            return self.field
        if self.field.d == 0:
            return other.field
        if other.field.d == 0:
            return self.field
        raise FieldError("matrices over different quadratic fields")

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in r) for r in self.data)
        return f"ExactMatrix[{body}]"


def _infer_field(data) -> FieldSpec:
    for row in data:
        for x in row:
            if isinstance(x, QuadFieldElement) and x.b:
                return FieldSpec(x.d)
    return RATIONALS


# -- elimination --------------------------------------------------------


def _rref(rows):
    """In-place reduced row echelon form; returns (rows, pivot columns)."""
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots


def rref(M: ExactMatrix):
    rows, pivots = _rref([list(r) for r in M.data])
    return ExactMatrix(rows, M.field), pivots


def rank(M: ExactMatrix) -> int:
    _, pivots = _rref([list(r) for r in M.data])
    return len(pivots)


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def normalize_vector(vec):
    """Scale to a primitive integer vector with positive leading coordinate."""
    vec = list(vec)
    fracs = []
    for x in vec:
        fracs.append(x.a)
        fracs.append(x.b)
    den = 1
    for f in fracs:
        den = _lcm(den, f.denominator)
    num = 0
    for f in fracs:
        num = gcd(num, abs(f.numerator * (den // f.denominator)))
    if num == 0:
        return vec
    scale = Fraction(den, num)
    for x in vec:
        if x:
            lead = x.a if x.a else x.b
            if lead < 0:
                scale = -scale
            break
    return [x * scale for x in vec]


def kernel_basis(M: ExactMatrix):
    """Exact basis of the right kernel {v : Mv = 0}; empty iff injective."""
    rows, pivots = _rref([list(r) for r in M.data])
    n = M.cols
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [M.field.zero()] * n
        v[f] = M.field.one()
        for r, c in enumerate(pivots):
            v[c] = -rows[r][f]
        basis.append(normalize_vector(v))
    return basis


def solve(M: ExactMatrix, rhs):
    """One solution of Mx = rhs, or None if inconsistent."""
    aug = [list(M.data[i]) + [as_element(rhs[i], M.field)] for i in range(M.rows)]
    rows, pivots = _rref(aug)
    if M.cols in pivots:
        return None
    x = [M.field.zero()] * M.cols
    for r, c in enumerate(pivots):
        x[c] = rows[r][M.cols]
    return x


def solve_unique(M: ExactMatrix, rhs):
    """The solution of Mx = rhs; raises if none or not unique."""
    x = solve(M, rhs)
    if x is None:
        raise ValueError("inconsistent linear system")
    if kernel_basis(M):
        raise ValueError("linear system has a positive-dimensional solution space")
    return x


def congruent_diagonalize(G: ExactMatrix):
    """(P, D) with P^T G P = D diagonal, exactly.

    Symmetric elimination with lowest-index pivots; a zero pivot is fixed
    by adding the column of the lowest nonzero off-diagonal entry.  Output
    basis vectors are rescaled to primitive integer form with positive
    leading coordinate (a square rescaling of D).
    """
    if not G.is_symmetric():
        raise ValueError("congruent diagonalization needs a symmetric matrix")
    n = G.rows
    field = G.field
    A = [list(r) for r in G.data]
    basis = [[field.one() if i == j else field.zero() for i in range(n)] for j in range(n)]
    # basis[k] is the k-th new basis vector in original coordinates

    def col_add(dst, src, coef):
        # v_dst += coef * v_src, with the induced symmetric update of A
        for i in range(n):
            A[i][dst] = A[i][dst] + coef * A[i][src]
        for j in range(n):
            A[dst][j] = A[dst][j] + coef * A[src][j]
        basis[dst] = [x + coef * y for x, y in zip(basis[dst], basis[src])]

    for k in range(n):
        if not A[k][k]:
            fix = None
            for j in range(k + 1, n):
                if A[k][j]:
                    fix = j
                    break
            if fix is None:
                raise DegenerateFormError("form is degenerate")
            col_add(k, fix, field.one())
        piv_inv = A[k][k].inverse()
        for j in range(k + 1, n):
            if A[k][j]:
                col_add(j, k, -A[k][j] * piv_inv)
    cols = [normalize_vector(v) for v in basis]
    P = ExactMatrix.from_columns(cols, field)
    D = P.transpose() * G * P
    for i in range(n):
        for j in range(n):
            if i != j and D.data[i][j]:
                raise AssertionError("diagonalization failed")
        if not D.data[i][i]:
            raise DegenerateFormError("form is degenerate")
    return P, D


def signature(G: ExactMatrix):
    """(positive, negative) inertia counts of a nondegenerate symmetric form."""
    _, D = congruent_diagonalize(G)
    pos = neg = 0
    for i in range(D.rows):
        v = D.data[i][i].rational_value()
        if v > 0:
            pos += 1
        else:
            neg += 1
    return pos, neg


def matrix_to_json(M: ExactMatrix):
    from .field import coeff_to_json

    return [[coeff_to_json(x) for x in row] for row in M.data]


def matrix_from_json(payload, field: FieldSpec = RATIONALS) -> ExactMatrix:
    from .field import coeff_from_json

    return ExactMatrix(
        [[coeff_from_json(x, field) for x in row] for row in payload], field
    )
