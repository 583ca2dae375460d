"""Trace descent and field-action linear algebra.

A quadratic field E = Q(sqrt d) acts on an even-dimensional rational
space through a matrix J with J^2 = d.  Given a rational form psi
compatible with J, the unique E-valued form phi with Tr_{E/Q} o phi = psi
is recovered by solving the defining linear system (uniqueness is
witnessed by a zero-dimensional homogeneous solution space).  The module
also computes the sqrt(d)-eigenspace decomposition over Q(sqrt d), the
embedding of the top E-exterior power into the rational exterior algebra
(trace-dual construction), and the Hermitian form attached to an
alternating form on a space with imaginary multiplication, whose
top-E-wedge images are the Weil classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations

from .field import FieldError, FieldSpec, QuadFieldElement, RATIONALS
from .matrix import (
    ExactMatrix,
    kernel_basis,
    matrix_from_json,
    matrix_to_json,
    normalize_vector,
    rank,
    rref,
    solve,
)
from .tensor import WedgeElement, _perm_sign


class DescentError(ValueError):
    pass


@dataclass(frozen=True)
class EStructure:
    """Action of E = Q(sqrt d) on Q^n: a rational J with J^2 = d, n even."""

    spec: FieldSpec
    J: ExactMatrix

    def __post_init__(self):
        d = self.spec.d
        if d == 0:
            raise DescentError("the acting field must be a genuine quadratic field")
        n = self.J.rows
        if self.J.cols != n or n % 2:
            raise DescentError("J must be square of even size")
        if self.J * self.J != ExactMatrix.identity(n) * Fraction(d):
            raise DescentError("J^2 must equal d times the identity")

    @property
    def space_dim(self) -> int:
        return self.J.rows

    @property
    def e_dim(self) -> int:
        return self.space_dim // 2

    def to_json(self) -> dict:
        return {"d": self.spec.d, "J": matrix_to_json(self.J)}

    @classmethod
    def from_json(cls, payload) -> EStructure:
        return cls(FieldSpec(payload["d"]), matrix_from_json(payload["J"]))


@dataclass(frozen=True)
class EValuedForm:
    """E-valued form on an E-basis; Hermitian for d < 0, symmetric for d > 0.

    ``q_components`` are the rational matrices (A, B) with
    phi(x, y) = A(x, y) + B(x, y) sqrt(d) on rational coordinates.
    """

    structure: EStructure
    e_basis: tuple
    gram: tuple
    q_components: tuple
    hermitian: bool

    def value(self, x, y) -> QuadFieldElement:
        A, B = self.q_components
        d = self.structure.spec.d
        ax = A.apply(y)
        bx = B.apply(y)
        a = sum((xi * v for xi, v in zip(x, ax)), RATIONALS.zero())
        b = sum((xi * v for xi, v in zip(x, bx)), RATIONALS.zero())
        return QuadFieldElement(a.rational_value(), b.rational_value(), d)


def check_compatibility(psi: ExactMatrix, s: EStructure, hermitian: bool) -> None:
    """psi(Jx, y) = psi(x, Jy) in the totally real case, = -psi(x, Jy) in
    the Hermitian one; anything else is rejected."""
    lhs = s.J.transpose() * psi
    rhs = psi * s.J
    if hermitian:
        rhs = -rhs
    if lhs != rhs:
        raise DescentError("form and field action are not compatible")


def _bilinear(M: ExactMatrix, x, y):
    mx = M.apply(y)
    return sum((a * b for a, b in zip(x, mx)), M.field.zero())


def e_basis_vectors(s: EStructure):
    """Greedy E-basis: standard vectors whose E-span grows at each step."""
    n = s.space_dim
    chosen = []
    spanned = []
    for i in range(n):
        cand = [RATIONALS.zero()] * n
        cand[i] = RATIONALS.one()
        jcand = s.J.apply(cand)
        trial = spanned + [cand, jcand]
        if rank(ExactMatrix(trial, RATIONALS)) == len(trial):
            chosen.append(tuple(cand))
            spanned = trial
        if len(chosen) == s.e_dim:
            break
    if len(chosen) != s.e_dim:
        raise DescentError("could not extract an E-basis")
    return chosen


def trace_descend(psi: ExactMatrix, s: EStructure, hermitian: bool) -> EValuedForm:
    """The unique phi with Tr o phi = psi and E-(sesqui)linearity.

    Solves the full defining linear system in the 2 n^2 rational unknowns
    of phi and demands a unique solution; the kernel of the homogeneous
    part has dimension zero exactly when the trace lemma applies.
    """
    n = s.space_dim
    d = s.spec.d
    if hermitian and d > 0:
        raise DescentError("Hermitian descent needs an imaginary field")
    if not hermitian and d < 0:
        raise DescentError("bilinear descent needs a real field")
    if not psi.is_symmetric() or psi.rows != n:
        raise DescentError("psi must be symmetric of matching size")
    if not psi.det():
        raise DescentError("psi must be nondegenerate")
    check_compatibility(psi, s, hermitian)

    # unknown u = (A_ij | B_ij), phi(e_i, e_j) = A_ij + B_ij sqrt(d)
    na = n * n
    zero, one = Fraction(0), Fraction(1)
    rows = []
    rhs = []

    def a_at(i, j):
        return i * n + j

    def b_at(i, j):
        return na + i * n + j

    J = [[s.J.data[i][j].rational_value() for j in range(n)] for i in range(n)]
    eps = -1 if hermitian else 1
    for i in range(n):
        for j in range(n):
            # trace condition 2 A_ij = psi_ij
            row = [zero] * (2 * na)
            row[a_at(i, j)] = 2 * one
            rows.append(row)
            rhs.append(psi.data[i][j].rational_value())
            # first-slot linearity, rational and sqrt parts
            row = [zero] * (2 * na)
            for k in range(n):
                if J[k][i]:
                    row[a_at(k, j)] += J[k][i]
            row[b_at(i, j)] -= d
            rows.append(row)
            rhs.append(zero)
            row = [zero] * (2 * na)
            for k in range(n):
                if J[k][i]:
                    row[b_at(k, j)] += J[k][i]
            row[a_at(i, j)] -= one
            rows.append(row)
            rhs.append(zero)
            # second-slot (conjugate-)linearity
            row = [zero] * (2 * na)
            for k in range(n):
                if J[k][j]:
                    row[a_at(i, k)] += J[k][j]
            row[b_at(i, j)] -= eps * d
            rows.append(row)
            rhs.append(zero)
            row = [zero] * (2 * na)
            for k in range(n):
                if J[k][j]:
                    row[b_at(i, k)] += J[k][j]
            row[a_at(i, j)] -= eps
            rows.append(row)
            rhs.append(zero)

    system = ExactMatrix(rows, RATIONALS)
    sol = solve(system, rhs)
    if sol is None:
        raise DescentError("descent system is inconsistent")
    if kernel_basis(system):
        raise DescentError("descent system is not uniquely solvable")
    A = ExactMatrix([[sol[a_at(i, j)] for j in range(n)] for i in range(n)], RATIONALS)
    B = ExactMatrix([[sol[b_at(i, j)] for j in range(n)] for i in range(n)], RATIONALS)

    basis = e_basis_vectors(s)
    gram = []
    for x in basis:
        row = []
        for y in basis:
            a = _bilinear(A, x, y).rational_value()
            b = _bilinear(B, x, y).rational_value()
            row.append(QuadFieldElement(a, b, d))
        gram.append(tuple(row))
    form = EValuedForm(s, tuple(basis), tuple(gram), (A, B), hermitian)
    _check_form_shape(form)
    return form


def _check_form_shape(form: EValuedForm) -> None:
    g = form.gram
    m = len(g)
    for i in range(m):
        for j in range(m):
            expected = g[j][i].conj() if form.hermitian else g[j][i]
            if g[i][j] != expected:
                raise DescentError("descended form has the wrong symmetry")
    dmat = ExactMatrix([list(r) for r in g], FieldSpec(form.structure.spec.d))
    if not dmat.det():
        raise DescentError("descended form is degenerate")


def eigenspace_decompose(s: EStructure):
    """Bases of ker(J - sqrt d) and ker(J + sqrt d) over Q(sqrt d).

    Computed from the exact projectors (1 +- J / sqrt d)/2; each space has
    dimension space_dim / 2.
    """
    n = s.space_dim
    d = s.spec.d
    ext = FieldSpec(d)
    inv_sqrt = QuadFieldElement(0, Fraction(1, d), d)  # 1/sqrt(d)
    half = Fraction(1, 2)
    out = []
    for sign in (1, -1):
        cols = []
        for j in range(n):
            e = [ext.zero()] * n
            e[j] = ext.one()
            je = s.J.apply(e)
            col = [
                (e[i] + sign * inv_sqrt * je[i]) * half
                for i in range(n)
            ]
            cols.append(col)
        M = ExactMatrix.from_columns(cols, ext)
        _, pivots = rref(M)
        basis = [tuple(normalize_vector(M.column(p))) for p in pivots]
        if len(basis) != n // 2:
            raise AssertionError("eigenspace has unexpected dimension")
        out.append(basis)
    return out[0], out[1]


def _trace_lift(vec, s: EStructure, i: int) -> QuadFieldElement:
    """Value at ``vec`` of the E-linear lift of the i-th coordinate
    functional f: lift(v) = f(v)/2 + (f(Jv)/2d) sqrt(d)."""
    d = s.spec.d
    jv = s.J.apply(vec)
    a = vec[i].rational_value() / 2
    b = jv[i].rational_value() / (2 * d)
    return QuadFieldElement(a, b, d)


def _det_e(entries, spec: FieldSpec) -> QuadFieldElement:
    r = len(entries)
    acc = spec.zero()
    for perm in permutations(range(r)):
        term = spec.one()
        for i, p in enumerate(perm):
            term = term * entries[i][p]
        acc = acc + term if _perm_sign(perm) > 0 else acc - term
    return acc


def _wedge_field_embed(s: EStructure):
    """Images in the rational exterior algebra of the two generators of
    the top E-exterior power (a 1-dimensional E-space, so 2 over Q).

    Coordinates come from the trace-dual composition: the I-th coordinate
    of the image of w_1 ^E ... ^E w_r is Tr_{E/Q} det_E(lift_{I_a}(w_b)).
    """
    n = s.space_dim
    r = s.e_dim
    basis = e_basis_vectors(s)
    gens = [list(basis)]
    twisted = [tuple(s.J.apply(basis[0]))] + [tuple(v) for v in basis[1:]]
    gens.append(twisted)
    out = []
    for vectors in gens:
        coeffs = {}
        for I in combinations(range(n), r):
            entries = [
                [_trace_lift(w, s, i) for w in vectors]
                for i in I
            ]
            val = _det_e(entries, s.spec).trace()
            if val:
                coeffs[I] = val
        out.append(WedgeElement(n, r, coeffs, RATIONALS))
    vecs = []
    for w in out:
        vecs.append([w.coeffs.get(I, RATIONALS.zero()) for I in combinations(range(n), r)])
    if rank(ExactMatrix(vecs, RATIONALS)) != 2:
        raise AssertionError("field wedge embedding lost rank")
    return out


def wedge_E_embed(s: EStructure, psi: ExactMatrix):
    """Basis (Q-dimension two) of the image of the top E-exterior power
    inside the rational exterior power of the same degree.

    psi is validated exactly as in trace descent; the image itself is
    independent of it.
    """
    trace_descend(psi, s, hermitian=s.spec.d < 0)
    return _wedge_field_embed(s)


def weil_hermitian(H: ExactMatrix, s: EStructure) -> EValuedForm:
    """The E-Hermitian form H(x, Jy) + sqrt(d) H(x, y) built from an
    alternating H compatible with an imaginary field action.

    Conjugate-linear in the first slot, linear in the second.
    """
    d = s.spec.d
    if d >= 0:
        raise DescentError("Weil Hermitian forms need an imaginary field")
    n = s.space_dim
    if H.rows != n or not H.is_alternating():
        raise DescentError("H must be alternating of matching size")
    if s.J.transpose() * H != -(H * s.J):
        raise DescentError("H and the field action are not compatible")
    A = H * s.J  # A(x, y) = H(x, Jy)
    B = H
    basis = e_basis_vectors(s)
    gram = []
    for x in basis:
        row = []
        for y in basis:
            a = _bilinear(A, x, y).rational_value()
            b = _bilinear(B, x, y).rational_value()
            row.append(QuadFieldElement(a, b, d))
        gram.append(tuple(row))
    form = EValuedForm(s, tuple(basis), tuple(gram), (A, B), True)
    _check_form_shape(form)
    return form


def weil_classes(s: EStructure, H: ExactMatrix):
    """The two-dimensional rational space of top E-wedge classes of an
    imaginary structure, inside the rational exterior power of degree
    space_dim / 2."""
    weil_hermitian(H, s)  # validates d < 0 and compatibility
    return _wedge_field_embed(s)
