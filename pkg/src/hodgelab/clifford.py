"""Clifford algebras of diagonalized rational quadratic spaces.

Basis elements are indexed by subsets of the orthogonal generators, with
the product given by the usual transposition sign rule and e_i^2 = q_i.
Convention: q(v) = psi(v, v), so vw + wv = 2 psi(v, w) inside the algebra.
Implements the even part, volume element, centers via exact commutant
kernels, vector conjugation v -> g v g^-1, and the embedding of the base
space into endomorphisms of the even part used for the Kuga-Satake layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .field import FieldSpec, RATIONALS, as_element, coeff_from_json, coeff_to_json
from .matrix import ExactMatrix, congruent_diagonalize, kernel_basis, solve
from .qspace import QuadraticSpace


class CliffordError(ValueError):
    pass


@dataclass(frozen=True)
class CliffordAlgebra:
    """Cl of the diagonal form <q_1, ..., q_n>; dim 2^n over Q."""

    qvals: tuple

    def __post_init__(self):
        vals = tuple(Fraction(q) for q in self.qvals)
        if any(not q for q in vals):
            raise CliffordError("diagonal form values must be nonzero")
        object.__setattr__(self, "qvals", vals)

    @property
    def n(self) -> int:
        return len(self.qvals)

    @property
    def dim(self) -> int:
        return 2 ** self.n

    @property
    def even_dim(self) -> int:
        return 2 ** (self.n - 1) if self.n else 1

    def basis_subsets(self, even_only: bool = False):
        """All generator subsets, ordered by (size, lex)."""
        out = []
        for k in range(self.n + 1):
            if even_only and k % 2:
                continue
            out.extend(combinations(range(self.n), k))
        return out

    def one(self) -> CliffordElement:
        return CliffordElement({(): 1})

    def generator(self, i: int) -> CliffordElement:
        return CliffordElement({(i,): 1})

    def vector(self, coords) -> CliffordElement:
        return CliffordElement({(i,): c for i, c in enumerate(coords)})

    def volume(self) -> CliffordElement:
        return CliffordElement({tuple(range(self.n)): 1})

    def q(self, coords):
        """q(v) = psi(v, v) of a coordinate vector, in the diagonal basis."""
        acc = as_element(0, RATIONALS)
        for c, qi in zip(coords, self.qvals):
            c = as_element(c, RATIONALS)
            acc = acc + c * c * qi
        return acc


class CliffordElement:
    """Sparse subset-indexed element; subsets are increasing index tuples."""

    __slots__ = ("coeffs", "field")

    def __init__(self, coeffs=None, field: FieldSpec = RATIONALS):
        clean = {}
        for key, val in (coeffs or {}).items():
            key = tuple(key)
            if any(key[i] >= key[i + 1] for i in range(len(key) - 1)):
                raise CliffordError(f"subset {key} not strictly increasing")
            val = as_element(val, field)
            if val:
                clean[key] = val
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "field", field)

    def __setattr__(self, name, value):
        raise AttributeError("CliffordElement is immutable")

    def items(self):
        return sorted(self.coeffs.items(), key=lambda kv: (len(kv[0]), kv[0]))

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_even(self) -> bool:
        return all(len(k) % 2 == 0 for k in self.coeffs)

    def scalar_part(self):
        return self.coeffs.get((), self.field.zero())

    def vector_part(self, n: int):
        """Coordinates of the degree-one component."""
        return [self.coeffs.get((i,), self.field.zero()) for i in range(n)]

    def is_vector(self) -> bool:
        return all(len(k) == 1 for k in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, CliffordElement):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(self.items()))

    def __add__(self, other: CliffordElement) -> CliffordElement:
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            s = out.get(k)
            s = v if s is None else s + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return CliffordElement(out, self.field)

    def __sub__(self, other: CliffordElement) -> CliffordElement:
        return self + (-other)

    def __neg__(self) -> CliffordElement:
        return CliffordElement({k: -v for k, v in self.coeffs.items()}, self.field)

    def scale(self, scalar) -> CliffordElement:
        scalar = as_element(scalar, self.field)
        if not scalar:
            return CliffordElement({}, self.field)
        return CliffordElement({k: v * scalar for k, v in self.coeffs.items()}, self.field)

    def __repr__(self):
        terms = ", ".join(f"e{list(k)}:{v}" for k, v in self.items())
        return f"CliffordElement({{{terms}}})"


def _mul_basis(S, T, qvals):
    """e_S * e_T = sign * (prod of squared q's) * e_{S xor T}."""
    sign = 1
    # parity of transpositions moving each t past the elements of S above it
    for t in T:
        greater = sum(1 for s in S if s > t)
        if greater % 2:
            sign = -sign
    common = set(S) & set(T)
    coeff = Fraction(1)
    for i in common:
        coeff *= qvals[i]
    merged = tuple(sorted(set(S) ^ set(T)))
    return merged, sign * coeff


def clifford_build(space: QuadraticSpace):
    """(algebra, change of basis P) with P^T G P diagonal = the q-values."""
    P, D = congruent_diagonalize(space.gram)
    qvals = tuple(D.data[i][i].rational_value() for i in range(D.rows))
    return CliffordAlgebra(qvals), P


def clifford_mul(x: CliffordElement, y: CliffordElement, alg: CliffordAlgebra) -> CliffordElement:
    out = {}
    for S, a in x.coeffs.items():
        for T, b in y.coeffs.items():
            merged, c = _mul_basis(S, T, alg.qvals)
            term = a * b * c
            s = out.get(merged)
            s = term if s is None else s + term
            if s:
                out[merged] = s
            else:
                out.pop(merged, None)
    return CliffordElement(out, x.field)


def omega_squared(alg: CliffordAlgebra):
    """The square of the volume element e_1...e_n, always a scalar."""
    omega = alg.volume()
    sq = clifford_mul(omega, omega, alg)
    if set(sq.coeffs) - {()}:
        raise AssertionError("volume element squared to a non-scalar")
    return sq.scalar_part().rational_value()


def _left_mul_matrix(x: CliffordElement, alg: CliffordAlgebra, subsets) -> ExactMatrix:
    index = {S: i for i, S in enumerate(subsets)}
    cols = []
    for S in subsets:
        img = clifford_mul(x, CliffordElement({S: 1}), alg)
        col = [RATIONALS.zero()] * len(subsets)
        for T, v in img.coeffs.items():
            col[index[T]] = v
        cols.append(col)
    return ExactMatrix.from_columns(cols, RATIONALS)


def center(alg: CliffordAlgebra, even_only: bool = False):
    """Center of the full algebra, or of its even part.

    The full algebra is generated by the e_i, the even part by the
    quadratic products e_i e_j, so commutation is imposed against the
    respective generating set.  The even center is the commutative
    quadratic-field evidence: for even n it is spanned by 1 and the
    volume element.
    """
    subsets = alg.basis_subsets(even_only=even_only)
    if even_only:
        generators = [
            clifford_mul(alg.generator(i), alg.generator(j), alg)
            for i in range(alg.n)
            for j in range(i + 1, alg.n)
        ]
    else:
        generators = [alg.generator(i) for i in range(alg.n)]
    full = alg.basis_subsets()
    index = {S: i for i, S in enumerate(full)}
    rows = [
        [RATIONALS.zero()] * len(subsets) for _ in range(len(generators) * len(full))
    ]
    for j, S in enumerate(subsets):
        x = CliffordElement({S: 1})
        for g_idx, gen in enumerate(generators):
            comm = clifford_mul(x, gen, alg) - clifford_mul(gen, x, alg)
            for T, v in comm.coeffs.items():
                rows[g_idx * len(full) + index[T]][j] = v
    if not rows:
        return [alg.one()]
    kern = kernel_basis(ExactMatrix(rows, RATIONALS))
    out = []
    for vec in kern:
        out.append(
            CliffordElement({S: v for S, v in zip(subsets, vec) if v}, RATIONALS)
        )
    return out


def clifford_inverse(g: CliffordElement, alg: CliffordAlgebra) -> CliffordElement:
    """Two-sided inverse through an exact linear solve; raises if singular."""
    subsets = alg.basis_subsets()
    L = _left_mul_matrix(g, alg, subsets)
    rhs = [RATIONALS.one() if S == () else RATIONALS.zero() for S in subsets]
    x = solve(L, rhs)
    if x is None:
        raise CliffordError("element is not invertible")
    inv = CliffordElement({S: v for S, v in zip(subsets, x) if v}, RATIONALS)
    if clifford_mul(inv, g, alg) != alg.one():
        raise CliffordError("element is not invertible")
    return inv


def spin_conjugate(g: CliffordElement, coords, alg: CliffordAlgebra):
    """g v g^-1 for a vector v, asserted to land back in the base space.

    Admissible g (even products of anisotropic vectors) always do; a
    non-vector result signals an inadmissible g and raises.
    """
    ginv = clifford_inverse(g, alg)
    v = alg.vector(coords)
    out = clifford_mul(clifford_mul(g, v, alg), ginv, alg)
    if not out.is_vector():
        raise CliffordError("conjugate left the base space; g is not admissible")
    return out.vector_part(alg.n)


def ks_embed(coords, base_coords, alg: CliffordAlgebra) -> ExactMatrix:
    """Matrix on the even part of x -> v . x . v0, linear in v.

    v0 must be anisotropic (q(v0) != 0) so the assignment is injective.
    Coordinates refer to the diagonalized basis of the algebra.
    """
    if not alg.q(base_coords):
        raise CliffordError("reference vector must be anisotropic")
    v = alg.vector(coords)
    v0 = alg.vector(base_coords)
    evens = alg.basis_subsets(even_only=True)
    index = {S: i for i, S in enumerate(evens)}
    cols = []
    for S in evens:
        img = clifford_mul(clifford_mul(v, CliffordElement({S: 1}), alg), v0, alg)
        col = [RATIONALS.zero()] * len(evens)
        for T, val in img.coeffs.items():
            if len(T) % 2:
                raise AssertionError("odd component in an even image")
            col[index[T]] = val
        cols.append(col)
    return ExactMatrix.from_columns(cols, RATIONALS)


def left_mul_even_matrix(g: CliffordElement, alg: CliffordAlgebra) -> ExactMatrix:
    """Left multiplication by an even g restricted to the even part."""
    if not g.is_even():
        raise CliffordError("need an even element")
    evens = alg.basis_subsets(even_only=True)
    index = {S: i for i, S in enumerate(evens)}
    cols = []
    for S in evens:
        img = clifford_mul(g, CliffordElement({S: 1}), alg)
        col = [RATIONALS.zero()] * len(evens)
        for T, val in img.coeffs.items():
            col[index[T]] = val
        cols.append(col)
    return ExactMatrix.from_columns(cols, RATIONALS)


def element_to_json(x: CliffordElement, alg: CliffordAlgebra) -> dict:
    return {
        "n": alg.n,
        "terms": [
            {"set": [i + 1 for i in S], "coeff": coeff_to_json(v)}
            for S, v in x.items()
        ],
    }


def element_from_json(payload, field: FieldSpec = RATIONALS) -> CliffordElement:
    coeffs = {
        tuple(i - 1 for i in term["set"]): coeff_from_json(term["coeff"], field)
        for term in payload["terms"]
    }
    return CliffordElement(coeffs, field)
