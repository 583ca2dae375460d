"""Exact verification of the combinatorial multilinear identities.

Three families live here: the alternating-sum binomial identity that
makes inclusion-exclusion over projections collapse to one, the identity
expressing the full diagonal pullback of a wedge class through proper
projections plus its full alternation, and the determinant-specialization
algorithm (shuffle decomposition of a top wedge along a subspace and its
complement, plus iterated Gram contraction recovering the subspace
determinant).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

from .field import RATIONALS, coeff_to_json
from .matrix import ExactMatrix, rank
from .qspace import QuadraticSpace
from .tensor import (
    MultiTensor,
    WedgeElement,
    _perm_sign,
    contract_slot,
    diag_pullback,
    proj_pullback,
    realization_in_power,
    wedge_of_vectors,
    wedge_to_tensor,
)


class IdentityError(ValueError):
    pass


@dataclass(frozen=True)
class IdentityReport:
    identity: str
    params: dict
    status: str
    scalar: str | None = None
    counterexample: list | None = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        out = {
            "identity": self.identity,
            "params": self.params,
            "status": self.status,
        }
        if self.scalar is not None:
            out["scalar"] = self.scalar
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


def binom_unity(n: int, i0: int) -> Fraction:
    """sum_{i=i0}^{2n-1} (-1)^(i-1) C(2n-i0, i-i0); always 1 in range."""
    if not 1 <= i0 <= 2 * n - 1:
        raise IdentityError("need 1 <= i0 <= 2n-1")
    acc = Fraction(0)
    for i in range(i0, 2 * n):
        term = comb(2 * n - i0, i - i0)
        acc += term if (i - 1) % 2 == 0 else -term
    return acc


def _proper_nonempty_subsets(m: int):
    for size in range(1, m):
        yield from combinations(range(1, m + 1), size)


def sum_identity_residual(beta: WedgeElement, m: int) -> WedgeElement:
    """Full-diagonal pullback minus (signed proper projections + full
    alternation realization), inside the degree-m wedge of m base copies."""
    lhs = diag_pullback(beta, m)
    rhs = realization_in_power(beta, (1,) * m)
    for J in _proper_nonempty_subsets(m):
        part = proj_pullback(diag_pullback(beta, len(J)), J, m)
        rhs = rhs + part if (len(J) - 1) % 2 == 0 else rhs - part
    return lhs - rhs


def verify_sum_identity(dimV: int, m: int) -> IdentityReport:
    """Check the identity for every basis wedge of degree m on Q^dimV."""
    if not 1 <= m <= dimV:
        raise IdentityError("need 1 <= m <= dimV")
    params = {"dim": dimV, "m": m}
    for key in combinations(range(dimV), m):
        beta = WedgeElement.basis(dimV, key)
        residual = sum_identity_residual(beta, m)
        if not residual.is_zero():
            terms = [
                {"idx": list(k), "coeff": coeff_to_json(v)}
                for k, v in residual.items()
            ]
            return IdentityReport("sum-identity", params, "fail", counterexample=terms)
    return IdentityReport("sum-identity", params, "pass", scalar="0")


@dataclass(frozen=True)
class SpecializationInput:
    """Ambient space with a distinguished subspace and a complement.

    The sub-basis must span a nondegenerate subspace and together with the
    complement a full basis; orthogonality between the two is not required
    (the specialization theorems assume it, the identity does not).
    """

    ambient: QuadraticSpace
    sub_basis: tuple
    complement_basis: tuple

    def __post_init__(self):
        n = self.ambient.dim
        sub = tuple(tuple(v) for v in self.sub_basis)
        comp = tuple(tuple(v) for v in self.complement_basis)
        object.__setattr__(self, "sub_basis", sub)
        object.__setattr__(self, "complement_basis", comp)
        if len(sub) + len(comp) != n:
            raise IdentityError("sub-basis and complement must together have full size")
        stacked = ExactMatrix([list(v) for v in sub + comp])
        if rank(stacked) != n:
            raise IdentityError("sub-basis and complement do not span the space")
        if sub:
            gram = ExactMatrix(
                [[self.ambient.pairing(x, y) for y in sub] for x in sub]
            )
            if not gram.det():
                raise IdentityError("subspace is degenerate")

    @property
    def codim(self) -> int:
        return len(self.complement_basis)

    def ambient_det_wedge(self) -> WedgeElement:
        """Top wedge of (sub-basis ++ complement), the normalization used
        throughout this module."""
        return wedge_of_vectors(
            list(self.sub_basis) + list(self.complement_basis), self.ambient.dim
        )

    def sub_det_wedge(self) -> WedgeElement:
        return wedge_of_vectors(list(self.sub_basis), self.ambient.dim)

    def complement_det_wedge(self) -> WedgeElement:
        return wedge_of_vectors(list(self.complement_basis), self.ambient.dim)


def proportionality(t: MultiTensor, reference: MultiTensor):
    """(is_multiple, scalar) with t = scalar * reference; scalar None when
    reference is zero and t is not."""
    if reference.is_zero():
        return t.is_zero(), None
    key = min(reference.coeffs)
    ref = reference.coeffs[key]
    val = t.coeffs.get(key)
    if val is None:
        return t.is_zero(), None
    scalar = val / ref
    return t == reference.scale(scalar), scalar


def det_quotient_identity(inp: SpecializationInput) -> IdentityReport:
    """The top determinant tensor equals the signed sum over all slot
    subsets of size codim of (sub determinant in the remaining slots)
    tensor (complement determinant in the chosen slots); the report
    carries the global scalar, which is exactly 1 in this normalization.
    """
    n = inp.ambient.dim
    c = inp.codim
    lhs = wedge_to_tensor(inp.ambient_det_wedge())
    t_part = wedge_to_tensor(inp.sub_det_wedge())
    u_part = wedge_to_tensor(inp.complement_det_wedge())
    acc = {}
    for I in combinations(range(n), c):
        rest = tuple(p for p in range(n) if p not in I)
        sign = _perm_sign(rest + I)
        for key_t, val_t in t_part.coeffs.items():
            for key_u, val_u in u_part.coeffs.items():
                key = [0] * n
                for slot, idx in zip(rest, key_t):
                    key[slot] = idx
                for slot, idx in zip(I, key_u):
                    key[slot] = idx
                key = tuple(key)
                term = val_t * val_u if sign > 0 else -(val_t * val_u)
                s = acc.get(key)
                s = term if s is None else s + term
                if s:
                    acc[key] = s
                else:
                    acc.pop(key, None)
    rhs = MultiTensor(n, n, acc)
    ok, scalar = proportionality(lhs, rhs)
    params = {"dim": n, "codim": c}
    if ok and scalar is not None:
        return IdentityReport("det-quotient", params, "pass", scalar=str(scalar))
    diff = lhs - rhs
    terms = [
        {"idx": list(k), "coeff": coeff_to_json(v)} for k, v in diff.items()
    ][:16]
    return IdentityReport("det-quotient", params, "fail", counterexample=terms)


def specialize_det(inp: SpecializationInput, x_list) -> MultiTensor:
    """Iterated slot-1 contraction of the ambient determinant tensor
    against the given vectors, through the ambient Gram pairing."""
    x_list = [tuple(x) for x in x_list]
    if len(x_list) != inp.codim:
        raise IdentityError("need exactly codim contraction vectors")
    t = wedge_to_tensor(inp.ambient_det_wedge())
    for x in x_list:
        t = contract_slot(t, 0, x, inp.ambient.gram)
    return t


def specialize_report(inp: SpecializationInput, x_list) -> IdentityReport:
    """Run the specialization and test whether it lands on a nonzero
    multiple of the subspace determinant tensor."""
    result = specialize_det(inp, x_list)
    target = wedge_to_tensor(inp.sub_det_wedge())
    ok, scalar = proportionality(result, target)
    params = {"dim": inp.ambient.dim, "codim": inp.codim}
    if ok and scalar:
        return IdentityReport("specialize", params, "pass", scalar=str(scalar))
    status_terms = [
        {"idx": list(k), "coeff": coeff_to_json(v)} for k, v in result.items()
    ][:16]
    return IdentityReport(
        "specialize",
        params,
        "fail",
        scalar=None if scalar is None else str(scalar),
        counterexample=status_terms,
    )
