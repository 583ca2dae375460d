"""Lie-algebra invariants on tensor carriers, exactly.

A representation is a rational Lie algebra given by a matrix basis acting
on a base space, a carrier expression describing the induced space, and
optionally finitely many group elements (component representatives such
as a reflection turning SO into O).  Invariant vectors are the joint
kernel of the derivation actions intersected with the fixed spaces of the
group elements, computed by incremental sparse elimination: elements
acting diagonally are applied first (their joint kernel is a coordinate
subspace), the rest shrink the candidate space one at a time.

For representations carrying a quadratic-field structure (unitary and
restriction-of-scalars orthogonal algebras) the computation runs in the
eigenbasis of the field action over Q(sqrt d), where a maximal torus
becomes diagonal, and the resulting basis is pulled back and
re-rationalized; the dimension of a kernel does not change under field
extension, and every returned vector is re-verified over Q.

The module also builds the classical generator sets (complete
contractions, determinant realizations), measures whether products of
generators span the full invariant space, and enumerates
permutation-stable subspaces of F_2^m.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations, permutations, product

from .carriers import (
    CarrierSpace,
    Dual,
    MatrixContext,
    Std,
    Sum,
    TProd,
    Wedge,
    carrier_dim,
    flatten_slots,
)
from .descent import EStructure, eigenspace_decompose
from .field import FieldSpec, RATIONALS
from .matrix import ExactMatrix, kernel_basis
from .tensor import sort_with_sign

_ONE = Fraction(1)


class InvariantError(ValueError):
    pass


# -- sparse linear algebra over duck-typed exact scalars ------------------


def _sparse_kernel(columns, one):
    """Kernel combinations of the matrix whose columns are given sparsely."""
    pivots = {}
    kernel = []
    for j, col in enumerate(columns):
        cur = dict(col)
        combo = {j: one}
        placed = False
        while cur:
            r = min(cur)
            hit = pivots.get(r)
            if hit is None:
                pivots[r] = (cur, combo)
                placed = True
                break
            pcol, pcombo = hit
            f = cur[r] / pcol[r]
            for k, v in pcol.items():
                s = cur.get(k)
                s = -(f * v) if s is None else s - f * v
                if s:
                    cur[k] = s
                else:
                    cur.pop(k, None)
            for k, v in pcombo.items():
                s = combo.get(k)
                s = -(f * v) if s is None else s - f * v
                if s:
                    combo[k] = s
                else:
                    combo.pop(k, None)
        if not placed:
            kernel.append(combo)
    return kernel


def _span_reduce(vectors):
    """Echelon-independent subset spanning the same space."""
    pivots = {}
    basis = []
    for vec in vectors:
        cur = dict(vec)
        while cur:
            r = min(cur)
            p = pivots.get(r)
            if p is None:
                pivots[r] = cur
                basis.append(cur)
                break
            f = cur[r] / p[r]
            for k, v in p.items():
                s = cur.get(k)
                s = -(f * v) if s is None else s - f * v
                if s:
                    cur[k] = s
                else:
                    cur.pop(k, None)
    return basis


def span_dimension(vectors) -> int:
    return len(_span_reduce(vectors))


def reduce_membership(basis, vec):
    """Residual of vec after reduction against an echelon basis; empty
    residual means membership in the span."""
    pivots = {min(b): b for b in basis}
    cur = dict(vec)
    while cur:
        r = min(cur)
        p = pivots.get(r)
        if p is None:
            return cur
        f = cur[r] / p[r]
        for k, v in p.items():
            s = cur.get(k)
            s = -(f * v) if s is None else s - f * v
            if s:
                cur[k] = s
            else:
                cur.pop(k, None)
    return cur


def _combine(K, combo):
    out = {}
    for j, c in combo.items():
        for pos, v in K[j].items():
            s = out.get(pos)
            s = c * v if s is None else s + c * v
            if s:
                out[pos] = s
            else:
                out.pop(pos, None)
    return out


# -- representations ------------------------------------------------------


@dataclass(frozen=True)
class LieRep:
    """Matrix Lie algebra basis + carrier expression (+ component data)."""

    base_dim: int
    basis_matrices: tuple
    carrier: object
    extra_group_elements: tuple = ()
    estructure: EStructure | None = None
    pairing: ExactMatrix | None = None

    def __post_init__(self):
        object.__setattr__(self, "basis_matrices", tuple(self.basis_matrices))
        object.__setattr__(
            self, "extra_group_elements", tuple(self.extra_group_elements)
        )
        for M in self.basis_matrices + self.extra_group_elements:
            if M.rows != self.base_dim or M.cols != self.base_dim:
                raise InvariantError("matrices must be square of the base dimension")

    def carrier_dimension(self) -> int:
        return carrier_dim(self.carrier, self.base_dim)

    def with_carrier(self, carrier) -> LieRep:
        return replace(self, carrier=carrier)


def _vectorize(M: ExactMatrix):
    return [M.data[i][j] for i in range(M.rows) for j in range(M.cols)]


def is_bracket_closed(mats) -> bool:
    """Whether [X_i, X_j] always lies in the span of the basis."""
    mats = list(mats)
    if not mats:
        return True
    basis = _span_reduce(
        [{i: v for i, v in enumerate(_vectorize(M)) if v} for M in mats]
    )
    for a in range(len(mats)):
        for b in range(a + 1, len(mats)):
            Z = mats[a] * mats[b] - mats[b] * mats[a]
            vec = {i: v for i, v in enumerate(_vectorize(Z)) if v}
            if reduce_membership(basis, vec):
                return False
    return True


# -- Lie algebra constructors ---------------------------------------------


def _matrices_from_kernel(vectors, n):
    out = []
    for vec in vectors:
        out.append(ExactMatrix([[vec[i * n + j] for j in range(n)] for i in range(n)]))
    return out


def gl_basis(n: int):
    out = []
    for a in range(n):
        for b in range(n):
            out.append(
                ExactMatrix([[1 if (i, j) == (a, b) else 0 for j in range(n)] for i in range(n)])
            )
    return out


def sl_basis(n: int):
    out = []
    for a in range(n - 1):
        rows = [[0] * n for _ in range(n)]
        rows[a][a] = 1
        rows[a + 1][a + 1] = -1
        out.append(ExactMatrix(rows))
    for a in range(n):
        for b in range(n):
            if a != b:
                out.append(
                    ExactMatrix(
                        [[1 if (i, j) == (a, b) else 0 for j in range(n)] for i in range(n)]
                    )
                )
    return out


def _form_rows(G: ExactMatrix):
    """Linear conditions (X^T G + G X)_{ij} = 0 on the entries of X."""
    n = G.rows
    rows = []
    for i in range(n):
        for j in range(n):
            row = [RATIONALS.zero()] * (n * n)
            for k in range(n):
                row[k * n + i] = row[k * n + i] + G.data[k][j]
                row[k * n + j] = row[k * n + j] + G.data[i][k]
            rows.append(row)
    return rows


def _commute_rows(J: ExactMatrix):
    """Linear conditions (XJ - JX)_{ij} = 0."""
    n = J.rows
    rows = []
    for i in range(n):
        for j in range(n):
            row = [RATIONALS.zero()] * (n * n)
            for k in range(n):
                row[i * n + k] = row[i * n + k] + J.data[k][j]
                row[k * n + j] = row[k * n + j] - J.data[i][k]
            rows.append(row)
    return rows


def so_basis(G: ExactMatrix):
    if not G.is_symmetric() or not G.det():
        raise InvariantError("so needs a symmetric nondegenerate form")
    n = G.rows
    return _matrices_from_kernel(kernel_basis(ExactMatrix(_form_rows(G))), n)


def sp_basis(data):
    if isinstance(data, int):
        if data % 2:
            raise InvariantError("standard symplectic space must be even-dimensional")
        m = data // 2
        rows = [[0] * data for _ in range(data)]
        for i in range(m):
            rows[i][m + i] = 1
            rows[m + i][i] = -1
        H = ExactMatrix(rows)
    else:
        H = data
    if not H.is_alternating() or not H.det():
        raise InvariantError("sp needs an alternating nondegenerate form")
    n = H.rows
    return _matrices_from_kernel(kernel_basis(ExactMatrix(_form_rows(H))), n)


def unitary_so_basis(s: EStructure, form: ExactMatrix):
    """{X : XJ = JX, X^T G + G X = 0}: the Lie algebra of the unitary group
    of the trace-descended form for d < 0, of its restriction-of-scalars
    orthogonal group for d > 0."""
    from .descent import check_compatibility

    check_compatibility(form, s, hermitian=s.spec.d < 0)
    if not form.det():
        raise InvariantError("form must be nondegenerate")
    n = s.space_dim
    rows = _form_rows(form) + _commute_rows(s.J)
    return _matrices_from_kernel(kernel_basis(ExactMatrix(rows)), n)


def su_basis(s: EStructure, H: ExactMatrix):
    """Special unitary algebra of the Hermitian form attached to an
    alternating H on an imaginary structure: commute with J, preserve H,
    and have zero E-trace (tr X = tr JX = 0)."""
    if s.spec.d >= 0:
        raise InvariantError("su needs an imaginary quadratic field")
    if not H.is_alternating() or not H.det():
        raise InvariantError("su needs an alternating nondegenerate form")
    if s.J.transpose() * H != -(H * s.J):
        raise InvariantError("H and the field action are not compatible")
    n = s.space_dim
    rows = _form_rows(H) + _commute_rows(s.J)
    tr = [RATIONALS.zero()] * (n * n)
    for i in range(n):
        tr[i * n + i] = RATIONALS.one()
    rows.append(tr)
    trj = [RATIONALS.zero()] * (n * n)
    for i in range(n):
        for k in range(n):
            trj[k * n + i] = trj[k * n + i] + s.J.data[i][k]
    rows.append(trj)
    return _matrices_from_kernel(kernel_basis(ExactMatrix(rows)), n)


def lie_constructor(kind: str, data):
    """Exact Q-basis of the requested Lie algebra as matrices."""
    kind = kind.replace("-", "_")
    if kind == "gl":
        return gl_basis(int(data))
    if kind == "sl":
        return sl_basis(int(data))
    if kind == "so":
        G = data.gram if hasattr(data, "gram") else data
        return so_basis(G)
    if kind == "sp":
        return sp_basis(data)
    if kind == "su":
        s, H = data
        return su_basis(s, H)
    if kind in ("res_so", "u"):
        s, form = data
        if kind == "res_so" and s.spec.d < 0:
            raise InvariantError("res_so needs a real quadratic field")
        if kind == "u" and s.spec.d > 0:
            raise InvariantError("u needs an imaginary quadratic field")
        return unitary_so_basis(s, form)
    raise InvariantError(f"unknown Lie algebra kind {kind!r}")


def build_rep(kind: str, data, carrier, extra_group_elements=(), validate: bool = True) -> LieRep:
    """LieRep with the field structure wired up where the kind has one."""
    mats = lie_constructor(kind, data)
    kind = kind.replace("-", "_")
    estructure = pairing = None
    if kind in ("su", "res_so", "u"):
        estructure, pairing = data[0], data[1]
        base_dim = estructure.space_dim
    elif kind == "so":
        pairing = data.gram if hasattr(data, "gram") else data
        base_dim = pairing.rows
    elif kind == "sp":
        base_dim = data if isinstance(data, int) else data.rows
    else:
        base_dim = int(data)
    if validate and len(mats) <= 32 and not is_bracket_closed(mats):
        raise InvariantError("constructed basis is not bracket-closed")
    return LieRep(
        base_dim,
        tuple(mats),
        carrier,
        tuple(extra_group_elements),
        estructure,
        pairing,
    )


def reflection_matrix(gram: ExactMatrix, vector) -> ExactMatrix:
    """Orthogonal reflection x -> x - 2 psi(x,v)/psi(v,v) v."""
    n = gram.rows
    gv = gram.apply(vector)
    q = sum((a * b for a, b in zip(vector, gv)), RATIONALS.zero())
    if not q:
        raise InvariantError("cannot reflect in an isotropic vector")
    cols = []
    for j in range(n):
        col = [RATIONALS.one() if i == j else RATIONALS.zero() for i in range(n)]
        f = (gv[j] + gv[j]) / q
        if f:
            col = [c - f * v for c, v in zip(col, vector)]
        cols.append(col)
    return ExactMatrix.from_columns(cols)


# -- invariant computation -------------------------------------------------


def carrier_action(rep: LieRep, g: ExactMatrix, mode: str = "derivation") -> ExactMatrix:
    """Dense matrix of a base endomorphism acting on the carrier."""
    space = CarrierSpace(rep.carrier, rep.base_dim)
    ctx = MatrixContext(g, mode, RATIONALS.zero(), RATIONALS.one())
    cols = []
    for i in range(space.dim):
        col_map = space.column(i, ctx)
        col = [RATIONALS.zero()] * space.dim
        for j, v in col_map.items():
            col[j] = v
        cols.append(col)
    return ExactMatrix.from_columns(cols)


def _invariant_core(space: CarrierSpace, der_ctxs, grp_ctxs, one):
    diag = [c for c in der_ctxs if c.is_diagonal()]
    rest = [c for c in der_ctxs if not c.is_diagonal()]
    if diag:
        entries = [c.diag_entries() for c in diag]
        K = [
            {i: one}
            for i in range(space.dim)
            if all(not space.diag_weight(i, dg) for dg in entries)
        ]
    else:
        K = [{i: one} for i in range(space.dim)]
    for ctx in rest:
        if not K:
            return []
        cols = [space.apply(k, ctx) for k in K]
        K = [_combine(K, c) for c in _sparse_kernel(cols, one)]
    for ctx in grp_ctxs:
        if not K:
            return []
        cols = []
        for k in K:
            img = space.apply(k, ctx)
            for pos, v in k.items():
                s = img.get(pos)
                s = -v if s is None else s - v
                if s:
                    img[pos] = s
                else:
                    img.pop(pos, None)
            cols.append(img)
        K = [_combine(K, c) for c in _sparse_kernel(cols, one)]
    return K


def _promote(M: ExactMatrix, ext: FieldSpec) -> ExactMatrix:
    return ExactMatrix(M.tolists(), ext)


def _diagonal_combinations(mats, field: FieldSpec):
    """Diagonal matrices in the linear span of the given square matrices."""
    if not mats:
        return []
    n = mats[0].rows
    off = [(i, j) for i in range(n) for j in range(n) if i != j]
    rows = [[M.data[i][j] for M in mats] for (i, j) in off]
    if not rows:
        return list(mats)
    combos = kernel_basis(ExactMatrix(rows, field))
    out = []
    for combo in combos:
        acc = ExactMatrix.zeros(n, n, field)
        for c, M in zip(combo, mats):
            if c:
                acc = acc + _promote(M, field) * c
        out.append(acc)
    return out


def _bilinear_ext(M: ExactMatrix, x, y, ext: FieldSpec):
    mx = [sum((M.data[i][j] * y[j] for j in range(M.cols)), ext.zero()) for i in range(M.rows)]
    return sum((a * b for a, b in zip(x, mx)), ext.zero())


def _eigen_change_of_basis(rep: LieRep):
    """Base change to the field-action eigenbasis, with the minus half
    aligned to the pairing-dual of the plus half (so the diagonal torus of
    the conjugated algebra really is diagonal)."""
    s = rep.estructure
    ext = FieldSpec(s.spec.d)
    plus, minus = eigenspace_decompose(s)
    m = len(plus)
    S = ExactMatrix(
        [[_bilinear_ext(rep.pairing, plus[i], minus[j], ext) for j in range(m)] for i in range(m)],
        ext,
    )
    Sinv = S.inverse()
    aligned = []
    for j in range(m):
        col = [ext.zero()] * s.space_dim
        for k in range(m):
            c = Sinv.data[k][j]
            if c:
                col = [a + c * b for a, b in zip(col, minus[k])]
        aligned.append(col)
    P = ExactMatrix.from_columns([list(p) for p in plus] + aligned, ext)
    return P, P.inverse(), ext


def _invariants_eigen(rep: LieRep, space: CarrierSpace, want_vectors: bool):
    P, Pinv, ext = _eigen_change_of_basis(rep)
    zero, one = ext.zero(), ext.one()
    conj = [Pinv * _promote(X, ext) * P for X in rep.basis_matrices]
    mats = _diagonal_combinations(conj, ext) + conj
    der = [MatrixContext(M, "derivation", zero, one) for M in mats]
    grp = [
        MatrixContext(Pinv * _promote(g, ext) * P, "group", zero, one)
        for g in rep.extra_group_elements
    ]
    K = _invariant_core(space, der, grp, one)
    if not want_vectors:
        return len(K), None
    back_ctx = MatrixContext(P, "group", zero, one)
    candidates = []
    for k in K:
        v = space.apply(k, back_ctx)
        ra, rb = {}, {}
        for pos, val in v.items():
            if val.a:
                ra[pos] = val.a
            if val.b:
                rb[pos] = val.b
        if ra:
            candidates.append(ra)
        if rb:
            candidates.append(rb)
    basis = _span_reduce(candidates)
    if len(basis) != len(K):
        raise AssertionError("re-rationalization changed the dimension")
    return len(K), basis


def _verify_invariants(rep: LieRep, space: CarrierSpace, vectors) -> None:
    zero, one = RATIONALS.zero(), RATIONALS.one()
    ders = [MatrixContext(X, "derivation", zero, one) for X in rep.basis_matrices]
    grps = [MatrixContext(g, "group", zero, one) for g in rep.extra_group_elements]
    for vec in vectors:
        for ctx in ders:
            if space.apply(vec, ctx):
                raise AssertionError("vector is not annihilated by the algebra")
        for ctx in grps:
            if space.apply(vec, ctx) != vec:
                raise AssertionError("vector is not fixed by a component element")


def _eigen_applicable(rep: LieRep) -> bool:
    # the alignment pairs the two eigenspaces through the form, which is
    # nondegenerate between them only in the imaginary case
    return (
        rep.estructure is not None
        and rep.pairing is not None
        and rep.estructure.spec.d < 0
    )


def invariant_basis(rep: LieRep, max_dim: int | None = None):
    """Exact basis of the joint kernel of the derivation actions inside
    the fixed space of the component-group elements.  Vectors are sparse
    maps from carrier basis positions to rationals, re-verified post hoc.
    """
    space = CarrierSpace(rep.carrier, rep.base_dim, max_dim)
    basis = None
    if _eigen_applicable(rep):
        try:
            _, basis = _invariants_eigen(rep, space, want_vectors=True)
        except ValueError:
            basis = None
    if basis is None:
        zero, one = RATIONALS.zero(), RATIONALS.one()
        der = [MatrixContext(X, "derivation", zero, one) for X in rep.basis_matrices]
        grp = [MatrixContext(g, "group", zero, one) for g in rep.extra_group_elements]
        basis = _invariant_core(space, der, grp, one)
    _verify_invariants(rep, space, basis)
    return basis


def invariant_dimension(rep: LieRep, max_dim: int | None = None) -> int:
    """Dimension only; for field-structured reps this skips the pullback."""
    space = CarrierSpace(rep.carrier, rep.base_dim, max_dim)
    if _eigen_applicable(rep):
        try:
            count, _ = _invariants_eigen(rep, space, want_vectors=False)
            return count
        except ValueError:
            pass
    return len(invariant_basis(rep, max_dim))


# -- classical generator sets ----------------------------------------------


@dataclass(frozen=True)
class CarrierVector:
    """A sparse vector together with the carrier it lives in."""

    expr: object
    coords: dict

    def degree(self):
        if isinstance(self.expr, Wedge):
            return self.expr.k
        slots = flatten_slots(self.expr)
        if slots is None:
            raise InvariantError("vector carrier has no slot structure")
        return len(slots)


def contraction_carrier(s: int) -> TProd:
    return TProd((Std(),) * s + (Dual(),) * s)


def complete_contractions(s: int, dimW: int):
    """One vector per permutation of {1..s}: the coordinate tensor of the
    full pairing of s covariant with s dual slots along the permutation."""
    if s < 1:
        raise InvariantError("need at least one slot pair")
    expr = contraction_carrier(s)
    space = CarrierSpace(expr, dimW)
    out = []
    for sigma in sorted(permutations(range(s))):
        inv = [0] * s
        for i, v in enumerate(sigma):
            inv[v] = i
        coords = {}
        for assign in product(range(dimW), repeat=s):
            key = tuple(assign) + tuple(assign[inv[j]] for j in range(s))
            coords[space.key_index(key)] = _ONE
        out.append(CarrierVector(expr, coords))
    return out


def pair_contraction_classes(dimW: int, copies: int):
    """Degree-two contraction classes inside wedge^2 of (W + W*)^{+copies}:
    sum_a w_a^(i) ^ nu_a^(j) for every ordered copy pair (i, j)."""
    base = Sum(tuple([Sum((Std(), Dual()))] * copies))
    expr = Wedge(2, base)
    space = CarrierSpace(expr, dimW)
    width = 2 * dimW
    out = []
    for i in range(copies):
        for j in range(copies):
            coords = {}
            for a in range(dimW):
                p = i * width + a
                q = j * width + dimW + a
                key, sign = sort_with_sign((p, q))
                val = _ONE if sign > 0 else -_ONE
                pos = space.key_index(key)
                coords[pos] = coords.get(pos, Fraction(0)) + val
            coords = {k: v for k, v in coords.items() if v}
            out.append(CarrierVector(expr, coords))
    return out


def _compositions(total: int, parts: int):
    """All ordered tuples of ``parts`` nonnegative integers summing to total."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def determinant_realizations(dimW: int, copies: int, dual: bool = False):
    """All partition realizations of the top wedge of W (or W*) inside
    wedge^dimW of (W + W*)^{+copies}, one vector per composition."""
    from .tensor import WedgeElement, realization_embed

    base = Sum(tuple([Sum((Std(), Dual()))] * copies))
    expr = Wedge(dimW, base)
    space = CarrierSpace(expr, dimW)
    width = 2 * dimW
    offset = dimW if dual else 0
    top = WedgeElement(dimW, dimW, {tuple(range(dimW)): 1})
    out = []
    for parts in sorted(_compositions(dimW, copies)):
        coords = {}
        for blocks, val in realization_embed(top, parts).items():
            flat = tuple(
                c * width + offset + i for c, block in enumerate(blocks) for i in block
            )
            coords[space.key_index(flat)] = Fraction(val.rational_value())
        out.append(CarrierVector(expr, coords))
    return out


# -- generator coverage -----------------------------------------------------


@dataclass(frozen=True)
class CoverageReport:
    invariant_dim: int
    span_dim: int
    equal: bool
    product_count: int

    def to_json(self) -> dict:
        return {
            "invariant_dim": self.invariant_dim,
            "span_dim": self.span_dim,
            "equal": self.equal,
            "product_count": self.product_count,
        }


def _wedge_products(rep: LieRep, generators, cap_degree):
    target = rep.carrier
    base = target.inner
    n = rep.base_dim
    spaces = {}

    def wedge_space(k):
        if k not in spaces:
            spaces[k] = CarrierSpace(Wedge(k, base), n)
        return spaces[k]

    from .carriers import normalize_expr

    base_norm = normalize_expr(base)
    tuple_gens = []
    for g in generators:
        if not isinstance(g.expr, Wedge) or normalize_expr(g.expr.inner) != base_norm:
            raise InvariantError("wedge coverage needs generators over the same base")
        keys = wedge_space(g.expr.k).keys()
        tuple_gens.append(
            (g.expr.k, {keys[pos]: val for pos, val in g.coords.items()})
        )

    target_space = wedge_space(target.k)
    products = []

    def emit(factors):
        acc = {(): _ONE}
        for _, vec in factors:
            nxt = {}
            for k1, v1 in acc.items():
                for k2, v2 in vec.items():
                    key, sign = sort_with_sign(k1 + k2)
                    if not sign:
                        continue
                    term = v1 * v2 if sign > 0 else -(v1 * v2)
                    s = nxt.get(key)
                    s = term if s is None else s + term
                    if s:
                        nxt[key] = s
                    else:
                        nxt.pop(key, None)
            acc = nxt
            if not acc:
                return
        products.append({target_space.key_index(k): v for k, v in acc.items()})

    def rec(start, degree_left, factors):
        if degree_left == 0:
            emit(factors)
            return
        for idx in range(start, len(tuple_gens)):
            deg, vec = tuple_gens[idx]
            if 0 < deg <= degree_left:
                rec(idx, degree_left - deg, factors + [(idx, vec)])

    if cap_degree >= target.k:
        rec(0, target.k, [])
    return products, target_space


def _tensor_products(rep: LieRep, generators, cap_degree):
    slots = flatten_slots(rep.carrier)
    if slots is None:
        raise InvariantError("tensor coverage needs a flat tensor carrier")
    if len(slots) > cap_degree:
        return [], CarrierSpace(rep.carrier, rep.base_dim)
    n = rep.base_dim
    target_space = CarrierSpace(rep.carrier, n)
    gens = []
    for g in generators:
        gslots = flatten_slots(g.expr)
        if gslots is None:
            raise InvariantError("generators must live in flat tensor carriers")
        gspace = CarrierSpace(g.expr, n)
        keys = gspace.keys()
        gens.append((gslots, {keys[pos]: val for pos, val in g.coords.items()}))

    placements = []

    def rec(uncovered, chosen):
        if not uncovered:
            placements.append(list(chosen))
            return
        first = uncovered[0]
        for gi, (gslots, _) in enumerate(gens):
            for anchor in range(len(gslots)):
                if gslots[anchor] != slots[first]:
                    continue
                others = [t for t in range(len(gslots)) if t != anchor]
                pool = uncovered[1:]
                for image in permutations(pool, len(others)):
                    if any(gslots[t] != slots[p] for t, p in zip(others, image)):
                        continue
                    assign = {anchor: first}
                    assign.update(dict(zip(others, image)))
                    rest = tuple(p for p in pool if p not in image)
                    chosen.append((gi, assign))
                    rec(rest, chosen)
                    chosen.pop()

    rec(tuple(range(len(slots))), [])

    products = []
    p = len(slots)
    for placement in placements:
        acc = [(dict(), _ONE)]
        for gi, assign in placement:
            _, vec = gens[gi]
            nxt = []
            for partial, coeff in acc:
                for key, val in vec.items():
                    upd = dict(partial)
                    for gslot, cslot in assign.items():
                        upd[cslot] = key[gslot]
                    nxt.append((upd, coeff * val))
            acc = nxt
        coords = {}
        for partial, coeff in acc:
            key = tuple(partial[t] for t in range(p))
            pos = target_space.key_index(key)
            s = coords.get(pos)
            s = coeff if s is None else s + coeff
            if s:
                coords[pos] = s
            else:
                coords.pop(pos, None)
        if coords:
            products.append(coords)
    return products, target_space


def generator_coverage(rep: LieRep, generators, closure_degrees=None) -> CoverageReport:
    """Compare the invariant space with the span of all admissible
    products of the generators (wedge products for wedge carriers, slot
    placements for flat tensor carriers).

    ``equal`` demands both exact dimension equality and membership of the
    product span inside the invariant space.
    """
    cap = closure_degrees if closure_degrees is not None else rep.carrier_dimension()
    if isinstance(rep.carrier, Wedge):
        products, space = _wedge_products(rep, generators, cap)
    else:
        products, space = _tensor_products(rep, generators, cap)
    basis = _span_reduce(products)
    inv_dim = invariant_dimension(rep)
    zero, one = RATIONALS.zero(), RATIONALS.one()
    ders = [MatrixContext(X, "derivation", zero, one) for X in rep.basis_matrices]
    grps = [MatrixContext(g, "group", zero, one) for g in rep.extra_group_elements]
    contained = True
    for vec in basis:
        if any(space.apply(vec, ctx) for ctx in ders):
            contained = False
            break
        if any(space.apply(vec, ctx) != vec for ctx in grps):
            contained = False
            break
    span_dim = len(basis)
    return CoverageReport(
        invariant_dim=inv_dim,
        span_dim=span_dim,
        equal=contained and span_dim == inv_dim,
        product_count=len(products),
    )


# -- Galois-stable subgroup enumeration -------------------------------------


def galois_stable_subgroups(m: int, perm_generators):
    """All F_2^m subspaces stable under the given coordinate permutations.

    Permutations are 0-based image tuples; subspaces come back as sorted
    tuples of basis vectors (0/1 tuples, reduced row echelon form).
    """
    if not 1 <= m <= 6:
        raise InvariantError("enumeration is bounded at m <= 6")
    perms = []
    for p in perm_generators:
        p = tuple(p)
        if sorted(p) != list(range(m)):
            raise InvariantError(f"not a permutation of 0..{m-1}: {p}")
        perms.append(p)

    def permute_bits(x: int, p) -> int:
        y = 0
        for i in range(m):
            if x >> i & 1:
                y |= 1 << p[i]
        return y

    subspaces = []
    for k in range(m + 1):
        for pivots in combinations(range(m), k):
            free_pos = [
                (r, c)
                for r in range(k)
                for c in range(pivots[r] + 1, m)
                if c not in pivots
            ]
            for bits in range(1 << len(free_pos)):
                rows = [1 << pivots[r] for r in range(k)]
                for t, (r, c) in enumerate(free_pos):
                    if bits >> t & 1:
                        rows[r] |= 1 << c
                span = {0}
                for row in rows:
                    span |= {x ^ row for x in span}
                if all(
                    permute_bits(row, p) in span for row in rows for p in perms
                ):
                    subspaces.append(tuple(sorted(rows)))
    subspaces.sort(key=lambda rows: (len(rows), rows))
    return [
        tuple(tuple((row >> i) & 1 for i in range(m)) for row in rows)
        for rows in subspaces
    ]
