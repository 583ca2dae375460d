"""Sparse exact tensor and exterior algebra over Q or a quadratic field.

Tensors of degree k on a base of dimension n are sparse maps from index
k-tuples to coefficients; wedge elements use strictly increasing tuples.
The alternation embedding of a wedge into the tensor algebra is integral
(sum over all permutations with sign, no 1/k! factor), so every identity
in this package is stated over Z-spans of basis vectors and scalars are
reported explicitly where two routes differ by a factorial.

Sign conventions, fixed once:

* ``alternation(e_{i_1} ^ ... ^ e_{i_k}) = sum_sigma sgn(sigma)
  e_{i_sigma(1)} (x) ... (x) e_{i_sigma(k)}`` with the identity
  permutation contributing the in-order term with sign +1;
* partition realizations carry the shuffle signs induced by that choice,
  so that (block-wise alternation) o (realization) = full alternation
  holds on the nose.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations, product

from .field import FieldSpec, RATIONALS, as_element, coeff_from_json, coeff_to_json
from .matrix import ExactMatrix


def sort_with_sign(indices):
    """(sorted tuple, parity sign); sign 0 when an index repeats."""
    idx = list(indices)
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and idx[j - 1] == idx[j]:
            return None, 0
    return tuple(idx), sign


def _perm_sign(seq) -> int:
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return -1 if inv % 2 else 1


@dataclass(frozen=True)
class Partition:
    """Ordered list of nonnegative part sizes."""

    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(int(p) for p in self.parts))
        if any(p < 0 for p in self.parts):
            raise ValueError("parts must be nonnegative")

    @property
    def total(self) -> int:
        return sum(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)


def _as_parts(partition):
    return partition.parts if isinstance(partition, Partition) else tuple(partition)


class MultiTensor:
    """Sparse element of the degree-k tensor power of an n-dimensional base.

    ``variances`` optionally tags each slot as "std" or "dual"; it is pure
    bookkeeping for mixed carriers and never changes the arithmetic.
    """

    __slots__ = ("base_dim", "degree", "coeffs", "field", "variances")

    def __init__(self, base_dim, degree, coeffs=None, field: FieldSpec = RATIONALS, variances=None):
        clean = {}
        for key, val in (coeffs or {}).items():
            key = tuple(key)
            if len(key) != degree or any(not 0 <= i < base_dim for i in key):
                raise ValueError(f"bad index tuple {key}")
            val = as_element(val, field)
            if val:
                clean[key] = val
        if variances is not None:
            variances = tuple(variances)
            if len(variances) != degree or any(v not in ("std", "dual") for v in variances):
                raise ValueError("variance tags must be 'std'/'dual', one per slot")
        object.__setattr__(self, "base_dim", base_dim)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "variances", variances)

    def __setattr__(self, name, value):
        raise AttributeError("MultiTensor is immutable")

    def is_zero(self) -> bool:
        return not self.coeffs

    def items(self):
        return sorted(self.coeffs.items())

    def _like(self, coeffs, degree=None, variances=None):
        return MultiTensor(
            self.base_dim,
            self.degree if degree is None else degree,
            coeffs,
            self.field,
            self.variances if variances is None else variances,
        )

    def __eq__(self, other):
        if not isinstance(other, MultiTensor):
            return NotImplemented
        return (
            self.base_dim == other.base_dim
            and self.degree == other.degree
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.base_dim, self.degree, tuple(self.items())))

    def __add__(self, other: MultiTensor) -> MultiTensor:
        self._compat(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            s = out.get(k)
            s = v if s is None else s + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return self._like(out)

    def __sub__(self, other: MultiTensor) -> MultiTensor:
        return self + (-other)

    def __neg__(self) -> MultiTensor:
        return self._like({k: -v for k, v in self.coeffs.items()})

    def scale(self, scalar) -> MultiTensor:
        scalar = as_element(scalar, self.field)
        if not scalar:
            return self._like({})
        return self._like({k: v * scalar for k, v in self.coeffs.items()})

    def tensor(self, other: MultiTensor) -> MultiTensor:
        if self.base_dim != other.base_dim:
            raise ValueError("tensor factors live on different bases")
        out = {}
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                out[k1 + k2] = v1 * v2
        var = None
        if self.variances is not None or other.variances is not None:
            var = (self.variances or ("std",) * self.degree) + (
                other.variances or ("std",) * other.degree
            )
        return MultiTensor(self.base_dim, self.degree + other.degree, out, self.field, var)

    def _compat(self, other: MultiTensor) -> None:
        if self.base_dim != other.base_dim or self.degree != other.degree:
            raise ValueError("incompatible tensors")

    def __repr__(self):
        terms = ", ".join(f"{k}:{v}" for k, v in self.items())
        return f"MultiTensor(dim={self.base_dim}, deg={self.degree}, {{{terms}}})"


class WedgeElement:
    """Sparse element of the k-th exterior power; keys strictly increase."""

    __slots__ = ("base_dim", "degree", "coeffs", "field")

    def __init__(self, base_dim, degree, coeffs=None, field: FieldSpec = RATIONALS):
        clean = {}
        for key, val in (coeffs or {}).items():
            key = tuple(key)
            if len(key) != degree or any(not 0 <= i < base_dim for i in key):
                raise ValueError(f"bad index tuple {key}")
            if any(key[i] >= key[i + 1] for i in range(len(key) - 1)):
                raise ValueError(f"wedge index tuple {key} not strictly increasing")
            val = as_element(val, field)
            if val:
                clean[key] = val
        object.__setattr__(self, "base_dim", base_dim)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "field", field)

    def __setattr__(self, name, value):
        raise AttributeError("WedgeElement is immutable")

    @classmethod
    def basis(cls, base_dim, indices, field: FieldSpec = RATIONALS) -> WedgeElement:
        indices = tuple(indices)
        return cls(base_dim, len(indices), {indices: 1}, field)

    def is_zero(self) -> bool:
        return not self.coeffs

    def items(self):
        return sorted(self.coeffs.items())

    def _like(self, coeffs, degree=None):
        return WedgeElement(
            self.base_dim, self.degree if degree is None else degree, coeffs, self.field
        )

    def __eq__(self, other):
        if not isinstance(other, WedgeElement):
            return NotImplemented
        return (
            self.base_dim == other.base_dim
            and self.degree == other.degree
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.base_dim, self.degree, tuple(self.items())))

    def __add__(self, other: WedgeElement) -> WedgeElement:
        if self.base_dim != other.base_dim or self.degree != other.degree:
            raise ValueError("incompatible wedge elements")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            s = out.get(k)
            s = v if s is None else s + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return self._like(out)

    def __sub__(self, other: WedgeElement) -> WedgeElement:
        return self + (-other)

    def __neg__(self) -> WedgeElement:
        return self._like({k: -v for k, v in self.coeffs.items()})

    def scale(self, scalar) -> WedgeElement:
        scalar = as_element(scalar, self.field)
        if not scalar:
            return self._like({})
        return self._like({k: v * scalar for k, v in self.coeffs.items()})

    def wedge(self, other: WedgeElement) -> WedgeElement:
        if self.base_dim != other.base_dim:
            raise ValueError("wedge factors live on different bases")
        out = {}
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                key, sign = sort_with_sign(k1 + k2)
                if sign:
                    val = v1 * v2 if sign > 0 else -(v1 * v2)
                    s = out.get(key)
                    s = val if s is None else s + val
                    if s:
                        out[key] = s
                    else:
                        out.pop(key, None)
        return self._like(out, self.degree + other.degree)

    def __repr__(self):
        terms = ", ".join(f"{k}:{v}" for k, v in self.items())
        return f"WedgeElement(dim={self.base_dim}, deg={self.degree}, {{{terms}}})"


def wedge_of_vectors(vectors, base_dim, field: FieldSpec = RATIONALS) -> WedgeElement:
    """v_1 ^ ... ^ v_k from coordinate vectors."""
    out = WedgeElement(base_dim, 0, {(): 1}, field)
    for v in vectors:
        lin = WedgeElement(
            base_dim, 1, {(i,): c for i, c in enumerate(v)}, field
        )
        out = out.wedge(lin)
    return out


def wedge_to_tensor(w: WedgeElement) -> MultiTensor:
    """Integral alternation embedding of the exterior power into tensors."""
    out = {}
    for key, val in w.coeffs.items():
        for perm in permutations(range(len(key))):
            sign = _perm_sign(perm)
            tup = tuple(key[p] for p in perm)
            out[tup] = val if sign > 0 else -val
    return MultiTensor(w.base_dim, w.degree, out, w.field)


def _shuffles(key, sizes):
    """Ordered splits of the increasing tuple ``key`` into blocks of the
    given sizes (each block increasing), with the shuffle sign."""
    def rec(remaining, size_idx, blocks):
        if size_idx == len(sizes):
            concat = tuple(i for b in blocks for i in b)
            yield tuple(blocks), _perm_sign(concat)
            return
        size = sizes[size_idx]
        for chosen in combinations(remaining, size):
            rest = tuple(i for i in remaining if i not in chosen)
            yield from rec(rest, size_idx + 1, blocks + [chosen])

    yield from rec(tuple(key), 0, [])


def realization_embed(w: WedgeElement, partition):
    """Image of a degree-m wedge under the partition embedding into a
    tensor product of smaller exterior powers.

    Returns a sparse map whose keys are tuples of increasing index tuples,
    one per part (empty parts contribute the empty tuple).  Composing with
    block-wise alternation recovers ``wedge_to_tensor`` exactly.
    """
    parts = _as_parts(partition)
    if sum(parts) != w.degree:
        raise ValueError("partition does not match the wedge degree")
    out = {}
    for key, val in w.coeffs.items():
        for blocks, sign in _shuffles(key, parts):
            blocks = tuple(tuple(b) for b in blocks)
            term = val if sign > 0 else -val
            s = out.get(blocks)
            s = term if s is None else s + term
            if s:
                out[blocks] = s
            else:
                out.pop(blocks, None)
    return out


def realization_in_power(w: WedgeElement, partition) -> WedgeElement:
    """The partition realization of ``w`` inside the exterior algebra of
    base^{(+)k}: part j lands in copy j and the blocks are wedged in copy
    order (indices stay increasing, so no extra signs appear)."""
    parts = _as_parts(partition)
    n = w.base_dim
    k = len(parts)
    out = {}
    for blocks, val in realization_embed(w, parts).items():
        flat = tuple(c * n + i for c, block in enumerate(blocks) for i in block)
        out[flat] = val
    return WedgeElement(n * k, w.degree, out, w.field)


def diag_pullback(t: WedgeElement, copies: int) -> WedgeElement:
    """Pullback along the diagonal base -> base^{(+)copies}, the algebra map
    sending a degree-one v to (v, ..., v)."""
    if copies < 1:
        raise ValueError("need at least one copy")
    n = t.base_dim
    out = {}
    for key, val in t.coeffs.items():
        for assign in product(range(copies), repeat=len(key)):
            tup, sign = sort_with_sign(
                tuple(c * n + i for c, i in zip(assign, key))
            )
            if not sign:
                continue
            term = val if sign > 0 else -val
            s = out.get(tup)
            s = term if s is None else s + term
            if s:
                out[tup] = s
            else:
                out.pop(tup, None)
    return WedgeElement(n * copies, t.degree, out, t.field)


def proj_pullback(t: WedgeElement, positions, total: int) -> WedgeElement:
    """Reindex a class on base^{(+)|J|} into copies J (1-based, increasing)
    of base^{(+)total}."""
    J = tuple(positions)
    if not J or len(set(J)) != len(J) or any(not 1 <= p <= total for p in J):
        raise ValueError("positions must be distinct and within range")
    if sorted(J) != list(J):
        raise ValueError("positions must be increasing")
    if t.base_dim % len(J):
        raise ValueError("base dimension is not a multiple of the copy count")
    n = t.base_dim // len(J)
    out = {}
    for key, val in t.coeffs.items():
        out[tuple((J[i // n] - 1) * n + (i % n) for i in key)] = val
    return WedgeElement(n * total, t.degree, out, t.field)


def restrict_to_copy(t: WedgeElement, copy: int, copies: int) -> WedgeElement:
    """Set every copy except ``copy`` (0-based) to zero and reindex down."""
    if t.base_dim % copies:
        raise ValueError("base dimension is not a multiple of the copy count")
    n = t.base_dim // copies
    lo, hi = copy * n, (copy + 1) * n
    out = {
        tuple(i - lo for i in key): val
        for key, val in t.coeffs.items()
        if all(lo <= i < hi for i in key)
    }
    return WedgeElement(n, t.degree, out, t.field)


def contract_slot(t: MultiTensor, slot: int, vector, gram: ExactMatrix) -> MultiTensor:
    """Contract one slot against a vector through the Gram pairing."""
    if not 0 <= slot < t.degree:
        raise ValueError("slot out of range")
    if gram.rows != t.base_dim or len(vector) != t.base_dim:
        raise ValueError("dimension mismatch")
    paired = gram.apply(vector)  # psi(e_i, vector) for each i
    out = {}
    for key, val in t.coeffs.items():
        w = paired[key[slot]]
        if not w:
            continue
        new_key = key[:slot] + key[slot + 1 :]
        term = val * w
        s = out.get(new_key)
        s = term if s is None else s + term
        if s:
            out[new_key] = s
        else:
            out.pop(new_key, None)
    var = None
    if t.variances is not None:
        var = t.variances[:slot] + t.variances[slot + 1 :]
    return MultiTensor(t.base_dim, t.degree - 1, out, t.field, var)


def _blocks_from_partition(parts, offset):
    blocks = []
    pos = offset
    for p in parts:
        blocks.append(list(range(pos, pos + p)))
        pos += p
    return blocks, pos


def is_alternating(t: MultiTensor, partition, dual_partition=()) -> bool:
    """True iff t changes by the product of signs under permutations inside
    each block, the first blocks covering the covariant slots and the rest
    the dual ones.  Checked on adjacent transpositions (they generate)."""
    parts = _as_parts(partition)
    dual_parts = _as_parts(dual_partition)
    s, s2 = sum(parts), sum(dual_parts)
    if s + s2 != t.degree:
        raise ValueError("partitions do not cover the slots")
    if t.variances is not None:
        expected = ("std",) * s + ("dual",) * s2
        if t.variances != expected:
            raise ValueError("variance tags disagree with the block structure")
    blocks, pos = _blocks_from_partition(parts, 0)
    blocks2, _ = _blocks_from_partition(dual_parts, pos)
    for block in blocks + blocks2:
        for a, b in zip(block, block[1:]):
            swapped = {}
            for key, val in t.coeffs.items():
                lk = list(key)
                lk[a], lk[b] = lk[b], lk[a]
                swapped[tuple(lk)] = val
            if swapped != {k: -v for k, v in t.coeffs.items()}:
                return False
    return True


def tensor_to_json(t) -> dict:
    return {
        "degree": t.degree,
        "dim": t.base_dim,
        "terms": [
            {"idx": list(k), "coeff": coeff_to_json(v)} for k, v in t.items()
        ],
    }


def tensor_from_json(payload, field: FieldSpec = RATIONALS, wedge: bool = False):
    coeffs = {
        tuple(term["idx"]): coeff_from_json(term["coeff"], field)
        for term in payload["terms"]
    }
    cls = WedgeElement if wedge else MultiTensor
    return cls(payload["dim"], payload["degree"], coeffs, field)
