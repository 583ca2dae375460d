"""Carrier expressions: the small language describing representation
spaces built from a base space and its dual.

Grammar (the ``tprod`` production is an extension for mixed tensor
products such as W (x) W (x) W* that the k-fold constructors cannot
express)::

    carrier := "std" | "dual"
             | "sum(" carrier ("," carrier)* ")"
             | "pow(" carrier "," INT ")"
             | "wedge(" INT "," carrier ")"
             | "tensor(" INT "," carrier ")"
             | "tprod(" carrier ("," carrier)* ")"

Alongside the syntax tree the module builds the concrete carrier space:
basis enumeration and the matrix action of a base endomorphism, either as
a derivation (Leibniz rule, dual slots act by -X^T) or as a group element
(multiplicatively, dual slots by inverse transpose).  Actions are served
column by column as sparse maps so large carriers never materialize dense
matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from math import comb

from .tensor import sort_with_sign


class CarrierParseError(ValueError):
    """Syntax error with a 1-based character offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class CarrierTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class Std:
    def __str__(self):
        return "std"


@dataclass(frozen=True)
class Dual:
    def __str__(self):
        return "dual"


@dataclass(frozen=True)
class Sum:
    parts: tuple

    def __str__(self):
        return "sum(" + ",".join(str(p) for p in self.parts) + ")"


@dataclass(frozen=True)
class Pow:
    inner: object
    k: int

    def __str__(self):
        return f"pow({self.inner},{self.k})"


@dataclass(frozen=True)
class Wedge:
    k: int
    inner: object

    def __str__(self):
        return f"wedge({self.k},{self.inner})"


@dataclass(frozen=True)
class Tensor:
    k: int
    inner: object

    def __str__(self):
        return f"tensor({self.k},{self.inner})"


@dataclass(frozen=True)
class TProd:
    parts: tuple

    def __str__(self):
        return "tprod(" + ",".join(str(p) for p in self.parts) + ")"


STD = Std()
DUAL = Dual()


def carrier_dim(expr, base_dim: int) -> int:
    if isinstance(expr, (Std, Dual)):
        return base_dim
    if isinstance(expr, Sum):
        return sum(carrier_dim(p, base_dim) for p in expr.parts)
    if isinstance(expr, Pow):
        return expr.k * carrier_dim(expr.inner, base_dim)
    if isinstance(expr, Wedge):
        return comb(carrier_dim(expr.inner, base_dim), expr.k)
    if isinstance(expr, Tensor):
        return carrier_dim(expr.inner, base_dim) ** expr.k
    if isinstance(expr, TProd):
        out = 1
        for p in expr.parts:
            out *= carrier_dim(p, base_dim)
        return out
    raise TypeError(f"not a carrier expression: {expr!r}")


def normalize_expr(expr):
    """Structural normal form: pow nodes become explicit sums of copies."""
    if isinstance(expr, (Std, Dual)):
        return expr
    if isinstance(expr, Sum):
        return Sum(tuple(normalize_expr(p) for p in expr.parts))
    if isinstance(expr, Pow):
        inner = normalize_expr(expr.inner)
        return Sum((inner,) * expr.k)
    if isinstance(expr, Wedge):
        return Wedge(expr.k, normalize_expr(expr.inner))
    if isinstance(expr, Tensor):
        return Tensor(expr.k, normalize_expr(expr.inner))
    if isinstance(expr, TProd):
        return TProd(tuple(normalize_expr(p) for p in expr.parts))
    raise TypeError(f"not a carrier expression: {expr!r}")


def flatten_slots(expr):
    """Leaf slot types of a flat tensor-product carrier, or None.

    tensor(k, L) and tprod(...) over std/dual leaves flatten; a bare leaf
    is a single slot.  Anything else returns None.
    """
    if isinstance(expr, (Std, Dual)):
        return (expr,)
    if isinstance(expr, TProd):
        out = []
        for p in expr.parts:
            f = flatten_slots(p)
            if f is None:
                return None
            out.extend(f)
        return tuple(out)
    if isinstance(expr, Tensor):
        f = flatten_slots(expr.inner)
        if f is None:
            return None
        return f * expr.k
    return None


# -- parser ---------------------------------------------------------------


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self._skip()
        if self.pos >= len(self.text):
            return ("eof", "", self.pos + 1)
        ch = self.text[self.pos]
        if ch in "(),":
            return (ch, ch, self.pos + 1)
        if ch.isalpha():
            j = self.pos
            while j < len(self.text) and self.text[j].isalpha():
                j += 1
            return ("name", self.text[self.pos : j], self.pos + 1)
        if ch.isdigit():
            j = self.pos
            while j < len(self.text) and self.text[j].isdigit():
                j += 1
            return ("int", self.text[self.pos : j], self.pos + 1)
        raise CarrierParseError(f"unexpected character {ch!r}", self.pos + 1)

    def take(self):
        kind, value, offset = self.peek()
        self.pos += len(value)
        return kind, value, offset

    def expect(self, kind):
        k, value, offset = self.peek()
        if k != kind:
            raise CarrierParseError(f"expected {kind!r}", offset)
        return self.take()


def parse_carrier(text: str):
    """Parse a carrier expression; offsets in errors are 1-based."""
    lex = _Lexer(text)
    expr = _parse(lex)
    kind, _, offset = lex.peek()
    if kind != "eof":
        raise CarrierParseError("trailing input", offset)
    return expr


def _parse(lex: _Lexer):
    kind, name, offset = lex.take()
    if kind != "name":
        raise CarrierParseError("expected a carrier constructor", offset)
    if name == "std":
        return STD
    if name == "dual":
        return DUAL
    if name in ("sum", "tprod"):
        lex.expect("(")
        parts = [_parse(lex)]
        while True:
            kind, _, offset = lex.peek()
            if kind == ",":
                lex.take()
                parts.append(_parse(lex))
            elif kind == ")":
                lex.take()
                break
            else:
                raise CarrierParseError("expected ',' or ')'", offset)
        return Sum(tuple(parts)) if name == "sum" else TProd(tuple(parts))
    if name == "pow":
        lex.expect("(")
        inner = _parse(lex)
        lex.expect(",")
        _, value, offset = lex.expect("int")
        k = int(value)
        lex.expect(")")
        if k < 0:
            raise CarrierParseError("pow exponent must be nonnegative", offset)
        return Pow(inner, k)
    if name in ("wedge", "tensor"):
        lex.expect("(")
        _, value, offset = lex.expect("int")
        k = int(value)
        if k < 0:
            raise CarrierParseError("degree must be nonnegative", offset)
        lex.expect(",")
        inner = _parse(lex)
        lex.expect(")")
        return Wedge(k, inner) if name == "wedge" else Tensor(k, inner)
    raise CarrierParseError(f"unknown constructor {name!r}", offset)


# -- concrete spaces ------------------------------------------------------


class MatrixContext:
    """A base-space matrix prepared for carrier actions.

    ``mode`` is "derivation" (Leibniz, dual slots by -X^T) or "group"
    (multiplicative, dual slots by inverse transpose).
    """

    def __init__(self, matrix, mode: str, zero, one):
        self.mode = mode
        self.zero = zero
        self.one = one
        n = matrix.rows
        self.n = n
        data = matrix.data
        self.cols = [
            {i: data[i][j] for i in range(n) if data[i][j]} for j in range(n)
        ]
        self.rows = [
            {j: data[i][j] for j in range(n) if data[i][j]} for i in range(n)
        ]
        if mode == "group":
            inv = matrix.inverse()
            self.inv_rows = [
                {j: inv.data[i][j] for j in range(n) if inv.data[i][j]}
                for i in range(n)
            ]
        elif mode != "derivation":
            raise ValueError("mode must be 'derivation' or 'group'")

    def is_diagonal(self) -> bool:
        return all(set(col) <= {j} for j, col in enumerate(self.cols))

    def diag_entries(self):
        return [self.cols[j].get(j, self.zero) for j in range(self.n)]


class CarrierSpace:
    """Concrete basis + action of a carrier expression on base dimension n."""

    def __init__(self, expr, base_dim: int, max_dim: int | None = None):
        self.expr = expr
        self.base_dim = base_dim
        self.dim = carrier_dim(expr, base_dim)
        if max_dim is not None and self.dim > max_dim:
            raise CarrierTooLargeError(
                f"carrier dimension {self.dim} exceeds the cap {max_dim}"
            )
        self._node = _build(expr, base_dim)

    def keys(self):
        return self._node.keys()

    def key_index(self, key) -> int:
        return self._node.index(key)

    def column(self, i: int, ctx: MatrixContext) -> dict:
        return self._node.column(i, ctx)

    def apply(self, vec: dict, ctx: MatrixContext) -> dict:
        """Action applied to a sparse carrier vector."""
        out = {}
        for i, c in vec.items():
            for j, v in self._node.column(i, ctx).items():
                s = out.get(j)
                s = c * v if s is None else s + c * v
                if s:
                    out[j] = s
                else:
                    out.pop(j, None)
        return out

    def diag_weight(self, i: int, diag) -> object:
        """Action eigenvalue of basis vector i under a diagonal derivation."""
        return self._node.weight(i, diag)


def _build(expr, n):
    if isinstance(expr, Std):
        return _Leaf(n, dual=False)
    if isinstance(expr, Dual):
        return _Leaf(n, dual=True)
    if isinstance(expr, Sum):
        return _Sum([_build(p, n) for p in expr.parts])
    if isinstance(expr, Pow):
        return _Sum([_build(expr.inner, n) for _ in range(expr.k)])
    if isinstance(expr, Wedge):
        return _Wedge(expr.k, _build(expr.inner, n))
    if isinstance(expr, Tensor):
        return _Product([_build(expr.inner, n)] * expr.k, shared=True)
    if isinstance(expr, TProd):
        return _Product([_build(p, n) for p in expr.parts], shared=False)
    raise TypeError(f"not a carrier expression: {expr!r}")


class _Leaf:
    def __init__(self, n, dual):
        self.dim = n
        self.dual = dual

    def keys(self):
        return list(range(self.dim))

    def index(self, key):
        return key

    def column(self, i, ctx):
        if ctx.mode == "derivation":
            if not self.dual:
                return dict(ctx.cols[i])
            return {j: -v for j, v in ctx.rows[i].items()}
        if not self.dual:
            return dict(ctx.cols[i])
        return dict(ctx.inv_rows[i])

    def weight(self, i, diag):
        w = diag[i]
        return -w if self.dual else w


class _Sum:
    def __init__(self, parts):
        self.parts = parts
        self.offsets = []
        off = 0
        for p in parts:
            self.offsets.append(off)
            off += p.dim
        self.dim = off

    def keys(self):
        return list(range(self.dim))

    def index(self, key):
        return key

    def _locate(self, i):
        for t in range(len(self.parts) - 1, -1, -1):
            if i >= self.offsets[t]:
                return t, i - self.offsets[t]
        raise IndexError(i)

    def column(self, i, ctx):
        t, local = self._locate(i)
        off = self.offsets[t]
        return {off + j: v for j, v in self.parts[t].column(local, ctx).items()}

    def weight(self, i, diag):
        t, local = self._locate(i)
        return self.parts[t].weight(local, diag)


class _Wedge:
    def __init__(self, k, inner):
        self.k = k
        self.inner = inner
        self._keys = list(combinations(range(inner.dim), k))
        self._index = {key: i for i, key in enumerate(self._keys)}
        self.dim = len(self._keys)

    def keys(self):
        return list(self._keys)

    def index(self, key):
        return self._index[tuple(key)]

    def column(self, i, ctx):
        key = self._keys[i]
        out = {}
        if ctx.mode == "derivation":
            for slot in range(self.k):
                for j, v in self.inner.column(key[slot], ctx).items():
                    tup, sign = sort_with_sign(key[:slot] + (j,) + key[slot + 1 :])
                    if not sign:
                        continue
                    pos = self._index[tup]
                    term = v if sign > 0 else -v
                    s = out.get(pos)
                    s = term if s is None else s + term
                    if s:
                        out[pos] = s
                    else:
                        out.pop(pos, None)
            return out
        images = [self.inner.column(key[slot], ctx) for slot in range(self.k)]
        for combo in product(*(img.items() for img in images)):
            tup, sign = sort_with_sign(tuple(j for j, _ in combo))
            if not sign:
                continue
            val = ctx.one
            for _, v in combo:
                val = val * v
            pos = self._index[tup]
            term = val if sign > 0 else -val
            s = out.get(pos)
            s = term if s is None else s + term
            if s:
                out[pos] = s
            else:
                out.pop(pos, None)
        return out

    def weight(self, i, diag):
        key = self._keys[i]
        acc = None
        for t in key:
            w = self.inner.weight(t, diag)
            acc = w if acc is None else acc + w
        if acc is None:
            raise ValueError("degree-zero wedge has no weight")
        return acc


class _Product:
    def __init__(self, parts, shared):
        self.parts = parts
        self.shared = shared
        self.strides = []
        stride = 1
        for p in reversed(parts):
            self.strides.append(stride)
            stride *= p.dim
        self.strides.reverse()
        self.dim = stride if parts else 1

    def keys(self):
        return list(product(*(range(p.dim) for p in self.parts)))

    def index(self, key):
        return sum(k * s for k, s in zip(key, self.strides))

    def _decode(self, i):
        key = []
        for p, s in zip(self.parts, self.strides):
            key.append((i // s) % p.dim)
        return tuple(key)

    def column(self, i, ctx):
        key = self._decode(i)
        out = {}
        if ctx.mode == "derivation":
            for slot, part in enumerate(self.parts):
                base = i - key[slot] * self.strides[slot]
                for j, v in part.column(key[slot], ctx).items():
                    pos = base + j * self.strides[slot]
                    s = out.get(pos)
                    s = v if s is None else s + v
                    if s:
                        out[pos] = s
                    else:
                        out.pop(pos, None)
            return out
        images = [part.column(key[slot], ctx) for slot, part in enumerate(self.parts)]
        for combo in product(*(img.items() for img in images)):
            pos = sum(j * s for (j, _), s in zip(combo, self.strides))
            val = ctx.one
            for _, v in combo:
                val = val * v
            s = out.get(pos)
            s = val if s is None else s + val
            if s:
                out[pos] = s
            else:
                out.pop(pos, None)
        return out

    def weight(self, i, diag):
        key = self._decode(i)
        acc = None
        for slot, part in enumerate(self.parts):
            w = part.weight(key[slot], diag)
            acc = w if acc is None else acc + w
        if acc is None:
            raise ValueError("empty product has no weight")
        return acc
