"""Command-line front end.

JSON reports go to standard output (schema version "1", deterministic
field order, no timestamps); human progress lines go to standard error.
Exit code 0 when every check passes, 1 when some check fails, 2 on usage
or input errors.  ``--out FILE`` duplicates the report to a file.  The
environment variable HODGELAB_THREADS caps the worker count; evaluation
is sequential, so the cap is honored with a single worker.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from .carriers import (
    CarrierParseError,
    CarrierTooLargeError,
    Sum,
    Wedge,
    carrier_dim,
    normalize_expr,
    parse_carrier,
)
from .clifford import (
    CliffordAlgebra,
    clifford_build,
    clifford_mul,
    center,
    element_to_json,
    ks_embed,
    omega_squared,
)
from .descent import DescentError, EStructure, trace_descend
from .field import FieldSpec, coeff_to_json, squarefree_part
from .identities import (
    IdentityError,
    SpecializationInput,
    binom_unity,
    det_quotient_identity,
    specialize_report,
    verify_sum_identity,
)
from .invariants import (
    CarrierVector,
    InvariantError,
    build_rep,
    complete_contractions,
    determinant_realizations,
    galois_stable_subgroups,
    generator_coverage,
    invariant_basis,
    pair_contraction_classes,
)
from .matrix import DegenerateFormError, ExactMatrix, matrix_from_json, matrix_to_json, signature
from .qspace import QuadraticSpace, k3_16_lattice, weil_cm_field

SCHEMA_VERSION = "1"
DEFAULT_MAX_CARRIER_DIM = 3000


class UsageError(Exception):
    pass


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _worker_cap() -> int:
    raw = os.environ.get("HODGELAB_THREADS", "")
    try:
        cap = int(raw) if raw else 1
    except ValueError:
        cap = 1
    return max(cap, 1)


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _check(name: str, ok: bool, detail) -> dict:
    return {"name": name, "status": "pass" if ok else "fail", "detail": detail}


def _report(command: str, inputs: dict, results: dict, checks: list) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "results": results,
        "checks": checks,
    }


# -- group specifications ---------------------------------------------------


def _parse_group(spec: str):
    if ":" not in spec:
        raise UsageError(f"group spec {spec!r} needs the form kind:arg")
    kind, arg = spec.split(":", 1)
    kind = kind.strip()
    if kind in ("gl", "sl", "sp"):
        try:
            return kind, int(arg)
        except ValueError as exc:
            raise UsageError(f"group {kind} needs an integer argument") from exc
    if kind == "so":
        payload = _load_json(arg)
        return kind, matrix_from_json(payload["gram"])
    if kind in ("su", "res-so", "u"):
        payload = _load_json(arg)
        s = EStructure(FieldSpec(payload["d"]), matrix_from_json(payload["J"]))
        form_key = "H" if kind == "su" else "psi"
        if form_key not in payload:
            raise UsageError(f"group {kind} file needs a {form_key!r} matrix")
        return kind, (s, matrix_from_json(payload[form_key]))
    raise UsageError(f"unknown group kind {kind!r}")


def _copies_of_std_dual(expr) -> int | None:
    """k when expr is the k-fold direct sum of std+dual, else None."""
    from .carriers import Dual, Std

    expr = normalize_expr(expr)
    unit = Sum((Std(), Dual()))
    if expr == unit:
        return 1
    if isinstance(expr, Sum) and all(p == unit for p in expr.parts):
        return len(expr.parts)
    return None


# -- subcommands ------------------------------------------------------------


def _cmd_invariants(args) -> dict:
    kind, data = _parse_group(args.group)
    try:
        expr = parse_carrier(args.carrier)
    except CarrierParseError as exc:
        raise UsageError(f"carrier: {exc}") from exc
    rep = build_rep(kind, data, expr)
    dim = carrier_dim(expr, rep.base_dim)
    if dim > args.max_carrier_dim:
        raise UsageError(
            f"carrier dimension {dim} exceeds the cap {args.max_carrier_dim}"
        )
    if args.with_reflection is not None:
        from .invariants import reflection_matrix

        if rep.pairing is None:
            raise UsageError("--with-reflection needs a form-defined group")
        axis = args.with_reflection
        vec = [Fraction(1) if i == axis else Fraction(0) for i in range(rep.base_dim)]
        rep = type(rep)(
            rep.base_dim,
            rep.basis_matrices,
            rep.carrier,
            rep.extra_group_elements + (reflection_matrix(rep.pairing, vec),),
            rep.estructure,
            rep.pairing,
        )
    inputs = {"group": args.group, "carrier": str(expr)}
    basis = invariant_basis(rep, max_dim=args.max_carrier_dim)
    results = {
        "carrier_dim": dim,
        "invariant_dim": len(basis),
        "lie_dim": len(rep.basis_matrices),
    }
    checks = []
    if args.generators == "auto":
        gens = _auto_generators(rep)
        cov = generator_coverage(rep, gens)
        results["span_dim"] = cov.span_dim
        results["product_count"] = cov.product_count
        checks.append(
            _check(
                "generator-coverage",
                cov.equal,
                f"invariant_dim={cov.invariant_dim} span_dim={cov.span_dim}",
            )
        )
    return _report("invariants", inputs, results, checks)


def _auto_generators(rep):
    expr = normalize_expr(rep.carrier)
    if isinstance(expr, Wedge):
        copies = _copies_of_std_dual(expr.inner)
        if copies is None:
            raise UsageError("auto generators need a wedge over copies of sum(std,dual)")
        gens = list(pair_contraction_classes(rep.base_dim, copies))
        gens += determinant_realizations(rep.base_dim, copies, dual=False)
        gens += determinant_realizations(rep.base_dim, copies, dual=True)
        return gens
    from .carriers import flatten_slots

    slots = flatten_slots(expr)
    if slots is None:
        raise UsageError("auto generators need a wedge or flat tensor carrier")
    s = sum(1 for t in slots if type(t).__name__ == "Std")
    if 2 * s != len(slots):
        raise UsageError("auto generators need a balanced tensor carrier")
    return complete_contractions(s, rep.base_dim)


def _cmd_verify(args) -> dict:
    what = args.what
    if what == "binom":
        n = args.n
        if n is None:
            raise UsageError("verify binom needs --n")
        i0s = [args.i0] if args.i0 is not None else list(range(1, 2 * n))
        checks = []
        values = {}
        for i0 in i0s:
            val = binom_unity(n, i0)
            values[str(i0)] = str(val)
            checks.append(_check(f"binom-n{n}-i{i0}", val == 1, str(val)))
        return _report(
            "verify-binom", {"n": n}, {"values": values}, checks
        )
    if what == "sum-identity":
        if args.dim is None or args.m is None:
            raise UsageError("verify sum-identity needs --dim and --m")
        rep = verify_sum_identity(args.dim, args.m)
        return _report(
            "verify-sum-identity",
            rep.params,
            {"report": rep.to_json()},
            [_check("sum-identity", rep.passed, rep.status)],
        )
    if what in ("det-quotient", "specialize"):
        if args.input is None:
            raise UsageError(f"verify {what} needs --input FILE")
        payload = _load_json(args.input)
        try:
            space = QuadraticSpace(matrix_from_json(payload["gram"]))
            inp = SpecializationInput(
                space,
                [_vector_from_json(v) for v in payload["sub_basis"]],
                [_vector_from_json(v) for v in payload["complement_basis"]],
            )
        except (KeyError, IdentityError, DegenerateFormError, ValueError) as exc:
            raise UsageError(f"bad specialization input: {exc}") from exc
        if what == "det-quotient":
            rep = det_quotient_identity(inp)
        else:
            x_list = payload.get("x_list")
            x_vectors = (
                [_vector_from_json(v) for v in x_list]
                if x_list is not None
                else list(inp.complement_basis)
            )
            rep = specialize_report(inp, x_vectors)
        return _report(
            f"verify-{what}",
            rep.params,
            {"report": rep.to_json()},
            [_check(what, rep.passed, rep.status)],
        )
    raise UsageError(f"unknown verification {what!r}")


def _vector_from_json(values):
    return [Fraction(v) for v in values]


def _cmd_clifford(args) -> dict:
    payload = _load_json(args.space)
    space = QuadraticSpace.from_json(payload)
    alg, basis_change = clifford_build(space)
    inputs = {"space": args.space}
    results = {
        "n": alg.n,
        "qvals": [str(q) for q in alg.qvals],
        "dim": alg.dim,
        "even_dim": alg.even_dim,
        "basis_change": matrix_to_json(basis_change),
    }
    checks = [
        _check("dim-full", alg.dim == 2 ** alg.n, f"{alg.dim}"),
        _check("dim-even", alg.even_dim == 2 ** (alg.n - 1), f"{alg.even_dim}"),
    ]
    if args.omega2:
        om2 = omega_squared(alg)
        results["omega_squared"] = str(om2)
        results["omega_squared_squarefree"] = squarefree_part(
            om2.numerator * om2.denominator
        )
    if args.center:
        elems = center(alg, even_only=args.even_only)
        results["center_dim"] = len(elems)
        results["center"] = [element_to_json(x, alg) for x in elems]
        ok = all(
            clifford_mul(x, alg.generator(i), alg)
            == clifford_mul(alg.generator(i), x, alg)
            for x in elems
            for i in range(alg.n)
        )
        checks.append(_check("center-commutes", ok, f"dim {len(elems)}"))
    if args.ks_embed:
        if args.v is None or args.v0 is None:
            raise UsageError("--ks-embed needs --v and --v0 (diagonal-basis coordinates)")
        v = [Fraction(x) for x in args.v.split(",")]
        v0 = [Fraction(x) for x in args.v0.split(",")]
        M = ks_embed(v, v0, alg)
        results["ks_embed"] = matrix_to_json(M)
        nonzero_in = any(v)
        nonzero_out = any(any(row) for row in M.data)
        checks.append(
            _check("ks-embed-faithful", nonzero_out or not nonzero_in, "")
        )
    return _report("clifford", inputs, results, checks)


def _cmd_descend(args) -> dict:
    spayload = _load_json(args.structure)
    s = EStructure(FieldSpec(spayload["d"]), matrix_from_json(spayload["J"]))
    psi = matrix_from_json(_load_json(args.psi))
    inputs = {"structure": args.structure, "psi": args.psi, "hermitian": args.hermitian}
    try:
        form = trace_descend(psi, s, hermitian=args.hermitian)
    except DescentError as exc:
        return _report(
            "descend",
            inputs,
            {},
            [_check("descent", False, str(exc))],
        )
    A, B = form.q_components
    n = s.space_dim
    trace_ok = all(
        2 * A.data[i][j].rational_value() == psi.data[i][j].rational_value()
        for i in range(n)
        for j in range(n)
    )
    results = {
        "gram": [[coeff_to_json(x) for x in row] for row in form.gram],
        "rational_part": matrix_to_json(A),
        "sqrt_part": matrix_to_json(B),
        "e_basis": [[str(c.rational_value()) for c in v] for v in form.e_basis],
    }
    checks = [
        _check("trace-identity", trace_ok, ""),
        _check("unique-solution", True, "homogeneous kernel is zero"),
        _check(
            "hermitian-symmetry" if args.hermitian else "bilinear-symmetry", True, ""
        ),
    ]
    return _report("descend", inputs, results, checks)


SCENARIOS = {
    "paranjape": {"a": -2, "b": -2, "expected_d": -1},
    "ingalls": {"a": -6, "b": -2, "expected_d": -3},
}


def _cmd_scenario(args) -> dict:
    data = SCENARIOS[args.name]
    a, b = data["a"], data["b"]
    space = k3_16_lattice(a, b)
    cm = weil_cm_field(a, b)
    alg, _ = clifford_build(space)
    block = CliffordAlgebra((a, b))
    om2_block = omega_squared(block)
    om2_full = omega_squared(alg)
    sig = signature(space.gram)
    det = space.gram.det().rational_value()
    results = {
        "lattice": space.to_json(),
        "det": str(det),
        "signature": list(sig),
        "cm_field_d": cm.d,
        "clifford_dim": alg.dim,
        "clifford_even_dim": alg.even_dim,
        "omega_squared_block": str(om2_block),
        "omega_squared_full": str(om2_full),
    }
    checks = [
        _check("cm-field", cm.d == data["expected_d"], f"d={cm.d}"),
        _check("signature", sig == (2, 4), f"{sig}"),
        _check(
            "volume-block-consistent",
            squarefree_part(om2_block.numerator * om2_block.denominator) == cm.d,
            str(om2_block),
        ),
        _check(
            "volume-full-consistent",
            squarefree_part(om2_full.numerator * om2_full.denominator) == cm.d,
            str(om2_full),
        ),
    ]
    return _report("scenario", {"name": args.name, "a": a, "b": b}, results, checks)


def _cmd_galois(args) -> dict:
    perms = []
    for chunk in args.perms.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        images = [int(x) for x in chunk.split(",")]
        perms.append(tuple(i - 1 for i in images))
    subs = galois_stable_subgroups(args.m, perms)
    results = {
        "m": args.m,
        "count": len(subs),
        "subgroups": [[list(vec) for vec in basis] for basis in subs],
    }
    checks = [_check("stable-enumeration", True, f"count {len(subs)}")]
    return _report(
        "galois", {"m": args.m, "perms": args.perms}, results, checks
    )


# -- driver ------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hodgelab",
        description="exact multilinear invariant workbench",
    )
    parser.add_argument("--out", help="duplicate the JSON report to a file")
    parser.add_argument(
        "--max-carrier-dim",
        type=int,
        default=DEFAULT_MAX_CARRIER_DIM,
        help="cap on carrier dimensions (default 3000)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", help="invariant dimensions and coverage")
    p.add_argument("--group", required=True)
    p.add_argument("--carrier", required=True)
    p.add_argument("--generators", choices=["auto"], default=None)
    p.add_argument("--with-reflection", type=int, default=None, metavar="AXIS")
    p.set_defaults(func=_cmd_invariants)

    p = sub.add_parser("verify", help="identity suites")
    p.add_argument("what", choices=["binom", "sum-identity", "det-quotient", "specialize"])
    p.add_argument("--n", type=int)
    p.add_argument("--i0", type=int)
    p.add_argument("--dim", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--input")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("clifford", help="Clifford algebra of a quadratic space")
    p.add_argument("--space", required=True)
    p.add_argument("--omega2", action="store_true")
    p.add_argument("--center", action="store_true")
    p.add_argument("--even-only", action="store_true")
    p.add_argument("--ks-embed", action="store_true")
    p.add_argument("--v")
    p.add_argument("--v0")
    p.set_defaults(func=_cmd_clifford)

    p = sub.add_parser("descend", help="trace descent of a rational form")
    p.add_argument("--structure", required=True)
    p.add_argument("--psi", required=True)
    p.add_argument("--hermitian", action="store_true")
    p.set_defaults(func=_cmd_descend)

    p = sub.add_parser("scenario", help="preset lattice scenarios")
    p.add_argument("name", choices=sorted(SCENARIOS))
    p.set_defaults(func=_cmd_scenario)

    p = sub.add_parser("galois", help="permutation-stable F2 subspaces")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--perms", default="", help="semicolon-separated 1-based images, e.g. '2,1'")
    p.set_defaults(func=_cmd_galois)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    _log(f"hodgelab: workers 1 (cap {_worker_cap()})")
    started = time.monotonic()
    try:
        report = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CarrierParseError, CarrierTooLargeError, InvariantError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _log(f"hodgelab: finished in {time.monotonic() - started:.3f}s")
    text = json.dumps(report, indent=2)
    print(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    failed = [c for c in report["checks"] if c["status"] != "pass"]
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
