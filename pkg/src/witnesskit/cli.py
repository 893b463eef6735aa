"""Command-line front end.

Subcommands ``analyze``, ``witness``, ``bell`` and ``catalog`` read states
from StateFile JSON (or ``catalog:name[:k=v,...]`` pseudo-paths) and write
JSON reports. Exit codes: 0 success, 2 parse/usage error, 3 invalid state,
4 method not applicable.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import math
import sys
from typing import Sequence

import numpy as np

from witnesskit import __version__
from witnesskit.bell import BellError, bell_optimize
from witnesskit.criteria import CRITERIA, ppt_check, run_criteria
from witnesskit.multiparty import certify_nondistillable, cut_report
from witnesskit.states import CATALOG, catalog, catalog_names
from witnesskit.tensor import (
    TAU_EIG,
    TAU_HERM,
    TAU_NORM,
    TAU_PSD,
    TAU_TR,
    Bipartition,
    DensityMatrix,
    LayoutError,
    PureState,
    StateError,
    as_density,
    default_cut,
)
from witnesskit.witness import (
    WitnessError,
    evaluate,
    indecomposable_witness,
    kernel_seed_witness,
    low_dim_optimal_witness,
    pauli_decompose,
    pure_state_witness,
    robustness_radius,
    sampled_product_minimum,
)

SCHEMA = 1
EXIT_OK, EXIT_PARSE, EXIT_STATE, EXIT_METHOD = 0, 2, 3, 4
TOLERANCES = {
    "tau_herm": TAU_HERM,
    "tau_tr": TAU_TR,
    "tau_psd": TAU_PSD,
    "tau_eig": TAU_EIG,
    "tau_norm": TAU_NORM,
}


class ParseError(ValueError):
    """Malformed input file, pseudo-path or parameter."""


class NotApplicable(ValueError):
    """The requested method does not apply to this input."""


# ---------------------------------------------------------------------------
# StateFile


def _complex_list(arr) -> list:
    arr = np.asarray(arr)
    if arr.ndim == 1:
        return [{"re": float(z.real), "im": float(z.imag)} for z in arr]
    return [_complex_list(row) for row in arr]


def _parse_complex(entry, where: str) -> complex:
    if isinstance(entry, dict):
        try:
            return complex(float(entry["re"]), float(entry.get("im", 0.0)))
        except (KeyError, TypeError, ValueError):
            raise ParseError(f"{where}: expected {{'re': float, 'im': float}}, got {entry!r}") from None
    if isinstance(entry, (int, float)) and not isinstance(entry, bool):
        return complex(float(entry), 0.0)
    raise ParseError(f"{where}: expected {{'re': float, 'im': float}}, got {entry!r}")


def state_to_document(state, name: str | None = None, parameters: dict | None = None) -> dict:
    """StateFile document for a DensityMatrix or PureState."""
    doc = {"schema": SCHEMA, "dims": list(state.dims)}
    if isinstance(state, PureState):
        doc["vector"] = _complex_list(state.vector)
    else:
        doc["matrix"] = _complex_list(state.matrix)
    if name is not None:
        doc["name"] = name
    if parameters:
        doc["parameters"] = {k: v for k, v in parameters.items()}
    return doc


def document_to_state(doc) -> DensityMatrix | PureState:
    """Parse a StateFile document; ``ParseError`` on shape problems, ``StateError`` on invariants."""
    if not isinstance(doc, dict):
        raise ParseError("StateFile must be a JSON object")
    if doc.get("schema", SCHEMA) != SCHEMA:
        raise ParseError(f"field 'schema': unsupported version {doc.get('schema')!r}")
    if "dims" not in doc:
        raise ParseError("missing field 'dims'")
    dims = doc["dims"]
    if not isinstance(dims, list) or not dims or not all(isinstance(d, int) and d >= 1 for d in dims):
        raise ParseError(f"field 'dims': expected a list of positive integers, got {dims!r}")
    total = int(np.prod(dims))
    has_m, has_v = "matrix" in doc, "vector" in doc
    if has_m == has_v:
        raise ParseError("exactly one of 'matrix' or 'vector' is required")
    try:
        if has_v:
            entries = doc["vector"]
            if not isinstance(entries, list) or len(entries) != total:
                raise ParseError(f"field 'vector': expected {total} entries")
            vec = np.array([_parse_complex(e, f"vector[{i}]") for i, e in enumerate(entries)])
            return PureState(vec, tuple(dims))
        rows = doc["matrix"]
        if not isinstance(rows, list) or len(rows) != total:
            raise ParseError(f"field 'matrix': expected {total} rows")
        m = np.empty((total, total), dtype=np.complex128)
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != total:
                raise ParseError(f"field 'matrix', row {i}: expected {total} entries")
            for j, e in enumerate(row):
                m[i, j] = _parse_complex(e, f"matrix[{i}][{j}]")
        return DensityMatrix(m, tuple(dims))
    except LayoutError as exc:
        raise ParseError(str(exc)) from None


def canonical_json(obj) -> str:
    """Sorted keys, compact separators, shortest round-trip floats."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def state_digest(state) -> str:
    """SHA-256 of the canonical numeric content (dims plus matrix or vector)."""
    doc = state_to_document(state)
    doc.pop("schema")
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


def _parse_value(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    raise ParseError(f"parameter value {text!r} is not a number")


def _catalog_state(name: str, params: dict):
    if name not in CATALOG:
        raise ParseError(f"unknown catalog state {name!r}; available: {', '.join(catalog_names())}")
    try:
        return catalog(name, **params)
    except StateError:
        raise
    except (ValueError, TypeError) as exc:
        raise ParseError(f"catalog {name}: {exc}") from None


def load_state(source: str):
    """Return ``(state, source_label)`` for a path, ``-`` or ``catalog:`` pseudo-path."""
    if source.startswith("catalog:"):
        parts = source.split(":", 2)
        params = {}
        if len(parts) == 3 and parts[2]:
            for item in parts[2].split(","):
                if "=" not in item:
                    raise ParseError(f"catalog parameter {item!r} must look like key=value")
                key, value = item.split("=", 1)
                params[key.strip()] = _parse_value(value.strip())
        return _catalog_state(parts[1], params).state, source
    try:
        if source == "-":
            text = sys.stdin.read()
        else:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {source}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return document_to_state(doc), source


# ---------------------------------------------------------------------------
# reports


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return _complex_list(obj)
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return v
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _report(command: str, state, source: str, args, results: dict) -> dict:
    return {
        "schema": SCHEMA,
        "tool": {"name": "witnesskit", "version": __version__},
        "command": command,
        "input": {"source": source, "digest": state_digest(state), "dims": list(state.dims)},
        "seed": args.seed,
        "restarts": getattr(args, "restarts", None),
        "tolerances": TOLERANCES,
        "results": _jsonable(results),
    }


def report_body(report: dict) -> dict:
    """Report without its timestamp: identical across reruns with the same inputs."""
    return {k: v for k, v in report.items() if k != "timestamp"}


def _emit(report: dict, args) -> None:
    if not getattr(args, "no_timestamp", False):
        report = {**report, "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat()}
    text = json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_cut(label: str | None, n_parties: int) -> Bipartition | None:
    if label is None:
        return None
    try:
        return Bipartition.from_label(label, n_parties)
    except (LayoutError, ValueError) as exc:
        raise ParseError(f"--cut: {exc}") from None


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(args) -> int:
    state, source = load_state(args.input)
    rho = as_density(state)
    names = list(CRITERIA) if args.criteria is None else [c.strip() for c in args.criteria.split(",") if c.strip()]
    unknown = [n for n in names if n not in CRITERIA]
    if unknown:
        raise ParseError(f"--criteria: unknown {unknown}; choose from {','.join(CRITERIA)}")
    cut = _parse_cut(args.cut, rho.n_parties)
    results: dict = {}
    if rho.n_parties < 2:
        raise NotApplicable("analysis needs at least two parties")
    if cut is not None or rho.n_parties == 2:
        cut = cut or default_cut(rho.n_parties)
        results["verdicts"] = {cut.label(): [v.to_dict() for v in run_criteria(rho, cut, names)]}
    else:
        report = cut_report(rho, names)
        results["cut_report"] = report.to_dict()
        cert = certify_nondistillable(rho, report, restarts=args.restarts, seed=args.seed)
        results["nondistillability"] = cert.to_dict()
    _emit(_report("analyze", rho, source, args, results), args)
    return EXIT_OK


def cmd_witness(args) -> int:
    state, source = load_state(args.input)
    rho = as_density(state)
    cut = _parse_cut(args.cut, rho.n_parties)
    try:
        if args.method == "pure":
            if not isinstance(state, PureState):
                raise NotApplicable("method 'pure' needs a state vector input")
            w, mu = pure_state_witness(state, cut)
        elif args.method == "lowdim":
            w, mu = low_dim_optimal_witness(rho, cut)
        else:
            cuts = [cut or default_cut(rho.n_parties)] if (cut or rho.n_parties == 2) else None
            check = cuts or [Bipartition(frozenset(c), rho.n_parties) for c in _all_sides(rho.n_parties)]
            npt = [c.label() for c in check if ppt_check(rho, c).entangled]
            if npt:
                raise NotApplicable(
                    f"state is NPT across {', '.join(npt)}; use --method lowdim or pure"
                )
            seed_cut = cuts[0] if cuts else None
            w = indecomposable_witness(
                rho, kernel_seed_witness(rho, seed_cut), restarts=args.restarts, seed=args.seed
            )
            mu = None
    except WitnessError as exc:
        raise NotApplicable(str(exc)) from None
    value = evaluate(w, rho)
    results = {
        "method": args.method,
        "witness": {
            "kind": w.kind,
            "cut": w.cut.label() if w.cut else None,
            "matrix": w.observable,
            "provenance": w.provenance,
            "trace": float(np.trace(w.observable).real),
        },
        "value": value,
        "mu_min": mu,
        "detected": bool(value < -TAU_PSD),
        "robustness_radius": robustness_radius(w, rho) if value < 0 else None,
        "sampled_product_minimum": sampled_product_minimum(w.observable, w.dims, 1000, seed=args.seed),
    }
    if all(d == 2 for d in w.dims):
        plan = pauli_decompose(w)
        results["measurement_plan"] = {"terms": plan.to_json(), "settings_count": plan.settings_count}
    _emit(_report("witness", rho, source, args, results), args)
    return EXIT_OK


def _all_sides(k: int):
    for mask in range(1, 2**k - 1, 2):
        yield {i for i in range(k) if mask >> i & 1}


def cmd_bell(args) -> int:
    state, source = load_state(args.input)
    rho = as_density(state)
    if args.n_party is not None and args.n_party != rho.n_parties:
        raise NotApplicable(f"--n-party {args.n_party} does not match the {rho.n_parties}-party input")
    try:
        result = bell_optimize(rho, restarts=args.restarts, seed=args.seed)
    except BellError as exc:
        raise NotApplicable(str(exc)) from None
    _emit(_report("bell", rho, source, args, {"bell": result.record()}), args)
    return EXIT_OK


def cmd_catalog(args) -> int:
    params = {
        key: value
        for key, value in (
            ("n", args.n), ("lambda", args.lam), ("p", args.p),
            ("d", args.d), ("theta", args.theta), ("sign", args.sign),
        )
        if value is not None
    }
    named = _catalog_state(args.name, params)
    doc = state_to_document(named.state, named.name, named.parameters)
    text = json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="witnesskit", description="Entanglement detection toolkit")
    parser.add_argument("--version", action="version", version=f"witnesskit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, restarts):
        p.add_argument("input", help="StateFile path, '-' for stdin, or catalog:name[:k=v,...]")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--restarts", type=int, default=restarts)
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--no-timestamp", action="store_true", help="omit the timestamp field")

    p = sub.add_parser("analyze", help="run separability criteria")
    common(p, 200)
    p.add_argument("--cut", help="bipartition such as 'A|BC' (default: all cuts for 3+ parties)")
    p.add_argument("--criteria", help="comma-separated subset of " + ",".join(CRITERIA))
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("witness", help="construct an entanglement witness")
    common(p, 50)
    p.add_argument("--cut")
    p.add_argument("--method", choices=["pure", "lowdim", "indecomposable"], default="pure")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("bell", help="optimize Bell-Klyshko directions")
    common(p, 20)
    p.add_argument("--n-party", type=int, dest="n_party")
    p.set_defaults(func=cmd_bell)

    p = sub.add_parser("catalog", help="emit a named state as a StateFile")
    p.add_argument("name")
    p.add_argument("--n", type=int)
    p.add_argument("--lambda", type=float, dest="lam")
    p.add_argument("--p", type=float)
    p.add_argument("--d", type=int)
    p.add_argument("--theta", type=float)
    p.add_argument("--sign", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"witnesskit: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except StateError as exc:
        print(f"witnesskit: invalid state: {exc}", file=sys.stderr)
        return EXIT_STATE
    except NotApplicable as exc:
        print(f"witnesskit: not applicable: {exc}", file=sys.stderr)
        return EXIT_METHOD


if __name__ == "__main__":
    sys.exit(main())
