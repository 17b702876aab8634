"""Command-line front end: JSON in, JSON out.

Complex numbers travel as [re, im] pairs, matrices as row-major lists of
pairs, parameter sets as {"interior": [...], "terminal": [re, im]} and
eigenvalue multisets as [{"value": [re, im], "multiplicity": k}, ...].

Exit codes: 0 success, 2 bad input, 3 numeric failure (including a failed
verification), 4 no solution, 5 unsupported case.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import warnings
from importlib import resources

import jsonschema
import numpy as np

from .cmv import (
    TruncatedCmv,
    assemble_cmv,
    defect_data,
    lm_factors,
    params_from_truncated,
    truncate,
)
from .errors import (
    ArgumentError,
    CapabilityError,
    CMVError,
    ConsistencyError,
    NoSolution,
    NumericError,
    StructureError,
)
from .inverse import (
    FamilyDescriptor,
    MixedFirstData,
    MixedLastData,
    blaschke_condition,
    mixed_first,
    mixed_last,
    reconstruct_from_spectrum,
)
from .numkernel import Tolerances
from .opuc import measure_from_blaschke, verblunsky_from_measure
from .schurfun import BlaschkeProduct, SchurParams, blaschke_from_schur_params, schur_params_of_blaschke
from .spectra import charfun_schur, nagy_foias_charfun, sample_points, spectrum

EXIT_OK, EXIT_SCHEMA, EXIT_NUMERIC, EXIT_NOSOLUTION, EXIT_CAPABILITY = 0, 2, 3, 4, 5

COMMANDS = (
    "schur-params", "synth", "build-cmv", "truncate", "recover-params", "spectrum", "charfun",
    "measure", "invert-spectrum", "mixed-first", "mixed-last", "verify", "blaschke-sum",
)


class SchemaError(Exception):
    pass


# ---------------------------------------------------------------- wire format


def load_schema() -> dict:
    text = resources.files("cmvkit").joinpath("schemas/v1.json").read_text(encoding="utf-8")
    return json.loads(text)


def validate_payload(command: str, payload) -> None:
    schema = load_schema()
    sub = {"$defs": schema["$defs"], **schema["commands"][command]}
    try:
        jsonschema.validate(payload, sub)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise SchemaError(f"{path or '<root>'}: {exc.message}") from None


def dec_complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    return complex(v[0], v[1])


def enc_complex(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def dec_list(vs) -> np.ndarray:
    return np.array([dec_complex(v) for v in vs], dtype=complex)


def enc_list(vs) -> list:
    return [enc_complex(v) for v in np.ravel(vs)]


def dec_matrix(rows) -> np.ndarray:
    m = np.array([[dec_complex(v) for v in row] for row in rows], dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise SchemaError("matrix must be square")
    return m


def enc_matrix(m) -> list:
    return [[enc_complex(v) for v in row] for row in np.asarray(m)]


def dec_params(obj, tol: Tolerances) -> SchurParams:
    return SchurParams(dec_list(obj["interior"]), dec_complex(obj["terminal"]), tol)


def enc_params(p: SchurParams) -> dict:
    return {"interior": enc_list(p.interior), "terminal": None if p.terminal is None else enc_complex(p.terminal)}


def dec_eigen(items) -> list[complex]:
    out = []
    for it in items:
        if isinstance(it, dict):
            out.extend([dec_complex(it["value"])] * int(it.get("multiplicity", 1)))
        else:
            out.append(dec_complex(it))
    return out


def enc_eigen(clustered) -> list:
    return [{"value": enc_complex(v), "multiplicity": int(m)} for v, m in clustered]


def enc_blaschke(b: BlaschkeProduct) -> dict:
    return {"phase": float(b.phase), "zeros": enc_list(b.zeros)}


class Verification:
    """Named residuals with limits; passes only if every residual is within its limit."""

    def __init__(self):
        self.items: dict = {}

    def add(self, name: str, value: float, limit: float):
        value = float(value)
        self.items[name] = {"value": value, "limit": float(limit), "pass": bool(value <= limit)}

    def flag(self, name: str, ok: bool, detail: str = ""):
        self.items[name] = {"pass": bool(ok), "detail": detail}

    @property
    def passed(self) -> bool:
        return all(v["pass"] for v in self.items.values())

    def as_dict(self) -> dict:
        return {"checks": self.items, "pass": self.passed}


# ---------------------------------------------------------------- commands


def _matrix_checks(ver: Verification, t: TruncatedCmv, tol: Tolerances):
    n = t.n
    ver.add("contraction", max(0.0, np.linalg.norm(t.dense, 2) - 1.0), tol.eps_structural * (n + 1) * 10)
    sp = spectrum(t, tol)
    ver.flag("spectrum_in_disk", sp.all_in_disk)
    if n >= 2:
        rec = params_from_truncated(t.dense, tol)
        ver.add("reassembly", float(np.max(np.abs(truncate(assemble_cmv(rec)).dense - t.dense))), tol.eps_roots)
    return sp


def cmd_schur_params(payload, args, tol):
    b = BlaschkeProduct(float(payload.get("phase", 0.0)), dec_list(payload["zeros"]), tol)
    p = schur_params_of_blaschke(b, cross_check=False)
    ver = Verification()
    if b.order:
        from .opuc import khrushchev_params

        ver.add("khrushchev_gap", p.max_gap(khrushchev_params(b.monic_poly()).rotated(b.phase)), tol.eps_roots)
    return {"params": enc_params(p)}, ver


def cmd_synth(payload, args, tol):
    p = dec_params(payload["params"], tol)
    b = blaschke_from_schur_params(p)
    ver = Verification()
    ver.add("params_roundtrip", p.max_gap(schur_params_of_blaschke(b, cross_check=False)), tol.eps_roots)
    return {"blaschke": enc_blaschke(b)}, ver


def cmd_build_cmv(payload, args, tol):
    p = dec_params(payload["params"], tol)
    c = assemble_cmv(p)
    L, M = lm_factors(p)
    ver = Verification()
    ver.add("unitarity", c.unitarity_residual(), tol.eps_structural * c.n)
    ver.add("lm_residual", np.linalg.norm(L @ M - c.dense, "fro"), tol.eps_structural * c.n)
    return {"matrix": enc_matrix(c.dense), "params": enc_params(p)}, ver


def cmd_truncate(payload, args, tol):
    p = dec_params(payload["params"], tol)
    t = truncate(assemble_cmv(p))
    ver = Verification()
    dd = defect_data(t)
    for k, v in dd.residuals.items():
        ver.add(f"defect_{k}", v, tol.eps_roots)
    return {
        "matrix": enc_matrix(t.dense),
        "colligation": {"S": enc_complex(t.S), "G": enc_list(t.G), "F": enc_list(t.F)},
        "params": enc_params(p),
    }, ver


def cmd_recover_params(payload, args, tol):
    m = dec_matrix(payload["matrix"])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        p = params_from_truncated(m, tol)
    ver = Verification()
    if m.shape[0] >= 2:
        ver.add("reassembly", float(np.max(np.abs(truncate(assemble_cmv(p)).dense - m))), tol.eps_roots)
    out = {"params": enc_params(p)}
    if caught:
        out["warnings"] = [str(w.message) for w in caught]
    return out, ver


def cmd_spectrum(payload, args, tol):
    m = dec_matrix(payload["matrix"])
    sp = spectrum(m, tol)
    ver = Verification()
    ver.add("eig_residual", float(np.max(sp.residuals)), tol.eps_roots)
    ver.flag("multiplicity_total", sp.multiplicity_total == m.shape[0])
    return {"eigen": enc_eigen(sp.clustered), "all_in_disk": sp.all_in_disk}, ver


def _parse_points(tokens) -> np.ndarray:
    pts = []
    for tok in tokens:
        for part in str(tok).split(","):
            if part.strip():
                pts.append(complex(part.strip().replace(" ", "")))
    return np.array(pts, dtype=complex)


def cmd_charfun(payload, args, tol):
    if "params" in payload:
        t = truncate(assemble_cmv(dec_params(payload["params"], tol)))
    else:
        m = dec_matrix(payload["matrix"])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            p = params_from_truncated(m, tol)
        t = truncate(assemble_cmv(p))
    if args.grid:
        r = np.linspace(0.0, 0.95, args.grid + 1)[1:]
        th = 2 * np.pi * np.arange(args.grid) / args.grid
        pts = (r[:, None] * np.exp(1j * th[None, :])).ravel()
    elif args.at:
        pts = _parse_points(args.at)
    else:
        pts = sample_points(16)
    vals = np.atleast_1d(charfun_schur(t, pts))
    ver = Verification()
    ver.add("max_modulus_excess", max(0.0, float(np.max(np.abs(vals))) - 1.0), tol.eps_roots)
    nz = pts[pts != 0]
    if nz.size:
        ver.add("defect_route_gap", float(np.max(np.abs(np.atleast_1d(nagy_foias_charfun(t, nz)) - np.atleast_1d(charfun_schur(t, nz))))), tol.eps_roots)
    return {"points": enc_list(pts), "values": enc_list(vals)}, ver


def cmd_measure(payload, args, tol):
    b = BlaschkeProduct(float(payload.get("phase", 0.0)), dec_list(payload["zeros"]), tol)
    mu = measure_from_blaschke(b)
    ver = Verification()
    ver.add("weight_sum", abs(mu.weights.sum() - 1.0), tol.eps_deflate)
    ver.flag("weights_positive", bool(np.all(mu.weights > 0)))
    if b.order:
        p = schur_params_of_blaschke(b, cross_check=False)
        ver.add("geronimus_gap", float(np.max(np.abs(verblunsky_from_measure(mu) - p.interior))), tol.eps_roots)
    return {"support": enc_list(mu.support), "weights": [float(w) for w in mu.weights]}, ver


def cmd_invert_spectrum(payload, args, tol):
    zs = dec_eigen(payload["eigen"])
    phase = args.phase if args.phase is not None else float(payload.get("phase", 0.0))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        t = reconstruct_from_spectrum(zs, phase, tol)
    ver = Verification()
    ver.add("charpoly_gap", t.info["verification"]["charpoly_gap"], tol.eps_roots * max(1.0, len(zs)))
    _matrix_checks(ver, t, tol)
    out = {"matrix": enc_matrix(t.dense), "params": enc_params(t.params), "phase": float(phase)}
    if t.info.get("warnings"):
        out["warnings"] = t.info["warnings"]
    return out, ver


def cmd_mixed_first(payload, args, tol):
    d = MixedFirstData(dec_eigen(payload["eigen"]), dec_list(payload["first_params"]), int(payload["n"]), tol)
    res = mixed_first(d, method=payload.get("method", "auto"))
    ver = Verification()
    if isinstance(res, FamilyDescriptor):
        ver.flag("family", True, "data determine a family of solutions")
        return {
            "family": {
                "fixed_params": enc_list(res.fixed_params),
                "free_interior": list(res.free_interior),
                "free_terminal": res.free_terminal,
                "zero_multiplicity": res.zero_multiplicity,
            }
        }, ver
    v = res.info["verification"]
    ver.add("node_residual", v["node_residual"], tol.eps_roots * 10)
    if "param_gap" in v:
        ver.add("param_gap", v["param_gap"], tol.eps_roots)
    _matrix_checks(ver, res, tol)
    return {"matrix": enc_matrix(res.dense), "params": enc_params(res.params)}, ver


def cmd_mixed_last(payload, args, tol):
    eig = dec_eigen(payload["eigen"])
    last = dec_list(payload["last_params"])
    n = int(payload.get("n", len(eig) + last.size))
    d = MixedLastData(np.array(eig, dtype=complex), last, dec_complex(payload["terminal"]), n, tol)
    t = mixed_last(d, seed=args.seed)
    v = t.info["verification"]
    ver = Verification()
    ver.add("node_residual", v["node_residual"], tol.eps_roots * 10)
    ver.add("param_gap", v["param_gap"], tol.eps_roots)
    _matrix_checks(ver, t, tol)
    return {"matrix": enc_matrix(t.dense), "params": enc_params(t.params)}, ver


def cmd_verify(payload, args, tol):
    m = dec_matrix(payload["matrix"])
    ver = Verification()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            p = params_from_truncated(m, tol)
        except StructureError as exc:
            ver.flag("truncated_cmv_structure", False, str(exc))
            return {"params": None}, ver
    t = truncate(assemble_cmv(p))
    ver.add("reassembly", float(np.max(np.abs(t.dense - m))), tol.eps_roots)
    _matrix_checks(ver, t, tol)
    try:
        dd = defect_data(t)
        for k, v in dd.residuals.items():
            ver.add(f"defect_{k}", v, tol.eps_roots)
    except StructureError as exc:
        ver.flag("rank_one_defects", False, str(exc))
    pts = sample_points(8)
    ver.add("charfun_dual_route", float(np.max(np.abs(nagy_foias_charfun(t, pts) - charfun_schur(t, pts)))), tol.eps_roots)
    ver.add("charfun_vs_synthesis", float(np.max(np.abs(blaschke_from_schur_params(p)(pts) - charfun_schur(t, pts)))), tol.eps_roots)
    return {"params": enc_params(p)}, ver


def cmd_blaschke_sum(payload, args, tol):
    rep = blaschke_condition(dec_eigen(payload["eigen"]))
    ver = Verification()
    ver.flag("partial_sums_monotone", rep.monotone)
    return {"partial_sum": rep.partial_sum, "partial_sums": [float(s) for s in rep.partial_sums], "note": rep.note}, ver


HANDLERS = {
    "schur-params": cmd_schur_params,
    "synth": cmd_synth,
    "build-cmv": cmd_build_cmv,
    "truncate": cmd_truncate,
    "recover-params": cmd_recover_params,
    "spectrum": cmd_spectrum,
    "charfun": cmd_charfun,
    "measure": cmd_measure,
    "invert-spectrum": cmd_invert_spectrum,
    "mixed-first": cmd_mixed_first,
    "mixed-last": cmd_mixed_last,
    "verify": cmd_verify,
    "blaschke-sum": cmd_blaschke_sum,
}


# ---------------------------------------------------------------- driver


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cmvkit", description="CMV matrices, Schur functions and inverse spectral solvers.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", default="-", help="JSON input file, or - for stdin")
    common.add_argument("--output", default="-", help="JSON output file, or - for stdout")
    common.add_argument("--tol-structural", type=float, default=None)
    common.add_argument("--tol-roots", type=float, default=None)
    common.add_argument("--seed", type=int, default=0, help="seed for the Newton multi-start")
    common.add_argument("--phase", type=float, default=None, help="phase in radians")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "charfun":
            p.add_argument("--at", nargs="+", help="points such as 0.3 0.1+0.2j (comma separated also accepted)")
            p.add_argument("--grid", type=int, default=0, help="emit values on a polar grid with this many radii and angles")
    return ap


def _tolerances(args) -> Tolerances:
    base = Tolerances()
    es = args.tol_structural if args.tol_structural is not None else base.eps_structural
    er = args.tol_roots if args.tol_roots is not None else base.eps_roots
    ed = min(max(base.eps_deflate, es), er)
    return Tolerances(es, er, ed)


def _emit(obj: dict, dest: str) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if dest == "-":
        sys.stdout.write(text)
        return
    folder = os.path.dirname(os.path.abspath(dest))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".cmvkit-", suffix=".json")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, dest)


def _error(kind: str, message: str, **extra) -> dict:
    return {"error": {"type": kind, "message": message, **extra}}


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tol = _tolerances(args)
        raw = sys.stdin.read() if args.input == "-" else open(args.input, encoding="utf-8").read()
        try:
            payload = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from None
        validate_payload(args.command, payload)
        body, ver = HANDLERS[args.command](payload, args, tol)
    except (SchemaError, ArgumentError, OSError) as exc:
        _emit(_error("schema", str(exc)), args.output)
        return EXIT_SCHEMA
    except NoSolution as exc:
        _emit(_error("no_solution", str(exc), report=_jsonable(exc.report)), args.output)
        return EXIT_NOSOLUTION
    except CapabilityError as exc:
        _emit(_error("capability", str(exc)), args.output)
        return EXIT_CAPABILITY
    except (NumericError, StructureError, ConsistencyError, CMVError, np.linalg.LinAlgError) as exc:
        _emit(_error("numeric", str(exc), diagnostics=_jsonable(getattr(exc, "partial", None))), args.output)
        return EXIT_NUMERIC
    body = {"command": args.command, **body, "verification": ver.as_dict()}
    _emit(_jsonable(body), args.output)
    return EXIT_OK if ver.passed else EXIT_NUMERIC


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return enc_complex(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    return repr(x)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
