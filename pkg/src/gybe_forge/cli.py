"""Command-line entry point.

Every command writes one JSON document (sorted keys) to ``--report`` or stdout.
Exit codes: 0 success, 1 a verification failed, 2 usage or configuration error.

Options can also come from a JSON config file (``--config``); explicit flags
win over config values.  ``run CONFIG`` dispatches on the config's
``"command"`` key.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import GybeError
from .families import (
    REGISTRY,
    build_family,
    certificate_for_shape,
    find_certificate,
    registry_listing,
    sweep_family,
)
from .gates import (
    BASIS_LABELS,
    apply_gate,
    concurrence,
    gate_from_params,
    time_schedule,
    unitarity_defect,
    unitarize,
)
from .integrability import (
    HAMILTONIAN_KINDS,
    ChainSpec,
    HamiltonianSpec,
    closed_form_hamiltonian,
    hamiltonian_extract,
    partition_function,
    transfer_commutator,
    transfer_matrix,
)
from .permutations import SEARCH_MODES, SEARCH_TARGETS, parity_search
from .tensor import matrix_to_json

COMMANDS = ("families", "build", "verify", "sweep", "parity-search", "transfer", "hamiltonian", "partition", "gate")

MODE_ALIASES = {
    "fractional": "fractional-phases",
    "symmetric": "symmetric-constrained",
    "random": "random-unconstrained",
}


class UsageError(Exception):
    pass


def _scalar_json(z):
    z = complex(z)
    return z.real if z.imag == 0 else {"re": z.real, "im": z.imag}


def _int_tuple(text: str) -> tuple:
    try:
        return tuple(int(x) for x in str(text).split(","))
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _as_tuple(val):
    if val is None:
        return None
    if isinstance(val, (list, tuple)):
        return tuple(int(x) for x in val)
    return _int_tuple(val)


def _complex(text) -> complex:
    if isinstance(text, dict):
        return complex(text.get("re", 0.0), text.get("im", 0.0))
    try:
        return complex(str(text).replace(" ", ""))
    except ValueError as exc:
        raise UsageError(f"cannot parse {text!r} as a number") from exc


def _load_json(path) -> dict:
    p = Path(path)
    if not p.exists():
        raise UsageError(f"file not found: {path}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"{path} must hold a JSON object")
    return data


# -- argument parsing -------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file with option values")
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    p.add_argument("--family")
    p.add_argument("--params", help="JSON file with family parameters")
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gybe-forge", description="Build and verify Yang-Baxter solution families.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the command named in a config file")
    p.add_argument("config_file")
    p.add_argument("--report")

    p = sub.add_parser("families", help="list registered families")
    _add_common(p)

    p = sub.add_parser("build", help="print F(u) as matrix JSON")
    _add_common(p)
    p.add_argument("--u", default=None)
    p.add_argument("--dim", type=int)
    p.add_argument("--dims", help="site dimensions n1,n2 for families with several pairings")

    for name in ("verify", "sweep"):
        p = sub.add_parser(name, help="check certified equations over seeded draws")
        _add_common(p)
        p.add_argument("--shape", help="d,k,p")
        p.add_argument("--dims", help="site dimensions for the inhomogeneous equation")
        p.add_argument("--cert", help="certificate label, see `families`")
        p.add_argument("--samples", type=int)
        p.add_argument("--dim", type=int)
        p.add_argument("--complex-draws", action="store_true", default=None)

    p = sub.add_parser("parity-search", help="search parity assignments of the 16x16 families")
    _add_common(p)
    p.add_argument("--mode")
    p.add_argument("--target")
    p.add_argument("--budget", type=int)
    p.add_argument("--alphas", help="four comma-separated rates")
    p.add_argument("--samples", type=int)

    p = sub.add_parser("transfer", help="transfer-matrix commutator on a cyclic chain")
    _add_common(p)
    p.add_argument("--sites", type=int)
    p.add_argument("--u", default=None)
    p.add_argument("--v", default=None)
    p.add_argument("--dim", type=int)
    p.add_argument("--samples", type=int)

    p = sub.add_parser("hamiltonian", help="extract H from tau or build a closed form")
    _add_common(p)
    p.add_argument("--sites", type=int)
    p.add_argument("--fd-step", type=float)
    p.add_argument("--v", default=None, help="probe point for [H, tau(v)]")
    p.add_argument("--kind", help=f"closed form: {', '.join(HAMILTONIAN_KINDS)}")
    p.add_argument("--spin-sets", help="comma-separated spin-set counts per site")
    p.add_argument("--open", action="store_true", default=None, help="open boundary for closed forms")
    p.add_argument("--dim", type=int)

    p = sub.add_parser("partition", help="torus partition function tr tau(u)^rows")
    _add_common(p)
    p.add_argument("--sites", type=int)
    p.add_argument("--rows", type=int)
    p.add_argument("--u", default=None)
    p.add_argument("--dim", type=int)

    p = sub.add_parser("gate", help="normalized two-qubit gate and its action on basis states")
    _add_common(p)
    p.add_argument("--gamma", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--u", default=None)
    p.add_argument("--alpha", type=float)
    p.add_argument("--schedule", type=float, help="time t of the quarter-period schedule")
    p.add_argument("--convention", choices=("row", "column"))
    return parser


def _merge(ns: argparse.Namespace) -> dict:
    """Flags override config values; hyphens in config keys are accepted."""
    opts = {}
    if getattr(ns, "config", None):
        opts.update({k.replace("-", "_"): v for k, v in _load_json(ns.config).items()})
    for k, v in vars(ns).items():
        if v is not None:
            opts[k] = v
    return opts


# -- helpers shared by commands ---------------------------------------------------------


def _family_params(opts: dict) -> dict:
    params = {}
    if isinstance(opts.get("params"), dict):
        params.update(opts["params"])
    elif opts.get("params"):
        params.update(_load_json(opts["params"]))
    if opts.get("dim") is not None:
        params["dim"] = opts["dim"]
    return params


def _need_family(opts: dict) -> str:
    fid = opts.get("family")
    if not fid:
        raise UsageError(f"--family is required; registered families: {', '.join(sorted(REGISTRY))}")
    return fid


def _site_dim(matrix) -> int:
    n = matrix.shape[0]
    d = int(round(np.sqrt(n)))
    if d * d != n:
        raise UsageError(f"a {n}x{n} family does not act on two identical sites")
    return d


# -- commands ---------------------------------------------------------------------------


def cmd_families(opts):
    return {"command": "families", "families": registry_listing()}, 0


def cmd_build(opts):
    fid = _need_family(opts)
    params = _family_params(opts)
    built = build_family(fid, params)
    u = _complex(opts.get("u", 0.0))
    f = built.matrix
    dims = _as_tuple(opts.get("dims"))
    if dims is not None:
        if dims not in built.pairs:
            raise UsageError(f"family {fid} has no pairing {dims}; available: {sorted(built.pairs)}")
        f = built.pairs[dims]
    m = f(u)
    return {"command": "build", "family": fid, "params": params, "u": _scalar_json(u), "matrix": matrix_to_json(m)}, 0


def _verify_one(fid, opts, cert_opts_given: bool):
    params = _family_params(opts)
    built = build_family(fid, params)
    if opts.get("cert"):
        cert = find_certificate(built, opts["cert"])
    elif cert_opts_given:
        cert = certificate_for_shape(built, _as_tuple(opts.get("shape")), _as_tuple(opts.get("dims")))
    else:
        cert = None
    certs = [cert] if cert is not None else list(built.certificates)
    if not certs:
        raise UsageError(f"family {fid} has no certified equation for these parameters")
    samples = int(opts.get("samples", 25))
    seed = int(opts.get("seed", 0))
    reports = []
    for c in certs:
        rep = sweep_family(built, c, samples, seed, tol=opts.get("tol"), complex_draws=bool(opts.get("complex_draws")))
        entry = rep.to_json()
        entry["certificate"] = c.label()
        reports.append(entry)
    return {"family": fid, "params": params, "reports": reports, "pass": all(r["pass"] for r in reports)}


def cmd_verify(opts):
    fid = _need_family(opts)
    given = bool(opts.get("shape") or opts.get("dims"))
    out = _verify_one(fid, opts, given)
    if not given and not opts.get("cert"):
        out["reports"] = out["reports"][:1]
        out["pass"] = out["reports"][0]["pass"]
    out["command"] = "verify"
    return out, 0 if out["pass"] else 1


def cmd_sweep(opts):
    ids = [opts["family"]] if opts.get("family") else sorted(REGISTRY)
    results = []
    for fid in ids:
        sub = dict(opts)
        if len(ids) > 1:
            sub.pop("params", None)
            sub.pop("dim", None)
        results.append(_verify_one(fid, sub, bool(opts.get("shape") or opts.get("dims"))))
    ok = all(r["pass"] for r in results)
    return {"command": "sweep", "results": results, "pass": ok}, 0 if ok else 1


def cmd_parity_search(opts):
    mode = opts.get("mode", "symmetric-constrained")
    mode = MODE_ALIASES.get(mode, mode)
    if mode not in SEARCH_MODES:
        raise UsageError(f"unknown mode {mode!r}; expected one of {', '.join(SEARCH_MODES + tuple(MODE_ALIASES))}")
    target = opts.get("target")
    if target is not None and target not in SEARCH_TARGETS:
        raise UsageError(f"unknown target {target!r}; expected one of {', '.join(sorted(SEARCH_TARGETS))}")
    alphas = opts.get("alphas", (1, 1, 1, 1))
    if isinstance(alphas, str):
        alphas = tuple(float(x) for x in alphas.split(","))
    seed = int(opts.get("seed", 0))
    budget = int(opts.get("budget", 64))
    tol = float(opts.get("tol", 1e-10))
    catalog = parity_search(
        mode, target, budget=budget, seed=seed, tol=tol, alphas=tuple(alphas), n_pairs=int(opts.get("samples", 10))
    )
    used = target or ("gybe-2-4-1" if mode == "fractional-phases" else "ybe-4-2-1")
    return {
        "command": "parity-search",
        "mode": mode,
        "target": used,
        "seed": seed,
        "budget": budget,
        "tolerance": tol,
        "catalog": catalog,
        "count": len(catalog),
    }, 0


def _chain(opts):
    fid = _need_family(opts)
    params = _family_params(opts)
    built = build_family(fid, params)
    sites = int(opts.get("sites", 3))
    d = _site_dim(built.matrix(0.0))
    return fid, params, ChainSpec(sites, d, built.matrix)


def cmd_transfer(opts):
    fid, params, chain = _chain(opts)
    tol = float(opts.get("tol", 1e-9))
    if opts.get("u") is not None and opts.get("v") is not None:
        pairs = [(_complex(opts["u"]), _complex(opts["v"]))]
        seed = None
    else:
        from .verify import draw_pairs

        seed = int(opts.get("seed", 0))
        pairs = draw_pairs(int(opts.get("samples", 10)), seed)
    norms = [transfer_commutator(chain, u, v) for u, v in pairs]
    tau0 = transfer_matrix(chain, 0.0)
    worst = max(norms)
    out = {
        "command": "transfer",
        "family": fid,
        "params": params,
        "sites": chain.n_sites,
        "site_dim": chain.site_dim,
        "seed": seed,
        "draws": [[_scalar_json(u), _scalar_json(v)] for u, v in pairs],
        "commutator_norms": norms,
        "max_commutator_norm": worst,
        "tau0_identity_residual": float(np.max(np.abs(tau0 - np.eye(chain.dim)))),
        "tolerance": tol,
        "pass": worst <= tol,
    }
    return out, 0 if out["pass"] else 1


def cmd_hamiltonian(opts):
    if opts.get("kind"):
        kind = opts["kind"]
        if kind not in HAMILTONIAN_KINDS:
            raise UsageError(f"unknown kind {kind!r}; expected one of {', '.join(HAMILTONIAN_KINDS)}")
        params = _family_params(opts)
        couplings = {k: _complex(v) for k, v in params.get("couplings", {"x": 1, "y": 1, "z": 1, "J": 1}).items()}
        sets = opts.get("spin_sets", ())
        if isinstance(sets, str):
            sets = _int_tuple(sets)
        spec = HamiltonianSpec(couplings, int(opts.get("sites", 3)), tuple(sets), not opts.get("open"))
        H = closed_form_hamiltonian(spec, kind)
        return {"command": "hamiltonian", "kind": kind, "sites": spec.n_sites, "matrix": matrix_to_json(H)}, 0
    fid, params, chain = _chain(opts)
    probe = _complex(opts["v"]) if opts.get("v") is not None else 0.37
    tol = float(opts.get("tol", 1e-7))
    ext = hamiltonian_extract(chain, float(opts.get("fd_step", 1e-5)), probe)
    out = {
        "command": "hamiltonian",
        "family": fid,
        "params": params,
        "sites": chain.n_sites,
        "fd_step": float(opts.get("fd_step", 1e-5)),
        "probe_v": _scalar_json(probe),
        "tau0_condition": ext.tau0_condition,
        "commutator_norm": ext.commutator_norm,
        "tolerance": tol,
        "pass": ext.commutator_norm <= tol,
        "matrix": matrix_to_json(ext.H),
    }
    return out, 0 if out["pass"] else 1


def cmd_partition(opts):
    fid, params, chain = _chain(opts)
    rows = int(opts.get("rows", chain.n_sites))
    u = _complex(opts.get("u", 0.3))
    z = partition_function(chain, rows, u)
    return {
        "command": "partition",
        "family": fid,
        "params": params,
        "sites": chain.n_sites,
        "rows": rows,
        "u": _scalar_json(u),
        "Z": {"re": z.real, "im": z.imag},
    }, 0


def cmd_gate(opts):
    convention = opts.get("convention", "row")
    alpha = float(opts.get("alpha", 0.0))
    if opts.get("schedule") is not None:
        params = time_schedule(float(opts["schedule"]), alpha)
        gate = gate_from_params(params)
    else:
        gamma, beta = float(opts.get("gamma", 0.6)), float(opts.get("beta", 0.9))
        gate, params = unitarize(gamma, beta, float(_complex(opts.get("u", 0.5)).real), alpha)
    rows = []
    for i, lab in enumerate(BASIS_LABELS):
        st = apply_gate(gate, i, convention)
        rows.append({"input": lab, "state": st.to_json(), "concurrence": concurrence(st)})
    defect = unitarity_defect(gate)
    tol = float(opts.get("tol", 1e-12))
    return {
        "command": "gate",
        "convention": convention,
        "params": params.to_json(),
        "matrix": matrix_to_json(gate),
        "unitarity_defect": defect,
        "tolerance": tol,
        "rows": rows,
        "pass": defect <= tol,
    }, 0 if defect <= tol else 1


HANDLERS = {
    "families": cmd_families,
    "build": cmd_build,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "parity-search": cmd_parity_search,
    "transfer": cmd_transfer,
    "hamiltonian": cmd_hamiltonian,
    "partition": cmd_partition,
    "gate": cmd_gate,
}


def render(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=True) + "\n"


def execute(opts: dict) -> tuple[dict, int]:
    command = opts.get("command")
    if command not in HANDLERS:
        raise UsageError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    return HANDLERS[command](opts)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        if ns.command == "run":
            opts = {k.replace("-", "_"): v for k, v in _load_json(ns.config_file).items()}
            if ns.report:
                opts["report"] = ns.report
        else:
            opts = _merge(ns)
            opts["command"] = ns.command
        doc, code = execute(opts)
    except (UsageError, GybeError, ValueError, KeyError, TypeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"gybe-forge: error: {msg}", file=sys.stderr)
        return 2
    text = render(doc)
    if opts.get("report"):
        Path(opts["report"]).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
