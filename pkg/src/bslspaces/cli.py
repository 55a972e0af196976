"""Command-line front end.

Subcommands and their outputs:

  norm grand|small   JSON NormReport
  fundamental        CSV: delta, phi_numeric, phi_closed, rel_dev, chi, p_star
  chi                JSON: value, majorant_value, thresholds, levels, sl_lower
  indices            JSON: per space gamma1, gamma2, residuals; targets; duality sums
  catalog            JSON (--list, --check) or CSV id,weight,value (--export;
                     id is the quadrature node index)
  verify             JSON suite report; exit 2 when a property fails

Options may also come from a key = value config file (--config); flags
override it.  Without --out, output goes to $BSLSPACES_OUTPUT_DIR/<name> when
that variable is set and to stdout otherwise.  Exit status: 0 success,
1 input error, 2 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import catalog
from .chiest import chi_from_psi, chi_integral_general, chi_power, chi_seminorm
from .fundamental import fundamental_profile
from .grandnorm import grand_norm
from .indices import index_report
from .measure import DomainError, MeasureSpace, SampledFunction, load_atomic_csv
from .psi import PsiFunction, load_tabulated_csv
from .smallnorm import sl_norm
from .verify import SUITES, run_suite

OUTPUT_ENV = "BSLSPACES_OUTPUT_DIR"

# option name -> type used when the value comes from a config file
CONFIG_KEYS = {
    "psi": str, "space": str, "function": str, "grid": int, "mode": str, "tol": float,
    "levels": int, "n": int, "chi": str, "delta_range": str, "per_decade": int,
    "seed": int, "count": int, "suite": str, "out": str, "format": str, "nodes": int,
}


class InputError(Exception):
    """Bad user input; reported with exit status 1."""


@dataclass
class RunConfig:
    subcommand: str
    options: dict = field(default_factory=dict)

    def get(self, key, default=None):
        v = self.options.get(key)
        return default if v is None else v


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------

def read_config(path):
    out = {}
    try:
        fh = open(path)
    except OSError as exc:
        raise InputError(f"cannot read config file {path}: {exc.strerror}") from None
    with fh:
        for ln, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InputError(f"config {path}:{ln}: expected key = value")
            k, v = (s.strip() for s in line.split("=", 1))
            k = k.replace("-", "_")
            if k not in CONFIG_KEYS:
                raise InputError(f"config {path}:{ln}: unknown key {k!r}")
            try:
                out[k] = CONFIG_KEYS[k](v)
            except ValueError:
                raise InputError(f"config {path}:{ln}: bad value for {k}: {v!r}") from None
    return out


def _float(s):
    s = s.strip().lower()
    return math.inf if s in ("inf", "+inf", "infinity") else float(s)


def parse_psi(spec):
    """zeta:a,b,alpha,beta | table:PATH | orlicz_square."""
    if not spec:
        raise InputError("a psi specification is required (--psi)")
    kind, _, rest = spec.partition(":")
    if kind == "zeta":
        try:
            vals = [_float(x) for x in rest.split(",")]
        except ValueError:
            raise InputError(f"malformed zeta parameters {rest!r}") from None
        if len(vals) != 4:
            raise InputError("zeta needs four parameters a,b,alpha,beta")
        return PsiFunction.zeta(*vals)
    if kind == "table":
        if not os.path.exists(rest):
            raise InputError(f"psi table not found: {rest}")
        try:
            return load_tabulated_csv(rest)
        except (ValueError, IndexError):
            raise InputError(f"malformed psi table {rest}: expected rows p,psi(p)") from None
    if kind == "orlicz_square":
        return catalog.orlicz_square_psi()
    raise InputError(f"unknown psi family {kind!r} (zeta, table, orlicz_square)")


def _load_csv(path):
    try:
        return load_atomic_csv(path)
    except (ValueError, KeyError) as exc:
        raise InputError(f"malformed function file {path}: {exc}") from None


def _catalog_params(rest):
    name, _, ptxt = rest.partition("?")
    params = {}
    for item in filter(None, ptxt.split("&")):
        k, _, v = item.partition("=")
        try:
            params[k] = int(v) if v.lstrip("-").isdigit() else _float(v)
        except ValueError:
            raise InputError(f"bad catalog parameter {item!r}") from None
    return name, params


def load_function(cfg):
    """SampledFunction from --function (CSV path or catalog:NAME[?k=v&...])."""
    spec = cfg.get("function")
    if not spec:
        raise InputError("a function is required (--function)")
    if spec.startswith("catalog:"):
        name, params = _catalog_params(spec[len("catalog:"):])
        if name == "example51":
            return catalog.example51(int(cfg.get("n", params.get("n", 0))))
        if name not in catalog.ENTRIES:
            raise InputError(f"unknown catalog entry {name!r}; known: {sorted(catalog.ENTRIES) + ['example51']}")
        if cfg.get("nodes") is not None:
            params.setdefault("nodes", cfg.get("nodes"))
        return catalog.get_entry(name, **params).function()
    if not os.path.exists(spec):
        raise InputError(f"function file not found: {spec}")
    space, f = _load_csv(spec)
    sp = cfg.get("space")
    if sp and os.path.exists(sp):
        # weights from the space file, values matched by id
        other, _ = _load_csv(sp)
        w = dict(zip(other.ids, other.weights))
        try:
            weights = [w[i] for i in space.ids]
        except KeyError as exc:
            raise InputError(f"id {exc.args[0]!r} missing from space file {sp}") from None
        space = MeasureSpace.atomic(weights, space.ids)
        f = SampledFunction.from_values(space, f.values, name=f.name)
    return f


def parse_delta_range(s):
    try:
        lo, hi = (float(x) for x in s.split(":"))
    except ValueError:
        raise InputError(f"malformed delta range {s!r}; expected lo:hi") from None
    if not (0 < lo < hi):
        raise InputError("delta range needs 0 < lo < hi")
    return lo, hi


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _json_clean(x):
    if isinstance(x, dict):
        return {str(k): _json_clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _json_clean(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


def dump_json(obj):
    return json.dumps(_json_clean(obj), sort_keys=True, indent=2) + "\n"


def dump_csv(header, rows):
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for r in rows:
        wr.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def emit(cfg, text, default_name):
    out = cfg.get("out")
    if out is None and os.environ.get(OUTPUT_ENV):
        out = os.path.join(os.environ[OUTPUT_ENV], default_name)
    if out is None or out == "-":
        sys.stdout.write(text)
        return None
    d = os.path.dirname(out)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(out, "w", newline="") as fh:
        fh.write(text)
    return out


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _check_grid(n, name):
    if n < 8:
        raise InputError(f"{name} must be at least 8")
    return n


def _plain(x):
    """Certificates with sampled functions replaced by their values."""
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, SampledFunction):
        return x.values
    if hasattr(x, "to_dict"):
        return x.to_dict()
    return x


def cmd_norm(cfg):
    kind = cfg.get("kind")
    psi = parse_psi(cfg.get("psi"))
    f = load_function(cfg)
    n = _check_grid(cfg.get("grid", 64 if kind == "small" else 128), "grid")
    if kind == "grand":
        rep = grand_norm(f, psi, n=n)
    else:
        tol = cfg.get("tol", 1e-7)
        if tol <= 0:
            raise InputError("tolerance must be positive")
        rep = sl_norm(f, psi, m=n, mode=cfg.get("mode", "both"), tol=tol)
    rep.certificate = _plain(rep.certificate)
    d = rep.to_dict()
    return dump_json(d), f"norm_{kind}.json", 0


def cmd_fundamental(cfg):
    psi = parse_psi(cfg.get("psi"))
    lo, hi = parse_delta_range(cfg.get("delta_range", "1e-8:1e8"))
    prof = fundamental_profile(psi, lo, hi, cfg.get("per_decade", 33))
    closed = prof.closed if prof.closed is not None else np.full(prof.delta.shape, math.nan)
    rel = np.abs(closed / prof.phi - 1.0)
    rows = zip(prof.delta, prof.phi, closed, rel, prof.chi, prof.p_star)
    text = dump_csv(["delta", "phi_numeric", "phi_closed", "rel_dev", "chi", "p_star"], rows)
    return text, "fundamental.csv", 0


def _parse_chi(spec, psi):
    if spec:
        kind, _, rest = spec.partition(":")
        if kind == "power":
            try:
                return chi_power(float(rest)), spec
            except ValueError:
                raise InputError(f"malformed chi exponent {rest!r}") from None
        raise InputError(f"unknown chi {spec!r} (power:r, or give --psi)")
    if psi is None:
        return chi_power(0.5), "power:0.5"
    return chi_from_psi(psi), "delta/phi"


def cmd_chi(cfg):
    psi = parse_psi(cfg.get("psi")) if cfg.get("psi") else None
    f = load_function(cfg)
    chi, label = _parse_chi(cfg.get("chi"), psi)
    m = cfg.get("levels", 16)
    if m < 1:
        raise InputError("levels must be at least 1")
    levels = tuple(sorted({1, *[2 ** k for k in range(1, 8) if 2 ** k <= m], m}))
    res = chi_integral_general(f.abs(), chi, levels)
    value = chi_seminorm(f, chi, levels)
    out = {"chi": label, "value": value, "majorant_value": res.value, "thresholds": res.thresholds,
           "levels": res.levels, "by_levels": res.by_levels, "sl_lower": None}
    if psi is not None and f.space.variant == "atomic":
        out["sl_lower"] = sl_norm(f, psi, mode="primal").value
    return dump_json(out), "chi.json", 0


def cmd_indices(cfg):
    psi = parse_psi(cfg.get("psi"))
    rep = index_report(psi)
    which = cfg.get("which", "both")
    if which in ("grand", "small"):
        rep = {which: rep[which], "targets": {which: rep["targets"][which]}, "duality": rep["duality"]}
    return dump_json(rep), "indices.json", 0


def cmd_catalog(cfg):
    if cfg.get("list"):
        rows = {}
        for nm, fac in catalog.ENTRIES.items():
            e = fac()
            rows[nm] = {"params": e.params, "moment_interval": e.validity,
                        "doc": (fac.__doc__ or "").strip().splitlines()[0]}
        rows["example51"] = {"params": {"n": "int"}, "doc": catalog.example51.__doc__.strip().splitlines()[0]}
        return dump_json(rows), "catalog.json", 0
    name = cfg.get("check") or cfg.get("export")
    if not name:
        raise InputError("catalog needs --list, --check NAME or --export NAME")
    if name not in catalog.ENTRIES:
        raise InputError(f"unknown catalog entry {name!r}; known: {sorted(catalog.ENTRIES)}")
    if cfg.get("check"):
        rep = catalog.catalog_membership_check(name)
        e = catalog.get_entry(name)
        if e.log_moment is not None:
            rep["moment_rel_err"] = catalog.moment_agreement(e)[0]
        return dump_json(rep), f"catalog_{name}.json", 0 if rep["ok"] else 2
    # quadrature nodes become atoms; nodes whose weight leaves double range are dropped
    f = catalog.get_entry(name).function()
    w, v = f.space.weights, f.values
    keep = np.flatnonzero((w > 0) & np.isfinite(w) & np.isfinite(v))
    rows = ((int(i), w[i], v[i]) for i in keep)
    return dump_csv(["id", "weight", "value"], rows), f"{name}.csv", 0


def cmd_verify(cfg):
    name = cfg.get("suite", "all")
    names = list(SUITES) if name == "all" else [name]
    for nm in names:
        if nm not in SUITES:
            raise InputError(f"unknown suite {nm!r}; known: {sorted(SUITES)}")
    results = [run_suite(nm, seed=cfg.get("seed"), count=cfg.get("count")) for nm in names]
    for r in results:
        sys.stderr.write(r.line() + "\n")
        for msg in r.failures[:10]:
            sys.stderr.write("  " + msg + "\n")
    rep = {r.name: {"passed": r.passed, "metrics": r.metrics, "failures": r.failures} for r in results}
    return dump_json(rep), "verify.json", 0 if all(r.passed for r in results) else 2


COMMANDS = {"norm": cmd_norm, "fundamental": cmd_fundamental, "chi": cmd_chi,
            "indices": cmd_indices, "catalog": cmd_catalog, "verify": cmd_verify}


def run(config: RunConfig):
    """Dispatch a parsed configuration; returns (exit status, output path)."""
    text, default_name, status = COMMANDS[config.subcommand](config)
    path = emit(config, text, default_name)
    return status, path


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file; flags override it")
    common.add_argument("--out", help="output path ('-' for stdout)")
    common.add_argument("--seed", type=int)
    common.add_argument("--nodes", type=int, help="quadrature nodes for generated spaces")

    ap = argparse.ArgumentParser(prog="bslspaces", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("norm", parents=[common], help="grand or small-space norm of a function")
    p.add_argument("kind", choices=["grand", "small"])
    p.add_argument("--psi")
    p.add_argument("--space")
    p.add_argument("--function")
    p.add_argument("--grid", type=int)
    p.add_argument("--mode", choices=["primal", "dual", "both"])
    p.add_argument("--tol", type=float)

    p = sub.add_parser("fundamental", parents=[common], help="fundamental-function profile (CSV)")
    p.add_argument("--psi")
    p.add_argument("--delta-range", dest="delta_range")
    p.add_argument("--per-decade", dest="per_decade", type=int)

    p = sub.add_parser("chi", parents=[common], help="chi-integral majorant of a function")
    p.add_argument("--psi")
    p.add_argument("--function")
    p.add_argument("--space")
    p.add_argument("--chi", help="power:r; default delta/phi from --psi, else power:0.5")
    p.add_argument("--levels", type=int)
    p.add_argument("--n", type=int, help="parameter of catalog:example51")

    p = sub.add_parser("indices", parents=[common], help="fitted Boyd indices")
    p.add_argument("--psi")
    p.add_argument("--space", dest="which", choices=["grand", "small"])

    p = sub.add_parser("catalog", parents=[common], help="example catalog")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--list", action="store_true", default=None)
    g.add_argument("--check", metavar="NAME")
    g.add_argument("--export", metavar="NAME")

    p = sub.add_parser("verify", parents=[common], help="seeded property suites")
    p.add_argument("--suite", help=f"one of {', '.join(SUITES)} or all")
    p.add_argument("--count", type=int)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    opts = {}
    try:
        if args.config:
            opts.update(read_config(args.config))
        opts.update({k: v for k, v in vars(args).items() if v is not None and k not in ("config", "subcommand")})
        nodes = opts.get("nodes")
        if nodes is not None and nodes < 8:
            raise InputError("nodes must be at least 8")
        cfg = RunConfig(args.subcommand, opts)
        status, _ = run(cfg)
        return status
    except InputError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return 1
    except DomainError as exc:
        sys.stderr.write(f"domain error: {exc}\n")
        return 1
    except FileNotFoundError as exc:
        sys.stderr.write(f"file not found: {exc.filename}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
