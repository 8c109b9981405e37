"""Command-line front end: deterministic tables and records per subcommand.

Every run reads an optional key=value config file, lets explicit flags win,
validates everything up front, and writes byte-stable CSV/JSON into the
output directory (echoing to stdout unless quiet).  Exit codes: 0 success,
2 bad configuration, 3 numerical failure, 4 violated built-in claim check.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .busgate import (BoundViolation, FactorizationError, StarModel, bus_gate,
                      max_gate_size, timing_error)
from .dynamics import KrylovError
from .errormc import ErrorScanConfig, bus_serial_error, chain_error_scan
from .hamiltonian import ChainSpec, QubitCoupling, coupled_hamiltonian
from .spectral import (LanczosError, adiabatic_bus_bound, bus_manifold,
                       fit_power_law, gap_formula, mean_odd_coupling)
from .wstate import ClaimViolation, MeasurementError, protocol_one, protocol_two

SCHEMA = "spinbus/1"


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- plumbing

def _int(s):
    return int(s)


def _float(s):
    return float(s)


def _str(s):
    return str(s)


def _int_list(s):
    if isinstance(s, (list, tuple)):
        return [int(v) for v in s]
    parts = [p for chunk in str(s).split(",") for p in chunk.split()]
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise ConfigError(f"expected a list of integers, got {s!r}")


def _bool(s):
    if isinstance(s, bool):
        return s
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {s!r}")


def _choice(*allowed):
    def conv(s):
        if s not in allowed:
            raise ConfigError(f"expected one of {allowed}, got {s!r}")
        return s
    return conv


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _csv(columns, rows):
    lines = [",".join(columns)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _json(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(params, name, text):
    path = Path(params["out"]) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    if not params["quiet"]:
        sys.stdout.write(text)


def _emit_table(params, stem, columns, rows):
    if params["format"] == "json":
        doc = {"schema": SCHEMA, "columns": list(columns),
               "rows": [[float(v) for v in row] for row in rows]}
        _emit(params, f"{stem}.json", _json(doc))
    else:
        _emit(params, f"{stem}.csv", _csv(columns, rows))


def _read_config(path):
    cfg = {}
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config file: {e}")
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{ln}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        cfg[key.strip()] = value.strip()
    return cfg


# ------------------------------------------------------------- subcommands

GLOBAL_PARAMS = {
    "out": (_str, "."),
    "quiet": (_bool, False),
    "format": (_choice("csv", "json"), "csv"),
}

PARAMS = {
    "spectrum": {
        "N": (_int, 7), "J_b": (_float, 1.0), "J_q": (_float, 0.3),
        "B": (_float, 0.0), "nodes": (_int_list, []),
    },
    "gap-scan": {
        "N_list": (_int_list, [3, 5, 7, 9, 11, 13]),
        "J_b": (_float, 1.0), "max_iter": (_int, 20000),
    },
    "jeff-scan": {
        "N_list": (_int_list, [3, 5, 7, 9, 11, 13]),
        "J_b": (_float, 1.0), "max_iter": (_int, 20000),
        "fit_min": (_int, 0),
    },
    "busgate": {
        "n": (_int, 3), "J_star": (_float, 1.0), "delta": (_float, 0.0),
    },
    "wstate": {
        "protocol": (_choice("one", "two"), "two"), "n": (_int, 3),
    },
    "error-scan": {
        "mode": (_choice("chain", "bus"), "chain"),
        "N_list": (_int_list, [4, 5, 6, 7, 8, 9, 10]),
        "delta": (_float, 1e-3), "trials": (_int, 200),
        "seed": (_int, 12345),
        "distribution": (_choice("rademacher", "uniform"), "rademacher"),
    },
    "bounds": {
        "ratio": (_float, 100.0),
    },
}


def _require_odd(ns):
    bad = [n for n in ns if n % 2 == 0 or n < 1]
    if bad:
        raise ConfigError(f"bus sizes must be odd and positive, got {bad}")


def cmd_spectrum(p):
    spec = ChainSpec(p["N"], p["J_b"], p["B"])
    couplings = [QubitCoupling(node, p["J_q"]) for node in p["nodes"]]
    n_sites = spec.N + len(couplings)
    if n_sites > 14:
        raise ConfigError("full spectrum limited to N + qubits <= 14 sites")
    levels = []
    for twice_sz in range(-n_sites, n_sites + 1, 2):
        sector = twice_sz / 2
        H = coupled_hamiltonian(spec, couplings, sector=sector)
        for e in np.linalg.eigvalsh(H.to_dense()):
            levels.append((float(e), sector))
    levels.sort()
    rows = [(i, e, s) for i, (e, s) in enumerate(levels)]
    _emit_table(p, "spectrum", ("index", "energy", "sector"), rows)
    return 0


def cmd_gap_scan(p):
    _require_odd(p["N_list"])
    rows = []
    for N in p["N_list"]:
        man = bus_manifold(ChainSpec(N, p["J_b"]), max_iter=p["max_iter"])
        formula = gap_formula(N, p["J_b"])
        rows.append((N, man.gap, formula, man.gap / formula))
    _emit_table(p, "gap_scan", ("N", "gap", "formula", "ratio"), rows)
    if len(rows) >= 2:
        fit = fit_power_law([r[0] for r in rows], [r[1] for r in rows])
        _emit(p, "gap_scan_fit.json", _json({
            "schema": SCHEMA, "exponent": fit.exponent,
            "prefactor": fit.prefactor, "log_rms": fit.log_rms}))
    return 0


def cmd_jeff_scan(p):
    _require_odd(p["N_list"])
    rows = []
    for N in p["N_list"]:
        man = bus_manifold(ChainSpec(N, p["J_b"]), max_iter=p["max_iter"])
        rows.append((N, mean_odd_coupling(man.j_eff)))
    _emit_table(p, "jeff_scan", ("N", "mean_odd_jeff"), rows)
    fit_rows = [r for r in rows if r[0] >= p["fit_min"]]
    if len(fit_rows) >= 2:
        fit = fit_power_law([r[0] for r in fit_rows], [r[1] for r in fit_rows])
        _emit(p, "jeff_scan_fit.json", _json({
            "schema": SCHEMA, "exponent": fit.exponent,
            "prefactor": fit.prefactor, "log_rms": fit.log_rms,
            "fit_min": p["fit_min"]}))
    return 0


def cmd_busgate(p):
    report = bus_gate(StarModel(p["n"], p["J_star"]))
    d = report.U_n.shape[0]
    identity = bool(np.max(np.abs(report.U_n - np.eye(d))) <= 1e-10)
    doc = {
        "schema": SCHEMA, "n": p["n"], "J_star": p["J_star"],
        "tau": report.tau, "residual": report.residual,
        "identity": identity,
        "phases": {f"{j:g}": [ph.real, ph.imag]
                   for j, ph in sorted(report.phases.items())},
    }
    if p["delta"]:
        eps, bound = timing_error(StarModel(p["n"], p["J_star"]), p["delta"])
        doc["timing"] = {"delta": p["delta"], "epsilon": eps, "bound": bound,
                         "ratio": eps / bound if bound else 0.0}
    _emit(p, "busgate.json", _json(doc))
    return 0


def cmd_wstate(p):
    run = protocol_one(p["n"]) if p["protocol"] == "one" else protocol_two(p["n"])
    _emit(p, "wstate.json", _json({
        "schema": SCHEMA, "protocol": p["protocol"], "n": p["n"],
        "p_formula": run.predicted_p, "p_sim": run.p_success,
        "fidelity": run.fidelity}))
    return 0


def cmd_error_scan(p):
    if p["mode"] == "chain":
        cfg = ErrorScanConfig(tuple(p["N_list"]), p["delta"], p["trials"],
                              p["seed"], p["distribution"])
        res = chain_error_scan(cfg)
        rows = [(N, int(g), m, se, p["delta"], p["trials"], p["seed"])
                for N, g, m, se in zip(cfg.N_list, res.gates,
                                       res.mean_eps, res.stderr)]
        _emit_table(p, "error_scan",
                    ("N", "gates", "mean_eps", "stderr", "delta", "trials",
                     "seed"), rows)
        _emit(p, "error_scan_fit.json", _json({
            "schema": SCHEMA, "exponent": res.fit.exponent,
            "prefactor": res.fit.prefactor, "log_rms": res.fit.log_rms,
            "large_residual": res.large_residual,
            "distribution": p["distribution"]}))
    else:
        means = bus_serial_error(p["N_list"], p["delta"], p["trials"],
                                 p["seed"], p["distribution"])
        rows = [(N, 3, m, p["delta"], p["trials"], p["seed"])
                for N, m in means.items()]
        _emit_table(p, "bus_error",
                    ("N", "gates", "mean_eps", "delta", "trials", "seed"),
                    rows)
    return 0


def cmd_bounds(p):
    _emit(p, "bounds.json", _json({
        "schema": SCHEMA, "ratio": p["ratio"],
        "N_max": adiabatic_bus_bound(p["ratio"]),
        "n_max": max_gate_size(p["ratio"])}))
    return 0


HANDLERS = {
    "spectrum": cmd_spectrum,
    "gap-scan": cmd_gap_scan,
    "jeff-scan": cmd_jeff_scan,
    "busgate": cmd_busgate,
    "wstate": cmd_wstate,
    "error-scan": cmd_error_scan,
    "bounds": cmd_bounds,
}

HELP = {
    "spectrum": "full energy levels of the chain, optionally with qubits",
    "gap-scan": "doublet-to-excited gap versus bus size, plus power-law fit",
    "jeff-scan": "mean odd-node effective coupling versus bus size",
    "busgate": "collective gate extraction at the decoupling time",
    "wstate": "heralded W-state protocol outcome",
    "error-scan": "Monte Carlo coupling-error propagation (chain or bus)",
    "bounds": "bus-size and gate-size limits for a given J_b/J_q ratio",
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spinbus",
        description="spin-chain quantum bus simulations")
    sub = parser.add_subparsers(dest="cmd", required=True)
    for name, spec in PARAMS.items():
        sp = sub.add_parser(name, help=HELP[name])
        sp.add_argument("--config", default=None,
                        help="key=value file; explicit flags win")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--quiet", action="store_const", const=True,
                        default=None, help="suppress stdout echo")
        sp.add_argument("--format", default=None, choices=("csv", "json"),
                        help="table output format")
        for key, (conv, default) in spec.items():
            flag = "--" + key.replace("_", "-")
            sp.add_argument(flag, dest=key, type=conv, default=None,
                            metavar=key.upper(),
                            help=f"default: {default!r}")
    return parser


def _merge(args):
    cfg = _read_config(args.config) if args.config else {}
    spec = {**GLOBAL_PARAMS, **PARAMS[args.cmd]}
    params = {}
    for key, (conv, default) in spec.items():
        value = getattr(args, key)
        from_cfg = cfg.pop(key, None)
        if value is None and from_cfg is not None:
            value = conv(from_cfg)
        if value is None:
            value = default
        params[key] = value
    if cfg:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(cfg))}")
    return params


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        params = _merge(args)
        return HANDLERS[args.cmd](params)
    except (ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (LanczosError, KrylovError, FactorizationError,
            MeasurementError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3
    except (BoundViolation, ClaimViolation) as e:
        print(f"claim check failed: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
