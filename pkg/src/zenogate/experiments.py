"""Experiment definitions, invariant checks and file writers behind the CLI.

Numbers are written with 12 significant digits in lowercase scientific
notation (``1.00000000000e+00``); integer measurement counts are written as
plain integers.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import absorption, fermion, gates, zeno
from .fock import FockVector, Statistics

OUTPUT_DIR_ENV = "ZENOGATE_OUTPUT_DIR"

EXPERIMENTS = {
    "zeno-curve": "ZenoCurve",
    "absorption-curve": "AbsorptionCurve",
    "hom": "HomBaseline",
    "gate-check": "GateCheck",
    "fermion-compare": "FermionCompare",
    "crossover": "Crossover",
    "curves": "CurveBundle",
}
_ALIASES = {v.lower(): k for k, v in EXPERIMENTS.items()} | {k: k for k in EXPERIMENTS}

DEFAULTS = {
    "zeno-curve": {"n_list": [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000], "theta": np.pi / 4, "tolerance": 1e-10},
    "absorption-curve": {
        "tau_d_list": [25.0, 2.5, 0.25, 0.025, 0.0025, 0.00025, 0.000025],
        "delta_t": 1.0,
        "theta": np.pi / 4,
        "tolerance": 1e-10,
        "backend": "expm",
        "cross_check": False,
    },
    "hom": {"theta": np.pi / 4, "tolerance": 1e-9},
    "gate-check": {"tolerance": 1e-10, "zeno_limit_n": 100_000, "limit_tolerance": 1e-4},
    "fermion-compare": {"theta": np.pi / 4, "tolerance": 1e-10},
    "crossover": {"n_list": [1, 10, 100, 1000, 10000, 100000], "theta": np.pi / 4, "tolerance": 1e-4},
    "curves": {
        "n_list": [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000],
        "tau_d_list": [25.0, 2.5, 0.25, 0.025, 0.0125, 0.005, 0.0025, 0.00125, 0.0005, 0.00025],
        "delta_t": 1.0,
        "theta": np.pi / 4,
        "tolerance": 1e-10,
        "slope_tolerance": 0.05,
    },
}


class ConfigError(ValueError):
    pass


def fmt(x: float) -> str:
    return f"{float(x):.11e}"


@dataclass
class ExperimentConfig:
    experiment: str
    parameters: dict = field(default_factory=dict)
    output_path: str | None = None

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        unknown = set(raw) - {"experiment", "parameters", "output_path"}
        if unknown:
            raise ConfigError(f"unknown config key {sorted(unknown)[0]!r}")
        if "experiment" not in raw:
            raise ConfigError("missing config key 'experiment'")
        params = raw.get("parameters", {})
        if not isinstance(params, dict):
            raise ConfigError("config key 'parameters' must be a mapping")
        out = raw.get("output_path")
        if out is not None and not isinstance(out, str):
            raise ConfigError("config key 'output_path' must be a string")
        return cls(str(raw["experiment"]), dict(params), out).validated()

    @classmethod
    def load(cls, path: str | os.PathLike) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        return cls.from_dict(raw)

    def validated(self) -> "ExperimentConfig":
        name = _ALIASES.get(self.experiment.lower())
        if name is None:
            raise ConfigError(f"config key 'experiment': unknown experiment {self.experiment!r}")
        allowed = DEFAULTS[name]
        params = dict(allowed)
        for key, value in self.parameters.items():
            if key not in allowed:
                raise ConfigError(f"parameter {key!r} is not valid for experiment {name!r}")
            params[key] = _check_param(key, value)
        return ExperimentConfig(name, params, self.output_path)

    def resolved_output(self) -> Path:
        if self.output_path:
            return Path(self.output_path)
        base = Path(os.environ.get(OUTPUT_DIR_ENV, "."))
        suffix = ".txt" if self.experiment in ("gate-check", "fermion-compare") else ".csv"
        if self.experiment == "curves":
            suffix = ""
        return base / f"{self.experiment}{suffix}"


def _check_param(key: str, value):
    if key in ("n_list",):
        if not isinstance(value, list) or not value:
            raise ConfigError(f"parameter {key!r} must be a nonempty list")
        if any(not isinstance(v, int) or isinstance(v, bool) or v < 1 for v in value):
            raise ConfigError(f"parameter {key!r} must hold positive integers")
        return value
    if key == "tau_d_list":
        if not isinstance(value, list) or not value:
            raise ConfigError(f"parameter {key!r} must be a nonempty list")
        if any(not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0 for v in value):
            raise ConfigError(f"parameter {key!r} must hold positive numbers")
        return [float(v) for v in value]
    if key == "backend":
        if value not in ("expm", "rk4"):
            raise ConfigError(f"parameter {key!r} must be 'expm' or 'rk4'")
        return value
    if key == "cross_check":
        if not isinstance(value, bool):
            raise ConfigError(f"parameter {key!r} must be a boolean")
        return value
    if key == "zeno_limit_n":
        if not isinstance(value, int) or value < 1:
            raise ConfigError(f"parameter {key!r} must be a positive integer")
        return value
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not np.isfinite(value):
        raise ConfigError(f"parameter {key!r} must be a finite number")
    if key in ("delta_t", "tolerance", "limit_tolerance", "slope_tolerance") and value <= 0:
        raise ConfigError(f"parameter {key!r} must be positive")
    return float(value)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}" + (f": {self.detail}" if self.detail else "")


@dataclass
class ExperimentResult:
    experiment: str
    checks: list[Check]
    files: dict[str, str]  # file name -> text content

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self) -> str:
        head = f"experiment: {self.experiment}\n"
        body = "\n".join(c.line() for c in self.checks)
        verdict = "ALL CHECKS PASSED" if self.ok else "SOME CHECKS FAILED"
        return head + body + f"\n{verdict}\n"


def is_nonincreasing(values, slack: float = 1e-12) -> bool:
    v = np.asarray(values, dtype=float)
    return bool(np.all(np.diff(v) <= slack))


def is_strictly_increasing(values) -> bool:
    return bool(np.all(np.diff(np.asarray(values, dtype=float)) > 0))


def loglog_slope(ns, ps) -> float:
    """Least-squares slope of ``log p`` against ``log n``."""
    return float(np.polyfit(np.log(np.asarray(ns, float)), np.log(np.asarray(ps, float)), 1)[0])


def tail_points(ns, ps, decades: float = 1.0):
    ns = np.asarray(ns, float)
    ps = np.asarray(ps, float)
    keep = ns >= ns.max() / 10**decades * (1 - 1e-12)
    return ns[keep], ps[keep]


def zeno_csv(rows) -> str:
    return "n,p_error\n" + "".join(f"{n},{fmt(p)}\n" for n, p in rows)


def absorption_csv(rows, backend: str) -> str:
    return "n,p_error,p_heralded,backend\n" + "".join(
        f"{fmt(n)},{fmt(p)},{fmt(h)},{backend}\n" for n, p, h in rows
    )


def _zeno_curve(p) -> ExperimentResult:
    rows = zeno.zeno_error_curve(p["n_list"], p["theta"])
    ns = [r[0] for r in rows]
    pes = np.array([r[1] for r in rows])
    oracle = zeno.closed_form_error(ns, p["theta"])
    dev = float(np.max(np.abs(pes - oracle)))
    order = np.argsort(ns)
    checks = [
        Check("closed-form agreement", dev <= p["tolerance"], f"max |dP_E| = {dev:.3e}"),
        Check("P_E in [0,1]", bool(np.all((pes >= -1e-12) & (pes <= 1 + 1e-12)))),
        Check("P_E nonincreasing in N", is_nonincreasing(pes[order])),
    ]
    if 1 in ns and abs(p["theta"] - np.pi / 4) < 1e-15:
        pe1 = pes[ns.index(1)]
        checks.append(Check("N=1 gives P_E=1", abs(pe1 - 1) <= 1e-9, f"P_E(1) = {float(pe1)!r}"))
    return ExperimentResult("zeno-curve", checks, {"": zeno_csv(rows)})


def _absorption_rows(p, backend):
    return absorption.absorption_error_curve(p["tau_d_list"], p["delta_t"], p["theta"], backend=backend)


def _absorption_curve(p) -> ExperimentResult:
    state = FockVector.basis_state(Statistics.BOSON, 1, 1)
    rows, traces = [], []
    for tau in p["tau_d_list"]:
        model = absorption.AbsorptionModel(tau, p["delta_t"], p["theta"])
        res = absorption.run_absorption(model, state, backend=p["backend"])
        rows.append((model.zeno_n, res.p_error, res.p_heralded))
        traces.append(abs(np.trace(res.rho_out.matrix).real - 1))
    ns = np.array([r[0] for r in rows])
    pes = np.array([r[1] for r in rows])
    her = np.array([r[2] for r in rows])
    order = np.argsort(ns)
    checks = [
        Check("trace preserved", max(traces) <= p["tolerance"], f"max |tr - 1| = {max(traces):.3e}"),
        Check("heralded <= error", bool(np.all(her <= pes + 1e-10))),
        Check("P_E nonincreasing in N", is_nonincreasing(pes[order])),
    ]
    if p["cross_check"]:
        other = "rk4" if p["backend"] == "expm" else "expm"
        alt = np.array([r[1] for r in _absorption_rows(p, other)])
        dev = float(np.max(np.abs(alt - pes)))
        checks.append(Check(f"{p['backend']} vs {other}", dev <= 1e-8, f"max |dP_E| = {dev:.3e}"))
    return ExperimentResult("absorption-curve", checks, {"": absorption_csv(rows, p["backend"])})


def _hom(p) -> ExperimentResult:
    theta = p["theta"]
    pe = zeno.run_zeno(zeno.ZenoProtocol(1, theta), FockVector.basis_state(Statistics.BOSON, 1, 1))
    boson = fermion.hom_coincidence(Statistics.BOSON, theta)
    ferm = fermion.hom_coincidence(Statistics.FERMION, theta)
    tol = p["tolerance"]
    checks = [
        Check("boson coincidence = cos^2(2 theta)", abs(boson - np.cos(2 * theta) ** 2) <= tol, f"{boson:.3e}"),
        Check("fermion coincidence = 1", abs(ferm - 1) <= tol, f"{float(ferm)!r}"),
        Check("P_E(N=1) = 1 - cos^2(2 theta)", abs(pe.error_probability - np.sin(2 * theta) ** 2) <= tol,
              f"P_E = {float(pe.error_probability)!r}"),
    ]
    return ExperimentResult("hom", checks, {"": zeno_csv([(1, pe.error_probability)])})


def _matrix_block(name: str, g) -> str:
    return f"# {name}\n" + gates.format_gate(g) + "\n"


def _gate_check(p) -> ExperimentResult:
    tol = p["tolerance"]
    port = gates.PhaseConvention.PORT_PHASE_PI_OVER_4
    ssp, sp, sw = gates.sqrt_swap_prime(), gates.swap_prime(), gates.swap()
    limit = gates.extract_logical_gate(zeno.zeno_limit_conditional_map(), port)
    numeric = gates.extract_logical_gate(
        zeno.zeno_limit_numeric(n=p["zeno_limit_n"]), port, leakage_tolerance=1.0
    )
    cz = gates.compose([sp, sw])
    h = gates.hadamard_on_target()
    cx = gates.compose([h, cz, h])
    d = lambda a, b: float(np.max(np.abs(a.matrix - b.matrix)))  # noqa: E731
    diff = sp.matrix - sw.matrix
    only_44 = bool(np.count_nonzero(np.abs(diff) > 0) == 1 and abs(diff[3, 3]) > 0)
    checks = [
        Check("(sqrt SWAP')^2 = SWAP'", d(gates.compose([ssp, ssp]), sp) <= 1e-12),
        Check("SWAP' differs from SWAP only at (4,4)", only_44),
        Check("(sqrt SWAP')^4 = I", float(np.max(np.abs(np.linalg.matrix_power(ssp.matrix, 4) - np.eye(4)))) <= 1e-12),
        Check("Zeno-limit gate = sqrt SWAP' (analytic)", d(limit, ssp) <= 1e-4, f"max dev {d(limit, ssp):.3e}"),
        Check(f"Zeno-limit gate = sqrt SWAP' (N={p['zeno_limit_n']})", d(numeric, ssp) <= p["limit_tolerance"],
              f"max dev {d(numeric, ssp):.3e}"),
        Check("SWAP after SWAP' = CZ", d(cz, gates.controlled_z()) == 0.0),
        Check("H CZ H = CNOT", d(cx, gates.cnot()) <= tol, f"max dev {d(cx, gates.cnot()):.3e}"),
        Check("boson crossing = SWAP", d(gates.crossing_gate(Statistics.BOSON), sw) <= tol),
    ]
    text = "".join(
        _matrix_block(n, g)
        for n, g in [("sqrt_swap_prime", ssp), ("swap_prime", sp), ("zeno_limit", limit),
                     ("controlled_z", cz), ("cnot", cx)]
    )
    return ExperimentResult("gate-check", checks, {"": text})


def _fermion_compare(p) -> ExperimentResult:
    tol = p["tolerance"]
    fg = fermion.fermion_coupler_gate(p["theta"])
    fg_alt = fermion.fermion_coupler_gate(p["theta"], order=(2, 1))
    cross = gates.crossing_gate(Statistics.FERMION)
    circuit = gates.compose([gates.swap_prime(), cross])
    d = lambda a, b: float(np.max(np.abs(a.matrix - b.matrix)))  # noqa: E731
    checks = [
        Check("fermion crossing = SWAP'", d(cross, gates.swap_prime()) <= tol),
        Check("fermion crossing circuit = identity", d(circuit, gates.LogicalGate(np.eye(4))) <= tol),
        Check("fermion gate independent of mode order", d(fg, fg_alt) <= tol),
        Check("HOM reversal (boson 0, fermion 1)",
              fermion.hom_coincidence(Statistics.BOSON) <= tol
              and abs(fermion.hom_coincidence(Statistics.FERMION) - 1) <= tol),
    ]
    if abs(p["theta"] - np.pi / 4) < 1e-15:
        checks.insert(0, Check("fermion coupler gate = sqrt SWAP'", d(fg, gates.sqrt_swap_prime()) <= tol,
                               f"max dev {d(fg, gates.sqrt_swap_prime()):.3e}"))
    text = _matrix_block("fermion_coupler", fg) + _matrix_block("fermion_crossing", cross) + _matrix_block(
        "fermion_circuit", circuit
    )
    return ExperimentResult("fermion-compare", checks, {"": text})


def _crossover(p) -> ExperimentResult:
    rows = fermion.boson_fermion_crossover_report(p["n_list"], p["theta"])
    rows.sort(key=lambda r: r.n)
    fids = [r.fidelity for r in rows]
    checks = [Check("fidelity strictly increasing in N", is_strictly_increasing(fids))]
    if rows[-1].n >= 100_000:
        checks.append(Check("fidelity > 1 - tolerance at largest N", fids[-1] > 1 - p["tolerance"],
                            f"1 - F = {1 - fids[-1]:.3e}"))
    csv = "n,fidelity,leakage_11\n" + "".join(f"{r.n},{fmt(r.fidelity)},{fmt(r.leakage_11)}\n" for r in rows)
    return ExperimentResult("crossover", checks, {"": csv})


def emit_curve_bundle(n_list, tau_d_list, delta_t: float = 1.0, theta: float = np.pi / 4,
                     tolerance: float = 1e-10, slope_tolerance: float = 0.05) -> ExperimentResult:
    """Measurement dots and absorption line on the shared N axis.

    Returns three files: ``zeno.csv``, ``absorption.csv`` and ``combined.dat``
    (whitespace columns ``n p_error``, one ``#``-headed block per curve,
    blocks separated by two blank lines).
    """
    if not n_list or not tau_d_list:
        raise ConfigError("curves needs nonempty n_list and tau_d_list")
    zrows = sorted(zeno.zeno_error_curve(n_list, theta))
    arows = sorted(absorption.absorption_error_curve(tau_d_list, delta_t, theta))
    zn, zp = zip(*zrows)
    an, ap, _ = zip(*arows)
    dev = float(np.max(np.abs(np.array(zp) - zeno.closed_form_error(zn, theta))))
    checks = [
        Check("dots match closed form", dev <= tolerance, f"max |dP_E| = {dev:.3e}"),
        Check("dots nonincreasing", is_nonincreasing(zp)),
        Check("line nonincreasing", is_nonincreasing(ap)),
    ]
    if zn[0] == 1:
        checks.append(Check("dots start at P_E = 1", abs(zp[0] - 1) <= 1e-9))
    if an[0] <= 0.01:
        checks.append(Check("line starts near P_E = 1", ap[0] > 0.99, f"P_E(N={an[0]:.3g}) = {ap[0]:.6f}"))
    for label, ns, ps in (("dots", zn, zp), ("line", an, ap)):
        if max(ns) / min(ns) >= 10:
            s = loglog_slope(*tail_points(ns, ps))
            checks.append(Check(f"{label} tail slope = -1", abs(s + 1) <= slope_tolerance, f"slope {s:.4f}"))
    combined = (
        "# zeno measurement (dots)\n# n p_error\n"
        + "".join(f"{n} {fmt(p)}\n" for n, p in zrows)
        + "\n\n# two-photon absorption (line), n = delta_t / (4 tau_d)\n# n p_error\n"
        + "".join(f"{fmt(n)} {fmt(p)}\n" for n, p, _ in arows)
    )
    return ExperimentResult("curves", checks, {
        "zeno.csv": zeno_csv(zrows),
        "absorption.csv": absorption_csv(arows, "expm"),
        "combined.dat": combined,
    })


def _curves(p) -> ExperimentResult:
    return emit_curve_bundle(p["n_list"], p["tau_d_list"], p["delta_t"], p["theta"],
                            p["tolerance"], p["slope_tolerance"])


RUNNERS = {
    "zeno-curve": _zeno_curve,
    "absorption-curve": _absorption_curve,
    "hom": _hom,
    "gate-check": _gate_check,
    "fermion-compare": _fermion_compare,
    "crossover": _crossover,
    "curves": _curves,
}


def output_files(config: ExperimentConfig, result: ExperimentResult) -> dict[Path, str]:
    """Map each result file onto disk paths, plus the summary."""
    out = config.resolved_output()
    files = {}
    if config.experiment == "curves":
        for name, text in result.files.items():
            files[out / f"curves_{name}"] = text
        files[out / "curves_summary.txt"] = result.summary()
    else:
        files[out] = result.files[""]
        files[out.with_name(out.stem + "_summary.txt")] = result.summary()
    return files


def check_writable(config: ExperimentConfig) -> None:
    out = config.resolved_output()
    target_dir = out if config.experiment == "curves" else out.parent
    probe = target_dir
    while not probe.exists():
        probe = probe.parent
    if not probe.is_dir() or not os.access(probe, os.W_OK):
        raise OSError(f"output location {target_dir} is not writable")
    if out.exists() and out.is_dir() and config.experiment != "curves":
        raise OSError(f"output path {out} is a directory")


def run_experiment(config: ExperimentConfig, write: bool = True) -> ExperimentResult:
    config = config.validated()
    if write:
        check_writable(config)
    result = RUNNERS[config.experiment](config.parameters)
    if write:
        for path, text in output_files(config, result).items():
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
    return result
