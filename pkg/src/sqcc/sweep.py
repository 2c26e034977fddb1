"""Distance/noise sweeps and Monte Carlo validation campaigns."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace

from . import __version__
from .classical import qpsk_ber, solve_displacement
from .core import DomainError, PhaseNoiseBudget, StatisticalPowerError, SystemParams, channel_transmittance
from .keyrate import optimize_va
from .mc import MIN_ROUNDS, run_campaign
from .noise import receiver_noise

MODES = ("analytic", "montecarlo", "both")
FORMATS = ("csv", "json")
REFERENCE_COMBINATIONS = ((1e-5, 1e-3), (1e-5, 1e-2), (1e-4, 1e-3), (1e-4, 1e-2))

COLUMNS = ("distance_km", "sigma_i", "sigma_b", "T", "v_a_opt", "alpha", "n_tot", "chi_line",
           "chi_het", "chi_tot", "i_ab", "chi_be", "lambda1", "lambda2", "lambda3", "lambda4",
           "lambda5", "rate", "feasible")
MC_COLUMNS = ("ber_emp_x", "ber_emp_p", "noise_emp", "ci_low", "ci_high")

# fields that change neither the numbers nor the bytes of the output table
_NON_CONTENT = ("output", "workers", "format")


@dataclass(frozen=True)
class SweepSpec:
    distances_km: tuple = tuple(float(5 * i) for i in range(33))
    noise_combinations: tuple = REFERENCE_COMBINATIONS
    mode: str = "analytic"
    trials: int = 1_000_000
    seed: int = 0
    output: str | None = None
    format: str = "csv"
    workers: int = 1
    untrusted_sigma_b: bool = False
    va_bounds: tuple = (1e-2, 1e2)
    params: SystemParams = field(default_factory=SystemParams)

    def __post_init__(self):
        if not self.distances_km:
            raise DomainError("distances_km must be nonempty")
        if any(not math.isfinite(d) or d < 0 for d in self.distances_km):
            raise DomainError("distances must be finite and nonnegative")
        if not self.noise_combinations:
            raise DomainError("noise_combinations must be nonempty")
        for c in self.noise_combinations:
            if len(c) != 2:
                raise DomainError(f"noise combination must be (sigma_i, sigma_b), got {c!r}")
            PhaseNoiseBudget(*c)
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.format not in FORMATS:
            raise DomainError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        lo, hi = self.va_bounds
        if not (0 < lo < hi):
            raise DomainError(f"va_bounds must satisfy 0 < lo < hi, got {self.va_bounds}")

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        if "params" in d:
            p = d["params"]
            bad = set(p) - {f.name for f in fields(SystemParams)}
            if bad:
                raise DomainError(f"unknown params keys: {sorted(bad)}")
            d["params"] = SystemParams(**{k: float(v) for k, v in p.items()})
        for k in ("distances_km", "va_bounds"):
            if k in d:
                d[k] = tuple(float(x) for x in d[k])
        if "noise_combinations" in d:
            d["noise_combinations"] = tuple(tuple(float(x) for x in c) for c in d["noise_combinations"])
        return cls(**d)

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["params"] = self.params.to_dict()
        d["distances_km"] = list(self.distances_km)
        d["noise_combinations"] = [list(c) for c in self.noise_combinations]
        d["va_bounds"] = list(self.va_bounds)
        return d

    def config_hash(self) -> str:
        d = {k: v for k, v in self.to_dict().items() if k not in _NON_CONTENT}
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def items(self):
        """Work items in output order: distance-major, then noise combination."""
        return [(d, c) for d in self.distances_km for c in self.noise_combinations]


def _budget(spec: SweepSpec, combo) -> PhaseNoiseBudget:
    b = PhaseNoiseBudget(*combo)
    return b.all_untrusted() if spec.untrusted_sigma_b else b


def _row(job):
    spec, index, distance, combo = job
    params = spec.params.with_(length_km=distance)
    T = channel_transmittance(params.gamma, distance)
    phase = _budget(spec, combo)
    rep = optimize_va(params, phase, T, bounds=spec.va_bounds)
    nd = rep.noise
    nan = math.nan
    row = {
        "distance_km": distance, "sigma_i": combo[0], "sigma_b": combo[1], "T": T,
        "v_a_opt": rep.v_a_opt, "alpha": rep.alpha,
        "n_tot": nd.n_tot if nd else nan, "chi_line": nd.chi_line if nd else nan,
        "chi_het": nd.chi_het if nd else nan, "chi_tot": nd.chi_tot if nd else nan,
        "i_ab": rep.i_ab, "chi_be": rep.chi_be,
        **{f"lambda{i + 1}": lam for i, lam in enumerate(rep.lambdas)},
        "rate": rep.rate, "feasible": rep.feasible,
        "rate_raw": rep.rate_raw,
    }
    if spec.mode != "analytic":
        if rep.feasible:
            emp = run_campaign(params.with_(v_a=rep.v_a_opt), phase, T, spec.trials, spec.seed,
                               alpha=rep.alpha, stream_prefix=(index,))
            row.update(ber_emp_x=emp.ber_x, ber_emp_p=emp.ber_p, noise_emp=emp.noise,
                       ci_low=emp.ber_ci[0], ci_high=emp.ber_ci[1])
        else:
            row.update(dict.fromkeys(MC_COLUMNS, nan))
    return row


def run_sweep(spec: SweepSpec) -> list[dict]:
    """One row per (distance, noise combination), in ``SweepSpec.items()`` order."""
    if spec.mode != "analytic" and spec.trials < MIN_ROUNDS:
        raise StatisticalPowerError(f"Monte Carlo mode needs trials >= {MIN_ROUNDS}, got {spec.trials}")
    jobs = [(spec, i, d, c) for i, (d, c) in enumerate(spec.items())]
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as ex:
            return list(ex.map(_row, jobs, chunksize=4))
    return [_row(j) for j in jobs]


def columns_for(spec: SweepSpec):
    return COLUMNS + (MC_COLUMNS if spec.mode != "analytic" else ())


def _fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def header_comment(spec: SweepSpec) -> str:
    return f"# sqcc {__version__} seed={spec.seed} config_sha256={spec.config_hash()}"


def render(spec: SweepSpec, rows: list[dict], fmt: str | None = None) -> str:
    fmt = fmt or spec.format
    cols = columns_for(spec)
    if fmt == "json":
        out = {
            "tool": "sqcc", "version": __version__, "seed": spec.seed,
            "config_sha256": spec.config_hash(), "columns": list(cols),
            "rows": [{c: _json_value(r[c]) for c in cols + ("rate_raw",)} for r in rows],
        }
        return json.dumps(out, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(header_comment(spec) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in cols])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, float):
        return float(v) if math.isfinite(v) else repr(float(v))
    return v


# --- validation -------------------------------------------------------------

def _check(name, point, measured, expected, tolerance, insufficient=False):
    delta = measured - expected
    if insufficient:
        status = "insufficient_power"
    else:
        status = "pass" if abs(delta) <= tolerance else "fail"
    return {"check": name, **point, "measured": measured, "expected": expected,
            "delta": delta, "tolerance": tolerance, "status": status}


def validate_campaign(spec: SweepSpec, fault_v_el: float = 0.0, min_expected_errors: float = 10.0) -> dict:
    """Compare Monte Carlo estimates with the closed-form BER and receiver noise.

    Runs at ``params.v_a`` and ``params.ber_target`` (no optimization). The
    analytic side can be deliberately corrupted with ``fault_v_el``, a
    relative error on the electronic noise, to confirm the checks bite.
    """
    if spec.trials < MIN_ROUNDS:
        raise StatisticalPowerError(f"validation needs trials >= {MIN_ROUNDS}, got {spec.trials}")
    checks = []
    n = spec.trials
    for i, (distance, combo) in enumerate(spec.items()):
        params = spec.params.with_(length_km=distance)
        T = params.transmittance
        phase = _budget(spec, combo)
        sol = solve_displacement(params, phase, T)
        point = {"distance_km": distance, "sigma_i": combo[0], "sigma_b": combo[1]}
        if not sol.feasible:
            checks.append({"check": "displacement_feasible", **point, "status": "fail",
                           "measured": None, "expected": None, "delta": None, "tolerance": None})
            continue
        emp = run_campaign(params, phase, T, n, spec.seed, alpha=sol.alpha, stream_prefix=(i,))
        analytic = params.with_(v_el=params.v_el * (1.0 + fault_v_el))
        n_tot = receiver_noise(analytic, phase, sol.alpha, T)
        ber = qpsk_ber(sol.alpha, T, analytic.eta, n_tot, analytic.n0)
        sd = math.sqrt(ber * (1 - ber) / n)
        low_count = n * ber < min_expected_errors
        checks.append(_check("ber_x_3sigma", point, emp.ber_x, ber, 3 * sd, low_count))
        checks.append(_check("ber_p_3sigma", point, emp.ber_p, ber, 3 * sd, low_count))
        checks.append(_check("bit_symmetry", point, emp.ber_x - emp.ber_p, 0.0,
                             3 * math.sqrt(2.0) * sd, low_count))
        rel_se = emp.noise_se / emp.noise
        checks.append(_check("noise_rel_1pct", point, emp.noise / n_tot - 1.0, 0.0, 0.01,
                             rel_se > 0.01 / 3))
        checks.append(_check("noise_3se", point, emp.noise, n_tot, 3 * emp.noise_se))
    statuses = {c["status"] for c in checks}
    overall = "fail" if "fail" in statuses else (
        "insufficient_power" if "insufficient_power" in statuses else "pass")
    return {"tool": "sqcc", "version": __version__, "seed": spec.seed, "trials": n,
            "config_sha256": spec.config_hash(), "fault_v_el": fault_v_el,
            "status": overall, "checks": checks}


def reference_spec(**overrides) -> SweepSpec:
    return replace(SweepSpec(), **overrides)
