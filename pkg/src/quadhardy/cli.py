"""
Command line front end.

    quadhardy analyze --config run.json [--out PATH] [--format csv|json]
    quadhardy sweep   --config run.json ...
    quadhardy verify  --config run.json ...

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numeric error. A ``NotFree`` or ``Inconclusive`` verdict is a result, not
an error.
"""

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AliasingError, DimensionError, NotFreeError, NotSymplecticError, NumericOverflowError,
    QuadHardyError, ValidationError,
)
from .hamiltonian import QuadraticHamiltonian, flow, preset
from .hardy import (
    DecayPair, certificate_from_flow, decide, opnorm_sq, z_reduction,
)
from .symplectic import is_free, random_symplectic, symplectic_inverse
from .wigner import GridSpec, covariance_check

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

# m = 1/2, hbar = 1 turns the free equation into i u_t + Laplacian u = 0;
# "ekpv" is accepted as a synonym of "analytic"
ANALYTIC_MASS, ANALYTIC_HBAR = 0.5, 1.0
NORMALIZATIONS = ("physical", "analytic", "ekpv")

TOP_KEYS = {"hamiltonian", "hbar", "normalization", "decay", "time", "tolerances",
            "output", "grid", "verify", "seed"}
PRESET_KEYS = {
    "free": {"m", "n"},
    "oscillator": {"m", "omega", "omega_sq"},
    "cross_term": {"m", "omega", "theta"},
}
TOLERANCE_KEYS = {"singular_floor", "covariance", "z_reduction"}
DEFAULT_TOLERANCES = {"singular_floor": None, "covariance": 1e-3, "z_reduction": 1e-8}
VERIFY_STATES = ("gaussian", "hermite1", "chirped")
DEFAULT_VERIFY_TIMES = (0.5, 0.8)


class ConfigError(Exception):
    """Configuration problem, reported with the offending field and line."""

    def __init__(self, message, field_name=None, line=None):
        self.field_name = field_name
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field_name is not None:
            where.append(f"field '{field_name}'")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


@dataclass
class RunConfig:
    hamiltonian: QuadraticHamiltonian
    echo: dict
    decay: dict = None
    times: list = None
    sweep: bool = False
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    grid: dict = field(default_factory=dict)
    verify: dict = field(default_factory=dict)
    seed: int = 0
    out_path: str = None
    out_format: str = None


# config parsing -------------------------------------------------------------

def _line_of(text, key):
    """Line of the first occurrence of ``"key"`` in the raw document, if any."""
    idx = text.find(f'"{key}"')
    return None if idx < 0 else text.count("\n", 0, idx) + 1


class _Reader:
    def __init__(self, text):
        self.text = text

    def fail(self, path, message):
        leaf = path.split(".")[-1] if path else None
        raise ConfigError(message, path, _line_of(self.text, leaf) if leaf else None)

    def number(self, obj, key, path, positive=False, default=None, allow_zero=False):
        if key not in obj:
            if default is None:
                self.fail(path, "is required")
            return default
        v = obj[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            self.fail(path, f"must be a finite number, got {v!r}")
        if positive and not (v > 0 or (allow_zero and v == 0)):
            self.fail(path, f"must be positive, got {v!r}")
        return float(v)

    def mapping(self, obj, key, path, required=True):
        if key not in obj:
            if required:
                self.fail(path, "is required")
            return None
        v = obj[key]
        if not isinstance(v, dict):
            self.fail(path, "must be an object")
        return v

    def only(self, obj, allowed, path):
        extra = sorted(set(obj) - set(allowed))
        if extra:
            sub = f"{path}.{extra[0]}" if path else extra[0]
            self.fail(sub, f"unknown key (allowed: {', '.join(sorted(allowed))})")


def _matrix_from_config(raw, rd):
    if not isinstance(raw, list) or not raw:
        rd.fail("hamiltonian.M", "must be a non-empty list")
    if all(isinstance(r, list) for r in raw):
        rows = raw
    elif any(isinstance(r, list) for r in raw):
        rd.fail("hamiltonian.M", "mixes nested and flat entries")
    else:
        k = math.isqrt(len(raw))
        if k * k != len(raw):
            rd.fail("hamiltonian.M", f"flat list of length {len(raw)} is not a square matrix")
        rows = [raw[i * k:(i + 1) * k] for i in range(k)]
    try:
        M = np.array(rows, dtype=float)
    except (TypeError, ValueError):
        rd.fail("hamiltonian.M", "entries must be numbers in rows of equal length")
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
        rd.fail("hamiltonian.M", f"must be square with even size, got shape {M.shape}")
    return M


def parse_config(text):
    """Parse a JSON run configuration into a :class:`RunConfig`.

    Raises
    ------
    ConfigError
        With line and field information for every structural or semantic problem.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", line=exc.lineno)
    if not isinstance(doc, dict):
        raise ConfigError("top level must be a JSON object", line=1)
    rd = _Reader(text)
    rd.only(doc, TOP_KEYS, "")

    norm = doc.get("normalization", "physical")
    if norm not in NORMALIZATIONS:
        rd.fail("normalization", f"must be one of {sorted(NORMALIZATIONS)}, got {norm!r}")
    analytic = norm != "physical"
    if "hbar" in doc:
        hbar = rd.number(doc, "hbar", "hbar", positive=True)
        if analytic and hbar != ANALYTIC_HBAR:
            rd.fail("hbar", f"{norm} normalization fixes hbar = 1")
    else:
        hbar = ANALYTIC_HBAR if analytic else 1.0

    ham = rd.mapping(doc, "hamiltonian", "hamiltonian")
    has_preset, has_m = "preset" in ham, "M" in ham
    if has_preset == has_m:
        rd.fail("hamiltonian", "give exactly one of 'preset' or 'M'")
    echo = {"normalization": norm, "hbar": hbar}
    if has_preset:
        rd.only(ham, {"preset", "params"}, "hamiltonian")
        name = ham["preset"]
        if name not in PRESET_KEYS:
            rd.fail("hamiltonian.preset", f"unknown preset {name!r}; expected one of {sorted(PRESET_KEYS)}")
        params = dict(rd.mapping(ham, "params", "hamiltonian.params", required=False) or {})
        rd.only(params, PRESET_KEYS[name], "hamiltonian.params")
        if analytic:
            if "m" in params and params["m"] != ANALYTIC_MASS:
                rd.fail("hamiltonian.params.m", f"{norm} normalization fixes m = 1/2")
            params["m"] = ANALYTIC_MASS
        if "m" in params:
            rd.number(params, "m", "hamiltonian.params.m", positive=True)
        try:
            H = preset(name, hbar=hbar, **params)
        except (ValidationError, DimensionError, KeyError, TypeError, ValueError) as exc:
            rd.fail("hamiltonian.params", str(exc))
        echo["hamiltonian"] = {"preset": name, "params": params, "resolved": H.params}
        echo["m"] = H.mass
    else:
        rd.only(ham, {"M", "mass"}, "hamiltonian")
        M = _matrix_from_config(ham["M"], rd)
        mass = rd.number(ham, "mass", "hamiltonian.mass", positive=True,
                         default=ANALYTIC_MASS if analytic else 1.0)
        try:
            H = QuadraticHamiltonian(M, hbar=hbar, mass=mass)
        except (ValidationError, DimensionError) as exc:
            rd.fail("hamiltonian.M", str(exc))
        echo["hamiltonian"] = {"M": M.tolist()}
        echo["m"] = mass

    cfg = RunConfig(hamiltonian=H, echo=echo)

    decay = rd.mapping(doc, "decay", "decay", required=False)
    if decay is not None:
        rd.only(decay, {"alpha", "beta", "K"}, "decay")
        cfg.decay = {
            "alpha": rd.number(decay, "alpha", "decay.alpha", positive=True),
            "beta": rd.number(decay, "beta", "decay.beta", positive=True),
            "K": rd.number(decay, "K", "decay.K", positive=True, default=1.0),
        }
        echo["decay"] = dict(cfg.decay)

    time = rd.mapping(doc, "time", "time", required=False)
    if time is not None:
        single, ranged = "T" in time, any(k in time for k in ("t_start", "t_end", "steps"))
        if single == ranged:
            rd.fail("time", "give either 'T' or 't_start', 't_end', 'steps'")
        if single:
            rd.only(time, {"T"}, "time")
            cfg.times = [rd.number(time, "T", "time.T")]
            echo["time"] = {"T": cfg.times[0]}
        else:
            rd.only(time, {"t_start", "t_end", "steps"}, "time")
            t0 = rd.number(time, "t_start", "time.t_start")
            t1 = rd.number(time, "t_end", "time.t_end")
            steps = time.get("steps")
            if isinstance(steps, bool) or not isinstance(steps, int):
                rd.fail("time.steps", f"must be an integer, got {steps!r}")
            if steps < 2:
                rd.fail("time.steps", f"must be >= 2, got {steps}")
            if not t1 > t0:
                rd.fail("time.t_end", "must exceed t_start")
            cfg.times = [float(t) for t in np.linspace(t0, t1, steps)]
            cfg.sweep = True
            echo["time"] = {"t_start": t0, "t_end": t1, "steps": steps}

    tols = rd.mapping(doc, "tolerances", "tolerances", required=False) or {}
    rd.only(tols, TOLERANCE_KEYS, "tolerances")
    for key in tols:
        cfg.tolerances[key] = rd.number(tols, key, f"tolerances.{key}", positive=True,
                                        allow_zero=(key == "singular_floor"))
    echo["tolerances"] = dict(cfg.tolerances)

    grid = rd.mapping(doc, "grid", "grid", required=False) or {}
    rd.only(grid, {"x_extent", "samples"}, "grid")
    cfg.grid = {"x_extent": rd.number(grid, "x_extent", "grid.x_extent", positive=True, default=12.0),
                "samples": int(grid.get("samples", 512))}
    try:
        GridSpec(1, cfg.grid["x_extent"], cfg.grid["samples"], hbar)
    except QuadHardyError as exc:
        rd.fail("grid.samples", str(exc))

    ver = rd.mapping(doc, "verify", "verify", required=False) or {}
    rd.only(ver, {"times", "states", "z_samples", "z_scale"}, "verify")
    states = ver.get("states", ["gaussian", "hermite1"])
    if not isinstance(states, list) or any(s not in VERIFY_STATES for s in states):
        rd.fail("verify.states", f"must be a list drawn from {list(VERIFY_STATES)}")
    vtimes = ver.get("times")
    if vtimes is not None:
        if not isinstance(vtimes, list) or not all(
                isinstance(t, (int, float)) and not isinstance(t, bool) for t in vtimes):
            rd.fail("verify.times", "must be a list of numbers")
        vtimes = [float(t) for t in vtimes]
    z_samples = ver.get("z_samples", 100)
    if isinstance(z_samples, bool) or not isinstance(z_samples, int) or z_samples < 0:
        rd.fail("verify.z_samples", "must be a nonnegative integer")
    cfg.verify = {"times": vtimes, "states": states, "z_samples": z_samples,
                  "z_scale": rd.number(ver, "z_scale", "verify.z_scale", positive=True, default=1.0)}

    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        rd.fail("seed", "must be a nonnegative integer")
    cfg.seed = seed
    echo["seed"] = seed

    out = rd.mapping(doc, "output", "output", required=False) or {}
    rd.only(out, {"path", "format"}, "output")
    cfg.out_path = out.get("path")
    cfg.out_format = out.get("format")
    if cfg.out_format not in (None, "csv", "json"):
        rd.fail("output.format", "must be 'csv' or 'json'")
    return cfg


# formatting -----------------------------------------------------------------

def fmt(v):
    """Numbers with 17 significant digits, empty cell for ``None``."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, str):
        return v
    return format(float(v), ".17g")


def _header_lines(echo):
    return [f"# {key}={json.dumps(echo[key], sort_keys=True)}" for key in sorted(echo)]


def _csv(echo, columns, rows):
    buf = io.StringIO(newline="")
    for line in _header_lines(echo):
        buf.write(line + "\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(row[c]) for c in columns) + "\n")
    return buf.getvalue()


def _json(payload):
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


# commands -------------------------------------------------------------------

def _decay_for(cfg, T, required):
    if cfg.decay is None:
        if required:
            raise ConfigError("is required for this command", "decay")
        return DecayPair(1.0, 1.0, T)
    return DecayPair(cfg.decay["alpha"], cfg.decay["beta"], T, cfg.decay["K"])


def run_analyze(cfg, fmt_name):
    if cfg.times is None or cfg.sweep:
        raise ConfigError("analyze needs a single time {'T': ...}", "time")
    T = cfg.times[0]
    decay = _decay_for(cfg, T, required=True)
    S = flow(cfg.hamiltonian, T).S
    cert = certificate_from_flow(S, cfg.hamiltonian.hbar, decay, cfg.tolerances["singular_floor"])
    if fmt_name == "csv":
        cols = ["T", "det_B", "opnorm_sq", "product", "verdict", "ill_conditioned"]
        row = {"T": cert.T, "det_B": cert.det_B, "opnorm_sq": cert.opnorm_sq,
               "product": cert.product, "verdict": cert.verdict.value,
               "ill_conditioned": cert.ill_conditioned}
        return _csv(cfg.echo, cols, [row]), EXIT_OK
    return _json({"parameters": cfg.echo, "certificate": cert.to_dict()}), EXIT_OK


SWEEP_COLUMNS = ["t", "det_B", "opnorm_sq", "critical_alpha_beta", "verdict"]


def sweep_rows(cfg):
    rows = []
    hbar = cfg.hamiltonian.hbar
    for t in cfg.times:
        S = flow(cfg.hamiltonian, t).S
        free, det_b = is_free(S, cfg.tolerances["singular_floor"])
        norm_sq = opnorm_sq(S.B)
        critical = 1.0 / ((2.0 * hbar) ** 2 * norm_sq) if free else None
        decay = _decay_for(cfg, t, required=False)
        product = (2.0 * hbar) ** 2 * norm_sq * decay.alpha * decay.beta if free else None
        rows.append({"t": t, "det_B": det_b, "opnorm_sq": norm_sq,
                     "critical_alpha_beta": critical, "verdict": decide(product, free).value})
    return rows


def run_sweep(cfg, fmt_name):
    if cfg.times is None or not cfg.sweep:
        raise ConfigError("sweep needs {'t_start', 't_end', 'steps'}", "time")
    echo = dict(cfg.echo)
    if cfg.decay is None:
        echo["decay"] = {"alpha": 1.0, "beta": 1.0, "K": 1.0, "default": True}
    rows = sweep_rows(cfg)
    if fmt_name == "json":
        return _json({"parameters": echo, "rows": rows}), EXIT_OK
    return _csv(echo, SWEEP_COLUMNS, rows), EXIT_OK


def _state(name, spec):
    x = spec.x
    if name == "gaussian":
        u = np.exp(-x**2 / 2)
    elif name == "hermite1":
        u = x * np.exp(-x**2 / 2)
    else:
        u = np.exp(-x**2 / 2 + 0.5j * x)
    return u.astype(complex)


def verify_checks(cfg):
    """Run the grid covariance and block-identity suites; return check records."""
    H = cfg.hamiltonian
    checks = []
    times = cfg.verify["times"] or cfg.times or list(DEFAULT_VERIFY_TIMES)
    ctol = cfg.tolerances["covariance"]
    ztol = cfg.tolerances["z_reduction"]

    if H.n != 1:
        checks.append({"check": "covariance", "state": None, "t": None, "status": "skipped",
                       "residual": None, "tolerance": ctol,
                       "reason": "grid covariance check supports n = 1 only"})
    else:
        spec = GridSpec(1, cfg.grid["x_extent"], cfg.grid["samples"], H.hbar)
        for t in times:
            S = flow(H, t).S
            free, det_b = is_free(S, cfg.tolerances["singular_floor"])
            identity = t == 0
            for name in cfg.verify["states"]:
                rec = {"check": "covariance", "state": name, "t": t, "tolerance": ctol,
                       "residual": None, "reason": None}
                if not (free or identity):
                    rec.update(status="skipped", reason=f"flow is not free at t (|det B| = {det_b:.3e})")
                else:
                    try:
                        r = covariance_check(_state(name, spec), H, t, spec)
                        rec.update(residual=r, status="passed" if r <= ctol else "failed")
                    except AliasingError as exc:
                        rec.update(status="failed", reason=str(exc))
                checks.append(rec)

    for t in times:
        rec = {"check": "z_reduction_flow", "state": None, "t": t, "tolerance": ztol,
               "residual": None, "reason": None}
        Sinv = symplectic_inverse(flow(H, t).S)
        if not is_free(Sinv, cfg.tolerances["singular_floor"])[0]:
            rec.update(status="skipped", reason="inverse flow is not free at t")
        else:
            try:
                r = z_reduction(Sinv).residual
                rec.update(residual=r, status="passed" if r <= ztol else "failed")
            except (ValidationError, NotFreeError) as exc:
                rec.update(status="failed", reason=str(exc))
        checks.append(rec)

    worst, failures, used = 0.0, 0, 0
    k = 0
    while used < cfg.verify["z_samples"] and k < 10 * cfg.verify["z_samples"] + 10:
        S = random_symplectic(cfg.seed + k, H.n, cfg.verify["z_scale"])
        k += 1
        if not is_free(S)[0]:
            continue
        used += 1
        try:
            r = z_reduction(symplectic_inverse(S)).residual
        except ValidationError:
            failures += 1
            continue
        worst = max(worst, r)
        failures += r > ztol
    if cfg.verify["z_samples"]:
        checks.append({"check": "z_reduction_random", "state": None, "t": None,
                       "tolerance": ztol, "residual": worst,
                       "status": "passed" if failures == 0 else "failed",
                       "reason": f"{used} seeded free matrices, n = {H.n}, {failures} failures"})
    return checks


VERIFY_COLUMNS = ["check", "state", "t", "status", "residual", "tolerance"]


def run_verify(cfg, fmt_name):
    checks = verify_checks(cfg)
    ok = all(c["status"] != "failed" for c in checks)
    code = EXIT_OK if ok else EXIT_VERIFY
    if fmt_name == "csv":
        return _csv(cfg.echo, VERIFY_COLUMNS, checks), code
    return _json({"parameters": cfg.echo, "passed": ok, "checks": checks}), code


COMMANDS = {
    "analyze": (run_analyze, "json"),
    "sweep": (run_sweep, "csv"),
    "verify": (run_verify, "json"),
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="quadhardy",
        description="Hardy-type uniqueness certificates for quadratic Schrödinger evolutions.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "analyze": "certificate at a single time T",
        "sweep": "det B, ||B||_op^2 and the critical alpha*beta over a time grid",
        "verify": "grid covariance and block-identity checks",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", help="output file (default: config output.path or stdout)")
        p.add_argument("--format", choices=("csv", "json"), help="output format")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    runner, default_fmt = COMMANDS[args.command]
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = parse_config(text)
        fmt_name = args.format or cfg.out_format or default_fmt
        out_path = args.out or cfg.out_path
        body, code = runner(cfg, fmt_name)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericOverflowError, NotSymplecticError, FloatingPointError,
            np.linalg.LinAlgError, ValueError, ArithmeticError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)
    return code


if __name__ == "__main__":
    sys.exit(main())
