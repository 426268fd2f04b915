"""Regime sweeps over N, scaling-exponent fits, validation suites, CSV output.

A sweep evaluates a set of quantities (global/local QFI, first-moment
uncertainties, perturbative values, closed forms) on a grid of probe numbers
N for one or more named (delta, epsilon) regimes, then fits log-log slopes
over the upper half of the N grid.  Per-point failures become row flags,
never crashes: regimes that legitimately destroy sensitivity (e.g. full
dephasing at eps*t*x = pi/2) are data.

Output ordering is deterministic (sorted by quantity, regime, N) regardless
of how many workers computed the points, so identical configs give
byte-identical CSV files.
"""

from __future__ import annotations

import concurrent.futures
import math
import re
from dataclasses import dataclass, replace

import numpy as np

from . import fullspace, paulis, perturb, zzzz_exact
from .dynamics import ModelKind, ModelSpec, propagate
from .fisher import (
    Param,
    first_moment_uncertainty,
    global_qfi_fd,
    local_qfi_fd,
    reduce_to_bus,
)
from .states import DEFAULT_ANGLES, StateAngles

KNOWN_QUANTITIES = (
    "global_qfi", "local_qfi", "first_moment", "pt1", "pt2",
    "closed_form", "hl_condition", "appendix_fm", "local_qfi_closed",
)


class FitDomainError(ValueError):
    """Raised when a log-log fit window has too few or nonpositive values."""


@dataclass(frozen=True)
class Regime:
    """Named (delta, epsilon) pair; alpha optionally overrides the probe angle."""

    name: str
    delta: float
    epsilon: float
    alpha: float | None = None


@dataclass(frozen=True)
class SweepConfig:
    kind: ModelKind
    param: Param
    regimes: tuple
    n_list: tuple
    angles: StateAngles = DEFAULT_ANGLES
    quantities: tuple = ()
    observable: str = "xz"
    omega0: float = 1.0
    omega1: float = 1.0
    x: float = 1.0
    t: float = 1.0
    m_measurements: int = 1
    out: str | None = None
    workers: int = 1
    seed: int = 0

    def __post_init__(self):
        ns = tuple(int(n) for n in self.n_list)
        if any(n < 1 for n in ns):
            raise ValueError("N values must be positive integers")
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("N list must be strictly increasing")
        object.__setattr__(self, "n_list", ns)
        for q in self.quantities:
            if q not in KNOWN_QUANTITIES:
                raise ValueError(f"unknown quantity {q!r}; known: {KNOWN_QUANTITIES}")
        if self.observable not in paulis.NAMED_OBSERVABLES:
            raise ValueError(f"unknown observable {self.observable!r}")


@dataclass(frozen=True)
class Row:
    n: int
    quantity: str
    regime: str
    value: float
    flag: str = ""


@dataclass(frozen=True)
class FitRow:
    quantity: str
    regime: str
    n_min: int
    n_max: int
    exponent: float
    stderr: float


@dataclass(frozen=True)
class ScanResult:
    rows: tuple
    fits: tuple


def _spec_for(config: SweepConfig, regime: Regime) -> ModelSpec:
    return ModelSpec(kind=config.kind, delta=regime.delta, epsilon=regime.epsilon,
                     omega0=config.omega0, omega1=config.omega1,
                     x=config.x, t=config.t)


def _angles_for(config: SweepConfig, regime: Regime) -> StateAngles:
    if regime.alpha is None:
        return config.angles
    return replace(config.angles, alpha=regime.alpha)


def _evaluate_point(config: SweepConfig, regime: Regime, quantity: str, n: int) -> Row:
    spec = _spec_for(config, regime)
    angles = _angles_for(config, regime)
    sel = config.param
    obs = paulis.NAMED_OBSERVABLES[config.observable]
    try:
        if quantity == "global_qfi":
            r = global_qfi_fd(spec, n, angles, sel)
            flag = "ill_conditioned" if r.ill_conditioned else ""
            return Row(n, quantity, regime.name, r.value, flag)
        if quantity == "local_qfi":
            r = local_qfi_fd(spec, n, angles, sel)
            flag = "ill_conditioned" if r.ill_conditioned else ""
            return Row(n, quantity, regime.name, r.value, flag)
        if quantity == "first_moment":
            r = first_moment_uncertainty(spec, n, angles, sel, obs,
                                         config.m_measurements)
            return Row(n, quantity, regime.name, r.inv_squared,
                       "insensitive" if r.insensitive else "")
        if quantity == "pt1":
            if sel is Param.X:
                r = perturb.pt1_qfi_x(spec, n, angles)
            elif sel is Param.OMEGA1:
                r = perturb.pt1_qfi_omega1(spec, n, angles)
            else:
                return Row(n, quantity, regime.name, math.nan, "unsupported")
            return Row(n, quantity, regime.name, r.value)
        if quantity == "pt2":
            if sel is Param.OMEGA0:
                return Row(n, quantity, regime.name, math.nan, "unsupported")
            r = perturb.pt2_qfi_zeroth(spec, n, angles, sel)
            return Row(n, quantity, regime.name, r.value)
        if quantity == "closed_form":
            return Row(n, quantity, regime.name,
                       zzzz_exact.global_qfi_closed(spec, n, angles, sel))
        if quantity == "hl_condition":
            return Row(n, quantity, regime.name, perturb.hl_condition(spec, n, angles))
        if quantity == "appendix_fm":
            r = perturb.appendix_local_uncertainty(spec, n, angles, obs, sel,
                                                   m_measurements=config.m_measurements)
            flag = r.flag or ("insensitive" if r.insensitive else "")
            return Row(n, quantity, regime.name, r.inv_squared, flag)
        if quantity == "local_qfi_closed":
            return Row(n, quantity, regime.name,
                       zzzz_exact.local_qfi_x_closed(spec, n, angles))
        return Row(n, quantity, regime.name, math.nan, "unsupported")
    except Exception as err:  # per-point failures are data, not crashes
        return Row(n, quantity, regime.name, math.nan,
                   f"error:{type(err).__name__}")


def _eval_task(args):
    return _evaluate_point(*args)


def run_sweep(config: SweepConfig) -> ScanResult:
    """Evaluate every requested quantity at every (regime, N) grid point and
    fit log-log exponents over the upper half of the N grid."""
    tasks = [(config, regime, quantity, n)
             for quantity in config.quantities
             for regime in config.regimes
             for n in config.n_list]
    if config.workers > 1 and len(tasks) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(_eval_task, tasks, chunksize=4))
    else:
        rows = [_eval_task(t) for t in tasks]
    rows.sort(key=lambda r: (r.quantity, r.regime, r.n))

    fits = []
    window = default_fit_window(config.n_list)
    if window is not None:
        for quantity in config.quantities:
            for regime in config.regimes:
                try:
                    exponent, stderr = fit_scaling(rows, quantity, regime.name, window)
                except FitDomainError:
                    continue
                fits.append(FitRow(quantity, regime.name, window[0], window[1],
                                   exponent, stderr))
    fits.sort(key=lambda f: (f.quantity, f.regime))
    return ScanResult(rows=tuple(rows), fits=tuple(fits))


def default_fit_window(n_list) -> tuple | None:
    """Upper half of the (log-spaced) N grid; asymptotic slopes should not be
    contaminated by small-N points."""
    if len(n_list) < 3:
        return None
    upper = n_list[len(n_list) // 2:]
    if len(upper) < 3:
        upper = n_list[-3:]
    return (upper[0], upper[-1])


def fit_scaling(rows, quantity: str, regime: str, window) -> tuple:
    """Least-squares slope of log(value) vs log(N) with its standard error.

    Rows carrying a flag are excluded; remaining values must be finite and
    positive and at least three, otherwise FitDomainError is raised.
    """
    n_min, n_max = window
    pts = [(r.n, r.value) for r in rows
           if r.quantity == quantity and r.regime == regime
           and n_min <= r.n <= n_max and not r.flag]
    if any(not math.isfinite(v) or v <= 0.0 for _, v in pts):
        raise FitDomainError(
            f"nonpositive or non-finite values in fit window for {quantity}/{regime}")
    if len(pts) < 3:
        raise FitDomainError(
            f"need >= 3 usable points in window for {quantity}/{regime}, got {len(pts)}")
    log_n = np.log([p[0] for p in pts])
    log_v = np.log([p[1] for p in pts])
    design = np.vstack([log_n, np.ones_like(log_n)]).T
    coef, *_ = np.linalg.lstsq(design, log_v, rcond=None)
    slope, intercept = float(coef[0]), float(coef[1])
    residuals = log_v - (slope * log_n + intercept)
    dof = len(pts) - 2
    if dof > 0:
        s_sq = float(residuals @ residuals) / dof
        denom = float(np.sum((log_n - log_n.mean()) ** 2))
        stderr = math.sqrt(s_sq / denom) if denom > 0 else math.inf
    else:
        stderr = math.inf
    return slope, stderr


def emit_csv(result: ScanResult, path: str) -> None:
    """Write rows to `path` and fits to `path`.fits.csv, floats at 17
    significant digits (lossless round-trip for doubles)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("N,quantity,regime,value,flag\n")
        for r in result.rows:
            fh.write(f"{r.n},{r.quantity},{r.regime},{r.value:.17g},{r.flag}\n")
    with open(f"{path}.fits.csv", "w", encoding="utf-8") as fh:
        fh.write("quantity,regime,n_min,n_max,exponent,stderr\n")
        for f in result.fits:
            fh.write(f"{f.quantity},{f.regime},{f.n_min},{f.n_max},"
                     f"{f.exponent:.17g},{f.stderr:.17g}\n")


def parse_csv(path: str) -> list:
    """Read back an emitted CSV as Row objects (bit-identical values)."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "N,quantity,regime,value,flag":
            raise ValueError(f"unexpected CSV header {header!r}")
        for line in fh:
            n, quantity, regime, value, flag = line.rstrip("\n").split(",")
            rows.append(Row(int(n), quantity, regime, float(value), flag))
    return rows


# --------------------------------------------------------------------------
# config file parsing: plain declarative key = value lines
# --------------------------------------------------------------------------

_PI_PATTERN = re.compile(r"^(-?[\d.]*)\s*\*?\s*pi\s*(?:/\s*([\d.]+))?$")


def parse_number(text: str) -> float:
    """Float literal or simple pi expression: 'pi', '3pi/8', '-pi/4', '0.5'."""
    text = text.strip().lower()
    match = _PI_PATTERN.match(text)
    if match:
        coef = match.group(1)
        value = math.pi * (float(coef) if coef not in ("", "-") else
                           (-1.0 if coef == "-" else 1.0))
        if match.group(2):
            value /= float(match.group(2))
        return value
    return float(text)


def _parse_n_list(text: str):
    parts = text.split()
    if parts and parts[0] == "log":
        lo, hi, count = int(parts[1]), int(parts[2]), int(parts[3])
        grid = np.unique(np.round(np.logspace(math.log10(lo), math.log10(hi),
                                              count)).astype(int))
        return tuple(int(n) for n in grid if n >= 1)
    return tuple(int(p) for p in parts)


def _parse_regime(text: str) -> Regime:
    name, _, body = text.partition(":")
    fields = {}
    for item in body.split(","):
        key, _, val = item.partition("=")
        fields[key.strip()] = parse_number(val)
    return Regime(name=name.strip(), delta=fields.get("delta", 1.0),
                  epsilon=fields.get("epsilon", 1.0),
                  alpha=fields.get("alpha"))


def parse_config(text: str) -> SweepConfig:
    """Parse the plain key = value sweep-config format; '#' starts a comment.

    Recognized keys: model, param, regime (repeatable), alphas
    (``linspace lo hi count``, expands into one regime per probe angle),
    nlist (explicit integers or ``log lo hi count``), alpha/phi/beta/varphi,
    omega0/omega1/x/t, quantities, observable, measurements, out, workers,
    seed.
    """
    values: dict = {"regimes": []}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not _:
            raise ValueError(f"expected 'key = value', got {raw!r}")
        if key == "regime":
            values["regimes"].append(_parse_regime(val))
        else:
            values[key] = val

    kind = ModelKind(values.get("model", "zzxx").upper())
    param = Param[values.get("param", "x").upper()]
    angles = StateAngles(
        alpha=parse_number(values.get("alpha", "pi/3")),
        phi=parse_number(values.get("phi", "3pi/8")),
        beta=parse_number(values.get("beta", "pi/6")),
        varphi=parse_number(values.get("varphi", "5pi/8")),
    )
    regimes = list(values["regimes"])
    if "alphas" in values:
        parts = values["alphas"].split()
        if parts[0] != "linspace":
            raise ValueError("alphas supports: linspace <lo> <hi> <count>")
        lo, hi, count = parse_number(parts[1]), parse_number(parts[2]), int(parts[3])
        base = regimes[0] if regimes else Regime("grid", 1.0, 1.0)
        regimes = [replace(base, name=f"alpha={a:.10g}", alpha=float(a))
                   for a in np.linspace(lo, hi, count)]
    if not regimes:
        regimes = [Regime("default", 1.0, 1.0)]

    return SweepConfig(
        kind=kind, param=param, regimes=tuple(regimes),
        n_list=_parse_n_list(values.get("nlist", "log 1 100 10")),
        angles=angles,
        quantities=tuple(values.get("quantities", "global_qfi").split()),
        observable=values.get("observable", "xz"),
        omega0=parse_number(values.get("omega0", "1")),
        omega1=parse_number(values.get("omega1", "1")),
        x=parse_number(values.get("x", "1")),
        t=parse_number(values.get("t", "1")),
        m_measurements=int(values.get("measurements", "1")),
        out=values.get("out"),
        workers=int(values.get("workers", "1")),
        seed=int(values.get("seed", "0")),
    )


# --------------------------------------------------------------------------
# validation suites
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    details: str


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _fit_loglog(xs, ys) -> float:
    lx, ly = np.log(xs), np.log(ys)
    design = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(design, ly, rcond=None)
    return float(coef[0])


def _suite_cubic_residual() -> list:
    """Residual |I_exact - I_pt| must scale as the cube of the small parameter."""
    checks = []
    grid = np.logspace(-3, -1, 7)
    for label, sel, fld, pt_fn in (
            ("eps", Param.X, "epsilon", perturb.pt1_qfi_x),
            ("delta", Param.OMEGA1, "delta", perturb.pt1_qfi_omega1)):
        residuals = []
        for v in grid:
            spec = ModelSpec(ModelKind.ZZXX, **{fld: float(v)})
            exact = global_qfi_fd(spec, 4, DEFAULT_ANGLES, sel).value_check
            residuals.append(abs(exact - pt_fn(spec, 4, DEFAULT_ANGLES).value))
        slope = _fit_loglog(grid, np.array(residuals))
        checks.append(CheckResult("a", f"cubic-residual-{label}",
                                  abs(slope - 3.0) <= 0.2, f"slope={slope:.3f}"))
    return checks


def _suite_fd_two_step() -> list:
    """Two-step derivative agreement across the sweep regimes.

    Configurations whose QFI has effectively vanished (below 1e-6) cannot be
    finite-differenced to three digits in double precision; those must carry
    the ill-conditioned flag instead of being silently reported.  All
    resolvable configurations must agree to 1e-3.
    """
    worst = 0.0
    flagged_vanishing = 0
    silent_violations = []
    configs = []
    for sel, regimes in ((Param.X, ((1.0, 0.001), (1.0, 1.0), (1.0, 100.0))),
                         (Param.OMEGA1, ((100.0, 1.0), (1.0, 1.0), (0.001, 1.0))),
                         (Param.OMEGA0, ((100.0, 1.0), (1.0, 1.0), (0.001, 1.0)))):
        for delta, eps in regimes:
            for n in (4, 32, 128):
                configs.append((sel, delta, eps, n))
    for sel, delta, eps, n in configs:
        spec = ModelSpec(ModelKind.ZZXX, delta=delta, epsilon=eps)
        res = global_qfi_fd(spec, n, DEFAULT_ANGLES, sel)
        if res.relative_discrepancy < 1e-3:
            worst = max(worst, res.relative_discrepancy)
        elif res.ill_conditioned and max(res.value, res.value_check) < 1e-6:
            flagged_vanishing += 1
        else:
            silent_violations.append((sel.field, delta, eps, n,
                                      res.relative_discrepancy))
    return [CheckResult("b", "fd-two-step-agreement", not silent_violations,
                        f"worst resolvable discrepancy={worst:.2e} over "
                        f"{len(configs)} configs; {flagged_vanishing} "
                        f"vanishing-QFI configs flagged; "
                        f"unflagged violations: {silent_violations or 'none'}")]


def _suite_full_hilbert() -> list:
    """Symmetric-sector pipeline against dense full-space computations."""
    checks = []
    angles = DEFAULT_ANGLES
    state_dev = 0.0
    rho_dev = 0.0
    qfi_dev = 0.0
    for kind in (ModelKind.ZZZZ, ModelKind.ZZXX, ModelKind.ZZZX):
        for n in (3, 6, 8):
            spec = ModelSpec(kind)
            psi = propagate(spec, n, angles)
            full0 = fullspace.product_state_full(n, angles.alpha, angles.phi,
                                                 angles.beta, angles.varphi)
            hfull = fullspace.hamiltonian_full(str(kind), n, spec.delta,
                                               spec.epsilon, spec.omega0,
                                               spec.omega1, spec.x)
            psi_full = fullspace.propagate_full(hfull, spec.t, full0)
            proj = fullspace.project_symmetric(psi_full, n)
            state_dev = max(state_dev, float(np.max(np.abs(proj - psi.amplitudes))))
            rho_dev = max(rho_dev, float(np.max(np.abs(
                fullspace.bus_density(psi_full) - reduce_to_bus(psi).rho))))
            if n == 6:
                params = dict(delta=1.0, epsilon=1.0, omega0=1.0, omega1=1.0,
                              x=1.0, t=1.0)
                for sel in (Param.X, Param.OMEGA1):
                    mine = global_qfi_fd(spec, n, angles, sel).value_check
                    ref = fullspace.global_qfi_full(str(kind), n, params,
                                                    sel.field, angles.alpha,
                                                    angles.phi, angles.beta,
                                                    angles.varphi)
                    qfi_dev = max(qfi_dev, abs(mine - ref) / max(abs(ref), 1e-30))
    checks.append(CheckResult("c", "full-hilbert-states", state_dev < 1e-8,
                              f"max amplitude deviation={state_dev:.2e}"))
    checks.append(CheckResult("c", "full-hilbert-bus-density", rho_dev < 1e-10,
                              f"max element deviation={rho_dev:.2e}"))
    checks.append(CheckResult("c", "full-hilbert-qfi", qfi_dev < 1e-6,
                              f"max relative deviation={qfi_dev:.2e}"))
    return checks


def _suite_closed_forms(seed: int) -> list:
    """ZZZZ numerical pipeline against the closed forms, random angles."""
    rng = np.random.default_rng(seed)
    worst_global = 0.0
    worst_rho = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 65))
        angles = StateAngles(alpha=rng.uniform(0.05, math.pi / 2 - 0.05),
                             phi=rng.uniform(0, 2 * math.pi),
                             beta=rng.uniform(0.05, math.pi / 2 - 0.05),
                             varphi=rng.uniform(0, 2 * math.pi))
        spec = ModelSpec(ModelKind.ZZZZ, delta=rng.uniform(0.5, 2.0),
                         epsilon=rng.uniform(0.5, 2.0), x=rng.uniform(0.5, 2.0),
                         t=rng.uniform(0.5, 2.0))
        for sel in (Param.X, Param.OMEGA1, Param.OMEGA0):
            closed = zzzz_exact.global_qfi_closed(spec, n, angles, sel)
            numeric = global_qfi_fd(spec, n, angles, sel).value
            worst_global = max(worst_global,
                               abs(numeric - closed) / max(abs(closed), 1e-12))
        rho_c = zzzz_exact.reduced_rho_closed(spec, n, angles).rho
        rho_n = reduce_to_bus(propagate(spec, n, angles)).rho
        worst_rho = max(worst_rho, float(np.max(np.abs(rho_c - rho_n))))
    return [
        CheckResult("d", "zzzz-global-closed-forms", worst_global < 1e-6,
                    f"worst relative deviation={worst_global:.2e} (20 configs)"),
        CheckResult("d", "zzzz-reduced-density", worst_rho < 1e-10,
                    f"worst element deviation={worst_rho:.2e}"),
    ]


def validate(suites: str = "all", seed: int = 20260808) -> ValidationReport:
    """Run the requested validation suites:

    a: cubic scaling of the perturbation-theory residual,
    b: two-step finite-difference agreement scan,
    c: full-Hilbert oracle comparison (N <= 8),
    d: ZZZZ closed forms vs the numerical pipeline.
    """
    checks = []
    if suites in ("a", "all"):
        checks += _suite_cubic_residual()
    if suites in ("b", "all"):
        checks += _suite_fd_two_step()
    if suites in ("c", "all"):
        checks += _suite_full_hilbert()
    if suites in ("d", "all"):
        checks += _suite_closed_forms(seed)
    if not checks:
        raise ValueError(f"unknown suite {suites!r}; use a, b, c, d or all")
    return ValidationReport(checks=tuple(checks))
