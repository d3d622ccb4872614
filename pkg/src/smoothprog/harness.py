"""Experiment configuration, modulus families, equidistribution discrepancies and
reproducible output bundles."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.stats import kendalltau

from . import __version__
from .errors import ConfigError, NumericalError
from .primes import largest_prime_factor

EXPERIMENTS = ("equidist", "classify", "checkers", "charsum", "constants")


def worker_count() -> int:
    """Worker pool bound from ``SMOOTHPROG_THREADS`` (default 1)."""
    raw = os.environ.get("SMOOTHPROG_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"SMOOTHPROG_THREADS must be an integer, got {raw!r}") from exc
    return max(1, n)


def ordered_map(fn, items):
    """``map`` over a bounded thread pool; results come back in input order."""
    items = list(items)
    n = worker_count()
    if n == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def fmt(v) -> str:
    """Fixed 17-significant-digit rendering used in every output file."""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


# -- configuration ------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    experiments: list = field(default_factory=lambda: ["equidist"])
    x: list = field(default_factory=lambda: [10**4, 10**5, 10**6])
    y: float = 1000.0
    y_rule: str = "fixed"                 # "fixed" or "q_power" (y = q^(1/A))
    family: dict = field(default_factory=lambda: {"kind": "explicit", "values": [4]})
    A: float = 4 * math.sqrt(math.e)
    D: float = 10.0
    T_max: float = 50.0
    c1: float = 0.1
    c2: float = 0.05
    eps: float = 1e-3
    c3: float = 1.0
    e0: float = 1000.0
    nu: float = 0.5
    tau: float = 0.1
    C1: float = 1e3
    C2: float = 2.0
    tau_A: float = 2.0
    charsum_N: list = field(default_factory=lambda: [100, 1000])
    output_dir: str = "out"
    seed: int = 0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        bad = [e for e in self.experiments if e not in EXPERIMENTS]
        if bad:
            raise ConfigError(f"unknown experiments {bad}; choose from {EXPERIMENTS}")
        if self.y_rule not in ("fixed", "q_power"):
            raise ConfigError("y_rule must be 'fixed' or 'q_power'")
        if any(float(v) < 1 for v in self.x):
            raise ConfigError("every x must be at least 1")
        if self.A <= 0 or self.D < 0 or self.T_max <= 0:
            raise ConfigError("need A > 0, D >= 0, T_max > 0")
        if "kind" not in self.family:
            raise ConfigError("family needs a 'kind'")

    def normalized(self) -> dict:
        d = asdict(self)
        d.pop("output_dir")
        return json.loads(json.dumps(d, sort_keys=True))

    def echo(self) -> str:
        return json.dumps({"config": self.normalized(), "version": __version__}, sort_keys=True)

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path, overrides=()) -> "ExperimentConfig":
        text = Path(path).read_text(encoding="utf-8")
        data = parse_config_text(text)
        apply_overrides(data, overrides)
        return cls.from_mapping(data)


def _parse_value(raw: str):
    raw = raw.strip()
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def parse_config_text(text: str) -> dict:
    """JSON object, or ``key = value`` lines (``#`` comments, dotted keys for nesting)."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad JSON config: {exc}") from exc
        return data
    data: dict = {}
    for num, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {num}: expected key = value")
        key, val = line.split("=", 1)
        _set_dotted(data, key.strip(), _parse_value(val))
    return data


def _set_dotted(data: dict, key: str, value) -> None:
    parts = key.split(".")
    cur = data
    for p in parts[:-1]:
        cur = cur.setdefault(p, {})
        if not isinstance(cur, dict):
            raise ConfigError(f"cannot nest into {key!r}")
    cur[parts[-1]] = value


def apply_overrides(data: dict, overrides) -> None:
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, val = item.split("=", 1)
        _set_dotted(data, key.strip(), _parse_value(val))


# -- modulus families ----------------------------------------------------------------------

def family_generate(kind: str, **bounds) -> list:
    """Moduli in a fixed order.

    ``prime_power``: ``p^n`` for ``n_min <= n <= n_max``.
    ``smooth``: ``q <= q_max`` with ``P(q)^Q < q``.
    ``explicit``: ``values`` as given.
    ``exceptional``: moduli ``q <= q_max`` of real primitive characters, by increasing ``L(1, chi)``
    (the ``count`` smallest).
    """
    if kind == "prime_power":
        p, n_max = int(bounds["p"]), int(bounds["n_max"])
        return [p**n for n in range(int(bounds.get("n_min", 1)), n_max + 1)]
    if kind == "smooth":
        Q, q_max = float(bounds["Q"]), int(bounds["q_max"])
        q_min = int(bounds.get("q_min", 2))
        if q_max <= 10**7:
            from .sieve import build_table
            P = build_table(q_max).lpf.astype(np.float64)
            q = np.arange(q_max + 1, dtype=np.float64)
            ok = P**Q < q
            ok[:q_min] = False
            return [int(v) for v in np.flatnonzero(ok)]
        return [q for q in range(q_min, q_max + 1) if largest_prime_factor(q) ** Q < q]
    if kind == "explicit":
        return [int(v) for v in bounds["values"]]
    if kind == "exceptional":
        return _exceptional_candidates(int(bounds["q_max"]), int(bounds.get("count", 5)))
    raise ConfigError(f"unknown family kind {kind!r}")


def _exceptional_candidates(q_max: int, count: int) -> list:
    from .characters import character_group
    from .lfunction.values import l_value

    scored = []
    for q in range(3, q_max + 1):
        for chi in character_group(q).characters():
            if chi.order == 2 and chi.is_primitive():
                scored.append((float(np.real(l_value(chi, 1.0))), q))
    scored.sort()
    return [q for _, q in scored[:count]]


def family_density(Q: float, X: int) -> float:
    return len(family_generate("smooth", Q=Q, q_max=X)) / X


# -- range labels ------------------------------------------------------------------------

@dataclass(frozen=True)
class RangeLabels:
    y_label: str
    k0: int
    sqrt_u: float
    half_log_q: float
    k_labels: dict

    def k_label(self, k: float) -> str:
        return _k_label(k, self.k0, self.sqrt_u, self.half_log_q)


def y_label(log_x: float, y: float) -> str:
    """``very small`` below ``(log log x)^3``, else ``large`` above ``exp((log x)^0.1)``, else ``small``.

    The two cutoffs cross near ``log x = 4.9e9``; below that the ``very small``
    test wins, so the labels still run very small -> small -> large in ``y``.
    """
    if log_x <= 1:
        return "large"
    if y < math.log(log_x) ** 3:
        return "very small"
    if math.log(y) > log_x ** 0.1:
        return "large"
    return "small"


def _k_label(k, k0, sqrt_u, half_log_q) -> str:
    if k < k0:
        return "problem"
    if k < sqrt_u:
        return "rodosskii"
    if k <= half_log_q:
        return "basic"
    return "beyond"


def label_ranges(x=None, y=None, q: int = 1, u: float | None = None, A: float = 4 * math.sqrt(math.e),
                 D: float = 10.0, *, log_x: float | None = None) -> RangeLabels:
    from .lfunction.checks import k0_value

    if log_x is None:
        log_x = math.log(x)
    if u is None:
        u = log_x / math.log(y)
    k0 = k0_value(A, D)
    half = 0.5 * math.log(q) if q > 1 else 0.0
    su = math.sqrt(u)
    labels = {k: _k_label(k, k0, su, half) for k in range(0, int(math.floor(half)) + 1)}
    return RangeLabels(y_label(log_x, y), k0, su, half, labels)


# -- discrepancy ----------------------------------------------------------------------------

@dataclass
class DiscrepancyReport:
    q: int
    x: float
    y: float
    u: float
    v: float
    residues: list
    counts: list
    psi_q: int
    delta: float
    argmax: int
    y_label: str
    k_labels: dict

    def row(self):
        classes = ";".join(f"{a}:{c}" for a, c in zip(self.residues, self.counts))
        return [self.q, fmt(self.x), fmt(self.y), fmt(self.u), fmt(self.v), self.psi_q,
                fmt(self.delta), self.argmax, self.y_label, classes]


DISCREPANCY_COLUMNS = ("q", "x", "y", "u", "v", "psi_q", "delta", "argmax", "y_label", "class_counts")


def delta_from_counts(counts, psi_q: int, phi: int):
    """``max_a |phi c_a / psi_q - 1|`` evaluated exactly; returns (float, index of max)."""
    best, arg = Fraction(-1), -1
    for i, c in enumerate(counts):
        d = abs(Fraction(phi * int(c) - psi_q, psi_q))
        if d > best:
            best, arg = d, i
    return float(best), arg


def discrepancy(table, x, y, q: int, A: float = 4 * math.sqrt(math.e), D: float = 10.0) -> DiscrepancyReport:
    from .sieve import class_counts

    q = int(q)
    counts = class_counts(table, x, y, q)
    residues = [r for r in range(q) if math.gcd(r, q) == 1]
    cu = [int(counts[r]) for r in residues]
    psi_q = sum(cu)
    if psi_q == 0:
        raise NumericalError("discrepancy undefined: no smooth numbers coprime to q", x=x, y=y, q=q)
    delta, i = delta_from_counts(cu, psi_q, len(residues))
    log_x = math.log(x)
    u = log_x / math.log(y) if y > 1 else math.inf
    v = log_x / math.log(q) if q > 1 else math.inf
    labels = label_ranges(q=q, y=y, u=u, A=A, D=D, log_x=log_x)
    return DiscrepancyReport(q, float(x), float(y), u, v, residues, cu, psi_q, delta, residues[i],
                             labels.y_label, {str(k): s for k, s in labels.k_labels.items()})


@dataclass
class TrendReport:
    q: int
    y: float
    reports: list
    tau: float

    @property
    def deltas(self):
        return [r.delta for r in self.reports]


def trend_statistic(log_x, deltas) -> float:
    """Kendall tau of ``delta`` against ``log x``; ``0`` for a constant series."""
    d = np.asarray(deltas, dtype=np.float64)
    if d.size < 2 or np.all(d == d[0]):
        return 0.0
    tau = kendalltau(np.asarray(log_x, dtype=np.float64), d).statistic
    return 0.0 if not np.isfinite(tau) else float(tau)


def trend(table, xs, y, q: int, A: float = 4 * math.sqrt(math.e), D: float = 10.0) -> TrendReport:
    xs = sorted(xs)
    reps = ordered_map(lambda x: discrepancy(table, x, y, q, A, D), xs)
    return TrendReport(int(q), float(y), reps, trend_statistic([math.log(x) for x in xs], [r.delta for r in reps]))


# -- run ------------------------------------------------------------------------------------

OUTPUT_FILES = ("equidist.csv", "trend.csv", "classify.jsonl", "checkers.jsonl", "zeros.csv",
                "charsum.csv", "constants.jsonl")


@dataclass
class RunResult:
    files: dict
    errors: list

    @property
    def exit_code(self) -> int:
        return 0 if not self.errors else 3

    def digest(self) -> str:
        h = hashlib.sha256()
        for name in sorted(self.files):
            h.update(name.encode())
            h.update(self.files[name].encode("utf-8"))
        return h.hexdigest()


def _csv_text(echo: str, header, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# {echo}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def _jsonl_text(echo: str, records) -> str:
    return "".join(line + "\n" for line in [echo, *records])


def _y_for(cfg: ExperimentConfig, q: int) -> float:
    return float(cfg.y) if cfg.y_rule == "fixed" else float(q) ** (1.0 / cfg.A)


def run(cfg: ExperimentConfig, write: bool = True) -> RunResult:
    """Run the selected experiments; every file starts with the config echo."""
    from .charsum import RATIO_COLUMNS, chang_ratio, compute_thresholds
    from .characters import character_group
    from .lfunction import checks
    from .lfunction.zeros import ZERO_COLUMNS
    from .sieve import build_table

    echo = cfg.echo()
    errors: list = []
    fam = family_generate(cfg.family["kind"], **{k: v for k, v in cfg.family.items() if k != "kind"})
    eq_rows, trend_rows, cls_recs, chk_recs, zero_rows, cs_rows, const_recs = [], [], [], [], [], [], []

    if "equidist" in cfg.experiments and cfg.x:
        table = build_table(int(max(cfg.x)))
        for q in fam:
            y = _y_for(cfg, q)
            try:
                tr = trend(table, cfg.x, y, q, cfg.A, cfg.D)
            except NumericalError as exc:
                errors.append(f"equidist q={q}: {exc}")
                continue
            for rep in tr.reports:
                eq_rows.append(rep.row())
            trend_rows.append([q, y, len(tr.reports), tr.tau])

    if "classify" in cfg.experiments:
        def one(q):
            c = checks.classify(q, cfg.A, cfg.D, cfg.T_max, cfg.tau_A)
            d = checks.density_count_check(q, cfg.T_max, cfg.C1, cfg.C2, classification=c)
            return c, d
        for q, (c, d) in zip(fam, ordered_map(one, fam)):
            cls_recs.append(json.dumps(c.to_dict(), sort_keys=True, default=checks._jsonable))
            chk_recs.append(d.to_json())

    if "checkers" in cfg.experiments:
        def run_checks(q):
            out = [checks.zero_free_region_check(q, cfg.c1, cfg.T_max)]
            if q > 1:
                out.append(checks.deuring_heilbronn_check(q, cfg.eps, cfg.c2, cfg.T_max))
            for chi in character_group(q).characters():
                if chi.is_primitive() and not chi.is_principal:
                    out.append(checks.gulp_region_check(chi, 40000.0, cfg.T_max))
            return out
        for reps in ordered_map(run_checks, fam):
            for r in reps:
                chk_recs.append(r.to_json())
                for z in r.zeros:
                    zero_rows.append([z.label, z.beta, z.gamma, z.box_radius, z.winding])

    if "charsum" in cfg.experiments:
        for q in fam:
            if q < 16:
                continue
            params = compute_thresholds(q, cfg.nu, cfg.tau, cfg.c3, cfg.e0)
            for chi in character_group(q).characters():
                if chi.is_principal or not chi.is_primitive():
                    continue
                for N in cfg.charsum_N:
                    cs_rows.append(chang_ratio(chi, int(N), params).row())

    if "constants" in cfg.experiments:
        tc = checks.theorem1_constants(cfg.A, cfg.D)
        const_recs.append(json.dumps(asdict(tc), sort_keys=True))

    zero_rows.sort(key=lambda r: (r[0], r[2], r[1]))
    files = {
        "equidist.csv": _csv_text(echo, DISCREPANCY_COLUMNS, eq_rows),
        "trend.csv": _csv_text(echo, ("q", "y", "points", "kendall_tau"), trend_rows),
        "classify.jsonl": _jsonl_text(echo, cls_recs),
        "checkers.jsonl": _jsonl_text(echo, chk_recs),
        "zeros.csv": _csv_text(echo, ZERO_COLUMNS, zero_rows),
        "charsum.csv": _csv_text(echo, RATIO_COLUMNS, cs_rows),
        "constants.jsonl": _jsonl_text(echo, const_recs),
    }
    if write:
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            (out / name).write_text(text, encoding="utf-8")
    return RunResult(files, errors)


def bundle_digest(directory) -> str:
    h = hashlib.sha256()
    for name in sorted(OUTPUT_FILES):
        p = Path(directory) / name
        h.update(name.encode())
        h.update(p.read_bytes())
    return h.hexdigest()
