"""Desk-scale experiment suite with reproducible CSV output.

Every file starts with one ``# config: {...}`` comment line holding the full
configuration (seed included), followed by a mandatory header row.  Output is
a pure function of the configuration.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import checks
from .blocks import BlockPartition, split
from .channel import ChannelConfig, trial_rng
from .ep import EpCode, ep_decode, ep_encode
from .field import ScalarMode
from .padic import NeedMoreRows, decode, encode_all, generate_codebook, split_for_code
from .simulation import achievability_sweep, estimate_threshold, make_scheme


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    schemes: list[str] = field(default_factory=lambda: ["alloy", "ep"])
    x: int = 4
    y: int = 4
    z: int = 2
    P: int = 100
    S: int = 100
    Q: int = 100
    q: int | None = 101
    p_f: float = 0.0
    epsilon: float = 0.05
    trials: int = 1000
    seed: int = 0
    n: int | None = None
    delta: int = 7
    rate_fraction: float = 0.9
    sizes: list[int] = field(default_factory=lambda: [16, 64, 256])
    decomp: str | None = None
    out: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            cfg = cls(**data)
        except TypeError as e:
            raise ConfigError(str(e)) from e
        cfg.validate()
        return cfg

    @staticmethod
    def read(path) -> dict:
        """Raw key/value pairs from a JSON config file."""
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
        if data.get("q") == "real":
            data["q"] = None
        return data

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_dict(cls.read(path))

    def validate(self) -> None:
        for name in ("x", "y", "z", "P", "S", "Q", "trials"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if not 0.0 <= self.p_f <= 1.0:
            raise ConfigError("p_f must lie in [0, 1]")
        if not 0.0 < self.epsilon < 1.0:
            raise ConfigError("epsilon must lie in (0, 1)")
        if self.n is not None and self.n < 1:
            raise ConfigError("n must be >= 1")
        if self.delta < 0:
            raise ConfigError("delta must be >= 0")
        try:
            self.mode
        except ValueError as e:
            raise ConfigError(str(e)) from e

    @property
    def mode(self) -> ScalarMode:
        return ScalarMode.real() if self.q is None else ScalarMode.finite(self.q)

    def to_json(self) -> str:
        """Experiment settings as compact JSON; the output path is not part of them."""
        data = dataclasses.asdict(self)
        del data["out"]
        return json.dumps(data, sort_keys=True, separators=(",", ":"))


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def write_csv(config: ExperimentConfig, header: list[str], rows: list[list], command: str) -> str:
    """Render rows as CSV text (LF endings) and write it to ``config.out`` if set."""
    buf = io.StringIO()
    buf.write(f"# config: {{\"command\":\"{command}\",\"config\":{config.to_json()}}}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    text = buf.getvalue()
    if config.out:
        with open(config.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


THRESHOLD_HEADER = ["scheme", "x", "y", "z", "q", "p_f", "epsilon", "trials", "threshold", "ci95", "seed"]


def cmd_threshold(config: ExperimentConfig) -> str:
    rows = []
    q = "real" if config.q is None else config.q
    for name in config.schemes:
        scheme = make_scheme(name, config.x, config.y, config.z, config.mode)
        est = estimate_threshold(scheme, config.p_f, config.epsilon, config.trials, config.seed)
        rows.append([name, config.x, config.y, config.z, q, config.p_f, config.epsilon,
                     config.trials, est.threshold, round(est.ci95, 6), config.seed])
    return write_csv(config, THRESHOLD_HEADER, rows, "threshold")


COMPARE_HEADER = ["scheme", "n", "trial", "success", "workers_used", "sim_time"]


def compare_rows(config: ExperimentConfig) -> list[list]:
    if len(config.schemes) < 2:
        raise ConfigError("compare needs at least two schemes")
    schemes = [make_scheme(s, config.x, config.y, config.z, config.mode) for s in config.schemes]
    channel = ChannelConfig(config.p_f)
    equal_n = config.n if config.n is not None else max(s.min_workers for s in schemes)
    settings = [(s, equal_n) for s in schemes]
    for s in schemes:
        est = estimate_threshold(s, config.p_f, config.epsilon, config.trials, config.seed)
        if est.found:
            settings.append((s, est.threshold + config.delta))
    rows = []
    for scheme, n in settings:
        outcomes = [scheme.simulate(n, channel, trial_rng(config.seed, i)) for i in range(config.trials)]
        for i, o in enumerate(outcomes):
            rows.append([scheme.name, n, i, o.success, o.workers_used, round(o.sim_time, 9)])
        rows.append([
            scheme.name, n, "median",
            round(float(np.mean([o.success for o in outcomes])), 6),
            float(np.median([o.workers_used for o in outcomes])),
            round(float(np.median([o.sim_time for o in outcomes])), 9),
        ])
    return rows


def cmd_compare(config: ExperimentConfig) -> str:
    return write_csv(config, COMPARE_HEADER, compare_rows(config), "compare")


STABILITY_HEADER = ["scheme", "x", "y", "trial", "log10_rel_err"]


def _rel_err(C_hat: np.ndarray, C: np.ndarray) -> float:
    err = np.linalg.norm(C_hat - C) / np.linalg.norm(C)
    return float(np.log10(err)) if err > 0 else -math.inf


def stability_trial(scheme: str, x: int, y: int, P: int, S: int, Q: int, rng: np.random.Generator) -> float:
    """log10 relative error of one real-valued decode from exactly threshold results."""
    mode = ScalarMode.real()
    data_rng, code_rng = rng.spawn(2)
    A = data_rng.standard_normal((x * P, S))
    B = data_rng.standard_normal((S, y * Q))
    C = A @ B
    if scheme == "global-padic":
        cb = generate_codebook(x * y, x, y, mode, code_rng)
        Ab, Bb = split_for_code(A, B, x, y)
        At, Bt = encode_all(cb, Ab, Bb)
        returned = [(k, At[k] @ Bt[k]) for k in range(cb.n)]
        try:
            C_hat = decode(cb, returned)
        except NeedMoreRows:
            return math.inf
    elif scheme == "ep":
        code = EpCode(x, y, 1, x * y, mode)
        part = BlockPartition.fit(A, B, x, y, 1)
        Ag, Bg = split(A, "A", part).blocks, split(B, "B", part).blocks
        returned = [(k, mode.matmul(*ep_encode(code, Ag, Bg, k))) for k in range(code.workers)]
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                C_hat = ep_decode(code, returned)
        except np.linalg.LinAlgError:
            return math.inf
    else:
        raise ConfigError(f"stability supports global-padic and ep, not {scheme!r}")
    return _rel_err(C_hat, C)


def stability_rows(config: ExperimentConfig) -> list[list]:
    if config.z != 1:
        raise ConfigError("stability compares 2-D codes; set z = 1")
    rows = []
    for name in config.schemes:
        name = "global-padic" if name.startswith("alloy") else name
        for i in range(config.trials):
            err = stability_trial(name, config.x, config.y, config.P, config.S, config.Q, trial_rng(config.seed, i))
            rows.append([name, config.x, config.y, i, round(err, 9)])
    return rows


def cmd_stability(config: ExperimentConfig) -> str:
    return write_csv(config, STABILITY_HEADER, stability_rows(config), "stability")


SWEEP_HEADER = ["size", "x", "y", "n", "rate_fraction", "p_f", "q", "failures", "trials", "failure_prob", "seed"]


def cmd_sweep(config: ExperimentConfig) -> str:
    if config.q is None:
        raise ConfigError("the achievability sweep runs over a finite field")
    rows = []
    for r in achievability_sweep(config.p_f, config.rate_fraction, config.sizes, config.trials, config.seed, config.q):
        rows.append([r.size, r.x, r.y, r.n, config.rate_fraction, config.p_f, config.q,
                     r.failures, r.trials, round(r.failure_probability, 9), config.seed])
    return write_csv(config, SWEEP_HEADER, rows, "sweep")


def cmd_verify(config: ExperimentConfig) -> tuple[bool, str]:
    results = checks.run_all(seed=config.seed, decomp_path=config.decomp)
    lines = [str(r) for r in results]
    ok = all(r.passed for r in results)
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    return ok, "\n".join(lines) + "\n"
