"""Experiment drivers, config files, and CSV result persistence.

Four experiments are exposed through one row-oriented result schema
(``experiment,K,combiner,mode,metric,value,stderr,seed``):

fig1   amplifier transfer curves |g(u)| versus input amplitude
fig2   distortion powers after MR combining versus number of UEs:
       closed forms and their Monte Carlo counterparts, normalized by
       the noise power
fig3   ergodic SE per UE versus number of UEs for DA-MMSE / DA-MR,
       with the distortion covariance taken in full or approximated as
       diagonal
sweep  plain ergodic-SE grid over (K, combiner, mode) for the base
       scenario

Config files are flat UTF-8 ``key = value`` pairs (``#`` comments); key
names equal the ScenarioConfig / ExperimentSpec field names. Every
emitted row carries the master seed, and rerunning a spec reproduces
the CSV byte for byte except the leading timestamp line.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .channel import (
    COMBINERS,
    DIAG_SCOPES,
    DISTORTION_MODES,
    ScenarioConfig,
    sample_channel,
)
from .closedform import (
    distortion_ratio,
    lemma2_correlated,
    lemma2_uncorrelated,
    ue_distortion_moment,
)
from .errors import ConfigError
from .hardware import (
    amplifier_gain_coeff,
    bussgang_gain_third_order,
    distortion_covariance_third_order,
)
from .numerics import RngStream
from .se import ErgodicResult, ergodic_se

EXPERIMENTS = ("fig1", "fig2", "fig3", "sweep")

CSV_HEADER = ("experiment", "K", "combiner", "mode", "metric", "value", "stderr", "seed")


@dataclass(frozen=True)
class ResultRow:
    """One CSV output cell; ``stderr`` is None for exact (closed-form) values."""

    experiment: str
    K: int
    combiner: str
    mode: str
    metric: str
    value: float
    stderr: float | None
    seed: int


@dataclass(frozen=True)
class ExperimentSpec:
    """A parsed experiment: which driver to run and with what scenario."""

    experiment: str
    base: ScenarioConfig
    K_grid: tuple[int, ...] = tuple(range(1, 21))
    combiners: tuple[str, ...] = ("DA-MMSE", "DA-MR")
    output_path: str | None = None
    alpha_list: tuple[float, ...] = (1.0 / 3.0, 0.1340)
    n_points: int = 101

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(
                f"invalid experiment: expected one of {EXPERIMENTS}, got {self.experiment!r}"
            )
        if len(self.K_grid) == 0:
            raise ConfigError("invalid K_grid: must be non-empty")
        if any(k < 1 for k in self.K_grid):
            raise ConfigError("invalid K_grid: entries must be >= 1")
        if any(b >= a for a, b in zip(self.K_grid[1:], self.K_grid[:-1])):
            raise ConfigError("invalid K_grid: must be strictly increasing")
        for c in self.combiners:
            if c not in COMBINERS:
                raise ConfigError(f"invalid combiners: {c!r} not in {COMBINERS}")
        if self.n_points < 2:
            raise ConfigError("invalid n_points: need at least 2 samples")

    @property
    def diag_scope(self) -> str:
        return self.base.diag_scope


# config-file keys -> (target, parser); target "spec" lands on
# ExperimentSpec, "base" on the embedded ScenarioConfig.
def _parse_int(key, text):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"invalid {key}: expected an integer, got {text!r}") from None


def _parse_float(key, text):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"invalid {key}: expected a number, got {text!r}") from None


def _parse_choice(options):
    def parse(key, text):
        if text not in options:
            raise ConfigError(f"invalid {key}: expected one of {options}, got {text!r}")
        return text

    return parse


def _parse_int_grid(key, text):
    """Comma list ("1,2,5") or inclusive range ("1..10")."""
    text = text.strip()
    if ".." in text:
        lo, _, hi = text.partition("..")
        return tuple(range(_parse_int(key, lo), _parse_int(key, hi) + 1))
    return tuple(_parse_int(key, part.strip()) for part in text.split(","))


def _parse_float_list(key, text):
    return tuple(_parse_float(key, part.strip()) for part in text.split(","))


def _parse_str_list(key, text):
    return tuple(part.strip() for part in text.split(","))


_CONFIG_KEYS = {
    "experiment": ("spec", _parse_choice(EXPERIMENTS)),
    "K_grid": ("spec", _parse_int_grid),
    "combiners": ("spec", _parse_str_list),
    "output_path": ("spec", lambda key, text: text),
    "alpha_list": ("spec", _parse_float_list),
    "n_points": ("spec", _parse_int),
    "M": ("base", _parse_int),
    "K": ("base", _parse_int),
    "p": ("base", _parse_float),
    "sigma2": ("base", _parse_float),
    "alpha": ("base", _parse_float),
    "boff_db": ("base", _parse_float),
    "kappa": ("base", _parse_float),
    "combiner": ("base", _parse_choice(COMBINERS)),
    "distortion_mode": ("base", _parse_choice(DISTORTION_MODES)),
    "diag_scope": ("base", _parse_choice(DIAG_SCOPES)),
    "trials": ("base", _parse_int),
    "seed": ("base", _parse_int),
    "pathloss": ("base", _parse_float_list),
}

_REQUIRED_KEYS = ("experiment",)


def parse_config(path) -> ExperimentSpec:
    """Read and validate a flat key=value experiment config.

    Unknown keys are rejected, and every validation error names the
    offending key and the expected range. All unspecified keys fall back
    to the documented defaults (worst-case amplifier alpha=1/3 with 7 dB
    back-off, kappa=0.99, 0 dB SNR, 2000 trials).
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    spec_kwargs: dict = {}
    base_kwargs: dict = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        if key not in _CONFIG_KEYS:
            raise ConfigError(
                f"{path}:{lineno}: unknown key {key!r} (known: {sorted(_CONFIG_KEYS)})"
            )
        target, parser = _CONFIG_KEYS[key]
        parsed = parser(key, value)
        (spec_kwargs if target == "spec" else base_kwargs)[key] = parsed
    missing = [k for k in _REQUIRED_KEYS if k not in spec_kwargs]
    if missing:
        raise ConfigError(
            f"{path}: missing required key(s) {missing}; "
            f"a config needs at least: {', '.join(_REQUIRED_KEYS)}"
        )
    return ExperimentSpec(base=ScenarioConfig(**base_kwargs), **spec_kwargs)


def default_spec(experiment: str, **base_overrides) -> ExperimentSpec:
    """Spec with all documented defaults for the given experiment."""
    return ExperimentSpec(experiment=experiment, base=ScenarioConfig(**base_overrides))


# ---------------------------------------------------------------------------
# fig1: amplifier transfer curves


def run_fig1(
    alpha_list=(1.0 / 3.0, 0.1340),
    boff_db: float = 0.0,
    n_points: int = 101,
    seed: int = 0,
) -> list[ResultRow]:
    """AM-AM curves |g(u)| = u |1 - a u^2| on normalized amplitudes [0, 1].

    The coefficient is a = alpha / b_off for unit mean input power. A
    linear reference curve (alpha = 0) is always included. Rows come in
    (input_amplitude, output_amplitude) pairs keyed by the sample index
    in the K column and the alpha tag in the combiner column.
    """
    b = 10.0 ** (boff_db / 10.0)
    u = np.linspace(0.0, 1.0, int(n_points))
    rows: list[ResultRow] = []
    for alpha in (0.0, *alpha_list):
        a = alpha / b
        out = u * np.abs(1.0 - a * u**2)
        tag = "linear" if alpha == 0.0 else f"alpha={alpha:g}"
        for i, (ui, oi) in enumerate(zip(u, out)):
            rows.append(ResultRow("fig1", i, tag, "", "input_amplitude", float(ui), None, seed))
            rows.append(ResultRow("fig1", i, tag, "", "output_amplitude", float(oi), None, seed))
    return rows


# ---------------------------------------------------------------------------
# fig2: distortion powers under MR combining


def sample_distortion_moments(
    M: int,
    K: int,
    alpha: float,
    boff_db: float,
    p: float,
    trials: int,
    seed: int,
) -> dict[str, np.ndarray]:
    """Monte Carlo oracle for the closed-form distortion moments.

    Per trial, a fresh channel is drawn, the analytic gain and distortion
    covariance are formed, and the MR-combined quadratic forms are
    averaged over UEs:

        corr    mean_k h_k^H C_eta h_k / M
        uncorr  mean_k h_k^H diag(C_eta) h_k / M
        ue      mean_k |h_k^H D h_k|^2 / M

    Returns per-trial arrays so callers can attach standard errors.
    """
    cfg = ScenarioConfig(M=M, K=K, p=p, alpha=alpha, boff_db=boff_db, trials=trials, seed=seed)
    a = amplifier_gain_coeff(alpha, boff_db, p, K)
    corr = np.empty(trials)
    uncorr = np.empty(trials)
    ue = np.empty(trials)
    for t in range(trials):
        chan = sample_channel(cfg, RngStream(seed, t))
        H = chan.H
        C_eta = distortion_covariance_third_order(a, chan.C_uu)
        gains = bussgang_gain_third_order(a, chan.C_uu)
        quad = np.real(np.einsum("mk,mn,nk->k", H.conj(), C_eta, H))
        corr[t] = quad.mean() / M
        diag = np.real(np.diagonal(C_eta))
        uncorr[t] = float(np.mean(diag @ (np.abs(H) ** 2))) / M
        ue[t] = float(np.mean(np.abs(gains @ (np.abs(H) ** 2)) ** 2)) / M
    return {"corr": corr, "uncorr": uncorr, "ue": ue}


def run_fig2(spec: ExperimentSpec) -> list[ResultRow]:
    """Distortion powers versus K: closed forms and sampled counterparts.

    All values are normalized by the noise power. Metrics with suffix
    ``_db`` are the same value in decibels; ``_mc`` marks Monte Carlo
    estimates (with standard errors).
    """
    cfg = spec.base
    rows: list[ResultRow] = []
    ue_scale = cfg.p * (1.0 - cfg.kappa)
    for K in spec.K_grid:
        corr = lemma2_correlated(cfg.alpha, cfg.boff_db, cfg.p, cfg.M, K) / cfg.sigma2
        unc = lemma2_uncorrelated(cfg.alpha, cfg.boff_db, cfg.p, K) / cfg.sigma2
        ue = ue_scale * ue_distortion_moment(cfg.alpha, cfg.boff_db, cfg.M, K) / cfg.sigma2

        def row(metric, value, stderr=None, mode="closed_form"):
            rows.append(ResultRow("fig2", K, "MR", mode, metric, value, stderr, cfg.seed))

        row("bs_distortion_corr", corr)
        row("bs_distortion_corr_db", _to_db(corr))
        row("bs_distortion_uncorr", unc)
        row("bs_distortion_uncorr_db", _to_db(unc))
        row("ue_distortion", ue)
        row("ue_distortion_db", _to_db(ue))
        row("corr_gap_db", _to_db(distortion_ratio(cfg.M, K)))

        mc = sample_distortion_moments(
            cfg.M, K, cfg.alpha, cfg.boff_db, cfg.p, cfg.trials, cfg.seed
        )
        for metric, series, scale in (
            ("bs_distortion_corr_mc", mc["corr"], 1.0 / cfg.sigma2),
            ("bs_distortion_uncorr_mc", mc["uncorr"], 1.0 / cfg.sigma2),
            ("ue_distortion_mc", mc["ue"], ue_scale / cfg.sigma2),
        ):
            vals = series * scale
            row(metric, float(vals.mean()), _stderr(vals), mode="monte_carlo")
    return rows


# ---------------------------------------------------------------------------
# fig3 / sweep: ergodic SE


def run_fig3(spec: ExperimentSpec, n_threads: int = 1) -> list[ResultRow]:
    """Ergodic SE per UE versus K for each combiner and distortion mode.

    For every (K, combiner) pair both the exact run (full distortion
    covariance) and the approximate run (diagonal covariance, scope per
    ``diag_scope``) are executed on the same channel realizations, and
    their paired relative gap (SE_diag - SE_full) / SE_full is emitted
    as an extra ``se_rel_gap`` row.
    """
    rows: list[ResultRow] = []
    cfg = spec.base
    for K in spec.K_grid:
        for comb in spec.combiners:
            results: dict[str, ErgodicResult] = {}
            for mode in DISTORTION_MODES:
                cell = cfg.with_updates(K=K, combiner=comb, distortion_mode=mode)
                res = ergodic_se(cell, n_threads=n_threads)
                results[mode] = res
                rows.append(
                    ResultRow(
                        spec.experiment, K, comb, mode, "se_per_ue",
                        res.mean_se, res.mean_se_stderr, cfg.seed,
                    )
                )
            full, diag = results["full"], results["diagonal"]
            gap = (diag.mean_se - full.mean_se) / full.mean_se
            paired = diag.trial_mean_se - full.trial_mean_se
            gap_err = _stderr(paired)
            gap_err = gap_err / full.mean_se if gap_err is not None else None
            rows.append(
                ResultRow(
                    spec.experiment, K, comb, "diag_vs_full", "se_rel_gap",
                    gap, gap_err, cfg.seed,
                )
            )
    return rows


def run_sweep(spec: ExperimentSpec, n_threads: int = 1) -> list[ResultRow]:
    """Plain ergodic-SE grid over (K, combiner, mode), no gap rows."""
    rows: list[ResultRow] = []
    cfg = spec.base
    for K in spec.K_grid:
        for comb in spec.combiners:
            for mode in DISTORTION_MODES:
                cell = cfg.with_updates(K=K, combiner=comb, distortion_mode=mode)
                res = ergodic_se(cell, n_threads=n_threads)
                rows.append(
                    ResultRow(
                        "sweep", K, comb, mode, "se_per_ue",
                        res.mean_se, res.mean_se_stderr, cfg.seed,
                    )
                )
    return rows


def run_experiment(spec: ExperimentSpec, n_threads: int = 1) -> list[ResultRow]:
    if spec.experiment == "fig1":
        return run_fig1(spec.alpha_list, spec.base.boff_db, spec.n_points, spec.base.seed)
    if spec.experiment == "fig2":
        return run_fig2(spec)
    if spec.experiment == "fig3":
        return run_fig3(spec, n_threads=n_threads)
    return run_sweep(spec, n_threads=n_threads)


# ---------------------------------------------------------------------------
# CSV persistence


def format_rows(rows, timestamp: str | None = None) -> str:
    """Render rows as CSV text with a leading timestamp comment line."""
    if timestamp is None:
        timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    buf = io.StringIO()
    buf.write(f"# generated {timestamp}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow(
            (
                r.experiment,
                r.K,
                r.combiner,
                r.mode,
                r.metric,
                repr(float(r.value)),
                "" if r.stderr is None else repr(float(r.stderr)),
                r.seed,
            )
        )
    return buf.getvalue()


def write_rows(rows, path, timestamp: str | None = None) -> None:
    path = Path(path)
    try:
        path.write_text(format_rows(rows, timestamp), encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot write results to {path}: {err}") from err


def _to_db(x: float) -> float:
    return 10.0 * float(np.log10(x))


def _stderr(values: np.ndarray) -> float | None:
    if values.size < 2:
        return None
    return float(np.std(values, ddof=1) / np.sqrt(values.size))
