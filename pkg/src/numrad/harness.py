"""Seeded verification campaigns over the bound evaluators.

A campaign draws random inputs per bound, evaluates the bound, computes the
certified radius (or the generalized-radius estimate) on the contract side,
and records tightness ratios and violations. Everything is deterministic in
the master seed: each trial derives its own stream, records are emitted in
trial-index order, and serialized reports are byte-identical across runs
and across any number of worker threads.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from time import perf_counter

import numpy as np

from .bounds import (
    BOUND_IDS,
    bound_main1,
    bound_main3,
    bound_main4,
    bound_main11,
    bound_main11_young,
    bound_product_xy,
    bound_sum_norm,
    bound_th1,
    main4_operands,
)
from .ensembles import RngStream, derive, sample
from .errors import NumradError, UnknownBoundError
from .funcpair import HolderPair, power_pair
from .linalg import adjoint, as_matrix, embed_block, embed_offdiag, fn_of_abs, spectral_norm
from .radius import omega, omega_p

FORMAT_VERSION = "numrad-report/1"

_CSV_COLUMNS = ("trial", "bound_id", "m", "n", "r", "alpha", "p", "q",
                "value", "omega_lo", "omega_hi", "ratio", "violation", "seed_path")

_OFFDIAG_IDS = ("main1.v1", "main1.v2", "main11.v1", "main11.v2",
                "main11.young.v1", "main11.young.v2", "main3.v1", "main3.v2")
_OMEGA_P_IDS = ("main4.v1", "main4.v2", "th1")

DEFAULT_ROLES = {
    "x": "ginibre",
    "y": "ginibre",
    "contraction": "contraction",
    "block": "ginibre",
    "normal": "normal",
}


@dataclass
class CampaignConfig:
    """Everything a campaign needs; two equal configs give identical reports."""

    bound_ids: tuple = BOUND_IDS
    dims: tuple = ((1, 1), (2, 2), (2, 3), (3, 3), (4, 4), (8, 8))
    trials: int | None = None          # per combination; None picks the smallest
    min_trials_per_bound: int = 500    # count reaching this per-bound total
    r_values: tuple = (1.0, 1.5, 2.0, 3.0)
    alpha_values: tuple = (0.0, 0.25, 0.5, 0.75, 1.0)
    holder_p_values: tuple = (1.25, 2.0, 4.0)
    omega_p_p_values: tuple = (1.0, 2.0, 3.0)
    n_operators_values: tuple = (1, 2, 4)
    ensembles: dict = field(default_factory=lambda: dict(DEFAULT_ROLES))
    master_seed: int = 0
    omega_tol: float = 1e-6            # relative to max(1, scale) per trial
    slack: float = 1e-8                # violation slack epsilon_rel
    constant_mode: str = "as_proved"
    omega_p_restarts: int = 4
    omega_p_max_iter: int = 120
    zeta_restarts: int = 6
    jobs: int = 1
    extra_trials: tuple = ()           # (bound_id, params dict, mats dict) triples


def default_config(master_seed: int = 0, **overrides) -> CampaignConfig:
    """The default campaign: every bound id, dims up to 8, full sweeps."""
    return CampaignConfig(master_seed=master_seed, **overrides)


@dataclass
class TrialRecord:
    """One evaluated (input, bound) pair with its contract check."""

    index: int
    bound_id: str
    params: dict
    digests: tuple
    value: float | None
    exponent: float | None
    omega_lo: float | None
    omega_hi: float | None
    ratio: float | None
    violation: bool
    seed_path: str
    error: str | None = None
    wall_time: float = 0.0  # in-memory only; reports must be byte-identical


@dataclass
class CampaignReport:
    """Config echo, per-bound summaries, and the flagged records."""

    format_version: str
    config: dict
    summary: dict
    violations: list
    errors: list
    records: list


def _digest(mat: np.ndarray) -> str:
    m = np.ascontiguousarray(np.asarray(mat, dtype=np.complex128))
    h = hashlib.sha256()
    h.update(str(m.shape).encode())
    h.update(m.tobytes())
    return h.hexdigest()[:16]


def _combos(bound_id: str, config: CampaignConfig) -> list[dict]:
    out = []
    if bound_id in ("main1.v1", "main1.v2", "main3.v1", "main3.v2"):
        for (m, n) in config.dims:
            for r in config.r_values:
                for alpha in config.alpha_values:
                    out.append({"m": m, "n": n, "r": r, "alpha": alpha})
    elif bound_id in ("main11.v1", "main11.v2", "main11.young.v1", "main11.young.v2"):
        for (m, n) in config.dims:
            for r in config.r_values:
                for alpha in config.alpha_values:
                    for p in config.holder_p_values:
                        out.append({"m": m, "n": n, "r": r, "alpha": alpha,
                                    "p": p, "q": p / (p - 1.0)})
    elif bound_id == "product_xy":
        for (m, _n) in config.dims:
            for r in config.r_values:
                for alpha in config.alpha_values:
                    out.append({"m": m, "n": m, "r": r, "alpha": alpha})
    elif bound_id == "sum_norm":
        for (m, n) in config.dims:
            for r in config.r_values:
                for sign in ("+", "-"):
                    out.append({"m": m, "n": n, "r": r, "sign": sign})
    elif bound_id == "sum_norm.normal":
        for (m, _n) in config.dims:
            for r in config.r_values:
                for sign in ("+", "-"):
                    out.append({"m": m, "n": m, "r": r, "sign": sign})
    elif bound_id in ("main4.v1", "main4.v2"):
        for (m, n) in config.dims:
            for p in config.omega_p_p_values:
                for k in config.n_operators_values:
                    for alpha in config.alpha_values:
                        out.append({"m": m, "n": n, "p": p, "n_operators": k,
                                    "alpha": alpha})
    elif bound_id == "th1":
        for (m, n) in config.dims:
            for p in config.omega_p_p_values:
                for k in config.n_operators_values:
                    out.append({"m": m, "n": n, "p": p, "n_operators": k})
    else:
        raise UnknownBoundError(f"unknown bound id {bound_id!r}")
    return out


def _build_plan(config: CampaignConfig) -> list[tuple[str, dict, dict | None]]:
    plan: list[tuple[str, dict, dict | None]] = []
    for bound_id in config.bound_ids:
        combos = _combos(bound_id, config)
        per = config.trials if config.trials is not None else \
            max(1, math.ceil(config.min_trials_per_bound / max(1, len(combos))))
        for combo in combos:
            for rep in range(per):
                plan.append((bound_id, dict(combo, replica=rep), None))
    for bound_id, params, mats in config.extra_trials:
        plan.append((bound_id, dict(params), dict(mats)))
    return plan


def _sample_mats(bound_id: str, params: dict, config: CampaignConfig,
                 stream: RngStream) -> dict:
    roles = config.ensembles
    m, n = params["m"], params["n"]
    if bound_id in _OFFDIAG_IDS:
        return {"x": sample(roles["x"], m, n, derive(stream, 1)),
                "y": sample(roles["y"], n, m, derive(stream, 2))}
    if bound_id == "product_xy":
        return {"x": sample(roles["x"], m, m, derive(stream, 1)),
                "y": sample(roles["y"], m, m, derive(stream, 2))}
    if bound_id == "sum_norm":
        return {"x": sample(roles["x"], m, n, derive(stream, 1)),
                "y": sample(roles["y"], n, m, derive(stream, 2))}
    if bound_id == "sum_norm.normal":
        return {"x": sample(roles["normal"], m, m, derive(stream, 1)),
                "y": sample(roles["normal"], m, m, derive(stream, 2))}
    if bound_id in ("main4.v1", "main4.v2"):
        items = []
        for i in range(params["n_operators"]):
            sub = derive(stream, 10 + i)
            items.append((
                sample(roles["contraction"], m, m, derive(sub, 1)),
                sample(roles["contraction"], n, n, derive(sub, 2)),
                sample(roles["contraction"], m, m, derive(sub, 3)),
                sample(roles["contraction"], n, n, derive(sub, 4)),
                sample(roles["x"], m, n, derive(sub, 5)),
                sample(roles["y"], n, m, derive(sub, 6)),
            ))
        return {"items": items}
    if bound_id == "th1":
        blocks = []
        for i in range(params["n_operators"]):
            sub = derive(stream, 10 + i)
            blocks.append((
                sample(roles["block"], m, m, derive(sub, 1)),
                sample(roles["block"], m, n, derive(sub, 2)),
                sample(roles["block"], n, m, derive(sub, 3)),
                sample(roles["block"], n, n, derive(sub, 4)),
            ))
        return {"blocks": blocks}
    raise UnknownBoundError(f"unknown bound id {bound_id!r}")


def _mats_digests(bound_id: str, mats: dict) -> tuple:
    if "items" in mats:
        flat = [m for item in mats["items"] for m in item]
    elif "blocks" in mats:
        flat = [m for blk in mats["blocks"] for m in blk]
    else:
        flat = [mats["x"], mats["y"]]
    return tuple(_digest(m) for m in flat)


def evaluate_bound(bound_id: str, mats: dict, params: dict,
                   omega_tol: float = 1e-6, constant_mode: str = "as_proved",
                   omega_p_restarts: int = 8, omega_p_max_iter: int = 300,
                   zeta_restarts: int = 6, stream: RngStream | None = None):
    """Evaluate one bound on explicit matrices and measure its contract side.

    Returns (outcome, lhs, omega_hi_or_None, extras). `lhs` is the certified
    lower radius endpoint, the exact operator norm, or the generalized-radius
    estimate, depending on the bound family; `outcome.value` must dominate
    lhs ** outcome.exponent whenever the bound is valid.
    """
    if bound_id not in BOUND_IDS:
        raise UnknownBoundError(f"unknown bound id {bound_id!r}")
    if stream is None:
        stream = RngStream(master_seed=0)
    variant = 2 if bound_id.endswith(".v2") else 1
    extras: dict = {}

    if bound_id in _OFFDIAG_IDS:
        x, y = as_matrix(mats["x"]), as_matrix(mats["y"])
        pair = params.get("pair") or power_pair(params.get("alpha", 0.5))
        r = float(params.get("r", 1.0))
        if bound_id.startswith("main1."):
            outcome = bound_main1((x, y), pair, r, variant)
        elif bound_id.startswith("main11.young"):
            hp = _holder(params)
            outcome = bound_main11_young((x, y), pair, r, hp, variant)
        elif bound_id.startswith("main11."):
            hp = _holder(params)
            outcome = bound_main11((x, y), pair, r, hp, variant,
                                   constant_mode=params.get("constant_mode",
                                                            constant_mode))
        else:
            guaranteed, refined, zeta = bound_main3(
                (x, y), pair, r, variant,
                zeta_restarts=int(params.get("zeta_restarts", zeta_restarts)),
                stream=derive(stream, 101))
            outcome = guaranteed
            extras["refined_value"] = refined.value
            extras["zeta_estimate"] = zeta.value
        t = embed_offdiag(x, y)
        cert = omega(t, omega_tol * max(1.0, spectral_norm(t)))
        return outcome, cert.lo, cert.hi, extras

    if bound_id == "product_xy":
        x, y = as_matrix(mats["x"]), as_matrix(mats["y"])
        outcome = bound_product_xy(x, y, float(params.get("alpha", 0.5)),
                                   float(params.get("r", 1.0)),
                                   int(params.get("variant", 1)))
        prod = x @ y
        cert = omega(prod, omega_tol * max(1.0, spectral_norm(prod)))
        return outcome, cert.lo, cert.hi, extras

    if bound_id in ("sum_norm", "sum_norm.normal"):
        x, y = as_matrix(mats["x"]), as_matrix(mats["y"])
        sign = params.get("sign", "+")
        s = 1.0 if sign == "+" else -1.0
        normal_mode = bound_id.endswith(".normal")
        outcome = bound_sum_norm(x, y, float(params.get("r", 1.0)),
                                 sign=sign, normal_mode=normal_mode)
        lhs = spectral_norm(x + s * (y if normal_mode else adjoint(y)))
        return outcome, lhs, lhs, extras

    if bound_id in ("main4.v1", "main4.v2"):
        items = mats["items"]
        pair = params.get("pair") or power_pair(params.get("alpha", 0.5))
        p = float(params.get("p", 1.0))
        outcome = bound_main4(items, pair, p, variant)
        est = omega_p(main4_operands(items), p, restarts=omega_p_restarts,
                      stream=derive(stream, 102), max_iter=omega_p_max_iter)
        extras["estimate_converged"] = est.converged
        return outcome, est.value, None, extras

    if bound_id == "th1":
        blocks = mats["blocks"]
        p = float(params.get("p", 1.0))
        scale = max([1.0] + [spectral_norm(embed_block(*blk)) for blk in blocks])
        outcome = bound_th1(blocks, p, omega_tol * scale)
        ops = [embed_block(*blk) for blk in blocks]
        est = omega_p(ops, p, restarts=omega_p_restarts,
                      stream=derive(stream, 102), max_iter=omega_p_max_iter)
        extras["estimate_converged"] = est.converged
        return outcome, est.value, None, extras

    raise UnknownBoundError(f"unknown bound id {bound_id!r}")  # pragma: no cover


def _holder(params: dict) -> HolderPair:
    p = float(params.get("p", 2.0))
    if "q" in params and params["q"] is not None:
        return HolderPair(p, float(params["q"]))
    return HolderPair(p, p / (p - 1.0)) if p > 1.0 else HolderPair(p, math.inf)


def _ratio(lhs_pow: float, value: float) -> float:
    if value > 0.0:
        return min(lhs_pow / value, 1e308)
    return 1.0 if lhs_pow <= 0.0 else 1e308


def _run_single(config: CampaignConfig, index: int, bound_id: str,
                params: dict, mats: dict | None) -> TrialRecord:
    t0 = perf_counter()
    stream = derive(RngStream(config.master_seed), index)
    seed_path = f"{config.master_seed}/{index}"
    if bound_id in ("main11.v1", "main11.v2"):
        params = dict(params,
                      constant_mode=params.get("constant_mode", config.constant_mode))
    try:
        if mats is None:
            mats = _sample_mats(bound_id, params, config, stream)
        else:
            mats = _coerce_mats(mats)
        digests = _mats_digests(bound_id, mats)
        outcome, lhs, omega_hi, extras = evaluate_bound(
            bound_id, mats, params,
            omega_tol=config.omega_tol,
            constant_mode=params.get("constant_mode", config.constant_mode),
            omega_p_restarts=config.omega_p_restarts,
            omega_p_max_iter=config.omega_p_max_iter,
            zeta_restarts=config.zeta_restarts,
            stream=stream,
        )
        lhs_pow = lhs ** outcome.exponent
        violation = outcome.value < lhs_pow - config.slack * max(1.0, outcome.value)
        if violation and bound_id in _OMEGA_P_IDS:
            # estimates are lower bounds already; re-check with 4x restarts
            _, lhs2, _, _ = evaluate_bound(
                bound_id, mats, params,
                omega_tol=config.omega_tol,
                constant_mode=params.get("constant_mode", config.constant_mode),
                omega_p_restarts=4 * config.omega_p_restarts,
                omega_p_max_iter=config.omega_p_max_iter,
                zeta_restarts=config.zeta_restarts,
                stream=stream,
            )
            lhs = max(lhs, lhs2)
            lhs_pow = lhs ** outcome.exponent
            violation = outcome.value < lhs_pow - config.slack * max(1.0, outcome.value)
        record = TrialRecord(
            index=index,
            bound_id=bound_id,
            params=_clean_params(dict(params, **extras)),
            digests=digests,
            value=outcome.value,
            exponent=outcome.exponent,
            omega_lo=lhs,
            omega_hi=omega_hi,
            ratio=_ratio(lhs_pow, outcome.value),
            violation=bool(violation),
            seed_path=seed_path,
            wall_time=perf_counter() - t0,
        )
    except (NumradError, ValueError) as exc:
        record = TrialRecord(
            index=index, bound_id=bound_id, params=_clean_params(dict(params)),
            digests=(), value=None, exponent=None, omega_lo=None, omega_hi=None,
            ratio=None, violation=False, seed_path=seed_path,
            error=f"{type(exc).__name__}: {exc}", wall_time=perf_counter() - t0,
        )
    return record


def _clean_params(params: dict) -> dict:
    out = {}
    for key, val in params.items():
        if key == "pair":
            out[key] = getattr(val, "tag", str(val))
        elif isinstance(val, (bool, int, float, str)) or val is None:
            out[key] = val
        else:
            out[key] = str(val)
    return out


def _coerce_mats(mats: dict) -> dict:
    out = {}
    for key, val in mats.items():
        if key in ("items", "blocks"):
            out[key] = [tuple(as_matrix(m) for m in group) for group in val]
        else:
            out[key] = as_matrix(val)
    return out


def run_campaign(config: CampaignConfig) -> CampaignReport:
    """Execute the whole campaign plan; deterministic given the config."""
    plan = _build_plan(config)
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            records = list(pool.map(
                lambda item: _run_single(config, item[0], item[1][0], item[1][1], item[1][2]),
                enumerate(plan)))
    else:
        records = [_run_single(config, i, b, prm, mts)
                   for i, (b, prm, mts) in enumerate(plan)]
    records.sort(key=lambda rec: rec.index)
    return build_report(config, records)


def replay_trial(config: CampaignConfig, index: int) -> TrialRecord:
    """Re-run one plan entry in isolation; reproduces the campaign record."""
    plan = _build_plan(config)
    bound_id, params, mats = plan[index]
    return _run_single(config, index, bound_id, params, mats)


def build_report(config: CampaignConfig, records: list) -> CampaignReport:
    summary: dict = {}
    for rec in records:
        entry = summary.setdefault(rec.bound_id, {
            "count": 0, "violations": 0, "errors": 0,
            "ratio_min": None, "ratio_median": None, "ratio_max": None,
        })
        entry["count"] += 1
        if rec.error is not None:
            entry["errors"] += 1
        if rec.violation:
            entry["violations"] += 1
    for bound_id, entry in summary.items():
        ratios = [rec.ratio for rec in records
                  if rec.bound_id == bound_id and rec.ratio is not None]
        if ratios:
            entry["ratio_min"] = float(min(ratios))
            entry["ratio_median"] = float(np.median(ratios))
            entry["ratio_max"] = float(max(ratios))
    return CampaignReport(
        format_version=FORMAT_VERSION,
        config=_config_echo(config),
        summary=summary,
        violations=[rec for rec in records if rec.violation],
        errors=[rec for rec in records if rec.error is not None],
        records=records,
    )


def _config_echo(config: CampaignConfig) -> dict:
    echo = asdict(config)
    # jobs controls execution only; reports must not depend on it
    echo.pop("jobs", None)
    echo["bound_ids"] = list(config.bound_ids)
    echo["dims"] = [list(d) for d in config.dims]
    echo["extra_trials"] = [
        [bound_id, _clean_params(dict(params)), sorted(mats.keys())]
        for bound_id, params, mats in config.extra_trials
    ]
    for key in ("r_values", "alpha_values", "holder_p_values",
                "omega_p_p_values", "n_operators_values"):
        echo[key] = list(echo[key])
    return echo


def _record_dict(rec: TrialRecord) -> dict:
    return {
        "index": rec.index,
        "bound_id": rec.bound_id,
        "params": rec.params,
        "digests": list(rec.digests),
        "value": rec.value,
        "exponent": rec.exponent,
        "omega_lo": rec.omega_lo,
        "omega_hi": rec.omega_hi,
        "ratio": rec.ratio,
        "violation": rec.violation,
        "seed_path": rec.seed_path,
        "error": rec.error,
    }


def report_to_json(report: CampaignReport) -> str:
    """Full report as canonical JSON (wall times excluded by design)."""
    payload = {
        "format_version": report.format_version,
        "config": report.config,
        "summary": report.summary,
        "violations": [_record_dict(rec) for rec in report.violations],
        "errors": [_record_dict(rec) for rec in report.errors],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def _csv_cell(val) -> str:
    if val is None:
        return ""
    if isinstance(val, bool):
        return "true" if val else "false"
    if isinstance(val, float):
        return repr(val)
    return str(val)


def report_to_csv(report: CampaignReport) -> str:
    """All trial records as flat CSV rows."""
    lines = [",".join(_CSV_COLUMNS)]
    for rec in report.records:
        prm = rec.params
        row = (rec.index, rec.bound_id, prm.get("m"), prm.get("n"),
               prm.get("r"), prm.get("alpha"), prm.get("p"), prm.get("q"),
               rec.value, rec.omega_lo, rec.omega_hi, rec.ratio,
               rec.violation, rec.seed_path)
        lines.append(",".join(_csv_cell(v) for v in row))
    return "\n".join(lines) + "\n"


COUNTEREXAMPLE_SEED = 0x5EED


def counterexample_suite(master_seed: int = COUNTEREXAMPLE_SEED,
                         random_pairs: int = 500) -> CampaignReport:
    """Fixed documented discrepancy cases plus a misapplication search.

    (a) the scalar input X = Y = [1] falsifies the printed Holder-bound
        constant (value 0.5 against radius power 1);
    (b) seeded random non-normal pairs probe ||X + Y|| <= || |X| + |Y| ||
        outside its normality hypothesis; found violations confirm the
        hypothesis matters and are expected;
    (c) the proved constant passes on the same scalar input.
    """
    config = CampaignConfig(bound_ids=(), master_seed=master_seed,
                            extra_trials=())
    records = []
    one = [[1.0]]
    base = {"m": 1, "n": 1, "r": 1.0, "alpha": 0.5, "p": 2.0, "q": 2.0}

    for idx, mode, section in ((0, "as_stated", "a"), (1, "as_proved", "c")):
        params = dict(base, constant_mode=mode, section=section)
        records.append(_run_single(config, idx, "main11.v1", params,
                                   {"x": one, "y": one}))

    root = RngStream(master_seed)
    index = 2
    for k in range(random_pairs):
        stream = derive(root, 1000 + k)
        side = 2 + k % 3
        x = sample("ginibre", side, side, derive(stream, 1))
        y = sample("ginibre", side, side, derive(stream, 2))
        lhs = spectral_norm(x + y)
        rhs = spectral_norm(fn_of_abs(x, lambda t: t) + fn_of_abs(y, lambda t: t))
        violation = rhs < lhs - 1e-8 * max(1.0, rhs)
        records.append(TrialRecord(
            index=index,
            bound_id="sum_norm.normal",
            params={"m": side, "n": side, "r": 1.0, "sign": "+",
                    "section": "b", "misapplied": True},
            digests=(_digest(x), _digest(y)),
            value=rhs,
            exponent=1.0,
            omega_lo=lhs,
            omega_hi=lhs,
            ratio=_ratio(lhs, rhs),
            violation=bool(violation),
            seed_path=f"{master_seed}/{1000 + k}",
        ))
        index += 1
    return build_report(config, records)


def tightness_sweep(bound_id: str, mats: dict, sweep: dict,
                    base: dict | None = None, omega_tol: float = 1e-8,
                    omega_p_restarts: int = 8,
                    stream: RngStream | None = None) -> list[tuple[dict, float]]:
    """Ratio table over a parameter grid with fixed input matrices.

    Returns [(parameter point, ratio)] in deterministic grid order; an
    empty sweep gives an empty table. Ratios report tightness only and are
    never asserted monotone.
    """
    if bound_id not in BOUND_IDS:
        raise UnknownBoundError(f"unknown bound id {bound_id!r}")
    if not sweep:
        return []
    mats = _coerce_mats(mats)
    keys = sorted(sweep.keys())
    points: list[dict] = [{}]
    for key in keys:
        points = [dict(pt, **{key: val}) for pt in points for val in sweep[key]]
    rows = []
    for pt in points:
        params = dict(base or {}, **pt)
        outcome, lhs, _, _ = evaluate_bound(
            bound_id, mats, params, omega_tol=omega_tol,
            omega_p_restarts=omega_p_restarts,
            stream=stream or RngStream(master_seed=0))
        rows.append((pt, _ratio(lhs ** outcome.exponent, outcome.value)))
    return rows
