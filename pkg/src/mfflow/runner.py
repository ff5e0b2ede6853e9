"""Execute configured runs and write their artifacts.

A training run directory holds ``manifest.json``, ``trajectory.csv``,
``final_ensemble.csv`` and ``summary.json``; an oracle run holds
``manifest.json``, ``oracle.csv`` and ``summary.json``.
"""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path

import numpy as np

from . import __version__, analysis
from .config import OracleConfig, RunConfig, default_output_root, format_config
from .dynamics import CSV_COLUMNS, DivergenceError, TrainerConfig, format_record, read_trajectory, train
from .ensemble import write_snapshot
from .oracle import ScalarFlow, comparison_table, terminal_error
from .presets import get_preset
from .sampling import RngSpec, init_ensemble, make_dataset
from .targets import TargetFunction, target_stats

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DIVERGED = 1
EXIT_CONFIG = 2
EXIT_AUDIT = 3


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _manifest(cfg, extra: dict) -> dict:
    return {
        "run_id": cfg.run_id(),
        "kind": cfg.kind,
        "config": cfg.to_dict(),
        "config_text": format_config(cfg),
        "mfflow_version": __version__,
        "numpy_version": np.__version__,
        **extra,
    }


def run(cfg, output_dir: str | Path | None = None) -> int:
    """Run one configuration; returns the process exit status."""
    out = Path(output_dir or cfg.output_dir or default_output_root() / cfg.run_id())
    out.mkdir(parents=True, exist_ok=True)
    if isinstance(cfg, OracleConfig):
        return _run_oracle(cfg, out)
    return _run_training(cfg, out)


def _run_oracle(cfg: OracleConfig, out: Path) -> int:
    flow = ScalarFlow(cfg.alpha)
    _dump_json(_manifest(cfg, {}), out / "manifest.json")
    (out / "oracle.csv").write_text(comparison_table(flow, cfg.h, cfg.T, cfg.record_every))
    err = terminal_error(flow, cfg.h, cfg.T)
    ok = err <= cfg.tolerance
    _dump_json(
        {
            "kind": "oracle",
            "alpha": cfg.alpha,
            "t_end": cfg.T * cfg.h,
            "terminal_error": err,
            "tolerance": cfg.tolerance,
            "passed": ok,
            "status": "ok" if ok else "audit_failed",
        },
        out / "summary.json",
    )
    return EXIT_OK if ok else EXIT_AUDIT


def _streams(cfg: RunConfig) -> dict[str, RngSpec]:
    root = RngSpec(cfg.seed)
    return {name: root.substream(name) for name in ("dataset", "init", "population")}


def _run_training(cfg: RunConfig, out: Path) -> int:
    streams = _streams(cfg)
    target = TargetFunction(cfg.target, cfg.d)
    data = make_dataset(target, cfg.n, cfg.half_width, streams["dataset"])
    eval_set = make_dataset(target, cfg.N_pop, cfg.half_width, streams["population"])
    ens0 = init_ensemble(cfg.m, cfg.d, streams["init"], trainable_inner=cfg.mode == "mean_field_nn")
    trainer = TrainerConfig(cfg.h, cfg.T, cfg.record_every, cfg.train_on, cfg.mode)

    _dump_json(
        _manifest(cfg, {"seeds": {k: v.describe() for k, v in streams.items()}}),
        out / "manifest.json",
    )
    status = "ok"
    with open(out / "trajectory.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)

        def sink(rec):
            writer.writerow(format_record(rec))
            fh.flush()

        try:
            result = train(ens0, data, eval_set, trainer, on_record=sink)
            records, final = result.records, result.final
        except DivergenceError as exc:
            log.error("run diverged: %s", exc)
            records, final, status = exc.records, None, "diverged"

    if final is not None:
        write_snapshot(final, out / "final_ensemble.csv")
    summary = summarize(cfg, records, target)
    if status == "ok" and not summary["audits_passed"]:
        status = "audit_failed"
    summary["status"] = status
    _dump_json(summary, out / "summary.json")
    if status == "diverged":
        return EXIT_DIVERGED
    return EXIT_OK if status == "ok" else EXIT_AUDIT


def _safe_fit(records, window, column):
    try:
        return analysis.fit_power_law(records, window, column)
    except ValueError:
        return None


def summarize(cfg: RunConfig, records, target: TargetFunction | None = None) -> dict:
    audit_col = "risk_emp" if cfg.train_on == "empirical" else "risk_pop"
    audit = analysis.moment_audit(records, cfg.h, audit_col)
    passed = sum(a.passed for a in audit)
    monotone = analysis.is_nonincreasing(records, audit_col)
    t_end = records[-1].t if records else 0.0
    late = cfg.fit_window
    tail = (t_end / 2.0, t_end)
    summary = {
        "kind": "train",
        "run_id": cfg.run_id(),
        "d": cfg.d,
        "target": cfg.target,
        "is_barron": target.is_barron if target is not None else None,
        "mode": cfg.mode,
        "m": cfg.m,
        "n": cfg.n,
        "N_pop": cfg.N_pop,
        "seed": cfg.seed,
        "h": cfg.h,
        "T": cfg.T,
        "t_end": t_end,
        "final_risk_emp": records[-1].risk_emp if records else None,
        "final_risk_pop": records[-1].risk_pop if records else None,
        "final_gamma": records[-1].gamma if records else None,
        "exponents": {
            "late": {"window": list(late), "exponent": _safe_fit(records, late, "risk_pop")},
            "late_emp": {"window": list(late), "exponent": _safe_fit(records, late, "risk_emp")},
            "final_half": {"window": list(tail), "exponent": _safe_fit(records, tail, "risk_pop")},
        },
        "moment_audit": {
            "intervals": len(audit),
            "passed": passed,
            "pass_rate": passed / len(audit) if audit else 1.0,
            "min_margin": min((a.margin for a in audit), default=None),
        },
        "monotone_risk": monotone,
        "audits_passed": passed == len(audit) and monotone,
    }
    if len(records) >= 2 and t_end > 0:
        summary["path_norm_change_final_half"] = analysis.relative_change(records, "path_norm")
        summary["risk_pop_change_final_half"] = analysis.relative_change(records, "risk_pop")
    if sum(r.t > 1 for r in records) >= 2:
        trend = analysis.sublinear_check(records)
        summary["sublinear"] = {"tail_slope": trend.tail_slope, "tail_nonincreasing": trend.tail_nonincreasing}
    return summary


def run_preset(name: str, output_root: str | Path | None = None, overrides: dict | None = None) -> dict[str, int]:
    """Run every configuration of a preset; returns ``{run_dir: exit_status}``."""
    preset = get_preset(name)
    root = Path(output_root) if output_root is not None else default_output_root()
    statuses = {}
    for sub, cfg in preset.runs:
        if overrides:
            cfg = cfg.replace(**overrides)
        run_dir = root / name / sub if sub else root / name
        statuses[str(run_dir)] = run(cfg, run_dir)
    return statuses


def preset_target_stats(name: str, n: int = 20_000) -> list[tuple]:
    """Target statistics for each training run of a preset."""
    out = []
    for sub, cfg in get_preset(name).runs:
        if isinstance(cfg, RunConfig):
            stats = target_stats(TargetFunction(cfg.target, cfg.d), n, cfg.seed, cfg.half_width)
            out.append((sub, cfg, stats))
    return out


COMPARE_COLUMNS = [
    "d",
    "target",
    "mode",
    "m",
    "n",
    "N_pop",
    "seed",
    "h",
    "T",
    "final_risk_emp",
    "final_risk_pop",
    "fit_t_lo",
    "fit_t_hi",
    "exponent_late",
    "exponent_late_emp",
    "audit_pass_rate",
    "monotone_risk",
]


class CompareError(RuntimeError):
    pass


def load_summary(run_dir: str | Path) -> dict:
    return json.loads((Path(run_dir) / "summary.json").read_text())


def compare_rows(run_dirs) -> list[dict]:
    if len(run_dirs) < 2:
        raise CompareError("compare needs at least two run directories")
    missing = [str(d) for d in run_dirs if not (Path(d) / "summary.json").is_file()]
    if missing:
        raise CompareError("missing summary.json in: " + ", ".join(missing))
    rows = []
    for d in run_dirs:
        s = load_summary(d)
        if s.get("kind") != "train":
            raise CompareError(f"{d} is not a training run")
        late = s["exponents"]["late"]
        rows.append(
            {
                **{k: s[k] for k in ("d", "target", "mode", "m", "n", "N_pop", "seed", "h", "T")},
                "final_risk_emp": s["final_risk_emp"],
                "final_risk_pop": s["final_risk_pop"],
                "fit_t_lo": late["window"][0],
                "fit_t_hi": late["window"][1],
                "exponent_late": late["exponent"],
                "exponent_late_emp": s["exponents"]["late_emp"]["exponent"],
                "audit_pass_rate": s["moment_audit"]["pass_rate"],
                "monotone_risk": s["monotone_risk"],
            }
        )
    rows.sort(key=lambda r: (r["d"], r["target"], r["mode"]))
    return rows


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def compare(run_dirs, out_path: str | Path | None = None) -> str:
    """Cross-run table keyed by (d, target, mode); returns the CSV text."""
    rows = compare_rows(run_dirs)
    lines = [",".join(COMPARE_COLUMNS)]
    lines += [",".join(_fmt(r[c]) for c in COMPARE_COLUMNS) for r in rows]
    text = "\n".join(lines) + "\n"
    if out_path is not None:
        Path(out_path).write_text(text)
    return text


def reload_records(run_dir: str | Path):
    return read_trajectory(Path(run_dir) / "trajectory.csv")
