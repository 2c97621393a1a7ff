"""Command-line harness: validate, eval, ablate, sweep-temp, simulate.

Artifacts (report.json/report.md, ablation.json/ablation.md, sweep.csv,
simulation.csv/simulation.json) all embed the resolved run configuration and
a format version; see docs/formats.md. Paths and thread counts never change
numbers, so they are not part of the echoed configuration and artifacts stay
byte-reproducible across machines.

Exit codes: 0 success, 1 validation or domain error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .metrics import EvalReport, evaluate
from .scoring import SCORER_IDS, OtodConfig, Scorer, fit_mds, make_scorer
from .simulate import GaussianSimSpec, md_sweep, sweep_rows
from .tensor_io import BundleValidationError, DatasetBundle, TensorIOError, load_manifest, validate_manifest

FORMAT_VERSION = "1"
EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2

DEFAULT_ALPHA = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)
DEFAULT_TEMP_GRID = "1,2,3,4,5,6,7,8,9,10"

# Cumulative input ablation: score parts are (features, logits, probabilities),
# with the fusion weights spread uniformly over the active parts.
ABLATION_ROWS = (
    ("features", (1.0, 0.0, 0.0)),
    ("features+logits", (0.5, 0.5, 0.0)),
    ("features+logits+probs", DEFAULT_ALPHA),
)


def _parse_float_list(text: str, flag: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(","))
    except ValueError:
        raise ValueError(f"{flag} expects comma-separated numbers, got {text!r}") from None
    if not values:
        raise ValueError(f"{flag} must not be empty")
    return values


def _parse_alpha(text: str) -> tuple[float, float, float]:
    values = _parse_float_list(text, "--alpha")
    if len(values) != 3:
        raise ValueError(f"--alpha expects exactly 3 weights, got {len(values)}")
    return values


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text)


def _config_footer(config: dict) -> str:
    block = _json_text({"format_version": FORMAT_VERSION, "config": config})
    return "\n## Run config\n\n```json\n" + block + "```\n"


def _csv_lines(config: dict, header: str, rows: list[str]) -> str:
    config_line = json.dumps(config, sort_keys=True, separators=(",", ":"))
    lines = [f"# format_version: {FORMAT_VERSION}", f"# config: {config_line}", header]
    lines.extend(rows)
    return "\n".join(lines) + "\n"


def _build_scorer(
    scorer_id: str,
    bundle: DatasetBundle,
    alpha: tuple[float, float, float],
    temperature: float,
) -> Scorer:
    if scorer_id == "otod":
        cfg = OtodConfig(alpha=alpha, temperature=temperature)
        return make_scorer("otod", otod_config=cfg)
    if scorer_id in ("mds", "klm"):
        if bundle.id_train is None:
            raise ValueError(
                f"scorer '{scorer_id}' requires an id_train split with labels"
            )
        return make_scorer(scorer_id, stats=fit_mds(bundle.id_train))
    # msp/gen are parameter-free here; ebo runs at its standard T=1.
    return make_scorer(scorer_id)


def _means(report: EvalReport) -> tuple[float, float]:
    return report.average_fpr, report.average_auroc


def cmd_validate(args: argparse.Namespace) -> int:
    report = validate_manifest(args.manifest)
    payload = {
        "format_version": FORMAT_VERSION,
        "config": {"command": "validate", "manifest": args.manifest},
    }
    payload.update(report.to_dict())
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK if report.ok else EXIT_DOMAIN


def cmd_eval(args: argparse.Namespace) -> int:
    alpha = _parse_alpha(args.alpha) if args.alpha is not None else DEFAULT_ALPHA
    bundle = load_manifest(args.manifest)
    scorer = _build_scorer(args.scorer, bundle, alpha, args.temp)
    report = evaluate(bundle, scorer, threads=args.threads)

    config = {
        "command": "eval",
        "manifest": args.manifest,
        "scorer": args.scorer,
        "scorer_params": scorer.params,
        "tpr_target": 0.95,
    }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_text(
        out / "report.json",
        _json_text(
            {"format_version": FORMAT_VERSION, "config": config, "report": report.to_dict()}
        ),
    )
    _write_text(out / "report.md", report.to_markdown() + _config_footer(config))
    print(report.to_markdown(), end="")
    return EXIT_OK


def cmd_ablate(args: argparse.Namespace) -> int:
    bundle = load_manifest(args.manifest)
    rows = []
    for parts, alpha in ABLATION_ROWS:
        scorer = _build_scorer("otod", bundle, alpha, args.temp)
        fpr, auc = _means(evaluate(bundle, scorer, threads=args.threads))
        rows.append(
            {"parts": parts, "alpha": list(alpha), "mean_fpr_at_95": fpr, "mean_auroc": auc}
        )

    config = {
        "command": "ablate",
        "manifest": args.manifest,
        "temperature": float(args.temp),
        "tpr_target": 0.95,
    }
    md_lines = [
        "| Inputs | alpha | Mean FPR@95 ↓ | Mean AUROC ↑ |",
        "|---|---|---|---|",
    ]
    for row in rows:
        alpha_text = ", ".join(f"{a:g}" for a in row["alpha"])
        md_lines.append(
            f"| {row['parts']} | {alpha_text} "
            f"| {100 * row['mean_fpr_at_95']:.2f} | {100 * row['mean_auroc']:.2f} |"
        )
    table = "\n".join(md_lines) + "\n"

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_text(
        out / "ablation.json",
        _json_text({"format_version": FORMAT_VERSION, "config": config, "rows": rows}),
    )
    _write_text(out / "ablation.md", table + _config_footer(config))
    print(table, end="")
    return EXIT_OK


def cmd_sweep_temp(args: argparse.Namespace) -> int:
    temps = _parse_float_list(args.temps, "--temps")
    bad = [t for t in temps if not t > 0.0]
    if bad:
        raise ValueError(f"--temps must be positive, got {bad[0]}")
    alpha = _parse_alpha(args.alpha) if args.alpha is not None else DEFAULT_ALPHA
    bundle = load_manifest(args.manifest)

    csv_rows = []
    for t in temps:
        scorer = _build_scorer("otod", bundle, alpha, t)
        fpr, auc = _means(evaluate(bundle, scorer, threads=args.threads))
        csv_rows.append(f"{t!r},{fpr!r},{auc!r}")

    config = {
        "command": "sweep-temp",
        "manifest": args.manifest,
        "temperatures": list(temps),
        "alpha": list(alpha),
        "tpr_target": 0.95,
    }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    text = _csv_lines(config, "T,mean_fpr_at_95,mean_auroc", csv_rows)
    _write_text(out / "sweep.csv", text)
    print(text, end="")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    shift_grid = (
        _parse_float_list(args.shifts, "--shifts") if args.shifts is not None else None
    )
    spec = GaussianSimSpec(
        d=args.d, shift_grid=shift_grid, n_per_side=args.n, seed=args.seed
    )
    rows = sweep_rows(md_sweep(spec))

    config = {
        "command": "simulate",
        "d": spec.d,
        "shifts": [float(s) for s in spec.shift_grid],
        "n_per_side": spec.n_per_side,
        "seed": spec.seed,
    }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_rows = [
        f"{r['shift']!r},{r['tv_proxy']!r},{r['md']!r},{r['stderr']!r},{r['auroc']!r}"
        for r in rows
    ]
    text = _csv_lines(config, "shift,tv_proxy,md,stderr,auroc", csv_rows)
    _write_text(out / "simulation.csv", text)
    _write_text(
        out / "simulation.json",
        _json_text({"format_version": FORMAT_VERSION, "config": config, "points": rows}),
    )
    print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="otod",
        description="Post-hoc OOD scoring: validate bundles, run benchmarks, sweep settings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a manifest bundle; exit 0 iff it is usable")
    p.add_argument("manifest", help="path to the bundle manifest JSON")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("eval", help="score a bundle and report FPR@95/AUROC per OOD set")
    p.add_argument("manifest", help="path to the bundle manifest JSON")
    p.add_argument("--scorer", choices=list(SCORER_IDS), default="otod")
    p.add_argument(
        "--alpha",
        default=None,
        help="otod fusion weights 'a_f,a_l,a_p' summing to 1 (default: uniform)",
    )
    p.add_argument(
        "--temp", type=float, default=1.0, help="otod softmax temperature (default: 1)"
    )
    p.add_argument("--out", default="out", help="output directory (default: out)")
    p.add_argument("--threads", type=int, default=1, help="OOD sets scored in parallel")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser(
        "ablate", help="run the three-row input ablation of the otod scorer"
    )
    p.add_argument("manifest", help="path to the bundle manifest JSON")
    p.add_argument("--temp", type=float, default=1.0, help="otod softmax temperature")
    p.add_argument("--out", default="out", help="output directory (default: out)")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser(
        "sweep-temp", help="evaluate otod across a temperature grid, fixed alpha"
    )
    p.add_argument("manifest", help="path to the bundle manifest JSON")
    p.add_argument(
        "--temps",
        default=DEFAULT_TEMP_GRID,
        help=f"comma-separated temperature grid (default: {DEFAULT_TEMP_GRID})",
    )
    p.add_argument("--alpha", default=None, help="otod fusion weights (default: uniform)")
    p.add_argument("--out", default="out", help="output directory (default: out)")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_sweep_temp)

    p = sub.add_parser(
        "simulate", help="Gaussian mean-discrepancy sweep of the feature-part score"
    )
    p.add_argument("--d", type=int, default=16, help="sample dimension (default: 16)")
    p.add_argument(
        "--shifts",
        default=None,
        help="comma-separated mean shifts starting at 0 (default: 0,0.25,...,3)",
    )
    p.add_argument(
        "--n", type=int, default=5000, help="samples per side per shift (default: 5000)"
    )
    p.add_argument("--seed", type=int, default=0, help="base RNG seed (default: 0)")
    p.add_argument("--out", default="out", help="output directory (default: out)")
    p.set_defaults(func=cmd_simulate)
    return parser


def run(argv: list[str] | None = None) -> int:
    """Parse argv and execute one subcommand, mapping failures to exit codes."""
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BundleValidationError as exc:
        json.dump(exc.report.to_dict(), sys.stderr, indent=2, sort_keys=True)
        print(file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (TensorIOError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
