"""Evaluate every scorer on the bundled synthetic benchmark.

Loads the fixture bundle shipped with the test suite, fits the two
train-dependent scorers, and prints a comparison table. Point --manifest at
any other bundle to rank scorers on real extracted features.
"""

import argparse
from pathlib import Path

from otod import (
    SCORER_IDS,
    OtodConfig,
    evaluate,
    fit_mds,
    load_manifest,
    make_scorer,
)

DEFAULT_MANIFEST = (
    Path(__file__).resolve().parent.parent
    / "tests" / "fixtures" / "synthetic_bundle" / "manifest.json"
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--manifest", default=str(DEFAULT_MANIFEST))
    ap.add_argument("--temp", type=float, default=3.0,
                    help="softmax temperature for the otod scorer")
    args = ap.parse_args()

    bundle = load_manifest(args.manifest)
    names = sorted(bundle.ood_sets)
    print(f"bundle: {args.manifest}")
    print(f"  id_test n={bundle.id_test.features.shape[0]}, "
          f"ood splits: {', '.join(names)}")
    print()

    stats = fit_mds(bundle.id_train) if bundle.id_train is not None else None

    header = f"{'scorer':<8} {'FPR@95%':>8} {'AUROC%':>8}"
    print(header)
    print("-" * len(header))
    for scorer_id in SCORER_IDS:
        if scorer_id == "otod":
            scorer = make_scorer(
                "otod", otod_config=OtodConfig(temperature=args.temp))
        elif scorer_id in ("mds", "klm"):
            if stats is None:
                print(f"{scorer_id:<8} {'(needs labeled id_train)':>18}")
                continue
            scorer = make_scorer(scorer_id, stats=stats)
        else:
            scorer = make_scorer(scorer_id)
        rep = evaluate(bundle, scorer)
        print(f"{scorer_id:<8} {100 * rep.average_fpr:8.2f} "
              f"{100 * rep.average_auroc:8.2f}")

    print()
    print("per-split numbers for the transport scorer:")
    scorer = make_scorer("otod", otod_config=OtodConfig(temperature=args.temp))
    rep = evaluate(bundle, scorer)
    for name in names:
        r = rep.per_ood[name]
        print(f"  {name:<10} FPR@95={100 * r.fpr_at_95:6.2f}%  "
              f"AUROC={100 * r.auroc:6.2f}%  (n={r.n_ood})")


if __name__ == "__main__":
    main()
