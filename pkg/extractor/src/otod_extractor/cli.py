"""Command-line front end mirroring ExtractJob.

Exit codes follow the otod CLI convention: 0 success, 1 domain error
(unknown architecture, checkpoint mismatch, bad flags), 2 I/O error
(missing checkpoint, unreadable source).
"""

from __future__ import annotations

import argparse
import sys

from .datasets import DatasetReadError, DatasetSpec
from .extract import CIFAR10_MEAN, CIFAR10_STD, ExtractJob, extract
from .models import ARCHS, ModelBuildError

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2


def _triple(text: str) -> tuple[float, float, float]:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated values")
    return tuple(parts)


def _ood_spec(text: str) -> DatasetSpec:
    name, sep, source = text.partition("=")
    if not sep or not name or not source:
        raise argparse.ArgumentTypeError(
            "expected NAME=SOURCE (folder path or standard dataset id)")
    return DatasetSpec(name=name, source=source, split="test")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="otod-extract",
        description="Export penultimate features and logits from a frozen "
                    "classifier as an otod bundle.")
    p.add_argument("--arch", required=True, choices=sorted(ARCHS))
    p.add_argument("--num-classes", type=int, required=True)
    p.add_argument("--checkpoint", default=None,
                   help="state-dict path; omit for random init (debug only)")
    p.add_argument("--id-test", required=True, metavar="SOURCE",
                   help="folder or standard dataset id for the ID test split")
    p.add_argument("--id-test-split", default="test")
    p.add_argument("--id-train", default=None, metavar="SOURCE",
                   help="labeled source (class subfolders or standard id)")
    p.add_argument("--id-train-split", default="train")
    p.add_argument("--ood", action="append", type=_ood_spec, default=[],
                   metavar="NAME=SOURCE", help="repeatable; at least one")
    p.add_argument("--data-root", default=None,
                   help="download root for standard dataset ids")
    p.add_argument("--batch-size", type=int, default=128)
    p.add_argument("--device", default="cpu")
    p.add_argument("--image-size", type=int, default=32)
    p.add_argument("--mean", type=_triple, default=CIFAR10_MEAN)
    p.add_argument("--std", type=_triple, default=CIFAR10_STD)
    p.add_argument("--out", default="bundle")
    return p


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        id_train = None
        if args.id_train is not None:
            id_train = DatasetSpec("id_train", args.id_train,
                                   args.id_train_split, labeled=True)
        job = ExtractJob(
            arch=args.arch,
            num_classes=args.num_classes,
            checkpoint=args.checkpoint,
            id_test=DatasetSpec("id_test", args.id_test, args.id_test_split),
            id_train=id_train,
            ood=tuple(args.ood),
            batch_size=args.batch_size,
            device=args.device,
            out_dir=args.out,
            image_size=args.image_size,
            mean=args.mean,
            std=args.std,
            data_root=args.data_root,
        )
        manifest = extract(job)
    except (ModelBuildError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (DatasetReadError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(manifest)
    return EXIT_OK


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
