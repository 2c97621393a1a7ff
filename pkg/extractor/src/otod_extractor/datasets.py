"""Image sources: folders of images or standard torchvision datasets.

A source enumerates its rows once, deterministically (sorted relative paths
for folders, native index order for standard datasets), and can open any row
as an RGB PIL image. The per-row reference strings end up in the sidecar
file next to the exported tensors.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

IMAGE_EXTENSIONS = {".png", ".jpg", ".jpeg", ".bmp", ".ppm", ".webp", ".tif", ".tiff"}
STANDARD_IDS = ("cifar10", "cifar100")


class DatasetReadError(Exception):
    """A source directory, dataset, or individual image cannot be read."""


@dataclass(frozen=True)
class DatasetSpec:
    """One dataset to run through the model.

    ``source`` is either a directory of images or a standard dataset id
    (one of cifar10, cifar100). ``split`` applies to standard ids only.
    ``labeled`` requires per-row class labels: class subdirectories for a
    folder source, native targets for a standard id.
    """

    name: str
    source: str
    split: str = "test"
    labeled: bool = False


class FolderSource:
    def __init__(self, root: Path, labeled: bool):
        self.root = root
        if labeled:
            classes = sorted(p.name for p in root.iterdir() if p.is_dir())
            if not classes:
                raise DatasetReadError(
                    f"labeled source {root} has no class subdirectories")
            paths, labels = [], []
            for idx, cls in enumerate(classes):
                members = sorted(
                    p for p in (root / cls).rglob("*")
                    if p.suffix.lower() in IMAGE_EXTENSIONS)
                paths.extend(members)
                labels.extend([idx] * len(members))
            self.labels = np.asarray(labels, dtype=np.int64)
        else:
            paths = sorted(p for p in root.rglob("*")
                           if p.suffix.lower() in IMAGE_EXTENSIONS)
            self.labels = None
        if not paths:
            raise DatasetReadError(f"no images under {root}")
        self.paths = paths
        self.refs = [p.relative_to(root).as_posix() for p in paths]

    def __len__(self):
        return len(self.paths)

    def image(self, i: int) -> Image.Image:
        path = self.paths[i]
        try:
            with Image.open(path) as im:
                return im.convert("RGB")
        except (OSError, SyntaxError) as exc:
            raise DatasetReadError(f"unreadable image {path}: {exc}") from exc


class TorchvisionSource:
    def __init__(self, dataset_id: str, split: str, data_root: str | None):
        from torchvision import datasets as tvd

        if split not in ("train", "test"):
            raise DatasetReadError(
                f"standard dataset split must be train or test, got {split!r}")
        if data_root is None:
            raise DatasetReadError(
                f"standard dataset {dataset_id!r} needs --data-root")
        cls = {"cifar10": tvd.CIFAR10, "cifar100": tvd.CIFAR100}[dataset_id]
        try:
            self.ds = cls(data_root, train=(split == "train"), download=False)
        except RuntimeError as exc:
            raise DatasetReadError(
                f"{dataset_id} not found under {data_root}: {exc}") from exc
        self.labels = np.asarray(self.ds.targets, dtype=np.int64)
        width = len(str(len(self.ds) - 1))
        self.refs = [f"{dataset_id}:{split}:{i:0{width}d}"
                     for i in range(len(self.ds))]

    def __len__(self):
        return len(self.ds)

    def image(self, i: int) -> Image.Image:
        img, _ = self.ds[i]
        return img.convert("RGB")


def open_source(spec: DatasetSpec, data_root: str | None = None):
    """Open ``spec`` as a FolderSource or TorchvisionSource."""
    if spec.source in STANDARD_IDS:
        return TorchvisionSource(spec.source, spec.split, data_root)
    root = Path(spec.source)
    if not root.is_dir():
        raise DatasetReadError(
            f"source {spec.source!r} is neither a directory nor one of "
            f"{', '.join(STANDARD_IDS)}")
    return FolderSource(root, spec.labeled)
