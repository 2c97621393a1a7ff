"""Run a frozen classifier over image sets and write an otod bundle.

Features are the flattened output of the global pooling layer (the
activations feeding the final linear head), logits the head's outputs.
Tensors go to disk as raw little-endian float32, row-major, labels as
little-endian uint32; the manifest is written last so a crashed run never
leaves a manifest pointing at half-written files.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from torchvision import transforms

from .datasets import DatasetSpec, open_source
from .models import build_model, capture_points, model_dims

CIFAR10_MEAN = (0.4914, 0.4822, 0.4465)
CIFAR10_STD = (0.2470, 0.2435, 0.2616)


@dataclass(frozen=True)
class ExtractJob:
    """Everything one export run needs.

    ``id_test`` and at least one entry in ``ood`` are required by the bundle
    format; ``id_train`` (labeled) is optional and unlocks the
    train-dependent scorers downstream.
    """

    arch: str
    num_classes: int
    id_test: DatasetSpec
    ood: tuple[DatasetSpec, ...]
    id_train: DatasetSpec | None = None
    checkpoint: str | None = None
    batch_size: int = 128
    device: str = "cpu"
    out_dir: str = "bundle"
    image_size: int = 32
    mean: tuple[float, float, float] = CIFAR10_MEAN
    std: tuple[float, float, float] = CIFAR10_STD
    data_root: str | None = None

    def __post_init__(self):
        if not self.ood:
            raise ValueError("at least one OOD dataset is required")
        names = [s.name for s in self.ood]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate OOD names: {names}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.image_size < 1:
            raise ValueError("image_size must be >= 1")
        if self.id_train is not None and not self.id_train.labeled:
            object.__setattr__(
                self, "id_train",
                DatasetSpec(self.id_train.name, self.id_train.source,
                            self.id_train.split, labeled=True))


def _transform(job: ExtractJob):
    return transforms.Compose([
        transforms.Resize((job.image_size, job.image_size),
                          interpolation=transforms.InterpolationMode.BILINEAR,
                          antialias=True),
        transforms.ToTensor(),
        transforms.Normalize(job.mean, job.std),
    ])


def _run_split(model, source, tf, batch_size: int, device):
    """Batched inference over one source; returns (features, logits)."""
    pool, _ = capture_points(model)
    captured = {}

    def grab(_mod, _inp, out):
        captured["f"] = torch.flatten(out, 1).detach()

    handle = pool.register_forward_hook(grab)
    feats, logits = [], []
    try:
        with torch.inference_mode():
            for start in range(0, len(source), batch_size):
                idxs = range(start, min(start + batch_size, len(source)))
                x = torch.stack([tf(source.image(i)) for i in idxs]).to(device)
                out = model(x)
                feats.append(captured["f"].cpu().numpy())
                logits.append(out.cpu().numpy())
    finally:
        handle.remove()
    return (np.concatenate(feats, axis=0),
            np.concatenate(logits, axis=0))


def _write_tensor(path: Path, arr: np.ndarray) -> None:
    np.ascontiguousarray(arr, dtype="<f4").tofile(path)


def _write_labels(path: Path, labels: np.ndarray) -> None:
    np.ascontiguousarray(labels, dtype="<u4").tofile(path)


def _write_sidecar(path: Path, refs: list[str]) -> None:
    path.write_text("".join(r + "\n" for r in refs), encoding="utf-8")


def extract(job: ExtractJob) -> Path:
    """Run the job; returns the path of the manifest it wrote."""
    device = torch.device(job.device)
    model = build_model(job.arch, job.num_classes, job.checkpoint, job.device)
    d, k = model_dims(model)
    tf = _transform(job)

    out = Path(job.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    def export(stem: str, spec: DatasetSpec) -> dict:
        source = open_source(spec, job.data_root)
        feats, logits = _run_split(model, source, tf, job.batch_size, device)
        entry = {"features": f"{stem}.features.bin",
                 "logits": f"{stem}.logits.bin",
                 "n": int(feats.shape[0])}
        _write_tensor(out / entry["features"], feats)
        _write_tensor(out / entry["logits"], logits)
        if spec.labeled:
            entry["labels"] = f"{stem}.labels.bin"
            _write_labels(out / entry["labels"], source.labels)
        _write_sidecar(out / f"{stem}.files.txt", source.refs)
        return entry

    manifest = {
        "dims": {"d": d, "K": k},
        "id_test": export("id_test", job.id_test),
        "ood": [],
        "meta": {
            "arch": job.arch,
            "checkpoint": job.checkpoint or "",
            "image_size": str(job.image_size),
            "norm_mean": ",".join(repr(float(v)) for v in job.mean),
            "norm_std": ",".join(repr(float(v)) for v in job.std),
            "interpolation": "bilinear",
        },
    }
    if job.id_train is not None:
        manifest["id_train"] = export("id_train", job.id_train)
    for spec in job.ood:
        entry = export(f"ood_{spec.name}", spec)
        entry["name"] = spec.name
        manifest["ood"].append(entry)

    # manifest last, via rename, so readers never see a partial bundle
    manifest_path = out / "manifest.json"
    tmp = out / "manifest.json.tmp"
    tmp.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                   encoding="utf-8")
    os.replace(tmp, manifest_path)
    return manifest_path
