"""Backbone registry: build a classifier and locate its capture points.

Every supported architecture is a torchvision ResNet variant, so the
penultimate features are always the flattened output of ``model.avgpool``
(the global pooling layer) and the logits come from ``model.fc``.
"""

from __future__ import annotations

from pathlib import Path

import torch
from torch import nn
from torchvision import models as tvm


class ModelBuildError(Exception):
    """Unknown architecture or a checkpoint that does not fit it."""


def _tv_builder(name):
    def build(num_classes: int) -> nn.Module:
        return getattr(tvm, name)(weights=None, num_classes=num_classes)

    return build


def _resnet18_cifar(num_classes: int) -> nn.Module:
    # CIFAR-resolution variant: 3x3 stem with stride 1 and no max-pool, as
    # used by the common 32x32 training recipes; checkpoints trained with
    # those recipes do not fit the stock ImageNet stem
    m = tvm.resnet18(weights=None, num_classes=num_classes)
    m.conv1 = nn.Conv2d(3, 64, kernel_size=3, stride=1, padding=1, bias=False)
    m.maxpool = nn.Identity()
    return m


ARCHS = {
    "resnet18": _tv_builder("resnet18"),
    "resnet18_cifar": _resnet18_cifar,
    "resnet34": _tv_builder("resnet34"),
    "resnet50": _tv_builder("resnet50"),
    "wide_resnet50_2": _tv_builder("wide_resnet50_2"),
}


def build_model(arch: str, num_classes: int, checkpoint: str | None = None,
                device: str = "cpu") -> nn.Module:
    """Construct ``arch`` with a ``num_classes`` head and load ``checkpoint``.

    The model is returned in eval mode on ``device``. A checkpoint may be a
    bare state dict or a dict carrying one under ``"state_dict"``;
    ``module.`` prefixes from DataParallel training are stripped.
    """
    if arch not in ARCHS:
        raise ModelBuildError(
            f"unknown architecture {arch!r}; known: {', '.join(sorted(ARCHS))}")
    if num_classes < 2:
        raise ModelBuildError("num_classes must be >= 2")
    model = ARCHS[arch](num_classes)
    if checkpoint is not None:
        path = Path(checkpoint)
        if not path.is_file():
            raise FileNotFoundError(f"checkpoint not found: {path}")
        state = torch.load(path, map_location="cpu", weights_only=True)
        if isinstance(state, dict) and "state_dict" in state:
            state = state["state_dict"]
        state = {k.removeprefix("module."): v for k, v in state.items()}
        try:
            model.load_state_dict(state)
        except RuntimeError as exc:
            raise ModelBuildError(
                f"checkpoint {path} does not match architecture {arch!r} "
                f"with num_classes={num_classes}: {exc}") from exc
    model.eval()
    return model.to(torch.device(device))


def capture_points(model: nn.Module) -> tuple[nn.Module, nn.Linear]:
    """Return (pooling module, classifier head) for a registry model."""
    return model.avgpool, model.fc


def model_dims(model: nn.Module) -> tuple[int, int]:
    """Feature dimension d and class count K, read off the classifier head."""
    _, fc = capture_points(model)
    return int(fc.in_features), int(fc.out_features)
