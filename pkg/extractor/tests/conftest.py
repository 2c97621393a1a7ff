import numpy as np
import pytest
import torch
from PIL import Image

from otod_extractor.models import build_model

N_ID = 10
N_OOD = 6
TRAIN_CLASSES = 4
TRAIN_PER_CLASS = 2


def _write_images(root, n, rng):
    root.mkdir(parents=True)
    for i in range(n):
        arr = rng.integers(0, 256, size=(32, 32, 3), dtype=np.uint8)
        Image.fromarray(arr, "RGB").save(root / f"img_{i:03d}.png")


@pytest.fixture(scope="session")
def workspace(tmp_path_factory):
    """Image folders plus a saved checkpoint, shared by all tests."""
    ws = tmp_path_factory.mktemp("extract_ws")
    rng = np.random.default_rng(11)
    _write_images(ws / "id", N_ID, rng)
    _write_images(ws / "far", N_OOD, rng)
    for c in range(TRAIN_CLASSES):
        _write_images(ws / "train" / f"class{c:02d}", TRAIN_PER_CLASS, rng)

    torch.manual_seed(7)
    model = build_model("resnet18_cifar", 10)
    torch.save(model.state_dict(), ws / "ckpt.pt")
    return ws
