"""Generate the synthetic benchmark fixture shipped with the test suite.

The bundle imitates a small classifier dump: a labeled ID train split, an ID
test split, and two OOD splits (a mean-shifted one and a pure-noise one).
Features are softplus-activated class-conditional Gaussians (strictly
positive, like post-activation penultimate features); logits come from a
fixed template-matching head applied to the features. Everything is derived
from one seed, so rerunning this script reproduces the shipped bundle byte
for byte.

Usage: python demos/make_fixture.py [--out DIR]
"""

import argparse
import json
from pathlib import Path

import numpy as np

from otod.tensor_io import write_labels, write_tensor

SEED = 2024
D = 8
K = 5
N_TRAIN_PER_CLASS = 100
N_TEST_PER_CLASS = 80
N_OOD_SHIFTED = 300
N_OOD_NOISE = 250


def softplus(x: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, x)


def head_logits(features: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    return features @ w.T + b


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--out",
        default=str(Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "synthetic_bundle"),
        help="bundle directory to (over)write",
    )
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    rng = np.random.default_rng(SEED)
    # Positive, mostly-active class means: ID feature profiles come out flat-ish
    # after the activation, the way well-trained penultimate activations do.
    class_means = rng.normal(2.5, 0.8, size=(K, D))
    # Template-matching head: logit_c = 0.5 * <f, softplus(mu_c)> + b_c, so ID
    # samples produce one confidently large logit the way a trained head would.
    w = 0.5 * softplus(class_means)
    b = rng.normal(0.0, 0.3, size=K)

    def id_split(n_per_class: int) -> tuple[np.ndarray, np.ndarray]:
        labels = np.repeat(np.arange(K), n_per_class)
        raw = class_means[labels] + rng.normal(0.0, 1.0, size=(labels.size, D))
        return softplus(raw), labels

    train_feats, train_labels = id_split(N_TRAIN_PER_CLASS)
    test_feats, _ = id_split(N_TEST_PER_CLASS)

    # Near-OOD: every class mean pushed along a fixed random direction, wider noise.
    push = rng.normal(0.0, 1.0, size=D)
    push /= np.linalg.norm(push)
    shift_labels = rng.integers(0, K, size=N_OOD_SHIFTED)
    shifted = softplus(
        class_means[shift_labels]
        + 2.0 * push
        + rng.normal(0.0, 1.3, size=(N_OOD_SHIFTED, D))
    )
    # Far-OOD: broad zero-mean noise with no class structure.
    noise = softplus(rng.normal(0.0, 3.0, size=(N_OOD_NOISE, D)))

    splits = {
        "id_train": (train_feats, train_labels),
        "id_test": (test_feats, None),
        "ood_shifted": (shifted, None),
        "ood_noise": (noise, None),
    }
    manifest: dict = {
        "dims": {"d": D, "K": K},
        "meta": {"description": "synthetic 5-class Gaussian benchmark fixture", "seed": str(SEED)},
    }
    for name, (feats, labels) in splits.items():
        write_tensor(feats, out / f"{name}.features.bin")
        write_tensor(head_logits(feats, w, b), out / f"{name}.logits.bin")
        entry = {
            "features": f"{name}.features.bin",
            "logits": f"{name}.logits.bin",
            "n": int(feats.shape[0]),
        }
        if labels is not None:
            write_labels(labels, out / f"{name}.labels.bin")
            entry["labels"] = f"{name}.labels.bin"
        if name.startswith("ood_"):
            manifest.setdefault("ood", []).append({"name": name[4:], **entry})
        else:
            manifest[name] = entry

    with open(out / "manifest.json", "w", newline="\n", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote bundle with {len(splits)} splits to {out}")


if __name__ == "__main__":
    main()
