"""Dataset bundles and their on-disk format (JSON manifest + raw binary tensors).

The format is deliberately minimal so that any training framework can produce
it: tensors are raw little-endian float32, row-major, no header; shapes live in
the manifest. Labels are little-endian uint32. A ``.csv`` file (header row, one
sample per row) is accepted anywhere a tensor path appears and is converted on
load.

Manifest schema (all paths relative to the manifest file)::

    { "dims": {"d": int, "K": int},
      "id_train": {"features": path, "logits": path, "labels": path, "n": int} | null,
      "id_test": {"features": path, "logits": path, "n": int},
      "ood": [ {"name": str, "features": path, "logits": path, "n": int}, ... ],
      "meta": { str: str } }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

TENSOR_DTYPE = np.dtype("<f4")
LABEL_DTYPE = np.dtype("<u4")


class TensorIOError(Exception):
    """A tensor file is missing, unreadable, or has the wrong byte size."""


class BundleValidationError(Exception):
    """Raised by :func:`load_manifest` when the loaded bundle is invalid."""

    def __init__(self, report: "ValidationReport"):
        super().__init__(report.summary())
        self.report = report


@dataclass(frozen=True)
class TensorSet:
    """Per-dataset matrices: features [N, d], logits [N, K], optional labels [N]."""

    features: np.ndarray
    logits: np.ndarray
    labels: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def num_classes(self) -> int:
        return self.logits.shape[1]


@dataclass(frozen=True)
class DatasetBundle:
    """Manifest-backed collection: ID test split, named OOD splits, optional labeled ID train split."""

    id_test: TensorSet
    ood_sets: dict[str, TensorSet]
    id_train: TensorSet | None = None
    meta: dict[str, str] = field(default_factory=dict)

    @property
    def d(self) -> int:
        return self.id_test.d

    @property
    def num_classes(self) -> int:
        return self.id_test.num_classes


@dataclass(frozen=True)
class Issue:
    severity: str  # "error" or "warning"
    location: str
    message: str


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(i.severity == "error" for i in self.issues)

    def add_error(self, location: str, message: str) -> None:
        self.issues.append(Issue("error", location, message))

    def add_warning(self, location: str, message: str) -> None:
        self.issues.append(Issue("warning", location, message))

    def summary(self) -> str:
        if self.ok:
            return "ok"
        lines = [f"{i.severity}: {i.location}: {i.message}" for i in self.issues]
        return "; ".join(lines)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "issues": [
                {"severity": i.severity, "location": i.location, "message": i.message}
                for i in self.issues
            ],
        }


def write_tensor(matrix: np.ndarray, path: str | Path) -> None:
    """Write a 2-D matrix as raw little-endian float32, row-major, no header."""
    arr = np.ascontiguousarray(np.asarray(matrix), dtype=TENSOR_DTYPE)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={arr.ndim}")
    Path(path).write_bytes(arr.tobytes())


def load_tensor(path: str | Path, shape: tuple[int, int]) -> np.ndarray:
    """Load a float32 matrix of the given shape from a raw binary (or CSV) file.

    Raises TensorIOError if the file is missing or its size does not match
    ``shape[0] * shape[1] * 4`` bytes. The returned array is read-only.
    """
    path = Path(path)
    n, m = int(shape[0]), int(shape[1])
    if path.suffix.lower() == ".csv":
        return _load_csv_matrix(path, (n, m), TENSOR_DTYPE)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise TensorIOError(f"{path}: {exc}") from exc
    expected = n * m * TENSOR_DTYPE.itemsize
    if len(data) != expected:
        raise TensorIOError(
            f"{path}: expected {expected} bytes for shape [{n}, {m}], got {len(data)}"
        )
    return np.frombuffer(data, dtype=TENSOR_DTYPE).reshape(n, m)


def write_labels(labels: np.ndarray, path: str | Path) -> None:
    """Write a 1-D label vector as raw little-endian uint32."""
    arr = np.ascontiguousarray(np.asarray(labels), dtype=LABEL_DTYPE)
    if arr.ndim != 1:
        raise ValueError(f"expected 1-D labels, got ndim={arr.ndim}")
    Path(path).write_bytes(arr.tobytes())


def load_labels(path: str | Path, n: int) -> np.ndarray:
    """Load ``n`` uint32 labels (binary or single-column CSV) as int64."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        arr = _load_csv_matrix(path, (int(n), 1), np.dtype(np.int64))
        return arr.reshape(-1)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise TensorIOError(f"{path}: {exc}") from exc
    expected = int(n) * LABEL_DTYPE.itemsize
    if len(data) != expected:
        raise TensorIOError(
            f"{path}: expected {expected} bytes for {n} labels, got {len(data)}"
        )
    return np.frombuffer(data, dtype=LABEL_DTYPE).astype(np.int64)


def _load_csv_matrix(path: Path, shape: tuple[int, int], dtype: np.dtype) -> np.ndarray:
    try:
        arr = np.loadtxt(path, delimiter=",", skiprows=1, dtype=dtype, ndmin=2)
    except OSError as exc:
        raise TensorIOError(f"{path}: {exc}") from exc
    except ValueError as exc:
        raise TensorIOError(f"{path}: cannot parse CSV: {exc}") from exc
    if arr.shape != shape:
        raise TensorIOError(
            f"{path}: expected CSV shape {list(shape)}, got {list(arr.shape)}"
        )
    arr.setflags(write=False)
    return arr


def validate_bundle(bundle: DatasetBundle) -> ValidationReport:
    """Check every bundle invariant; violations become report entries, not failures.

    ok=true means the bundle is usable by every scoring and evaluation
    operation that does not need labels; a labeled id_train additionally
    unlocks MDS/KLM fitting.
    """
    report = ValidationReport()
    d, k = bundle.d, bundle.num_classes
    members: list[tuple[str, TensorSet]] = [("id_test", bundle.id_test)]
    if bundle.id_train is not None:
        members.append(("id_train", bundle.id_train))
    members.extend((f"ood[{name}]", ts) for name, ts in bundle.ood_sets.items())

    for loc, ts in members:
        _check_tensor_set(ts, loc, report)
        if ts.d != d:
            report.add_error(loc, f"dimension mismatch: d={ts.d}, bundle d={d}")
        if ts.num_classes != k:
            report.add_error(loc, f"dimension mismatch: K={ts.num_classes}, bundle K={k}")

    if not bundle.ood_sets:
        report.add_error("ood", "no OOD splits; evaluation needs at least one")
    if bundle.id_train is not None and bundle.id_train.labels is None:
        report.add_error("id_train", "id_train is unlabeled; MDS/KLM require labels")
    return report


def _check_tensor_set(ts: TensorSet, loc: str, report: ValidationReport) -> None:
    if ts.features.ndim != 2 or ts.logits.ndim != 2:
        report.add_error(loc, "features and logits must be 2-D matrices")
        return
    if ts.n < 1:
        report.add_error(loc, "empty split (N=0)")
    if ts.d < 2:
        report.add_error(loc, f"feature dimension d={ts.d} < 2")
    if ts.num_classes < 2:
        report.add_error(loc, f"class count K={ts.num_classes} < 2")
    if ts.logits.shape[0] != ts.n:
        report.add_error(
            loc, f"features have N={ts.n} rows but logits have {ts.logits.shape[0]}"
        )
    for name, arr in (("features", ts.features), ("logits", ts.logits)):
        bad = _first_nonfinite(arr)
        if bad is not None:
            report.add_error(f"{loc}.{name}", f"non-finite value at flat index {bad}")
    if ts.labels is not None:
        if ts.labels.shape != (ts.n,):
            report.add_error(
                f"{loc}.labels", f"expected {ts.n} labels, got {ts.labels.shape[0]}"
            )
        elif ts.labels.size and (
            int(ts.labels.min()) < 0 or int(ts.labels.max()) >= ts.num_classes
        ):
            report.add_error(
                f"{loc}.labels",
                f"labels must lie in [0, {ts.num_classes}); got "
                f"[{int(ts.labels.min())}, {int(ts.labels.max())}]",
            )


def _first_nonfinite(arr: np.ndarray) -> int | None:
    finite = np.isfinite(arr)
    if finite.all():
        return None
    return int(np.flatnonzero(~finite.ravel())[0])


def load_manifest(path: str | Path) -> DatasetBundle:
    """Load and validate a manifest-backed bundle.

    Every referenced tensor file is loaded and checked against the declared
    shapes. Raises FileNotFoundError if the manifest itself is missing, and
    BundleValidationError (carrying the full ValidationReport) for any other
    problem: missing tensor files, byte-size mismatches, non-finite values,
    duplicate OOD names, or structural invariant violations.
    """
    bundle, report = _load_and_collect(Path(path))
    if bundle is None or not report.ok:
        raise BundleValidationError(report)
    return bundle


def validate_manifest(path: str | Path) -> ValidationReport:
    """Like :func:`load_manifest` but collects all problems into a report."""
    _, report = _load_and_collect(Path(path))
    return report


def _load_and_collect(path: Path) -> tuple[DatasetBundle | None, ValidationReport]:
    report = ValidationReport()
    text = path.read_text()  # missing manifest is an I/O error, not a report entry
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        report.add_error(str(path), f"manifest is not valid JSON: {exc}")
        return None, report
    if not isinstance(doc, dict):
        report.add_error(str(path), "manifest root must be a JSON object")
        return None, report

    dims = doc.get("dims")
    if not isinstance(dims, dict) or "d" not in dims or "K" not in dims:
        report.add_error(str(path), 'manifest needs "dims": {"d": int, "K": int}')
        return None, report
    d, k = int(dims["d"]), int(dims["K"])
    if d < 2:
        report.add_error(str(path), f"dims.d={d} < 2")
    if k < 2:
        report.add_error(str(path), f"dims.K={k} < 2")

    base = path.parent

    def load_split(entry: dict, loc: str, with_labels: bool) -> TensorSet | None:
        for key in ("features", "logits", "n"):
            if key not in entry:
                report.add_error(loc, f'split is missing "{key}"')
                return None
        n = int(entry["n"])
        ok = True
        arrays: dict[str, np.ndarray] = {}
        for key, cols in (("features", d), ("logits", k)):
            rel = entry[key]
            try:
                arr = load_tensor(base / rel, (n, cols))
            except TensorIOError as exc:
                report.add_error(f"{loc}.{key}", str(exc))
                ok = False
                continue
            bad = _first_nonfinite(arr)
            if bad is not None:
                report.add_error(
                    f"{loc}.{key}", f"{base / rel}: non-finite value at flat index {bad}"
                )
                ok = False
            arrays[key] = arr
        labels = None
        if with_labels and entry.get("labels"):
            try:
                labels = load_labels(base / entry["labels"], n)
            except TensorIOError as exc:
                report.add_error(f"{loc}.labels", str(exc))
                ok = False
        if not ok:
            return None
        return TensorSet(arrays["features"], arrays["logits"], labels)

    id_test_entry = doc.get("id_test")
    if not isinstance(id_test_entry, dict):
        report.add_error(str(path), 'manifest needs an "id_test" split')
        return None, report
    id_test = load_split(id_test_entry, "id_test", with_labels=False)

    id_train = None
    train_entry = doc.get("id_train")
    if isinstance(train_entry, dict):
        id_train = load_split(train_entry, "id_train", with_labels=True)
        if id_train is None:
            return None, report

    ood_sets: dict[str, TensorSet] = {}
    ood_entries = doc.get("ood", [])
    if not isinstance(ood_entries, list):
        report.add_error(str(path), '"ood" must be a list of splits')
        return None, report
    for idx, entry in enumerate(ood_entries):
        name = entry.get("name") if isinstance(entry, dict) else None
        if not name:
            report.add_error(f"ood[{idx}]", 'OOD split is missing "name"')
            continue
        if name in ood_sets:
            report.add_error(f"ood[{idx}]", f'duplicate OOD name "{name}"')
            continue
        ts = load_split(entry, f"ood[{name}]", with_labels=False)
        if ts is not None:
            ood_sets[name] = ts

    if id_test is None or not report.ok:
        return None, report

    meta = doc.get("meta") or {}
    bundle = DatasetBundle(
        id_test=id_test,
        ood_sets=ood_sets,
        id_train=id_train,
        meta={str(k_): str(v) for k_, v in meta.items()},
    )
    structural = validate_bundle(bundle)
    report.issues.extend(structural.issues)
    return bundle, report
