"""Operator specifications, probe sets, norms, and the built-in gallery.

An `OperatorSpec` is a declarative description of a bounded linear operator
on a finite-dimensional real section: a dense matrix, a weighted left shift,
a diagonal operator, or a sparse triplet list, together with the ambient
norm (l1, l2, or linf) in which all vector and operator norms are taken.

Everything downstream (Cesaro trajectories, classification, trees,
certificates) consumes these specs through `apply` and the norm helpers, so
the spec plus a seed fully determines every computed number.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

KIND_DENSE = "dense_matrix"
KIND_SHIFT = "weighted_left_shift"
KIND_DIAGONAL = "diagonal"
KIND_SPARSE = "sparse_triplets"
KINDS = (KIND_DENSE, KIND_SHIFT, KIND_DIAGONAL, KIND_SPARSE)

NORM_TAGS = ("l1", "l2", "linf")

#: Seed used whenever no explicit seed is given.
DEFAULT_SEED = 0xE46_0D1C

#: Exact operator norms and matrix-mode recurrences refuse dims above this.
DENSE_CAP = 512

#: Probe vectors may exceed unit norm by at most this slack.
UNIT_BALL_SLACK = 1e-12


class SpecValidationError(ValueError):
    """An operator spec (or its JSON form) violates a structural invariant."""


class DimensionMismatchError(ValueError):
    """A vector's dimension does not match the operator's."""


class CapExceededError(ValueError):
    """A dense/exact operation was requested above the supported dimension."""


@dataclass(eq=False)
class OperatorSpec:
    """A declarative operator: kind, dimension, entries, ambient norm.

    Parameters
    ----------
    kind : str
        One of ``dense_matrix``, ``weighted_left_shift``, ``diagonal``,
        ``sparse_triplets``.
    dim : int
        Ambient dimension, at least 1.
    entries : array-like
        Kind-dependent payload: a (dim, dim) matrix, a (dim-1,) weight
        vector, a (dim,) diagonal, or a list of (row, col, value) triplets.
    norm_tag : str
        Ambient norm: ``l1``, ``l2``, or ``linf``.
    """

    kind: str
    dim: int
    entries: object
    norm_tag: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecValidationError(f"unknown operator kind {self.kind!r}, expected one of {KINDS}")
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise SpecValidationError(f"dim must be an integer >= 1, got {self.dim!r}")
        self.dim = int(self.dim)
        if self.norm_tag not in NORM_TAGS:
            raise SpecValidationError(f"unknown norm tag {self.norm_tag!r}, expected one of {NORM_TAGS}")

        d = self.dim
        if self.kind == KIND_DENSE:
            mat = _as_float_array(self.entries, "dense entries")
            if mat.shape != (d, d):
                raise SpecValidationError(f"dense entries must have shape ({d}, {d}), got {mat.shape}")
            self.entries = _freeze(mat)
        elif self.kind == KIND_SHIFT:
            w = _as_float_array(self.entries, "shift weights")
            if w.shape != (d - 1,):
                raise SpecValidationError(f"shift weights must have shape ({d - 1},), got {w.shape}")
            self.entries = _freeze(w)
        elif self.kind == KIND_DIAGONAL:
            diag = _as_float_array(self.entries, "diagonal entries")
            if diag.shape != (d,):
                raise SpecValidationError(f"diagonal entries must have shape ({d},), got {diag.shape}")
            self.entries = _freeze(diag)
        else:
            self.entries = _validate_triplets(self.entries, d)

    # -- serialization ---------------------------------------------------

    def to_json_dict(self) -> dict:
        """Canonical JSON form: kind, dim, norm, entries, in that order."""
        if self.kind == KIND_SPARSE:
            rows, cols, vals = self.entries
            payload = [[int(r), int(c), float(v)] for r, c, v in zip(rows, cols, vals)]
        elif self.kind == KIND_DENSE:
            payload = [[float(v) for v in row] for row in self.entries]
        else:
            payload = [float(v) for v in self.entries]
        return {"kind": self.kind, "dim": self.dim, "norm": self.norm_tag, "entries": payload}

    @classmethod
    def from_json_dict(cls, obj) -> "OperatorSpec":
        if not isinstance(obj, dict):
            raise SpecValidationError(f"operator spec must be a JSON object, got {type(obj).__name__}")
        missing = [key for key in ("kind", "dim", "norm", "entries") if key not in obj]
        if missing:
            raise SpecValidationError(f"operator spec is missing fields: {', '.join(missing)}")
        return cls(kind=obj["kind"], dim=obj["dim"], entries=obj["entries"], norm_tag=obj["norm"])


def _as_float_array(values, what: str) -> np.ndarray:
    try:
        arr = np.asarray(values, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise SpecValidationError(f"{what} must be real numbers: {exc}") from None
    if arr.size and not np.all(np.isfinite(arr)):
        raise SpecValidationError(f"{what} must be finite")
    return arr


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _validate_triplets(entries, dim: int):
    try:
        triplets = [(int(r), int(c), float(v)) for r, c, v in entries]
    except (TypeError, ValueError) as exc:
        raise SpecValidationError(f"sparse entries must be (row, col, value) triplets: {exc}") from None
    seen = set()
    for r, c, v in triplets:
        if not (0 <= r < dim and 0 <= c < dim):
            raise SpecValidationError(f"sparse index ({r}, {c}) out of range for dim {dim}")
        if (r, c) in seen:
            raise SpecValidationError(f"duplicate sparse index ({r}, {c})")
        if not math.isfinite(v):
            raise SpecValidationError("sparse values must be finite")
        seen.add((r, c))
    rows = _freeze(np.array([t[0] for t in triplets], dtype=np.int64))
    cols = _freeze(np.array([t[1] for t in triplets], dtype=np.int64))
    vals = _freeze(np.array([t[2] for t in triplets], dtype=np.float64))
    return rows, cols, vals


# -- application ---------------------------------------------------------


def apply(spec: OperatorSpec, x: np.ndarray) -> np.ndarray:
    """Apply the operator to a vector, returning a fresh array.

    Raises
    ------
    DimensionMismatchError
        If `x` does not have shape (spec.dim,).
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (spec.dim,):
        raise DimensionMismatchError(
            f"operator has dim {spec.dim} but vector has shape {x.shape}"
        )
    return apply_columns(spec, x[:, None])[:, 0]


def apply_columns(spec: OperatorSpec, X: np.ndarray) -> np.ndarray:
    """Apply the operator to each column of a (dim, p) array at once."""
    if X.ndim != 2 or X.shape[0] != spec.dim:
        raise DimensionMismatchError(
            f"operator has dim {spec.dim} but column block has shape {X.shape}"
        )
    if spec.kind == KIND_DENSE:
        return spec.entries @ X
    if spec.kind == KIND_DIAGONAL:
        return spec.entries[:, None] * X
    if spec.kind == KIND_SHIFT:
        out = np.zeros_like(X)
        if spec.dim > 1:
            out[:-1] = spec.entries[:, None] * X[1:]
        return out
    rows, cols, vals = spec.entries
    out = np.zeros_like(X)
    np.add.at(out, rows, vals[:, None] * X[cols])
    return out


def as_dense(spec: OperatorSpec) -> np.ndarray:
    """Materialize the operator as a dense (dim, dim) matrix."""
    d = spec.dim
    if spec.kind == KIND_DENSE:
        return np.array(spec.entries)
    if spec.kind == KIND_DIAGONAL:
        return np.diag(spec.entries)
    if spec.kind == KIND_SHIFT:
        mat = np.zeros((d, d))
        if d > 1:
            mat[np.arange(d - 1), np.arange(1, d)] = spec.entries
        return mat
    rows, cols, vals = spec.entries
    mat = np.zeros((d, d))
    mat[rows, cols] = vals
    return mat


# -- norms ---------------------------------------------------------------


def vec_norm(x: np.ndarray, norm_tag: str) -> float:
    """Norm of a vector under one of the three ambient norms."""
    x = np.asarray(x, dtype=np.float64)
    if norm_tag == "l1":
        return float(np.sum(np.abs(x)))
    if norm_tag == "l2":
        return float(np.linalg.norm(x))
    if norm_tag == "linf":
        return float(np.max(np.abs(x))) if x.size else 0.0
    raise ValueError(f"unknown norm tag {norm_tag!r}")


def column_norms(X: np.ndarray, norm_tag: str) -> np.ndarray:
    """Per-column vector norms of a (dim, p) array."""
    if norm_tag == "l1":
        return np.sum(np.abs(X), axis=0)
    if norm_tag == "l2":
        return np.linalg.norm(X, axis=0)
    if norm_tag == "linf":
        return np.max(np.abs(X), axis=0)
    raise ValueError(f"unknown norm tag {norm_tag!r}")


def matrix_norm(mat: np.ndarray, norm_tag: str) -> float:
    """Exact induced operator norm of a dense matrix.

    l1 is the max column abs-sum, linf the max row abs-sum, l2 the largest
    singular value (computed by LAPACK SVD).
    """
    if norm_tag == "l1":
        return float(np.max(np.sum(np.abs(mat), axis=0)))
    if norm_tag == "linf":
        return float(np.max(np.sum(np.abs(mat), axis=1)))
    if norm_tag == "l2":
        return float(np.linalg.norm(mat, 2))
    raise ValueError(f"unknown norm tag {norm_tag!r}")


def _l2_norm_power_iteration(mat: np.ndarray, rtol: float = 1e-10, max_iter: int = 10_000) -> float:
    """Largest singular value by power iteration on M^T M.

    Runs a handful of seeded restarts and keeps the best Rayleigh estimate;
    iteration stops once the estimate is stable to `rtol`.
    """
    d = mat.shape[1]
    gram = mat.T @ mat
    rng = np.random.default_rng(DEFAULT_SEED)
    best = 0.0
    for _ in range(4):
        v = rng.standard_normal(d)
        nv = np.linalg.norm(v)
        if nv == 0.0:
            continue
        v /= nv
        sigma_sq = 0.0
        for _ in range(max_iter):
            w = gram @ v
            nw = np.linalg.norm(w)
            if nw == 0.0:
                sigma_sq = 0.0
                break
            v = w / nw
            new_sigma_sq = float(v @ (gram @ v))
            if abs(new_sigma_sq - sigma_sq) <= rtol * max(new_sigma_sq, 1e-300):
                sigma_sq = new_sigma_sq
                break
            sigma_sq = new_sigma_sq
        best = max(best, math.sqrt(max(sigma_sq, 0.0)))
    return best


class OperatorNorm(NamedTuple):
    value: float
    exact: bool


def operator_norm(
    spec: OperatorSpec,
    mode: str = "exact",
    probes: "ProbeSet | None" = None,
    dense_cap: int = DENSE_CAP,
) -> OperatorNorm:
    """Operator norm of the spec under its ambient norm.

    Parameters
    ----------
    mode : str
        ``exact`` computes the induced norm in closed form (l1/linf) or by
        power iteration converged to relative tolerance 1e-10 (l2); it is
        only available for dim <= `dense_cap`.  ``probe`` returns the max of
        ||T x|| / ||x|| over the given probe set, a lower bound flagged as
        inexact.
    """
    if mode == "exact":
        if spec.dim > dense_cap:
            raise CapExceededError(
                f"exact operator norm is capped at dim {dense_cap} (got {spec.dim}); "
                "use mode='probe' for a lower bound"
            )
        mat = as_dense(spec)
        if spec.norm_tag == "l2":
            return OperatorNorm(_l2_norm_power_iteration(mat), True)
        return OperatorNorm(matrix_norm(mat, spec.norm_tag), True)
    if mode == "probe":
        if probes is None:
            raise ValueError("mode='probe' requires a probe set")
        images = apply_columns(spec, probes.vectors.T)
        ratios = column_norms(images, spec.norm_tag) / np.maximum(
            column_norms(probes.vectors.T, spec.norm_tag), 1e-300
        )
        value = float(np.max(ratios)) if ratios.size else 0.0
        return OperatorNorm(value, False)
    raise ValueError(f"unknown operator_norm mode {mode!r}")


# -- probe sets ----------------------------------------------------------


@dataclass(eq=False)
class ProbeSet:
    """An ordered set of unit-ball probe vectors with a provenance label.

    `vectors` has shape (count, dim); order is part of the identity of the
    set, since witness selection scans probes in this order.
    """

    vectors: np.ndarray
    norm_tag: str
    label: str

    def __post_init__(self):
        vecs = np.asarray(self.vectors, dtype=np.float64)
        if vecs.ndim != 2:
            raise SpecValidationError("probe vectors must form a (count, dim) array")
        if vecs.shape[0] == 0:
            raise SpecValidationError("probe set must contain at least one probe")
        norms = column_norms(vecs.T, self.norm_tag)
        worst = float(np.max(norms))
        if worst > 1.0 + UNIT_BALL_SLACK:
            raise SpecValidationError(
                f"probe norm {worst} exceeds the unit ball slack 1+{UNIT_BALL_SLACK}"
            )
        self.vectors = _freeze(vecs)

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def __getitem__(self, index: int) -> np.ndarray:
        return self.vectors[index]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def basis_probes(dim: int, norm_tag: str, count: int | None = None) -> ProbeSet:
    """The first `count` canonical basis vectors (default min(dim, 32))."""
    count = min(dim, 32) if count is None else count
    if not 1 <= count <= dim:
        raise ValueError(f"basis probe count must be in [1, {dim}], got {count}")
    vecs = np.eye(dim)[:count]
    return ProbeSet(vecs, norm_tag, f"canonical-basis-0..{count - 1}")


def default_probes(
    spec_or_dim,
    norm_tag: str | None = None,
    seed: int = DEFAULT_SEED,
    random_count: int = 16,
) -> ProbeSet:
    """Deterministic default probe set for an operator.

    The first min(dim, 32) canonical basis vectors, followed by
    `random_count` seeded random vectors normalized to unit ambient norm.
    """
    if isinstance(spec_or_dim, OperatorSpec):
        dim, norm_tag = spec_or_dim.dim, spec_or_dim.norm_tag
    else:
        dim = int(spec_or_dim)
        if norm_tag is None:
            raise ValueError("norm_tag is required when passing a bare dimension")
    k = min(dim, 32)
    parts = [np.eye(dim)[:k]]
    if random_count:
        rng = np.random.default_rng(seed)
        raw = rng.standard_normal((random_count, dim))
        raw /= column_norms(raw.T, norm_tag)[:, None]
        parts.append(raw)
    label = f"canonical-basis-0..{k - 1}+random-{random_count}(seed={seed:#x})"
    return ProbeSet(np.vstack(parts), norm_tag, label)


# -- gallery -------------------------------------------------------------

_GALLERY_PATTERN = re.compile(r"^([a-z0-9_]+)\(([^()]*)\)$")


def gallery(name: str) -> OperatorSpec:
    """Build a gallery operator from a textual name like ``identity(8)``.

    Available entries: identity(d), zero(d), left_shift_l1(d), scalar(v),
    jordan_1(d), rotation(theta), random_diagonalizable(seed, d).
    """
    match = _GALLERY_PATTERN.match(name.strip())
    if not match:
        raise ValueError(f"cannot parse gallery name {name!r}; {_gallery_help()}")
    base, arg_text = match.group(1), match.group(2)
    args = [a.strip() for a in arg_text.split(",")] if arg_text.strip() else []
    builders = {
        "identity": _gallery_identity,
        "zero": _gallery_zero,
        "left_shift_l1": _gallery_left_shift,
        "scalar": _gallery_scalar,
        "jordan_1": _gallery_jordan,
        "rotation": _gallery_rotation,
        "random_diagonalizable": _gallery_random_diagonalizable,
    }
    if base not in builders:
        raise ValueError(f"unknown gallery entry {base!r}; {_gallery_help()}")
    try:
        return builders[base](args)
    except (TypeError, ValueError, SpecValidationError) as exc:
        if isinstance(exc, SpecValidationError):
            raise
        raise ValueError(f"bad arguments for gallery entry {base!r}: {exc}") from None


def _gallery_help() -> str:
    return (
        "available entries: identity(d), zero(d), left_shift_l1(d), scalar(v), "
        "jordan_1(d), rotation(theta), random_diagonalizable(seed,d)"
    )


def _gallery_identity(args):
    (d,) = map(int, args)
    return OperatorSpec(KIND_DIAGONAL, d, np.ones(d), "l2")


def _gallery_zero(args):
    (d,) = map(int, args)
    return OperatorSpec(KIND_DIAGONAL, d, np.zeros(d), "l2")


def _gallery_left_shift(args):
    (d,) = map(int, args)
    return OperatorSpec(KIND_SHIFT, d, np.ones(max(d - 1, 0)), "l1")


def _gallery_scalar(args):
    (value,) = map(float, args)
    return OperatorSpec(KIND_DIAGONAL, 1, np.array([value]), "l2")


def _gallery_jordan(args):
    (d,) = map(int, args)
    mat = np.eye(d)
    if d > 1:
        mat[np.arange(d - 1), np.arange(1, d)] = 1.0
    return OperatorSpec(KIND_DENSE, d, mat, "l2")


def _gallery_rotation(args):
    (theta,) = map(float, args)
    c, s = math.cos(theta), math.sin(theta)
    return OperatorSpec(KIND_DENSE, 2, np.array([[c, -s], [s, c]]), "l2")


def _gallery_random_diagonalizable(args):
    seed, d = int(args[0]), int(args[1])
    rng = np.random.default_rng(seed)
    # Eigenvalues: a seeded count of exact ones, the rest kept away from 1
    # so that Cesaro convergence has a uniform rate floor.
    n_ones = int(rng.integers(0, 3))
    eigs = np.concatenate([np.ones(n_ones), rng.uniform(-0.85, 0.85, d - n_ones)])
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    mat = q @ np.diag(eigs) @ q.T
    mat = (mat + mat.T) / 2.0
    return OperatorSpec(KIND_DENSE, d, mat, "l2")


def built_in_gallery() -> list[str]:
    """Concrete gallery instances exercised by the acceptance suite."""
    return [
        "identity(8)",
        "zero(4)",
        "scalar(1.0)",
        "scalar(0.5)",
        "scalar(-1.0)",
        "scalar(2.0)",
        "jordan_1(2)",
        "rotation(1.0)",
        "left_shift_l1(64)",
        "random_diagonalizable(7,12)",
    ]
