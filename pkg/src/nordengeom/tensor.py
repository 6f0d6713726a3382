"""Dense multilinear algebra on a 2n-dimensional real model space.

Tensors are plain ``numpy`` arrays of shape ``(dim,) * rank``; index order is
the argument order, so ``T[i, j, k]`` is ``T(e_i, e_j, e_k)``.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateMetric, SlotOutOfRange

EPS_LIN = 1e-10
EPS_DEG = 1e-8


def as_tensor(components, dim: int, rank: int) -> np.ndarray:
    """Coerce ``components`` to a float tensor of shape ``(dim,) * rank``.

    A flat row-major array of length ``dim**rank`` is accepted as well.
    """
    if dim < 2 or dim % 2:
        raise ValueError(f"dimension must be even and >= 2, got {dim}")
    arr = np.asarray(components, dtype=float)
    if arr.size != dim**rank:
        raise ValueError(f"expected {dim**rank} components, got {arr.size}")
    return arr.reshape((dim,) * rank)


def metric_inverse(g, eps_deg: float = EPS_DEG, eps_lin: float = EPS_LIN) -> np.ndarray:
    """Inverse of a symmetric nondegenerate metric matrix.

    Raises
    ------
    DegenerateMetric
        If ``|det g| <= eps_deg`` or the product residual exceeds ``eps_lin``
        relative to the size of the inverse.
    """
    g = np.asarray(g, dtype=float)
    if abs(np.linalg.det(g)) <= eps_deg:
        raise DegenerateMetric(f"|det g| = {abs(np.linalg.det(g)):.3e} <= {eps_deg:g}")
    inv = np.linalg.inv(g)
    inv = 0.5 * (inv + inv.T)
    resid = np.abs(g @ inv - np.eye(len(g))).max()
    if resid > eps_lin * max(1.0, np.abs(inv).max() * np.abs(g).max()):
        raise DegenerateMetric(f"inverse residual {resid:.3e} too large")
    return inv


def signature(g, eps_deg: float = EPS_DEG) -> tuple[int, int]:
    """Return ``(positive, negative)`` eigenvalue counts of a symmetric matrix.

    Eigenvalues within ``eps_deg`` of zero are never silently classified.
    """
    w = np.linalg.eigvalsh(np.asarray(g, dtype=float))
    if np.any(np.abs(w) <= eps_deg):
        raise DegenerateMetric(f"eigenvalue of magnitude <= {eps_deg:g}: {w}")
    return int(np.sum(w > 0)), int(np.sum(w < 0))


@dataclass(frozen=True)
class Metric:
    """Symmetric nondegenerate metric with its cached inverse."""

    entries: np.ndarray
    inverse: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        g = np.array(self.entries, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError(f"metric must be square, got shape {g.shape}")
        g = 0.5 * (g + g.T)
        g.setflags(write=False)
        inv = metric_inverse(g)
        inv.setflags(write=False)
        object.__setattr__(self, "entries", g)
        object.__setattr__(self, "inverse", inv)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def signature(self) -> tuple[int, int]:
        return signature(self.entries)


def contract(T, slots: Sequence[tuple[int, int]], weights: Sequence) -> np.ndarray:
    """Contract pairs of slots of ``T`` against weight matrices.

    For each pair ``(a, b)`` with weight ``W`` this forms
    ``sum_{p,q} W[p, q] T[..., p (slot a), ..., q (slot b), ...]``.
    Slot numbers refer to the original tensor, so the result does not depend
    on the order in which pairs are listed. Remaining slots keep their order.
    """
    T = np.asarray(T, dtype=float)
    rank = T.ndim
    if len(slots) != len(weights):
        raise ValueError("one weight matrix per slot pair is required")
    used: list[int] = []
    for a, b in slots:
        for s in (a, b):
            if not 0 <= s < rank:
                raise SlotOutOfRange(f"slot {s} outside rank {rank}")
        used += [a, b]
    if len(set(used)) != len(used):
        raise SlotOutOfRange(f"slots must be distinct, got {list(slots)}")

    letters = string.ascii_letters
    idx = list(letters[:rank])
    operands = [T]
    subs = ["".join(idx)]
    for (a, b), W in zip(slots, weights):
        W = np.asarray(W, dtype=float)
        if W.shape != (T.shape[a], T.shape[b]):
            raise ValueError(f"weight shape {W.shape} does not match slots {(a, b)}")
        operands.append(W)
        subs.append(idx[a] + idx[b])
    out = "".join(c for i, c in enumerate(idx) if i not in used)
    return np.einsum(",".join(subs) + "->" + out, *operands)


def twist(T, J, slots: Sequence[int]) -> np.ndarray:
    """Insert ``J`` into the given argument slots: ``T(.., J x, ..)``.

    ``J`` acts on column vectors, ``J e_a = J[m, a] e_m``.
    """
    T = np.asarray(T, dtype=float)
    for s in slots:
        T = np.moveaxis(np.tensordot(T, J, axes=([s], [0])), -1, s)
    return T


def relative_residual(total, *terms) -> float:
    """Max-norm of ``total`` over the largest participating term (floored at 1)."""
    scale = max([1.0] + [float(np.abs(t).max()) for t in terms])
    return float(np.abs(total).max()) / scale
