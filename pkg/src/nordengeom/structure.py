"""Almost complex structures with Norden metric and their fundamental tensors.

``J`` is stored as the matrix acting on column vectors, ``J e_j = J[m, j] e_m``.
The covariant derivative ``nabla J`` is stored as ``DJ[i, k, j]``, the matrix of
``nabla_{e_i} J``; ``F[i, j, k] = F(e_i, e_j, e_k) = g((nabla_{e_i} J) e_j, e_k)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotAlmostComplex, NotNordenCompatible, WrongSignature
from .lie import Connection
from .tensor import EPS_LIN, Metric

EPS_CLASS = 1e-8


@dataclass(frozen=True)
class NordenStructure:
    J: np.ndarray
    metric: Metric

    @property
    def dim(self) -> int:
        return self.J.shape[0]

    @property
    def n(self) -> int:
        return self.dim // 2

    @property
    def g(self) -> np.ndarray:
        return self.metric.entries

    @property
    def g_inv(self) -> np.ndarray:
        return self.metric.inverse

    def transformed(self, P) -> "NordenStructure":
        """The same structure written in the frame ``f_a = P[i, a] e_i``."""
        P = np.asarray(P, dtype=float)
        Pinv = np.linalg.inv(P)
        return validate_norden(Pinv @ self.J @ P, P.T @ self.g @ P)


def validate_norden(J, g, eps: float = EPS_LIN) -> NordenStructure:
    """Validate ``J^2 = -I``, ``g(JX, JY) = -g(X, Y)`` and split signature.

    Residuals are measured relative to ``max(1, max|J|^2)`` and
    ``max(1, max|J|^2 max|g|)`` respectively, since a conjugated ``J`` may
    carry large entries.
    """
    J = np.array(J, dtype=float)
    g = np.array(g, dtype=float)
    if J.ndim != 2 or J.shape[0] != J.shape[1] or g.shape != J.shape:
        raise ValueError(f"J and g must be square of equal size, got {J.shape}, {g.shape}")
    dim = J.shape[0]
    if dim < 2 or dim % 2:
        raise ValueError(f"dimension must be even and >= 2, got {dim}")
    if np.abs(g - g.T).max() > eps * max(1.0, np.abs(g).max()):
        raise NotNordenCompatible("metric matrix is not symmetric")

    jscale = max(1.0, float(np.abs(J).max()))
    sq = np.abs(J @ J + np.eye(dim)).max()
    if sq > eps * jscale**2:
        raise NotAlmostComplex(f"max|J^2 + I| = {sq:.3e}")
    compat = np.abs(J.T @ g @ J + g).max()
    if compat > eps * jscale**2 * max(1.0, np.abs(g).max()):
        raise NotNordenCompatible(f"max|J^T g J + g| = {compat:.3e}")

    metric = Metric(g)
    pos, neg = metric.signature()
    if (pos, neg) != (dim // 2, dim // 2):
        raise WrongSignature(f"signature ({pos},{neg}), expected ({dim // 2},{dim // 2})")
    J.setflags(write=False)
    return NordenStructure(J, metric)


def associated_metric(s: NordenStructure) -> np.ndarray:
    """g~(X, Y) = g(X, JY)."""
    gt = s.g @ s.J
    return 0.5 * (gt + gt.T)


def nabla_J(conn: Connection, s: NordenStructure) -> np.ndarray:
    """``DJ[i, k, j] = (nabla_{e_i} J)^k_j = gamma^k_im J^m_j - J^k_m gamma^m_ij``."""
    gam = conn.gamma
    return np.einsum("imk,mj->ikj", gam, s.J) - np.einsum("km,ijm->ikj", s.J, gam)


def f_tensor(conn: Connection, s: NordenStructure) -> np.ndarray:
    """F(e_i, e_j, e_k) = g((nabla_{e_i} J) e_j, e_k)."""
    return np.einsum("ilj,lk->ijk", nabla_J(conn, s), s.g)


def lie_form(F, g_inv) -> np.ndarray:
    """theta_k = g^ij F_ijk"""
    return np.einsum("ij,ijk->k", g_inv, F)


def nabla_F(conn: Connection, F) -> np.ndarray:
    """``(nabla_{e_i} F)_{jkl}`` for constant frame components of ``F``."""
    gam = conn.gamma
    return -(
        np.einsum("ijm,mkl->ijkl", gam, F)
        + np.einsum("ikm,jml->ijkl", gam, F)
        + np.einsum("ilm,jkm->ijkl", gam, F)
    )


def cyclic_sum(T) -> np.ndarray:
    """Cyclic sum over the first three slots: T(x,y,z) + T(y,z,x) + T(z,x,y)."""
    T = np.asarray(T)
    rest = tuple(range(3, T.ndim))
    return T + T.transpose((1, 2, 0) + rest) + T.transpose((2, 0, 1) + rest)


def w1_tensor(theta, s: NordenStructure, coefficient: float | None = None) -> np.ndarray:
    """The W1 tensor built from a covector ``theta``.

    Returns ``c {g(x,y)theta(z) + g(x,z)theta(y) + g(x,Jy)theta(Jz) + g(x,Jz)theta(Jy)}``.
    The default ``c = 1/(2n)`` is the normalization for which the Lie form of the
    result is ``theta`` again. With ``coefficient=1/(4n)`` the Lie form of the
    result is ``theta/2``.
    """
    theta = np.asarray(theta, dtype=float)
    if coefficient is None:
        coefficient = 1.0 / (2 * s.n)
    g = s.g
    gJ = g @ s.J  # gJ[x, y] = g(x, Jy)
    thJ = theta @ s.J  # thJ[z] = theta(Jz)
    out = (
        np.einsum("xy,z->xyz", g, theta)
        + np.einsum("xz,y->xyz", g, theta)
        + np.einsum("xy,z->xyz", gJ, thJ)
        + np.einsum("xz,y->xyz", gJ, thJ)
    )
    return coefficient * out


@dataclass(frozen=True)
class ClassMembership:
    is_W0: bool
    is_W1: bool
    is_W2: bool
    is_W3: bool
    residual_W0: float
    residual_W1: float
    residual_W2: float
    residual_W3: float
    theta_norm: float
    tolerance: float

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def class_residuals(F, s: NordenStructure) -> dict[str, float]:
    """Absolute max-norm residuals of the W0..W3 defining conditions."""
    F = np.asarray(F, dtype=float)
    theta = lie_form(F, s.g_inv)
    theta_norm = float(np.abs(theta).max())
    r0 = float(np.abs(F).max())
    r1 = float(np.abs(F - w1_tensor(theta, s)).max())
    FJ = np.einsum("xym,mz->xyz", F, s.J)  # F(x, y, Jz)
    r2 = max(float(np.abs(cyclic_sum(FJ)).max()), theta_norm)
    r3 = float(np.abs(cyclic_sum(F)).max())
    return {"W0": r0, "W1": r1, "W2": r2, "W3": r3, "theta": theta_norm}


def classify(F, s: NordenStructure, eps_class: float = EPS_CLASS) -> ClassMembership:
    """Membership in W0 and the three basic classes, with auditable residuals.

    Residuals are taken relative to ``max(1, max|F|)`` so that the threshold is
    meaningful for models of any size; W0 uses the absolute ``max|F|``.
    """
    r = class_residuals(F, s)
    scale = max(1.0, r["W0"])
    r0 = r["W0"]
    res = {k: r[k] / scale for k in ("W1", "W2", "W3")}
    if r0 <= eps_class:
        # W0 lies in every class; |F| itself bounds the distance to each of them.
        res = {k: min(v, r0) for k, v in res.items()}
    return ClassMembership(
        is_W0=r0 <= eps_class,
        is_W1=res["W1"] <= eps_class,
        is_W2=res["W2"] <= eps_class,
        is_W3=res["W3"] <= eps_class,
        residual_W0=r0,
        residual_W1=res["W1"],
        residual_W2=res["W2"],
        residual_W3=res["W3"],
        theta_norm=r["theta"],
        tolerance=eps_class,
    )
