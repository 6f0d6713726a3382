"""Curvature of homogeneous Norden models and the scalar invariants built from it.

``R[i, j, k, l] = R(e_i, e_j, e_k, e_l) = g(R(e_i, e_j) e_k, e_l)`` with
``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X, Y]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IsotropicPlane
from .lie import Connection, LieAlgebra
from .structure import NordenStructure

EPS_ISO = 1e-8


def curvature_tensor(conn: Connection, model: LieAlgebra, g) -> np.ndarray:
    """Covariant curvature tensor in the constant frame.

    R(e_i,e_j)e_k = nabla_i nabla_j e_k - nabla_j nabla_i e_k - nabla_[e_i,e_j] e_k,
    lowered on the last index with ``g``.
    """
    gam = conn.gamma
    C = model.structure_constants
    up = (
        np.einsum("jkm,iml->ijkl", gam, gam)
        - np.einsum("ikm,jml->ijkl", gam, gam)
        - np.einsum("ijm,mkl->ijkl", C, gam)
    )
    return np.einsum("ijkp,pl->ijkl", up, np.asarray(g, dtype=float))


def curvature_symmetry_residuals(R) -> dict[str, float]:
    """Relative residuals of the algebraic curvature identities."""
    scale = max(1.0, float(np.abs(R).max()))
    return {
        "antisym_12": float(np.abs(R + R.transpose(1, 0, 2, 3)).max()) / scale,
        "antisym_34": float(np.abs(R + R.transpose(0, 1, 3, 2)).max()) / scale,
        "pair_exchange": float(np.abs(R - R.transpose(2, 3, 0, 1)).max()) / scale,
        "bianchi": float(np.abs(R + R.transpose(1, 2, 0, 3) + R.transpose(2, 0, 1, 3)).max())
        / scale,
    }


def ricci_and_scalars(R, s: NordenStructure):
    """Return ``(rho, rho_star, tau, tau_star2)``.

    rho(y,z)    = g^ij R(e_i, y, z, e_j)
    rho*(y,z)   = g^ij R(e_i, y, z, J e_j)
    tau         = g^jk rho(e_j, e_k)
    tau**       = g^ij g^kl R(e_i, e_k, J e_l, J e_j)
    """
    gi, J = s.g_inv, s.J
    rho = np.einsum("ij,iyzj->yz", gi, R)
    rho_star = np.einsum("ij,iyzm,mj->yz", gi, R, J)
    tau = float(np.einsum("yz,yz->", gi, rho))
    tau_star2 = float(np.einsum("ij,kl,ikab,al,bj->", gi, gi, R, J, J))
    return rho, rho_star, tau, tau_star2


def nabla_J_gram(DJ, g) -> np.ndarray:
    """``G[i, a, j, b] = g((nabla_{e_i} J) e_a, (nabla_{e_j} J) e_b)``."""
    return np.einsum("ipa,pq,jqb->iajb", DJ, g, DJ)


def square_norm_nabla_J(DJ, g, g_inv) -> float:
    """||nabla J|| = g^ij g^kl g((nabla_{e_i} J) e_k, (nabla_{e_j} J) e_l)

    Not a norm in the positive-definite sense: with a split-signature metric it
    can vanish, or turn negative, while ``nabla J`` is nonzero.
    """
    G = nabla_J_gram(DJ, g)
    return float(np.einsum("ij,kl,ikjl->", g_inv, g_inv, G))


def isotropic_kahler_flags(DJ, snorm: float, eps: float = 1e-8) -> tuple[bool, bool]:
    """``(is_kahler, is_isotropic_kahler)``."""
    return bool(np.abs(DJ).max() <= eps), bool(abs(snorm) <= eps)


@dataclass(frozen=True)
class CurvatureData:
    R: np.ndarray
    rho: np.ndarray
    rho_star: np.ndarray
    tau: float
    tau_star2: float
    snorm: float


def holomorphic_form(R, J, x, y) -> float:
    """R(x, Jx, y, Jy)"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(np.einsum("abcd,a,b,c,d->", R, x, J @ x, y, J @ y))


def plane_norm_sq(s: NordenStructure, x) -> float:
    """g(x,x)^2 + g(x,Jx)^2 for the holomorphic plane spanned by ``(x, Jx)``."""
    x = np.asarray(x, dtype=float)
    return float((x @ s.g @ x) ** 2 + (x @ s.g @ s.J @ x) ** 2)


def bisectional_curvature(R, s: NordenStructure, x, y, eps_iso: float = EPS_ISO) -> float:
    """Holomorphic bisectional curvature of the planes ``{x, Jx}`` and ``{y, Jy}``.

    h(x, y) = -R(x, Jx, y, Jy) / (sqrt(Dx) sqrt(Dy)),
    D = g(.,.)^2 + g(., J.)^2.

    Raises
    ------
    IsotropicPlane
        If either plane is (numerically) strongly isotropic, ``D <= eps_iso**2``.
    """
    dx = plane_norm_sq(s, x)
    dy = plane_norm_sq(s, y)
    if dx <= eps_iso**2 or dy <= eps_iso**2:
        raise IsotropicPlane(f"plane norm too small: Dx={dx:.3e}, Dy={dy:.3e}")
    return -holomorphic_form(R, s.J, x, y) / (np.sqrt(dx) * np.sqrt(dy))
