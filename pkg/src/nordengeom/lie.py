"""Homogeneous models: Lie algebras in a fixed frame and their Levi-Civita connection.

Index conventions, fixed for the whole package:

* ``C[i, j, k]`` is the structure constant with ``[e_i, e_j] = C[i, j, k] e_k``.
* ``gamma[i, j, k]`` is the connection coefficient with
  ``nabla_{e_i} e_j = gamma[i, j, k] e_k`` (direction first, argument second).

All tensor components are constant in the frame, so derivatives of components
vanish and every covariant quantity is purely algebraic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AntisymmetryViolation, JacobiViolation
from .tensor import Metric

EPS_JAC = 1e-10


def jacobi_tensor(C: np.ndarray) -> np.ndarray:
    """``J[i, j, k, m]``: the e_m component of the cyclic sum of ``[e_i, [e_j, e_k]]``."""
    t = np.einsum("jkl,ilm->ijkm", C, C)
    return t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)


@dataclass(frozen=True)
class LieAlgebra:
    """Validated structure constants of a ``dim``-dimensional real Lie algebra."""

    structure_constants: np.ndarray

    @property
    def dim(self) -> int:
        return self.structure_constants.shape[0]

    def bracket(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.structure_constants)

    def scaled(self, lam: float) -> "LieAlgebra":
        return validate_lie_algebra(lam * self.structure_constants)


def validate_lie_algebra(C, eps_jac: float = EPS_JAC) -> LieAlgebra:
    """Check antisymmetry and the Jacobi identity, returning a frozen model.

    The tolerance on Jacobi is relative to ``max(1, max|C|**2)``; antisymmetry
    is checked to ``eps_jac * max(1, max|C|)``.
    """
    C = np.array(C, dtype=float)
    if C.ndim != 3 or len(set(C.shape)) != 1:
        raise ValueError(f"structure constants must have shape (d, d, d), got {C.shape}")
    if C.shape[0] < 2 or C.shape[0] % 2:
        raise ValueError(f"dimension must be even and >= 2, got {C.shape[0]}")
    scale = max(1.0, float(np.abs(C).max()))

    asym = np.abs(C + C.transpose(1, 0, 2))
    if asym.max() > eps_jac * scale:
        i, j, k = np.unravel_index(asym.argmax(), asym.shape)
        raise AntisymmetryViolation(
            f"C[{i},{j},{k}] + C[{j},{i},{k}] = {asym[i, j, k]:.3e}"
        )
    jac = np.abs(jacobi_tensor(C))
    if jac.max() > eps_jac * scale**2:
        i, j, k, m = np.unravel_index(jac.argmax(), jac.shape)
        raise JacobiViolation(
            f"Jacobi residual {jac.max():.3e} at (i,j,k)=({i},{j},{k}), component {m}"
        )
    C = 0.5 * (C - C.transpose(1, 0, 2))  # exact antisymmetry for sparse storage
    C.setflags(write=False)
    return LieAlgebra(C)


def jacobi_residual(C) -> float:
    return float(np.abs(jacobi_tensor(np.asarray(C, dtype=float))).max())


@dataclass(frozen=True)
class Connection:
    gamma: np.ndarray

    @property
    def dim(self) -> int:
        return self.gamma.shape[0]

    def perturbed(self, i: int, j: int, k: int, delta: float) -> "Connection":
        """Copy with ``gamma[i, j, k]`` shifted by ``delta`` (negative controls)."""
        gam = self.gamma.copy()
        gam[i, j, k] += delta
        gam.setflags(write=False)
        return Connection(gam)


def levi_civita(model: LieAlgebra, g: Metric) -> Connection:
    """Levi-Civita connection of a left-invariant metric via the Koszul formula.

    2 g(nabla_X Y, Z) = g([X,Y],Z) - g([Y,Z],X) + g([Z,X],Y)
    """
    if model.dim != g.dim:
        raise ValueError(f"dimension mismatch: algebra {model.dim}, metric {g.dim}")
    Cl = np.einsum("ijm,mk->ijk", model.structure_constants, g.entries)
    lowered = 0.5 * (Cl - Cl.transpose(2, 0, 1) + Cl.transpose(1, 2, 0))
    gam = np.einsum("ijl,lk->ijk", lowered, g.inverse)
    gam.setflags(write=False)
    return Connection(gam)


def torsion_residual(conn: Connection, model: LieAlgebra) -> float:
    """max |gamma^k_ij - gamma^k_ji - C^k_ij|"""
    gam = conn.gamma
    return float(np.abs(gam - gam.transpose(1, 0, 2) - model.structure_constants).max())


def metricity_residual(conn: Connection, g: Metric) -> float:
    """max |gamma^m_ij g_mk + gamma^m_ik g_jm|, i.e. nabla g in a constant frame."""
    low = np.einsum("ijm,mk->ijk", conn.gamma, g.entries)
    return float(np.abs(low + low.transpose(0, 2, 1)).max())
