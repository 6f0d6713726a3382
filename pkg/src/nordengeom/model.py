"""A homogeneous Norden model bundled with its derived tensors."""

from __future__ import annotations

from functools import cached_property

import numpy as np

from . import curvature as cv
from .lie import Connection, LieAlgebra, levi_civita, metricity_residual, torsion_residual
from .structure import (
    EPS_CLASS,
    ClassMembership,
    NordenStructure,
    classify,
    f_tensor,
    lie_form,
    nabla_F,
    nabla_J,
)


class NordenModel:
    """Lie algebra + Norden structure on the same frame.

    Derived quantities are computed on first access and cached. ``connection``
    may be supplied to study a connection other than the Levi-Civita one
    (negative controls); everything downstream then uses it.
    """

    def __init__(
        self,
        algebra: LieAlgebra,
        structure: NordenStructure,
        label: str = "",
        connection: Connection | None = None,
    ):
        if algebra.dim != structure.dim:
            raise ValueError(
                f"dimension mismatch: algebra {algebra.dim}, structure {structure.dim}"
            )
        self.algebra = algebra
        self.structure = structure
        self.label = label
        self._connection = connection

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @cached_property
    def connection(self) -> Connection:
        if self._connection is not None:
            return self._connection
        return levi_civita(self.algebra, self.structure.metric)

    @cached_property
    def torsion(self) -> float:
        return torsion_residual(self.connection, self.algebra)

    @cached_property
    def metricity(self) -> float:
        return metricity_residual(self.connection, self.structure.metric)

    @cached_property
    def DJ(self) -> np.ndarray:
        return nabla_J(self.connection, self.structure)

    @cached_property
    def F(self) -> np.ndarray:
        return f_tensor(self.connection, self.structure)

    @cached_property
    def theta(self) -> np.ndarray:
        return lie_form(self.F, self.structure.g_inv)

    @cached_property
    def nabla_F(self) -> np.ndarray:
        return nabla_F(self.connection, self.F)

    @cached_property
    def R(self) -> np.ndarray:
        return cv.curvature_tensor(self.connection, self.algebra, self.structure.g)

    @cached_property
    def curvature(self) -> cv.CurvatureData:
        s = self.structure
        rho, rho_star, tau, tau2 = cv.ricci_and_scalars(self.R, s)
        snorm = cv.square_norm_nabla_J(self.DJ, s.g, s.g_inv)
        return cv.CurvatureData(self.R, rho, rho_star, tau, tau2, snorm)

    def membership(self, eps_class: float = EPS_CLASS) -> ClassMembership:
        return classify(self.F, self.structure, eps_class)

    def max_nabla_J(self) -> float:
        return float(np.abs(self.DJ).max())
