"""Seeded construction of Norden models.

All randomness comes from ``numpy.random.default_rng(seed)``, i.e. the PCG64
bit generator, so a ``(kind, dim, seed)`` triple reproduces a model exactly.

Quasi-Kaehler (W3) models are found by linear algebra. For a fixed Norden
structure the map ``C -> F`` (structure constants to fundamental tensor) is
linear, so the W3 condition is a linear system on the free bracket parameters
of a family in which the Jacobi identity cannot fail:

* ``"nilpotent"``: 2-step nilpotent brackets ``[V, V] in Z``, ``[., Z] = 0``
  on a split ``V + Z`` of a frame adapted to ``(J, g)``. Used for dim >= 6.
* ``"projected"``: the W3 solution space of *all* antisymmetric brackets,
  followed by a Gauss-Newton projection onto the Jacobi variety inside that
  space. Needed in dim 4, where every 2-step nilpotent W3 solution is abelian.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, least_squares

from .curvature import square_norm_nabla_J
from .errors import NotFound, OnlyKahlerSolutions, RetriesExhausted
from .lie import LieAlgebra, jacobi_tensor, levi_civita, validate_lie_algebra
from .model import NordenModel
from .structure import NordenStructure, cyclic_sum, f_tensor, nabla_J, validate_norden
from .tensor import Metric
from .verify import complex_orthonormal_frame

NULLSPACE_RTOL = 1e-10
METRIC_ATTEMPTS = 1000
KINDS = ("kahler", "random", "w3", "isotropic-w3")


@dataclass(frozen=True)
class GeneratorConfig:
    dim: int = 4
    seed: int = 0
    max_retries: int = 50
    low: float = -1.0
    high: float = 1.0
    split: int | None = None  # size of V in the nilpotent family, default dim // 2

    def __post_init__(self):
        if self.dim not in (4, 6, 8):
            raise ValueError(f"dim must be 4, 6 or 8, got {self.dim}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def rng(self, stream: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, stream])

    @property
    def v_size(self) -> int:
        return self.dim // 2 if self.split is None else self.split


def canonical_norden(dim: int) -> NordenStructure:
    """J0 e_i = e_{n+i}, J0 e_{n+i} = -e_i and g0 = diag(I_n, -I_n)."""
    n = dim // 2
    J = np.zeros((dim, dim))
    J[n:, :n] = np.eye(n)
    J[:n, n:] = -np.eye(n)
    g = np.diag([1.0] * n + [-1.0] * n)
    return validate_norden(J, g)


def random_frame(rng, dim: int, low=-1.0, high=1.0, max_retries=1000) -> np.ndarray:
    """Identity plus a uniform perturbation, resampled until |det P| > 0.1."""
    for _ in range(max_retries):
        P = np.eye(dim) + 0.5 * rng.uniform(low, high, (dim, dim))
        if abs(np.linalg.det(P)) > 0.1 and np.linalg.cond(P) < 50:
            return P
    raise RetriesExhausted("no well-conditioned frame change found")


def random_norden(cfg: GeneratorConfig, rng=None) -> NordenStructure:
    """J = P J0 P^-1 and g = h - J^T h J for sampled P and symmetric h."""
    rng = cfg.rng(1) if rng is None else rng
    J0 = canonical_norden(cfg.dim).J
    P = random_frame(rng, cfg.dim, cfg.low, cfg.high)
    J = P @ J0 @ np.linalg.inv(P)
    for _ in range(METRIC_ATTEMPTS):
        h = rng.uniform(cfg.low, cfg.high, (cfg.dim, cfg.dim))
        h = 0.5 * (h + h.T)
        g = h - J.T @ h @ J
        w = np.abs(np.linalg.eigvalsh(g))
        if w.min() > 0.01 * w.max():
            return validate_norden(J, g)
    raise RetriesExhausted("could not sample a well-conditioned Norden metric")


def transform_brackets(C, P) -> np.ndarray:
    """Structure constants in the frame ``f_a = P[i, a] e_i``."""
    return np.einsum("ia,jb,ijk,ck->abc", P, P, C, np.linalg.inv(P))


def nilpotent_basis(dim: int, v_size: int) -> np.ndarray:
    """Unit brackets [e_a, e_b] = e_z with a < b in V = {0..v_size-1}, z in Z."""
    out = []
    for a, b in itertools.combinations(range(v_size), 2):
        for z in range(v_size, dim):
            C = np.zeros((dim, dim, dim))
            C[a, b, z] = 1.0
            C[b, a, z] = -1.0
            out.append(C)
    return np.array(out)


def full_basis(dim: int) -> np.ndarray:
    """Unit brackets [e_a, e_b] = e_k for all a < b and k."""
    out = []
    for a, b in itertools.combinations(range(dim), 2):
        for k in range(dim):
            C = np.zeros((dim, dim, dim))
            C[a, b, k] = 1.0
            C[b, a, k] = -1.0
            out.append(C)
    return np.array(out)


def random_nilpotent_algebra(cfg: GeneratorConfig, rng=None) -> LieAlgebra:
    """2-step nilpotent algebra with uniformly sampled bracket coefficients."""
    rng = cfg.rng(2) if rng is None else rng
    basis = nilpotent_basis(cfg.dim, cfg.v_size)
    coeffs = rng.uniform(cfg.low, cfg.high, len(basis))
    return validate_lie_algebra(np.tensordot(coeffs, basis, 1))


def random_almost_abelian_algebra(cfg: GeneratorConfig, rng=None) -> LieAlgebra:
    """[e_0, e_a] = A e_a on the abelian ideal spanned by e_1..e_{dim-1}."""
    rng = cfg.rng(3) if rng is None else rng
    d = cfg.dim
    A = rng.uniform(cfg.low, cfg.high, (d - 1, d - 1))
    C = np.zeros((d, d, d))
    C[0, 1:, 1:] = A.T  # [e_0, e_a] = A[b, a] e_b
    C[1:, 0, 1:] = -A.T
    return validate_lie_algebra(C)


def random_model(cfg: GeneratorConfig) -> NordenModel:
    """Random Norden structure on a random nilpotent or almost abelian algebra."""
    rng = cfg.rng(4)
    s = random_norden(cfg, rng)
    if rng.integers(2) == 0:
        alg = random_nilpotent_algebra(cfg, rng)
    else:
        alg = random_almost_abelian_algebra(cfg, rng)
    return NordenModel(alg, s, label=f"random dim={cfg.dim} seed={cfg.seed}")


def kahler_model(dim: int) -> NordenModel:
    """Abelian algebra with the canonical structure: flat and Kaehler."""
    alg = validate_lie_algebra(np.zeros((dim, dim, dim)))
    return NordenModel(alg, canonical_norden(dim), label=f"kahler dim={dim}")


# -- W3 solutions ------------------------------------------------------------


def f_map(C, s: NordenStructure) -> np.ndarray:
    """F as a function of the brackets at fixed (J, g); linear in ``C``."""
    metric: Metric = s.metric
    alg = LieAlgebra(np.asarray(C, dtype=float))
    return f_tensor(levi_civita(alg, metric), s)


def nullspace(A, rtol: float = NULLSPACE_RTOL) -> np.ndarray:
    """Orthonormal rows spanning ker A (singular values below rtol * max are zero)."""
    _, sv, vt = np.linalg.svd(A)
    if sv.size == 0 or sv[0] == 0:
        return vt
    rank = int(np.sum(sv > rtol * sv[0]))
    return vt[rank:]


@dataclass
class W3Family:
    """Solution space of the W3 system over a bracket family, in canonical frame."""

    structure: NordenStructure  # canonical
    frame: np.ndarray  # P with s = canonical in frame P, i.e. input frame = P^-1 frame
    basis: np.ndarray  # brackets spanning the family
    solutions: np.ndarray  # rows: coefficient vectors of a basis of the W3 subspace
    family: str

    def brackets(self, x) -> np.ndarray:
        return np.tensordot(np.asarray(x) @ self.solutions, self.basis, 1)

    def nabla_J_of(self, x) -> np.ndarray:
        alg = LieAlgebra(self.brackets(x))
        return nabla_J(levi_civita(alg, self.structure.metric), self.structure)

    def snorm_of(self, x) -> float:
        s = self.structure
        return square_norm_nabla_J(self.nabla_J_of(x), s.g, s.g_inv)

    def to_input_frame(self, C) -> np.ndarray:
        """Brackets expressed back in the frame of the caller's structure."""
        return transform_brackets(C, np.linalg.inv(self.frame))


def w3_family(s: NordenStructure, family: str = "auto", v_size: int | None = None) -> W3Family:
    """Assemble and solve the linear W3 system for ``s``.

    The structure is first brought to canonical form by a frame adapted to it;
    the family is defined on that frame.
    """
    if family == "auto":
        family = "projected" if s.dim == 4 else "nilpotent"
    P = np.column_stack([complex_orthonormal_frame(s), s.J @ complex_orthonormal_frame(s)])
    canon = s.transformed(P)
    if family == "nilpotent":
        basis = nilpotent_basis(s.dim, s.dim // 2 if v_size is None else v_size)
    elif family == "projected":
        basis = full_basis(s.dim)
    else:
        raise ValueError(f"unknown family {family!r}")
    A = np.array([cyclic_sum(f_map(C, canon)).ravel() for C in basis]).T
    return W3Family(canon, P, basis, nullspace(A), family)


def _jacobi_project(fam: W3Family, x0, extra=None) -> np.ndarray | None:
    """Gauss-Newton from ``x0`` onto {Jacobi = 0, ||nabla J||_F = 1} inside the W3 space."""

    def residual(x):
        C = fam.brackets(x)
        parts = [jacobi_tensor(C).ravel(), [np.linalg.norm(fam.nabla_J_of(x)) - 1.0]]
        if extra is not None:
            parts.append([extra(x)])
        return np.concatenate(parts)

    sol = least_squares(residual, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
    if np.abs(sol.fun).max() > 1e-12:
        return None
    return sol.x


def _finish(fam: W3Family, s: NordenStructure, x, label: str) -> NordenModel:
    C = fam.to_input_frame(fam.brackets(x))
    return NordenModel(validate_lie_algebra(C), s, label=label)


def solve_w3_family(
    s: NordenStructure, cfg: GeneratorConfig, family: str = "auto", rng=None
) -> NordenModel:
    """A non-Kaehler W3 model on the given Norden structure.

    Raises
    ------
    OnlyKahlerSolutions
        The W3 subspace of the family contains no bracket with nabla J != 0.
    RetriesExhausted
        Every sampled combination was (numerically) Kaehler or failed to project.
    """
    rng = cfg.rng(5) if rng is None else rng
    fam = w3_family(s, family, cfg.split)
    if len(fam.solutions) == 0:
        raise OnlyKahlerSolutions(f"{fam.family} family: W3 system has only the zero solution")
    kahler = np.array([fam.nabla_J_of(e).ravel() for e in np.eye(len(fam.solutions))]).T
    if np.abs(kahler).max() <= 1e-12:
        raise OnlyKahlerSolutions(f"{fam.family} family: every W3 solution has nabla J = 0")

    label = f"w3 {fam.family} dim={s.dim} seed={cfg.seed}"
    for _ in range(cfg.max_retries):
        x = rng.uniform(cfg.low, cfg.high, len(fam.solutions))
        if fam.family == "projected":
            x = _jacobi_project(fam, x)
            if x is None:
                continue
        else:
            x = x / max(np.abs(fam.nabla_J_of(x)).max(), 1e-300)
        if np.abs(fam.nabla_J_of(x)).max() > 1e-3:
            return _finish(fam, s, x, label)
    raise RetriesExhausted(f"no non-Kaehler W3 sample in {cfg.max_retries} tries")


def search_isotropic_kahler(
    s: NordenStructure, cfg: GeneratorConfig, family: str = "auto", tol: float = 1e-10, rng=None
) -> NordenModel:
    """Find a W3 model with ||nabla J|| = 0 but max|nabla J| > 0.1.

    In a linear family ``||nabla J||`` is a quadratic form in the parameters, so
    along a random 2-plane it changes sign whenever it is indefinite there; a
    root is bracketed on the unit circle and refined with Brent's method. In the
    projected family (the default) the zero-norm condition is added to the
    Jacobi projection.

    Raises
    ------
    NotFound
        No hit within ``cfg.max_retries`` attempts (a legitimate outcome).
    """
    rng = cfg.rng(6) if rng is None else rng
    if family == "auto":
        family = "projected"
    try:
        fam = w3_family(s, family, cfg.split)
    except ValueError as exc:
        raise NotFound(str(exc)) from exc
    k = len(fam.solutions)
    if k == 0:
        raise NotFound(f"{fam.family} family: W3 system has only the zero solution")

    label = f"isotropic-w3 {fam.family} dim={s.dim} seed={cfg.seed}"
    for _ in range(cfg.max_retries):
        if fam.family == "projected":
            x = _jacobi_project(fam, rng.uniform(cfg.low, cfg.high, k), fam.snorm_of)
        else:
            x = _bracket_zero(fam, rng, k)
        if x is None:
            continue
        x = x / np.abs(fam.nabla_J_of(x)).max()  # max|nabla J| = 1, nabla J linear in x
        model = _finish(fam, s, x, label)
        if abs(model.curvature.snorm) <= tol and model.max_nabla_J() > 0.1:
            return model
    raise NotFound(f"no isotropic Kaehler W3 model after {cfg.max_retries} attempts")


def _bracket_zero(fam: W3Family, rng, k: int):
    u = rng.normal(size=k)
    v = rng.normal(size=k) if k > 1 else np.zeros(1)

    def q(t):
        return fam.snorm_of(np.cos(t) * u + np.sin(t) * v)

    ts = np.linspace(0.0, np.pi, 33)
    vals = [q(t) for t in ts]
    for a, b, fa, fb in zip(ts, ts[1:], vals, vals[1:]):
        if fa == 0.0:
            return np.cos(a) * u + np.sin(a) * v
        if fa * fb < 0:
            t = brentq(q, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
            return np.cos(t) * u + np.sin(t) * v
    return None


def generate(kind: str, dim: int, seed: int, max_retries: int = 50) -> NordenModel:
    """Top-level dispatch used by the CLI."""
    cfg = GeneratorConfig(dim=dim, seed=seed, max_retries=max_retries)
    if kind == "kahler":
        return kahler_model(dim)
    if kind == "random":
        return random_model(cfg)
    if kind == "w3":
        return solve_w3_family(random_norden(cfg), cfg)
    if kind == "isotropic-w3":
        return search_isotropic_kahler(random_norden(cfg), cfg)
    raise ValueError(f"unknown kind {kind!r}; expected one of {KINDS}")
