"""Numerical checks of the curvature identities for Norden models.

Every check returns max-norm residuals relative to the largest participating
term (floored at 1, see :func:`nordengeom.tensor.relative_residual`). Checks
that only hold for quasi-Kaehler models accept an optional ``membership`` and
raise :class:`NotW3` when it says the model is outside W3.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import curvature as cv
from .errors import NotW3
from .lie import Connection
from .model import NordenModel
from .structure import (
    EPS_CLASS,
    ClassMembership,
    NordenStructure,
    classify,
    cyclic_sum,
    nabla_F,
    nabla_J,
)
from .tensor import relative_residual as rel
from .tensor import twist

DEFAULT_TOL = 1e-8


def _require_w3(membership: ClassMembership | None):
    if membership is not None and not membership.is_W3:
        raise NotW3(f"W3 residual {membership.residual_W3:.3e} > {membership.tolerance:g}")


def _require_dim4(s: NordenStructure):
    if s.dim < 4:
        raise ValueError(f"check requires dim >= 4, got {s.dim}")


def check_theorem1(conn: Connection, s: NordenStructure, F, R) -> dict[str, float]:
    """Residuals of the four identities valid on every Norden manifold."""
    J = s.J
    nF = nabla_F(conn, F)
    G = cv.nabla_J_gram(nabla_J(conn, s), s.g)

    t = [twist(R, J, [2]), -twist(R, J, [3]), -nF, nF.transpose(1, 0, 2, 3)]
    r1 = rel(sum(t), *t)

    t = [
        twist(nF, J, [2]),
        twist(nF, J, [3]),
        np.einsum("xzyu->xyzu", G),
        np.einsum("xuyz->xyzu", G),
    ]
    r2 = rel(sum(t), *t)

    t = [nF, -nF.transpose(0, 1, 3, 2)]
    r3 = rel(sum(t), *t)

    gi = s.g_inv
    t = [
        np.einsum("ij,ijzu->zu", gi, twist(nF, J, [2])),
        np.einsum("ij,ijzu->zu", gi, twist(nF, J, [3])),
        2 * np.einsum("ij,izju->zu", gi, G),
    ]
    r4 = rel(sum(t), *t)
    return {"theorem1_i": r1, "theorem1_ii": r2, "theorem1_iii": r3, "theorem1_iv": r4}


def check_prop_w3(
    conn: Connection, s: NordenStructure, F, eps_class: float = EPS_CLASS
) -> dict[str, float]:
    """Residuals of the four properties of an arbitrary W3 model."""
    _require_w3(classify(F, s, eps_class))
    J, gi = s.J, s.g_inv
    DJ = nabla_J(conn, s)
    nF = nabla_F(conn, F)

    a = np.einsum("xkm,my->xyk", DJ, J)  # (nabla_X J) J Y
    b = np.einsum("mx,mky->xyk", J, DJ)  # (nabla_{JX} J) Y
    t = [a, a.transpose(1, 0, 2), b, b.transpose(1, 0, 2)]
    r1 = rel(sum(t), *t)

    FJ = twist(F, J, [0])
    r2 = rel(cyclic_sum(FJ), FJ)

    t = [nF, np.einsum("xzuy->xyzu", nF), np.einsum("xuyz->xyzu", nF)]
    r3 = rel(sum(t), *t)

    tr1 = np.einsum("ij,xijz->xz", gi, nF)
    tr2 = np.einsum("ij,xzij->xz", gi, nF)
    r4 = max(rel(tr1, nF), rel(tr2, nF))
    return {"prop_w3_i": r1, "prop_w3_ii": r2, "prop_w3_iii": r3, "prop_w3_iv": r4}


def identity12_terms(R, DJ, s: NordenStructure):
    """Left (twelve curvature terms) and right side of the W3 curvature identity."""
    J = s.J
    A = twist(R, J, [1, 3])  # R(a, Jb, c, Jd)
    B = twist(R, J, [0, 2])  # R(Ja, b, Jc, d)
    orders = ["xzyu", "xyuz", "xyzu", "xzuy", "xuyz", "xuzy"]
    lhs = [np.einsum(f"{o}->xyzu", A) for o in orders]
    lhs += [np.einsum(f"{o}->xyzu", B) for o in orders]

    G = cv.nabla_J_gram(DJ, s.g)
    # Q(x,y,z,u) = g((nabla_x J)y + (nabla_y J)x, (nabla_z J)u + (nabla_u J)z)
    Q = G + G.transpose(1, 0, 2, 3) + G.transpose(0, 1, 3, 2) + G.transpose(1, 0, 3, 2)
    rhs = -(Q + np.einsum("yzxu->xyzu", Q) + np.einsum("zxyu->xyzu", Q))
    return lhs, rhs


def check_identity12(R, DJ, s: NordenStructure, membership=None) -> float:
    _require_w3(membership)
    lhs, rhs = identity12_terms(R, DJ, s)
    return rel(sum(lhs) - rhs, *lhs, rhs)


def lemma_trace_sides(DJ, s: NordenStructure):
    """The two g-traces of the nabla J Gram tensor in the Ricci trace identities.

    Returns ``(T, S)`` with
    ``T(y,z) = g^ij g((nabla_{e_i}J)y + (nabla_y J)e_i, (nabla_z J)e_j + (nabla_{e_j}J)z)``
    and ``S = g^ij g^kl g((nabla_{e_i}J)e_k, (nabla_{e_l}J)e_j)``.
    """
    gi = s.g_inv
    G = cv.nabla_J_gram(DJ, s.g)
    T = (
        np.einsum("ij,iyzj->yz", gi, G)
        + np.einsum("ij,iyjz->yz", gi, G)
        + np.einsum("ij,yizj->yz", gi, G)
        + np.einsum("ij,yijz->yz", gi, G)
    )
    S = float(np.einsum("ij,kl,iklj->", gi, gi, G))
    return T, S


def check_lemma(rho, rho_star, DJ, snorm, s: NordenStructure, membership=None):
    """Residuals ``(lemma_i, lemma_ii)``."""
    _require_w3(membership)
    J = s.J
    T, S = lemma_trace_sides(DJ, s)
    t = [
        np.einsum("ay,az->yz", J, rho_star),  # rho*(Jy, z)
        np.einsum("az,ya->yz", J, rho_star),  # rho*(y, Jz)
        rho,
        -np.einsum("ay,bz,ab->yz", J, J, rho),  # -rho(Jy, Jz)
        T,
    ]
    r1 = rel(sum(t), *t)
    r2 = rel(np.array(snorm + 2 * S), np.array(snorm), np.array(2 * S))
    return r1, r2


def check_norm_theorem(snorm: float, tau: float, tau_star2: float, membership=None) -> float:
    """|snorm + 2 (tau + tau**)|, relative."""
    _require_w3(membership)
    terms = [np.array(snorm), np.array(2 * tau), np.array(2 * tau_star2)]
    return rel(sum(terms), *terms)


@dataclass
class KahlerCurvatureResult:
    residual: float
    polarized_residual: float
    implies_isotropic: bool


def check_kahler_curvature_property(
    R, s: NordenStructure, DJ, tol: float = DEFAULT_TOL
) -> KahlerCurvatureResult:
    """Kaehler property R(X,Y,JZ,JU) = -R(X,Y,Z,U) and its polarized consequence.

    ``polarized_residual`` measures
    g((nabla_x J)z, (nabla_y J)u) + g((nabla_x J)u, (nabla_y J)z)
    over basis tuples; it must vanish when the property holds on a W3 model.
    """
    _require_dim4(s)
    RJ = twist(R, s.J, [2, 3])
    residual = rel(RJ + R, RJ, R)
    G = cv.nabla_J_gram(DJ, s.g)
    P = [np.einsum("xzyu->xyzu", G), np.einsum("xuyz->xyzu", G)]
    return KahlerCurvatureResult(residual, rel(sum(P), *P), residual <= tol)


def strongly_isotropic_vectors(s: NordenStructure, count: int, rng) -> np.ndarray:
    """Sample ``count`` vectors x with g(x,x) = g(x,Jx) = 0.

    Uses the complex-bilinear form B(x,y) = g(x,y) - i g(x,Jy), for which x is
    strongly isotropic exactly when B(x,x) = 0. A B-orthonormal complex frame
    f_1..f_n is built by Gram-Schmidt (multiplication by i is J) and x is taken
    as sum c_k f_k with sum c_k^2 = 0.
    """
    _require_dim4(s)
    frame = complex_orthonormal_frame(s)
    n = s.n
    out = np.empty((count, s.dim))
    for t in range(count):
        c = rng.uniform(-1, 1, n - 1) + 1j * rng.uniform(-1, 1, n - 1)
        last = 1j * np.sqrt(np.sum(c**2) + 0j)
        c = np.append(c, last)
        x = frame @ c.real + (s.J @ frame) @ c.imag
        out[t] = x / np.abs(x).max()
    return out


def complex_orthonormal_frame(s: NordenStructure) -> np.ndarray:
    """Real vectors f_1..f_n (columns) with g(f_a, f_b) = delta_ab, g(f_a, J f_b) = 0.

    Together with J f_1..J f_n they form a frame in which (J, g) is canonical.
    """
    g, J = s.g, s.J

    def B(x, y):
        return x @ g @ y - 1j * (x @ g @ J @ y)

    def cmul(z, x):
        return z.real * x + z.imag * (J @ x)

    frame: list[np.ndarray] = []
    candidates = [np.eye(s.dim)[k] for k in range(s.dim)]
    candidates += [np.eye(s.dim)[a] + np.eye(s.dim)[b] for a in range(s.dim) for b in range(a)]
    for _ in range(s.n):
        residues = []
        for v in candidates:
            w = v.copy()
            for f in frame:
                w = w - cmul(B(v, f), f)
            residues.append(w)
        sizes = [abs(B(w, w)) for w in residues]
        if max(sizes) < 1e-10:
            raise ValueError("could not build a complex orthonormal frame")
        # first candidate within a factor 2 of the best: well conditioned, and
        # the canonical structure keeps its own basis
        best = next(w for w, v in zip(residues, sizes) if v >= 0.5 * max(sizes))
        z = np.sqrt(B(best, best))
        frame.append(cmul(1 / z, best))
    return np.array(frame).T


@dataclass
class EquivalenceResult:
    violations: int
    samples: int
    zero_R: int
    isotropic: int


def check_theorem21(
    R,
    s: NordenStructure,
    samples: int,
    rng,
    tol_r: float = DEFAULT_TOL,
    tol_h: float = DEFAULT_TOL,
    eps_iso: float = cv.EPS_ISO,
    membership=None,
    pairs=None,
) -> EquivalenceResult:
    """Count pairs where R(x,Jx,y,Jy)=0 disagrees with (h=0 or either plane strongly isotropic).

    Pairs are drawn uniformly from [-1, 1]^dim unless ``pairs`` is given.
    Both zero tests are relative to ``max(1, max|R|)``.
    """
    _require_w3(membership)
    _require_dim4(s)
    scale = max(1.0, float(np.abs(R).max()))
    if pairs is None:
        pairs = [(rng.uniform(-1, 1, s.dim), rng.uniform(-1, 1, s.dim)) for _ in range(samples)]
    violations = zero_r = iso = 0
    for x, y in pairs:
        rv = cv.holomorphic_form(R, s.J, x, y)
        iso_x = cv.plane_norm_sq(s, x) <= eps_iso**2
        iso_y = cv.plane_norm_sq(s, y) <= eps_iso**2
        r_zero = abs(rv) <= tol_r * scale
        if iso_x or iso_y:
            rhs = True
            iso += 1
        else:
            rhs = abs(cv.bisectional_curvature(R, s, x, y, eps_iso)) <= tol_h * scale
        zero_r += r_zero
        violations += r_zero != rhs
    return EquivalenceResult(violations, len(pairs), zero_r, iso)


def isotropic_plane_probe(R, s: NordenStructure, samples: int, rng) -> float:
    """max |R(x,Jx,y,Jy)| over strongly isotropic x and random y (relative)."""
    xs = strongly_isotropic_vectors(s, samples, rng)
    vals = [cv.holomorphic_form(R, s.J, x, rng.uniform(-1, 1, s.dim)) for x in xs]
    return max(abs(v) for v in vals) / max(1.0, float(np.abs(R).max()))


def polarization_vectors(dim: int) -> np.ndarray:
    """Rows e_a and e_a + e_b (a < b); these determine any quadratic form."""
    E = np.eye(dim)
    rows = [E[a] for a in range(dim)] + [E[a] + E[b] for a in range(dim) for b in range(a + 1, dim)]
    return np.array(rows)


def polarized_holomorphic_max(R, s: NordenStructure) -> float:
    """max |R(x,Jx,y,Jy)| over polarization vectors, relative to max(1, max|R|).

    R(x,Jx,y,Jy) is quadratic in x and in y separately, so it vanishes
    identically iff it vanishes on these vectors.
    """
    X = polarization_vectors(s.dim)
    XJ = X @ s.J.T
    Q = np.einsum("abcd,pa,pb,qc,qd->pq", R, X, XJ, X, XJ)
    return float(np.abs(Q).max()) / max(1.0, float(np.abs(R).max()))


@dataclass
class WitnessResult:
    polarized_max: float
    snorm: float
    consistent: bool


def check_theorem22(R, s: NordenStructure, snorm: float, tol: float = DEFAULT_TOL, membership=None):
    """R(x,Jx,y,Jy) = 0 for all x, y must force ||nabla J|| = 0."""
    _require_w3(membership)
    _require_dim4(s)
    M = polarized_holomorphic_max(R, s)
    return WitnessResult(M, snorm, bool(M > tol or abs(snorm) <= tol))


# -- aggregate report ------------------------------------------------------


@dataclass
class Row:
    name: str
    value: float | None
    tolerance: float | None
    status: str  # pass | fail | skipped | info
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "tolerance": self.tolerance,
            "status": self.status,
            "note": self.note,
        }


@dataclass
class VerificationReport:
    tolerance: float
    samples: int
    seed: int
    rows: list[Row] = field(default_factory=list)

    def add(self, name, value, tol=None, note=""):
        tol = self.tolerance if tol is None else tol
        status = "pass" if value <= tol else "fail"
        self.rows.append(Row(name, float(value), tol, status, note))

    def skip(self, name, note):
        self.rows.append(Row(name, None, None, "skipped", note))

    def info(self, name, value, note=""):
        self.rows.append(Row(name, float(value), None, "info", note))

    def __getitem__(self, name) -> Row:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        return all(r.status != "fail" for r in self.rows)

    def summary(self) -> dict:
        counts = {k: 0 for k in ("pass", "fail", "skipped", "info")}
        for r in self.rows:
            counts[r.status] += 1
        return {**counts, "ok": self.passed}


W3_ROWS = [
    "prop_w3_i", "prop_w3_ii", "prop_w3_iii", "prop_w3_iv", "identity12",
    "lemma_i", "lemma_ii", "norm_theorem", "corollary",
]
W3_DIM4_ROWS = [
    "kahler_property_implication", "theorem21_violations", "theorem21_isotropic_probe",
    "theorem22_consistent",
]


def verify_model(
    model: NordenModel,
    tol: float = DEFAULT_TOL,
    samples: int = 500,
    seed: int = 0,
    eps_class: float = EPS_CLASS,
) -> VerificationReport:
    """Run every check on ``model``; W3-only checks are skipped on other classes."""
    rep = VerificationReport(tolerance=tol, samples=samples, seed=seed)
    s = model.structure
    cd = model.curvature

    rep.add("torsion", model.torsion)
    rep.add("metricity", model.metricity)
    for name, v in cv.curvature_symmetry_residuals(cd.R).items():
        rep.add(f"curvature_{name}", v)
    rs = cd.rho_star
    rep.add("rho_star_symmetry", rel(rs - rs.T, rs))
    for name, v in check_theorem1(model.connection, s, model.F, cd.R).items():
        rep.add(name, v)

    kc = None
    if s.dim >= 4:
        kc = check_kahler_curvature_property(cd.R, s, model.DJ, tol)
        rep.info("kahler_property", kc.residual, "R(X,Y,JZ,JU) + R(X,Y,Z,U)")
    else:
        rep.skip("kahler_property", "requires dim >= 4")

    mem = model.membership(eps_class)
    if not mem.is_W3:
        for name in W3_ROWS + W3_DIM4_ROWS:
            rep.skip(name, "model is not in W3")
        return rep

    for name, v in check_prop_w3(model.connection, s, model.F, eps_class).items():
        rep.add(name, v)
    rep.add("identity12", check_identity12(cd.R, model.DJ, s))
    l1, l2 = check_lemma(cd.rho, cd.rho_star, model.DJ, cd.snorm, s)
    rep.add("lemma_i", l1)
    rep.add("lemma_ii", l2)
    rep.add("norm_theorem", check_norm_theorem(cd.snorm, cd.tau, cd.tau_star2))
    if abs(cd.snorm) <= tol:
        t = [np.array(cd.tau), np.array(cd.tau_star2)]
        rep.add("corollary", rel(sum(t), *t), note="isotropic Kaehler: tau** = -tau")
    else:
        rep.skip("corollary", "model is not isotropic Kaehler")

    if kc is None:
        for name in W3_DIM4_ROWS:
            rep.skip(name, "requires dim >= 4")
        return rep

    if kc.implies_isotropic:
        rep.add(
            "kahler_property_implication",
            max(abs(cd.snorm), kc.polarized_residual),
            note="Kaehler curvature => isotropic Kaehler",
        )
    else:
        rep.skip("kahler_property_implication", "curvature is not Kaehler")

    rng = np.random.default_rng(seed)
    t21 = check_theorem21(cd.R, s, samples, rng, tol, tol)
    rep.add("theorem21_violations", t21.violations, 0.0, note=f"{t21.samples} random pairs")
    rep.info(
        "theorem21_isotropic_probe",
        isotropic_plane_probe(cd.R, s, 50, rng),
        "max |R(x,Jx,y,Jy)| for strongly isotropic x",
    )
    t22 = check_theorem22(cd.R, s, cd.snorm, tol)
    rep.add(
        "theorem22_consistent",
        0.0 if t22.consistent else abs(cd.snorm),
        note=f"polarized max {t22.polarized_max:.6e}",
    )
    return rep
