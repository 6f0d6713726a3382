import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracle import Oracle
from nordengeom.errors import NotW3
from nordengeom.generator import generate
from nordengeom.model import NordenModel
from nordengeom.tensor import relative_residual
from nordengeom.verify import (
    check_identity12,
    check_lemma,
    check_norm_theorem,
    check_prop_w3,
    check_theorem1,
    check_theorem21,
    check_theorem22,
    identity12_terms,
    lemma_trace_sides,
    polarized_holomorphic_max,
    verify_model,
)

seeds = st.integers(0, 2**32 - 1)


@given(seeds, st.sampled_from([4, 6]))
def test_norden_identities_on_random_models(seed, dim):
    m = generate("random", dim, seed)
    for name, v in check_theorem1(m.connection, m.structure, m.F, m.R).items():
        assert v <= 1e-10, name


def perturbed(m, delta=1e-3):
    conn = m.connection.perturbed(0, 1, 0, delta)
    return NordenModel(m.algebra, m.structure, m.label, connection=conn)


@pytest.mark.parametrize("kind", ["kahler", "random", "w3"])
def test_negative_control(kind):
    p = perturbed(generate(kind, 4, 3))
    r = check_theorem1(p.connection, p.structure, p.F, p.R)
    assert r["theorem1_i"] >= 1e-6
    rep = verify_model(p, samples=10)
    assert not rep.passed
    assert rep["torsion"].status == "fail"


def test_w3_only_checks_refuse_other_classes():
    m = generate("random", 4, 1)
    mem = m.membership()
    assert not mem.is_W3
    cd = m.curvature
    with pytest.raises(NotW3):
        check_prop_w3(m.connection, m.structure, m.F)
    with pytest.raises(NotW3):
        check_identity12(cd.R, m.DJ, m.structure, mem)
    with pytest.raises(NotW3):
        check_lemma(cd.rho, cd.rho_star, m.DJ, cd.snorm, m.structure, mem)
    with pytest.raises(NotW3):
        check_norm_theorem(cd.snorm, cd.tau, cd.tau_star2, mem)
    with pytest.raises(NotW3):
        check_theorem22(cd.R, m.structure, cd.snorm, membership=mem)
    rep = verify_model(m, samples=10)
    assert rep["identity12"].status == "skipped"
    assert rep.passed


def test_w3_identities(w3_models):
    for m in w3_models:
        cd, s = m.curvature, m.structure
        mem = m.membership()
        assert max(check_prop_w3(m.connection, s, m.F).values()) <= 1e-10
        assert check_identity12(cd.R, m.DJ, s, mem) <= 1e-10
        l1, l2 = check_lemma(cd.rho, cd.rho_star, m.DJ, cd.snorm, s, mem)
        assert max(l1, l2) <= 1e-10
        assert check_norm_theorem(cd.snorm, cd.tau, cd.tau_star2, mem) <= 1e-10


def test_twelve_term_identity_fails_off_w3():
    # the identity is specific to W3; a generic model violates it
    m = generate("random", 4, 2)
    lhs, rhs = identity12_terms(m.R, m.DJ, m.structure)
    assert relative_residual(sum(lhs) - rhs, *lhs, rhs) > 1e-3


def test_twelve_term_identity_matches_oracle():
    m = generate("random", 4, 2)
    o = Oracle(m.algebra.structure_constants, m.structure.J, m.structure.g)
    lhs, rhs = identity12_terms(m.R, m.DJ, m.structure)
    rng = np.random.default_rng(1)
    for _ in range(5):
        x, y, z, u = rng.normal(size=(4, 4))
        val = np.einsum("abcd,a,b,c,d->", sum(lhs), x, y, z, u)
        assert val == pytest.approx(o.identity12_lhs(x, y, z, u), abs=1e-10)
        val = np.einsum("abcd,a,b,c,d->", rhs, x, y, z, u)
        assert val == pytest.approx(o.identity12_rhs(x, y, z, u), abs=1e-10)


def test_rho_star_slot_order_probe(w3_4):
    # moving J from the last slot of rho* to the argument y breaks the lemma
    cd, s = w3_4.curvature, w3_4.structure
    wrong = np.einsum("ay,az->yz", s.J, cd.rho)  # rho(Jy, z)
    good, _ = check_lemma(cd.rho, cd.rho_star, w3_4.DJ, cd.snorm, s)
    bad, _ = check_lemma(cd.rho, wrong, w3_4.DJ, cd.snorm, s)
    assert good <= 1e-10 and bad > 1e-3


def test_trace_S_matches_snorm_relation(w3_4):
    T, S = lemma_trace_sides(w3_4.DJ, w3_4.structure)
    assert w3_4.curvature.snorm == pytest.approx(-2 * S, abs=1e-10)


def test_holomorphic_equivalence_random_pairs(w3_models):
    for m in w3_models:
        res = check_theorem21(m.R, m.structure, 200, np.random.default_rng(0))
        assert res.violations == 0 and res.samples == 200


def test_witness_consistency(w3_models, kahler4):
    for m in w3_models:
        r = check_theorem22(m.R, m.structure, m.curvature.snorm)
        assert r.consistent
        if abs(m.curvature.snorm) > 1e-6:
            assert r.polarized_max > 1e-8
    assert polarized_holomorphic_max(kahler4.R, kahler4.structure) == 0.0


def test_report_rows_and_summary(w3_4):
    rep = verify_model(w3_4, samples=50, seed=3)
    names = [r.name for r in rep.rows]
    assert names[:2] == ["torsion", "metricity"]
    assert "theorem22_consistent" in names and "identity12" in names
    summ = rep.summary()
    assert summ["fail"] == 0 and summ["ok"]
    assert rep["theorem21_isotropic_probe"].status == "info"


def test_report_is_seed_deterministic(w3_4):
    a = [r.as_dict() for r in verify_model(w3_4, samples=50, seed=9).rows]
    b = [r.as_dict() for r in verify_model(w3_4, samples=50, seed=9).rows]
    assert a == b
