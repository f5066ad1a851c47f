import itertools
import math
from fractions import Fraction as F

import pytest

from levigauge import Branch, Mode, alpha_exponents, compute_gammas, load_spec, multiplicity, validate
from levigauge.errors import ModeHypothesisViolated


def vd_of(functions):
    return validate(load_spec({"n": len(functions), "functions": functions}))


def bis(m, l):
    fs = [f"z1^{m[0]}"] + [f"z{j + 1}^{m[j]} + z{j}^{l[j - 1]}" for j in range(1, len(m))]
    return vd_of(fs)


FAMILY = [
    (m, l)
    for n in (1, 2, 3)
    for m in itertools.product(range(1, 5), repeat=n)
    for l in itertools.product(*[range(1, m[j - 1] + 1) for j in range(1, n)])
]


def test_c4_t23(c4):
    r = compute_gammas(c4.orders, Mode.T23)
    assert r.gammas == (F(1, 6), F(1, 24), F(1, 32))
    assert r.epsilon == F(1, 64)
    assert r.branch == (Branch.BASE, Branch.PURE, Branch.MIXED)
    assert r.to_json()["epsilon"] == "1/64"


def test_c4_t21(c4):
    assert compute_gammas(c4.orders, Mode.T21).epsilon == F(1, 192)


def test_c4_t22_rejected(c4):
    with pytest.raises(ModeHypothesisViolated) as info:
        compute_gammas(c4.orders, Mode.T22)
    assert info.value.j == 2


def test_ball_all_modes(ball):
    for mode in Mode:
        r = compute_gammas(ball.orders, mode)
        assert r.gammas == (F(1),) and r.epsilon == F(1, 2) and r.multiplicity == 1


def test_bis_t22(bis23):
    r = compute_gammas(bis23.orders, Mode.T22)
    assert r.gammas == (F(1, 2), F(1, 3)) and r.epsilon == F(1, 6)


def test_multiplicity_examples(c4, ball, bis23):
    assert multiplicity(c4.orders) == 96
    assert multiplicity(ball.orders) == 1
    assert multiplicity(bis23.orders) == 6


def test_alpha_exponents_examples(c4, bis23):
    assert alpha_exponents(c4.orders, 1) == (16, 4, 1)
    assert alpha_exponents(vd_of(["z1^3"]).orders, 2) == (2,)
    assert alpha_exponents(bis23.orders, 1) == (3, 1)
    with pytest.raises(ValueError):
        alpha_exponents(bis23.orders, F(1, 2))


def test_auto_is_t23():
    assert Mode.parse("auto") is Mode.T23
    assert Mode.parse("t21") is Mode.T21


def test_t21_closed_form(corpus):
    for vd in corpus.values():
        r = compute_gammas(vd.orders, Mode.T21)
        assert r.epsilon == F(1, 2 * math.prod(vd.orders.m))
        assert all(a >= b for a, b in zip(r.gammas, r.gammas[1:]))


@pytest.mark.parametrize("m,l", FAMILY)
def test_family_invariants(m, l):
    vd = bis(m, l)
    t21 = compute_gammas(vd.orders, Mode.T21)
    t23 = compute_gammas(vd.orders, Mode.T23)
    t22 = compute_gammas(vd.orders, Mode.T22)
    assert t22.gammas == t23.gammas  # all k_j = 0
    assert t23.gamma >= t21.gamma == F(1, t21.multiplicity)
    for j, g in enumerate(t23.gammas):
        assert 0 < g <= F(1, m[j])


@pytest.mark.parametrize("m", [m for n in (2, 3) for m in itertools.product(range(1, 5), repeat=n)
                               if all(a <= b for a, b in zip(m, m[1:]))])
def test_bis_paper_formula_when_l_equals_previous_m(m):
    vd = bis(m, m[:-1])
    r = compute_gammas(vd.orders, Mode.T23)
    for j in range(len(m)):
        assert r.gammas[j] == min(F(1, mi) for mi in m[: j + 1])


def test_t23_reproduces_t21_when_every_k_nonzero():
    vd = vd_of(["z1^2", "z2^3 + z1*z2", "z3^2 + z2*z3 + z1"])
    assert vd.orders.k == (0, 1, 1)
    assert compute_gammas(vd.orders, Mode.T23).gammas == compute_gammas(vd.orders, Mode.T21).gammas


def test_all_infinite_row_falls_back_to_pure():
    vd = vd_of(["z1^2", "z2^2 + z2^3"])
    r = compute_gammas(vd.orders, Mode.T22)
    assert r.gammas == (F(1, 2), F(1, 4)) and r.branch[1] is Branch.PURE


def test_scale_invariance(c4):
    scaled = vd_of(["7*z1^6", "(1+1i)*z2^4 - (1+1i)*z1*z2", "-z3^4 + z2^3 - z1"])
    for mode in (Mode.T21, Mode.T23):
        assert compute_gammas(scaled.orders, mode) == compute_gammas(c4.orders, mode)


def test_clamping_never_increases_gamma():
    raw = vd_of(["z1^2", "z2^2 + z1^3"])
    capped = vd_of(["z1^2", "z2^2 + z1^2"])
    assert compute_gammas(raw.orders).gammas == compute_gammas(capped.orders).gammas
