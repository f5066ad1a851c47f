import itertools
import math

import numpy as np
import pytest

from levigauge import eval_r, extract_orders, load_spec, validate
from levigauge.errors import (
    NonzeroConstantTerm,
    NoPurePower,
    NotTriangular,
    PolynomialSyntaxError,
    SchemaError,
)
from levigauge.poly import GaussianRational, Polynomial

C4 = {"n": 3, "functions": ["z1^6", "z2^4 - z1*z2", "z3^4 - z2^3 + z1"]}


def vd_of(functions):
    return validate(load_spec({"n": len(functions), "functions": functions}))


def bis(m, l):
    fs = [f"z1^{m[0]}"] + [f"z{j + 1}^{m[j]} + z{j}^{l[j - 1]}" for j in range(1, len(m))]
    return vd_of(fs)


def test_load_spec_examples(tmp_path):
    spec = load_spec(C4)
    assert spec.n == 3 and len(spec.functions) == 3
    assert load_spec('{"n": 1, "functions": ["z1"]}').n == 1
    path = tmp_path / "s.json"
    path.write_text('{"n": 2, "functions": ["z1^2", "z2^3 + z1^2"], "label": "x"}')
    assert load_spec(path).label == "x"


@pytest.mark.parametrize(
    "doc",
    [
        "not json",
        "[1, 2]",
        {"n": 0, "functions": []},
        {"n": 2, "functions": ["z1"]},
        {"n": 1, "functions": [3]},
        {"n": 1, "functions": ["z1"], "extra": 1},
        {"n": True, "functions": ["z1"]},
        {"n": 1, "functions": ["0"]},
    ],
)
def test_load_spec_schema_errors(doc):
    with pytest.raises(SchemaError):
        load_spec(doc)


def test_parse_error_carries_function_index():
    with pytest.raises(PolynomialSyntaxError) as info:
        load_spec({"n": 2, "functions": ["z1", "z2 +"]})
    assert info.value.function_index == 2
    assert "function 2" in str(info.value)


def test_validate_c4_has_no_warnings(c4):
    assert c4.warnings == ()
    assert c4.leading_coeffs == (GaussianRational(1),) * 3


def test_validate_errors():
    with pytest.raises(NoPurePower) as info:
        vd_of(["z1^2", "z1*z2"])
    assert info.value.j == 2
    with pytest.raises(NotTriangular) as info:
        vd_of(["z2", "z1"])
    assert (info.value.j, info.value.variable) == (1, 2)
    with pytest.raises(NonzeroConstantTerm):
        vd_of(["z1 + 1"])


def test_non_unit_leading_coefficient_warns():
    vd = vd_of(["3*z1^2", "z2 + z1"])
    assert any("not 1" in w for w in vd.warnings)


def test_extract_orders_c4(c4):
    o = c4.orders
    assert o.m == (6, 4, 4)
    assert o.k == (0, 1, 0)
    assert o.l == {(2, 1): 1, (3, 1): 1, (3, 2): 3}


def test_extract_orders_ball(ball):
    assert ball.orders.m == (1,) and ball.orders.k == (0,) and ball.orders.l == {}


def test_extract_orders_clamps_with_warning():
    vd = vd_of(["z1^2", "z2^2 + z1^3"])
    assert vd.orders.l[(2, 1)] == 2
    (w,) = vd.orders.clamp_warnings
    assert (w.j, w.i, w.raw, w.clamped) == (2, 1, 3, 2)
    assert vd.warnings


def test_k_ignores_high_powers_of_own_variable():
    vd = vd_of(["z1^2", "z2^2 + z2^3 + z1^2"])
    assert vd.orders.k == (0, 0)


@pytest.mark.parametrize(
    "m,l",
    [(m, l) for n in (1, 2, 3) for m in itertools.product(range(1, 5), repeat=n)
     for l in itertools.product(*[range(1, m[j - 1] + 1) for j in range(1, n)])][::7],
)
def test_bis_orders_reproduce_constructor(m, l):
    o = bis(m, l).orders
    assert o.m == m
    assert o.k == (0,) * len(m)
    for j in range(2, len(m) + 1):
        for i in range(1, j):
            assert o.l[(j, i)] == (l[j - 2] if i == j - 1 else math.inf)


def test_orders_scale_invariant(c4):
    scaled = validate(
        load_spec({"n": 3, "functions": ["(2+1i)*z1^6", "-1/3*z2^4 + 1/3*z1*z2", "5i*z3^4 - 5i*z2^3 + 5i*z1"]})
    )
    assert scaled.orders == c4.orders


def test_eval_r_examples(ball, c4):
    assert eval_r(ball, [0, -0.5]) == -1.0
    assert eval_r(ball, [1, 0]) == 1.0
    d = 1e-3
    assert eval_r(c4, [0, 0, 0, -d / 2]) == pytest.approx(-d, rel=1e-15)
    batch = np.array([[0, -0.5], [1, 0]], dtype=complex)
    assert list(eval_r(ball, batch)) == [-1.0, 1.0]


def test_origin_on_boundary(corpus):
    for vd in corpus.values():
        zero = np.zeros(vd.n + 1)
        assert eval_r(vd, zero) == 0.0
        inside = zero.astype(complex)
        inside[-1] = -1e-9
        assert eval_r(vd, inside) < 0


def test_spec_round_trip(corpus):
    for vd in corpus.values():
        again = validate(load_spec(vd.spec.to_json()))
        assert again.spec.functions == vd.spec.functions


def test_domain_spec_rejects_zero_function():
    with pytest.raises(SchemaError):
        from levigauge.domain import DomainSpec

        DomainSpec(1, (Polynomial.zero(1),))


def test_extract_orders_direct(c4):
    assert extract_orders(c4.spec) == c4.orders
