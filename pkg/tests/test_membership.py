import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foodcast.membership import (MFKind, MembershipFunction, evaluate, gbell, grad_params, init_grid, repair,
                                 trapezoidal, triangular)


def fd_grad(mf, x, h=1e-6):
    out = []
    for j in range(len(mf.params)):
        up = list(mf.params)
        dn = list(mf.params)
        up[j] += h
        dn[j] -= h
        f_up = evaluate(MembershipFunction(mf.kind, up), x)
        f_dn = evaluate(MembershipFunction(mf.kind, dn), x)
        out.append((f_up - f_dn) / (2 * h))
    return np.array(out)


def random_mf(rng, kind):
    if kind is MFKind.GBELL:
        return gbell(rng.uniform(0.1, 1.0), rng.uniform(0.5, 3.0), rng.uniform(-1, 1))
    n = 3 if kind is MFKind.TRIANGULAR else 4
    p = np.sort(rng.uniform(-1, 1, n))
    return MembershipFunction(kind, p)


def away_from_kinks(mf, x, tol=1e-4):
    if mf.kind is MFKind.GBELL:
        return True
    return all(abs(x - p) > tol for p in mf.params)


@pytest.mark.parametrize(
    "mf, x, expected",
    [
        (gbell(1, 1, 0), 0.0, 1.0),
        (gbell(2, 1, 0), 2.0, 0.5),
        (triangular(0, 1, 2), 1.0, 1.0),
        (triangular(0, 1, 2), 0.5, 0.5),
        (triangular(0, 1, 2), 2.5, 0.0),
        (trapezoidal(0, 1, 2, 3), 1.5, 1.0),
        (trapezoidal(0, 1, 2, 3), 2.5, 0.5),
        (trapezoidal(0, 1, 2, 3), -1.0, 0.0),
    ],
)
def test_eval_examples(mf, x, expected):
    assert evaluate(mf, x) == expected


def test_degenerate_shoulders():
    assert evaluate(triangular(0, 0, 1), 0.0) == 1.0
    assert evaluate(trapezoidal(0, 1, 2, 2), 2.0) == 1.0
    assert evaluate(triangular(1, 1, 1), 1.0) == 1.0
    assert evaluate(triangular(1, 1, 1), 1.5) == 0.0


def test_vector_eval_matches_scalar():
    mf = trapezoidal(-1, 0, 0.5, 2)
    xs = np.linspace(-2, 3, 41)
    assert np.array_equal(evaluate(mf, xs), [evaluate(mf, x) for x in xs])


@pytest.mark.parametrize(
    "kind, params",
    [
        ("gbell", (0, 1, 0)),
        ("gbell", (1, -1, 0)),
        ("triangular", (1, 0, 2)),
        ("trapezoidal", (0, 2, 1, 3)),
        ("triangular", (0, 1)),
        ("gbell", (1, 1, float("nan"))),
    ],
)
def test_invalid_parameters_rejected(kind, params):
    with pytest.raises(ValueError):
        MembershipFunction(kind, params)


@pytest.mark.parametrize("x", [float("nan"), float("inf")])
def test_non_finite_input_rejected(x):
    with pytest.raises(ValueError):
        evaluate(gbell(1, 1, 0), x)
    with pytest.raises(ValueError):
        grad_params(triangular(0, 1, 2), x)


def test_kind_aliases():
    assert MFKind.parse("Tri.") is MFKind.TRIANGULAR
    assert MFKind.parse("Trap") is MFKind.TRAPEZOIDAL
    assert MFKind.parse("Gbell") is MFKind.GBELL
    with pytest.raises(ValueError):
        MFKind.parse("gaussian")


def test_gbell_grad_at_peak():
    g = grad_params(gbell(1, 1, 0), 0.0)
    assert g[2] == 0.0
    assert np.all(np.isfinite(g))


def test_gbell_grad_matches_finite_differences():
    mf = gbell(2, 1, 0)
    g = grad_params(mf, 2.0)
    fd = fd_grad(mf, 2.0)
    np.testing.assert_allclose(g, fd, rtol=1e-5, atol=1e-10)


def test_kink_subgradient_is_zero():
    g = grad_params(triangular(0, 1, 2), 1.0)
    assert np.all(np.isfinite(g))
    assert np.all(g == 0.0)
    g = grad_params(trapezoidal(0, 1, 2, 3), 0.0)
    assert np.all(g == 0.0)


def test_grad_vectorized_shape():
    g = grad_params(trapezoidal(0, 1, 2, 3), np.array([0.5, 1.5, 2.5]))
    assert g.shape == (4, 3)


@pytest.mark.parametrize("kind", list(MFKind))
def test_grad_matches_finite_differences_random(kind):
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 100:
        mf = random_mf(rng, kind)
        x = rng.uniform(-1.5, 1.5)
        if not away_from_kinks(mf, x):
            continue
        np.testing.assert_allclose(grad_params(mf, x), fd_grad(mf, x), rtol=1e-5, atol=1e-8)
        checked += 1


def test_init_grid_centers():
    two = init_grid("gbell", 0, 1, 2)
    assert [mf.center for mf in two] == [0.0, 1.0]
    for kind in MFKind:
        assert [mf.center for mf in init_grid(kind, 0, 1, 3)] == [0.0, 0.5, 1.0]


@pytest.mark.parametrize("kind", list(MFKind))
@pytest.mark.parametrize("count", [1, 2, 3, 5])
def test_init_grid_coverage(kind, count):
    mfs = init_grid(kind, 0, 1, count)
    assert len(mfs) == count
    xs = np.linspace(0, 1, 100)
    best = np.max([evaluate(mf, xs) for mf in mfs], axis=0)
    assert np.all(best >= 0.5 - 1e-12)


def test_init_grid_degenerate_domain():
    with pytest.raises(ValueError):
        init_grid("gbell", 1, 1, 2)
    with pytest.raises(ValueError):
        init_grid("triangular", 2, 1, 3)


def test_repair_restores_constraints():
    assert repair("gbell", [-1, 0, 0.3]).params == (1e-6, 1e-6, 0.3)
    assert repair("trapezoidal", [0, 2, 1, 3]).params == (0, 1, 2, 3)


mf_strategy = st.one_of(
    st.builds(lambda a, b, c: gbell(a, b, c), st.floats(1e-3, 10), st.floats(1e-2, 10), st.floats(-10, 10)),
    st.lists(st.floats(-10, 10), min_size=3, max_size=3).map(lambda p: triangular(*sorted(p))),
    st.lists(st.floats(-10, 10), min_size=4, max_size=4).map(lambda p: trapezoidal(*sorted(p))),
)


@settings(max_examples=300, deadline=None)
@given(mf_strategy, st.floats(-100, 100))
def test_degree_in_unit_interval_and_deterministic(mf, x):
    v = evaluate(mf, x)
    assert 0.0 <= v <= 1.0
    assert evaluate(mf, x) == v


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-3, 10), st.floats(1e-2, 10), st.integers(-80, 80), st.integers(0, 160))
def test_gbell_symmetry(a, b, c8, d8):
    # eighths keep c +/- delta exact in binary floating point
    c, delta = c8 / 8, d8 / 8
    mf = gbell(a, b, c)
    assert evaluate(mf, c + delta) == evaluate(mf, c - delta)
