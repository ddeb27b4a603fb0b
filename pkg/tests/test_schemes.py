import random
from fractions import Fraction

import mpmath
import pytest

from polybasin.poly import Polynomial, find_roots, parse
from polybasin.schemes import (Chain, DerivativeVanished, NewtonMap,
                               OrbitResult, Sen, SenMap, SHybrid, StopRule,
                               build_map, convex_step, kadioglu, newton,
                               newton_step, parse_scheme, picard_mann,
                               run_orbit, s_hybrid, scheme_step, three_step)

X2 = parse("x^2 - 2", "x")
Z3 = parse("z^3 - 1")
PAPER_POLYS = [Z3, parse("z^4 - 1"), parse("z^5 + z^2 + 1"), parse("z^8 - 1")]


def frac_newton(x: Fraction, t: Fraction) -> Fraction:
    """Exact relaxed Newton step for x^2 - 2 in rational arithmetic."""
    return x - t * (x * x - 2) / (2 * x)


def test_newton_step_rational_value():
    got = newton_step(NewtonMap(X2), 1.5 + 0j)
    want = frac_newton(Fraction(3, 2), Fraction(1))  # 17/12
    assert want == Fraction(17, 12)
    assert abs(got - float(want)) < 1e-15
    assert got.imag == 0.0


def test_newton_step_fixes_exact_root():
    assert newton_step(NewtonMap(Z3), 1 + 0j) == 1 + 0j


def test_newton_step_at_i():
    # i - (i^3 - 1)/(3 i^2) = i - (-1 - i)/(-3) = (-1 + 2i)/3
    got = newton_step(NewtonMap(Z3), 1j)
    assert abs(got - complex(-1, 2) / 3) < 1e-15


def test_newton_step_derivative_vanished():
    with pytest.raises(DerivativeVanished):
        newton_step(NewtonMap(Z3), 0j)


def test_convex_step_value():
    got = convex_step(NewtonMap(X2), 1.5 + 0j, 0.8)
    want = frac_newton(Fraction(3, 2), Fraction(4, 5))  # 43/30 = 1.4333...
    assert want == Fraction(43, 30)
    assert abs(got - float(want)) < 1e-15


def test_convex_step_t1_is_newton_bitwise():
    rng = random.Random(2001)
    m = NewtonMap(Z3)
    for _ in range(50):
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        assert convex_step(m, z, 1.0) == newton_step(m, z)


def test_convex_step_fixes_roots():
    p = parse("z^2 - 1")  # exact float root at 1
    m = NewtonMap(p)
    for t in (0.25, 0.6, 1.0):
        assert convex_step(m, 1 + 0j, t) == 1 + 0j


def test_kadioglu_step_against_staged_rational_oracle():
    # stage by stage with exact rationals: relax by 0.6, by 0.8, full step
    x = Fraction(3, 2)
    w = frac_newton(x, Fraction(3, 5))
    v = frac_newton(w, Fraction(4, 5))
    out = frac_newton(v, Fraction(1))
    got = scheme_step(kadioglu(0.8, 0.6), NewtonMap(X2), 1.5 + 0j)
    assert abs(got - float(out)) < 1e-12
    assert abs(got - 1.414233) < 1e-5


def test_picard_mann_fixes_root():
    m = NewtonMap(parse("z^2 - 1"))
    assert scheme_step(picard_mann(0.8), m, 1 + 0j) == 1 + 0j


def test_chain_one_equals_newton_on_random_inputs():
    rng = random.Random(2002)
    checked = 0
    while checked < 100:
        degree = rng.randint(2, 6)
        coeffs = [complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
                  for _ in range(degree + 1)]
        if coeffs[-1] == 0:
            continue
        m = NewtonMap(Polynomial(tuple(coeffs)))
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        try:
            want = newton_step(m, z)
        except DerivativeVanished:
            continue
        assert scheme_step(newton(), m, z) == want
        checked += 1


def test_preset_weight_vectors():
    assert newton().weights == (1.0,)
    assert picard_mann(0.8).weights == (0.8, 1.0)
    assert three_step(0.5, 0.6, 0.8).weights == (0.5, 0.6, 0.8)
    assert kadioglu(0.8, 0.6).weights == (0.6, 0.8, 1.0)


def test_picard_mann_is_newton_after_relaxed_step():
    rng = random.Random(2003)
    m = NewtonMap(Z3)
    for _ in range(50):
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        want = newton_step(m, convex_step(m, z, 0.8))
        assert scheme_step(picard_mann(0.8), m, z) == want


def test_three_step_matches_direct_transcription():
    # w = (1-g) z + g N(z); v = (1-b) w + b N(w); out = (1-a) v + a N(v)
    rng = random.Random(2004)
    g, b, a = 0.5, 0.6, 0.8
    m = NewtonMap(Z3)
    for _ in range(50):
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        w = (1.0 - g) * z + g * newton_step(m, z)
        v = (1.0 - b) * w + b * newton_step(m, w)
        out = (1.0 - a) * v + a * newton_step(m, v)
        assert scheme_step(three_step(g, b, a), m, z) == out


def test_kadioglu_matches_direct_transcription():
    # w = (1-b) z + b N(z); v = (1-a) w + a N(w); out = N(v)
    rng = random.Random(2005)
    a, b = 0.8, 0.6
    m = NewtonMap(Z3)
    for _ in range(50):
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        w = (1.0 - b) * z + b * newton_step(m, z)
        v = (1.0 - a) * w + a * newton_step(m, w)
        assert scheme_step(kadioglu(a, b), m, z) == newton_step(m, v)


def test_s_hybrid_matches_direct_transcription():
    # y = (1-b) z + b N(z); out = (1-a) N(z) + a N(y)
    rng = random.Random(2006)
    a, b = 0.8, 0.6
    m = NewtonMap(Z3)
    for _ in range(50):
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        y = (1.0 - b) * z + b * newton_step(m, z)
        out = (1.0 - a) * newton_step(m, z) + a * newton_step(m, y)
        assert scheme_step(s_hybrid(a, b), m, z) == out


def test_single_weight_chain_is_relaxed_step():
    rng = random.Random(2007)
    m = NewtonMap(Z3)
    for _ in range(50):
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        t = rng.uniform(0.1, 1.0)
        assert scheme_step(Chain((t,)), m, z) == (1.0 - t) * z + t * newton_step(m, z)


def _all_schemes(p):
    yield newton()
    yield picard_mann(0.8)
    yield three_step(0.5, 0.6, 0.8)
    yield kadioglu(0.8, 0.6)
    yield s_hybrid(0.8, 0.6)
    yield Sen(m_bound=p.degree + 1.0)


def test_every_scheme_fixes_roots_of_experiment_polys():
    for p in PAPER_POLYS:
        dp = p.derivative()
        roots = find_roots(p, tol=1e-12).roots
        for scheme in _all_schemes(p):
            m = build_map(scheme, p)
            for r in roots:
                if abs(dp(r)) <= 1e-6:
                    continue
                assert abs(scheme_step(scheme, m, r) - r) <= 1e-10


def test_conjugation_equivariance_exact():
    rng = random.Random(2008)
    for p in (Z3, parse("z^5 + z^2 + 1")):
        m = NewtonMap(p)
        for scheme in (newton(), kadioglu(0.8, 0.6), three_step(0.5, 0.6, 0.8),
                       s_hybrid(0.8, 0.6)):
            for _ in range(50):
                z = complex(rng.uniform(-2, 2), rng.uniform(0.01, 2))
                assert scheme_step(scheme, m, z.conjugate()) == \
                    scheme_step(scheme, m, z).conjugate()


def test_sen_step_fixes_real_root_and_uses_sign():
    p = parse("x^2 - 2", "x")
    m = SenMap(p, m_bound=3.2)
    root = 2 ** 0.5
    assert abs(scheme_step(Sen(), m, complex(root, 0)) - root) < 1e-15
    # moving toward the root from both sides
    left = scheme_step(Sen(), m, complex(-1.6, 0))   # f' < 0 branch
    right = scheme_step(Sen(), m, complex(1.6, 0))
    assert abs(left.real + root) < abs(-1.6 + root)
    assert abs(right.real - root) < abs(1.6 - root)


def test_sen_requires_sen_map():
    with pytest.raises(TypeError):
        scheme_step(Sen(), NewtonMap(X2), 1.0 + 0j)


def test_run_orbit_converges_to_sqrt2():
    stop = StopRule("displacement", 1e-12, 20)
    orbit = run_orbit(newton(), NewtonMap(X2), 1.5 + 0j, stop)
    assert orbit.converged
    root2 = mpmath.mpf(2) ** mpmath.mpf("0.5")
    assert abs(mpmath.mpf(orbit.final.real) - root2) < 1e-12
    assert orbit.iterations == len(orbit.trace) - 1


def test_run_orbit_from_exact_root():
    stop = StopRule("displacement", 1e-3, 12)
    orbit = run_orbit(kadioglu(0.8, 0.6), NewtonMap(Z3), 1 + 0j, stop)
    assert orbit.converged and orbit.iterations <= 1


def test_run_orbit_derivative_vanished_truncates():
    stop = StopRule("displacement", 1e-3, 12)
    orbit = run_orbit(newton(), NewtonMap(Z3), 0j, stop)
    assert not orbit.converged
    assert orbit.iterations == 0
    assert orbit.trace == (0j,)


def test_run_orbit_residual_criterion():
    stop = StopRule("residual", 1e-9, 30)
    orbit = run_orbit(newton(), NewtonMap(X2), 1.5 + 0j, stop)
    assert orbit.converged
    assert abs(X2(orbit.final)) < 1e-9


def test_run_orbit_cap_reached():
    stop = StopRule("displacement", 1e-30, 5)
    orbit = run_orbit(newton(), NewtonMap(Z3), 0.7 + 0.9j, stop)
    assert not orbit.converged
    assert orbit.iterations == 5


def test_stop_rule_validation():
    with pytest.raises(ValueError):
        StopRule("nonsense", 1e-3, 12)
    with pytest.raises(ValueError):
        StopRule("displacement", 0.0, 12)
    with pytest.raises(ValueError):
        StopRule("displacement", 1e-3, 0)


def test_chain_weight_validation():
    with pytest.raises(ValueError):
        Chain(())
    with pytest.raises(ValueError):
        Chain((0.0,))
    with pytest.raises(ValueError):
        Chain((1.2,))
    with pytest.raises(ValueError):
        SHybrid(1.0, 0.5)


def test_parse_scheme_forms():
    assert parse_scheme("newton") == newton()
    assert parse_scheme("picard_mann:0.8") == picard_mann(0.8)
    assert parse_scheme("three_step:0.5,0.6,0.8") == three_step(0.5, 0.6, 0.8)
    assert parse_scheme("kadioglu:0.8,0.6") == kadioglu(0.8, 0.6)
    assert parse_scheme("s:0.8,0.6") == s_hybrid(0.8, 0.6)
    assert parse_scheme("chain:0.3,0.9") == Chain((0.3, 0.9))
    assert parse_scheme("sen:3.2") == Sen(m_bound=3.2)


def test_parse_scheme_defaults_fill_missing_parameters():
    assert parse_scheme("picard_mann") == picard_mann(0.8)
    assert parse_scheme("three_step") == three_step(0.5, 0.6, 0.8)
    assert parse_scheme("kadioglu") == kadioglu(0.8, 0.6)
    assert parse_scheme("kadioglu", alpha=0.9, beta=0.3) == kadioglu(0.9, 0.3)


def test_parse_scheme_errors():
    for bad in ("mystery", "kadioglu:0.8", "newton:1", "chain:", "sen",
                "picard_mann:x"):
        with pytest.raises(ValueError):
            parse_scheme(bad)


def test_build_map():
    assert isinstance(build_map(newton(), Z3), NewtonMap)
    sm = build_map(Sen(m_bound=2.5), Z3)
    assert isinstance(sm, SenMap) and sm.m_bound == 2.5
    with pytest.raises(ValueError):
        build_map(Sen(), Z3)


def test_newton_map_caches_derivative():
    m = NewtonMap(Z3)
    assert m.dp.coeffs == Z3.derivative().coeffs
