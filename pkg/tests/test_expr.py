"""Expression core: parsing, differentiation, zero tests, evaluation."""

import math
import random
from fractions import Fraction

import pytest

from imkit.errors import ExprDomainError, ExprSyntaxError, UnknownIdentifierError
from imkit.expr import (
    const,
    cos,
    differentiate,
    eval_expr,
    exp,
    is_zero,
    mul,
    normalize,
    param,
    parse,
    pow_expr,
    sin,
    subst_params,
    to_string,
    var,
)

ECOLI_NAMES = ["a1", "a2", "a3", "a4", "a5", "a6"]


def rand_expr(rng, depth, n=3, params=("a", "b")):
    r = rng.random()
    if depth == 0 or r < 0.3:
        c = rng.random()
        if c < 0.4:
            return const(Fraction(rng.randint(-6, 6), rng.randint(1, 5)))
        if c < 0.8:
            return var(rng.randint(1, n))
        return param(rng.choice(params))
    if r < 0.52:
        return rand_expr(rng, depth - 1, n, params) + rand_expr(rng, depth - 1, n, params)
    if r < 0.70:
        return rand_expr(rng, depth - 1, n, params) * rand_expr(rng, depth - 1, n, params)
    if r < 0.80:
        return rand_expr(rng, depth - 1, n, params) - rand_expr(rng, depth - 1, n, params)
    if r < 0.88:
        return pow_expr(rand_expr(rng, depth - 1, n, params), rng.choice([-1, 2, 3]))
    if r < 0.94:
        return rand_expr(rng, depth - 1, n, params) / rand_expr(rng, depth - 1, n, params)
    fn = rng.choice([exp, sin, cos])
    return fn(rand_expr(rng, depth - 1, n, params))


def rand_poly_expr(rng, depth, n=3):
    r = rng.random()
    if depth == 0 or r < 0.35:
        return const(Fraction(rng.randint(-4, 4), rng.randint(1, 3))) if rng.random() < 0.5 else var(rng.randint(1, n))
    if r < 0.65:
        return rand_poly_expr(rng, depth - 1, n) + rand_poly_expr(rng, depth - 1, n)
    if r < 0.9:
        return rand_poly_expr(rng, depth - 1, n) * rand_poly_expr(rng, depth - 1, n)
    return pow_expr(rand_poly_expr(rng, depth - 1, n), rng.choice([2, 3]))


class TestParse:
    def test_simple(self):
        e = parse("2*x1 + 1", 1)
        assert to_string(e) == "1 + 2*x1"
        assert eval_expr(e, [3.0]) == 7.0

    def test_input_symbol_rejected_in_drift(self):
        with pytest.raises(UnknownIdentifierError):
            parse("a1 - a2*x1 + a3*x2 - a4*x1*u", 2, ["a1", "a2", "a3", "a4"])

    def test_ecoli_output(self):
        h = parse("(a1+a5) - (a2*x1 + (a6-a3)*x2)", 2, ECOLI_NAMES)
        unit = {k: 1.0 for k in ECOLI_NAMES}
        assert eval_expr(h, [2.0, 1.0], unit) == 0.0

    def test_syntax_error_offset(self):
        with pytest.raises(ExprSyntaxError) as err:
            parse("2*x1 + ", 1)
        assert err.value.offset == 7

    def test_bad_character_offset(self):
        with pytest.raises(ExprSyntaxError) as err:
            parse("2*x1 ? 3", 1)
        assert err.value.offset == 5

    def test_variable_index_beyond_dimension(self):
        with pytest.raises(UnknownIdentifierError):
            parse("x3 + 1", 2)

    def test_rational_literals_exact(self):
        e = parse("7/2", 1)
        assert to_string(e) == "7/2"
        e2 = parse("0.5", 1)
        assert to_string(e2) == "1/2"

    def test_integer_exponents_only(self):
        with pytest.raises(ExprSyntaxError):
            parse("x1^0.5", 1)
        assert eval_expr(parse("x1^(-2)", 1), [2.0]) == 0.25
        assert eval_expr(parse("x1^-2", 1), [2.0]) == 0.25

    def test_roundtrip_structural_stability(self):
        rng = random.Random(11)
        checked = 0
        for _ in range(300):
            raw = rand_expr(rng, 4)
            try:
                e = normalize(raw)
            except ExprDomainError:
                continue
            again = parse(to_string(e), 3, ["a", "b"])
            assert again == e
            checked += 1
        assert checked > 200

    def test_normalize_idempotent(self):
        rng = random.Random(17)
        for _ in range(300):
            raw = rand_expr(rng, 4)
            try:
                e = normalize(raw)
            except ExprDomainError:
                continue
            assert normalize(e) == e


class TestDifferentiate:
    def test_power_rule(self):
        d = differentiate(parse("x1^2", 1), 1)
        assert to_string(d) == "2*x1"

    def test_ecoli_h_partial(self):
        h = parse("(a1+a5) - (a2*x1 + (a6-a3)*x2)", 2, ECOLI_NAMES)
        assert to_string(differentiate(h, 1)) == "-a2"

    def test_product_with_exp(self):
        d = differentiate(parse("x1*exp(x1)", 1), 1)
        assert is_zero(normalize(d - parse("(1+x1)*exp(x1)", 1))).kind == "proven_zero"

    def test_linearity_structural(self):
        rng = random.Random(23)
        for _ in range(60):
            alpha = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
            e1 = rand_poly_expr(rng, 3)
            e2 = rand_poly_expr(rng, 3)
            i = rng.randint(1, 3)
            left = differentiate(normalize(const(alpha) * e1 + e2), i)
            right = normalize(const(alpha) * differentiate(e1, i) + differentiate(e2, i))
            assert left == right

    def test_matches_finite_differences(self):
        rng = random.Random(5)
        checked = 0
        attempts = 0
        while checked < 100 and attempts < 600:
            attempts += 1
            e = rand_expr(rng, 3)
            i = rng.randint(1, 3)
            try:
                d = differentiate(normalize(e), i)
            except ExprDomainError:
                continue
            point = [rng.uniform(-2, 2) for _ in range(3)]
            pvals = {"a": rng.uniform(0.1, 3), "b": rng.uniform(0.1, 3)}
            step = 1e-5 * max(1.0, abs(point[i - 1]))
            plus = list(point)
            minus = list(point)
            plus[i - 1] += step
            minus[i - 1] -= step
            try:
                exact = eval_expr(d, point, pvals)
                fd = (eval_expr(e, plus, pvals) - eval_expr(e, minus, pvals)) / (2 * step)
            except ExprDomainError:
                continue
            if abs(fd) > 1e6 or not math.isfinite(fd):
                continue  # too ill-conditioned for a meaningful comparison
            assert exact == pytest.approx(fd, rel=1e-6, abs=2e-5)
            checked += 1
        assert checked == 100


class TestIsZero:
    def test_expanded_square(self):
        e = parse("(x1+1)^2 - x1^2 - 2*x1 - 1", 1)
        assert is_zero(e).kind == "proven_zero"

    def test_ecoli_input_coefficient(self, ecoli):
        from imkit.vfield import lie_derivative

        lgh = lie_derivative(ecoli.h, ecoli.g)
        d_expr = parse("a2*a4 + (a3-a6)*a4", 1, ECOLI_NAMES)
        assert is_zero(normalize(lgh - d_expr * var(1))).kind == "proven_zero"

    def test_witness(self):
        status = is_zero(parse("x1*x2 - x2", 2))
        assert status.kind == "sampled_nonzero"
        assert abs(status.witness_value) > 1e-8
        assert eval_expr(parse("x1*x2 - x2", 2), status.witness) == pytest.approx(
            status.witness_value
        )

    def test_nonzero_constant(self):
        assert is_zero(parse("x1/x1", 1)).kind == "proven_nonzero_constant"

    def test_complete_on_rational_fragment(self):
        rng = random.Random(31)
        for _ in range(60):
            # product of random linear factors minus its hand expansion
            n = 2
            factors = []
            for _ in range(rng.randint(1, 3)):
                factors.append(
                    const(rng.randint(-3, 3))
                    + const(rng.randint(-3, 3)) * var(1)
                    + const(rng.randint(-3, 3)) * var(2)
                )
            prod = factors[0]
            for f in factors[1:]:
                prod = prod * f
            expanded = _expand_by_hand(factors)
            assert is_zero(normalize(prod - expanded), n=n).kind == "proven_zero"

    def test_proven_zero_sound_at_samples(self):
        rng = random.Random(37)
        e = parse("(x1+x2)^3 - x1^3 - 3*x1^2*x2 - 3*x1*x2^2 - x2^3", 2)
        assert is_zero(e).kind == "proven_zero"
        for _ in range(50):
            point = [rng.uniform(-3, 3), rng.uniform(-3, 3)]
            assert abs(eval_expr(e, point)) < 1e-12

    def test_transcendental_sampled(self):
        status = is_zero(parse("sin(x1)^2 + cos(x1)^2 - 1", 1))
        assert status.kind == "sampled_zero"
        assert status.samples >= 32

    def test_seed_determinism(self):
        a = is_zero(parse("x1*x2 - x2", 2), seed=42)
        b = is_zero(parse("x1*x2 - x2", 2), seed=42)
        assert a.witness == b.witness


def _expand_by_hand(factors):
    """Independent oracle: expand by explicit coefficient bookkeeping."""
    # coefficients indexed by (i, j) for x1^i x2^j
    coeffs = {(0, 0): Fraction(1)}
    from imkit.expr import Add, Const, Mul, Var

    def linear_parts(f):
        f = normalize(f)
        c0 = c1 = c2 = Fraction(0)
        terms = f.terms if isinstance(f, Add) else (f,)
        for t in terms:
            if isinstance(t, Const):
                c0 += t.value
            elif isinstance(t, Var):
                if t.index == 1:
                    c1 += 1
                else:
                    c2 += 1
            elif isinstance(t, Mul):
                coef = t.factors[0].value if isinstance(t.factors[0], Const) else Fraction(1)
                v = t.factors[-1]
                if v.index == 1:
                    c1 += coef
                else:
                    c2 += coef
        return c0, c1, c2

    for f in factors:
        c0, c1, c2 = linear_parts(f)
        out = {}
        for (i, j), c in coeffs.items():
            for (di, dj), fc in (((0, 0), c0), ((1, 0), c1), ((0, 1), c2)):
                key = (i + di, j + dj)
                out[key] = out.get(key, Fraction(0)) + c * fc
        coeffs = out
    total = const(0)
    for (i, j), c in coeffs.items():
        if c:
            total = total + const(c) * pow_expr(var(1), i) * pow_expr(var(2), j)
    return normalize(total)


class TestEval:
    def test_linear(self):
        assert eval_expr(parse("2*x1 + 1", 1), [3.0]) == 7.0

    def test_domain_error_names_subexpression(self):
        with pytest.raises(ExprDomainError) as err:
            eval_expr(parse("ln(x1)", 1), [0.0])
        assert "ln" in str(err.value)

    def test_division_by_zero(self):
        with pytest.raises(ExprDomainError):
            eval_expr(parse("1/x1", 1), [0.0])

    def test_unbound_parameter(self):
        with pytest.raises(ExprDomainError):
            eval_expr(parse("a*x1", 1, ["a"]), [1.0])

    def test_param_substitution(self):
        e = parse("a*x1 + b", 1, ["a", "b"])
        bound = normalize(subst_params(e, {"a": const(2), "b": const(5)}))
        assert eval_expr(bound, [4.0]) == 13.0
