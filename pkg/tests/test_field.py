import math
import random

import numpy as np
import pytest

from corpus_sampling import random_functions
from hamflow.cloud import canonical_cloud, random_cloud
from hamflow.expr import evaluate, differentiate, parse_expr, print_expr
from hamflow.field import (DEMO_SYSTEMS, eval_field, hamiltonian_field)

TOL = 1e-12


def golden_points(seed, n=100, lo=0.3, hi=5.0):
    """Random points avoiding the axes so log/reciprocal systems stay finite."""
    rng = random.Random(seed)
    return [(rng.uniform(lo, hi), rng.uniform(lo, hi)) for _ in range(n)]


class TestGoldenFields:
    def test_harmonic(self):
        X = DEMO_SYSTEMS["harmonic"].field()
        for x, y in golden_points(0):
            assert abs(evaluate(X.dx, (x, y)) - (-y)) <= TOL
            assert abs(evaluate(X.dy, (x, y)) - x) <= TOL

    def test_pendulum(self):
        X = DEMO_SYSTEMS["pendulum"].field()
        assert print_expr(X.dx) == "sin(y)"
        assert print_expr(X.dy) == "x"
        for x, y in golden_points(1):
            assert abs(evaluate(X.dx, (x, y)) - math.sin(y)) <= TOL
            assert abs(evaluate(X.dy, (x, y)) - x) <= TOL

    def test_sis(self):
        X = DEMO_SYSTEMS["sis"].field()
        for x, y in golden_points(2):
            want_dx = -x + x * x + y ** -2
            want_dy = y * (1 - 2 * x)
            assert abs(evaluate(X.dx, (x, y)) - want_dx) <= TOL * max(1, abs(want_dx))
            assert abs(evaluate(X.dy, (x, y)) - want_dy) <= TOL * max(1, abs(want_dy))

    def test_lotka_volterra(self):
        X = DEMO_SYSTEMS["lotka_volterra"].field()
        assert print_expr(X.dx) == "-ln(y) + 1/10*x + 1/10"
        assert print_expr(X.dy) == "ln(x) - 1/10*y - 1/10"
        for x, y in golden_points(3):
            want_dx = 0.1 * x - math.log(y) + 0.1
            want_dy = math.log(x) - 0.1 * y - 0.1
            assert abs(evaluate(X.dx, (x, y)) - want_dx) <= 1e-9
            assert abs(evaluate(X.dy, (x, y)) - want_dy) <= 1e-9


class TestEvalField:
    def test_lattice_sample(self):
        X = DEMO_SYSTEMS["harmonic"].field()
        s = eval_field(X, canonical_cloud())
        assert s.vectors.shape == (441, 2)
        assert s.n_nan == 0
        i = 0  # first lattice point is (-10, -10)
        assert s.vectors[i, 0] == 10.0 and s.vectors[i, 1] == -10.0

    def test_nan_rows_flagged_not_dropped(self):
        X = hamiltonian_field(parse_expr("1/y"))
        s = eval_field(X, canonical_cloud())
        assert s.vectors.shape == (441, 2)
        assert s.n_nan == 21  # the whole y = 0 row
        assert np.isnan(s.vectors[s.nan_mask]).any()
        assert np.isfinite(s.vectors[~s.nan_mask]).all()

    def test_matches_scalar_evaluator(self):
        X = DEMO_SYSTEMS["pendulum"].field()
        cloud = random_cloud(9, 1)
        s = eval_field(X, cloud)
        for i in range(0, 441, 37):
            p = tuple(cloud.points[i])
            assert s.vectors[i, 0] == pytest.approx(evaluate(X.dx, p), abs=1e-12)
            assert s.vectors[i, 1] == pytest.approx(evaluate(X.dy, p), abs=1e-12)


class TestConservation:
    def test_gradient_orthogonality_on_corpus(self, b2d5):
        """X_H is tangent to level sets: grad(H) . X_H == 0 identically."""
        cloud = canonical_cloud()
        x, y = cloud.points[:, 0], cloud.points[:, 1]
        for f in random_functions(b2d5, 100, seed=17):
            H = f.to_expr()
            X = hamiltonian_field(H)
            fx, fy = X.compiled()
            from hamflow.expr import compile_numpy
            gx = compile_numpy(differentiate(H, "x"))(x, y)
            gy = compile_numpy(differentiate(H, "y"))(x, y)
            vx, vy = fx(x, y), fy(x, y)
            dot = np.abs(gx * vx + gy * vy)
            scale = 1.0 + np.abs(gx * vx) + np.abs(gy * vy)
            assert np.all(dot <= 1e-9 * scale)

    def test_linearity_of_field_map(self, b2d3):
        from hamflow.expr import add
        rng = random.Random(23)
        fs = random_functions(b2d3, 20, seed=29)
        for f, g in zip(fs[::2], fs[1::2]):
            Xf = hamiltonian_field(f.to_expr())
            Xg = hamiltonian_field(g.to_expr())
            Xsum = hamiltonian_field(add(f.to_expr(), g.to_expr()))
            p = (rng.uniform(-5, 5), rng.uniform(-5, 5))
            assert evaluate(Xsum.dx, p) == pytest.approx(
                evaluate(Xf.dx, p) + evaluate(Xg.dx, p), abs=1e-10)
            assert evaluate(Xsum.dy, p) == pytest.approx(
                evaluate(Xf.dy, p) + evaluate(Xg.dy, p), abs=1e-10)


class TestDemoRegistry:
    def test_all_systems_parse_and_derive(self):
        for name, sys in DEMO_SYSTEMS.items():
            X = sys.field()
            v = evaluate(X.dx, (1.5, 1.5)), evaluate(X.dy, (1.5, 1.5))
            assert all(math.isfinite(c) for c in v), name
