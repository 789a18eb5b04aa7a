"""Hamiltonian vector fields on the standard symplectic plane.

The sign convention is X_H = (-dH/dy, dH/dx), which matches all worked
demo systems (harmonic oscillator, pendulum, SIS, Lotka-Volterra).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cloud import PointCloud
from .expr import Expr, compile_numpy, differentiate, neg, parse_expr, print_expr

__all__ = ["FieldExpr", "FieldSample", "DemoSystem", "DEMO_SYSTEMS",
           "hamiltonian_field", "eval_field"]


@dataclass(frozen=True)
class FieldExpr:
    """Symbolic 2-component vector field (dx, dy components)."""

    dx: Expr
    dy: Expr

    def compiled(self):
        return compile_numpy(self.dx), compile_numpy(self.dy)

    def __str__(self) -> str:
        return f"({print_expr(self.dx)}, {print_expr(self.dy)})"


@dataclass(frozen=True)
class FieldSample:
    """Field evaluated on a point cloud; NaN rows flagged, never dropped."""

    cloud: PointCloud
    vectors: np.ndarray  # (n, 2) float64, NaN allowed
    nan_mask: np.ndarray  # (n,) bool, True where either component is NaN

    @property
    def n_nan(self) -> int:
        return int(self.nan_mask.sum())


def hamiltonian_field(H: Expr) -> FieldExpr:
    """Derive X_H = (-dH/dy, dH/dx) under the standard symplectic form."""
    return FieldExpr(dx=neg(differentiate(H, "y")), dy=differentiate(H, "x"))


def eval_field(X: FieldExpr, cloud: PointCloud) -> FieldSample:
    fx, fy = X.compiled()
    x = cloud.points[:, 0]
    y = cloud.points[:, 1]
    vectors = np.column_stack([fx(x, y), fy(x, y)])
    nan_mask = np.isnan(vectors).any(axis=1)
    return FieldSample(cloud=cloud, vectors=vectors, nan_mask=nan_mask)


@dataclass(frozen=True)
class DemoSystem:
    """Named demo Hamiltonian with its constants already substituted."""

    name: str
    hamiltonian: str  # grammar text, constants inlined
    constants: dict

    @property
    def H(self) -> Expr:
        return parse_expr(self.hamiltonian)

    def field(self) -> FieldExpr:
        return hamiltonian_field(self.H)


DEMO_SYSTEMS = {
    "harmonic": DemoSystem(
        "harmonic", "1/2*(y^2 + x^2)", {"alpha": 1.0}),
    "pendulum": DemoSystem(
        "pendulum", "1/2*x^2 + cos(y)", {}),
    "sis": DemoSystem(
        "sis", "x*y*(1 - x) + 1/y", {"rho0": 1.0}),
    "lotka_volterra": DemoSystem(
        "lotka_volterra",
        "x*ln(x) + y*ln(y) - 1.1*x - 1.1*y - 0.1*x*y",
        {"a": 1.1, "b": 1.1, "c": 0.1}),
}
