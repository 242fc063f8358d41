"""Vector-valued polynomial maps with exact analytic Jacobians.

These stand in for every smooth map in the solvers (constraint blocks,
coordinate charts): polynomials are C-infinity, differentiate exactly,
and serialize to JSON without an expression interpreter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .linalg import as_vector


@dataclass(frozen=True)
class Monomial:
    """coeff * prod_i x_i**exponents[i]."""

    coeff: float
    exponents: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeff", float(self.coeff))
        exps = tuple(int(e) for e in self.exponents)
        if any(e < 0 for e in exps):
            raise ValueError("monomial exponents must be nonnegative")
        object.__setattr__(self, "exponents", exps)


class PolyMap:
    """A polynomial map R^input_dim -> R^output_dim.

    components[j] is the list of Monomials of output coordinate j.
    output_dim = 0 (an empty constraint block) is legal everywhere.
    """

    def __init__(self, input_dim, components):
        self.input_dim = int(input_dim)
        if self.input_dim < 1:
            raise ValueError("input_dim must be >= 1")
        comps = []
        for comp in components:
            comp = [m if isinstance(m, Monomial) else Monomial(*m) for m in comp]
            for m in comp:
                if len(m.exponents) != self.input_dim:
                    raise DimensionMismatch(
                        f"monomial has {len(m.exponents)} exponents, "
                        f"map input_dim is {self.input_dim}"
                    )
            comps.append(tuple(comp))
        self.components = tuple(comps)

    @property
    def output_dim(self):
        return len(self.components)

    @staticmethod
    def identity(n):
        def unit(i):
            e = [0] * n
            e[i] = 1
            return [Monomial(1.0, tuple(e))]

        return PolyMap(n, [unit(i) for i in range(n)])

    @staticmethod
    def empty(input_dim):
        """A 0-row block (absent constraints)."""
        return PolyMap(input_dim, [])

    @staticmethod
    def constant(input_dim, values):
        zero = (0,) * input_dim
        return PolyMap(input_dim, [[Monomial(v, zero)] for v in values])

    def eval(self, x):
        x = as_vector(x, dim=self.input_dim)
        out = np.zeros(self.output_dim)
        for j, comp in enumerate(self.components):
            acc = 0.0
            for m in comp:
                term = m.coeff
                for xi, e in zip(x, m.exponents):
                    if e:
                        term *= xi**e
                acc += term
            out[j] = acc
        return out

    def jacobian(self, x):
        x = as_vector(x, dim=self.input_dim)
        J = np.zeros((self.output_dim, self.input_dim))
        for j, comp in enumerate(self.components):
            for m in comp:
                for i, e in enumerate(m.exponents):
                    if e == 0:
                        continue
                    term = m.coeff * e
                    for k, (xk, ek) in enumerate(zip(x, m.exponents)):
                        p = ek - 1 if k == i else ek
                        if p:
                            term *= xk**p
                    J[j, i] += term
        return J

    def check_jacobian(self, x, h=1e-5):
        """Max entrywise |analytic - central finite difference| at x."""
        if h <= 0:
            raise ValueError("h must be positive")
        x = as_vector(x, dim=self.input_dim)
        J = self.jacobian(x)
        fd = np.zeros_like(J)
        for i in range(self.input_dim):
            step = np.zeros(self.input_dim)
            step[i] = h
            fd[:, i] = (self.eval(x + step) - self.eval(x - step)) / (2 * h)
        if J.size == 0:
            return 0.0
        return float(np.max(np.abs(J - fd)))

    # JSON schema: {"input_dim": n, "outputs": [[{"coeff": c, "exponents": [...]}, ...], ...]}

    def to_json(self):
        return {
            "input_dim": self.input_dim,
            "outputs": [
                [{"coeff": m.coeff, "exponents": list(m.exponents)} for m in comp]
                for comp in self.components
            ],
        }

    @staticmethod
    def from_json(obj):
        try:
            input_dim = obj["input_dim"]
            outputs = obj["outputs"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"polynomial map JSON missing field {exc}") from exc
        comps = [
            [Monomial(m["coeff"], tuple(m["exponents"])) for m in comp]
            for comp in outputs
        ]
        return PolyMap(input_dim, comps)

    def __eq__(self, other):
        return (
            isinstance(other, PolyMap)
            and self.input_dim == other.input_dim
            and self.components == other.components
        )

    def __repr__(self):
        return f"PolyMap({self.input_dim} -> {self.output_dim})"
