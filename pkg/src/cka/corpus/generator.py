"""Seeded random graphs.

Only integer draws from ``random.Random`` are used (no floats), so a given
parameter set produces the same graph on every platform.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from ..errors import PreconditionError
from ..graph import OMEGA, Bundle, Graph


@dataclass(frozen=True)
class GeneratorParams:
    seed: int
    vertices: int
    density: Fraction = Fraction(1, 3)
    inf_prob: Fraction = Fraction(0)
    max_mult: int = 1
    acyclic: bool = False  # only pairs i < j, so the result has no loops

    def __post_init__(self):
        for name in ("density", "inf_prob"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
            if not 0 <= getattr(self, name) <= 1:
                raise PreconditionError(f"{name} must lie in [0, 1]")
        if self.vertices < 1:
            raise PreconditionError("a graph needs at least one vertex")
        if self.max_mult < 1:
            raise PreconditionError("max_mult must be >= 1")


def _hit(rng: random.Random, p: Fraction) -> bool:
    return rng.randrange(p.denominator) < p.numerator


def random_graph(params: GeneratorParams) -> Graph:
    rng = random.Random(params.seed)
    names = [f"v{i}" for i in range(params.vertices)]
    bundles = []
    for i, s in enumerate(names):
        for j, t in enumerate(names):
            if params.acyclic and j <= i:
                continue
            if not _hit(rng, params.density):
                continue
            mult = rng.randint(1, params.max_mult)
            if _hit(rng, params.inf_prob):
                mult = OMEGA
            bundles.append(Bundle(f"e{len(bundles)}", s, t, mult))
    tag = str(params.seed) if params.seed >= 0 else f"m{-params.seed}"
    return Graph(f"random_{tag}", tuple(names), tuple(bundles))
