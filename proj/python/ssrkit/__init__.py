"""State reconstruction for linear systems whose sensors may be under attack.

The heavy lifting happens in the compiled ``_ssrkit`` module, which speaks
JSON text; the functions here are dict-in / dict-out wrappers around it.
"""

import json as _json

from ._ssrkit import (
    BudgetError,
    InfeasibleError,
    NumericError,
    ValidationError,
)
from . import _ssrkit

__all__ = [
    "ValidationError",
    "NumericError",
    "InfeasibleError",
    "BudgetError",
    "analyze",
    "decompose",
    "solve",
    "simulate",
    "reduce_cs",
    "reduce_degeneracy",
]


def analyze(instance, s=-1, budget=None, threads=1):
    """Spectral report, observability indices and the eigenvalue classification."""
    kw = {} if budget is None else {"budget": budget}
    return _json.loads(_ssrkit.analyze(_json.dumps(instance), s, threads=threads, **kw))


def decompose(instance):
    """Per-eigenvalue subsystems: block dynamics, restricted maps, image ranks."""
    return _json.loads(_ssrkit.decompose(_json.dumps(instance)))


def solve(instance, method="decompose", s=-1, exhaustive_unique=False, prune=False,
          trimmed=False, budget=None, threads=1):
    """Reconstruct the state and the attacked-sensor set from measurements."""
    kw = {} if budget is None else {"budget": budget}
    return _json.loads(
        _ssrkit.solve(
            _json.dumps(instance),
            method,
            s,
            exhaustive_unique,
            prune,
            trimmed,
            threads=threads,
            **kw,
        )
    )


def simulate(instance, x0, attack="none", s=0, noise=0.0, magnitude=1.0, seed=0,
             budget=None, threads=1):
    """Generate measurements under an attack; the result embeds a solvable instance."""
    kw = {} if budget is None else {"budget": budget}
    return _json.loads(
        _ssrkit.simulate(
            _json.dumps(instance),
            list(x0),
            attack,
            s,
            noise,
            magnitude,
            seed,
            threads=threads,
            **kw,
        )
    )


def reduce_cs(problem):
    """Sparsest solution of F e = b, rewritten as a reconstruction instance."""
    return _json.loads(_ssrkit.reduce_cs(_json.dumps(problem)))


def reduce_degeneracy(problem):
    """Singular square-submatrix existence, rewritten as removal robustness."""
    return _json.loads(_ssrkit.reduce_degeneracy(_json.dumps(problem)))
