"""Transfer operators of piecewise affine interval maps.

Thin wrappers over the native module: inputs and outputs are plain dicts in
the same JSON artifact schema the command-line tool uses.  Scalars are strings
("p/q" or decimal); ``mode="rational"`` computes exactly, ``mode="float"``
in double precision.
"""

import json as _json

from ._core import (
    CapExceeded,
    DomainError,
    Error,
    HypothesisViolated,
    InvalidInput,
    InvalidSystem,
    NonFiniteSample,
    RangeError,
    exact as _exact,
    f64 as _f64,
)

__all__ = [
    "Error",
    "DomainError",
    "RangeError",
    "InvalidInput",
    "InvalidSystem",
    "HypothesisViolated",
    "CapExceeded",
    "NonFiniteSample",
    "validate",
    "apply_operator",
    "solve",
    "attractor",
    "cylinder",
    "measure_verify",
    "build_g_orthogonal",
    "build_g_piecewise",
]


def _backend(mode):
    if mode == "rational":
        return _exact
    if mode == "float":
        return _f64
    raise ValueError("mode must be 'rational' or 'float'")


def validate(system, *, mode="rational"):
    """Structural flags (c1/c2/derivative-sum) of a branch system."""
    return _json.loads(_backend(mode).validate(_json.dumps(system)))


def apply_operator(system, f, *, power=1, mode="rational"):
    """Apply a power of the transfer operator to a step function."""
    return _json.loads(
        _backend(mode).apply_operator(_json.dumps(system), _json.dumps(f), power)
    )


def solve(
    system,
    g,
    *,
    method="neumann",
    solve_mode="family",
    tol="",
    max_iters=10000,
    strict_zero_integral=False,
    mode="rational",
):
    """Solve phi = P phi + g by Neumann or averaged series summation."""
    return _json.loads(
        _backend(mode).solve(
            _json.dumps(system),
            _json.dumps(g),
            method,
            solve_mode,
            tol,
            max_iters,
            strict_zero_integral,
        )
    )


def attractor(system, *, depth, part_cap=1000000, include_sets=False, mode="rational"):
    """Iterate branch images; level measures, ratios, and the decay verdict."""
    return _json.loads(
        _backend(mode).attractor(_json.dumps(system), depth, part_cap, include_sets)
    )


def cylinder(measure, word, *, mode="rational"):
    """Cylinder interval and mass for one branch word (1-based symbols)."""
    return _json.loads(_backend(mode).cylinder(_json.dumps(measure), list(word)))


def measure_verify(measure, *, seed=1, count=100, grid=256, depth=6, mode="rational"):
    """Density criterion, seeded set-criterion battery, refinement bracket."""
    return _json.loads(
        _backend(mode).measure_verify(_json.dumps(measure), seed, count, grid, depth)
    )


def build_g_orthogonal(system, g0, epsilon, *, mode="rational"):
    """Extend a seed profile so the transfer operator annihilates it."""
    return _json.loads(
        _backend(mode).build_g_orthogonal(
            _json.dumps(system), _json.dumps(g0), epsilon
        )
    )


def build_g_piecewise(system, gammas, *, mode="rational"):
    """Branchwise-constant annihilated g plus its invariant density."""
    return _json.loads(
        _backend(mode).build_g_piecewise(_json.dumps(system), [str(x) for x in gammas])
    )
