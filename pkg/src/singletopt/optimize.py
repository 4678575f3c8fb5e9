"""Derivative-free coordinate search with random restarts.

One small engine serves every maximization in the package: all restarts are
advanced together as one batch, each iteration probes every coordinate
direction for every restart in a single vectorized objective call, the best
improving probe per restart is accepted, and a restart's step is halved
whenever none of its probes improve.  Per-restart starting points are drawn
up front from a single seeded generator, so serial and parallel evaluation
give identical results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SearchSpec", "compass_search"]


@dataclass(frozen=True)
class SearchSpec:
    """Box/wrap structure of the parameter vector.

    ``lower``/``upper`` clip the coordinate when both are finite; a ``wrap``
    period folds it instead (use one or the other per coordinate).
    """

    lower: np.ndarray
    upper: np.ndarray
    wrap: np.ndarray  # period per coordinate, nan = no wrap

    @staticmethod
    def build(dims: int, clip: dict | None = None, wrap: dict | None = None) -> "SearchSpec":
        lower = np.full(dims, -np.inf)
        upper = np.full(dims, np.inf)
        period = np.full(dims, np.nan)
        for k, (lo, hi) in (clip or {}).items():
            lower[k], upper[k] = lo, hi
        for k, p in (wrap or {}).items():
            period[k] = p
        return SearchSpec(lower=lower, upper=upper, wrap=period)

    def project(self, x: np.ndarray) -> np.ndarray:
        x = np.clip(x, self.lower, self.upper)
        wrapped = ~np.isnan(self.wrap)
        if wrapped.any():
            x[..., wrapped] = np.mod(x[..., wrapped], self.wrap[wrapped])
        return x


def compass_search(
    objective,
    x0: np.ndarray,
    spec: SearchSpec,
    step0: float = 0.4,
    step_tol: float = 1e-7,
    max_evals: int | None = None,
    max_iters: int = 400,
    extra_directions: int = 0,
    direction_seed: int = 0,
):
    """Maximize ``objective`` from a batch of starting points.

    ``objective`` maps an (n, d) parameter array to n values and must be
    pure.  Probes are the +-coordinate directions; ``extra_directions``
    adds that many random +-unit-direction pairs per iteration (drawn from
    ``direction_seed``, so runs stay reproducible), which lets the search
    follow valleys that are not axis aligned.  Returns ``(x_best, f_best)``
    for the single best restart.
    """
    x = spec.project(np.array(x0, dtype=float))
    n, d = x.shape
    f = np.asarray(objective(x), dtype=float)
    step = np.full(n, float(step0))
    evals = n
    rng = np.random.default_rng(direction_seed) if extra_directions else None

    for _ in range(max_iters):
        if (step < step_tol).all():
            break
        directions = np.eye(d)
        if extra_directions:
            extra = rng.standard_normal((extra_directions, d))
            extra /= np.linalg.norm(extra, axis=1, keepdims=True)
            directions = np.concatenate([directions, extra])
        offsets = np.concatenate([directions, -directions])
        m = offsets.shape[0]
        if max_evals is not None and evals + m * n > max_evals:
            break
        candidates = x[None, :, :] + step[None, :, None] * offsets[:, None, :]
        candidates = spec.project(candidates.reshape(-1, d))
        values = np.asarray(objective(candidates), dtype=float).reshape(m, n)
        evals += m * n

        best_idx = values.argmax(axis=0)
        best_val = values[best_idx, np.arange(n)]
        improved = best_val > f
        if improved.any():
            chosen = candidates.reshape(m, n, d)[best_idx, np.arange(n), :]
            x[improved] = chosen[improved]
            f[improved] = best_val[improved]
        step[~improved] /= 2

    k = int(f.argmax())
    return x[k], float(f[k])
