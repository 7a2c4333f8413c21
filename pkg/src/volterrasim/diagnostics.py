"""Statistical comparison of ensemble laws.

The workhorse is the energy two-sample test with permutation
calibration; it backs every equality-in-law claim checked by the
package.  One-dimensional Kolmogorov-Smirnov projections and empirical
characteristic functionals are secondary, more interpretable views.
"""

from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.spatial.distance import pdist, squareform

from .rng import substream


@dataclass(frozen=True)
class TwoSampleReport:
    statistic: float
    p_value: float
    n_permutations: int
    level: float

    @property
    def passed(self) -> bool:
        return self.p_value >= self.level

    def __str__(self):
        verdict = "pass" if self.passed else "FAIL"
        return (f"energy={self.statistic:.6g} p={self.p_value:.4f} "
                f"(n_perm={self.n_permutations}, level={self.level}): {verdict}")


def energy_statistic(X: np.ndarray, Y: np.ndarray) -> float:
    """E-distance 2 E|X-Y| - E|X-X'| - E|Y-Y'| from sample means."""
    X = np.atleast_2d(np.asarray(X, float))
    Y = np.atleast_2d(np.asarray(Y, float))
    D = squareform(pdist(np.vstack([X, Y])))
    nx = len(X)
    return _energy_from_blocks(D, np.arange(nx), np.arange(nx, nx + len(Y)))


def _energy_from_blocks(D, ix, iy):
    dxy = D[np.ix_(ix, iy)].mean()
    nx, ny = len(ix), len(iy)
    dxx = D[np.ix_(ix, ix)].sum() / (nx * (nx - 1)) if nx > 1 else 0.0
    dyy = D[np.ix_(iy, iy)].sum() / (ny * (ny - 1)) if ny > 1 else 0.0
    return 2.0 * dxy - dxx - dyy


def energy_two_sample(X, Y, n_perm: int = 200, level: float = 0.01,
                      seed: int = 0) -> TwoSampleReport:
    """Permutation-calibrated energy test; deterministic given seed.

    Rows are observations.  Distances are precomputed once; each
    permutation only relabels indices, so a swap of X and Y with the
    same seed yields the same p-value.
    """
    X = np.atleast_2d(np.asarray(X, float))
    Y = np.atleast_2d(np.asarray(Y, float))
    if X.shape[1] != Y.shape[1]:
        raise ValueError("samples must share dimension")
    if min(len(X), len(Y)) < 50:
        raise ValueError("need at least 50 observations per sample")
    nx, ny = len(X), len(Y)
    D = squareform(pdist(np.vstack([X, Y])))
    if D.max() == 0.0:
        # both samples the same constant: laws trivially equal
        return TwoSampleReport(0.0, 1.0, n_perm, level)
    observed = _energy_from_blocks(D, np.arange(nx), np.arange(nx, nx + ny))
    rng = substream(seed, 0)
    labels = np.arange(nx + ny)
    count = 0
    for _ in range(n_perm):
        rng.shuffle(labels)
        stat = _energy_from_blocks(D, labels[:nx], labels[nx:])
        if stat >= observed:
            count += 1
    p = (count + 1) / (n_perm + 1)
    return TwoSampleReport(float(observed), float(p), n_perm, level)


def ks_projections(X, Y, directions) -> list:
    """Two-sided KS tests of 1-D projections along given directions."""
    X = np.atleast_2d(np.asarray(X, float))
    Y = np.atleast_2d(np.asarray(Y, float))
    out = []
    for h in directions:
        h = np.asarray(h, float)
        res = stats.ks_2samp(X @ h, Y @ h)
        out.append((float(res.statistic), float(res.pvalue)))
    return out


@dataclass(frozen=True)
class CharFunctionalEstimate:
    direction: np.ndarray
    estimate: complex
    stderr: float


def char_functional(sample: np.ndarray, h) -> CharFunctionalEstimate:
    """Monte-Carlo estimate of E exp(i <h, X>) with its standard error.

    sample: (n_obs, dim) rows; h: direction vector.
    """
    h = np.atleast_1d(np.asarray(h, float))
    X = np.atleast_2d(np.asarray(sample, float))
    z = np.exp(1j * (X @ h))
    n = len(z)
    est = z.mean()
    stderr = float(np.sqrt((z.real.var() + z.imag.var()) / n))
    return CharFunctionalEstimate(h, complex(est), stderr)


def trace_trend(traces, t_grid, growth_tol: float = 0.1) -> dict:
    """Classify a Tr q_t sequence as bounded or growing like t^gamma.

    Fits the log-log slope over the second half of the grid; verdict is
    'bounded' when the fitted exponent is below growth_tol.
    """
    t = np.asarray(t_grid, float)
    y = np.asarray(traces, float)
    if np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be increasing")
    if np.allclose(y, 0.0):
        return {"traces": y, "exponent": 0.0, "verdict": "bounded"}
    half = len(t) // 2
    tt, yy = t[half:], y[half:]
    mask = yy > 0
    slope = float(np.polyfit(np.log(tt[mask]), np.log(yy[mask]), 1)[0])
    verdict = "bounded" if slope < growth_tol else f"growing like t^{slope:.3f}"
    return {"traces": y, "exponent": slope, "verdict": verdict}
