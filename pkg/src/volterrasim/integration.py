"""Scalar-noise stochastic integration for step and L^p integrands.

The integral of a step function f = sum f_j 1_[t_{j-1}, t_j) against a
Volterra path b is the Riemann-Stieltjes sum i(f) = sum f_j (b_{t_j} -
b_{t_{j-1}}).  Its second moment can be computed two independent ways:
as the L2 norm of (K* f)(r) = int_r^inf f(u) dK(u, r) du, or as the
double integral of <f(u), f(v)> phi(u, v); d_norm_sq computes both and
insists they agree.
"""

import numpy as np
from scipy import integrate

from .errors import AlignmentError, ConsistencyError, QuadratureError
from .kernels import VolterraKernel, cov_R, phi

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


class StepFunction:
    """Vector-valued step function: values[j] on [breakpoints[j], breakpoints[j+1])."""

    def __init__(self, breakpoints, values):
        bp = np.asarray(breakpoints, float)
        vals = np.atleast_2d(np.asarray(values, float))
        if vals.shape[0] == 1 and len(bp) - 1 != 1:
            vals = vals.reshape(len(bp) - 1, -1)
        if np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if vals.shape[0] != len(bp) - 1:
            raise ValueError("need one value per interval")
        if not np.all(np.isfinite(vals)):
            raise ValueError("step values must be finite")
        self.breakpoints = bp
        self.values = vals

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def __call__(self, r):
        j = np.searchsorted(self.breakpoints, r, side="right") - 1
        out = np.zeros(self.dim)
        if 0 <= j < len(self.values):
            out = self.values[j]
        return out

    def scaled(self, c):
        return StepFunction(self.breakpoints, c * self.values)

    def lp_norm_sq(self, p: float) -> float:
        """Squared L^p norm of |f|_V (the embedding side of the D-norm bound)."""
        mags = np.linalg.norm(self.values, axis=1)
        widths = np.diff(self.breakpoints)
        return float(np.sum(mags ** p * widths) ** (2.0 / p))


def kstar(kernel: VolterraKernel, f: StepFunction, r: float) -> np.ndarray:
    """(K* f)(r); telescopes through the kernel antiderivative for steps."""
    bp = f.breakpoints
    if r >= bp[-1]:
        return np.zeros(f.dim)
    out = np.zeros(f.dim)
    for j in range(len(f.values)):
        hi, lo = bp[j + 1], max(bp[j], r)
        if hi <= r:
            continue
        out += f.values[j] * (kernel.eval(hi, r) - kernel.eval(lo, r))
    return out


def d_norm_sq(kernel: VolterraKernel, f: StepFunction,
              check: bool = True, check_rtol: float = 1e-3) -> float:
    """Squared D-norm of a step function.

    Primary route: the phi double integral, which for steps is the
    bilinear sum of increment covariances.  When check is set the L2
    norm of K* f is also computed by quadrature and a discrepancy above
    check_rtol raises ConsistencyError.
    """
    bp = f.breakpoints
    vals = f.values
    n = len(vals)
    total = 0.0
    for j in range(n):
        for k in range(n):
            inner = float(vals[j] @ vals[k])
            if inner != 0.0:
                total += inner * cov_R(kernel, bp[j], bp[j + 1], bp[k], bp[k + 1])
    if check:
        other = _kstar_l2_sq(kernel, f)
        scale = max(abs(total), abs(other), 1e-12)
        if abs(total - other) > check_rtol * scale:
            raise ConsistencyError(
                "phi-form and K*-form of the D-norm disagree",
                values=(total, other))
    return total


def _kstar_l2_sq(kernel: VolterraKernel, f: StepFunction) -> float:
    """int |K* f(r)|^2 dr with adaptive lower truncation.

    The integrand decays like (-r)^(2 alpha - 2), so the truncated tail
    is bounded by |K* f(-L)|^2 L / (1 - 2 alpha) and L is doubled until
    the bound is negligible.
    """
    bp = f.breakpoints

    def g(r):
        w = kstar(kernel, f, r)
        return float(w @ w)

    pts = list(bp)
    L = abs(bp[0]) + 10.0
    total, err = integrate.quad(g, bp[0], bp[-1], points=pts[1:-1] or None,
                                limit=200)
    val, e = integrate.quad(g, -L, bp[0], limit=200)
    total += val
    err += e
    for _ in range(60):
        tail = g(-L) * L / (1.0 - 2.0 * kernel.alpha)
        if tail <= 1e-9 * max(abs(total), 1e-300):
            break
        val, e = integrate.quad(g, -2.0 * L, -L, limit=100)
        total += val
        err += e
        L *= 2.0
    else:
        raise QuadratureError("K* L2 norm: tail did not converge",
                              value=total, estimate=tail)
    return total


def inner_product_quadrature(kernel: VolterraKernel, f, g,
                             s1, t1, s2, t2) -> float:
    """int int <f(u), g(v)> phi(u, v) du dv over [s1,t1] x [s2,t2].

    f, g: callables returning vectors.  Oracle for E <i(f), i(g)>.
    """
    def inner(u):
        fu = np.atleast_1d(f(u))

        def h(v):
            return float(fu @ np.atleast_1d(g(v))) * phi(kernel, u, v)

        pts = [u] if s2 < u < t2 else None
        val, _ = integrate.quad(h, s2, t2, points=pts, limit=200)
        return val

    val, _ = integrate.quad(inner, s1, t1, limit=200)
    return val


def _path_matrix(paths) -> tuple:
    """(grid, values) view accepting an Ensemble or a single SamplePath-like."""
    grid = paths.grid
    vals = paths.values
    if vals.ndim == 1:
        vals = vals[:, None]
    return grid, vals


def integrate_step(f: StepFunction, paths) -> np.ndarray:
    """Pathwise Riemann-Stieltjes sum; shape (dim, n_paths).

    Breakpoints must sit on the path grid up to the dt/2 snapping
    tolerance, else AlignmentError.
    """
    grid, vals = _path_matrix(paths)
    idx = [grid.index_of(t) for t in f.breakpoints]
    out = np.zeros((f.dim, vals.shape[1]))
    for j in range(len(f.values)):
        db = vals[idx[j + 1]] - vals[idx[j]]
        out += f.values[j][:, None] * db[None, :]
    return out


def step_approximation(fn, s: float, t: float, n_sub: int, dim=None) -> StepFunction:
    """Cell-average step approximation of a general integrand on [s, t)."""
    edges = np.linspace(s, t, n_sub + 1)
    sample = np.atleast_1d(np.asarray(fn(0.5 * (s + t)), float))
    m = len(sample) if dim is None else dim
    vals = np.zeros((n_sub, m))
    for j in range(n_sub):
        a, b = edges[j], edges[j + 1]
        x = 0.5 * (b - a) * _GL_NODES + 0.5 * (a + b)
        fx = np.array([np.atleast_1d(fn(xi)) for xi in x], float)
        if not np.all(np.isfinite(fx)):
            raise ValueError(f"integrand not finite on [{a}, {b}]")
        vals[j] = 0.5 * _GL_WEIGHTS @ fx
    return StepFunction(edges, vals)


def definite_integral(fn, s: float, t: float, paths, n_sub: int = 64) -> np.ndarray:
    """int_s^t fn(r) db_r via an n_sub-cell step approximation."""
    if not s < t:
        raise ValueError("need s < t")
    grid, _ = _path_matrix(paths)
    n_cells = max(1, int(round((t - s) / grid.dt)))
    n_sub = min(n_sub, n_cells)
    # align sub-cell edges with the path grid so increments are exact
    per = max(1, n_cells // n_sub)
    edges = [s + grid.dt * per * j for j in range(n_cells // per)] + [t]
    edges = np.array(edges)
    if len(edges) < 2 or np.any(np.diff(edges) <= 0):
        raise AlignmentError("integration window too small for the path grid")
    sample = np.atleast_1d(np.asarray(fn(0.5 * (s + t)), float))
    vals = np.zeros((len(edges) - 1, len(sample)))
    for j in range(len(edges) - 1):
        a, b = edges[j], edges[j + 1]
        x = 0.5 * (b - a) * _GL_NODES + 0.5 * (a + b)
        fx = np.array([np.atleast_1d(fn(xi)) for xi in x], float)
        if not np.all(np.isfinite(fx)):
            raise ValueError(f"integrand not finite on [{a}, {b}]")
        vals[j] = 0.5 * _GL_WEIGHTS @ fx
    return integrate_step(StepFunction(edges, vals), paths)


def check_law_symmetries(fn, t: float, ensemble, n_sub: int = 64,
                         level: float = 0.01, n_perm: int = 200,
                         seed: int = 0):
    """Two-sample reports for the three equal-in-law integrals.

    int_0^t f(t-r) db_r, int_0^t f(r) db_r and int_{-t}^0 f(-u) db_u are
    evaluated on disjoint thirds of the ensemble so the pairwise energy
    tests compare independent samples.  Level is Bonferroni-corrected
    across the three pairs.
    """
    from .diagnostics import energy_two_sample
    from .processes import Ensemble

    grid = ensemble.grid
    if grid.t_min > -t or grid.t_max < t:
        raise ValueError("ensemble grid must cover [-t, t]")
    n = ensemble.n_paths
    thirds = [slice(0, n // 3), slice(n // 3, 2 * n // 3), slice(2 * n // 3, n)]

    def sub(sl):
        return Ensemble(grid, ensemble.values[:, sl], tag=ensemble.tag)

    conv = definite_integral(lambda r: fn(t - r), 0.0, t, sub(thirds[0]), n_sub)
    plain = definite_integral(fn, 0.0, t, sub(thirds[1]), n_sub)
    refl = definite_integral(lambda u: fn(-u), -t, 0.0, sub(thirds[2]), n_sub)
    samples = {"convolution": conv.T, "plain": plain.T, "reflected": refl.T}
    names = list(samples)
    reports = {}
    adj = level / 3.0
    for i in range(3):
        for j in range(i + 1, 3):
            key = f"{names[i]}|{names[j]}"
            reports[key] = energy_two_sample(
                samples[names[i]], samples[names[j]],
                n_perm=n_perm, level=adj, seed=seed + 7 * i + j)
    return reports
