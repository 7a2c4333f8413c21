"""Named verification suites behind the command-line `verify`.

Each suite returns (passed, lines); lines are human-readable one-line
results suitable for printing.  The suites are smaller, faster variants
of the package's full invariant checks, meant for quick reproduction
from the command line.
"""

import numpy as np

from .diagnostics import energy_statistic, energy_two_sample
from .integration import StepFunction, check_law_symmetries, d_norm_sq, \
    integrate_step
from .kernels import FbmKernel, check_regularity, phi_quadrature
from .processes import GridSpec, RosenblattScheme, simulate_fbm, \
    simulate_rosenblatt
from .rng import substream

SUITES = ("kernel", "isometry", "law-symmetry", "stationarity", "limit",
          "criteria")


def default_equation(H: float, x0=None):
    """The 4-mode diagonal reference equation used by the CLI suites."""
    from .evolution import EquationSpec, NoiseSpec

    lambdas = np.array([0.5, 1.0, 2.0, 4.0])
    phi_matrix = np.ones((4, 1))
    return EquationSpec(lambdas, phi_matrix, NoiseSpec(("fbm",), H), x0=x0)


def suite_kernel(H_values=(0.55, 0.7, 0.9), n_pairs: int = 25,
                 rtol: float = 1e-4, seed: int = 0):
    lines = []
    ok = True
    rng = substream(seed, 101)
    for H in H_values:
        kernel = FbmKernel(H)
        worst = 0.0
        for _ in range(n_pairs):
            u, v = rng.uniform(-5.0, 5.0, size=2)
            if abs(u - v) < 1e-3:
                v = u + 1e-3
            quad = phi_quadrature(kernel, u, v)
            closed = kernel.phi_closed_form(u, v)
            worst = max(worst, abs(quad - closed) / abs(closed))
        good = worst <= rtol
        ok &= good
        lines.append(f"phi quadrature vs closed form H={H}: "
                     f"max rel err {worst:.2e} ({'pass' if good else 'FAIL'})")
        pairs = [(r + d, r) for r in (-2.0, 0.0, 3.0) for d in (0.01, 0.5, 2.0)]
        rep = check_regularity(kernel, pairs)
        ok &= rep["passed"]
        lines.append(f"regularity bound H={H}: max ratio {rep['max_ratio']:.6f}"
                     f" <= {rep['bound']:.6f} "
                     f"({'pass' if rep['passed'] else 'FAIL'})")
    return ok, lines


def _random_step_function(rng, lo=-1.0, hi=1.5, max_pieces=4, dim=1):
    n = int(rng.integers(1, max_pieces + 1))
    bp = np.sort(rng.uniform(lo, hi, size=n + 1))
    while np.any(np.diff(bp) < 0.05):
        bp = np.sort(rng.uniform(lo, hi, size=n + 1))
    vals = rng.uniform(-2.0, 2.0, size=(n, dim))
    return StepFunction(bp, vals)


def suite_isometry(H: float, n_paths: int, seed: int, n_funcs: int = 5):
    kernel = FbmKernel(H)
    grid = GridSpec(-2.0, 2.0, 401)
    ens = simulate_fbm(grid, H, n_paths, seed)
    rng = substream(seed, 202)
    lines = []
    ok = True
    for i in range(n_funcs):
        f = _random_step_function(rng)
        f = StepFunction(np.array([grid.times[grid.index_of(b)]
                                   for b in f.breakpoints]), f.values)
        target = d_norm_sq(kernel, f)
        vals = integrate_step(f, ens)[0]
        mc = vals.var()
        stderr = mc * np.sqrt(2.0 / (n_paths - 1))
        good = abs(mc - target) <= 3.0 * stderr
        ok &= good
        lines.append(f"isometry f#{i}: MC {mc:.5f} vs D-norm {target:.5f} "
                     f"(3se={3 * stderr:.5f}, {'pass' if good else 'FAIL'})")
    return ok, lines


def suite_law_symmetry(H: float, n_paths: int, seed: int, level: float = 0.01):
    grid = GridSpec(-1.0, 1.0, 201)
    scheme = RosenblattScheme.for_grid(grid, H, tail_tol=1e-2, substeps=2)
    drivers = {
        "fbm": simulate_fbm(grid, H, n_paths, seed),
        "rosenblatt": simulate_rosenblatt(grid, scheme, n_paths, seed,
                                          stream=1),
    }
    integrands = {
        "exp": lambda r: np.array([np.exp(-r)]),
        "rational": lambda r: np.array([1.0 / (1.0 + r * r)]),
    }
    lines = []
    ok = True
    for dname, ens in drivers.items():
        for fno, (fname, fn) in enumerate(integrands.items()):
            reports = check_law_symmetries(fn, 1.0, ens, level=level,
                                           seed=seed + 31 * fno)
            for key, rep in reports.items():
                ok &= rep.passed
                lines.append(f"law symmetry {dname}/{fname} {key}: {rep}")
    return ok, lines


def suite_stationarity(H: float, n_paths: int, seed: int, x0="x-infinity",
                       level: float = 0.01):
    from .evolution import solve_mild

    spec = default_equation(H, x0=x0)
    grid = GridSpec(0.0, 3.0, 151)
    sol = solve_mild(spec, grid, n_paths, seed)
    base_times = (0.5, 1.0, 2.0)
    h = 1.0
    n = sol.n_paths
    half = n // 2

    def joint(ts, sl):
        return np.column_stack([sol.at(t)[:, sl].T for t in ts])

    base = joint(base_times, slice(0, half))
    shifted = joint(tuple(t + h for t in base_times), slice(half, n))
    rep = energy_two_sample(base, shifted, level=level, seed=seed)
    line = f"joint law at {base_times} vs shift h={h}: {rep}"
    return rep.passed, [line]


def suite_limit(H: float, n_paths: int, seed: int):
    from .evolution import check_limit_condition, sample_x_infinity, solve_mild

    spec = default_equation(H)
    value, finite = check_limit_condition(spec)
    lines = [f"limit condition integral: {value:.6f} "
             f"({'finite' if finite else 'DIVERGENT'})"]
    ok = finite
    grid = GridSpec(0.0, 8.0, 401)
    sol = solve_mild(spec, grid, n_paths, seed)
    target = sample_x_infinity(spec, 25.0, n_paths, seed + 1, dt=0.02).T
    dists = []
    for t in (1.0, 2.0, 4.0, 8.0):
        d = energy_statistic(sol.at(t).T, target)
        dists.append(d)
        lines.append(f"energy distance Law(X_{t}) vs x_inf: {d:.5f}")
    decreasing = all(b <= a + 1e-3 for a, b in zip(dists, dists[1:]))
    ok &= decreasing
    lines.append("distances decreasing: " + ("pass" if decreasing else "FAIL"))
    return ok, lines


def suite_criteria(eps: float = 1e-6):
    from .criteria import heat_admissibility, j_closed_form, j_quadrature, \
        shift_trace_criterion

    lines = []
    ok = True
    for H in (0.6, 0.75, 0.9):
        thr = H + 0.5
        below = shift_trace_criterion(thr - eps, H)["exists"]
        above = shift_trace_criterion(thr + eps, H)["exists"]
        good = (not below) and above
        ok &= good
        lines.append(f"threshold flip at beta={thr}+-{eps} (H={H}): "
                     f"{'pass' if good else 'FAIL'}")
        beta = H + 1.0
        jc = j_closed_form(beta, H)
        jq = j_quadrature(beta, H, truncation=200.0)
        rel = abs(jc - jq.value) / jc
        good = rel <= 1e-3
        ok &= good
        lines.append(f"J closed {jc:.6f} vs quadrature {jq.value:.6f} "
                     f"(beta={beta}, H={H}): rel {rel:.2e} "
                     f"({'pass' if good else 'FAIL'})")
    wiener = shift_trace_criterion(1.1, 0.75)
    good = wiener["wiener_exists"] and not wiener["exists"]
    ok &= good
    lines.append("Wiener-vs-fBm contrast at beta=1.1, H=0.75: "
                 f"{'pass' if good else 'FAIL'}")
    for d in (1, 2, 3):
        for H in (0.6, 0.7, 0.8, 0.9):
            rep = heat_admissibility(d, H)
            good = rep["admissible"] == (d < 4 * H) and rep["exponent_ok"]
            ok &= good
            lines.append(f"heat d={d} H={H}: admissible={rep['admissible']} "
                         f"exponent {rep['fitted_exponent']:.3f} "
                         f"({'pass' if good else 'FAIL'})")
    return ok, lines
