import math

import numpy as np
import pytest

from volterrasim.errors import QuadratureError
from volterrasim.kernels import (
    FbmKernel,
    VolterraKernel,
    check_regularity,
    cov_R,
    cov_R_quadrature,
    fbm_normalizing_constant,
    holder_bound_constant,
    phi,
    phi_quadrature,
)


def test_normalizing_constant_identity():
    # c_H^2 B(H - 1/2, 2 - 2H) = H (2H - 1) makes E(W_1)^2 = 1
    for H in (0.55, 0.7, 0.75, 0.9, 0.99):
        c = fbm_normalizing_constant(H) * (H - 0.5)
        B = math.exp(math.lgamma(H - 0.5) + math.lgamma(2 - 2 * H)
                     - math.lgamma(1.5 - H))
        assert c * c * B == pytest.approx(H * (2 * H - 1), rel=1e-12)


def test_fbm_kernel_fields():
    k = FbmKernel(0.75)
    assert k.alpha == pytest.approx(0.25)
    assert k.regularity_const == pytest.approx(k.c_H)
    assert k.eval(1.0, 2.0) == 0.0  # vanishes for t <= r
    assert k.eval(2.0, 1.0) > 0.0


@pytest.mark.parametrize("H", [0.51, 0.55, 0.7, 0.9, 0.97])
def test_phi_closed_form_value(H):
    k = FbmKernel(H)
    for u, v in [(1.0, 2.0), (-3.0, 0.5), (0.1, 0.10001)]:
        expected = H * (2 * H - 1) * abs(u - v) ** (2 * H - 2)
        assert phi(k, u, v) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("H", [0.55, 0.7, 0.9])
def test_phi_quadrature_matches_closed_form(H):
    k = FbmKernel(H)
    for u, v in [(0.0, 1.0), (-2.0, 3.5), (1.0, 1.01), (-5.0, -4.0)]:
        quad = phi_quadrature(k, u, v)
        assert quad == pytest.approx(k.phi_closed_form(u, v), rel=1e-5)


def test_phi_diagonal_rejected():
    k = FbmKernel(0.7)
    with pytest.raises(ValueError):
        phi(k, 1.0, 1.0)
    with pytest.raises(ValueError):
        phi_quadrature(k, 1.0, 1.0)


def _generic_fbm_clone(H):
    """The fBm kernel wrapped as a generic kernel with no closed forms."""
    base = FbmKernel(H)
    return VolterraKernel(alpha=base.alpha, eval=base.eval, deriv=base.deriv,
                          regularity_const=base.regularity_const)


def test_generic_kernel_falls_back_to_quadrature():
    H = 0.7
    generic = _generic_fbm_clone(H)
    closed = FbmKernel(H)
    assert generic.phi_closed_form(1.0, 2.0) is None
    assert phi(generic, 1.0, 2.0) == pytest.approx(
        closed.phi_closed_form(1.0, 2.0), rel=1e-5)


def test_cov_R_closed_form_values():
    k = FbmKernel(0.75)
    assert cov_R(k, 0, 1, 0, 1) == pytest.approx(1.0)
    k7 = FbmKernel(0.7)
    assert cov_R(k7, 0, 1, 0, 2) == pytest.approx(2.0 ** 0.4, rel=1e-12)
    # disjoint intervals, positive correlation for H > 1/2
    assert cov_R(k, 0, 1, 2, 3) > 0.0


def test_cov_R_quadrature_matches_closed_form():
    k = FbmKernel(0.7)
    for args in [(0.0, 1.0, 0.0, 1.0), (-1.0, 0.5, 0.0, 2.0)]:
        assert cov_R_quadrature(k, *args) == pytest.approx(
            k.cov_closed_form(*args), rel=1e-4)


def test_cov_R_quadrature_handles_swapped_intervals():
    k = FbmKernel(0.7)
    plain = cov_R_quadrature(k, 0.0, 1.0, 0.0, 2.0)
    swapped = cov_R_quadrature(k, 1.0, 0.0, 0.0, 2.0)
    assert swapped == pytest.approx(-plain, rel=1e-6)


def test_check_regularity_passes_for_fbm():
    k = FbmKernel(0.8)
    pairs = [(r + d, r) for r in (-2.0, 0.0, 1.5) for d in (0.01, 1.0, 10.0)]
    report = check_regularity(k, pairs)
    assert report["passed"]
    assert report["max_ratio"] <= report["bound"] * (1 + 1e-9)


def test_check_regularity_flags_violation():
    base = FbmKernel(0.8)
    bad = VolterraKernel(alpha=base.alpha, eval=base.eval, deriv=base.deriv,
                         regularity_const=0.5 * base.c_H)
    report = check_regularity(bad, [(1.0, 0.0)])
    assert not report["passed"]


def test_check_regularity_rejects_bad_pairs():
    with pytest.raises(ValueError):
        check_regularity(FbmKernel(0.7), [(0.0, 1.0)])


def test_holder_bound_constant_is_sharp_for_fbm():
    # E(b_t - b_s)^2 = (t-s)^(2H) for fBm, so the constant is exactly 1
    for H in (0.55, 0.7, 0.9):
        assert holder_bound_constant(FbmKernel(H)) == pytest.approx(1.0,
                                                                    rel=1e-12)


def test_kernel_parameter_validation():
    with pytest.raises(ValueError):
        FbmKernel(0.5)
    with pytest.raises(ValueError):
        FbmKernel(1.0)
    base = FbmKernel(0.7)
    with pytest.raises(ValueError):
        VolterraKernel(alpha=0.6, eval=base.eval, deriv=base.deriv,
                       regularity_const=1.0)
    with pytest.raises(ValueError):
        VolterraKernel(alpha=0.2, eval=base.eval, deriv=base.deriv,
                       regularity_const=0.0)
