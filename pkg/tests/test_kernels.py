from fractions import Fraction

import numpy as np
import pytest

from udisc import _pykernels, kernels
from udisc.discriminator import block_coefficients

try:
    from udisc import _kernels as _ckernels
except ImportError:  # pragma: no cover - extension not built
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")


def _exact_poly(coeffs, v, cos2, sin2):
    c, s = Fraction(cos2), Fraction(sin2)
    return sum(Fraction(a) * c**j * s ** (v - j) for j, a in enumerate(coeffs))


def test_backend_is_reported():
    assert kernels.BACKEND in ("cython", "python")


def test_python_block_poly_matches_exact():
    rng = np.random.default_rng(3)
    for (u, v, k) in [(2, 1, 1), (8, 8, 3), (12, 4, 0), (5, 11, 5)]:
        coeffs = [float(c) for c in block_coefficients(u, v, k)]
        for x in rng.random(20):
            got = _pykernels.block_poly(coeffs, v, x, 1.0 - x)
            want = float(_exact_poly(coeffs, v, x, 1.0 - x))
            assert got == pytest.approx(want, rel=1e-14, abs=1e-300)


def test_neumaier_recovers_cancellation():
    # 1e16 + 1 - 1e16 is lost by naive summation
    got = _pykernels.block_poly([1e16, 1.0, -1e16], 2, 1.0, 1.0)
    assert got == 1.0


def test_zero_coefficients_skipped():
    assert _pykernels.block_poly([0.0, 0.0], 1, 0.3, 0.7) == 0.0


@needs_ext
def test_backends_agree_block_poly():
    rng = np.random.default_rng(11)
    for (u, v, k) in [(1, 1, 1), (6, 6, 2), (10, 6, 3), (3, 13, 0)]:
        coeffs = [float(c) for c in block_coefficients(u, v, k)]
        arr = np.array(coeffs)
        for x in rng.random(25):
            assert _ckernels.block_poly(arr, v, x, 1.0 - x) == _pykernels.block_poly(coeffs, v, x, 1.0 - x)


@needs_ext
def test_backends_agree_weighted_blocks():
    rng = np.random.default_rng(5)
    rows = [(4, 4, 1), (4, 4, 2), (5, 3, 3), (3, 5, 1)]
    width = max(len(block_coefficients(*r)) for r in rows)
    coeffs = np.zeros((len(rows), width))
    for i, r in enumerate(rows):
        c = [float(x) for x in block_coefficients(*r)]
        coeffs[i, : len(c)] = c
    vexp = np.array([r[1] for r in rows], dtype=np.int64)
    weights = rng.random(len(rows))
    cos2 = rng.random(200)
    sin2 = 1.0 - cos2
    a = _ckernels.weighted_blocks(coeffs, vexp, weights, cos2, sin2)
    b = _pykernels.weighted_blocks(coeffs, vexp, weights, cos2, sin2)
    np.testing.assert_array_equal(a, b)


def test_weighted_blocks_matches_loop():
    coeffs = np.array([[1.0, 2.0, 0.0], [0.5, 0.25, 0.125]])
    vexp = np.array([1, 2], dtype=np.int64)
    weights = np.array([0.3, 0.7])
    cos2 = np.array([0.0, 0.4, 1.0])
    sin2 = 1.0 - cos2
    out = kernels.weighted_blocks(coeffs, vexp, weights, cos2, sin2)
    for p in range(3):
        want = 0.3 * _pykernels.block_poly([1.0, 2.0, 0.0], 1, cos2[p], sin2[p]) + 0.7 * _pykernels.block_poly(
            [0.5, 0.25, 0.125], 2, cos2[p], sin2[p]
        )
        assert out[p] == pytest.approx(want, rel=1e-15)


def test_pure_python_env_forces_fallback():
    import subprocess
    import sys

    code = "from udisc import kernels; print(kernels.BACKEND)"
    out = subprocess.run(
        [sys.executable, "-c", code],
        env={"UDISC_PURE_PYTHON": "1", "PATH": "/usr/bin:/bin"},
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"
