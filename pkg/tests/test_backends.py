import os
import subprocess
import sys

import numpy as np
import pytest

from projwarp import _backend
from projwarp.bench import method_grid
from projwarp.engine import WarpRequest, run_chain, warp_raw
from projwarp.geometry import Homography, random_composed_triple
from projwarp.kernels import build_lut
from projwarp.samplers import SamplerConfig

pytestmark = pytest.mark.skipif(not _backend.HAS_NUMBA, reason="numba unavailable")

H = Homography([[0.45, 0.05, 3.0], [0.02, 0.5, 2.0], [4e-4, 8e-4, 1.0]])


@pytest.fixture(scope="module")
def src():
    return np.random.default_rng(5).integers(0, 256, (128, 128)).astype(np.uint8)


@pytest.mark.parametrize("cfg", method_grid(super_n=3, seed=4),
                         ids=lambda c: f"{c.token}+{c.kernel.token}")
def test_backends_agree_bit_for_bit(cfg, src):
    a, sa = warp_raw(WarpRequest(src, H, 64, 64, cfg), backend="numba")
    b, sb = warp_raw(WarpRequest(src, H, 64, 64, cfg), backend="numpy")
    np.testing.assert_array_equal(a, b)
    assert sa == sb


@pytest.mark.parametrize("method", ["point", "mip", "fast"])
def test_backends_agree_with_lut(method, src):
    from projwarp.kernels import HERMITE
    cfg = SamplerConfig(method, 16 if method == "fast" else 1, 0, build_lut(HERMITE, 256))
    a, _ = warp_raw(WarpRequest(src, H, 64, 64, cfg), backend="numba")
    b, _ = warp_raw(WarpRequest(src, H, 64, 64, cfg), backend="numpy")
    np.testing.assert_array_equal(a, b)


def test_backends_agree_on_chains(src):
    hs = random_composed_triple(2, (128, 128))
    for cfg in method_grid(super_n=2)[::3]:
        a = run_chain(src, hs, cfg, backend="numba")
        b = run_chain(src, hs, cfg, backend="numpy")
        assert a.image.tobytes() == b.image.tobytes() and a.stats == b.stats


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        _backend.resolve("cuda")


def test_env_flag_selects_numpy_without_importing_numba():
    code = ("import sys, projwarp._backend as b; "
            "print(b.HAS_NUMBA, b.DEFAULT_BACKEND, 'numba' in sys.modules)")
    env = dict(os.environ, PROJWARP_BACKEND="numpy")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True)
    assert out.stdout.split() == ["False", "numpy", "False"]


def test_numpy_only_process_warps():
    code = ("import numpy as np; from projwarp import *; "
            "img = np.arange(64, dtype=np.uint8).reshape(8, 8); "
            "out, st = warp(WarpRequest(img, Homography.identity(), 8, 8, parse_sampler('fast'))); "
            "print(int((out == img).all()), st.samples_per_pixel)")
    env = dict(os.environ, PROJWARP_BACKEND="numpy")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True)
    assert out.stdout.split() == ["1", "1.0"]
