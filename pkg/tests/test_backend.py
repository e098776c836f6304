import os
import subprocess
import sys

import pytest

from ohradar import backend


def _active_in_subprocess(env_value):
    env = dict(os.environ)
    env.pop("OHRADAR_BACKEND", None)
    if env_value is not None:
        env["OHRADAR_BACKEND"] = env_value
    out = subprocess.run([sys.executable, "-c", "from ohradar import backend; print(backend.active())"],
                         env=env, capture_output=True, text=True, check=True)
    return out.stdout.strip()


def test_env_forces_python_fallback():
    assert _active_in_subprocess("python") == "python"


@pytest.mark.skipif("compiled" not in backend.BACKENDS, reason="compiled kernels not built")
def test_compiled_is_default_when_built():
    assert _active_in_subprocess(None) == "compiled"


def test_use_and_unknown_backend():
    before = backend.active()
    try:
        backend.use("python")
        assert backend.active() == "python"
    finally:
        backend.use(before)
    with pytest.raises(ValueError):
        backend.kernels("fortran")
