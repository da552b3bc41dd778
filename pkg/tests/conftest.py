"""
Shared fixtures: isolated settings, seeded generators and small phantoms.
"""
import numpy as np
import pytest

from atmask.config.settings import get_settings
from atmask.core.dependencies import reset_container
from atmask.schemas import PhantomKind, PhantomSpec, Volume3D
from atmask.services.phantom import make_phantom

ENV_KEYS = (
    "ATMASK_SEED",
    "ATMASK_THREADS",
    "ATMASK_OUTPUT_DIR",
    "ATMASK_LOG_LEVEL",
    "ATMASK_LOG_DIR",
    "ATMASK_LOG_JSON",
    "ATMASK_LOG_TO_FILE",
)


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path):
    """Fresh settings and container per test, outputs confined to tmp_path."""
    for key in ENV_KEYS:
        monkeypatch.delenv(key, raising=False)
    monkeypatch.setenv("ATMASK_OUTPUT_DIR", str(tmp_path / "outputs"))
    monkeypatch.setenv("ATMASK_LOG_JSON", "false")
    get_settings.cache_clear()
    reset_container()
    yield
    get_settings.cache_clear()
    reset_container()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_volume(rng):
    def build(dims=(8, 16, 16), spacing=(1.0, 1.0, 1.0), integer=False):
        if integer:
            data = rng.integers(0, 64, size=dims).astype(np.float32)
        else:
            data = rng.random(dims, dtype=np.float64).astype(np.float32)
        return Volume3D(data=data, spacing=spacing)
    return build


@pytest.fixture
def sphere_phantom():
    spec = PhantomSpec(kind=PhantomKind.SPHERE_SHELL, dims=(32, 32, 32), radius=10.0, spacing=(1.0, 1.0, 1.0))
    return make_phantom(spec)


@pytest.fixture
def textured_phantom():
    spec = PhantomSpec(
        kind=PhantomKind.TEXTURED_BLOCK, dims=(32, 32, 32), noise_amplitude=0.25,
        background=0.0, foreground=0.5, seed=3,
    )
    return make_phantom(spec)
