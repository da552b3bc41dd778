import math

import numpy as np
import pytest

from atmask.repositories import ArtifactRepository
from atmask.schemas import (
    LrSchedule,
    MaskConfig,
    OptimizerKind,
    PhantomKind,
    PhantomSpec,
    ToyMaeModel,
    TrainConfig,
    TvmConfig,
    Volume3D,
)
from atmask.services.phantom import make_phantom
from atmask.services.recon_toy import init_model
from atmask.services.trainer import learning_rate_at, pretrain_toy
from atmask.utils.exceptions import ConfigError, PatchGridError, TrainingDivergedError, VolumeFormatError

TVM = TvmConfig(stride_s=2)
MASK = MaskConfig(patch_size=2, mask_ratio_r=0.75, high_var_fraction_beta=0.65, seed=3)


@pytest.fixture(scope="module")
def spheres():
    return [
        make_phantom(PhantomSpec(
            kind=PhantomKind.SPHERE_SHELL, dims=(16, 16, 16), radius=radius,
            background=0.75, foreground=1.0, spacing=(1.0, 1.0, 1.0),
        )).volume
        for radius in (3.0, 4.0, 5.0, 6.0)
    ]


def test_zero_steps_returns_initial_model(spheres):
    cfg = TrainConfig(steps=0, embed_dim=8, seed=1)
    result = pretrain_toy(spheres[:1], TVM, MASK, cfg)
    assert result.loss_trace == []
    assert result.final_loss is None
    initial = init_model(2, 8, seed=1)
    for name, value in initial.params().items():
        assert np.array_equal(result.model.params()[name], value)


def test_zero_learning_rate_keeps_loss_constant(spheres):
    mask = MASK.model_copy(update={"mask_ratio_r": 1.0})
    cfg = TrainConfig(steps=5, learning_rate=0.0, embed_dim=8)
    trace = pretrain_toy(spheres[:2], TVM, mask, cfg).loss_trace
    assert len(trace) == 5
    assert all(loss == trace[0] for loss in trace)


def test_runs_are_bit_identical(spheres):
    cfg = TrainConfig(steps=10, embed_dim=8, seed=4)
    a = pretrain_toy(spheres, TVM, MASK, cfg)
    b = pretrain_toy(spheres, TVM, MASK, cfg)
    assert a.loss_trace == b.loss_trace
    assert np.array_equal(a.model.w_dec, b.model.w_dec)


def test_thread_count_does_not_change_trace(spheres):
    cfg = TrainConfig(steps=5, embed_dim=8)
    assert (
        pretrain_toy(spheres, TVM, MASK, cfg, threads=1).loss_trace
        == pretrain_toy(spheres, TVM, MASK, cfg, threads=3).loss_trace
    )


def test_sgd_halves_the_loss(spheres):
    cfg = TrainConfig(steps=200, learning_rate=1e-2, embed_dim=16, seed=0)
    result = pretrain_toy(spheres, TVM, MASK, cfg)
    assert len(result.loss_trace) == 200
    assert result.final_loss < 0.5 * result.initial_loss


def zero_model(patch_size: int, embed_dim: int) -> ToyMaeModel:
    p = patch_size ** 3
    return ToyMaeModel(
        patch_size=patch_size, embed_dim=embed_dim,
        w_enc=np.zeros((p, embed_dim)), b_enc=np.zeros(embed_dim),
        w_dec=np.zeros((embed_dim, p)), b_dec=np.zeros(p), mask_token=np.zeros(p),
    )


def test_sgd_trace_on_constant_volumes_is_pinned():
    # Constant 0.5 volumes score zero everywhere, so every step masks
    # floor(0.75 * 512) = 384 patches per volume. From a zero model only
    # b_dec receives gradient: its error shrinks by q = 1 - 2 * lr * k / (k * P)
    # = 0.9975 per step and the loss is 0.25 * q ** (2 * t).
    volumes = [Volume3D(data=np.full((16, 16, 16), 0.5)) for _ in range(4)]
    cfg = TrainConfig(steps=200, learning_rate=1e-2, embed_dim=4)
    result = pretrain_toy(volumes, TVM, MASK, cfg, model=zero_model(2, 4))

    trace = result.loss_trace
    assert len(trace) == 200
    expected = [0.25 * 0.9975 ** (2 * t) for t in range(200)]
    assert trace == pytest.approx(expected, rel=1e-9)
    assert trace[0] == pytest.approx(0.25, rel=1e-12)
    assert trace[1] == pytest.approx(0.2487515625, rel=1e-9)
    assert trace[100] == pytest.approx(0.1515377659, rel=1e-6)
    assert trace[199] == pytest.approx(0.0923157800, rel=1e-6)

    np.testing.assert_allclose(result.model.b_dec, np.full(8, 0.5 * (1 - 0.9975 ** 200)), rtol=1e-6)
    assert result.model.b_dec[0] == pytest.approx(0.1969244682, rel=1e-6)
    for name in ("w_enc", "b_enc", "w_dec", "mask_token"):
        assert not result.model.params()[name].any()


def test_adamw_with_warmup_cosine_decreases_loss(spheres):
    cfg = TrainConfig(
        steps=100, learning_rate=2e-2, embed_dim=8, optimizer=OptimizerKind.ADAMW,
        schedule=LrSchedule.WARMUP_COSINE, warmup_steps=10,
    )
    result = pretrain_toy(spheres, TVM, MASK, cfg)
    assert result.final_loss < result.initial_loss


def test_warm_start_from_given_model(spheres):
    cfg = TrainConfig(steps=3, embed_dim=8)
    first = pretrain_toy(spheres[:1], TVM, MASK, cfg)
    second = pretrain_toy(spheres[:1], TVM, MASK, cfg, model=first.model)
    assert second.initial_loss != first.initial_loss


def test_divergence_is_reported(spheres):
    cfg = TrainConfig(steps=200, learning_rate=1e6, embed_dim=8)
    with pytest.raises(TrainingDivergedError):
        pretrain_toy(spheres[:1], TVM, MASK, cfg)


def test_empty_volume_list():
    with pytest.raises(ConfigError):
        pretrain_toy([], TVM, MASK, TrainConfig(steps=1))


def test_indivisible_volume():
    with pytest.raises(PatchGridError):
        pretrain_toy([Volume3D(data=np.zeros((5, 4, 4)))], TVM, MASK, TrainConfig(steps=1))


class TestSchedule:
    def test_constant(self):
        cfg = TrainConfig(learning_rate=0.1, steps=10)
        assert [learning_rate_at(s, cfg) for s in (0, 5, 9)] == [0.1, 0.1, 0.1]

    def test_warmup_then_cosine(self):
        cfg = TrainConfig(learning_rate=1.0, steps=14, schedule=LrSchedule.WARMUP_COSINE, warmup_steps=4)
        assert learning_rate_at(0, cfg) == pytest.approx(0.25)
        assert learning_rate_at(3, cfg) == pytest.approx(1.0)
        assert learning_rate_at(4, cfg) == pytest.approx(1.0)
        assert learning_rate_at(9, cfg) == pytest.approx(0.5)
        assert learning_rate_at(14, cfg) == pytest.approx(0.0, abs=1e-12)

    def test_cosine_is_non_increasing(self):
        cfg = TrainConfig(learning_rate=1.0, steps=50, schedule=LrSchedule.WARMUP_COSINE)
        rates = [learning_rate_at(s, cfg) for s in range(50)]
        assert all(a >= b for a, b in zip(rates, rates[1:]))
        assert not any(math.isnan(r) for r in rates)


def test_weights_file_round_trip(tmp_path):
    repo = ArtifactRepository(tmp_path)
    model = init_model(patch_size=2, embed_dim=5, seed=8)
    repo.save_model(model, "toy.weights")

    assert (tmp_path / "toy.weights").stat().st_size == 4 * (8 * 5 + 5 + 5 * 8 + 8 + 8)
    loaded = repo.load_model("toy.weights")
    assert (loaded.patch_size, loaded.embed_dim) == (2, 5)
    for name, value in model.params().items():
        np.testing.assert_array_equal(loaded.params()[name], value)


def test_truncated_weights_file(tmp_path):
    repo = ArtifactRepository(tmp_path)
    repo.save_model(init_model(patch_size=2, embed_dim=5, seed=8), "toy.weights")
    blob = (tmp_path / "toy.weights").read_bytes()
    (tmp_path / "toy.weights").write_bytes(blob[:-4])
    with pytest.raises(VolumeFormatError):
        repo.load_model("toy.weights")
