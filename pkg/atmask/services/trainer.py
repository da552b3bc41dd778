"""
Toy pretraining loop: fresh texture-guided masks every step, masked-MSE
reconstruction, SGD or AdamW updates.
"""
import logging
import math
import time
from typing import List, Optional, Sequence

import numpy as np

from atmask.schemas import (
    LrSchedule,
    MaskConfig,
    OptimizerKind,
    PatchScores,
    ReconBatch,
    ToyMaeModel,
    TrainConfig,
    TrainResult,
    TvmConfig,
    Volume3D,
)
from atmask.services.mask_gen import apply_mask, expand_mask, generate_mask, patch_grid, score_patches
from atmask.services.recon_toy import (
    Params,
    concat_patch_batches,
    init_model,
    model_params,
    patch_loss_and_gradients,
    to_patch_batch,
)
from atmask.services.texture_map import compute_variation_map
from atmask.utils.exceptions import ConfigError, DimensionMismatchError, TrainingDivergedError
from atmask.utils.rng import derive_seed

logger = logging.getLogger(__name__)

DECAYED_PARAMS = ("w_enc", "w_dec")


def learning_rate_at(step: int, cfg: TrainConfig) -> float:
    """Constant, or linear warmup followed by cosine annealing to zero."""
    base = cfg.learning_rate
    if cfg.schedule == LrSchedule.CONSTANT:
        return base
    if step < cfg.warmup_steps:
        return base * (step + 1) / cfg.warmup_steps
    decay_steps = max(1, cfg.steps - cfg.warmup_steps)
    progress = min(1.0, (step - cfg.warmup_steps) / decay_steps)
    return base * 0.5 * (1.0 + math.cos(math.pi * progress))


class SGD:
    """Plain gradient descent."""

    def step(self, params: Params, grads: Params, lr: float) -> None:
        for name, grad in grads.items():
            params[name] -= lr * grad


class AdamW:
    """Adam with bias correction and decoupled weight decay on the weight matrices."""

    def __init__(self, params: Params, beta1: float, beta2: float, weight_decay: float, eps: float):
        self.beta1 = beta1
        self.beta2 = beta2
        self.weight_decay = weight_decay
        self.eps = eps
        self.t = 0
        self.m = {name: np.zeros_like(value) for name, value in params.items()}
        self.v = {name: np.zeros_like(value) for name, value in params.items()}

    def step(self, params: Params, grads: Params, lr: float) -> None:
        self.t += 1
        correction1 = 1.0 - self.beta1 ** self.t
        correction2 = 1.0 - self.beta2 ** self.t
        for name, grad in grads.items():
            self.m[name] = self.beta1 * self.m[name] + (1.0 - self.beta1) * grad
            self.v[name] = self.beta2 * self.v[name] + (1.0 - self.beta2) * grad * grad
            m_hat = self.m[name] / correction1
            v_hat = self.v[name] / correction2
            if name in DECAYED_PARAMS:
                params[name] -= lr * self.weight_decay * params[name]
            params[name] -= lr * m_hat / (np.sqrt(v_hat) + self.eps)


def build_optimizer(cfg: TrainConfig, params: Params):
    if cfg.optimizer == OptimizerKind.ADAMW:
        a = cfg.adamw
        return AdamW(params, a.beta1, a.beta2, a.weight_decay, a.eps)
    return SGD()


class ToyTrainer:
    """
    Masked-reconstruction pretraining over a fixed set of volumes.

    Variation maps and patch scores are computed once per volume; every
    step draws a new mask per volume with seed derive_seed(seed + step, i)
    and all volumes form one batch.
    """

    def __init__(self, tvm_cfg: TvmConfig, mask_cfg: MaskConfig, train_cfg: TrainConfig, threads: int = 1):
        self.tvm_cfg = tvm_cfg
        self.mask_cfg = mask_cfg
        self.train_cfg = train_cfg
        self.threads = threads

    def score_volumes(self, volumes: Sequence[Volume3D]) -> List[PatchScores]:
        if not volumes:
            raise ConfigError("pretraining needs at least one volume")
        for v in volumes:
            patch_grid(v.dims, self.mask_cfg.patch_size)
        return [
            score_patches(compute_variation_map(v, self.tvm_cfg, self.threads), self.mask_cfg)
            for v in volumes
        ]

    def step_batch(self, volumes: Sequence[Volume3D], scores: Sequence[PatchScores], step: int):
        batches = []
        for index, (volume, volume_scores) in enumerate(zip(volumes, scores)):
            seed = derive_seed(self.mask_cfg.seed + step, index)
            pm = generate_mask(volume_scores, self.mask_cfg.model_copy(update={"seed": seed}))
            mask = expand_mask(pm, self.mask_cfg.patch_size, volume.spacing)
            batch = ReconBatch(input=apply_mask(volume, mask), target=volume, mask=mask)
            batches.append(to_patch_batch(batch, self.mask_cfg.patch_size))
        return concat_patch_batches(batches)

    def train(self, volumes: Sequence[Volume3D], model: Optional[ToyMaeModel] = None) -> TrainResult:
        cfg = self.train_cfg
        if model is None:
            model = init_model(self.mask_cfg.patch_size, cfg.embed_dim, cfg.seed)
        elif model.patch_size != self.mask_cfg.patch_size:
            raise DimensionMismatchError(
                (self.mask_cfg.patch_size,), (model.patch_size,), what="model patch size"
            )
        scores = self.score_volumes(volumes)
        if cfg.steps == 0:
            return TrainResult(model=model, loss_trace=[])

        params = model_params(model)
        optimizer = build_optimizer(cfg, params)
        trace: List[float] = []
        started = time.perf_counter()
        log_every = max(1, cfg.steps // 10)

        for step in range(cfg.steps):
            pb = self.step_batch(volumes, scores, step)
            loss, grads = patch_loss_and_gradients(params, pb, cfg.loss_eps, cfg.input_mode)
            if not math.isfinite(loss):
                raise TrainingDivergedError(step, loss)
            trace.append(loss)

            optimizer.step(params, grads, learning_rate_at(step, cfg))
            if not all(np.isfinite(value).all() for value in params.values()):
                raise TrainingDivergedError(step, float("nan"))

            if step % log_every == 0 or step == cfg.steps - 1:
                logger.info(f"step {step}: loss={loss:.6f}", extra={"step": step, "loss": loss})

        logger.info(
            f"Pretraining finished: {cfg.steps} steps, loss {trace[0]:.6f} -> {trace[-1]:.6f}",
            extra={"duration_ms": round((time.perf_counter() - started) * 1000, 2)},
        )
        return TrainResult(model=model.with_params(params), loss_trace=trace)


def pretrain_toy(
    volumes: Sequence[Volume3D],
    tvm_cfg: TvmConfig,
    mask_cfg: MaskConfig,
    train_cfg: TrainConfig,
    model: Optional[ToyMaeModel] = None,
    threads: int = 1,
) -> TrainResult:
    """Train the toy autoencoder; returns the model and the per-step loss trace."""
    return ToyTrainer(tvm_cfg, mask_cfg, train_cfg, threads).train(volumes, model)
