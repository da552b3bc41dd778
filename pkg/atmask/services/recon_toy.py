"""
Toy masked autoencoder.

Each cubic patch is flattened to a vector of P = patch_size^3 voxels and
reconstructed independently by an affine-ReLU-affine network:

    H = X @ W_enc + b_enc,  A = relu(H),  Y = A @ W_dec + b_dec

Masked patches are replaced by a learned mask token before encoding (or
by zeros in ``zeros`` input mode). The loss is the masked MSE, counted
only where the voxel mask is 1. Gradients are derived by hand and
evaluated in float64.
"""
import logging
import math
from typing import Dict, NamedTuple, Tuple

import numpy as np

from atmask.schemas import MaskInputMode, ReconBatch, ToyMaeModel, Volume3D
from atmask.schemas.common import Dims3
from atmask.services.mask_gen import patch_grid
from atmask.utils.exceptions import DimensionMismatchError
from atmask.utils.rng import make_rng

logger = logging.getLogger(__name__)

Params = Dict[str, np.ndarray]


# ============================================
# PATCH LAYOUT
# ============================================

def patchify(data: np.ndarray, patch_size: int) -> np.ndarray:
    """(d0, d1, d2) grid -> (N_p, P) rows, patches in axis-0-major order."""
    g0, g1, g2 = patch_grid(data.shape, patch_size)
    p = patch_size
    blocks = np.asarray(data).reshape(g0, p, g1, p, g2, p).transpose(0, 2, 4, 1, 3, 5)
    return blocks.reshape(g0 * g1 * g2, p ** 3)


def unpatchify(rows: np.ndarray, dims: Dims3, patch_size: int) -> np.ndarray:
    g0, g1, g2 = patch_grid(dims, patch_size)
    p = patch_size
    blocks = rows.reshape(g0, g1, g2, p, p, p).transpose(0, 3, 1, 4, 2, 5)
    return blocks.reshape(dims)


def _as_array(value) -> np.ndarray:
    return value.data if isinstance(value, Volume3D) else np.asarray(value)


# ============================================
# MODEL
# ============================================

def init_model(patch_size: int, embed_dim: int, seed: int = 0) -> ToyMaeModel:
    """
    Seeded uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)]; biases zero.

    The mask token is drawn like an encoder input row so masked patches
    do not start in the dead ReLU region.
    """
    p = patch_size ** 3
    rng = make_rng(seed)
    enc_bound = 1.0 / math.sqrt(p)
    dec_bound = 1.0 / math.sqrt(embed_dim)
    return ToyMaeModel(
        patch_size=patch_size,
        embed_dim=embed_dim,
        w_enc=rng.uniform(-enc_bound, enc_bound, size=(p, embed_dim)),
        b_enc=np.zeros(embed_dim),
        w_dec=rng.uniform(-dec_bound, dec_bound, size=(embed_dim, p)),
        b_dec=np.zeros(p),
        mask_token=rng.uniform(-enc_bound, enc_bound, size=p),
    )


def model_params(model: ToyMaeModel) -> Params:
    """float64 copies of every weight, for training and gradient checks."""
    return {name: value.astype(np.float64) for name, value in model.params().items()}


class PatchBatch(NamedTuple):
    """A ReconBatch flattened to patch rows."""
    inputs: np.ndarray     # (N, P) network input before token substitution
    targets: np.ndarray    # (N, P)
    weights: np.ndarray    # (N, P) voxel mask M
    masked: np.ndarray     # (N,) patch has any masked voxel


def to_patch_batch(batch: ReconBatch, patch_size: int) -> PatchBatch:
    dims = batch.target.dims
    if batch.input.dims != dims or batch.mask.dims != dims:
        raise DimensionMismatchError(dims, batch.input.dims if batch.input.dims != dims else batch.mask.dims,
                                     what="recon batch")
    weights = patchify(batch.mask.data.astype(np.float64), patch_size)
    return PatchBatch(
        inputs=patchify(batch.input.data.astype(np.float64), patch_size),
        targets=patchify(batch.target.data.astype(np.float64), patch_size),
        weights=weights,
        masked=weights.max(axis=1) > 0,
    )


def concat_patch_batches(batches) -> PatchBatch:
    return PatchBatch(*(np.concatenate(parts, axis=0) for parts in zip(*batches)))


def _encode_inputs(params: Params, pb: PatchBatch, mode: MaskInputMode) -> np.ndarray:
    x = pb.inputs.copy()
    if mode == MaskInputMode.MASK_TOKEN:
        x[pb.masked] = params["mask_token"]
    else:
        x[pb.masked] = 0.0
    return x


def forward_patches(params: Params, pb: PatchBatch, mode: MaskInputMode = MaskInputMode.MASK_TOKEN):
    """Returns (X, H, A, Y) for the patch rows."""
    x = _encode_inputs(params, pb, mode)
    h = x @ params["w_enc"] + params["b_enc"]
    a = np.maximum(h, 0.0)
    y = a @ params["w_dec"] + params["b_dec"]
    return x, h, a, y


def forward(model: ToyMaeModel, batch: ReconBatch, mode: MaskInputMode = MaskInputMode.MASK_TOKEN) -> Volume3D:
    """Prediction volume I' = F(I_m)."""
    pb = to_patch_batch(batch, model.patch_size)
    _, _, _, y = forward_patches(model_params(model), pb, mode)
    prediction = unpatchify(y, batch.target.dims, model.patch_size)
    return batch.target.with_data(prediction)


# ============================================
# LOSS AND GRADIENTS
# ============================================

def masked_mse(prediction, target, mask, eps: float = 1e-8) -> float:
    """sum(M * (I' - T)^2) / (sum(M) + eps)."""
    y = _as_array(prediction).astype(np.float64)
    t = _as_array(target).astype(np.float64)
    m = _as_array(mask).astype(np.float64)
    if not (y.shape == t.shape == m.shape):
        raise DimensionMismatchError(t.shape, y.shape if y.shape != t.shape else m.shape, what="masked_mse operand")
    diff = y - t
    return float(np.sum(m * diff * diff) / (np.sum(m) + eps))


def masked_mse_grad(prediction, target, mask, eps: float = 1e-8) -> np.ndarray:
    """dL/dI'; exactly zero wherever M is zero."""
    y = _as_array(prediction).astype(np.float64)
    t = _as_array(target).astype(np.float64)
    m = _as_array(mask).astype(np.float64)
    return 2.0 * m * (y - t) / (np.sum(m) + eps)


def patch_loss_and_gradients(
    params: Params, pb: PatchBatch, eps: float, mode: MaskInputMode = MaskInputMode.MASK_TOKEN
) -> Tuple[float, Params]:
    """Masked MSE and its gradient w.r.t. every parameter, by the chain rule."""
    x, h, a, y = forward_patches(params, pb, mode)
    loss = masked_mse(y, pb.targets, pb.weights, eps)
    d_y = masked_mse_grad(y, pb.targets, pb.weights, eps)

    d_w_dec = a.T @ d_y
    d_b_dec = d_y.sum(axis=0)
    d_h = (d_y @ params["w_dec"].T) * (h > 0)
    d_w_enc = x.T @ d_h
    d_b_enc = d_h.sum(axis=0)
    if mode == MaskInputMode.MASK_TOKEN:
        d_x = d_h @ params["w_enc"].T
        d_token = d_x[pb.masked].sum(axis=0)
    else:
        d_token = np.zeros_like(params["mask_token"])

    grads = {
        "w_enc": d_w_enc,
        "b_enc": d_b_enc,
        "w_dec": d_w_dec,
        "b_dec": d_b_dec,
        "mask_token": d_token,
    }
    return loss, grads


def model_loss(params: Params, batch: ReconBatch, patch_size: int, eps: float = 1e-8,
               mode: MaskInputMode = MaskInputMode.MASK_TOKEN) -> float:
    """Loss of arbitrary (float64) parameters; the finite-difference target."""
    pb = to_patch_batch(batch, patch_size)
    _, _, _, y = forward_patches(params, pb, mode)
    return masked_mse(y, pb.targets, pb.weights, eps)


def loss_and_gradients(model: ToyMaeModel, batch: ReconBatch, eps: float = 1e-8,
                       mode: MaskInputMode = MaskInputMode.MASK_TOKEN) -> Tuple[float, Params]:
    pb = to_patch_batch(batch, model.patch_size)
    return patch_loss_and_gradients(model_params(model), pb, eps, mode)


def backward(model: ToyMaeModel, batch: ReconBatch, eps: float = 1e-8,
             mode: MaskInputMode = MaskInputMode.MASK_TOKEN) -> Params:
    """Analytic gradient of masked_mse(forward(model, batch)) w.r.t. every weight."""
    _, grads = loss_and_gradients(model, batch, eps, mode)
    return grads
