"""
Masking experiments: texture-guided vs uniform random masks over seed,
ratio and beta grids, and the alpha / beta sensitivity sweep.
"""
import logging
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

from PIL import Image
from pydantic import BaseModel, ConfigDict
from scipy import stats

from atmask.schemas import (
    ExperimentConfig,
    MaskConfig,
    MaskingRow,
    PatchMask,
    PatchScores,
    RemainderPool,
    SensitivityRow,
    SummaryRow,
    TrainConfig,
    TvmConfig,
    Volume3D,
)
from atmask.services.mask_gen import (
    expand_mask,
    generate_mask,
    mask_coverage_stats,
    random_mask,
    score_patches,
)
from atmask.services.rendering import high_variation_volume, render_slice
from atmask.services.texture_map import compute_variation_map
from atmask.services.trainer import pretrain_toy

logger = logging.getLogger(__name__)

ATMASK = "atmask"
RANDOM = "random"

NamedVolume = Tuple[str, Volume3D]


class ComparisonResult(BaseModel):
    """Rows sorted by (r, beta, seed, volume, method) and renders keyed by file stem."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    rows: List[MaskingRow]
    renders: Dict[str, Image.Image] = {}


def expected_high_fraction(n_patches: int, n_high: int, m: int) -> Tuple[float, float]:
    """
    Mean and standard error of masked_high / m under uniform masking.

    masked_high is hypergeometric: m draws from N_p patches of which N_h
    are high-variation.
    """
    if m == 0 or n_patches == 0:
        return 0.0, 0.0
    dist = stats.hypergeom(M=n_patches, n=n_high, N=m)
    return float(dist.mean()) / m, float(dist.std()) / m


def _row(name: str, method: str, ratio: float, beta: Optional[float], seed: int,
         pm: PatchMask, scores: PatchScores, final_loss: Optional[float]) -> MaskingRow:
    report = mask_coverage_stats(pm, scores)
    mean, se = expected_high_fraction(report.n_patches, report.n_high, report.m)
    return MaskingRow(
        volume=name,
        method=method,
        ratio=ratio,
        beta=beta,
        seed=seed,
        expected_high_fraction=mean,
        expected_high_fraction_se=se,
        final_loss=final_loss,
        **report.model_dump(),
    )


def _sort_key(row: MaskingRow):
    return (row.ratio, -1.0 if row.beta is None else row.beta, row.seed, row.volume, row.method)


def _parallel_map(fn, items: Sequence, threads: int) -> list:
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def compare_masking(
    volumes: Sequence[NamedVolume],
    tvm_cfg: TvmConfig,
    mask_cfg: MaskConfig,
    experiment: ExperimentConfig,
    train_cfg: Optional[TrainConfig] = None,
    seed: int = 0,
    threads: int = 1,
) -> ComparisonResult:
    """
    Texture-guided masks for every (volume, r, beta, seed) plus the uniform
    random baseline for every (volume, r, seed).

    Mask seeds are ``seed + i`` for i < n_seeds. When
    ``experiment.train_steps`` > 0 each row also carries the final loss of
    a toy pretraining run under that mask configuration. The merged table
    is sorted, so it does not depend on the thread schedule.
    """
    if not volumes:
        raise ValueError("compare_masking needs at least one volume")
    scored = [(name, v, score_patches(compute_variation_map(v, tvm_cfg, threads), mask_cfg)) for name, v in volumes]
    seeds = [seed + i for i in range(experiment.n_seeds)]
    train_cfg = train_cfg or TrainConfig()

    def final_loss(volume: Volume3D, cfg: MaskConfig, run_seed: int) -> Optional[float]:
        if experiment.train_steps == 0:
            return None
        result = pretrain_toy(
            [volume], tvm_cfg, cfg,
            train_cfg.model_copy(update={"steps": experiment.train_steps, "seed": run_seed}),
        )
        return result.final_loss

    tasks = []
    for name, volume, scores in scored:
        for ratio in experiment.ratios:
            for run_seed in seeds:
                tasks.append((name, volume, scores, ratio, None, run_seed))
                for beta in experiment.betas:
                    tasks.append((name, volume, scores, ratio, beta, run_seed))

    def run(task) -> MaskingRow:
        name, volume, scores, ratio, beta, run_seed = task
        if beta is None:
            pm = random_mask(scores.grid_dims, ratio, run_seed, scores)
            uniform_cfg = mask_cfg.model_copy(update={
                "mask_ratio_r": ratio, "high_var_fraction_beta": 0.0,
                "remainder_pool": RemainderPool.ALL_REMAINING, "seed": run_seed,
            })
            return _row(name, RANDOM, ratio, None, run_seed, pm, scores, final_loss(volume, uniform_cfg, run_seed))
        cfg = mask_cfg.model_copy(update={"mask_ratio_r": ratio, "high_var_fraction_beta": beta, "seed": run_seed})
        pm = generate_mask(scores, cfg)
        return _row(name, ATMASK, ratio, beta, run_seed, pm, scores, final_loss(volume, cfg, run_seed))

    rows = sorted(_parallel_map(run, tasks, threads), key=_sort_key)
    logger.info(f"compare-masking: {len(rows)} rows over {len(volumes)} volume(s), {len(seeds)} seed(s)")

    renders: Dict[str, Image.Image] = {}
    if experiment.render:
        first = seeds[0]
        for name, volume, scores in scored:
            outline = high_variation_volume(scores)
            for ratio in experiment.ratios:
                for beta in experiment.betas:
                    cfg = mask_cfg.model_copy(update={"mask_ratio_r": ratio, "high_var_fraction_beta": beta, "seed": first})
                    mask = expand_mask(generate_mask(scores, cfg), mask_cfg.patch_size, volume.spacing)
                    stem = f"{name}_r{ratio:g}_b{beta:g}_s{first}"
                    renders[stem] = render_slice(volume, mask=mask, high_var=outline, scale=experiment.render_scale)
    return ComparisonResult(rows=rows, renders=renders)


def _mean(values: List[Optional[float]]) -> Optional[float]:
    present = [v for v in values if v is not None]
    return float(statistics.fmean(present)) if present else None


def summarize(rows: Sequence[MaskingRow]) -> List[SummaryRow]:
    """Aggregate compare-masking rows per (method, r, beta)."""
    groups: Dict[tuple, List[MaskingRow]] = {}
    for row in rows:
        groups.setdefault((row.method, row.ratio, row.beta), []).append(row)

    summary = []
    for (method, ratio, beta), members in groups.items():
        fractions = [r.masked_high_fraction for r in members]
        se = statistics.stdev(fractions) / math.sqrt(len(fractions)) if len(fractions) > 1 else 0.0
        summary.append(SummaryRow(
            method=method,
            ratio=ratio,
            beta=beta,
            n_rows=len(members),
            mean_masked_high_fraction=float(statistics.fmean(fractions)),
            se_masked_high_fraction=se,
            mean_expected_high_fraction=float(statistics.fmean(r.expected_high_fraction for r in members)),
            mean_score_masked=_mean([r.mean_score_masked for r in members]),
            mean_final_loss=_mean([r.final_loss for r in members]),
        ))
    return sorted(summary, key=lambda s: (s.ratio, -1.0 if s.beta is None else s.beta, s.method))


def sensitivity_sweep(
    volumes: Sequence[NamedVolume],
    tvm_cfg: TvmConfig,
    mask_cfg: MaskConfig,
    alphas: Sequence[float],
    betas: Sequence[float],
    n_seeds: int,
    seed: int = 0,
    threads: int = 1,
) -> List[SensitivityRow]:
    """Coverage statistics of texture-guided masks across an (alpha, beta) grid."""
    rows = []
    for alpha in alphas:
        alpha_cfg = tvm_cfg.model_copy(update={"alpha": alpha})
        scored = [score_patches(compute_variation_map(v, alpha_cfg, threads), mask_cfg) for _, v in volumes]
        for beta in betas:
            def run(task):
                scores, run_seed = task
                cfg = mask_cfg.model_copy(update={"high_var_fraction_beta": beta, "seed": run_seed})
                return mask_coverage_stats(generate_mask(scores, cfg), scores)

            tasks = [(scores, seed + i) for scores in scored for i in range(n_seeds)]
            reports = _parallel_map(run, tasks, threads)
            rows.append(SensitivityRow(
                alpha=alpha,
                beta=beta,
                n_rows=len(reports),
                mean_n_high=float(statistics.fmean(r.n_high for r in reports)),
                mean_masked_high_fraction=float(statistics.fmean(r.masked_high_fraction for r in reports)),
                mean_high_coverage=float(statistics.fmean(r.high_coverage for r in reports)),
                mean_score_masked=_mean([r.mean_score_masked for r in reports]),
            ))
        logger.info(f"sensitivity: alpha={alpha:g} done ({len(betas)} beta values)")
    return rows
