"""
Doku matrisleri: GLCM (eş-oluşum) ve RLM (koşu uzunluğu).

Matrisler uzaklık 1'de, 13 tekil 3B yön üzerinden toplanır.
Seviyeler 0 tabanlı saklanır, formüllerde 1 tabanlı kullanılır.
"""

from itertools import product
from typing import Optional, Sequence, Tuple

import numpy as np

Direction = Tuple[int, int, int]

# İlk sıfırdan farklı bileşeni pozitif olan 13 yön
DIRECTIONS_13: Tuple[Direction, ...] = tuple(
    d for d in product((-1, 0, 1), repeat=3)
    if any(d) and next(c for c in d if c != 0) > 0
)

GLCM_NAMES = (
    "contrast", "correlation", "asm", "entropy", "idm", "dissimilarity",
    "autocorrelation", "cluster_shade", "cluster_prominence", "cluster_tendency",
    "max_probability", "sum_average", "sum_variance", "sum_entropy",
    "difference_average", "difference_variance", "difference_entropy",
    "imc1", "imc2", "inverse_variance", "joint_average", "joint_variance",
)

RLM_NAMES = ("SRE", "LRE", "GLN", "RLN", "RP", "LGRE", "HGRE", "SRLGE", "SRHGE", "LRLGE", "LRHGE")


def _entropy(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def _shift_slices(d: Direction) -> Tuple[Tuple[slice, ...], Tuple[slice, ...]]:
    """1 voksel dolgulu dizide merkez ve d kadar kaydırılmış görünüm dilimleri"""
    core = tuple(slice(1, -1) for _ in d)
    shifted = tuple(slice(1 + c, (-1 + c) or None) for c in d)
    return core, shifted


# =============================================================================
# GLCM
# =============================================================================
def glcm_matrix(
    levels: np.ndarray,
    mask: np.ndarray,
    n_levels: int,
    directions: Sequence[Direction] = DIRECTIONS_13,
) -> np.ndarray:
    """
    Simetrik eş-oluşum sayım matrisi.

    Hiç komşu çift yoksa (tek voksel) her voksel kendisiyle eşlenir.
    """
    labelled = np.where(mask, levels, -1).astype(np.int64)
    padded = np.pad(labelled, 1, constant_values=-1)
    counts = np.zeros(n_levels * n_levels, dtype=np.float64)
    for d in directions:
        core, shifted = _shift_slices(d)
        a = padded[core]
        b = padded[shifted]
        valid = (a >= 0) & (b >= 0)
        counts += np.bincount(a[valid] * n_levels + b[valid], minlength=n_levels * n_levels)
    matrix = counts.reshape(n_levels, n_levels)
    matrix = matrix + matrix.T
    if matrix.sum() == 0:
        values = levels[mask].astype(np.int64)
        matrix[np.diag_indices(n_levels)] = np.bincount(values, minlength=n_levels)
    return matrix


def haralick_statistics(matrix: np.ndarray) -> np.ndarray:
    """Normalize edilmiş GLCM'den 22 Haralick özelliği"""
    n = matrix.shape[0]
    P = matrix / matrix.sum()
    i = np.arange(1, n + 1, dtype=np.float64)[:, None]
    j = np.arange(1, n + 1, dtype=np.float64)[None, :]
    px = P.sum(axis=1)
    py = P.sum(axis=0)
    levels = i.ravel()
    mu_x = float((levels * px).sum())
    mu_y = float((levels * py).sum())
    var_x = float(((levels - mu_x) ** 2 * px).sum())
    var_y = float(((levels - mu_y) ** 2 * py).sum())

    diff = i - j
    contrast = float((diff ** 2 * P).sum())
    autocorrelation = float((i * j * P).sum())
    if var_x > 0 and var_y > 0:
        correlation = float(np.clip((autocorrelation - mu_x * mu_y) / np.sqrt(var_x * var_y), -1.0, 1.0))
    else:
        correlation = 1.0
    asm = float((P ** 2).sum())
    entropy = _entropy(P)
    idm = float((P / (1.0 + diff ** 2)).sum())
    dissimilarity = float((np.abs(diff) * P).sum())
    centered = i + j - mu_x - mu_y
    cluster_shade = float((centered ** 3 * P).sum())
    cluster_prominence = float((centered ** 4 * P).sum())
    cluster_tendency = float((centered ** 2 * P).sum())
    max_probability = float(P.max())

    # p_{x+y}(k), k = 2..2n ve p_{x−y}(k), k = 0..n−1
    sum_index = (i + j).astype(np.int64).ravel()
    p_sum = np.bincount(sum_index, weights=P.ravel(), minlength=2 * n + 1)[2:]
    k_sum = np.arange(2, 2 * n + 1, dtype=np.float64)
    sum_average = float((k_sum * p_sum).sum())
    sum_variance = float(((k_sum - sum_average) ** 2 * p_sum).sum())
    sum_entropy = _entropy(p_sum)

    diff_index = np.abs(diff).astype(np.int64).ravel()
    p_diff = np.bincount(diff_index, weights=P.ravel(), minlength=n)
    k_diff = np.arange(n, dtype=np.float64)
    difference_average = float((k_diff * p_diff).sum())
    difference_variance = float(((k_diff - difference_average) ** 2 * p_diff).sum())
    difference_entropy = _entropy(p_diff)

    hx = _entropy(px)
    hy = _entropy(py)
    pxy = px[:, None] * py[None, :]
    positive = P > 0
    hxy1 = float(-(P[positive] * np.log2(pxy[positive])).sum())
    hxy2 = _entropy(pxy)
    h_max = max(hx, hy)
    imc1 = (entropy - hxy1) / h_max if h_max > 0 else 0.0
    imc2 = float(np.sqrt(1.0 - np.exp(-2.0 * (hxy2 - entropy)))) if hxy2 > entropy else 0.0

    off_diagonal = diff != 0
    inverse_variance = float((P[off_diagonal] / diff[off_diagonal] ** 2).sum())
    joint_variance = var_x

    return np.array([
        contrast, correlation, asm, entropy, idm, dissimilarity,
        autocorrelation, cluster_shade, cluster_prominence, cluster_tendency,
        max_probability, sum_average, sum_variance, sum_entropy,
        difference_average, difference_variance, difference_entropy,
        imc1, imc2, inverse_variance, mu_x, joint_variance,
    ], dtype=np.float64)


# =============================================================================
# RLM
# =============================================================================
def rlm_matrix(
    levels: np.ndarray,
    mask: np.ndarray,
    n_levels: int,
    directions: Sequence[Direction] = DIRECTIONS_13,
) -> np.ndarray:
    """
    Koşu uzunluğu sayım matrisi (seviye × uzunluk), yönler üzerinden toplanmış.

    Bir koşu, aynı doğru üzerinde ardışık ve aynı seviyeli bölge vokselleridir.
    """
    coords = np.argwhere(mask)
    values = levels[mask].astype(np.int64)
    max_len = int(max(mask.shape))
    counts = np.zeros(n_levels * max_len, dtype=np.float64)
    for d in directions:
        d_arr = np.asarray(d, dtype=np.int64)
        axis = int(np.flatnonzero(d_arr)[0])
        t = coords[:, axis]
        line = coords - t[:, None] * d_arr
        order = np.lexsort((t, line[:, 2], line[:, 1], line[:, 0]))
        t_s, line_s, v_s = t[order], line[order], values[order]
        continues = np.zeros(len(t_s), dtype=bool)
        continues[1:] = (
            (line_s[1:] == line_s[:-1]).all(axis=1)
            & (t_s[1:] == t_s[:-1] + 1)
            & (v_s[1:] == v_s[:-1])
        )
        starts = np.flatnonzero(~continues)
        lengths = np.diff(np.append(starts, len(t_s)))
        counts += np.bincount(v_s[starts] * max_len + (lengths - 1), minlength=n_levels * max_len)
    return counts.reshape(n_levels, max_len)


def run_length_statistics(matrix: np.ndarray, n_voxels: int, n_directions: int) -> np.ndarray:
    """Koşu uzunluğu matrisinden 11 özellik"""
    n_runs = matrix.sum()
    i = np.arange(1, matrix.shape[0] + 1, dtype=np.float64)[:, None]
    j = np.arange(1, matrix.shape[1] + 1, dtype=np.float64)[None, :]
    R = matrix / n_runs
    i2, j2 = i ** 2, j ** 2
    return np.array([
        (R / j2).sum(),
        (R * j2).sum(),
        (matrix.sum(axis=1) ** 2).sum() / n_runs,
        (matrix.sum(axis=0) ** 2).sum() / n_runs,
        n_runs / (n_voxels * n_directions),
        (R / i2).sum(),
        (R * i2).sum(),
        (R / (i2 * j2)).sum(),
        (R * i2 / j2).sum(),
        (R * j2 / i2).sum(),
        (R * i2 * j2).sum(),
    ], dtype=np.float64)
