"""Typing."""

from __future__ import annotations

from typing import TypeGuard

import numpy as np
import numpy.typing as npt

type ComplexArray = npt.NDArray[np.complex128]
type FloatArray = npt.NDArray[np.float64]
type IntArray = npt.NDArray[np.intp]
type Pair = tuple[int, int]


def ensure_square_matrix(val: object) -> None:
    if not is_square_matrix(val):
        raise TypeError(f"{type(val)}: expected a square 2-d array")


def is_square_matrix(val: object) -> TypeGuard[npt.NDArray[np.generic]]:
    return isinstance(val, np.ndarray) and val.ndim == 2 and val.shape[0] == val.shape[1]


def ensure_pair(pair: Pair, n_levels: int) -> None:
    """Checks a level pair (k, l) with 0 ≤ k < l < n_levels.

    :param pair: Level pair.
    :param n_levels: Number of target levels.
    """
    low, high = pair
    if not 0 <= low < high < n_levels:
        raise ValueError(f"invalid level pair {pair} for {n_levels} levels")
