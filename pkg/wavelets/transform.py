# -*- coding: utf-8 -*-
"""
Transformada de ondícula discreta de máximo solapamiento (MODWT)

Sólo se conservan los coeficientes sin efecto de borde:
W_{jk} = Σ_{p=0}^{L_j-1} h_{j,p} r_{k-p},  k = L_j-1, ..., n-1
"""

from dataclasses import dataclass

import numpy as np

from errors import DataError
from .filters import LevelFilter


@dataclass(frozen=True, eq=False)
class WaveletCoeffs:
    """Coeficientes W_{jk} de un nivel, indexados desde k = L_j - 1"""

    level: int
    values: np.ndarray
    L_j: int
    n: int

    @property
    def first_index(self) -> int:
        return self.L_j - 1

    def __len__(self) -> int:
        return len(self.values)


def modwt(returns, level_filter: LevelFilter) -> WaveletCoeffs:
    """
    Filtra una serie de retornos con el filtro de nivel j

    Args:
        returns: AlignedReturns o secuencia de n retornos
        level_filter: filtro de nivel j

    Returns:
        WaveletCoeffs con n - L_j + 1 valores

    Raises:
        DataError: si la serie es más corta que el filtro
    """
    values = np.asarray(getattr(returns, 'returns', returns), dtype=float)
    n = len(values)
    L_j = level_filter.L_j
    if n < L_j:
        raise DataError(
            f"serie más corta que el filtro: n={n} < L_{level_filter.level}={L_j}"
        )
    coeffs = np.convolve(values, level_filter.coefficients, mode='valid')
    if not np.all(np.isfinite(coeffs)):
        raise DataError(f"coeficientes no finitos en el nivel {level_filter.level}")
    coeffs.setflags(write=False)
    return WaveletCoeffs(level=level_filter.level, values=coeffs, L_j=L_j, n=n)
