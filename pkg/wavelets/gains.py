# -*- coding: utf-8 -*-
"""
Funciones de ganancia al cuadrado de los filtros de Daubechies

H_L es la ganancia del filtro de ondícula, G_L la del filtro de escala y
H_{j,L} la del filtro de nivel j. Todas aceptan escalares o arreglos de
frecuencias (radianes por muestra).
"""

from typing import Union

import numpy as np
from scipy.special import comb

ArrayLike = Union[float, np.ndarray]


def _check_length(L: int) -> None:
    if L < 2 or L % 2:
        raise ValueError(f"la longitud del filtro debe ser par y >= 2, se recibió {L}")


def squared_gain_H(L: int, lam: ArrayLike) -> ArrayLike:
    """
    H_L(λ) = 2 sin^L(λ/2) Σ_{p=0}^{L/2-1} C(L/2-1+p, p) cos^{2p}(λ/2)

    Args:
        L: longitud del filtro (par)
        lam: frecuencia(s) en radianes

    Returns:
        Valor(es) no negativos de la ganancia al cuadrado
    """
    _check_length(L)
    lam = np.asarray(lam, dtype=float)
    half = L // 2
    s = np.sin(lam / 2.0)
    c2 = np.cos(lam / 2.0) ** 2
    total = np.zeros_like(lam)
    for p in range(half):
        total = total + comb(half - 1 + p, p, exact=True) * c2 ** p
    value = 2.0 * s ** L * total
    return value if value.ndim else float(value)


def squared_gain_G(L: int, lam: ArrayLike) -> ArrayLike:
    """G_L(λ) = H_L(λ - π)"""
    return squared_gain_H(L, np.asarray(lam, dtype=float) - np.pi)


def squared_gain_level(j: int, L: int, lam: ArrayLike) -> ArrayLike:
    """
    Ganancia del filtro de nivel j:
    H_{j,L}(λ) = H_L(2^{j-1} λ) ∏_{i=0}^{j-2} G_L(2^i λ)
    """
    if j < 1:
        raise ValueError(f"el nivel debe ser >= 1, se recibió {j}")
    lam = np.asarray(lam, dtype=float)
    value = np.asarray(squared_gain_H(L, 2.0 ** (j - 1) * lam), dtype=float)
    for i in range(j - 1):
        value = value * squared_gain_G(L, 2.0 ** i * lam)
    return value if value.ndim else float(value)


def squared_gain_scaling_level(j: int, L: int, lam: ArrayLike) -> ArrayLike:
    """Ganancia del filtro de escala de nivel j: ∏_{i=0}^{j-1} G_L(2^i λ)"""
    lam = np.asarray(lam, dtype=float)
    value = np.ones_like(lam)
    for i in range(j):
        value = value * squared_gain_G(L, 2.0 ** i * lam)
    return value if value.ndim else float(value)
