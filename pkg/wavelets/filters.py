# -*- coding: utf-8 -*-
"""
Filtros de ondícula de Daubechies y sus filtros de nivel j

Convención de Percival-Walden: (h_p) es el filtro de ondícula (pasa altos) y
(g_p) el filtro de escala (pasa bajos), unidos por la relación de espejo en
cuadratura g_p = (-1)^{p+1} h_{L-p-1}. Los coeficientes provienen de las
tablas de PyWavelets y se validan contra las funciones de ganancia cerradas
antes de usarse; una tabla que no pase el oráculo es un error de construcción.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Union

import numpy as np
import pandas as pd
import pywt

from errors import FilterError
from .gains import squared_gain_H, squared_gain_G, squared_gain_level

logger = logging.getLogger(__name__)

# Tolerancia del oráculo de ganancia
GAIN_TOLERANCE = 1e-10
ORACLE_POINTS = 1024


class WaveletFamily(str, Enum):
    """Familias de Daubechies soportadas"""

    HAAR = 'haar'
    LA8 = 'la8'
    LA20 = 'la20'

    @property
    def length(self) -> int:
        return {'haar': 2, 'la8': 8, 'la20': 20}[self.value]

    @property
    def pywt_name(self) -> str:
        return {'haar': 'haar', 'la8': 'sym4', 'la20': 'sym10'}[self.value]

    @property
    def label(self) -> str:
        return {'haar': 'Haar', 'la8': 'LA(8)', 'la20': 'LA(20)'}[self.value]

    @classmethod
    def parse(cls, value: Union[str, 'WaveletFamily']) -> 'WaveletFamily':
        """Acepta 'haar', 'la8', 'LA(8)', 'la20', 'LA(20)'"""
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace('(', '').replace(')', '')
        for family in cls:
            if family.value == key:
                return family
        raise ValueError(f"familia de ondícula desconocida: {value}")


@dataclass(frozen=True, eq=False)
class BaseFilterPair:
    """Par de filtros base (ondícula h, escala g) de longitud L"""

    family: WaveletFamily
    wavelet: np.ndarray
    scaling: np.ndarray

    @property
    def L(self) -> int:
        return len(self.wavelet)


@dataclass(frozen=True, eq=False)
class LevelFilter:
    """Filtro de ondícula de nivel j, de longitud L_j = (2^j - 1)(L - 1) + 1"""

    level: int
    coefficients: np.ndarray
    base_length: int

    @property
    def L_j(self) -> int:
        return len(self.coefficients)


def empirical_gain(coefficients: np.ndarray, lam: Union[float, np.ndarray]) -> np.ndarray:
    """
    Ganancia al cuadrado |Σ_p c_p e^{-iλp}|² de un filtro finito

    Args:
        coefficients: coeficientes del filtro
        lam: frecuencia(s) en radianes

    Returns:
        Arreglo con la ganancia evaluada en cada frecuencia
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    p = np.arange(len(coefficients))
    response = np.exp(-1j * np.outer(lam, p)) @ np.asarray(coefficients, dtype=float)
    return np.abs(response) ** 2


def scaling_from_wavelet(h: np.ndarray) -> np.ndarray:
    """
    Relación de espejo en cuadratura g_p = (-1)^{p+1} h_{L-p-1}

    Raises:
        FilterError: si la longitud es impar
    """
    h = np.asarray(h, dtype=float)
    L = len(h)
    if L == 0 or L % 2:
        raise FilterError(f"el filtro de ondícula debe tener longitud par, tiene {L}")
    signs = np.where(np.arange(L) % 2 == 0, -1.0, 1.0)
    return signs * h[::-1]


def wavelet_from_scaling(g: np.ndarray) -> np.ndarray:
    """Inversa de la relación de espejo: h_p = (-1)^p g_{L-1-p}"""
    g = np.asarray(g, dtype=float)
    L = len(g)
    if L == 0 or L % 2:
        raise FilterError(f"el filtro de escala debe tener longitud par, tiene {L}")
    signs = np.where(np.arange(L) % 2 == 0, 1.0, -1.0)
    return signs * g[::-1]


def _verify_gain(coefficients: np.ndarray, expected: np.ndarray, lam: np.ndarray, what: str) -> None:
    error = np.max(np.abs(empirical_gain(coefficients, lam) - expected))
    if error >= GAIN_TOLERANCE:
        raise FilterError(f"{what} no supera el oráculo de ganancia (error máximo {error:.3e})")


@lru_cache(maxsize=None)
def base_filter(family: Union[str, WaveletFamily]) -> BaseFilterPair:
    """
    Filtro de Daubechies estándar de la familia indicada, con energía unitaria

    Args:
        family: 'haar', 'la8' o 'la20'

    Returns:
        BaseFilterPair validado contra H_L y G_L
    """
    family = WaveletFamily.parse(family)
    scaling = np.array(pywt.Wavelet(family.pywt_name).dec_lo, dtype=float)
    wavelet = wavelet_from_scaling(scaling)
    L = family.length
    if len(wavelet) != L:
        raise FilterError(f"{family.label}: se esperaban {L} coeficientes, hay {len(wavelet)}")

    lam = np.linspace(0.0, np.pi, ORACLE_POINTS)
    _verify_gain(wavelet, squared_gain_H(L, lam), lam, f"{family.label} (ondícula)")
    _verify_gain(scaling, squared_gain_G(L, lam), lam, f"{family.label} (escala)")

    wavelet.setflags(write=False)
    scaling.setflags(write=False)
    logger.debug(f"Filtro base {family.label} cargado (L={L})")
    return BaseFilterPair(family=family, wavelet=wavelet, scaling=scaling)


def _upsample(coefficients: np.ndarray, factor: int) -> np.ndarray:
    if factor == 1:
        return coefficients
    out = np.zeros((len(coefficients) - 1) * factor + 1)
    out[::factor] = coefficients
    return out


def level_scaling_filter(base: BaseFilterPair, j: int) -> np.ndarray:
    """Filtro de escala de nivel j (cascada de g con sobremuestreo diádico)"""
    if j < 0:
        raise FilterError(f"el nivel debe ser >= 0, se recibió {j}")
    g_level = np.ones(1)
    for i in range(j):
        g_level = np.convolve(g_level, _upsample(base.scaling, 2 ** i))
    return g_level


def cascade(base: BaseFilterPair, j: int) -> LevelFilter:
    """
    Filtro de ondícula de nivel j por la recursión piramidal

    El nivel 1 es el filtro base; el nivel j convoluciona la cascada de
    escala de nivel j-1 con el filtro de ondícula sobremuestreado por 2^{j-1}.

    Raises:
        FilterError: si j < 1
    """
    if j < 1:
        raise FilterError(f"el nivel debe ser >= 1, se recibió {j}")
    coefficients = np.convolve(level_scaling_filter(base, j - 1),
                               _upsample(base.wavelet, 2 ** (j - 1)))
    coefficients.setflags(write=False)
    return LevelFilter(level=j, coefficients=coefficients, base_length=base.L)


@lru_cache(maxsize=None)
def level_filter(family: Union[str, WaveletFamily], j: int) -> LevelFilter:
    """Atajo en caché para cascade(base_filter(family), j)"""
    return cascade(base_filter(family), j)


def gain_table(family: Union[str, WaveletFamily], j: int, points: int = ORACLE_POINTS) -> pd.DataFrame:
    """
    Tabla de la ganancia teórica H_{j,L} frente a la empírica del filtro en cascada

    Returns:
        DataFrame con columnas lambda, H_jL, empirical_gain
    """
    if points < 2:
        raise ValueError("se necesitan al menos 2 puntos")
    family = WaveletFamily.parse(family)
    level = level_filter(family, j)
    lam = np.linspace(0.0, np.pi, points)
    return pd.DataFrame({
        'lambda': lam,
        'H_jL': squared_gain_level(j, family.length, lam),
        'empirical_gain': empirical_gain(level.coefficients, lam),
    })
