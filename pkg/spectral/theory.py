# -*- coding: utf-8 -*-
"""
Oráculos teóricos del estimador: núcleo de discretización D, núcleo de
interpolación Π, peso de volatilidad Σ_t y la constante límite del nivel j.

Las frecuencias están en radianes por paso de rejilla.
"""

import logging
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy.integrate import quad

from config import Config
from errors import DataError, NumericError
from wavelets.filters import WaveletFamily
from wavelets.gains import squared_gain_level

logger = logging.getLogger(__name__)

DEFAULT_D_LIMIT = 200.0 * np.pi
IMAGINARY_TOLERANCE = 1e-9


def discretization_kernel(lam):
    """
    D(λ) = (1/2π)|(e^{-iλ} - 1)/λ|² = (2/π) sin²(λ/2)/λ², con D(0) = 1/(2π)
    """
    lam = np.asarray(lam, dtype=float)
    value = np.sinc(lam / (2.0 * np.pi)) ** 2 / (2.0 * np.pi)
    return value if value.ndim else float(value)


def interpolation_kernel(lam, pi1: float, pi2: float):
    """
    Π(λ) = (1-π1)(1-π2) / ((1 - π1 e^{iλ})(1 - π2 e^{-iλ}))

    Args:
        lam: frecuencia(s)
        pi1, pi2: probabilidades de ausencia en [0, 1)

    Returns:
        Valor(es) complejos; Π ≡ 1 si π1 = π2 = 0
    """
    for name, value in (('pi1', pi1), ('pi2', pi2)):
        if not 0.0 <= value < 1.0:
            raise DataError(f"{name} debe estar en [0, 1), se recibió {value}")
    lam = np.asarray(lam, dtype=float)
    value = ((1.0 - pi1) * (1.0 - pi2)
             / ((1.0 - pi1 * np.exp(1j * lam)) * (1.0 - pi2 * np.exp(-1j * lam))))
    return value if value.ndim else complex(value)


def sigma_weight(theta: float, sigma1: Callable[[float], float], sigma2: Callable[[float], float],
                 T: float, t: Optional[float] = None) -> float:
    """
    Peso de volatilidad Σ_t(θ)

    Para θ >= 0: (1/(T-θ)) ∫_0^{(t-θ)+} σ¹_s σ²_{s+θ} ds; para θ < 0 se
    intercambian los papeles de las dos series.

    Args:
        theta: rezago en segundos, |θ| < T
        sigma1, sigma2: volatilidades como funciones del tiempo
        T: horizonte
        t: instante de evaluación (por defecto T)

    Returns:
        Valor del peso
    """
    t = T if t is None else t
    lag = abs(theta)
    if lag >= T:
        raise DataError(f"|θ| = {lag:g} debe ser menor que T = {T:g}")
    upper = max(t - lag, 0.0)
    if upper == 0.0:
        return 0.0
    if theta >= 0:
        integrand = lambda s: sigma1(s) * sigma2(s + lag)
    else:
        integrand = lambda s: sigma1(s + lag) * sigma2(s)
    value, _ = quad(integrand, 0.0, upper, epsabs=Config.QUAD_TOLERANCE, limit=200)
    return value / (T - lag)


def integrate_discretization_kernel(limit: float = DEFAULT_D_LIMIT) -> float:
    """
    ∫ D(λ) dλ sobre [-limit, limit] período a período, más la cola analítica
    2/(π·limit); el resultado debe ser 1
    """
    if limit <= 0:
        raise ValueError("el límite de integración debe ser positivo")
    edges = np.append(np.arange(0.0, limit, 2.0 * np.pi), limit)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        piece, _ = quad(discretization_kernel, a, b, epsabs=Config.QUAD_TOLERANCE)
        total += piece
    return 2.0 * total + 2.0 / (np.pi * limit)


def _band(j: int) -> Tuple[float, float]:
    low = np.pi / 2.0 ** j
    return low, 2.0 * low


def _complex_quad(integrand: Callable[[float], complex], a: float, b: float) -> complex:
    tol = Config.QUAD_TOLERANCE
    real, _ = quad(lambda x: integrand(x).real, a, b, epsabs=tol, limit=200)
    imag, _ = quad(lambda x: integrand(x).imag, a, b, epsabs=tol, limit=200)
    return complex(real, imag)


def limit_constant(j: int, b: float, pi1: float, pi2: float, R: float, sigma_value: float,
                   family: Optional[Union[str, WaveletFamily]] = None) -> float:
    """
    Constante límite del nivel j:
    2^j Σ R_j ∫_{Λ_{-j}} D(λ) Π(λ) e^{ibλ} dλ

    Con family se usa la ganancia H_{j,L} del filtro finito restringida a la
    banda en lugar de la ganancia ideal 2^j.

    Args:
        j: nivel (>= 1)
        b: desplazamiento fraccionario entre el rezago y la rejilla
        pi1, pi2: probabilidades de ausencia
        R: correlación del nivel
        sigma_value: peso de volatilidad Σ_t(θ_j)
        family: familia de ondícula para la versión de longitud finita

    Returns:
        Parte real de la constante

    Raises:
        NumericError: si la parte imaginaria no se cancela
    """
    if j < 1:
        raise DataError(f"el nivel debe ser >= 1, se recibió {j}")
    if abs(b) > 0.5:
        logger.warning(f"|b| = {abs(b):g} > 1/2: fuera del rango donde la constante es no nula")
    if R == 0.0 or sigma_value == 0.0:
        return 0.0

    if family is None:
        weight = lambda lam: 2.0 ** j
    else:
        L = WaveletFamily.parse(family).length
        weight = lambda lam: squared_gain_level(j, L, lam)

    def integrand(lam: float) -> complex:
        return (weight(lam) * discretization_kernel(lam)
                * interpolation_kernel(lam, pi1, pi2) * np.exp(1j * b * lam))

    low, high = _band(j)
    integral = _complex_quad(integrand, low, high) + _complex_quad(integrand, -high, -low)
    if abs(integral.imag) >= IMAGINARY_TOLERANCE:
        raise NumericError(
            f"la parte imaginaria de la constante límite no se cancela: {integral.imag:.3e}"
        )
    return float(sigma_value * R * integral.real)
