# -*- coding: utf-8 -*-
"""
Servicio de estimación lead-lag escala por escala

Para cada nivel j se filtran ambas series con la MODWT, se evalúa la
covarianza cruzada de coeficientes sobre la rejilla de rezagos y se toma el
rezago que maximiza |ρ̂|. Incluye el contraste de una sola escala al estilo
Hoffmann-Rosenbaum-Yoshida como referencia.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Any, List, Optional, Sequence, Tuple, Union

import numpy as np

from config import Config
from errors import DataError
from wavelets.filters import WaveletFamily, level_filter
from wavelets.transform import WaveletCoeffs, modwt

logger = logging.getLogger(__name__)

HRY_LEVEL = 0


@dataclass(frozen=True, eq=False)
class LagGrid:
    """Rejilla simétrica y estrictamente creciente de rezagos enteros"""

    lags: np.ndarray

    def __post_init__(self):
        lags = np.asarray(self.lags)
        if lags.size == 0:
            raise DataError("la rejilla de rezagos está vacía")
        if np.any(np.diff(lags) <= 0) or not np.array_equal(lags, -lags[::-1]):
            raise DataError("la rejilla debe ser simétrica y estrictamente creciente")

    @classmethod
    def from_max_lag(cls, l_max: int) -> 'LagGrid':
        if l_max < 0:
            raise DataError(f"el rezago máximo debe ser >= 0, se recibió {l_max}")
        return cls(lags=np.arange(-l_max, l_max + 1))

    @classmethod
    def from_delta(cls, delta: float, tau: float) -> 'LagGrid':
        """Todos los l con |lτ| < δ"""
        if delta <= 0 or tau <= 0:
            raise DataError("delta y tau deben ser positivos")
        return cls.from_max_lag(int(np.ceil(delta / tau)) - 1)

    @property
    def l_max(self) -> int:
        return int(self.lags[-1])

    def __len__(self) -> int:
        return len(self.lags)


@dataclass(frozen=True, eq=False)
class CrossCovCurve:
    """ρ̂ del nivel j sobre la rejilla y su versión normalizada"""

    level: int
    lags: np.ndarray
    rho: np.ndarray
    rho_normalized: np.ndarray
    divisor: float


@dataclass(frozen=True)
class LagEstimate:
    """Rezago estimado de un nivel (level = 0 para el contraste HRY)"""

    level: int
    lag: int
    theta_seconds: float
    peak_value: float
    runner_up_gap: float
    degenerate: bool = False
    tie_broken: bool = False


@dataclass
class LevelReport:
    """Curvas y estimaciones por nivel de una familia de ondícula"""

    family: WaveletFamily
    curves: List[CrossCovCurve] = field(default_factory=list)
    estimates: List[LagEstimate] = field(default_factory=list)

    def lags(self) -> List[int]:
        return [e.lag for e in self.estimates]


def _lagged_dot(x: np.ndarray, y: np.ndarray, l: int) -> Tuple[float, int]:
    """Σ x_k y_{k+l} sobre el rango solapado y su número de términos"""
    size = len(x)
    count = size - abs(l)
    if count <= 0:
        raise DataError(f"rango de suma vacío para el rezago {l} con {size} coeficientes")
    if l >= 0:
        return float(np.dot(x[:count], y[l:])), count
    return float(np.dot(x[-l:], y[:count])), count


def cross_cov(w1: WaveletCoeffs, w2: WaveletCoeffs, l: int, tau: float) -> float:
    """
    ρ̂_j(lτ) = τ^{-1}/(n-|l|-L_j+1) Σ_k W¹_{jk} W²_{j,k+l}

    Raises:
        DataError: niveles o longitudes distintos, o rango de suma vacío
    """
    if w1.level != w2.level or len(w1) != len(w2):
        raise DataError(
            f"coeficientes incompatibles: nivel {w1.level} (len {len(w1)}) vs nivel {w2.level} (len {len(w2)})"
        )
    total, count = _lagged_dot(w1.values, w2.values, int(l))
    return total / (tau * count)


def _curve(level: int, x: np.ndarray, y: np.ndarray, grid: LagGrid, tau: Optional[float]) -> CrossCovCurve:
    size = len(x)
    rho = np.empty(len(grid))
    for i, l in enumerate(grid.lags):
        total, count = _lagged_dot(x, y, int(l))
        rho[i] = total if tau is None else total / (tau * count)

    energy = np.sqrt(float(np.dot(x, x)) * float(np.dot(y, y)))
    divisor = energy if tau is None else energy / (tau * size)
    if divisor > 0:
        rho_normalized = rho / divisor
    else:
        rho_normalized = np.zeros_like(rho)
    return CrossCovCurve(level=level, lags=grid.lags, rho=rho, rho_normalized=rho_normalized, divisor=divisor)


def cross_cov_curve(w1: WaveletCoeffs, w2: WaveletCoeffs, grid: LagGrid, tau: float) -> CrossCovCurve:
    """
    Curva ρ̂ sobre la rejilla; la normalización divide por
    τ^{-1}/(n-L_j+1)·sqrt(Σ(W¹)² Σ(W²)²)
    """
    if w1.level != w2.level or len(w1) != len(w2):
        raise DataError(f"coeficientes incompatibles: nivel {w1.level} vs nivel {w2.level}")
    return _curve(w1.level, w1.values, w2.values, grid, tau)


def estimate_lag(curve: CrossCovCurve, tau: float) -> LagEstimate:
    """
    Argmax de |ρ̂| sobre la rejilla

    Los empates se resuelven por menor |l| y después por l negativo. Una
    curva nula devuelve rezago 0 marcada como degenerada.
    """
    magnitude = np.abs(curve.rho)
    peak = float(magnitude.max())
    candidates = [int(l) for l, m in zip(curve.lags, magnitude) if m == peak]
    lag = min(candidates, key=lambda l: (abs(l), l))

    others = magnitude[curve.lags != lag]
    runner_up = float(others.max()) if others.size else 0.0
    degenerate = peak == 0.0
    if degenerate:
        logger.warning(f"Curva degenerada (idénticamente nula) en el nivel {curve.level}")
    return LagEstimate(
        level=curve.level,
        lag=lag,
        theta_seconds=lag * tau,
        peak_value=peak,
        runner_up_gap=peak - runner_up,
        degenerate=degenerate,
        tie_broken=len(candidates) > 1,
    )


def hry_curve(ret1, ret2, grid: LagGrid) -> CrossCovCurve:
    """Contraste sin normalizar C(l) = Σ_k ret1[k] ret2[k+l] (nivel 0)"""
    x = np.asarray(getattr(ret1, 'returns', ret1), dtype=float)
    y = np.asarray(getattr(ret2, 'returns', ret2), dtype=float)
    if len(x) != len(y):
        raise DataError(f"series de longitud distinta: {len(x)} vs {len(y)}")
    return _curve(HRY_LEVEL, x, y, grid, None)


def hry_lag(ret1, ret2, grid: LagGrid, tau: float) -> LagEstimate:
    """Estimación de una sola escala con el contraste HRY sobre la rejilla síncrona"""
    return estimate_lag(hry_curve(ret1, ret2, grid), tau)


def max_feasible_level(n: int, family: Union[str, WaveletFamily], grid: LagGrid) -> int:
    """
    Mayor nivel j con L_j <= n y al menos un término en cada rezago de la rejilla
    """
    L = WaveletFamily.parse(family).length
    j = 0
    while True:
        L_next = (2 ** (j + 1) - 1) * (L - 1) + 1
        if n - L_next + 1 <= grid.l_max:
            return j
        j += 1


def estimate_levels(ret1, ret2, family: Union[str, WaveletFamily], j_max: int,
                    grid: LagGrid, tau: float) -> LevelReport:
    """cascada → MODWT → curva → argmax para j = 1..j_max de una familia"""
    family = WaveletFamily.parse(family)
    n = len(getattr(ret1, 'returns', ret1))
    feasible = max_feasible_level(n, family, grid)
    if j_max > feasible:
        raise DataError(
            f"{family.label}: nivel {j_max} no factible con n={n} y rezago máximo {grid.l_max}; "
            f"nivel máximo factible: {feasible}"
        )
    report = LevelReport(family=family)
    for j in range(1, j_max + 1):
        filt = level_filter(family, j)
        curve = cross_cov_curve(modwt(ret1, filt), modwt(ret2, filt), grid, tau)
        report.curves.append(curve)
        report.estimates.append(estimate_lag(curve, tau))
    logger.debug(f"{family.label}: rezagos {report.lags()}")
    return report


def estimate_all_levels(ret1, ret2, families: Sequence[Union[str, WaveletFamily]], j_max: int,
                        grid: LagGrid, tau: float) -> Dict[WaveletFamily, LevelReport]:
    """
    Ejecuta estimate_levels para cada familia

    Raises:
        DataError: si j_max excede el nivel máximo factible de alguna familia
    """
    reports = {}
    for family in families:
        family = WaveletFamily.parse(family)
        reports[family] = estimate_levels(ret1, ret2, family, j_max, grid, tau)
    return reports


def _curve_points(curve: CrossCovCurve) -> List[Dict[str, float]]:
    return [
        {'l': int(l), 'rho': float(r), 'rho_norm': float(rn)}
        for l, r, rn in zip(curve.lags, curve.rho, curve.rho_normalized)
    ]


def _estimate_entry(curve: CrossCovCurve, estimate: LagEstimate) -> Dict[str, Any]:
    return {
        'theta_hat_grid': estimate.lag,
        'theta_hat_seconds': estimate.theta_seconds,
        'peak': estimate.peak_value,
        'runner_up_gap': estimate.runner_up_gap,
        'degenerate': estimate.degenerate,
        'tie_broken': estimate.tie_broken,
        'curve': _curve_points(curve),
    }


def report_to_dict(reports: Dict[WaveletFamily, LevelReport], hry: Optional[Tuple[CrossCovCurve, LagEstimate]],
                   tau: float, metadata: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """
    Informe JSON del subcomando estimate

    Returns:
        Dict con schema_version, tau, families[{family, levels[...]}] y hry
    """
    families = []
    for family, report in reports.items():
        levels = [
            {'j': estimate.level, **_estimate_entry(curve, estimate)}
            for curve, estimate in zip(report.curves, report.estimates)
        ]
        families.append({'family': family.value, 'label': family.label, 'levels': levels})

    result = {
        'schema_version': Config.SCHEMA_VERSION,
        'tau': tau,
        'families': families,
    }
    if hry is not None:
        result['hry'] = _estimate_entry(*hry)
    if metadata:
        result['metadata'] = metadata
    return result
