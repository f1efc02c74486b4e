# -*- coding: utf-8 -*-
"""
Modelo de densidad espectral cruzada multiescala

f(λ) = Σ_{j=1}^{J+1} R_j e^{-iθ_j λ} 1_{Λ_{J-j+1}}(λ), con bandas diádicas
Λ_m = [-2^{m+1}π, -2^m π) ∪ (2^m π, 2^{m+1}π]. El nivel j = 1 es la
resolución más fina τ_J = 2^{-J-1}; con un reloj τ arbitrario la banda del
nivel j es (π/(2^j τ), 2π/(2^j τ)].
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Dict, Any, List, Optional, Tuple, Union

import numpy as np
from scipy.special import sici

from errors import DataError

logger = logging.getLogger(__name__)

KERNELS = ('midpoint', 'exact')


@dataclass(frozen=True)
class LevelParameters:
    """Correlación R_j y rezago θ_j (segundos) de un nivel"""

    j: int
    R: float
    theta: float


@dataclass(frozen=True)
class SpectralModel:
    """
    Conjunto de parámetros {J, (R_j, θ_j)} del modelo

    Attributes:
        J: nivel diádico más fino
        levels: parámetros para j = 1..J+1
        tau: reloj τ_J en segundos (por defecto 2^{-J-1})
        sigma1, sigma2: volatilidades constantes del simulador
    """

    J: int
    levels: Tuple[LevelParameters, ...]
    tau: float
    sigma1: float = 1.0
    sigma2: float = 1.0

    def __post_init__(self):
        if self.J < 1:
            raise DataError(f"J debe ser >= 1, se recibió {self.J}")
        if len(self.levels) != self.J + 1:
            raise DataError(f"se esperaban {self.J + 1} niveles, hay {len(self.levels)}")
        if [p.j for p in self.levels] != list(range(1, self.J + 2)):
            raise DataError("los niveles deben ser j = 1..J+1 en orden")
        if self.tau <= 0:
            raise DataError(f"tau debe ser positivo, se recibió {self.tau}")
        if self.sigma1 <= 0 or self.sigma2 <= 0:
            raise DataError("las volatilidades deben ser positivas")

    @classmethod
    def from_arrays(cls, J: int, R, theta_over_tau, tau: Optional[float] = None,
                    sigma1: float = 1.0, sigma2: float = 1.0) -> 'SpectralModel':
        """Construye el modelo a partir de listas (rellenando con ceros hasta J+1)"""
        tau = 2.0 ** (-J - 1) if tau is None else float(tau)
        R = list(R) + [0.0] * (J + 1 - len(R))
        theta_over_tau = list(theta_over_tau) + [0.0] * (J + 1 - len(theta_over_tau))
        levels = tuple(
            LevelParameters(j=i + 1, R=float(R[i]), theta=float(theta_over_tau[i]) * tau)
            for i in range(J + 1)
        )
        return cls(J=J, levels=levels, tau=tau, sigma1=sigma1, sigma2=sigma2)

    @property
    def R(self) -> np.ndarray:
        return np.array([p.R for p in self.levels])

    @property
    def theta(self) -> np.ndarray:
        return np.array([p.theta for p in self.levels])

    @property
    def theta_over_tau(self) -> np.ndarray:
        return self.theta / self.tau

    def level(self, j: int) -> LevelParameters:
        return self.levels[j - 1]

    def band(self, j: int) -> Tuple[float, float]:
        """Extremos (abierto, cerrado] de la mitad positiva de la banda del nivel j"""
        low = np.pi / (2.0 ** j * self.tau)
        return low, 2.0 * low

    def ensure_admissible(self) -> None:
        """Lanza DataError si algún |R_j| > 1 (condición ‖f‖_∞ ≤ 1)"""
        bad = [p.j for p in self.levels if abs(p.R) > 1.0]
        if bad:
            raise DataError(f"modelo no admisible: |R_j| > 1 en los niveles {bad} (se requiere ‖f‖_∞ ≤ 1)")


@dataclass(frozen=True)
class ObservationScheme:
    """Esquema de muestreo: reloj τ_J, n incrementos y probabilidades de ausencia"""

    tau: float
    n: int
    pi1: float = 0.0
    pi2: float = 0.0
    delta: Optional[float] = None

    def __post_init__(self):
        if self.n < 1:
            raise DataError(f"n debe ser >= 1, se recibió {self.n}")
        if self.tau <= 0:
            raise DataError(f"tau debe ser positivo, se recibió {self.tau}")
        for name, value in (('pi1', self.pi1), ('pi2', self.pi2)):
            if not 0.0 <= value < 1.0:
                raise DataError(f"{name} debe estar en [0, 1), se recibió {value}")


# ---------------------------------------------------------------------------
# Núcleos de Littlewood-Paley
# ---------------------------------------------------------------------------

def lp_scaling(s):
    """φ^LP(s) = sin(πs)/(πs), con φ^LP(0) = 1"""
    value = np.sinc(np.asarray(s, dtype=float))
    return value if value.ndim else float(value)


def lp_wavelet(s):
    """ψ^LP(s) = 2 φ^LP(2s) - φ^LP(s)"""
    s = np.asarray(s, dtype=float)
    value = 2.0 * np.sinc(2.0 * s) - np.sinc(s)
    return value if value.ndim else float(value)


def rho_level(model: SpectralModel, j: int, theta) -> np.ndarray:
    """
    Covarianza cruzada en tiempo continuo del nivel j:
    ρ_j(θ) = R_j ψ^LP((θ - θ_j) / (2^j τ)), con máximo |R_j| en θ = θ_j
    """
    p = model.level(j)
    return p.R * lp_wavelet((np.asarray(theta, dtype=float) - p.theta) / (2.0 ** j * model.tau))


def cross_spectral_density(model: SpectralModel, lam) -> np.ndarray:
    """
    f(λ) en frecuencia física (rad/segundo); 0 fuera de todas las bandas

    Args:
        model: modelo espectral
        lam: frecuencia(s)

    Returns:
        Valor(es) complejos de la densidad espectral cruzada
    """
    lam = np.asarray(lam, dtype=float)
    absolute = np.abs(lam)
    value = np.zeros(lam.shape, dtype=complex)
    for p in model.levels:
        low, high = model.band(p.j)
        inside = (absolute > low) & (absolute <= high)
        value = np.where(inside, p.R * np.exp(-1j * p.theta * lam), value)
    return value if value.ndim else complex(value)


# ---------------------------------------------------------------------------
# Covarianza cruzada de los incrementos
# ---------------------------------------------------------------------------

def _cos_over_square_antiderivative(c: np.ndarray, w: float) -> np.ndarray:
    """Primitiva de cos(cω)/ω² evaluada en ω = w > 0"""
    si, _ = sici(np.abs(c) * w)
    return -np.cos(c * w) / w - np.abs(c) * si


def _band_integral_exact(shift: np.ndarray, low: float, high: float) -> np.ndarray:
    """
    ∫_low^high D(ω) cos(ω s) dω en forma cerrada con integrales seno

    D(ω) cos(ωs) = (1/π)[cos(sω) - ½cos((s+1)ω) - ½cos((s-1)ω)] / ω²
    """
    def primitive(w: float) -> np.ndarray:
        return (_cos_over_square_antiderivative(shift, w)
                - 0.5 * _cos_over_square_antiderivative(shift + 1.0, w)
                - 0.5 * _cos_over_square_antiderivative(shift - 1.0, w)) / np.pi

    return primitive(high) - primitive(low)


def increment_cross_cov(model: SpectralModel, l, kernel: str = 'midpoint') -> np.ndarray:
    """
    Covarianza cruzada objetivo E[Δ_k B¹ Δ_{k+l} B²] (volatilidad unitaria)

    midpoint: τ Σ_i 2^{-i} R_i ψ^LP(2^{-i}(l - θ_i/τ)), la aproximación de
    punto medio de la doble integral temporal.
    exact: 2τ Σ_i R_i ∫_{π/2^i}^{π/2^{i-1}} D(ω) cos(ω(l - θ_i/τ)) dω.

    Args:
        model: modelo espectral
        l: rezago(s) en unidades de rejilla
        kernel: 'midpoint' o 'exact'

    Returns:
        Valor(es) de la covarianza cruzada
    """
    if kernel not in KERNELS:
        raise ValueError(f"núcleo desconocido: {kernel} (opciones: {', '.join(KERNELS)})")
    lags = np.asarray(l, dtype=float)
    total = np.zeros(lags.shape)
    for p in model.levels:
        if p.R == 0.0:
            continue
        shift = lags - p.theta / model.tau
        if kernel == 'midpoint':
            scale = 2.0 ** (-p.j)
            total = total + scale * p.R * lp_wavelet(scale * shift)
        else:
            low = np.pi / 2.0 ** p.j
            total = total + 2.0 * p.R * _band_integral_exact(shift, low, 2.0 * low)
    value = model.tau * total
    return value if value.ndim else float(value)


def kernel_envelope_maxlag(model: SpectralModel, tolerance: float, cap: int) -> int:
    """
    Menor rezago a partir del cual todos los términos del núcleo quedan por
    debajo de tolerance·τ, usando la cota |ψ^LP(s)| ≤ 3/(π|s|); acotado por cap
    """
    bound = 0.0
    for p in model.levels:
        if p.R == 0.0:
            continue
        reach = abs(p.theta / model.tau) + 3.0 * abs(p.R) / (np.pi * tolerance)
        bound = max(bound, reach)
    return int(min(cap, np.ceil(bound)))


# ---------------------------------------------------------------------------
# Carga y validación
# ---------------------------------------------------------------------------

def model_from_dict(data: Dict[str, Any]) -> Tuple[SpectralModel, ObservationScheme]:
    """
    Construye modelo y esquema desde el formato JSON
    {J, tau, levels:[{j, R, theta_over_tau | theta_seconds}], pi1, pi2, n}
    """
    try:
        J = int(data['J'])
        n = int(data['n'])
    except KeyError as e:
        raise DataError(f"falta el campo requerido {e} en el modelo")
    tau = float(data.get('tau', 2.0 ** (-J - 1)))

    R = [0.0] * (J + 1)
    theta = [0.0] * (J + 1)
    for entry in data.get('levels', []):
        j = int(entry['j'])
        if not 1 <= j <= J + 1:
            raise DataError(f"nivel fuera de rango en el modelo: j={j} (1..{J + 1})")
        R[j - 1] = float(entry.get('R', 0.0))
        if 'theta_seconds' in entry:
            theta[j - 1] = float(entry['theta_seconds'])
        else:
            theta[j - 1] = float(entry.get('theta_over_tau', 0.0)) * tau

    levels = tuple(LevelParameters(j=i + 1, R=R[i], theta=theta[i]) for i in range(J + 1))
    model = SpectralModel(
        J=J, levels=levels, tau=tau,
        sigma1=float(data.get('sigma1', 1.0)),
        sigma2=float(data.get('sigma2', 1.0)),
    )
    scheme = ObservationScheme(
        tau=tau, n=n,
        pi1=float(data.get('pi1', 0.0)),
        pi2=float(data.get('pi2', 0.0)),
        delta=float(data['delta_over_tau']) * tau if 'delta_over_tau' in data else None,
    )
    return model, scheme


def load_model(path: str) -> Tuple[SpectralModel, ObservationScheme]:
    """Lee un archivo JSON de modelo"""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except FileNotFoundError:
        raise DataError(f"no existe el archivo de modelo: {path}")
    except json.JSONDecodeError as e:
        raise DataError(f"JSON inválido en {path}: {e}")
    model, scheme = model_from_dict(data)
    logger.info(f"Modelo cargado desde {path}: J={model.J}, n={scheme.n}, tau={model.tau:g}")
    return model, scheme


def model_to_dict(model: SpectralModel, scheme: ObservationScheme) -> Dict[str, Any]:
    """Serializa modelo y esquema al formato JSON (θ en segundos), legible por model_from_dict"""
    data = {
        'J': model.J,
        'tau': model.tau,
        'n': scheme.n,
        'pi1': scheme.pi1,
        'pi2': scheme.pi2,
        'sigma1': model.sigma1,
        'sigma2': model.sigma2,
        'levels': [{'j': p.j, 'R': p.R, 'theta_seconds': p.theta} for p in model.levels],
    }
    if scheme.delta is not None:
        data['delta_over_tau'] = scheme.delta / scheme.tau
    return data


def check_model(model: SpectralModel, scheme: Optional[ObservationScheme] = None,
                delta: Optional[float] = None, scan_points: int = 4096) -> Dict[str, Any]:
    """
    Valida la admisibilidad del modelo

    Args:
        model: modelo espectral
        scheme: esquema de observación (opcional)
        delta: semiancho de la rejilla de búsqueda en segundos (opcional)
        scan_points: puntos por banda para el barrido de sup |f|

    Returns:
        Dict con 'valid', 'errors', 'warnings' y 'sup_abs_f'
    """
    errors: List[str] = []
    warnings: List[str] = []
    if delta is None and scheme is not None:
        delta = scheme.delta

    for p in model.levels:
        if abs(p.R) > 1.0:
            errors.append(
                f"nivel {p.j}: |R_j| = {abs(p.R):g} > 1 viola la admisibilidad ‖f‖_∞ ≤ 1"
            )
        if delta is not None and p.R != 0.0 and abs(p.theta) >= delta:
            errors.append(
                f"nivel {p.j}: |θ_j| = {abs(p.theta):g} s no es menor que δ = {delta:g} s"
            )

    if scheme is not None and not np.isclose(scheme.tau, model.tau):
        warnings.append(f"tau del esquema ({scheme.tau:g}) difiere del modelo ({model.tau:g})")
    if not np.isclose(model.tau, 2.0 ** (-model.J - 1)):
        warnings.append(f"tau = {model.tau:g} s no coincide con 2^(-J-1); se usa como reloj físico")

    # Barrido de |f| dentro de cada banda
    sup_abs = 0.0
    for p in model.levels:
        low, high = model.band(p.j)
        lam = np.linspace(low, high, scan_points + 1)[1:]
        sup_abs = max(sup_abs, float(np.max(np.abs(cross_spectral_density(model, lam)), initial=0.0)))
    if sup_abs > 1.0 + 1e-12:
        errors.append(f"sup |f| = {sup_abs:g} > 1")

    return {
        'valid': len(errors) == 0,
        'errors': errors,
        'warnings': warnings,
        'sup_abs_f': sup_abs,
    }
