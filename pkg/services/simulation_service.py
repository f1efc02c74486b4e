# -*- coding: utf-8 -*-
"""
Servicio de simulación de trayectorias bivariadas por embebido circulante
multivariado, más las máscaras de ausencia de Bernoulli
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np
import pandas as pd
from scipy import fft

from config import Config
from errors import DataError, EmbeddingError
from spectral.model import (
    SpectralModel, ObservationScheme, increment_cross_cov, kernel_envelope_maxlag, KERNELS,
)

logger = logging.getLogger(__name__)

GAUSSIAN_STREAM = 0
MASK_STREAMS = (1, 2)
PATH_COLUMNS = ['k', 'r1', 'r2', 'miss1', 'miss2']


def make_rng(seed: int, stream: int) -> np.random.Generator:
    """Generador Philox independiente para el flujo (seed, stream)"""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream)])))


@dataclass(frozen=True, eq=False)
class PathSample:
    """Incrementos simulados de las dos series y sus máscaras (True = ausente)"""

    returns1: np.ndarray
    returns2: np.ndarray
    mask1: np.ndarray
    mask2: np.ndarray
    seed: int

    def __post_init__(self):
        n = len(self.returns1)
        if len(self.returns2) != n:
            raise DataError(f"longitudes distintas: r1={n}, r2={len(self.returns2)}")
        for name, mask in (('miss1', self.mask1), ('miss2', self.mask2)):
            if len(mask) != n + 1:
                raise DataError(f"{name} debe tener n+1={n + 1} valores, tiene {len(mask)}")
            if mask[0]:
                raise DataError(f"{name}: el valor inicial siempre se observa")

    @property
    def n(self) -> int:
        return len(self.returns1)


class CovarianceTables(NamedTuple):
    """Autocovarianzas y covarianza cruzada sobre los rezagos -maxlag..maxlag"""

    lags: np.ndarray
    auto1: np.ndarray
    auto2: np.ndarray
    cross: np.ndarray

    @property
    def maxlag(self) -> int:
        return int(self.lags[-1])

    def at(self, l: int) -> float:
        """cross[l] con cero fuera de la tabla"""
        if abs(l) > self.maxlag:
            return 0.0
        return float(self.cross[l + self.maxlag])


def default_maxlag(model: SpectralModel, scheme: ObservationScheme) -> int:
    """Truncamiento del núcleo por la envolvente de ψ^LP, acotado por n-1"""
    bound = kernel_envelope_maxlag(model, Config.KERNEL_TOLERANCE, Config.MAXLAG_CAP)
    return max(0, min(bound, scheme.n - 1))


def target_covariance_tables(model: SpectralModel, scheme: ObservationScheme,
                             maxlag: Optional[int] = None, kernel: str = 'midpoint') -> CovarianceTables:
    """
    Tablas objetivo de covarianza de los incrementos (volatilidad unitaria)

    Args:
        model: modelo espectral
        scheme: esquema de observación
        maxlag: truncamiento del núcleo (por defecto default_maxlag)
        kernel: 'midpoint' o 'exact'

    Returns:
        CovarianceTables con auto_ν[l] = τ·1{l=0} y cross[l] del modelo

    Raises:
        DataError: si maxlag >= n
    """
    if maxlag is None:
        maxlag = default_maxlag(model, scheme)
    if maxlag < 0:
        raise DataError(f"maxlag debe ser >= 0, se recibió {maxlag}")
    if maxlag >= scheme.n:
        raise DataError(f"maxlag={maxlag} debe ser menor que n={scheme.n}")
    lags = np.arange(-maxlag, maxlag + 1)
    auto = np.where(lags == 0, model.tau, 0.0)
    cross = np.asarray(increment_cross_cov(model, lags, kernel=kernel), dtype=float)
    return CovarianceTables(lags=lags, auto1=auto.copy(), auto2=auto.copy(), cross=cross)


def _circulant_length(n: int, maxlag: int) -> int:
    target = 2 * (n + maxlag)
    return 1 << int(np.ceil(np.log2(max(target, 2))))


class CirculantSimulator:
    """
    Simulador de incrementos gaussianos bivariados estacionarios

    Precalcula una sola vez los factores 2×2 por frecuencia del embebido
    circulante; cada llamada a sample(seed) sólo genera ruido y aplica dos FFT.
    """

    def __init__(self, model: SpectralModel, scheme: ObservationScheme,
                 maxlag: Optional[int] = None, kernel: str = 'midpoint'):
        if kernel not in KERNELS:
            raise DataError(f"núcleo desconocido: {kernel}")
        model.ensure_admissible()
        self.model = model
        self.scheme = scheme
        self.kernel = kernel
        self.tables = target_covariance_tables(model, scheme, maxlag, kernel)
        self.maxlag = self.tables.maxlag
        self.M = _circulant_length(scheme.n, self.maxlag)
        self.min_eigenvalue = 0.0
        self.clipped = 0
        self._factors = self._factorize()
        logger.info(
            f"Simulador construido: n={scheme.n}, maxlag={self.maxlag}, M={self.M}, "
            f"núcleo={kernel}, autovalor mínimo={self.min_eigenvalue:.3e}"
        )

    def _block_column(self) -> np.ndarray:
        """Primera columna de bloques c(m), m = 0..M-1, con C(-l) = C(l)^T"""
        c = np.zeros((self.M, 2, 2))
        t = self.tables
        for idx, l in enumerate(t.lags):
            m = l % self.M
            c[m, 0, 0] = t.auto1[idx]
            c[m, 1, 1] = t.auto2[idx]
            c[m, 0, 1] = t.cross[idx]
            # C(l)[1,0] = E[Δ²_k Δ¹_{k+l}] = cross[-l]
            c[m, 1, 0] = t.cross[len(t.lags) - 1 - idx]
        return c

    def _factorize(self) -> np.ndarray:
        spectrum = fft.fft(self._block_column(), axis=0)
        spectrum = 0.5 * (spectrum + np.conj(np.swapaxes(spectrum, 1, 2)))
        eigenvalues, vectors = np.linalg.eigh(spectrum)

        self.min_eigenvalue = float(eigenvalues.min())
        tolerance = Config.CLIP_TOLERANCE * self.model.tau
        if self.min_eigenvalue < -tolerance:
            raise EmbeddingError(
                f"embebido circulante inválido: autovalor {self.min_eigenvalue:.3e} < "
                f"-{tolerance:.3e} (M={self.M}, maxlag={self.maxlag})"
            )
        negative = eigenvalues < 0
        self.clipped = int(negative.sum())
        if self.clipped:
            logger.warning(
                f"Se recortaron {self.clipped} autovalores negativos a 0 "
                f"(magnitud máxima {-self.min_eigenvalue:.3e})"
            )
            eigenvalues = np.where(negative, 0.0, eigenvalues)
        return vectors * np.sqrt(eigenvalues)[:, None, :]

    def sample_increments(self, seed: int) -> Tuple[np.ndarray, np.ndarray]:
        """Incrementos (Δ¹, Δ²) de longitud n, escalados por las volatilidades"""
        rng = make_rng(seed, GAUSSIAN_STREAM)
        noise = rng.standard_normal((self.M, 2)) + 1j * rng.standard_normal((self.M, 2))
        field = fft.fft(np.einsum('mij,mj->mi', self._factors, noise), axis=0) / np.sqrt(self.M)
        n = self.scheme.n
        r1 = np.ascontiguousarray(field[:n, 0].real) * self.model.sigma1
        r2 = np.ascontiguousarray(field[:n, 1].real) * self.model.sigma2
        return r1, r2

    def sample(self, seed: int) -> PathSample:
        """Trayectoria completa con máscaras para la semilla dada"""
        r1, r2 = self.sample_increments(seed)
        mask1, mask2 = apply_missing(self.scheme, seed)
        return PathSample(returns1=r1, returns2=r2, mask1=mask1, mask2=mask2, seed=int(seed))


def apply_missing(scheme: ObservationScheme, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Máscaras de ausencia Bernoulli(π_ν) independientes para k = 1..n

    Returns:
        (mask1, mask2) de longitud n+1 con mask[0] = False
    """
    masks = []
    for stream, pi in zip(MASK_STREAMS, (scheme.pi1, scheme.pi2)):
        mask = np.zeros(scheme.n + 1, dtype=bool)
        if pi > 0:
            mask[1:] = make_rng(seed, stream).random(scheme.n) < pi
        masks.append(mask)
    return masks[0], masks[1]


def circulant_embed_sample(model: SpectralModel, scheme: ObservationScheme, seed: int,
                           maxlag: Optional[int] = None, kernel: str = 'midpoint') -> PathSample:
    """Atajo funcional: construye el simulador y genera una trayectoria"""
    return CirculantSimulator(model, scheme, maxlag=maxlag, kernel=kernel).sample(seed)


def write_path_csv(path: PathSample, filename: str) -> None:
    """
    Escribe k,r1,r2,miss1,miss2 con n+1 filas (r1 y r2 vacíos en la última)
    """
    n = path.n
    frame = pd.DataFrame({
        'k': np.arange(n + 1),
        'r1': np.append(path.returns1, np.nan),
        'r2': np.append(path.returns2, np.nan),
        'miss1': path.mask1.astype(int),
        'miss2': path.mask2.astype(int),
    })
    with open(filename, 'w', encoding='utf-8', newline='') as f:
        f.write(f"# schema_version: {Config.SCHEMA_VERSION}\n")
        f.write(f"# seed: {path.seed}\n")
        frame.to_csv(f, index=False, na_rep='', float_format='%.17g', lineterminator='\n')
    logger.info(f"Trayectoria escrita en {filename} (n={n})")


def path_length(filename: str) -> int:
    """
    Número de retornos n de una trayectoria sin leer sus valores

    Cuenta las filas de datos (n+1) tras la cabecera, ignorando comentarios
    y líneas vacías.
    """
    try:
        with open(filename, 'r', encoding='utf-8') as f:
            rows = sum(1 for line in f if line.strip() and not line.startswith('#'))
    except (OSError, UnicodeDecodeError) as e:
        raise DataError(f"no se puede leer la trayectoria {filename}: {e}")
    return max(rows - 2, 0)


def read_path_csv(filename: str) -> PathSample:
    """Lee una trayectoria escrita por write_path_csv"""
    seed = 0
    try:
        with open(filename, 'r', encoding='utf-8') as f:
            for line in f:
                if not line.startswith('#'):
                    break
                if line.startswith('# seed:'):
                    seed = int(line.split(':', 1)[1])
        frame = pd.read_csv(filename, comment='#')
    except FileNotFoundError:
        raise DataError(f"no existe el archivo de trayectoria: {filename}")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, ValueError) as e:
        raise DataError(f"CSV de trayectoria inválido {filename}: {e}")

    missing = [c for c in PATH_COLUMNS if c not in frame.columns]
    if missing:
        raise DataError(f"faltan columnas en {filename}: {', '.join(missing)}")
    if len(frame) < 2:
        raise DataError(f"la trayectoria {filename} necesita al menos 2 filas")

    r1 = frame['r1'].to_numpy(dtype=float)[:-1]
    r2 = frame['r2'].to_numpy(dtype=float)[:-1]
    if not (np.all(np.isfinite(r1)) and np.all(np.isfinite(r2))):
        raise DataError(f"retornos no finitos en {filename}")
    return PathSample(
        returns1=r1,
        returns2=r2,
        mask1=frame['miss1'].to_numpy(dtype=int).astype(bool),
        mask2=frame['miss2'].to_numpy(dtype=int).astype(bool),
        seed=seed,
    )
