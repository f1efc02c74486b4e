# -*- coding: utf-8 -*-
"""
Servicio de ingesta: datos tick a tick o trayectorias simuladas convertidos
en retornos sobre la rejilla t0 + kτ por interpolación del tick previo
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd

from config import Config
from errors import IngestError
from spectral.model import ObservationScheme

logger = logging.getLogger(__name__)


class PriceScale(str, Enum):
    RAW_PRICE = 'raw_price'
    LOG_PRICE = 'log_price'


@dataclass(frozen=True, eq=False)
class TickSeries:
    """Ticks con marcas de tiempo no decrecientes (segundos)"""

    timestamps: np.ndarray
    prices: np.ndarray
    scale: PriceScale = PriceScale.RAW_PRICE

    def __post_init__(self):
        if len(self.timestamps) != len(self.prices):
            raise IngestError(
                f"longitudes distintas: {len(self.timestamps)} marcas de tiempo, {len(self.prices)} precios"
            )
        if len(self.timestamps) == 0:
            raise IngestError("no hay ticks")
        if np.any(np.diff(self.timestamps) < 0):
            raise IngestError("las marcas de tiempo deben ser no decrecientes")
        if self.scale == PriceScale.RAW_PRICE and np.any(self.prices <= 0):
            raise IngestError("los precios deben ser positivos")

    def __len__(self) -> int:
        return len(self.timestamps)


@dataclass(frozen=True, eq=False)
class AlignedReturns:
    """
    Retornos pseudo-observados Δ^o_k X sobre la rejilla

    Attributes:
        t0: origen de la rejilla (segundos)
        tau: paso τ de la rejilla
        returns: n retornos
        observed: n+1 indicadores (observed[0] siempre True)
    """

    t0: float
    tau: float
    returns: np.ndarray
    observed: np.ndarray

    @property
    def n(self) -> int:
        return len(self.returns)


def align_to_grid(ticks: TickSeries, t0: float, tau: float, n: int) -> AlignedReturns:
    """
    Interpolación del tick previo sobre t_k = t0 + kτ, k = 0..n

    El valor en t_k es el último precio con marca de tiempo <= t_k (con
    empates gana el último tick); observed[k] indica al menos un tick en
    (t_{k-1}, t_k].

    Args:
        ticks: serie de ticks
        t0: origen de la rejilla
        tau: paso de la rejilla (segundos)
        n: número de retornos

    Returns:
        AlignedReturns con n retornos

    Raises:
        IngestError: si n <= 0, tau <= 0 o no hay ticks en o antes de t0
    """
    if n <= 0:
        raise IngestError(f"n debe ser positivo, se recibió {n}")
    if tau <= 0:
        raise IngestError(f"tau debe ser positivo, se recibió {tau}")
    grid = t0 + tau * np.arange(n + 1)
    last = np.searchsorted(ticks.timestamps, grid, side='right') - 1
    if last[0] < 0:
        raise IngestError(f"no hay ticks en o antes de t0={t0:g} (primer tick en {ticks.timestamps[0]:g})")

    values = np.asarray(ticks.prices, dtype=float)[last]
    if ticks.scale == PriceScale.RAW_PRICE:
        values = np.log(values)

    observed = np.ones(n + 1, dtype=bool)
    observed[1:] = np.diff(last) > 0
    return AlignedReturns(t0=float(t0), tau=float(tau), returns=np.diff(values), observed=observed)


def returns_from_sample(path, scheme: ObservationScheme) -> Tuple[AlignedReturns, AlignedReturns]:
    """
    Convierte una trayectoria simulada en retornos con tick previo

    Los incrementos se acumulan en niveles, sólo los puntos no ausentes se
    tratan como ticks y los retornos se re-derivan con align_to_grid.

    Raises:
        IngestError: si la longitud de la trayectoria no coincide con n
    """
    if path.n != scheme.n:
        raise IngestError(f"la trayectoria tiene n={path.n} pero el esquema n={scheme.n}")
    grid = scheme.tau * np.arange(scheme.n + 1)
    aligned = []
    for increments, mask in ((path.returns1, path.mask1), (path.returns2, path.mask2)):
        if len(mask) != scheme.n + 1:
            raise IngestError(f"la máscara tiene {len(mask)} valores, se esperaban {scheme.n + 1}")
        levels = np.concatenate(([0.0], np.cumsum(increments)))
        keep = ~np.asarray(mask, dtype=bool)
        ticks = TickSeries(timestamps=grid[keep], prices=levels[keep], scale=PriceScale.LOG_PRICE)
        aligned.append(align_to_grid(ticks, 0.0, scheme.tau, scheme.n))
    return aligned[0], aligned[1]


def read_csv(path: str, scale: Union[str, PriceScale] = PriceScale.RAW_PRICE) -> TickSeries:
    """
    Lee un CSV UTF-8 con cabecera timestamp,price

    Raises:
        IngestError: archivo vacío, columnas faltantes, marcas de tiempo
            vacías o decrecientes (indicando la primera fila de datos ofensiva,
            contando desde 1) o precios no positivos
    """
    scale = PriceScale(scale)
    try:
        frame = pd.read_csv(path, comment='#', encoding='utf-8')
    except FileNotFoundError:
        raise IngestError(f"no existe el archivo: {path}")
    except pd.errors.EmptyDataError:
        raise IngestError(f"{path}: no hay ticks")
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise IngestError(f"{path}: CSV inválido: {e}")

    missing = [c for c in ('timestamp', 'price') if c not in frame.columns]
    if missing:
        raise IngestError(f"{path}: faltan columnas {', '.join(missing)}")
    if frame.empty:
        raise IngestError(f"{path}: no hay ticks")

    try:
        timestamps = frame['timestamp'].to_numpy(dtype=float)
        prices = frame['price'].to_numpy(dtype=float)
    except ValueError as e:
        raise IngestError(f"{path}: valores no numéricos: {e}")

    for column, values in (('timestamp', timestamps), ('price', prices)):
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            raise IngestError(f"{path}: {column} vacío o no finito en la fila {int(bad[0]) + 1}")

    decreasing = np.flatnonzero(np.diff(timestamps) < 0)
    if decreasing.size:
        row = int(decreasing[0]) + 2
        raise IngestError(f"{path}: marca de tiempo decreciente en la fila {row}")
    if scale == PriceScale.RAW_PRICE:
        bad = np.flatnonzero(~(prices > 0))
        if bad.size:
            raise IngestError(f"{path}: precio no positivo en la fila {int(bad[0]) + 1}")

    logger.info(f"Leídos {len(timestamps)} ticks de {path}")
    return TickSeries(timestamps=timestamps, prices=prices, scale=scale)


def common_grid(ticks1: TickSeries, ticks2: TickSeries, tau: float,
                t0: Optional[float] = None, n: Optional[int] = None) -> Tuple[float, int]:
    """
    Origen y longitud de rejilla cubiertos por ambas series

    Por defecto t0 es el mayor de los primeros ticks y n el mayor número de
    pasos completos antes del menor de los últimos ticks.
    """
    if t0 is None:
        t0 = float(max(ticks1.timestamps[0], ticks2.timestamps[0]))
    if n is None:
        end = float(min(ticks1.timestamps[-1], ticks2.timestamps[-1]))
        n = int(np.floor((end - t0) / tau))
    if n <= 0:
        raise IngestError(f"las series no comparten ningún paso de rejilla (t0={t0:g}, tau={tau:g})")
    return t0, n


def write_aligned_csv(aligned: AlignedReturns, path: str) -> None:
    """Escribe k,return,observed (n+1 filas; return vacío en la última)"""
    frame = pd.DataFrame({
        'k': np.arange(aligned.n + 1),
        'return': np.append(aligned.returns, np.nan),
        'observed': aligned.observed.astype(int),
    })
    with open(path, 'w', encoding='utf-8', newline='') as f:
        f.write(f"# schema_version: {Config.SCHEMA_VERSION}\n")
        f.write(f"# t0: {aligned.t0!r}\n# tau: {aligned.tau!r}\n")
        frame.to_csv(f, index=False, na_rep='', float_format='%.17g', lineterminator='\n')
    logger.info(f"Retornos alineados escritos en {path} (n={aligned.n})")
