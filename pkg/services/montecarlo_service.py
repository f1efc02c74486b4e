# -*- coding: utf-8 -*-
"""
Servicio Monte Carlo: réplicas simulación → ingesta → estimación y resumen
por mediana y desviación absoluta mediana (MAD)
"""

import json
import logging
import os
import uuid
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, Any, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config import Config
from errors import DataError
from spectral.model import SpectralModel, ObservationScheme, load_model, model_from_dict
from wavelets.filters import WaveletFamily
from .estimation_service import LagGrid, estimate_all_levels, hry_lag, max_feasible_level
from .ingest_service import returns_from_sample
from .simulation_service import CirculantSimulator

logger = logging.getLogger(__name__)

HRY = 'hry'


@dataclass(frozen=True)
class MCConfig:
    """Diseño del experimento Monte Carlo"""

    model: SpectralModel
    scheme: ObservationScheme
    families: Tuple[WaveletFamily, ...]
    j_max: int
    l_max: int
    replications: int
    master_seed: int
    kernel: str = 'midpoint'
    maxlag: Optional[int] = None

    def validate(self) -> Dict[str, Any]:
        """
        Valida la configuración

        Returns:
            Dict con 'valid', 'errors' y 'warnings'
        """
        errors = []
        warnings = []
        if self.replications < 1:
            errors.append(f"se requiere al menos 1 réplica, se recibió {self.replications}")
        if self.j_max < 1:
            errors.append(f"j_max debe ser >= 1, se recibió {self.j_max}")
        if not self.families:
            errors.append("no se indicó ninguna familia de ondícula")
        grid = LagGrid.from_max_lag(self.l_max)
        for family in self.families:
            feasible = max_feasible_level(self.scheme.n, family, grid)
            if self.j_max > feasible:
                errors.append(
                    f"{family.label}: j_max={self.j_max} no factible con n={self.scheme.n}; "
                    f"nivel máximo factible: {feasible}"
                )
        if self.l_max >= self.scheme.n:
            errors.append(f"rezago máximo {self.l_max} debe ser menor que n={self.scheme.n}")
        if self.replications < 200:
            warnings.append(f"{self.replications} réplicas: por debajo de la escala de referencia (200)")
        return {'valid': len(errors) == 0, 'errors': errors, 'warnings': warnings}


@dataclass
class ReplicationResult:
    """Rezagos de una réplica por estimador ('hry' o familia), o su error"""

    index: int
    lags: Dict[str, List[int]] = field(default_factory=dict)
    error: Optional[str] = None


@dataclass
class MCSummary:
    """Mediana y MAD de θ̂_j/τ por (estimador, nivel)"""

    medians: Dict[Tuple[str, int], int]
    mads: Dict[Tuple[str, int], int]
    replications: int
    failures: int
    valid: bool
    estimators: List[str]
    j_max: int


def replication_seed(master_seed: int, index: int) -> int:
    """Semilla de 64 bits derivada de (master_seed, índice de réplica)"""
    state = np.random.SeedSequence([int(master_seed), int(index)]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def lower_median(values: Sequence[int]) -> int:
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def run_replication(config: MCConfig, simulator: CirculantSimulator, index: int) -> ReplicationResult:
    """
    Una réplica completa; cualquier excepción queda registrada en el resultado
    """
    try:
        path = simulator.sample(replication_seed(config.master_seed, index))
        ret1, ret2 = returns_from_sample(path, config.scheme)
        grid = LagGrid.from_max_lag(config.l_max)
        tau = config.scheme.tau
        result = ReplicationResult(index=index)
        result.lags[HRY] = [hry_lag(ret1, ret2, grid, tau).lag]
        reports = estimate_all_levels(ret1, ret2, config.families, config.j_max, grid, tau)
        for family, report in reports.items():
            result.lags[family.value] = report.lags()
        return result

    except Exception as e:
        logger.warning(f"Réplica {index} fallida: {e}")
        return ReplicationResult(index=index, error=f"{type(e).__name__}: {e}")


# Estado por proceso de trabajo: el simulador se construye una sola vez
_worker_state: Dict[str, Any] = {}


def _init_worker(config: MCConfig) -> None:
    _worker_state['config'] = config
    _worker_state['simulator'] = CirculantSimulator(
        config.model, config.scheme, maxlag=config.maxlag, kernel=config.kernel
    )


def _run_in_worker(index: int) -> ReplicationResult:
    return run_replication(_worker_state['config'], _worker_state['simulator'], index)


def summarize(results: Sequence[ReplicationResult], failure_limit: Optional[float] = None) -> MCSummary:
    """
    Mediana inferior y MAD por (estimador, nivel) sobre las réplicas exitosas

    Raises:
        DataError: si no hay réplicas o ninguna terminó correctamente
    """
    if not results:
        raise DataError("no hay réplicas para resumir")
    failure_limit = Config.FAILURE_LIMIT if failure_limit is None else failure_limit

    succeeded = [r for r in results if r.error is None]
    failures = len(results) - len(succeeded)
    if not succeeded:
        raise DataError(f"las {len(results)} réplicas fallaron")

    estimators = list(succeeded[0].lags)
    medians: Dict[Tuple[str, int], int] = {}
    mads: Dict[Tuple[str, int], int] = {}
    j_max = 0
    for estimator in estimators:
        levels = len(succeeded[0].lags[estimator])
        if estimator != HRY:
            j_max = max(j_max, levels)
        for position in range(levels):
            level = 0 if estimator == HRY else position + 1
            values = [r.lags[estimator][position] for r in succeeded]
            median = lower_median(values)
            medians[(estimator, level)] = median
            mads[(estimator, level)] = lower_median([abs(v - median) for v in values])

    valid = failures <= failure_limit * len(results)
    if not valid:
        logger.warning(
            f"Resumen inválido: {failures} de {len(results)} réplicas fallaron "
            f"(límite {failure_limit:.0%})"
        )
    return MCSummary(
        medians=medians, mads=mads, replications=len(results), failures=failures,
        valid=valid, estimators=estimators, j_max=j_max,
    )


class MonteCarloService:
    """Servicio para ejecutar experimentos Monte Carlo reproducibles"""

    def __init__(self, config: MCConfig, threads: int = 1, store_url: Optional[str] = None):
        self.config = config
        self.threads = max(1, int(threads))
        self.store_url = store_url
        self.run_id = uuid.uuid4().hex

    def run_replications(self) -> List[ReplicationResult]:
        """
        Ejecuta las réplicas en serie o en un pool de procesos

        Returns:
            Resultados ordenados por índice de réplica
        """
        config = self.config
        indices = range(config.replications)
        if self.threads == 1 or config.replications == 1:
            simulator = CirculantSimulator(config.model, config.scheme, maxlag=config.maxlag, kernel=config.kernel)
            results = [run_replication(config, simulator, i) for i in indices]
        else:
            workers = min(self.threads, config.replications)
            chunksize = max(1, config.replications // (4 * workers))
            with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(config,)) as pool:
                results = list(pool.map(_run_in_worker, indices, chunksize=chunksize))
        results.sort(key=lambda r: r.index)
        logger.info(
            f"Terminadas {len(results)} réplicas con {self.threads} proceso(s); "
            f"fallidas: {sum(r.error is not None for r in results)}"
        )
        return results

    def run(self) -> MCSummary:
        """Valida, ejecuta, guarda (si hay almacén) y resume"""
        validation = self.config.validate()
        for warning in validation['warnings']:
            logger.warning(warning)
        if not validation['valid']:
            raise DataError('; '.join(validation['errors']))

        results = self.run_replications()
        if self.store_url:
            self._store(results)
        return summarize(results)

    def _store(self, results: List[ReplicationResult]) -> None:
        from database.models import get_engine, create_tables, save_replications

        engine = get_engine(self.store_url)
        create_tables(engine)
        outcome = save_replications(engine, self.run_id, results)
        if not outcome['success']:
            logger.error(f"No se pudieron guardar las réplicas: {outcome['error']}")


def run_mc(config: MCConfig, threads: int = 1, store_url: Optional[str] = None) -> MCSummary:
    """Atajo funcional sobre MonteCarloService"""
    return MonteCarloService(config, threads=threads, store_url=store_url).run()


def summarize_stored_run(store_url: str, run_id: str) -> MCSummary:
    """Recalcula el resumen de una corrida guardada"""
    from database.models import get_engine, load_run_estimates

    rows = load_run_estimates(get_engine(store_url), run_id)
    if not rows:
        raise DataError(f"no hay réplicas guardadas para la corrida {run_id}")
    return summarize([ReplicationResult(**row) for row in rows])


def load_mc_config(path: str, replications: Optional[int] = None, master_seed: Optional[int] = None,
                   pi1: Optional[float] = None, pi2: Optional[float] = None) -> MCConfig:
    """
    Lee un experimento JSON:
    {model: ruta | {...}, families, j_max, l_max, replications, master_seed, kernel}

    La ruta del modelo es relativa al archivo del experimento.
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except FileNotFoundError:
        raise DataError(f"no existe el archivo de experimento: {path}")
    except json.JSONDecodeError as e:
        raise DataError(f"JSON inválido en {path}: {e}")

    source = data.get('model')
    if isinstance(source, str):
        model, scheme = load_model(os.path.join(os.path.dirname(os.path.abspath(path)), source))
    elif isinstance(source, dict):
        model, scheme = model_from_dict(source)
    else:
        raise DataError(f"{path}: falta el campo 'model'")

    overrides = {
        'pi1': data.get('pi1') if pi1 is None else pi1,
        'pi2': data.get('pi2') if pi2 is None else pi2,
    }
    overrides = {k: float(v) for k, v in overrides.items() if v is not None}
    if overrides:
        scheme = replace(scheme, **overrides)

    try:
        families = tuple(WaveletFamily.parse(f) for f in data.get('families', ['haar', 'la8', 'la20']))
    except ValueError as e:
        raise DataError(f"{path}: {e}")

    return MCConfig(
        model=model,
        scheme=scheme,
        families=families,
        j_max=int(data.get('j_max', 8)),
        l_max=int(data.get('l_max', 60)),
        replications=int(replications if replications is not None else data.get('replications', Config.DEFAULT_REPS)),
        master_seed=int(master_seed if master_seed is not None else data.get('master_seed', 0)),
        kernel=data.get('kernel', 'midpoint'),
        maxlag=data.get('maxlag'),
    )


def summary_to_frame(summary: MCSummary, families: Sequence[WaveletFamily]) -> pd.DataFrame:
    """
    Disposición de la tabla de resultados: filas 'HRY median', 'HRY mad' y
    '<familia> median/mad', columnas j1..j_max; el HRY ocupa sólo j1
    """
    columns = [f"j{j}" for j in range(1, summary.j_max + 1)]
    rows = {}
    if (HRY, 0) in summary.medians:
        rows['HRY median'] = [summary.medians[(HRY, 0)]] + [None] * (len(columns) - 1)
        rows['HRY mad'] = [summary.mads[(HRY, 0)]] + [None] * (len(columns) - 1)
    for family in families:
        key = family.value
        rows[f"{family.label} median"] = [summary.medians.get((key, j)) for j in range(1, summary.j_max + 1)]
        rows[f"{family.label} mad"] = [summary.mads.get((key, j)) for j in range(1, summary.j_max + 1)]
    frame = pd.DataFrame.from_dict(rows, orient='index', columns=columns).astype('Int64')
    frame.index.name = 'row'
    return frame


def write_summary_csv(summary: MCSummary, families: Sequence[WaveletFamily], path: str) -> None:
    """Escribe la tabla con la cabecera de versión y los conteos de réplicas"""
    frame = summary_to_frame(summary, families)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        f.write(f"# schema_version: {Config.SCHEMA_VERSION}\n")
        f.write(f"# replications: {summary.replications}\n")
        f.write(f"# failures: {summary.failures}\n")
        f.write(f"# valid: {str(summary.valid).lower()}\n")
        frame.to_csv(f, lineterminator='\n')
    logger.info(f"Resumen Monte Carlo escrito en {path}")
