# -*- coding: utf-8 -*-
"""
Manejadores de los subcomandos de LEADLAG WAVELET
"""

import json
import logging
import os
import sys
import tempfile
from contextlib import contextmanager
from typing import Callable, Dict, Iterator

import numpy as np

from config import Config
from errors import LeadLagError, DataError, NumericError, EmbeddingError
from services.estimation_service import LagGrid, estimate_all_levels, hry_curve, estimate_lag, report_to_dict
from services.ingest_service import (
    align_to_grid, common_grid, read_csv, returns_from_sample, write_aligned_csv,
)
from services.montecarlo_service import load_mc_config, run_mc, write_summary_csv
from services.simulation_service import CirculantSimulator, read_path_csv, write_path_csv
from spectral.model import ObservationScheme, check_model, load_model, model_to_dict
from wavelets.filters import gain_table
from .validators import RunConfig

logger = logging.getLogger(__name__)


@contextmanager
def atomic_output(path: str) -> Iterator[str]:
    """
    Entrega una ruta temporal en el mismo directorio y la renombra a path
    sólo si el bloque termina sin error
    """
    directory = os.path.dirname(os.path.abspath(path))
    fd, temporary = tempfile.mkstemp(prefix='.tmp-', suffix=os.path.basename(path), dir=directory)
    os.close(fd)
    try:
        yield temporary
        os.replace(temporary, path)
    except BaseException:
        if os.path.exists(temporary):
            os.remove(temporary)
        raise


def _write_json(data, path: str) -> None:
    with atomic_output(path) as temporary:
        with open(temporary, 'w', encoding='utf-8') as f:
            json.dump(data, f, ensure_ascii=False, indent=2)
            f.write('\n')


def handle_simulate(config: RunConfig) -> int:
    """Simula una trayectoria y la escribe en CSV"""
    model, scheme = load_model(config.model)
    simulator = CirculantSimulator(model, scheme, maxlag=config.embed_maxlag, kernel=config.kernel)
    path = simulator.sample(config.seed)
    with atomic_output(config.out) as temporary:
        write_path_csv(path, temporary)
    logger.info(f"Simulación terminada: seed={config.seed}, n={path.n}, salida={config.out}")
    return 0


def _load_returns(config: RunConfig):
    if config.path is not None:
        sample = read_path_csv(config.path)
        scheme = ObservationScheme(tau=config.tau, n=sample.n)
        return returns_from_sample(sample, scheme)

    ticks1 = read_csv(config.in1, config.scale)
    ticks2 = read_csv(config.in2, config.scale)
    t0, n = common_grid(ticks1, ticks2, config.tau, t0=config.t0, n=config.n)
    logger.info(f"Rejilla común: t0={t0:g} s, tau={config.tau:g} s, n={n}")
    return align_to_grid(ticks1, t0, config.tau, n), align_to_grid(ticks2, t0, config.tau, n)


def handle_estimate(config: RunConfig) -> int:
    """Estima los rezagos por nivel y escribe el informe JSON"""
    ret1, ret2 = _load_returns(config)
    if config.aligned_out:
        for index, aligned in enumerate((ret1, ret2), start=1):
            target = f"{config.aligned_out}_{index}.csv"
            with atomic_output(target) as temporary:
                write_aligned_csv(aligned, temporary)

    if config.delta is not None:
        grid = LagGrid.from_delta(config.delta, config.tau)
    else:
        grid = LagGrid.from_max_lag(config.maxlag)
    reports = estimate_all_levels(ret1, ret2, config.families, config.levels, grid, config.tau)

    hry = None
    if config.hry:
        curve = hry_curve(ret1, ret2, grid)
        hry = (curve, estimate_lag(curve, config.tau))

    metadata = {
        'n': ret1.n,
        't0': ret1.t0,
        'l_max': grid.l_max,
        'observed_fraction': [float(np.mean(ret1.observed)), float(np.mean(ret2.observed))],
    }
    _write_json(report_to_dict(reports, hry, config.tau, metadata), config.out)
    for family, report in reports.items():
        logger.info(f"{family.label}: rezagos por nivel {report.lags()}")
    return 0


def handle_gain(config: RunConfig) -> int:
    """Tabla de ganancia teórica frente a empírica"""
    family = config.families[0]
    table = gain_table(family, config.level, config.points)
    error = float(np.max(np.abs(table['H_jL'] - table['empirical_gain'])))
    header = f"# schema_version: {Config.SCHEMA_VERSION}\n# max_abs_error: {error:.3e}\n"
    if config.out:
        with atomic_output(config.out) as temporary:
            with open(temporary, 'w', encoding='utf-8', newline='') as f:
                f.write(header)
                table.to_csv(f, index=False, float_format='%.17g', lineterminator='\n')
    else:
        sys.stdout.write(header)
        table.to_csv(sys.stdout, index=False, float_format='%.17g', lineterminator='\n')
    logger.info(f"Ganancia {family.label} nivel {config.level}: error máximo {error:.3e}")
    return 0


def handle_mc(config: RunConfig) -> int:
    """Ejecuta el experimento Monte Carlo y escribe la tabla de medianas y MAD"""
    experiment = load_mc_config(config.config, replications=config.reps, master_seed=config.seed,
                                pi1=config.pi1, pi2=config.pi2)
    store = Config.DATABASE_URL if config.store == 'default' else config.store
    summary = run_mc(experiment, threads=Config.threads(config.threads), store_url=store)
    with atomic_output(config.out) as temporary:
        write_summary_csv(summary, experiment.families, temporary)
    if not summary.valid:
        raise NumericError(
            f"{summary.failures} de {summary.replications} réplicas fallaron; "
            f"el resumen en {config.out} se marcó como inválido"
        )
    return 0


def handle_model_check(config: RunConfig) -> int:
    """Valida el modelo y el embebido circulante"""
    model, scheme = load_model(config.model)
    result = check_model(model, scheme)
    report = {
        'schema_version': Config.SCHEMA_VERSION,
        'valid': result['valid'],
        'errors': result['errors'],
        'warnings': result['warnings'],
        'sup_abs_f': result['sup_abs_f'],
        'model': model_to_dict(model, scheme),
    }
    for warning in result['warnings']:
        logger.warning(warning)

    if result['valid']:
        try:
            simulator = CirculantSimulator(model, scheme, maxlag=config.embed_maxlag, kernel=config.kernel)
            report['embedding'] = {
                'valid': True,
                'M': simulator.M,
                'maxlag': simulator.maxlag,
                'min_eigenvalue': simulator.min_eigenvalue,
                'clipped': simulator.clipped,
            }
        except EmbeddingError as e:
            report['embedding'] = {'valid': False, 'error': str(e)}

    if config.out:
        _write_json(report, config.out)
    else:
        print(json.dumps(report, ensure_ascii=False, indent=2))

    if not result['valid']:
        raise DataError('; '.join(result['errors']))
    if not report['embedding']['valid']:
        raise EmbeddingError(report['embedding']['error'])
    return 0


HANDLERS: Dict[str, Callable[[RunConfig], int]] = {
    'simulate': handle_simulate,
    'estimate': handle_estimate,
    'gain': handle_gain,
    'mc': handle_mc,
    'model-check': handle_model_check,
}


def run(config: RunConfig) -> int:
    """
    Despacha el subcomando y traduce los errores a códigos de salida

    Returns:
        0 si todo terminó bien; 1 uso, 2 datos, 3 numérico
    """
    try:
        return HANDLERS[config.command](config)
    except LeadLagError as e:
        logger.error(f"Error en '{config.command}': {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except np.linalg.LinAlgError as e:
        logger.error(f"Error numérico en '{config.command}': {e}")
        print(f"error: {e}", file=sys.stderr)
        return NumericError.exit_code
