# -*- coding: utf-8 -*-
"""
Validadores de la línea de comandos para LEADLAG WAVELET
Construye el parser de argumentos y valida cada subcomando antes de trabajar
"""

import argparse
import os
from dataclasses import dataclass, field
from typing import Dict, Any, List, Optional, Sequence

from config import Config
from errors import UsageError
from wavelets.filters import WaveletFamily
from spectral.model import KERNELS

COMMANDS = ('simulate', 'estimate', 'gain', 'mc', 'model-check')


class ArgumentParser(argparse.ArgumentParser):
    """Parser que convierte los errores de uso en UsageError"""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    """Configuración validada de una ejecución"""

    command: str
    model: Optional[str] = None
    config: Optional[str] = None
    out: Optional[str] = None
    seed: int = 0
    families: List[WaveletFamily] = field(default_factory=list)
    levels: int = 8
    level: int = 1
    points: int = 1024
    maxlag: int = 60
    delta: Optional[float] = None
    tau: float = 1.0
    reps: Optional[int] = None
    threads: Optional[int] = None
    in1: Optional[str] = None
    in2: Optional[str] = None
    path: Optional[str] = None
    t0: Optional[float] = None
    n: Optional[int] = None
    scale: str = 'raw_price'
    aligned_out: Optional[str] = None
    pi1: Optional[float] = None
    pi2: Optional[float] = None
    store: Optional[str] = None
    kernel: str = 'midpoint'
    embed_maxlag: Optional[int] = None
    hry: bool = True


def _families(value: str) -> List[WaveletFamily]:
    try:
        return [WaveletFamily.parse(v) for v in value.split(',') if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def build_parser() -> ArgumentParser:
    """
    Parser con un subcomando por operación; la ayuda indica las unidades
    """
    parser = ArgumentParser(prog='leadlag', description=Config.APP_DESCRIPTION)
    parser.add_argument('--version', action='version', version=f"{Config.APP_NAME} {Config.APP_VERSION}")
    sub = parser.add_subparsers(dest='command', required=True, metavar='{' + ','.join(COMMANDS) + '}')

    simulate = sub.add_parser('simulate', help='simula una trayectoria bivariada con embebido circulante')
    simulate.add_argument('--model', required=True, help='modelo JSON (θ en segundos o en unidades de rejilla)')
    simulate.add_argument('--seed', type=int, default=0, help='semilla entera de 64 bits')
    simulate.add_argument('--out', required=True, help='CSV de salida k,r1,r2,miss1,miss2')
    simulate.add_argument('--kernel', choices=KERNELS, default='midpoint', help='núcleo de covarianza objetivo')
    simulate.add_argument('--embed-maxlag', type=int, help='truncamiento del núcleo en unidades de rejilla')

    estimate = sub.add_parser('estimate', help='estima los rezagos escala por escala')
    estimate.add_argument('--in1', help='CSV timestamp,price de la serie 1 (segundos)')
    estimate.add_argument('--in2', help='CSV timestamp,price de la serie 2 (segundos)')
    estimate.add_argument('--path', help='trayectoria simulada (formato de simulate)')
    estimate.add_argument('--family', type=_families, default=[WaveletFamily.LA20],
                          help='familias separadas por comas: haar, la8, la20')
    estimate.add_argument('--levels', type=int, default=8, help='nivel máximo j')
    estimate.add_argument('--maxlag', type=int, default=60, help='semiancho de la rejilla en unidades de rejilla')
    estimate.add_argument('--delta', type=float, help='semiancho de la rejilla en segundos (|lτ| < δ)')
    estimate.add_argument('--tau', type=float, default=1.0, help='paso de la rejilla τ en segundos')
    estimate.add_argument('--t0', type=float, help='origen de la rejilla en segundos')
    estimate.add_argument('--n', type=int, help='número de retornos sobre la rejilla (sólo con --in1/--in2)')
    estimate.add_argument('--scale', choices=('raw_price', 'log_price'), default='raw_price',
                          help='escala de los precios de entrada')
    estimate.add_argument('--aligned-out', help='prefijo para guardar los retornos alineados')
    estimate.add_argument('--no-hry', dest='hry', action='store_false', help='omite el contraste HRY')
    estimate.add_argument('--out', required=True, help='informe JSON de salida')

    gain = sub.add_parser('gain', help='compara la ganancia teórica y empírica del filtro de nivel j')
    gain.add_argument('--family', type=_families, required=True, help='haar, la8 o la20')
    gain.add_argument('--level', type=int, required=True, help='nivel j >= 1')
    gain.add_argument('--points', type=int, default=1024, help='frecuencias en [0, π] (radianes por muestra)')
    gain.add_argument('--out', help='CSV de salida (por defecto la salida estándar)')

    mc = sub.add_parser('mc', help='experimento Monte Carlo con mediana y MAD por nivel')
    mc.add_argument('--config', required=True, help='experimento JSON')
    mc.add_argument('--reps', type=int, help='número de réplicas')
    mc.add_argument('--seed', type=int, help='semilla maestra')
    mc.add_argument('--pi1', type=float, help='probabilidad de ausencia de la serie 1')
    mc.add_argument('--pi2', type=float, help='probabilidad de ausencia de la serie 2')
    mc.add_argument('--threads', type=int, help='procesos de trabajo (LEADLAG_THREADS tiene prioridad)')
    mc.add_argument('--store', help="URL de base de datos para las réplicas, o 'default'")
    mc.add_argument('--out', required=True, help='CSV con medianas y MAD en unidades de rejilla')

    check = sub.add_parser('model-check', help='valida la admisibilidad del modelo y del embebido')
    check.add_argument('--model', required=True, help='modelo JSON')
    check.add_argument('--kernel', choices=KERNELS, default='midpoint', help='núcleo de covarianza objetivo')
    check.add_argument('--embed-maxlag', type=int, help='truncamiento del núcleo en unidades de rejilla')
    check.add_argument('--out', help='informe JSON (por defecto la salida estándar)')
    return parser


class RunConfigValidator:
    """
    Clase para validar la coherencia de los argumentos de cada subcomando
    """

    def validar(self, config: RunConfig) -> Dict[str, Any]:
        """
        Valida una configuración según su subcomando

        Returns:
            Dict con 'valid' y 'errors'
        """
        errors: List[str] = []
        checks = {
            'simulate': self._validar_simulate,
            'estimate': self._validar_estimate,
            'gain': self._validar_gain,
            'mc': self._validar_mc,
            'model-check': self._validar_model_check,
        }
        checks[config.command](config, errors)
        if config.out:
            self._validar_directorio(config.out, '--out', errors)
        return {'valid': len(errors) == 0, 'errors': errors}

    def _validar_archivo(self, path: Optional[str], flag: str, errors: List[str]) -> None:
        if path is None:
            return
        if not os.path.isfile(path):
            errors.append(f"{flag}: no existe el archivo {path}")
        elif not os.access(path, os.R_OK):
            errors.append(f"{flag}: no se puede leer {path}")

    def _validar_directorio(self, path: str, flag: str, errors: List[str]) -> None:
        directory = os.path.dirname(os.path.abspath(path))
        if not os.path.isdir(directory):
            errors.append(f"{flag}: no existe el directorio {directory}")

    def _validar_simulate(self, config: RunConfig, errors: List[str]) -> None:
        self._validar_archivo(config.model, '--model', errors)
        if config.embed_maxlag is not None and config.embed_maxlag < 0:
            errors.append("--embed-maxlag debe ser >= 0")

    def _validar_estimate(self, config: RunConfig, errors: List[str]) -> None:
        ticks = config.in1 is not None or config.in2 is not None
        if ticks and config.path is not None:
            errors.append("use --path o --in1/--in2, no ambos")
        elif not ticks and config.path is None:
            errors.append("falta la entrada: --path o --in1 y --in2")
        elif ticks and (config.in1 is None or config.in2 is None):
            errors.append("--in1 y --in2 deben indicarse juntos")
        for path, flag in ((config.in1, '--in1'), (config.in2, '--in2'), (config.path, '--path')):
            self._validar_archivo(path, flag, errors)

        if config.tau <= 0:
            errors.append("--tau debe ser positivo (segundos)")
        if config.delta is not None and config.delta <= 0:
            errors.append("--delta debe ser positivo (segundos)")
        if config.maxlag < 0:
            errors.append("--maxlag debe ser >= 0")
        if config.levels < 1:
            errors.append("--levels debe ser >= 1")
        if not config.families:
            errors.append("--family no puede estar vacío")
        if config.path is not None and config.n is not None:
            errors.append("--n sólo se usa con --in1/--in2; con --path n es la longitud de la trayectoria")
        elif config.n is not None:
            if config.n <= 0:
                errors.append("--n debe ser positivo")
            else:
                self._validar_factibilidad(config, config.n, errors)
        elif config.path is not None and not errors:
            from services.simulation_service import path_length

            self._validar_factibilidad(config, path_length(config.path), errors)
        if config.aligned_out:
            self._validar_directorio(config.aligned_out, '--aligned-out', errors)

    def _validar_factibilidad(self, config: RunConfig, n: int, errors: List[str]) -> None:
        from services.estimation_service import LagGrid, max_feasible_level

        l_max = config.maxlag
        if config.delta is not None and config.tau > 0 and config.delta > 0:
            l_max = LagGrid.from_delta(config.delta, config.tau).l_max
        grid = LagGrid.from_max_lag(max(l_max, 0))
        for family in config.families:
            feasible = max_feasible_level(n, family, grid)
            if config.levels > feasible:
                errors.append(
                    f"--levels {config.levels} no factible para {family.label} con n={n}: "
                    f"nivel máximo factible {feasible}"
                )

    def _validar_gain(self, config: RunConfig, errors: List[str]) -> None:
        if len(config.families) != 1:
            errors.append("--family debe indicar una sola familia")
        if config.level < 1:
            errors.append("--level debe ser >= 1")
        if config.points < 2:
            errors.append("--points debe ser >= 2")

    def _validar_mc(self, config: RunConfig, errors: List[str]) -> None:
        self._validar_archivo(config.config, '--config', errors)
        if config.reps is not None and config.reps < 1:
            errors.append("--reps debe ser >= 1")
        if config.threads is not None and config.threads < 1:
            errors.append("--threads debe ser >= 1")
        for flag, value in (('--pi1', config.pi1), ('--pi2', config.pi2)):
            if value is not None and not 0.0 <= value < 1.0:
                errors.append(f"{flag} debe estar en [0, 1)")

    def _validar_model_check(self, config: RunConfig, errors: List[str]) -> None:
        self._validar_archivo(config.model, '--model', errors)


def parse_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """
    Analiza y valida los argumentos

    Raises:
        UsageError: flag desconocido o faltante, archivo ilegible o
            combinación incoherente
    """
    namespace = build_parser().parse_args(argv)
    values = {k: v for k, v in vars(namespace).items() if k in RunConfig.__dataclass_fields__}
    if 'family' in vars(namespace):
        values['families'] = namespace.family
    config = RunConfig(**values)

    validation = RunConfigValidator().validar(config)
    if not validation['valid']:
        raise UsageError('; '.join(validation['errors']))
    return config
