# -*- coding: utf-8 -*-
"""
Configuración centralizada para LEADLAG WAVELET
"""

import os
from typing import Dict, Any, List, Optional


def _env_number(name: str, default: str, cast, errors: List[str]):
    raw = os.getenv(name, default)
    try:
        return cast(raw)
    except ValueError:
        errors.append(f"{name} no es un número válido: {raw!r}")
        return cast(default)


def _env_int(name: str, default: str, errors: List[str]) -> int:
    return _env_number(name, default, int, errors)


def _env_float(name: str, default: str, errors: List[str]) -> float:
    return _env_number(name, default, float, errors)


class Config:
    """Clase de configuración centralizada"""

    # Configuración de paralelismo
    THREADS = os.getenv('LEADLAG_THREADS')

    # Configuración de Base de Datos (almacén de réplicas Monte Carlo)
    DATABASE_URL = os.getenv('DATABASE_URL', 'sqlite:///leadlag_mc.db')

    # Configuración de Logging
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
    LOG_FILE = os.getenv('LOG_FILE', 'leadlag.log')

    # Configuración numérica (los valores mal formados quedan en ENV_ERRORS)
    ENV_ERRORS: List[str] = []
    MAXLAG_CAP = _env_int('LEADLAG_MAXLAG_CAP', '4096', ENV_ERRORS)
    KERNEL_TOLERANCE = _env_float('LEADLAG_KERNEL_TOL', '1e-6', ENV_ERRORS)
    CLIP_TOLERANCE = _env_float('LEADLAG_CLIP_TOL', '1e-8', ENV_ERRORS)
    QUAD_TOLERANCE = _env_float('LEADLAG_QUAD_TOL', '1e-9', ENV_ERRORS)

    # Configuración Monte Carlo
    FAILURE_LIMIT = _env_float('LEADLAG_FAILURE_LIMIT', '0.05', ENV_ERRORS)
    DEFAULT_REPS = _env_int('LEADLAG_DEFAULT_REPS', '200', ENV_ERRORS)

    # Configuración de la aplicación
    APP_NAME = "LEADLAG WAVELET"
    APP_VERSION = "1.0.0"
    APP_DESCRIPTION = "Estimación escala por escala de efectos lead-lag mediante covarianza cruzada de ondículas"
    SCHEMA_VERSION = 1

    @classmethod
    def threads(cls, flag_value: Optional[int] = None) -> int:
        """
        Número de procesos de trabajo

        LEADLAG_THREADS tiene prioridad sobre --threads; sin ninguno de los dos
        se usan todos los núcleos disponibles.
        """
        if cls.THREADS:
            return max(1, int(cls.THREADS))
        if flag_value is not None:
            return max(1, int(flag_value))
        return os.cpu_count() or 1

    @classmethod
    def validate_config(cls) -> Dict[str, Any]:
        """
        Valida la configuración y retorna errores si los hay

        Returns:
            Dict con errores de configuración
        """
        errors = list(cls.ENV_ERRORS)
        warnings = []

        if cls.THREADS:
            try:
                if int(cls.THREADS) < 1:
                    errors.append("LEADLAG_THREADS debe ser mayor a 0")
            except ValueError:
                errors.append(f"LEADLAG_THREADS no es un entero: {cls.THREADS}")

        if cls.LOG_LEVEL.upper() not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
            errors.append(f"LOG_LEVEL desconocido: {cls.LOG_LEVEL}")

        if cls.LOG_FILE:
            log_dir = os.path.dirname(cls.LOG_FILE)
            if log_dir and not os.path.exists(log_dir):
                try:
                    os.makedirs(log_dir, exist_ok=True)
                    warnings.append(f"Directorio de logs creado: {log_dir}")
                except Exception as e:
                    errors.append(f"No se puede crear directorio de logs: {e}")

        if cls.MAXLAG_CAP <= 0:
            errors.append("LEADLAG_MAXLAG_CAP debe ser mayor a 0")

        for name, value in (('LEADLAG_KERNEL_TOL', cls.KERNEL_TOLERANCE),
                            ('LEADLAG_CLIP_TOL', cls.CLIP_TOLERANCE),
                            ('LEADLAG_QUAD_TOL', cls.QUAD_TOLERANCE)):
            if value <= 0:
                errors.append(f"{name} debe ser mayor a 0")

        if not 0 <= cls.FAILURE_LIMIT < 1:
            errors.append("LEADLAG_FAILURE_LIMIT debe estar en [0, 1)")

        if cls.DEFAULT_REPS < 1:
            errors.append("LEADLAG_DEFAULT_REPS debe ser mayor a 0")

        return {
            'valid': len(errors) == 0,
            'errors': errors,
            'warnings': warnings
        }

    @classmethod
    def get_logging_config(cls) -> Dict[str, Any]:
        """
        Obtiene la configuración de logging

        Returns:
            Dict con configuración de logging
        """
        handlers = {
            'console': {
                'level': cls.LOG_LEVEL,
                'class': 'logging.StreamHandler',
                'formatter': 'standard',
                'stream': 'ext://sys.stderr'
            }
        }
        if cls.LOG_FILE:
            handlers['file'] = {
                'level': cls.LOG_LEVEL,
                'class': 'logging.FileHandler',
                'filename': cls.LOG_FILE,
                'formatter': 'detailed',
                'encoding': 'utf-8'
            }

        return {
            'version': 1,
            'disable_existing_loggers': False,
            'formatters': {
                'standard': {
                    'format': '%(asctime)s [%(levelname)s] %(name)s: %(message)s'
                },
                'detailed': {
                    'format': '%(asctime)s [%(levelname)s] %(name)s:%(lineno)d: %(message)s'
                }
            },
            'handlers': handlers,
            'loggers': {
                '': {
                    'handlers': list(handlers),
                    'level': cls.LOG_LEVEL,
                    'propagate': False
                }
            }
        }
