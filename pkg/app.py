#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
LEADLAG WAVELET - Estimación escala por escala de efectos lead-lag
Archivo principal de la aplicación
"""

import logging
import logging.config
import sys
from typing import Optional, Sequence

from dotenv import load_dotenv

# Cargar variables de entorno
load_dotenv()

# Importar módulos de la aplicación
from config import Config
from errors import UsageError
from cli.handlers import run
from cli.validators import parse_args

logger = logging.getLogger(__name__)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Función principal de la línea de comandos

    Args:
        argv: argumentos sin el nombre del programa (por defecto sys.argv[1:])

    Returns:
        Código de salida
    """
    logging.config.dictConfig(Config.get_logging_config())

    validation = Config.validate_config()
    for warning in validation['warnings']:
        logger.warning(warning)
    if not validation['valid']:
        for error in validation['errors']:
            logger.error(error)
            print(f"error de configuración: {error}", file=sys.stderr)
        return UsageError.exit_code

    try:
        config = parse_args(argv)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except SystemExit as e:
        # --help y --version
        return int(e.code or 0)

    logger.info(f"Iniciando {Config.APP_NAME} v{Config.APP_VERSION}: {config.command}")
    return run(config)


if __name__ == '__main__':
    sys.exit(main())
