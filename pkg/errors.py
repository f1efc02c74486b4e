# -*- coding: utf-8 -*-
"""
Excepciones del proyecto LEADLAG WAVELET

Cada clase lleva el código de salida que usa la línea de comandos.
"""


class LeadLagError(Exception):
    """Error base de la librería"""

    exit_code = 1


class UsageError(LeadLagError):
    """Argumentos o configuración inválidos"""

    exit_code = 1


class DataError(LeadLagError):
    """Datos de entrada o modelo inválidos"""

    exit_code = 2


class FilterError(DataError):
    """Filtro de ondícula que no supera el oráculo de ganancia"""


class IngestError(DataError):
    """Archivo de ticks o serie alineada inválida"""


class NumericError(LeadLagError):
    """Fallo numérico (cuadratura, factorización)"""

    exit_code = 3


class EmbeddingError(NumericError):
    """Embebido circulante no definido positivo"""
