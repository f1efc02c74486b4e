# -*- coding: utf-8 -*-
"""
Módulo spectral - Modelo de densidad espectral cruzada multiescala y oráculos teóricos
"""
