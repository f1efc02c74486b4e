# -*- coding: utf-8 -*-
"""
Módulo cli - Línea de comandos de LEADLAG WAVELET
"""
