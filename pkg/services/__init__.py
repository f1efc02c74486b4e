# -*- coding: utf-8 -*-
"""
Módulo services - Simulación, ingesta, estimación y Monte Carlo de LEADLAG WAVELET
"""
