# -*- coding: utf-8 -*-
"""
Módulo database - Almacén de réplicas Monte Carlo de LEADLAG WAVELET
"""
