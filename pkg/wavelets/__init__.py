# -*- coding: utf-8 -*-
"""
Módulo wavelets - Filtros de Daubechies, funciones de ganancia y MODWT
"""
