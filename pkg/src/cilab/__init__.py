"""Numerical verification of compensated-integrability estimates.

Modules: :mod:`symmat` (small symmetric matrices), :mod:`mixed` (mixed
determinants), :mod:`grid` and :mod:`estimates` (tensor fields and their
integral bounds), :mod:`scalar` (BV applications), :mod:`gas` and
:mod:`flows` (gas-dynamics functionals and test flows), :mod:`sharpness`
(constant probing), :mod:`report` and :mod:`io` (file formats), :mod:`cli`.
"""

from .exceptions import CILabError
from .grid import Grid, KernelSpec, TensorField, divergence, extreme_tensor
from .report import Report
from .symmat import SymMat

__version__ = "0.1.0"

__all__ = ["CILabError", "Grid", "KernelSpec", "Report", "SymMat", "TensorField", "divergence", "extreme_tensor"]
