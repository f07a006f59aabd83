"""
tametilt - Large Tilting Modules over Tame Hereditary Algebras

A Python package for classifying large tilting modules over tame hereditary
algebras by branch modules and tube subsets, computed exactly from the
combinatorics of the tubes.
"""

__version__ = "0.1.0"
__author__ = "tametilt"
__description__ = "Exact combinatorics of large tilting modules over tame hereditary algebras"

from .errors import TametiltError
from .registry import RegistryParser, TubeRegistry, preset
from .classify import descriptor_from_pair, enumerate_descriptors
from .oracle import OracleBounds, verify_suite

__all__ = [
    'TametiltError',
    'RegistryParser',
    'TubeRegistry',
    'preset',
    'descriptor_from_pair',
    'enumerate_descriptors',
    'OracleBounds',
    'verify_suite',
]
