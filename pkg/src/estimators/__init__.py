"""
__init__.py for the estimators module.

Importing the package registers the survey estimators with the factory.
"""

from src.estimators.base import BaseEstimator, EstimatorFactory
from src.estimators.series import CountryPooledEstimator, RegionStratifiedEstimator

__all__ = [
    "BaseEstimator",
    "CountryPooledEstimator",
    "EstimatorFactory",
    "RegionStratifiedEstimator",
]
