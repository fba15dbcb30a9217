"""
Base estimator interface for survey incidence series.

Adapter pattern: each estimation approach (region-stratified, country-pooled)
implements the same interface so the pipeline and CLI can dispatch on a
method name without knowing the statistics behind it.
"""

from abc import ABC, abstractmethod
from typing import Dict, List, Sequence

from src.models.domain import EstimateResult, SurveyResponse


class BaseEstimator(ABC):
    """
    Abstract base class for survey estimators.

    An estimator turns one country's filtered, date-sorted responses into a
    series of EstimateResult rows.
    """

    name: str = ""

    @abstractmethod
    def estimate_series(self, responses: Sequence[SurveyResponse]) -> List[EstimateResult]:
        """
        Compute the estimate series.

        Args:
            responses: Filtered responses for a single country

        Returns:
            EstimateResult rows in date order (possibly empty)
        """
        pass

    @property
    @abstractmethod
    def parameters(self) -> Dict[str, object]:
        """Parameters recorded in the run manifest."""
        pass


class EstimatorFactory:
    """
    Factory for creating estimator instances by method name.

    Concrete estimators register themselves at import time.
    """

    _estimators: Dict[str, type] = {}

    @classmethod
    def register(cls, name: str, estimator_class: type) -> None:
        """Register a new estimator type."""
        cls._estimators[name.lower()] = estimator_class

    @classmethod
    def available(cls) -> List[str]:
        return sorted(cls._estimators)

    @classmethod
    def create(cls, method: str, **kwargs) -> BaseEstimator:
        """
        Create an estimator instance.

        Args:
            method: "region" or "country"
            **kwargs: Constructor parameters for the estimator

        Raises:
            ValueError: If the method is not registered
        """
        estimator_class = cls._estimators.get(method.lower())
        if not estimator_class:
            raise ValueError(f"Unknown estimation method: {method}")
        return estimator_class(**kwargs)
