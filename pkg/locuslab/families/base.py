from abc import ABC, abstractmethod
from typing import Any, Dict

from ..configuration import Configuration


class ConfigurationFamily(ABC):
    """
    Base class for configuration generators
    """

    name = ""

    def __init__(self, **params: Any):
        self.params = params

    @abstractmethod
    def build(self) -> Configuration:
        """Construct the configuration for the stored parameters"""
        pass

    def describe(self) -> Dict[str, Any]:
        """Generator name and parameters, for reports"""
        return {"family": self.name, **self.params}
