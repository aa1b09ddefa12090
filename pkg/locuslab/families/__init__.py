# Configuration generators

from typing import Any, Dict, List, Type

from ..configuration import Configuration
from ..errors import ConfigurationError
from .base import ConfigurationFamily
from .coxeter import CoxeterA, CoxeterB, CoxeterC, CoxeterD, CoxeterI2, make_coxeter
from .deformed import DeformedA, DeformedC, deformed_power_sum, make_deformed_An, make_deformed_Cn


class AdlerMoserPoints(ConfigurationFamily):
    """Pole configuration of a 1D Adler-Moser potential (roots of the Wronskian)"""

    name = "adler-moser-points"

    def build(self) -> Configuration:
        from ..onedim import adler_moser, adler_moser_tau, pole_configuration

        m = int(self.params["m"])
        if self.params.get("tau") is not None:
            data = adler_moser_tau(m, self.params["tau"])
        else:
            data = adler_moser(m, self.params.get("constants") or [])
        return pole_configuration(data)


FAMILIES: Dict[str, Type[ConfigurationFamily]] = {
    family.name: family
    for family in (CoxeterA, CoxeterB, CoxeterC, CoxeterD, CoxeterI2, DeformedA, DeformedC, AdlerMoserPoints)
}


def family_names() -> List[str]:
    return sorted(FAMILIES)


def create_family(name: str, **params: Any) -> ConfigurationFamily:
    family = FAMILIES.get(name)
    if family is None:
        raise ConfigurationError(f"Unsupported generator: {name}")
    return family(**params)


__all__ = [
    "AdlerMoserPoints",
    "ConfigurationFamily",
    "FAMILIES",
    "create_family",
    "deformed_power_sum",
    "family_names",
    "make_coxeter",
    "make_deformed_An",
    "make_deformed_Cn",
]
