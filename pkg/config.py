#!/usr/bin/env python3
"""
Configuration module for h1loc
"""

import os
from dataclasses import dataclass
from pathlib import Path

try:
    import yaml  # type: ignore[import-untyped]
except ImportError:  # pragma: no cover - dependency is declared by the package
    yaml = None  # type: ignore[assignment]


@dataclass
class ScenarioConfig:
    """Defaults for one verify-paper scenario"""

    name: str
    description: str = ""
    primes: tuple[int, ...] = ()
    exponents: tuple[int, ...] = ()


class Config:
    """Global configuration"""

    # Closure stops with an error past this many elements
    ENUMERATION_CAP = int(os.environ.get("H1LOC_ENUMERATION_CAP", str(10**6)))

    # Eichler discriminant search
    QUAT_SEARCH_BOUND = int(os.environ.get("H1LOC_QUAT_BOUND", str(10**6)))

    # Brute-force oracle only runs when |M|^|G| stays below this
    ORACLE_MAX_MAPS = 10**4
    ORACLE_MAX_GROUP = 8
    ORACLE_MAX_MODULE = 81

    RANDOM_SEED = int(os.environ.get("H1LOC_SEED", "20240501"))
    CYCLIC_SWEEP_SIZE = 200
    STABILIZER_SAMPLE_SIZE = 100
    DIRECT_SUM_SAMPLE_SIZE = 20
    DIRECT_SUM_GROUP_CAP = 512

    # Cap on classes enumerated when comparing H1 against a restriction
    CLASS_ENUMERATION_CAP = 4096

    SCENARIOS: dict[str, ScenarioConfig] = {
        "prop21-family": ScenarioConfig(
            name="prop21-family",
            description="odd-prime vanishing for stabilizers of a vector of order p^n",
            primes=(3, 5),
            exponents=(1, 2),
        ),
        "dz-p2": ScenarioConfig(
            name="dz-p2",
            description="(Z/8)* acting on Z/8 and its lift G16 over Z/16",
            primes=(2,),
            exponents=(3,),
        ),
        "lemma51": ScenarioConfig(
            name="lemma51",
            description="unipotent group over F_{p^2} with a locally trivial non-coboundary",
            primes=(3, 5),
            exponents=(1,),
        ),
        "prop54-h2": ScenarioConfig(
            name="prop54-h2",
            description="the mod p^2 lift H2 of the unipotent group and its descent data",
            primes=(3, 5),
            exponents=(2,),
        ),
        "cyclic-sweep": ScenarioConfig(
            name="cyclic-sweep",
            description="random cyclic subgroups of GL2(Z/8) and GL2(Z/9)",
        ),
        "direct-sum": ScenarioConfig(
            name="direct-sum",
            description="block-diagonal groups against their block images",
        ),
    }

    _OVERRIDABLE = (
        "ENUMERATION_CAP",
        "QUAT_SEARCH_BOUND",
        "ORACLE_MAX_MAPS",
        "ORACLE_MAX_GROUP",
        "ORACLE_MAX_MODULE",
        "RANDOM_SEED",
        "CYCLIC_SWEEP_SIZE",
        "STABILIZER_SAMPLE_SIZE",
        "DIRECT_SUM_SAMPLE_SIZE",
        "DIRECT_SUM_GROUP_CAP",
        "CLASS_ENUMERATION_CAP",
    )

    @property
    def scenario_names(self) -> list[str]:
        """Return the stable scenario identifiers"""
        return list(self.SCENARIOS.keys())

    def get_scenario(self, name: str) -> ScenarioConfig | None:
        """Get a scenario by name (case-insensitive)"""
        return self.SCENARIOS.get(name.lower())

    @classmethod
    def load_overrides(cls, path: str | Path | None = None) -> dict[str, int]:
        """Apply numeric overrides from a YAML file (default: $H1LOC_CONFIG).

        Returns the applied overrides. Unknown keys and non-integer values are
        rejected.
        """
        source = path if path is not None else os.environ.get("H1LOC_CONFIG")
        if not source:
            return {}
        if yaml is None:  # pragma: no cover
            raise RuntimeError("PyYAML is required to read configuration overrides")
        with open(source, encoding="utf-8") as handle:
            data = yaml.safe_load(handle) or {}
        if not isinstance(data, dict):
            raise ValueError(f"{source}: expected a mapping of setting names to integers")

        applied: dict[str, int] = {}
        for key, value in data.items():
            name = str(key).upper()
            if name not in cls._OVERRIDABLE:
                raise ValueError(f"{source}: unknown setting {key!r}")
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ValueError(f"{source}: {key} must be a positive integer")
            setattr(cls, name, value)
            applied[name] = value
        return applied
