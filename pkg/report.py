"""
Reports printed by the CLI, as key: value lines or as one JSON document.
"""

import json
from dataclasses import dataclass, field
from typing import Any

from cohomology import CohomologyResult, GModule
from paper_checks import ClaimResult


@dataclass
class CocycleVerdict:
    """Verdicts on a cocycle supplied in a spec file."""

    is_cocycle: bool
    locally_trivial: bool | None = None
    is_coboundary: bool | None = None
    detail: str = ""


@dataclass
class Report:
    name: str
    group_order: int | None = None
    modulus: int | None = None
    module_rank: int | None = None
    z1_order: int | None = None
    b1_order: int | None = None
    h1: tuple[int, ...] | None = None
    h1_loc: tuple[int, ...] | None = None
    representatives: list[list[list[int]]] = field(default_factory=list)
    verdict: CocycleVerdict | None = None
    claims: list[ClaimResult] = field(default_factory=list)
    extra: dict[str, Any] = field(default_factory=dict)
    duration: float | None = None

    @classmethod
    def from_cohomology(cls, name: str, module: GModule, full: CohomologyResult, local: CohomologyResult) -> "Report":
        return cls(
            name=name,
            group_order=len(module.group),
            modulus=module.modulus,
            module_rank=module.rank,
            z1_order=full.cocycle_order,
            b1_order=full.coboundary_order,
            h1=full.structure.invariant_factors,
            h1_loc=local.structure.invariant_factors,
            representatives=[[list(v) for v in z.values] for z in local.representatives],
        )

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)

    def to_dict(self, timing: bool = True) -> dict[str, Any]:
        data: dict[str, Any] = {"name": self.name}
        for key in ("group_order", "modulus", "module_rank", "z1_order", "b1_order"):
            value = getattr(self, key)
            if value is not None:
                data[key] = value
        if self.h1 is not None:
            data["h1_invariant_factors"] = list(self.h1)
        if self.h1_loc is not None:
            data["h1_loc_invariant_factors"] = list(self.h1_loc)
            data["h1_loc_representatives"] = self.representatives
        if self.verdict is not None:
            data["cocycle"] = {
                "is_cocycle": self.verdict.is_cocycle,
                "locally_trivial": self.verdict.locally_trivial,
                "is_coboundary": self.verdict.is_coboundary,
                "detail": self.verdict.detail,
            }
        if self.claims:
            data["claims"] = [{"name": c.name, "status": c.status, "detail": c.detail} for c in self.claims]
        data.update(self.extra)
        if timing and self.duration is not None:
            data["duration_seconds"] = round(self.duration, 6)
        return data


def _text_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "-"
    if isinstance(value, (list, tuple, dict)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def _group_label(factors: tuple[int, ...]) -> str:
    return " x ".join(f"Z/{d}" for d in factors) if factors else "0"


def render_text(report: Report, timing: bool = True) -> str:
    """One key: value line per field; claims print as PASS/FAIL lines."""
    data = report.to_dict(timing=timing)
    lines = []
    for key, value in data.items():
        if key == "claims":
            continue
        if key == "h1_loc_representatives":
            for idx, table in enumerate(value):
                lines.append(f"h1_loc_representative[{idx}]: {_text_value(table)}")
            continue
        if key == "cocycle":
            for sub, sub_value in value.items():
                lines.append(f"cocycle_{sub}: {_text_value(sub_value)}")
            continue
        if key in ("h1_invariant_factors", "h1_loc_invariant_factors"):
            lines.append(f"{key[: -len('_invariant_factors')]}: {_group_label(tuple(value))}")
        lines.append(f"{key}: {_text_value(value)}")
    for claim in report.claims:
        status = "PASS" if claim.passed else "FAIL"
        suffix = f" ({claim.detail})" if claim.detail else ""
        lines.append(f"{status}: {claim.name}{suffix}")
    return "\n".join(lines) + "\n"


def render_structured(report: Report, timing: bool = True) -> str:
    """JSON document with sorted keys."""
    return json.dumps(report.to_dict(timing=timing), sort_keys=True, indent=2) + "\n"
