"""
The campaign config file. It's plain JSON, validated by the models below::

    {
        "schema": 1,
        "bounded": [{"domain": {...}, "b": [0.3, 0.7], "h": 0.1}],
        "exterior": [{"domain": {...}, "b": [0.5, 1.0]}],
        "tolerances": {"route": 1e-6, "margin_ratio": 3}
    }
"""
from __future__ import annotations
import json
import math
import os
import typing as t

import pydantic
from pydantic import BaseModel, ConfigDict, Field

from magsteklov.geometry.domains import (
    FAMILIES,
    SYMMETRIES,
    Domain,
    build_domain,
    domain_metrics,
)
from magsteklov.shared.exceptions import ConfigParseError, SteklovError
from magsteklov.shared.guards import REGIME_SLACK


SCHEMA_VERSION = 1
DEFAULT_CAMPAIGN = os.path.join(
    os.path.dirname(os.path.abspath(__file__)), "default_campaign.json"
)


class Tolerances(BaseModel):
    model_config = ConfigDict(extra="forbid")

    route: float = Field(
        default=1e-6, gt=0, description="Relative agreement of two routes."
    )
    margin_ratio: float = Field(
        default=3.0,
        gt=0,
        description="A strict inequality passes when its margin exceeds this "
        "multiple of the combined error estimate.",
    )


class DomainSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    family: str
    params: t.Union[t.List[float], t.Dict[str, float]] = Field(
        default_factory=list
    )
    vertices: t.Optional[t.List[t.Tuple[float, float]]] = None
    symmetry: t.Optional[str] = None
    center: t.Tuple[float, float] = (0.0, 0.0)
    resolution: int = Field(default=512, ge=16)
    normalize: t.Optional[t.Dict[str, float]] = None

    @pydantic.field_validator("family")
    @classmethod
    def check_family(cls, value: str) -> str:
        if value not in FAMILIES + ("square",):
            raise ValueError(f"Unknown domain family {value!r}.")
        return value

    @pydantic.field_validator("symmetry")
    @classmethod
    def check_symmetry(cls, value: t.Optional[str]) -> t.Optional[str]:
        if value is not None and value not in SYMMETRIES:
            raise ValueError(f"Unknown symmetry {value!r}.")
        return value

    @pydantic.field_validator("normalize")
    @classmethod
    def check_normalize(cls, value):
        if value is None:
            return value
        if len(value) != 1 or not set(value) <= {"area", "perimeter"}:
            raise ValueError(
                "normalize is either {'area': A} or {'perimeter': L}."
            )
        if not all(i > 0 for i in value.values()):
            raise ValueError("The normalized size must be positive.")
        return value

    def build(self) -> Domain:
        return build_domain(self.model_dump(exclude_none=True))


class BoundedCampaign(BaseModel):
    model_config = ConfigDict(extra="forbid")

    domain: DomainSpec
    b: t.List[pydantic.PositiveFloat] = Field(min_length=1)
    h: pydantic.PositiveFloat = 0.1
    refinements: int = Field(
        default=2,
        ge=1,
        description="Uniform refinements; the last two levels give the "
        "error estimate.",
    )


class ExteriorCampaign(BaseModel):
    model_config = ConfigDict(extra="forbid")

    domain: DomainSpec
    b: t.List[pydantic.PositiveFloat] = Field(min_length=1)


class CampaignConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    schema_version: t.Literal[1] = Field(
        default=SCHEMA_VERSION, alias="schema"
    )
    bounded: t.List[BoundedCampaign] = Field(default_factory=list)
    exterior: t.List[ExteriorCampaign] = Field(default_factory=list)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    override_regime: bool = False
    workers: int = Field(default=1, ge=1)
    n_a: int = Field(default=2000, ge=16)
    n_levels: int = Field(default=200, ge=16)
    n_panels: int = Field(default=512, ge=2)

    @pydantic.model_validator(mode="after")
    def check_regimes(self) -> CampaignConfig:
        """
        Bounded campaigns need ``b |domain| <= pi`` and exterior campaigns
        ``b L^2 <= 4 pi^2``, unless ``override_regime`` is set.
        """
        for campaign, limit, label, size in (
            (self.bounded, math.pi, "b * |domain|", lambda m: m.area),
            (
                self.exterior,
                4.0 * math.pi**2,
                "b * L^2",
                lambda m: m.perimeter**2,
            ),
        ):
            for item in campaign:
                try:
                    metrics = domain_metrics(item.domain.build())
                except SteklovError as exception:
                    raise ValueError(str(exception)) from exception

                for b in item.b:
                    value = b * size(metrics)
                    if value > limit * (1.0 + REGIME_SLACK) and not (
                        self.override_regime
                    ):
                        raise ValueError(
                            f"{item.domain.family} at b={b}: {label} = "
                            f"{value:.6g} exceeds {limit:.6g}. Set "
                            "override_regime to run it anyway."
                        )
        return self


def load_config(
    path: t.Union[str, os.PathLike], override_regime: bool = False
) -> CampaignConfig:
    """
    :param override_regime:
        Overrides the file's ``override_regime``, before the regimes are
        checked.
    :raises ConfigParseError:
        If the file can't be read, isn't JSON, or doesn't match the schema.

    """
    try:
        with open(path) as f:
            contents = json.load(f)
    except (OSError, json.JSONDecodeError) as exception:
        raise ConfigParseError(
            f"Can't read the config {path}: {exception}"
        ) from exception

    if override_regime and isinstance(contents, dict):
        contents = {**contents, "override_regime": True}

    try:
        return CampaignConfig.model_validate(contents)
    except pydantic.ValidationError as exception:
        raise ConfigParseError(str(exception)) from exception
