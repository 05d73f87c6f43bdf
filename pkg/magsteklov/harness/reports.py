from __future__ import annotations
import logging
import os
import typing as t

from pydantic import BaseModel, ConfigDict, Field

from magsteklov.shared.tables import write_csv


logger = logging.getLogger(__file__)


EQUALITY_TOLERANCE = 1e-8


class ChainMember(BaseModel):
    value: float
    error: float = 0.0


class Comparison(BaseModel):
    """
    ``lower <op> upper``, where ``op`` is ``lt`` (strict), ``le`` or ``eq``.
    """

    name: str
    kind: t.Literal["lt", "le", "eq"]
    lower: float
    upper: float
    error: float
    margin: float
    passed: bool
    violated: bool

    @classmethod
    def evaluate(
        cls,
        name: str,
        kind: str,
        lower: ChainMember,
        upper: ChainMember,
        margin_ratio: float = 3.0,
    ) -> Comparison:
        """
        Pass or fail only ever depends on the margin relative to the
        combined error, never on the raw comparison of the values.

        * ``lt`` passes when the margin exceeds ``margin_ratio`` errors.
        * ``le`` passes unless the margin is below minus the error.
        * ``eq`` passes when the difference is within the error, or 1e-8
          relative.

        A comparison is violated when it's wrong beyond its error bars.
        """
        margin = upper.value - lower.value
        error = lower.error + upper.error

        if kind == "lt":
            passed = margin > margin_ratio * error
            violated = margin < -error
        elif kind == "le":
            violated = margin < -error
            passed = not violated
        else:
            allowed = max(error, EQUALITY_TOLERANCE * abs(upper.value))
            passed = abs(margin) <= allowed
            violated = abs(margin) > margin_ratio * allowed

        return cls(
            name=name,
            kind=kind,
            lower=lower.value,
            upper=upper.value,
            error=error,
            margin=margin,
            passed=passed,
            violated=violated,
        )


class BoundedRecord(BaseModel):
    index: int
    domain: str
    b: float
    area: float
    perimeter: float
    h: float
    n_nodes: int
    members: t.Dict[str, ChainMember]
    comparisons: t.List[Comparison]
    truncation: t.List[t.Tuple[int, float]] = Field(
        default_factory=list,
        description="kappa_1 of the truncated weights, by n.",
    )
    truncation_monotone: bool = True
    passed: bool = False


class ExteriorRecord(BaseModel):
    index: int
    domain: str
    b: float
    perimeter: float
    members: t.Dict[str, ChainMember]
    comparisons: t.List[Comparison]
    trial: t.Dict[str, t.Any] = Field(
        default_factory=dict, description="The serialised TrialReport."
    )
    geometry_passed: bool = True
    passed: bool = False


class VerificationReport(BaseModel):
    schema_version: int = Field(default=1, alias="schema")
    bounded: t.List[BoundedRecord] = Field(default_factory=list)
    exterior: t.List[ExteriorRecord] = Field(default_factory=list)
    passed: bool = True
    timing: t.Dict[str, float] = Field(
        default_factory=dict,
        description="Wall clock seconds per item - kept apart from the "
        "numbers so those stay reproducible.",
    )

    model_config = ConfigDict(populate_by_name=True)

    @property
    def violations(self) -> t.List[str]:
        return [
            f"{record.domain} b={record.b}: {comparison.name}"
            for record in [*self.bounded, *self.exterior]
            for comparison in record.comparisons
            if comparison.violated
        ]


SUMMARY_HEADER = (
    "campaign",
    "index",
    "domain",
    "b",
    "comparison",
    "lower",
    "upper",
    "margin",
    "error",
    "passed",
)


def summary_rows(report: VerificationReport) -> t.List[t.Tuple]:
    rows = []
    for campaign, records in (
        ("bounded", report.bounded),
        ("exterior", report.exterior),
    ):
        for record in records:
            for comparison in record.comparisons:
                rows.append(
                    (
                        campaign,
                        record.index,
                        record.domain,
                        record.b,
                        comparison.name,
                        comparison.lower,
                        comparison.upper,
                        comparison.margin,
                        comparison.error,
                        comparison.passed,
                    )
                )
    return rows


def write_reports(
    report: VerificationReport,
    out: t.Union[str, os.PathLike],
    tables: t.Optional[t.Dict[str, t.Callable[[str], None]]] = None,
) -> t.List[str]:
    """
    Write ``report.json``, ``summary.csv`` and any extra tables into
    ``out``.

    :param tables:
        Maps a file name, such as ``truncation_0.csv``, to a function
        which writes that table to the given path.
    :returns:
        The paths written.

    """
    os.makedirs(out, exist_ok=True)
    paths = []

    path = os.path.join(out, "report.json")
    with open(path, "w") as f:
        f.write(report.model_dump_json(indent=2, by_alias=True))
    paths.append(path)

    path = os.path.join(out, "summary.csv")
    write_csv(path, SUMMARY_HEADER, summary_rows(report))
    paths.append(path)

    for name, writer in (tables or {}).items():
        path = os.path.join(out, name)
        writer(path)
        paths.append(path)

    logger.info(f"Wrote {len(paths)} report files to {out}.")
    return paths
