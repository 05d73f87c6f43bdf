from __future__ import annotations
import csv
import os
import typing as t


def format_value(value: t.Any) -> str:
    """
    Floats are written with ``repr`` so they round trip bit exactly.
    """
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if hasattr(value, "item"):
        return format_value(value.item())
    return str(value)


def write_csv(
    path: str, header: t.Sequence[str], rows: t.Iterable[t.Sequence[t.Any]]
) -> str:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)

    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(i) for i in row])

    return path


def read_csv(path: str) -> t.List[t.Dict[str, str]]:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))
