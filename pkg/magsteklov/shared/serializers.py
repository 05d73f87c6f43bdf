from __future__ import annotations
import dataclasses
from functools import lru_cache
import typing as t

import numpy as np
import pydantic


SCALAR_TYPES = (float, int, str, bool)


def _field_type(
    annotation: t.Any, include_arrays: bool
) -> t.Optional[t.Any]:
    """
    Work out the pydantic type for a dataclass field, or None if the field
    should be left out of the serialised record.
    """
    if annotation in SCALAR_TYPES:
        return annotation

    origin = t.get_origin(annotation)
    arguments = t.get_args(annotation)

    if origin is t.Union and type(None) in arguments:
        inner = [i for i in arguments if i is not type(None)]
        if len(inner) == 1:
            inner_type = _field_type(inner[0], include_arrays)
            return t.Optional[inner_type] if inner_type else None
        return None

    if origin in (tuple, list):
        if all(i in SCALAR_TYPES or i is Ellipsis for i in arguments):
            return t.List[t.Any]
        return None

    if annotation is np.ndarray:
        return t.List[t.Any] if include_arrays else None

    return None


@lru_cache()
def create_pydantic_model(
    result_type: t.Type,
    include_arrays: bool = False,
    model_name: t.Optional[str] = None,
) -> t.Type[pydantic.BaseModel]:
    """
    Create a Pydantic model representing a result dataclass.

    :param result_type:
        The dataclass you want to create a Pydantic serialiser model for,
        for example ``SpectralResult``.
    :param include_arrays:
        Whether to include numpy array fields (eigenfunctions, profiles) as
        lists. They're left out by default, which keeps reports small.
    :param model_name:
        By default, the name of the dataclass will be used, but you can
        override it if you want several models based off the same
        dataclass.
    :returns:
        A Pydantic model.

    """
    hints = t.get_type_hints(result_type)
    columns: t.Dict[str, t.Any] = {}

    for field in dataclasses.fields(result_type):
        value_type = _field_type(hints[field.name], include_arrays)
        if value_type is None:
            continue

        description = field.metadata.get("help_text")
        columns[field.name] = (
            value_type,
            pydantic.Field(default=None, description=description),
        )

    model_name = model_name if model_name else result_type.__name__

    return pydantic.create_model(
        model_name,
        __config__=pydantic.ConfigDict(arbitrary_types_allowed=True),
        **columns,
    )


def _plain(value: t.Any) -> t.Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, tuple):
        return [_plain(i) for i in value]
    return value


def serialize(
    instance: t.Any, include_arrays: bool = False, **extra: t.Any
) -> t.Dict[str, t.Any]:
    """
    Turn a result dataclass into a plain dict, validated by the Pydantic
    model for its type. ``extra`` values are merged in afterwards, for
    context such as the domain tag.
    """
    model = create_pydantic_model(type(instance), include_arrays)
    values = {
        name: _plain(getattr(instance, name)) for name in model.model_fields
    }
    record = model(**values).model_dump()
    record.update(extra)
    return record
