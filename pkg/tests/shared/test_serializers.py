from dataclasses import dataclass, field
import typing as t
from unittest import TestCase

import numpy as np
from pydantic import ValidationError

from magsteklov.shared.serializers import create_pydantic_model, serialize


@dataclass(frozen=True)
class Result:
    value: float = field(metadata={"help_text": "The eigenvalue."})
    vector: np.ndarray = field(repr=False)
    route: str = "dtn"
    upper: t.Optional[float] = None
    flags: t.Tuple[bool, ...] = ()


class TestCreatePydanticModel(TestCase):
    def test_help_text(self):
        """
        Make sure the help text of a field ends up in the schema.
        """
        model = create_pydantic_model(Result)
        schema = model.model_json_schema()
        self.assertEqual(
            schema["properties"]["value"]["description"], "The eigenvalue."
        )

    def test_arrays_excluded(self):
        """
        Make sure arrays are only included when asked for.
        """
        self.assertNotIn("vector", create_pydantic_model(Result).model_fields)
        self.assertIn(
            "vector",
            create_pydantic_model(Result, include_arrays=True).model_fields,
        )

    def test_model_name(self):
        model = create_pydantic_model(Result, model_name="Custom")
        self.assertEqual(model.__name__, "Custom")

    def test_validation(self):
        """
        Make sure values of the wrong type are rejected.
        """
        model = create_pydantic_model(Result)
        with self.assertRaises(ValidationError):
            model(value="not a number")


class TestSerialize(TestCase):
    def test_serialize(self):
        """
        Make sure numpy values become plain Python values, and extra
        context is merged in.
        """
        result = Result(
            value=np.float64(1.5),
            vector=np.arange(3.0),
            flags=(True, False),
        )
        record = serialize(result, domain="disk")
        self.assertEqual(record["value"], 1.5)
        self.assertEqual(record["flags"], [True, False])
        self.assertEqual(record["domain"], "disk")
        self.assertIsNone(record["upper"])
        self.assertNotIn("vector", record)

        record = serialize(result, include_arrays=True)
        self.assertEqual(record["vector"], [0.0, 1.0, 2.0])
