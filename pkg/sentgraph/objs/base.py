from abc import ABC, abstractmethod
from typing import Any, Optional, Union

import numpy as np

from sentgraph.exceptions import Invalid, ValidationError


class SentGraphObj(ABC):
    """ Base Class for SentGraph Objects.

        Objects are built from plain dicts (the JSON shape they serialize to) and are frozen once loaded.
    """

    def __init__(self, data=None):
        self._loading = True
        self._name = None
        self._load(data)

    @abstractmethod
    def _load(self, data):
        self._data = data if data is not None else {}
        self._loading = True

    def _finish(self, name):
        self._name = name
        self._loading = False

    @abstractmethod
    def to_dict(self):
        """ JSON-serializable representation. """

    def __repr__(self):
        return self.__str__()

    def __str__(self):
        return f"[{type(self).__name__}:{self._name}]"

    def __eq__(self, other):
        if type(self) is type(other):
            return self.to_dict() == other.to_dict()
        return NotImplemented

    def __hash__(self):
        return hash((type(self).__name__, str(self._name)))

    def __setattr__(self, key, value):
        if key.startswith("_") or self._loading:
            super().__setattr__(key, value)
        else:
            raise AttributeError("Attributes cannot be edited")

    def __delattr__(self, key):
        raise AttributeError("Attributes cannot be deleted")

    def _parse(self, data=None, attrs: Optional[Union[str, list]] = None, value_type: Any = "str",
               default_is_none: bool = False, is_list: bool = False, required: bool = False, key: Any = None):
        """ Validate the value given from the options given.

            Parameters:
                data (Any): Data to parse, defaults to the object's data.
                attrs (Optional[Union[str, list]]): check data for these attributes.
                value_type (Any): Type that the value is, either a type name or a :class:`SentGraphObj` subclass.
                default_is_none (bool): Makes default None.
                is_list (bool): value is list of values.
                required (bool): Raise instead of returning the default when the value is missing.
                key (Any): extra key passed to object constructors.

            Returns:
                Any: Parsed Value

            Raises:
                :class:`~sentgraph.exceptions.ValidationError`: When a required value is missing or has the wrong type.
        """
        if default_is_none is False and value_type in ["int", "float"]:
            default = 0
        elif default_is_none is False and is_list:
            default = []
        else:
            default = None

        value = self._data if data is None else data
        if attrs:
            if not isinstance(attrs, list):
                attrs = [attrs]
            for attr in attrs:
                if isinstance(value, dict) and attr in value:
                    value = value[attr]
                elif required:
                    raise ValidationError(f"{type(self).__name__}: missing required field '{'.'.join(attrs)}'")
                else:
                    return default

        if value is None:
            if required:
                raise ValidationError(f"{type(self).__name__}: field '{attrs}' cannot be null")
            return default
        try:
            if is_list:
                return [self._parse(data=v, value_type=value_type, default_is_none=default_is_none, key=key)
                        for v in value]
            elif isinstance(value_type, type) and issubclass(value_type, SentGraphObj):
                if isinstance(value, value_type):
                    return value
                return value_type(value) if key is None else value_type(value, key)
            elif value_type == "int":
                if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                    raise ValueError(f"{value!r} is not an integer")
                return int(value)
            elif value_type == "float":
                return float(value)
            elif value_type == "bool":
                if isinstance(value, bool):
                    return value
                elif str(value).lower() in ["t", "true", "1", "y", "yes"]:
                    return True
                elif str(value).lower() in ["f", "false", "0", "n", "no"]:
                    return False
                else:
                    return default
            elif value_type == "span":
                start, end = value
                return int(start), int(end)
            elif value_type == "vector":
                return frozen_array(value, ndim=1)
            elif value_type == "matrix":
                return frozen_array(value, ndim=2)
            elif value_type == "tensor":
                return frozen_array(value, ndim=3)
            elif value_type == "dict":
                return value
            else:
                return str(value)
        except (TypeError, ValueError) as e:
            raise ValidationError(f"{type(self).__name__}: invalid value for '{attrs}': {e}")


def frozen_array(value, ndim: Optional[int] = None) -> np.ndarray:
    """ Copies ``value`` into a read-only float array.

        Parameters:
            value (Any): Array-like input.
            ndim (Optional[int]): Required number of dimensions.

        Raises:
            :class:`~sentgraph.exceptions.Invalid`: When the dimensions do not match.
    """
    array = np.array(value, dtype=float)
    if ndim is not None and array.ndim != ndim:
        if array.size == 0 and ndim > 1:
            array = array.reshape((0,) * ndim)
        else:
            raise Invalid(f"Expected a {ndim}-dimensional array, got shape {array.shape}")
    array.flags.writeable = False
    return array
