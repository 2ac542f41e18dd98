from __future__ import annotations

import json
from pathlib import Path
from typing import Any
from typing import Dict
from typing import List
from typing import Union


try:
    from importlib.resources import files
except ImportError:
    from importlib_resources import files  # type: ignore


Key = Union[str, tuple]
Value = Union[Dict[Key, Any], List[Dict[Key, Any]]]

_registry: dict[Key, Value] = {}


def has(name: Key) -> bool:
    return name in _registry


def get(name: Key) -> Value:
    """Load the registry ``name`` from the JSON files in ``<name>_registry/`` on first access.

    List-valued chunks are concatenated in file name order, dict-valued chunks are merged with
    later files taking precedence.
    """
    if has(name):
        return _registry[name]

    data: Value | None = None
    directory = files(__package__) / f"{name}_registry"
    assert isinstance(directory, Path)
    for entry in sorted(directory.glob("*.json")):
        with entry.open(encoding="utf-8") as fp:
            chunk = json.load(fp)
        if data is None:
            data = chunk
        elif isinstance(data, list):
            data.extend(chunk)
        else:
            data.update(chunk)
    if data is None:
        raise ValueError(f"Failed to load registry {name}")
    return save(name, data)


def save(name: Key, data: Value) -> Value:
    _registry[name] = data
    return data


def build_index(base_name: str, index_name: str, key: str) -> None:
    base = get(base_name)
    assert isinstance(base, list)
    save(index_name, {entry[key]: entry for entry in base})


def model(name: str) -> dict[str, Any]:
    """Look up a growing-network model preset by name.

    Examples:

        >>> model("callaway")["attachment"]
        'uniform'
    """
    if not has("model_by_name"):
        build_index("model", "model_by_name", key="name")
    index = get("model_by_name")
    assert isinstance(index, dict)
    try:
        return index[name]
    except KeyError as e:
        raise KeyError(f"Unknown model '{name}', expected one of {sorted(index)}") from e
