import pytest

from prefattach import attachment
from prefattach import distributions
from prefattach import registry
from prefattach.domain import GrowthMode


def test_model_presets_are_valid() -> None:
    for preset in registry.get("model"):
        attachment.create(preset["attachment"], preset["default"])
        GrowthMode(preset["mode"])
        if preset["degree_distribution"]:
            distributions.get(preset["degree_distribution"])


def test_parameterised_presets_have_defaults() -> None:
    for preset in registry.get("model"):
        assert (preset["parameter"] is None) == (preset["default"] is None)


def test_model_lookup() -> None:
    assert registry.model("redner")["parameter"] == "beta"
    assert registry.model("krapivsky")["attachment"] == "log_linear"
    with pytest.raises(KeyError):
        registry.model("erdos")


def test_model_index_is_cached() -> None:
    registry.model("price")
    index = registry.get("model_by_name")
    assert set(index) == {preset["name"] for preset in registry.get("model")}
    assert registry.model("jeong") is index["jeong"]
