import pytest

from colouring_lab.schemas import EnumerationSchema, ExperimentConfig, MonteCarloSchema, SolverSchema
from colouring_lab.utils import format_colours, iter_bits, make_rng, mask_of, within_slack


def test_make_rng_streams_are_reproducible():
    a = make_rng(7, 3).integers(1 << 30, size=5)
    b = make_rng(7, 3).integers(1 << 30, size=5)
    c = make_rng(7, 4).integers(1 << 30, size=5)
    assert list(a) == list(b)
    assert list(a) != list(c)


def test_make_rng_rejects_negative_seed():
    with pytest.raises(ValueError):
        make_rng(-1)


def test_bits():
    assert mask_of([0, 3]) == 0b1001
    assert list(iter_bits(0b10110)) == [1, 2, 4]
    assert list(iter_bits(0)) == []


def test_within_slack():
    assert within_slack(1.0, 1.0)
    assert within_slack(1.0 + 1e-14, 1.0)
    assert not within_slack(1.001, 1.0)


def test_format_colours():
    assert format_colours((1, 0, 2)) == "1,0,2"


def test_schema_defaults():
    assert EnumerationSchema().guard == 2**24
    assert MonteCarloSchema().trials == 100_000
    assert SolverSchema().ball_radius == 2
    assert SolverSchema(guard=10).enumeration.guard == 10


def test_schema_validation():
    with pytest.raises(ValueError):
        EnumerationSchema(guard=0)
    with pytest.raises(ValueError):
        MonteCarloSchema(trials=0)
    with pytest.raises(ValueError):
        SolverSchema(max_resamples=-1)


def test_experiment_config():
    config = ExperimentConfig(command="lottery", seed=42, params={"n": 100})
    data = config.json
    assert data["seed"] == 42
    assert data["params"] == {"n": 100}
    assert data["monte_carlo"]["trials"] == 100_000
    with pytest.raises(ValueError):
        ExperimentConfig(seed=2**64)
    with pytest.raises(ValueError):
        ExperimentConfig(output_format="xml")
