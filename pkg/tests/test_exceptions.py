def test_base_exception_exists():
    from stiefel_tim.exceptions import StiefelTimError

    exc = StiefelTimError("test")
    assert str(exc) == "test"


def test_hierarchy():
    from stiefel_tim.exceptions import (
        ConfigurationError,
        DimensionError,
        InputError,
        MalformedInstanceError,
        RankDeficiencyError,
        RankSearchExhaustedError,
        RetractionError,
        StiefelTimError,
    )

    assert issubclass(ConfigurationError, StiefelTimError)
    assert issubclass(MalformedInstanceError, InputError)
    assert issubclass(RetractionError, RankDeficiencyError)
    assert issubclass(DimensionError, StiefelTimError)
    assert issubclass(RankSearchExhaustedError, StiefelTimError)


def test_input_error_with_path():
    from stiefel_tim.exceptions import InputError

    exc = InputError("Cannot read topology file", path="/tmp/net.json")
    assert exc.path == "/tmp/net.json"
    assert str(exc) == "Cannot read topology file: /tmp/net.json"


def test_input_error_without_path():
    from stiefel_tim.exceptions import InputError

    assert str(InputError("bad")) == "bad"


def test_malformed_instance_error_prefixes_field():
    from stiefel_tim.exceptions import MalformedInstanceError

    exc = MalformedInstanceError("expected 3 stream counts", field="d", path="net.json")
    assert exc.field == "d"
    assert str(exc) == "d: expected 3 stream counts: net.json"


def test_dimension_error_shapes():
    from stiefel_tim.exceptions import DimensionError

    exc = DimensionError("X must be m×n", expected=(3, 9), actual=(3, 8))
    assert exc.expected == (3, 9)
    assert exc.actual == (3, 8)
    assert "expected=(3, 9)" in str(exc)
    assert "actual=(3, 8)" in str(exc)


def test_retraction_error_step():
    from stiefel_tim.exceptions import RetractionError

    assert RetractionError("left the manifold", step=0.5).step == 0.5


def test_rank_search_exhausted_per_rank_default():
    from stiefel_tim.exceptions import RankSearchExhaustedError

    assert RankSearchExhaustedError("none").per_rank == []
    exc = RankSearchExhaustedError("none", per_rank=[{"rank": 1}])
    assert exc.per_rank == [{"rank": 1}]
