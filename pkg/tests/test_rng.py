import numpy as np
import pytest

from cirmc.rng import RngStream, as_generator


def test_same_seed_same_stream_reproduces():
    a = RngStream(seed=42, stream_id=3).generator.random(16)
    b = RngStream(seed=42, stream_id=3).generator.random(16)
    assert np.array_equal(a, b)


def test_distinct_stream_ids_differ():
    a = RngStream(seed=42, stream_id=0).generator.random(16)
    b = RngStream(seed=42, stream_id=1).generator.random(16)
    assert not np.array_equal(a, b)


def test_distinct_seeds_differ():
    a = RngStream(seed=1).generator.random(16)
    b = RngStream(seed=2).generator.random(16)
    assert not np.array_equal(a, b)


def test_as_generator_passthrough():
    gen = np.random.default_rng(0)
    assert as_generator(gen) is gen
    stream = RngStream(seed=7)
    assert as_generator(stream) is stream.generator


def test_as_generator_rejects_other_types():
    with pytest.raises(TypeError):
        as_generator(12345)
    with pytest.raises(TypeError):
        as_generator(None)


@pytest.mark.parametrize("bad", [-1, 2**64, 1.5, "0"])
def test_seed_validation(bad):
    with pytest.raises(ValueError):
        RngStream(seed=bad)


def test_stream_id_validation():
    with pytest.raises(ValueError):
        RngStream(seed=0, stream_id=-2)
    # numpy integer types are fine
    RngStream(seed=np.int64(5), stream_id=np.uint32(2))
