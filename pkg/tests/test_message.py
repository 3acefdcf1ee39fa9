import pytest

from layercast import LayeredMessage


def test_window_sizes_accumulate():
    msg = LayeredMessage((5, 10, 15))
    assert msg.layer_count == 3
    assert msg.window_sizes == (5, 15, 30)
    assert msg.total_packets == 30


def test_single_layer():
    msg = LayeredMessage((4,))
    assert msg.window_sizes == (4,)


def test_rejects_empty_and_nonpositive():
    with pytest.raises(ValueError):
        LayeredMessage(())
    with pytest.raises(ValueError):
        LayeredMessage((3, 0))
    with pytest.raises(ValueError):
        LayeredMessage((-1,))


def test_immutable():
    msg = LayeredMessage((2, 3))
    with pytest.raises(Exception):
        msg.layer_sizes = (1, 1)
