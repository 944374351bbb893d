import pytest
import torch

from cnn_harness import (ModelSpec, ShapeError, build_model,
                         conv_parameter_count, parameter_count, shape_trace)

EXPECTED_TRACE = [(32, 32, 32), (32, 32, 64), (16, 16, 64), (16, 16, 128),
                  (16, 16, 256), (8, 8, 256), (256,), (40,)]


@pytest.mark.parametrize("s", [3, 5])
def test_shape_trace(s):
    assert shape_trace(build_model(ModelSpec(s))) == EXPECTED_TRACE


def test_forward_is_probability_simplex():
    model = build_model(ModelSpec(3))
    model.eval()
    with torch.no_grad():
        out = model(torch.zeros(1, 10, 32, 32))
    assert out.shape == (1, 40)
    assert abs(out.sum().item() - 1.0) < 1e-5
    assert (out >= 0).all()


def test_batch_of_seven():
    model = build_model(ModelSpec(5))
    model.eval()
    with torch.no_grad():
        out = model(torch.randn(7, 10, 32, 32))
    assert out.shape == (7, 40)


def test_wrong_input_shape_rejected():
    model = build_model(ModelSpec(3))
    with pytest.raises(ShapeError):
        model(torch.zeros(1, 10, 16, 16))
    with pytest.raises(ShapeError):
        model(torch.zeros(1, 9, 32, 32))


def test_invalid_kernel_size_rejected():
    with pytest.raises(ShapeError):
        ModelSpec(kernel_size=4)


def test_parameter_counts_scale_by_kernel_area():
    m3 = build_model(ModelSpec(3))
    m5 = build_model(ModelSpec(5))
    # only conv weights depend on the kernel; everything else is identical
    channel_products = 10 * 32 + 32 * 64 + 64 * 128 + 128 * 256
    assert (conv_parameter_count(m5, include_bias=False)
            == channel_products * 25)
    assert (conv_parameter_count(m3, include_bias=False)
            == channel_products * 9)
    assert (parameter_count(m5) - parameter_count(m3)
            == channel_products * (25 - 9))
