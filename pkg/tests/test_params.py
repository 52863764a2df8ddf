import pytest

from twolin.params import Params, State, split_point


def test_split_point_basic():
    assert split_point(0.5, 10) == 5
    assert split_point(0.0, 10) == 0
    assert split_point(1.0, 10) == 10
    assert split_point(0.33, 10) == 3


def test_split_point_float_snap():
    # 0.7 * 10 and 0.3 * 20 are just below the integer in binary floats
    assert split_point(0.7, 10) == 7
    assert split_point(0.3, 20) == 6
    assert split_point(0.7, 20) == 14


@pytest.mark.parametrize("chi,rho,ell,n", [
    (0.0, 0.5, 0.5, 10),
    (-1.0, 0.5, 0.5, 10),
    (1.0, -0.1, 0.5, 10),
    (1.0, 1.1, 0.5, 10),
    (1.0, 0.5, -0.1, 10),
    (1.0, 0.5, 1.5, 10),
    (1.0, 0.5, 0.5, 1),
])
def test_params_validation(chi, rho, ell, n):
    with pytest.raises(ValueError):
        Params(chi, rho, ell, n)


def test_part_lengths():
    p = Params(2.0, 0.5, 0.25, 12)
    assert p.left_len == 3
    assert p.right_len == 9
    assert p.left_len + p.right_len == p.n
    assert p.flip_prob == 2.0 / 12


def test_state_bounds():
    p = Params(1.0, 0.5, 0.5, 10)
    State(5, 5).check_bounds(p)
    with pytest.raises(ValueError):
        State(6, 0).check_bounds(p)
    with pytest.raises(ValueError):
        State(-1, 0)
    assert State(0, 0).is_optimum()
    assert not State(1, 0).is_optimum()
    assert State(2, 3).total == 5
