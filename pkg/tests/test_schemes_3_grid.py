# -*- coding: utf-8 -*-

import pytest
import numpy as np

from sierpinski.geometry import GridSpec, TRIANGLE_BOX, cell_center, in_triangle
from sierpinski.schemes import (
    EscapeCriterion, Tent2D, ModTent2D, SineScheme, AutoSine, GasketScheme,
    escape_index, membership_grid,
)
from sierpinski.tests import CarpetBaseTest, assert_subset, unit_grid, in_carpet


def test_mod_tent_3x3():
    grid = membership_grid(ModTent2D(), EscapeCriterion.BothSimultaneous, unit_grid(3), 1)
    expected = np.zeros((3, 3), dtype=np.int32)
    expected[1, 1] = 1
    assert grid.cells.tolist() == expected.tolist()


def test_tent_any_3x3():
    grid = membership_grid(Tent2D(), EscapeCriterion.AnyCoordinate, unit_grid(3), 1)
    expected = np.ones((3, 3), dtype=np.int32)
    for j in (0, 2):
        for i in (0, 2):
            expected[j, i] = 0
    assert grid.cells.tolist() == expected.tolist()


@pytest.mark.parametrize("scheme", [Tent2D(), ModTent2D()])
def test_criterion_ordering(scheme):
    spec = unit_grid(81)
    any_ = membership_grid(scheme, EscapeCriterion.AnyCoordinate, spec, 4)
    eventually = membership_grid(scheme, EscapeCriterion.BothEventually, spec, 4)
    simultaneous = membership_grid(scheme, EscapeCriterion.BothSimultaneous, spec, 4)
    assert_subset(any_, eventually)
    assert_subset(eventually, simultaneous)


class TestClassicalCarpet(CarpetBaseTest):
    def test_matches_ternary_digits(self):
        for j in range(self.size):
            for i in range(self.size):
                assert self.grid.members[j, i] == in_carpet(i, j, self.depth)

    def test_member_count(self):
        assert self.grid.member_count == 8 ** self.depth

    def test_matches_scalar_escape_index(self):
        for j in range(0, self.size, 7):
            for i in range(0, self.size, 5):
                p = cell_center(self.grid.spec, i, j)
                index = escape_index(ModTent2D(), EscapeCriterion.BothSimultaneous, p, self.depth)
                assert self.grid.value_at(i, j) == (index or 0)


def test_workers_do_not_change_cells():
    spec = unit_grid(100)
    scheme = SineScheme(3, 4)
    one = membership_grid(scheme, EscapeCriterion.BothSimultaneous, spec, 5, workers=1)
    four = membership_grid(scheme, EscapeCriterion.BothSimultaneous, spec, 5, workers=4)
    assert one.same_cells(four)


def test_gasket_sentinel():
    spec = GridSpec(TRIANGLE_BOX, 64, 55)
    k = 5
    grid = membership_grid(GasketScheme.classical(), None, spec, k)
    for j in range(spec.height):
        for i in range(spec.width):
            inside = in_triangle(cell_center(spec, i, j))
            assert (grid.value_at(i, j) == k + 1) == (not inside)
    assert 0 < grid.member_count < int((~grid.outside).sum())


CARPET_SCHEMES = [Tent2D(), ModTent2D(), SineScheme(3, 3), AutoSine(3, 3)]


@pytest.mark.parametrize("criterion", list(EscapeCriterion))
@pytest.mark.parametrize("scheme", CARPET_SCHEMES)
def test_deeper_approximation_is_nested(scheme, criterion):
    spec = unit_grid(81)
    shallow = membership_grid(scheme, criterion, spec, 3)
    deep = membership_grid(scheme, criterion, spec, 5)
    escaped = shallow.cells > 0
    assert np.array_equal(deep.cells[escaped], shallow.cells[escaped])
    assert_subset(deep, shallow)


def test_deeper_gasket_is_nested():
    spec = GridSpec(TRIANGLE_BOX, 64, 55)
    shallow = membership_grid(GasketScheme.classical(), None, spec, 3)
    deep = membership_grid(GasketScheme.classical(), None, spec, 5)
    escaped = (shallow.cells > 0) & (shallow.cells <= 3)
    assert np.array_equal(deep.cells[escaped], shallow.cells[escaped])
    assert_subset(deep, shallow)


@pytest.mark.parametrize("criterion", list(EscapeCriterion))
@pytest.mark.parametrize("scheme", CARPET_SCHEMES)
def test_carpet_is_symmetric_in_x_and_y(scheme, criterion):
    grid = membership_grid(scheme, criterion, unit_grid(81), 4)
    assert np.array_equal(grid.cells, grid.cells.T)


def test_gasket_is_mirror_symmetric():
    grid = membership_grid(GasketScheme.classical(), None, GridSpec(TRIANGLE_BOX, 256, 222), 6)
    assert np.array_equal(grid.cells, grid.cells[:, ::-1])
    assert grid.member_count > 0


def test_errors():
    with pytest.raises(ValueError):
        membership_grid(ModTent2D(), EscapeCriterion.BothSimultaneous, unit_grid(3), 0)
    with pytest.raises(ValueError):
        membership_grid(ModTent2D(), None, unit_grid(3), 2)


if __name__ == "__main__":
    import os

    basename = os.path.basename(__file__)
    pytest.main([basename, "-s", "--tb=native"])
