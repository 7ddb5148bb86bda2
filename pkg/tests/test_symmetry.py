import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symcurrents.grid import ComplexField
from symcurrents.grid import Grid
from symcurrents.grid import integrate
from symcurrents.grid import laplacian
from symcurrents.symmetry import SpatialTransform
from symcurrents.symmetry import TransformKind
from symcurrents.symmetry import apply_transform
from symcurrents.symmetry import compose
from symcurrents.symmetry import invert
from symcurrents.symmetry import make_transform
from symcurrents.utils import GridMismatch
from symcurrents.utils import IncompatibleGrid
from symcurrents.utils import NonIntegerOffset
from tests.utils import random_field


class TestParity:
    def test_dirichlet_parity_reverses_the_axis(self, small_box, parity):
        (x,) = small_box.coordinates()
        flipped = apply_transform(parity, ComplexField(small_box, x))
        np.testing.assert_allclose(flipped.values.real, -x, atol=1e-12)
        assert parity.order() == 2

    def test_periodic_parity_about_a_grid_point(self, small_ring):
        F = make_transform("parity", small_ring, center=[0.0])
        (x,) = small_ring.coordinates()
        f = ComplexField(small_ring, np.cos(np.pi * x / 4) + 1j * np.sin(np.pi * x / 4))
        np.testing.assert_allclose(apply_transform(F, f).values, np.conj(f.values), atol=1e-12)

    def test_periodic_parity_about_a_half_cell(self, small_ring):
        F = make_transform("parity", small_ring, center=[0.125])
        assert F.order() == 2
        assert not F.is_identity

    def test_off_center_dirichlet_parity(self, small_box):
        with pytest.raises(IncompatibleGrid):
            make_transform("parity", small_box, center=[0.4])

    def test_center_off_the_lattice(self, small_ring):
        with pytest.raises(IncompatibleGrid):
            make_transform("parity", small_ring, center=[0.1])

    def test_center_length(self, small_ring):
        with pytest.raises(IncompatibleGrid):
            make_transform("parity", small_ring, center=[0.0, 0.0])


class TestTranslation:
    def test_shift_by_whole_cells(self, small_ring, rng):
        F = make_transform("translation", small_ring, offset=[8])
        f = random_field(small_ring, rng)
        np.testing.assert_array_equal(
            apply_transform(F, f).values, np.roll(f.values, -8)
        )
        assert F.offset == (8,)
        assert F.order() == 4

    def test_dirichlet_axis(self, small_box):
        with pytest.raises(IncompatibleGrid):
            make_transform("translation", small_box, offset=[2])

    def test_zero_offset_on_dirichlet_axis_is_allowed(self, small_box):
        assert make_transform("translation", small_box, offset=[0]).is_identity

    def test_fractional_offset(self, small_ring):
        with pytest.raises(NonIntegerOffset):
            make_transform("translation", small_ring, offset=[1.5])

    def test_missing_offset(self, small_ring):
        with pytest.raises(IncompatibleGrid):
            make_transform("translation", small_ring)

    @given(a=st.integers(-64, 64), b=st.integers(-64, 64))
    def test_composed_offsets_add(self, a, b):
        grid = Grid.from_bounds([0.0], [8.0], [32], ["periodic"])
        F = make_transform("translation", grid, offset=[a])
        G = make_transform("translation", grid, offset=[b])
        composed = compose(F, G)
        if (a + b) % 32 == 0:
            assert composed.kind is TransformKind.identity
        else:
            assert composed.offset == ((a + b) % 32,)


class TestRotation:
    def test_quarter_turn_maps_x_to_minus_y(self, square):
        F = make_transform("rotation90", square)
        x, y = square.coordinates()
        turned = apply_transform(F, ComplexField(square, x))
        np.testing.assert_allclose(turned.values.real, -y, atol=1e-12)
        assert F.order() == 4

    def test_half_turn_is_parity(self, square):
        half = make_transform("rotation90", square, quarter_turns=2)
        parity = make_transform("parity", square, center=[0.0, 0.0])
        assert half == parity

    def test_turns_compose(self, square):
        F = make_transform("rotation90", square)
        three = compose(F, compose(F, F))
        assert three.quarter_turns == 3
        assert three == make_transform("rotation90", square, quarter_turns=3)

    def test_needs_a_square_grid(self):
        grid = Grid.from_bounds([-1.0, -1.0], [1.0, 2.0], [8, 12], ["periodic"] * 2)
        with pytest.raises(IncompatibleGrid):
            make_transform("rotation90", grid)

    def test_needs_two_dimensions(self, small_ring):
        with pytest.raises(IncompatibleGrid):
            make_transform("rotation90", small_ring)

    def test_dirichlet_square(self):
        grid = Grid.from_bounds([-1.0, -1.0], [1.0, 1.0], [7, 7], ["dirichlet"] * 2)
        F = make_transform("rotation90", grid)
        assert F.order() == 4
        with pytest.raises(IncompatibleGrid):
            make_transform("rotation90", grid, center=[0.25, 0.25])

    def test_center_off_the_lattice(self, square):
        with pytest.raises(IncompatibleGrid):
            make_transform("rotation90", square, center=[0.1, 0.1])

    def test_shifted_center(self, square):
        F = make_transform("rotation90", square, center=[0.375, 0.0])
        x, y = square.coordinates()
        turned = apply_transform(F, ComplexField(square, x))
        # x -> c0 + c1 - y, wrapped onto the period
        expected = (0.375 - y - square.origin[0]) % square.extent(0) + square.origin[0]
        np.testing.assert_allclose(turned.values.real, expected, atol=1e-12)

    def test_quarter_turn_count(self, square):
        with pytest.raises(IncompatibleGrid):
            make_transform("rotation90", square, quarter_turns=4)


class TestAlgebra:
    @pytest.mark.parametrize(
        "kind,kwargs",
        [
            ("parity", {"center": [0.25]}),
            ("translation", {"offset": [5]}),
            ("identity", {}),
        ],
    )
    def test_inverse_undoes_the_map(self, small_ring, rng, kind, kwargs):
        F = make_transform(kind, small_ring, **kwargs)
        f = random_field(small_ring, rng)
        back = apply_transform(invert(F), apply_transform(F, f))
        np.testing.assert_array_equal(back.values, f.values)
        assert compose(F, invert(F)).is_identity

    def test_rotation_inverse(self, square):
        F = make_transform("rotation90", square)
        assert invert(F).quarter_turns == 3
        assert compose(F, invert(F)).kind is TransformKind.identity

    def test_composition_order(self, small_ring, rng):
        F = make_transform("parity", small_ring)
        G = make_transform("translation", small_ring, offset=[3])
        f = random_field(small_ring, rng)
        composed = compose(F, G)
        assert composed.kind is TransformKind.composite
        np.testing.assert_array_equal(
            apply_transform(composed, f).values,
            apply_transform(G, apply_transform(F, f)).values,
        )

    def test_cannot_build_a_composite_directly(self, small_ring):
        with pytest.raises(IncompatibleGrid):
            make_transform("composite", small_ring)

    def test_permutation_must_be_a_bijection(self, small_ring):
        with pytest.raises(IncompatibleGrid):
            SpatialTransform(TransformKind.composite, small_ring, np.zeros(32))

    def test_grid_mismatch(self, small_ring, ring, rng):
        F = make_transform("parity", small_ring)
        with pytest.raises(GridMismatch):
            apply_transform(F, random_field(ring, rng))
        with pytest.raises(GridMismatch):
            compose(F, make_transform("parity", ring))

    def test_batched_application(self, small_ring, rng):
        F = make_transform("translation", small_ring, offset=[1])
        stack = np.stack([random_field(small_ring, rng).values for _ in range(3)])
        np.testing.assert_array_equal(F.apply_values(stack), np.roll(stack, -1, axis=-1))


def build_transform(request, grid_name, kind, kwargs):
    grid = request.getfixturevalue(grid_name) if isinstance(grid_name, str) else grid_name
    if kind == "composite":
        return compose(
            make_transform("parity", grid, center=[0.125]),
            make_transform("translation", grid, offset=[3]),
        )
    return make_transform(kind, grid, **kwargs)


TRANSFORMS = [
    ("small_box", "parity", {}),
    ("small_ring", "parity", {"center": [0.125]}),
    ("small_ring", "translation", {"offset": [5]}),
    ("small_ring", "identity", {}),
    ("small_ring", "composite", {}),
    ("square", "rotation90", {}),
    ("square", "rotation90", {"quarter_turns": 3}),
    ("square", "parity", {"center": [0.0, 0.0]}),
    (
        Grid.from_bounds([-1.0, -1.0], [1.0, 1.0], [7, 7], ["dirichlet"] * 2),
        "rotation90",
        {},
    ),
]


@pytest.mark.parametrize("grid_name,kind,kwargs", TRANSFORMS)
class TestInvariants:
    def test_volume_is_preserved(self, request, rng, grid_name, kind, kwargs):
        F = build_transform(request, grid_name, kind, kwargs)
        f = random_field(F.grid, rng)
        expected = pytest.approx(integrate(f), rel=1e-12, abs=1e-12)
        assert integrate(apply_transform(F, f)) == expected

    def test_commutes_with_the_laplacian(self, request, rng, grid_name, kind, kwargs):
        F = build_transform(request, grid_name, kind, kwargs)
        f = random_field(F.grid, rng)
        np.testing.assert_allclose(
            laplacian(apply_transform(F, f)).values,
            apply_transform(F, laplacian(f)).values,
            atol=1e-10,
        )
