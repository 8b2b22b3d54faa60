import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magictri.symmetry import (
    GROUP,
    SymmetryElement as G,
    apply,
    canonical,
    canonical_array,
    cell_map,
    orbit,
    position_classes,
)
from magictri.triangle import TriangleArrangement, cells_of_line, is_magic

from .conftest import P16, geometric_cell_map
from .test_triangle import arrangements

T4 = TriangleArrangement(2, (1, 2, 3, 4))


def line_multiset(t, family, k):
    return sorted(t[i] for i in cells_of_line(t.n, family, k))


class TestApply:
    def test_examples(self):
        assert apply(G.ROT120, T4).entries == (4, 2, 1, 3)
        assert apply(G.REFLECT, T4).entries == (3, 2, 1, 4)
        p16 = TriangleArrangement(4, P16)
        assert apply(G.IDENTITY, p16) == p16

    @pytest.mark.parametrize("n", range(1, 7))
    def test_matches_plane_motion(self, n):
        # rot120 is a counterclockwise turn, rot240 clockwise, reflect a mirror
        # in the vertical altitude; compositions apply the rotation first
        cases = {
            G.IDENTITY: (0, False),
            G.ROT120: (120, False),
            G.ROT240: (-120, False),
            G.REFLECT: (0, True),
        }
        for g, (angle, refl) in cases.items():
            assert list(cell_map(n, g)) == list(geometric_cell_map(n, angle, refl))
        rot_then_reflect = geometric_cell_map(n, 0, True)[geometric_cell_map(n, 120)]
        assert list(cell_map(n, G.REFLECT_ROT120)) == list(rot_then_reflect)

    def test_group_closure_and_orders(self):
        for g in GROUP:
            for h in GROUP:
                assert g.compose(h) in GROUP
            assert g.compose(g.inverse()) is G.IDENTITY
        assert G.ROT120.compose(G.ROT120).compose(G.ROT120) is G.IDENTITY
        assert G.ROT120.compose(G.ROT120) is G.ROT240
        assert G.REFLECT.compose(G.REFLECT) is G.IDENTITY
        assert G.REFLECT.compose(G.ROT120) is G.REFLECT_ROT120

    @settings(max_examples=100, deadline=None)
    @given(arrangements(min_n=2, max_n=8))
    def test_rotation_duality(self, t):
        ccw = apply(G.ROT120, t)
        cw = apply(G.ROT240, t)
        for d in range(1, t.n + 1):
            assert line_multiset(t, "posdiag", d) == line_multiset(ccw, "row", d)
            assert line_multiset(t, "negdiag", d) == line_multiset(cw, "row", d)

    @settings(max_examples=100, deadline=None)
    @given(arrangements(min_n=1, max_n=7), st.sampled_from(GROUP), st.sampled_from(GROUP))
    def test_action_law(self, t, g, h):
        assert apply(g, apply(h, t)) == apply(g.compose(h), t)

    @settings(max_examples=100, deadline=None)
    @given(arrangements(min_n=1, max_n=6), st.sampled_from(GROUP))
    def test_magic_invariant(self, t, g):
        assert is_magic(t) == is_magic(apply(g, t))

    @pytest.mark.parametrize("g", GROUP)
    def test_magic_invariant_on_p16(self, g):
        assert is_magic(apply(g, TriangleArrangement(4, P16)))


class TestOrbit:
    def test_two_level_orbit(self):
        expected = {(1, 2, 3, 4), (3, 2, 1, 4), (4, 2, 1, 3), (3, 2, 4, 1), (1, 2, 4, 3), (4, 2, 3, 1)}
        assert {o.entries for o in orbit(T4)} == expected

    def test_single_cell_orbit_is_degenerate(self):
        assert [o.entries for o in orbit(TriangleArrangement(1, (1,)))] == [(1,)] * 6

    @settings(max_examples=100, deadline=None)
    @given(arrangements(min_n=2, max_n=7))
    def test_free_action(self, t):
        assert len({o.entries for o in orbit(t)}) == 6

    def test_paired_sum_families_permute(self):
        from magictri.triangle import paired_sums

        t = TriangleArrangement.identity(3)
        def fams(s):
            return sorted([s.h, s.p, s.q])

        for o in orbit(t):
            assert fams(paired_sums(o)) == fams(paired_sums(t))


class TestCanonical:
    def test_examples(self):
        assert canonical(TriangleArrangement(2, (4, 2, 1, 3))).entries == (1, 2, 3, 4)
        assert canonical(TriangleArrangement(2, (2, 1, 3, 4))).entries == (2, 1, 3, 4)

    @settings(max_examples=100, deadline=None)
    @given(arrangements(min_n=1, max_n=6), st.sampled_from(GROUP))
    def test_idempotent_and_orbit_constant(self, t, g):
        c = canonical(t)
        assert canonical(c) == c
        assert canonical(apply(g, t)) == c
        assert c.entries == min(o.entries for o in orbit(t))

    def test_vectorised_agrees(self):
        rng = np.random.default_rng(7)
        for n in (2, 3, 4, 5):
            batch = np.array([rng.permutation(n * n) + 1 for _ in range(200)])
            got = canonical_array(n, batch)
            for row, c in zip(batch, got):
                assert tuple(c) == canonical(TriangleArrangement(n, tuple(row))).entries


class TestPositionClasses:
    def test_three_level(self):
        pc = position_classes(3)
        assert pc.members("corner") == {1, 5, 9}
        assert pc.members("border") == {3, 6, 8}
        assert pc.members("interior") == {2, 4, 7}
        assert pc.members("center") == set()

    def test_four_level(self):
        pc = position_classes(4)
        assert pc.members("corner") == {1, 7, 16}
        assert pc.members("border") == {3, 4, 5, 8, 9, 13, 11, 12, 15}
        assert pc.members("interior") == {2, 6, 14}
        assert pc.members("center") == {10}

    def test_two_level(self):
        pc = position_classes(2)
        assert pc.members("corner") == {1, 3, 4}
        assert pc.members("center") == {2}

    @pytest.mark.parametrize("n", range(2, 9))
    def test_corners_and_invariance(self, n):
        pc = position_classes(n)
        assert pc.members("corner") == {1, 2 * n - 1, n * n}
        for g in GROUP:
            dest = cell_map(n, g)
            for i in range(n * n):
                assert pc.labels[i] == pc.labels[dest[i]]
        cells = sorted(c for orb in pc.orbits for c in orb)
        assert cells == list(range(1, n * n + 1))
