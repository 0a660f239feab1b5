"""Update schedules: constructors, reversal, validation."""
import numpy as np
import pytest

from dpavf.grid import GridSpec
from dpavf.ordering import (Phase, UpdateSchedule, block_split_schedule,
                            checkerboard_schedule, lexicographic_schedule,
                            random_schedule, reverse_schedule,
                            validate_schedule)


def _grids():
    return [GridSpec(1, 0.0, 1.0, 8), GridSpec(2, 0.0, 1.0, 8),
            GridSpec(3, 0.0, 1.0, 4)]


class TestLexicographic:
    def test_forward_rank_identity(self):
        g = GridSpec(2, 0.0, 1.0, 4)
        s = lexicographic_schedule(g, forward=True)
        assert np.array_equal(s.rank, np.arange(16))
        assert np.array_equal(s.serial_order(), np.arange(16))

    def test_reverse_rank(self):
        g = GridSpec(2, 0.0, 1.0, 4)
        s = lexicographic_schedule(g, forward=False)
        assert np.array_equal(s.rank, 15 - np.arange(16))

    def test_reverse_of_forward_is_reverse(self):
        g = GridSpec(2, 0.0, 1.0, 4)
        fwd = lexicographic_schedule(g, forward=True)
        rev = lexicographic_schedule(g, forward=False)
        assert np.array_equal(reverse_schedule(fwd).rank, rev.rank)


class TestRandom:
    def test_deterministic(self):
        g = GridSpec(2, 0.0, 1.0, 8)
        a = random_schedule(g, 42)
        b = random_schedule(g, 42)
        assert np.array_equal(a.rank, b.rank)

    def test_is_permutation(self):
        g = GridSpec(2, 0.0, 1.0, 4)
        s = random_schedule(g, 5)
        assert sorted(s.rank) == list(range(16))

    def test_distinct_seeds_differ(self):
        g = GridSpec(2, 0.0, 1.0, 8)
        assert not np.array_equal(random_schedule(g, 1).rank,
                                  random_schedule(g, 2).rank)


class TestBlockSplit:
    def test_phase_structure_n8_w2(self):
        g = GridSpec(2, 0.0, 1.0, 8)
        s = block_split_schedule(g, 2)
        boundary, blocks, seps = s.phases
        assert not boundary.parallel and blocks.parallel and not seps.parallel
        assert sum(len(l) for l in boundary.lanes) == 8
        assert len(blocks.lanes) == 2
        assert sum(len(l) for l in blocks.lanes) == 40  # 5 slabs of 8
        assert [len(l) for l in seps.lanes] == [8, 8]
        assert sum(len(l) for p in s.phases for l in p.lanes) == 64

    def test_workers_1_degenerate(self):
        g = GridSpec(2, 0.0, 1.0, 8)
        s = block_split_schedule(g, 1)
        assert len(s.phases) == 3
        assert validate_schedule(s, g) is None

    def test_too_many_workers(self):
        g = GridSpec(2, 0.0, 1.0, 8)
        with pytest.raises(ValueError, match="N >= 10"):
            block_split_schedule(g, 3)

    def test_block_x_neighbors_never_cross_blocks(self):
        g = GridSpec(2, 0.0, 1.0, 16)
        s = block_split_schedule(g, 4)
        blocks = s.phases[1].lanes
        owner = {}
        for li, lane in enumerate(blocks):
            for i in lane:
                owner[int(i)] = li
        nbrs = g.neighbor_table()
        for li, lane in enumerate(blocks):
            for i in lane:
                for j in nbrs[i][:2]:  # +-x neighbors
                    assert owner.get(int(j), li) == li


class TestCheckerboard:
    def test_counts_2d(self):
        g = GridSpec(2, 0.0, 1.0, 4)
        s = checkerboard_schedule(g)
        red, blue = s.phases
        assert sum(len(l) for l in red.lanes) == 8
        assert sum(len(l) for l in blue.lanes) == 8

    def test_counts_3d(self):
        g = GridSpec(3, 0.0, 1.0, 4)
        s = checkerboard_schedule(g)
        assert sum(len(l) for l in s.phases[0].lanes) == 32
        assert sum(len(l) for l in s.phases[1].lanes) == 32

    def test_neighbors_alternate_color(self):
        g = GridSpec(2, 0.0, 1.0, 6)
        s = checkerboard_schedule(g)
        red = set(int(i) for l in s.phases[0].lanes for i in l)
        nbrs = g.neighbor_table()
        for i in red:
            for j in nbrs[i]:
                assert int(j) not in red

    def test_red_first(self):
        g = GridSpec(2, 0.0, 1.0, 4)
        s = checkerboard_schedule(g)
        parity = np.indices(g.shape).sum(axis=0).ravel() % 2
        for lane in s.phases[0].lanes:
            assert np.all(parity[lane] == 1)

    def test_odd_n_rejected(self):
        with pytest.raises(ValueError, match="even N"):
            checkerboard_schedule(GridSpec(2, 0.0, 1.0, 5))

    def test_worker_striping_covers(self):
        g = GridSpec(2, 0.0, 1.0, 8)
        s = checkerboard_schedule(g, workers=4)
        assert len(s.phases[0].lanes) == 4
        assert validate_schedule(s, g) is None


class TestReverse:
    @pytest.mark.parametrize("build", [
        lambda g: lexicographic_schedule(g, True),
        lambda g: random_schedule(g, 3),
        lambda g: block_split_schedule(g, 2),
        lambda g: checkerboard_schedule(g),
    ])
    def test_involution(self, build):
        g = GridSpec(2, 0.0, 1.0, 8)
        s = build(g)
        rr = reverse_schedule(reverse_schedule(s))
        assert np.array_equal(rr.rank, s.rank)
        for pa, pb in zip(rr.phases, s.phases):
            assert pa.parallel == pb.parallel
            for la, lb in zip(pa.lanes, pb.lanes):
                assert np.array_equal(la, lb)

    def test_rank_mirror(self):
        g = GridSpec(2, 0.0, 1.0, 4)
        s = random_schedule(g, 9)
        assert np.array_equal(reverse_schedule(s).rank, 15 - s.rank)

    def test_checkerboard_blue_first(self):
        g = GridSpec(2, 0.0, 1.0, 4)
        rev = reverse_schedule(checkerboard_schedule(g))
        parity = np.indices(g.shape).sum(axis=0).ravel() % 2
        for lane in rev.phases[0].lanes:
            assert np.all(parity[lane] == 0)  # blue now leads


class TestValidate:
    @pytest.mark.parametrize("grid", _grids())
    def test_constructors_pass(self, grid):
        builders = [lambda g: lexicographic_schedule(g, True),
                    lambda g: lexicographic_schedule(g, False),
                    lambda g: random_schedule(g, 11),
                    lambda g: checkerboard_schedule(g),
                    lambda g: block_split_schedule(g, 2 if g.N >= 7 else 1)]
        for build in builders:
            s = build(grid)
            assert validate_schedule(s, grid) is None
            assert s.validated

    def test_duplicate_index_named(self):
        g = GridSpec(1, 0.0, 1.0, 4)
        order = np.array([0, 1, 1, 3], dtype=np.int64)
        s = UpdateSchedule("lexicographic-forward", np.arange(4),
                           [Phase(False, [order])])
        report = validate_schedule(s, g)
        assert report is not None and "1" in report and "coverage" in report

    def test_missing_index_named(self):
        g = GridSpec(1, 0.0, 1.0, 4)
        order = np.array([0, 1, 3], dtype=np.int64)
        s = UpdateSchedule("lexicographic-forward", np.arange(4),
                           [Phase(False, [order])])
        assert "3 points" in validate_schedule(s, g)

    def test_bad_rank(self):
        g = GridSpec(1, 0.0, 1.0, 4)
        s = UpdateSchedule("lexicographic-forward",
                           np.array([0, 0, 2, 3], dtype=np.int64),
                           [Phase(False, [np.arange(4, dtype=np.int64)])])
        assert "permutation" in validate_schedule(s, g)

    def test_cross_lane_stencil_violation(self):
        # 2x4 grid; two lanes in one parallel phase where lane B holds a
        # stencil neighbor of lane A's point.
        g = GridSpec(2, 0.0, 1.0, 4)  # 16 points; use first two rows only
        laneA = np.array([0, 1, 2, 3, 8, 9, 10, 11], dtype=np.int64)
        laneB = np.array([4, 5, 6, 7, 12, 13, 14, 15], dtype=np.int64)
        order = np.concatenate([laneA, laneB])
        rank = np.empty(16, dtype=np.int64)
        rank[order] = np.arange(16)
        s = UpdateSchedule("block-split", rank,
                           [Phase(True, [laneA, laneB])])
        report = validate_schedule(s, g)
        assert report is not None and "phase-safety" in report
        assert not s.validated
