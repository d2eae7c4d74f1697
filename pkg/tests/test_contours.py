import json

import numpy as np
import pytest

from bodymask.contours import (
    FILL,
    ContourSelectionError,
    contours_to_json,
    draw_contours,
    find_contours,
    select_contours,
)
from bodymask.image_model import BinaryMask2D
from bodymask.morphology import fill_holes

from oracles import random_blob_mask


def mask_of(rows):
    return BinaryMask2D(np.array(rows, dtype=np.uint8))


def solid_block():
    m = np.zeros((7, 7), dtype=np.uint8)
    m[2:5, 2:5] = 1
    return BinaryMask2D(m)


def ring():
    m = np.zeros((7, 7), dtype=np.uint8)
    m[1:6, 1:6] = 1
    m[2:5, 2:5] = 0
    return BinaryMask2D(m)


class TestFindContours:
    def test_solid_block_boundary(self):
        (contour,) = find_contours(solid_block())
        assert contour.kind == "outer"
        assert contour.enclosed_area == 9
        # The chain is exactly the 8 border pixels of the block.
        assert len(contour.points) == 8
        expected = {
            (2, 2), (2, 3), (2, 4), (3, 2), (3, 4), (4, 2), (4, 3), (4, 4),
        }
        assert set(map(tuple, contour.points.tolist())) == expected

    def test_starts_at_topmost_leftmost(self):
        (contour,) = find_contours(solid_block())
        assert contour.start == (2, 2)

    def test_ring_has_outer_and_hole(self):
        outer, hole = find_contours(ring())
        assert (outer.kind, outer.enclosed_area) == ("outer", 25)
        assert (hole.kind, hole.enclosed_area) == ("hole", 9)
        # Hole chain walks the cavity's background pixels.
        assert hole.start == (2, 2)

    def test_isolated_pixel(self):
        (contour,) = find_contours(mask_of([[0, 0], [0, 1]]))
        assert contour.points.tolist() == [[1, 1]]
        assert contour.enclosed_area == 1

    def test_one_pixel_bar_walks_out_and_back(self):
        (contour,) = find_contours(mask_of([[0, 0, 0], [1, 1, 1], [0, 0, 0]]))
        assert contour.points.tolist() == [[1, 0], [1, 1], [1, 2], [1, 1]]

    def test_diagonal_pixels_are_one_component(self):
        contours = find_contours(mask_of([[1, 0], [0, 1]]))
        assert len(contours) == 1
        assert contours[0].enclosed_area == 2

    def test_diagonal_cavities_are_separate_holes(self):
        # Background is 4-connected: diagonally touching cavities do not merge.
        m = mask_of([
            [1, 1, 1, 1],
            [1, 0, 1, 1],
            [1, 1, 0, 1],
            [1, 1, 1, 1],
        ])
        kinds = [ct.kind for ct in find_contours(m)]
        assert kinds.count("hole") == 2

    def test_ranking_largest_first(self):
        m = np.zeros((12, 12), dtype=np.uint8)
        m[8:11, 1:4] = 1  # area 9, later in raster order
        m[1:3, 6:8] = 1  # area 4
        contours = find_contours(BinaryMask2D(m))
        assert [ct.enclosed_area for ct in contours] == [9, 4]

    def test_equal_areas_tie_break_on_start(self):
        m = np.zeros((8, 8), dtype=np.uint8)
        m[1:3, 5:7] = 1
        m[5:7, 1:3] = 1
        first, second = find_contours(BinaryMask2D(m))
        assert first.start == (1, 5)
        assert second.start == (5, 1)

    def test_empty_mask(self):
        assert find_contours(mask_of([[0, 0], [0, 0]])) == []

    def test_bbox_spans_chain(self):
        (contour,) = find_contours(solid_block())
        assert contour.bbox == (2, 2, 4, 4)

    def test_chain_points_are_read_only(self):
        (contour,) = find_contours(solid_block())
        with pytest.raises(ValueError):
            contour.points[0, 0] = 9


class TestSelectContours:
    def test_none_keeps_all(self):
        contours = find_contours(ring())
        assert select_contours(contours, None) == contours

    def test_rank_one_is_largest(self):
        contours = find_contours(ring())
        (chosen,) = select_contours(contours, [1])
        assert chosen.enclosed_area == 25

    def test_out_of_range_names_rank_and_count(self):
        contours = find_contours(solid_block())
        with pytest.raises(ContourSelectionError, match=r"3.*1 contour"):
            select_contours(contours, [1, 3])

    def test_empty_set_with_request_raises(self):
        with pytest.raises(ContourSelectionError):
            select_contours([], [1])


class TestDrawContours:
    def test_fill_restores_solid_shape(self):
        contours = find_contours(solid_block())
        drawn = draw_contours(7, 7, contours, thickness=FILL)
        assert np.array_equal(drawn.data, solid_block().data)

    def test_fill_of_ring_outer_contour_covers_cavity(self):
        outer = select_contours(find_contours(ring()), [1])
        drawn = draw_contours(7, 7, outer, thickness=FILL)
        expected = np.zeros((7, 7), dtype=np.uint8)
        expected[1:6, 1:6] = 1
        assert np.array_equal(drawn.data, expected)

    def test_thickness_one_is_bare_chain(self):
        (contour,) = find_contours(solid_block())
        drawn = draw_contours(7, 7, [contour], thickness=1)
        assert drawn.foreground_count() == 8

    def test_thickness_three_dilates_by_one(self):
        (contour,) = find_contours(solid_block())
        drawn = draw_contours(7, 7, [contour], thickness=3)
        # 3x3 block boundary grown by 1 in Chebyshev distance: the full 5x5.
        expected = np.zeros((7, 7), dtype=np.uint8)
        expected[1:6, 1:6] = 1
        assert np.array_equal(drawn.data, expected)

    @pytest.mark.parametrize("bad", [0, -2, -5])
    def test_invalid_thickness(self, bad):
        with pytest.raises(ValueError, match="thickness"):
            draw_contours(4, 4, [], thickness=bad)

    def test_empty_contour_list_gives_empty_mask(self):
        drawn = draw_contours(5, 3, [], thickness=FILL)
        assert drawn.data.shape == (3, 5)
        assert drawn.foreground_count() == 0


class TestRoundTrip:
    def test_find_then_fill_draw_equals_fill_holes(self):
        rng = np.random.Generator(np.random.Philox(31))
        for _ in range(10):
            mask = BinaryMask2D(random_blob_mask(rng))
            contours = find_contours(mask)
            drawn = draw_contours(64, 64, contours, thickness=FILL)
            assert np.array_equal(drawn.data, fill_holes(mask).data)


class TestContoursToJson:
    def test_dump_fields(self):
        payload = json.loads(contours_to_json(find_contours(ring())))
        assert [entry["kind"] for entry in payload] == ["outer", "hole"]
        assert payload[0]["area"] == 25
        assert payload[0]["points"][0] == [1, 1]
