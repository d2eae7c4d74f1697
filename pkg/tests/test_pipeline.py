import numpy as np
import pytest

from bodymask.contours import ContourSelectionError
from bodymask.image_model import (
    BinaryMask2D,
    ByteImage2D,
    ScalarImage2D,
    cast_wrap_uint8,
)
from bodymask.phantoms import Disk, PhantomSpec, generate
from bodymask.pipeline import (
    BinaryMask3D,
    MaskPipelineConfig,
    MaskReport,
    Volume3D,
    body_mask_2d,
    body_mask_3d,
    pipeline_byte_image,
    render_panel,
)

from oracles import dice


def disk_image(seed=0, radius=20):
    spec = PhantomSpec(
        width=64,
        height=64,
        shapes=(Disk(row=32, col=32, radius=radius, intensity=200.0),),
        seed=seed,
    )
    return generate(spec)


class TestConfig:
    def test_defaults(self):
        config = MaskPipelineConfig()
        assert config.normalization is False
        assert config.limit == 3.0
        assert config.contour_numbers is None
        assert config.thickness == -1
        assert config.plot is True
        assert config.vmin is None and config.vmax is None
        assert config.slice_axis == 0

    def test_from_dict_accepts_on_off_strings(self):
        config = MaskPipelineConfig.from_dict(
            {"normalization": "on", "plot": "off", "limit": 1}
        )
        assert config.normalization is True
        assert config.plot is False
        assert config.limit == 1.0

    def test_from_dict_rejects_unknown_keys(self):
        with pytest.raises(ValueError, match="unknown config keys"):
            MaskPipelineConfig.from_dict({"thicknes": 3})

    def test_from_dict_rejects_bad_on_off(self):
        with pytest.raises(ValueError, match="normalization"):
            MaskPipelineConfig.from_dict({"normalization": "yes"})

    def test_to_dict_round_trips(self):
        config = MaskPipelineConfig(
            normalization=True, limit=0.5, contour_numbers=(1, 2), thickness=2
        )
        assert MaskPipelineConfig.from_dict(config.to_dict()) == config

    @pytest.mark.parametrize("bad", [0, -2])
    def test_rejects_bad_thickness(self, bad):
        with pytest.raises(ValueError, match="thickness"):
            MaskPipelineConfig(thickness=bad)

    def test_rejects_nonpositive_limit(self):
        with pytest.raises(ValueError, match="limit"):
            MaskPipelineConfig(limit=0.0)

    def test_rejects_bad_contour_numbers(self):
        with pytest.raises(ValueError, match="contour numbers"):
            MaskPipelineConfig(contour_numbers=(0,))

    def test_rejects_inverted_window(self):
        with pytest.raises(ValueError, match="vmin"):
            MaskPipelineConfig(vmin=10.0, vmax=10.0)

    def test_rejects_bad_slice_axis(self):
        with pytest.raises(ValueError, match="slice_axis"):
            MaskPipelineConfig(slice_axis=3)


class TestBodyMask2D:
    def test_disk_segmented_with_defaults(self):
        img, truth = disk_image()
        mask, report = body_mask_2d(img)
        assert dice(mask.data, truth.data) >= 0.99
        assert not report.degenerate
        assert report.contour_count >= 1
        assert report.warnings == []
        assert report.clipped_fraction is None

    def test_normalization_populates_clipped_fraction(self):
        img, truth = disk_image()
        mask, report = body_mask_2d(img, MaskPipelineConfig(normalization=True))
        assert report.clipped_fraction is not None
        assert 0.0 <= report.clipped_fraction <= 1.0
        assert dice(mask.data, truth.data) >= 0.99

    def test_constant_image_warns_and_returns_empty(self):
        img = ScalarImage2D(np.full((16, 16), 9.0), "uint8")
        mask, report = body_mask_2d(img)
        assert mask.foreground_count() == 0
        assert report.degenerate
        assert report.threshold_used == 9
        assert any("degenerate" in w for w in report.warnings)

    def test_constant_image_with_normalization_warns(self):
        img = ScalarImage2D(np.full((16, 16), 9.0), "uint8")
        mask, report = body_mask_2d(img, MaskPipelineConfig(normalization=True))
        assert mask.foreground_count() == 0
        assert report.degenerate
        assert any("zero-variance" in w for w in report.warnings)

    def test_out_of_range_contour_number_raises(self):
        img, _ = disk_image()
        with pytest.raises(ContourSelectionError):
            body_mask_2d(img, MaskPipelineConfig(contour_numbers=(40,)))

    def test_window_never_changes_mask(self):
        img, _ = disk_image()
        base, _ = body_mask_2d(img)
        windowed, _ = body_mask_2d(img, MaskPipelineConfig(vmin=5.0, vmax=90.0))
        assert np.array_equal(base.data, windowed.data)

    def test_report_selected_areas_sorted_descending(self):
        img, _ = disk_image()
        _, report = body_mask_2d(img)
        assert report.selected_areas == sorted(report.selected_areas, reverse=True)

    def test_report_to_dict_uses_manifest_names(self):
        report = MaskReport(
            threshold_used=7,
            degenerate=False,
            contour_count=2,
            selected_areas=[10, 4],
            clipped_fraction=0.1,
            warnings=[],
        )
        payload = report.to_dict()
        assert payload["threshold"] == 7
        assert payload["selected_areas"] == [10, 4]
        assert set(payload) == {
            "threshold",
            "degenerate",
            "contour_count",
            "selected_areas",
            "clipped_fraction",
            "warnings",
        }


class TestVolume3D:
    def test_validates_values_like_2d(self):
        with pytest.raises(ValueError, match="range"):
            Volume3D(np.full((2, 2, 2), 300.0), "uint8")

    def test_mask_rejects_non_binary(self):
        with pytest.raises(ValueError, match="0 or 1"):
            BinaryMask3D(np.full((2, 2, 2), 2, dtype=np.uint8))


class TestBodyMask3D:
    def make_volume(self, n=4):
        slices = [disk_image(seed=s, radius=14 + s)[0].data for s in range(n)]
        return Volume3D(np.stack(slices), "float64")

    def test_each_slice_matches_standalone_2d(self):
        vol = self.make_volume()
        mask3, reports = body_mask_3d(vol)
        assert len(reports) == 4
        for i in range(4):
            img = ScalarImage2D(vol.data[i], "float64")
            mask2, report2 = body_mask_2d(img)
            assert np.array_equal(mask3.data[i], mask2.data)
            assert reports[i].threshold_used == report2.threshold_used

    def test_parallel_matches_sequential(self):
        vol = self.make_volume()
        seq, _ = body_mask_3d(vol, workers=1)
        par, _ = body_mask_3d(vol, workers=4)
        assert np.array_equal(seq.data, par.data)

    def test_slice_axis_one(self):
        vol = self.make_volume()
        config = MaskPipelineConfig(slice_axis=1)
        mask3, reports = body_mask_3d(vol, config)
        assert mask3.data.shape == vol.data.shape
        assert len(reports) == vol.data.shape[1]
        img = ScalarImage2D(vol.data[:, 5, :], "float64")
        mask2, _ = body_mask_2d(img, config)
        assert np.array_equal(mask3.data[:, 5, :], mask2.data)

    def test_degenerate_slice_warns_but_others_process(self):
        flat = np.full((64, 64), 3.0)
        good = disk_image()[0].data
        vol = Volume3D(np.stack([good, flat]), "float64")
        mask3, reports = body_mask_3d(vol)
        assert mask3.data[0].sum() > 0
        assert mask3.data[1].sum() == 0
        assert reports[1].degenerate


class TestRenderPanel:
    def test_three_panes_with_black_gaps(self):
        img, _ = disk_image()
        mask, _ = body_mask_2d(img)
        byte = pipeline_byte_image(img, MaskPipelineConfig())
        panel = render_panel(img, byte, mask)
        assert panel.data.shape == (64, 3 * 64 + 16)
        assert np.all(panel.data[:, 64:72] == 0)
        assert np.all(panel.data[:, 136:144] == 0)
        # Mask pane is strictly 0/255.
        assert set(np.unique(panel.data[:, 144:])) <= {0, 255}

    def test_mismatched_shapes_rejected(self):
        img = ScalarImage2D(np.zeros((4, 4)))
        byte = ByteImage2D(np.zeros((4, 5), dtype=np.uint8))
        mask = BinaryMask2D(np.zeros((4, 4), dtype=np.uint8))
        with pytest.raises(ValueError, match="shape"):
            render_panel(img, byte, mask)


class TestPipelineByteImage:
    def test_matches_wrap_cast_by_default(self):
        img, _ = disk_image()
        byte = pipeline_byte_image(img, MaskPipelineConfig())
        assert np.array_equal(byte.data, cast_wrap_uint8(img).data)

    def test_constant_image_falls_back_to_cast(self):
        img = ScalarImage2D(np.full((8, 8), 12.0), "uint8")
        byte = pipeline_byte_image(img, MaskPipelineConfig(normalization=True))
        assert np.all(byte.data == 12)
