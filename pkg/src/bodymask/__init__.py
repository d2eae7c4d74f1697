"""Body/background separation for 2D and 3D grayscale radiological images.

The package turns a scalar image into a binary mask (1 = body,
0 = background) through a fixed stage order: uint8 conversion (raw wrap
cast or z-score normalization), Otsu thresholding, contour extraction
and selection, contour drawing, and hole filling.  ``body_mask_2d`` and
``body_mask_3d`` run the whole pipeline; the stage functions are public
so each step can be used and tested on its own.
"""

from .contours import (
    FILL,
    Contour,
    ContourSelectionError,
    contours_to_json,
    draw_contours,
    find_contours,
    select_contours,
)
from .figures import save_figure
from .image_io import (
    load_image,
    load_volume,
    save_image,
    save_mask,
    save_mask_volume,
    save_panel,
    save_volume,
)
from .image_model import (
    BinaryMask2D,
    ByteImage2D,
    InvalidWindowError,
    ScalarImage2D,
    cast_wrap_uint8,
    round_half_away,
    window_render,
)
from .morphology import dilate_chebyshev, fill_holes
from .normalization import (
    DEFAULT_LIMIT,
    ZeroVarianceError,
    clip_outliers,
    clipped_fraction,
    normalize_for_uint8,
    zscore,
)
from .otsu import ThresholdResult, binarize, histogram, otsu_threshold
from .phantoms import (
    CShape,
    Disk,
    JewelrySpot,
    PhantomSpec,
    Rectangle,
    Ring,
    Streak,
    TableArc,
    generate,
)
from .pipeline import (
    BinaryMask3D,
    MaskPipelineConfig,
    MaskReport,
    Volume3D,
    body_mask_2d,
    body_mask_3d,
    pipeline_byte_image,
    render_panel,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryMask2D",
    "BinaryMask3D",
    "ByteImage2D",
    "CShape",
    "Contour",
    "ContourSelectionError",
    "DEFAULT_LIMIT",
    "Disk",
    "FILL",
    "InvalidWindowError",
    "JewelrySpot",
    "MaskPipelineConfig",
    "MaskReport",
    "PhantomSpec",
    "Rectangle",
    "Ring",
    "ScalarImage2D",
    "Streak",
    "TableArc",
    "ThresholdResult",
    "Volume3D",
    "ZeroVarianceError",
    "binarize",
    "body_mask_2d",
    "body_mask_3d",
    "cast_wrap_uint8",
    "clip_outliers",
    "clipped_fraction",
    "contours_to_json",
    "dilate_chebyshev",
    "draw_contours",
    "fill_holes",
    "find_contours",
    "generate",
    "histogram",
    "load_image",
    "load_volume",
    "normalize_for_uint8",
    "otsu_threshold",
    "pipeline_byte_image",
    "render_panel",
    "round_half_away",
    "save_figure",
    "save_image",
    "save_mask",
    "save_mask_volume",
    "save_panel",
    "save_volume",
    "select_contours",
    "window_render",
    "zscore",
]
