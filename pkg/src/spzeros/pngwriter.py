"""Minimal 8-bit grayscale PNG output for point-cloud scatter figures.

Zero-dependency by design: the scatter figures are plain rasters, so a
hand-rolled encoder (zlib + struct, filter type 0 on every scanline) keeps
the package free of imaging stacks.
"""

import struct
import zlib

import numpy as np

# Fraction of the data extent added on each side of the bounding box.
MARGIN = 0.05


def _chunk(tag, payload):
    return (struct.pack(">I", len(payload)) + tag + payload
            + struct.pack(">I", zlib.crc32(tag + payload) & 0xFFFFFFFF))


def write_png(path, pixels):
    """Write a 2-D uint8 array as a grayscale PNG file.

    Row 0 is the top scanline. Values are emitted as-is (0 = black).
    """
    pixels = np.asarray(pixels)
    if pixels.ndim != 2:
        raise ValueError("pixels must be a 2-D array")
    if pixels.dtype != np.uint8:
        raise ValueError("pixels must be uint8")
    height, width = pixels.shape
    if height < 1 or width < 1:
        raise ValueError("image must have positive dimensions")
    header = struct.pack(">IIBBBBB", width, height, 8, 0, 0, 0, 0)
    raw = b"".join(b"\x00" + pixels[row].tobytes() for row in range(height))
    with open(path, "wb") as fh:
        fh.write(b"\x89PNG\r\n\x1a\n")
        fh.write(_chunk(b"IHDR", header))
        fh.write(_chunk(b"IDAT", zlib.compress(raw, 9)))
        fh.write(_chunk(b"IEND", b""))


def scatter_raster(points, width, height):
    """Rasterize complex points into a white-background uint8 image.

    The bounding box of the points, padded by MARGIN on each side, is mapped
    onto the full raster; the imaginary axis points up. Each point darkens
    its pixel to black. Degenerate extents (a single point, or all points
    collinear with an axis) fall back to a unit-width box so the output is
    always well defined.
    """
    if width < 1 or height < 1:
        raise ValueError("raster dimensions must be positive")
    pixels = np.full((height, width), 255, dtype=np.uint8)
    points = np.asarray(points, dtype=np.complex128).ravel()
    if points.size == 0:
        return pixels
    re = points.real
    im = points.imag
    lo_x, hi_x = float(np.min(re)), float(np.max(re))
    lo_y, hi_y = float(np.min(im)), float(np.max(im))
    span_x = hi_x - lo_x or 1.0
    span_y = hi_y - lo_y or 1.0
    lo_x -= MARGIN * span_x
    hi_x += MARGIN * span_x
    lo_y -= MARGIN * span_y
    hi_y += MARGIN * span_y
    col = (re - lo_x) / (hi_x - lo_x) * (width - 1)
    row = (hi_y - im) / (hi_y - lo_y) * (height - 1)
    col = np.clip(np.rint(col).astype(np.int64), 0, width - 1)
    row = np.clip(np.rint(row).astype(np.int64), 0, height - 1)
    pixels[row, col] = 0
    return pixels


def scatter_png(path, points, width, height):
    """Render complex points to a grayscale scatter PNG at the given size."""
    write_png(path, scatter_raster(points, width, height))
