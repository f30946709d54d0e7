"""Pure-Python kernels, used when the compiled extension is unavailable.

Both functions avoid per-pixel Python loops: the test pattern is built from
slices of a repeated 0..255 ramp, and DIB packing is a row-slice join.
"""

_RAMP = bytes(range(256)) * 2


def fill_pattern(width: int, height: int, offset: int) -> bytes:
    """Raster where pixel(x, y) = (x + y + offset) mod 256."""
    if width <= 256:
        rows = []
        for y in range(height):
            start = (y + offset) % 256
            rows.append(_RAMP[start:start + width])
        return b"".join(rows)
    ramp = bytes(range(256)) * (width // 256 + 2)
    return b"".join(
        ramp[(y + offset) % 256:(y + offset) % 256 + width] for y in range(height)
    )


def pack_dib_rows(data: bytes, width: int, height: int) -> bytes:
    """Reorder a top-down raster into bottom-up rows padded to 4 bytes."""
    stride = (width + 3) & ~3
    pad = b"\x00" * (stride - width)
    return b"".join(
        data[y * width:(y + 1) * width] + pad for y in range(height - 1, -1, -1)
    )
