# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels for frame-pattern generation and DIB row packing."""


def fill_pattern(int width, int height, long long offset):
    """Raster where pixel(x, y) = (x + y + offset) mod 256."""
    out = bytearray(width * height)
    cdef unsigned char[::1] buf = out
    cdef Py_ssize_t k = 0
    cdef int x, y, base
    for y in range(height):
        base = <int>((y + offset) % 256)
        for x in range(width):
            buf[k] = <unsigned char>((base + x) & 0xFF)
            k += 1
    return bytes(out)


def pack_dib_rows(const unsigned char[::1] data, int width, int height):
    """Reorder a top-down raster into bottom-up rows padded to 4 bytes."""
    cdef int stride = (width + 3) & ~3
    out = bytearray(stride * height)
    cdef unsigned char[::1] dst = out
    cdef int y
    cdef Py_ssize_t src_off, dst_off
    for y in range(height):
        src_off = <Py_ssize_t>y * width
        dst_off = <Py_ssize_t>(height - 1 - y) * stride
        dst[dst_off:dst_off + width] = data[src_off:src_off + width]
    return bytes(out)
