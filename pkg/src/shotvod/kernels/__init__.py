"""Hot byte-level kernels: compiled extension when built, pure Python otherwise."""

try:
    from shotvod.kernels._native import fill_pattern, pack_dib_rows

    BACKEND = "native"
except ImportError:  # extension not built
    from shotvod.kernels._pure import fill_pattern, pack_dib_rows

    BACKEND = "pure"

__all__ = ["fill_pattern", "pack_dib_rows", "BACKEND"]
