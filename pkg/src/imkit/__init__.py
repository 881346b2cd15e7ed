"""imkit: internal-model analysis toolkit for input-affine and linear systems."""

__version__ = "0.1.0"
