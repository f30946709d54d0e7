"""Shot-video pipeline: acquisition, segmented frame storage, VOD serving."""

__version__ = "0.1.0"
