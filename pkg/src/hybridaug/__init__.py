"""Class-imbalance augmentation benchmarking for small tabular datasets."""

__version__ = "0.1.0"
