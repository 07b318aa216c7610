"""Partitioned complementary sequences for low-PAPR OFDM."""

__version__ = "0.1.0"
