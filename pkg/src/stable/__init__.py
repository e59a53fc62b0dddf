"""Stable and Pitman-Yor specialization of the coupled hierarchy."""
