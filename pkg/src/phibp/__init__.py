"""Conditional partition laws of the J-group coupled hierarchy."""
