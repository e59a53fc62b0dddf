"""Subordinator families, exponential cumulants and Bell-sum tables."""
