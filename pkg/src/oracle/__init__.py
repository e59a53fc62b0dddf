"""Independent oracles and verification reports."""
