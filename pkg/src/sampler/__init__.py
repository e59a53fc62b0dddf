"""Generative sampling of the coupled species / fine-block process."""
