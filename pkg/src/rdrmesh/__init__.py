"""Laplacian smoothing, vertex reordering and reuse-distance analysis for 2D triangle meshes."""
__version__ = "0.1.0"
