"""phmaps: explicit p-harmonic maps built from harmonic homogeneous polynomials."""
__version__ = "0.1.0"
