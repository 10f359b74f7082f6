"""Template-based piecewise affine regression."""
