"""Error bounds for the lumped capacitance model and learned length scales
for Nusselt/Biot estimation on convex shapes."""

__version__ = "0.1.0"
