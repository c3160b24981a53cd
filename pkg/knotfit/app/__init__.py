"""KnotFit: B-spline curve fitting with optimized knot selection."""
