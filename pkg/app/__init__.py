"""depmerge toolkit package."""
