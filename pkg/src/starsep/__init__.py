"""Star-based separators for intersection graphs of c-oriented segments,
c-oriented polygons and string graphs, plus an almost-exact distance oracle."""

__version__ = "0.1.0"
