"""missingpath: incompleteness analytics for knowledge-graph collections.

Groups a collection's entities by which property paths they are missing,
projects them onto a 2D map, and compares any subset's value
distributions against the full collection.
"""

__version__ = "0.1.0"
