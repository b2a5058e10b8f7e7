"""
Scenicness toolkit: learn rating distributions from crowdsourced ordinal ratings,
evaluate them, explain them, and map them.
"""

__version__ = "0.1.0a1"
