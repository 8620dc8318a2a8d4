"""Age-of-information analysis, simulation and mean-field offloading games
for edge computing with equitable or priority access."""

__version__ = "0.1.0"
