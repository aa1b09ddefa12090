"""Locus configurations, Baker-Akhiezer functions and Huygens' principle, in exact arithmetic"""

__version__ = "0.1.0"
