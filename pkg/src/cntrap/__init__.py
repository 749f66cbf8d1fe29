"""Cold-atom trapping near a current-carrying single-wall carbon nanotube."""
__version__ = "0.1.0"
