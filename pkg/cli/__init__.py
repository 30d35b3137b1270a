"""
CLI module - Command-line front end.

This module contains the argument parser and one handler per subcommand:
- compose: bound of a composition tree
- budget: equal-split T-count under GPI and operator norm
- qft / qpe: approximate-QFT and phase-estimation estimates
- validate / figures: Monte-Carlo checks and reference sweeps
"""
