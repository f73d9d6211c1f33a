"""reopt: interactive re-optimization of structured MIP models.

A structured model state is edited through a validated patch language,
re-solved with warm-start strategies from a toolbox, and driven by a
bounded plan/normalize/select/validate closed loop. See README.md.
"""

__version__ = "0.1.0"
