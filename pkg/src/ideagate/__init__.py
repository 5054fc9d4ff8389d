"""Human-in-the-loop research ideation engine.

Validates a proposal's motivation against retrieved literature and
synthesizes candidate methods, with persona-tiered agents, two-stage
retrieval, and a researcher edit gate between every agent step.
"""

__version__ = "0.1.0"
