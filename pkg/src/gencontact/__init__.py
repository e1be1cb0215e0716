"""Exact computational models of generalized contact structures.

The package is organized bottom-up: exact scalar rings (``ring``),
fraction-free linear algebra (``linear``), differential forms and
spinors (``forms``), frame presentations with the bracket calculus
(``frame``, ``models``), the structure layer (``contact``, ``builders``),
fiberwise dualization (``tduality``), and the scenario runner
(``scenario``, ``cli``).
"""

__version__ = "0.1.0"
