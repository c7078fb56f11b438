"""optwin: a desk-scale digital twin for optical communication links.

Layers mirror the twin architecture: a synthetic physical layer
(``optwin.phys``, ``optwin.telemetry``), data-driven virtual models
(``optwin.fault``, ``optwin.pot``, ``optwin.surrogate``) built on a small
numpy neural-network core (``optwin.nn``), and a closed-loop runtime plus
CLI (``optwin.runtime``, ``optwin.cli``).
"""

__version__ = "0.1.0"
