"""Exact verification of WDVV potentials with an algebraic variable."""

from .potential import PotentialBundle, load_potential, parse_potential, serialize_potential, validate

__version__ = "0.1.0"

__all__ = ["PotentialBundle", "load_potential", "parse_potential", "serialize_potential", "validate", "__version__"]
