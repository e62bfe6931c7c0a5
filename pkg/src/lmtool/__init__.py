"""A lambda-mu calculus with explicit substitutions and replacements:
canonical forms, meaningful reduction, structural equivalence as a strong
bisimulation, simple types, and polarized proof nets."""

__version__ = "0.1.0"
