"""dgforge: exact weight truncations, twisted complexes and t-structures
over normalized positive dg algebras, with machine-checkable certificates."""

__version__ = "0.1.0"
