"""k0lat: certificates and obstructions for stable isomorphism of lattices
over orders, Krull-Schmidt decomposition over prime fields, Hodge-lattice
class bookkeeping, and real quadratic field arithmetic."""

__version__ = "0.1.0"
