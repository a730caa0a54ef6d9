class NotFound(Exception):
    """Raised when a sieve run ends without a usable non-zero vector."""


class OracleRefusal(ValueError):
    """Raised when brute-force enumeration is asked for a dimension it refuses."""
