"""Class-number lower bounds for p-power division fields of elliptic curves
with multiplicative reduction at p."""

__version__ = "0.1.0"
