"""Exception types shared across the package."""


class GaltreesError(Exception):
    """Base class for all package errors."""


class NotAUnit(GaltreesError):
    """Ring element lies in the maximal ideal, so it cannot be inverted."""


class InvalidIndex(GaltreesError):
    """Galois substitution index is divisible by p."""


class DomainError(GaltreesError):
    """Argument outside the convergence domain of a p-adic series."""


class PrecisionExhausted(GaltreesError):
    """A decision depends on digits beyond the working precision."""


class EnumerationBudget(GaltreesError):
    """An orbit or point enumeration would exceed the configured budget."""


class NotInStabilizer(GaltreesError):
    """Unit does not stabilize the required lattice coset."""


class InvalidWitness(GaltreesError):
    """Root-test witness data violates its preconditions."""


class InternalInconsistency(GaltreesError):
    """Two routes that must agree produced different answers."""


class ModelViolation(GaltreesError):
    """The diagonal lattice model failed an exactness check."""


class EigenvectorNotFound(GaltreesError):
    """No candidate produced an eigenvector of the requested valuation."""
