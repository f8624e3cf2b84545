"""Exception taxonomy shared across modules.

``DomainError`` marks precondition failures on well-formed inputs
(distinct-edge requirements, probability thresholds, backend size caps);
plain ``ValueError`` stays for malformed data.  The command line maps
the two onto different exit codes.
"""


class DomainError(ValueError):
    """A domain precondition does not hold."""
