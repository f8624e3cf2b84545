"""Magic pentagram game and problem toolkit."""

__version__ = "0.1.0"

from . import clifford, game, lightcone, mpp, paulis, rng, statevector, tableau  # noqa: E402,F401

