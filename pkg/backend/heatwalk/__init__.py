"""Heat-kernel moments of unitary Brownian motion via Schur–Weyl duality."""

__version__ = "0.1.0"
