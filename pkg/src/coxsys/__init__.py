"""Computations for the Coxeter groups W(k): words, the Tits representation
over Z[2cos(pi/k)], congruence quotients, tessellated surfaces, hyperbolic
hexagon geometry and the systole-count bound tables."""

__version__ = "0.1.0"
