"""Automorphisms of the Atkin-Lehner quotients X0*(N) for square-free N.

The package decides, for N square-free (odd or twice odd) with g*(N) > 2,
whether X0*(N) = X0(N)/B(N) carries automorphisms beyond the identity, and
exhibits the bielliptic or hyperelliptic structure when it does.  The main
entry points are:

- genus.genus_x0 / genus.genus_x0_star: exact genus formulas,
- genus.delta_lists: the defect classification g*(2N) - 2 g*(N),
- nfdata.load_orbits: eigenform orbit data for the Hecke action,
- frobenius.point_count: |X0*(N)(F_{p^n})| from eigenvalue data,
- criteria / petri / hypermodel: the exclusion and resolution machinery,
- cli.main: the command-line driver (`x0star ...`).
"""

__version__ = "0.1.0"
