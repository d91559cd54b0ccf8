"""Orbit distance: the product metric modulo one common rotation.

Two unit-row factors describe the same correlation matrix exactly when a
single k x k orthogonal matrix carries one onto the other. The distance
between correlation matrices is the product-sphere distance after the best
such rotation.
"""

import numpy as np

from corrgeo import align, gram, orbit_dist, ps_dist, random_orthogonal

rng = np.random.default_rng(21)
m, k = 6, 3

X = rng.standard_normal((m, k))
X /= np.linalg.norm(X, axis=1)[:, None]

# same orbit: a rotated copy has the same gram matrix and distance zero
R = random_orthogonal(k, rng)
print("gram difference under rotation", np.abs(gram(X @ R).entries - gram(X).entries).max())
print("ps_dist(X, X R)  =", ps_dist(X, X @ R))
print("orbit_dist(X, X R) =", orbit_dist(X, X @ R))
print()

# different orbits: alignment recovers the best rotation
Y = rng.standard_normal((m, k))
Y /= np.linalg.norm(Y, axis=1)[:, None]

result = align(X, Y)
print("raw product distance     ", ps_dist(X, Y))
print("aligned product distance ", ps_dist(X, result.aligned))
print("orbit distance           ", orbit_dist(X, Y))
print("rotation search converged:", result.converged,
      "after", result.iterations, "iterations,",
      result.restarts_used, "starts")

# the aligned representative sits on Y's orbit
print("aligned has Y's gram:", np.allclose(gram(result.aligned).entries, gram(Y).entries))
