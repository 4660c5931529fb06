# %% [markdown]
# # A witness for a strictly decreasing modulus
#
# For ``f = F I_0`` with ``|F| = c e^{-t}`` there is a perturbation
# ``g = h f`` with ``h = alpha + beta cos(t - theta)`` such that both
# ``f + g`` and ``f - g`` stay on the unit sphere.  Then ``f`` is the midpoint
# of a segment in the ball and is not extreme.

# %%
from extremum import (GridSpec, blaschke_boundary, lorentz_norm, make_fixture, make_power_gauge,
                      outer_from_modulus, witness_search)

grid = GridSpec(4096)
gauge = make_power_gauge(2.0, grid)
mu, manifest = make_fixture("exponential", grid, gauge)
inner = blaschke_boundary(0.0, grid)
outer = outer_from_modulus(mu)
w = witness_search(mu, inner, outer, gauge)
print(w.params)

# %% [markdown]
# The certificate is checked independently of the search.

# %%
f = inner.values * outer.values
print("||f + g|| =", lorentz_norm(f + w.g_trace.values, gauge))
print("||f - g|| =", lorentz_norm(f - w.g_trace.values, gauge))
print("balance residual:", w.balance_residual)
print("negative-frequency residual of g/F:", w.neg_fourier_residual)
