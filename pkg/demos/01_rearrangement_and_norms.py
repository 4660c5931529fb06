# %% [markdown]
# # Rearrangements and Lorentz norms
#
# A modulus on the circle is stored as cell-centre samples.  Its decreasing
# rearrangement is a stable sort, and the Lorentz norm is the Stieltjes sum of
# the sorted values against the increments of the gauge.

# %%
import numpy as np

from extremum import GridSpec, SampledFunction, lorentz_norm, make_power_gauge, marcinkiewicz_norm
from extremum.norms import check_norm_equality_case
from extremum.rearrangement import decreasing_rearrangement

grid = GridSpec(1024)
gauge = make_power_gauge(2.0, grid)
x = SampledFunction(grid, 1.5 + np.sin(3 * grid.nodes))
r = decreasing_rearrangement(x)
print("first values of x*:", r.mu_star.values[:4])

# %% [markdown]
# Shuffling the cells leaves the norm unchanged.

# %%
perm = np.random.default_rng(0).permutation(grid.n_samples)
print(lorentz_norm(x, gauge), lorentz_norm(x.values[perm], gauge))

# %% [markdown]
# The ramp ``x(t) = t`` has Lorentz norm ``4 pi / 3`` for ``phi(t) = (t/2pi)^(1/2)``.

# %%
ramp = SampledFunction(grid, grid.nodes)
print(lorentz_norm(ramp, gauge), 4 * np.pi / 3)
print("dual norm of 1:", marcinkiewicz_norm(SampledFunction(grid, np.ones(1024)), gauge))

# %% [markdown]
# Equality in the triangle inequality happens exactly when the rearrangement
# is additive, which for a strictly concave gauge means the two functions are
# ordered the same way.

# %%
f = SampledFunction(grid, x.values)
same_order = SampledFunction(grid, x.values ** 2)
other = SampledFunction(grid, np.cos(grid.nodes) + 1.0)
print(check_norm_equality_case(f, same_order, gauge))
print(check_norm_equality_case(f, other, gauge))
