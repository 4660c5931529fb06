# %% [markdown]
# # Blaschke factors and outer functions
#
# The boundary trace of ``I_a`` carries a continuous argument branch.  An
# outer function is rebuilt from its modulus with the spectral conjugate
# function.

# %%
import math

import numpy as np

from extremum import GridSpec, blaschke_boundary, fourier_coefficients, outer_from_modulus, sample
from extremum.analytic import lipschitz_constants, sine_half_gap, winding

grid = GridSpec(4096)
tr = blaschke_boundary(0.5, grid)
print("winding / 2pi:", winding(tr) / (2 * math.pi))
print("C_a, c_a for a = 0.5:", lipschitz_constants(0.5))

# %% [markdown]
# The half-angle sine of an argument gap equals half the chord length.

# %%
u, v = 100, 2500
print(sine_half_gap(u, v, tr), 0.5 * abs(tr.values[v] - tr.values[u]))

# %% [markdown]
# For ``mu = exp(cos t)`` the outer function is ``exp(z)``, whose Taylor
# coefficients are ``1/k!``.

# %%
F = outer_from_modulus(sample(grid, lambda t: np.exp(np.cos(t))))
c = fourier_coefficients(F, 6)
for k in range(7):
    print(k, c[6 + k].real, 1 / math.factorial(k))
print("largest negative coefficient:", np.abs(c[:6]).max())
