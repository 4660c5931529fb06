# %% [markdown]
# # Classifying the reference moduli
#
# Flat points of the rearranged modulus decide extremality of ``F I_a``:
# isolated quadratic flats whose arguments line up allow a witness, while
# cubic flats, four or more flats, or misaligned pairs make ``f`` extreme.

# %%
from extremum import FIXTURE_NAMES, FunctionSpec, GridSpec, decide_extreme, make_fixture, make_power_gauge

grid = GridSpec(4096)
gauge = make_power_gauge(2.0, grid)
for name in FIXTURE_NAMES:
    mu, manifest = make_fixture(name, grid, gauge)
    v = decide_extreme(FunctionSpec(mu, (0.0,)), gauge)
    beta = "" if v.witness is None else f"beta={v.witness.params.beta:g}"
    print(f"{name:24s} {v.status.value:11s} {v.rule:30s} E1={v.report.e1.card} "
          f"E2={v.report.e2.card} {beta}")
