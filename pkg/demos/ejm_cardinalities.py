"""How the critical EJM visibility grows with hidden-variable cardinality.

Small cardinalities only; each cell is a bisection over visibility with a
multi-start fit per step. About ten minutes on one core. Up to
cardinality 3 the critical visibility stays close to zero; try c_max=4
(much slower) to see it rise.
"""
# %%
from netlocal import SolverSettings
from netlocal.experiments import ejm_cardinality_table, ejm_table_csv

settings = SolverSettings(restarts=20, master_seed=0)
rows = ejm_cardinality_table(3, settings, threshold=1e-4, v_tol=0.01)

# %%
for r in rows:
    print(f"({r['c_alpha']},{r['c_beta']},{r['c_gamma']})  v_c ~ {r['v_critical']:.3f}")

ejm_table_csv(rows, "ejm_table.csv")
