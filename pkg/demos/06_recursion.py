# %% [markdown]
# The lower-bound recursion a_n = exp(a_{n-1} - 3n) - 1 + a_{n-1} from a_1 = 9.
# Values past exp(700) saturate and count as "at least".

# %%
import math

from boussinesq1d import induction_holds, recursion_iterate

rec = recursion_iterate(9, 12)
for s in rec:
    print(s.n, "saturated" if s.saturated else f"{s.value:.6g}", ">= 3n+6:", s.at_least(3 * s.n + 6))
print("a_2 - (e^3 + 8) =", rec[1].value - (math.e**3 + 8))
print("induction holds:", induction_holds(recursion_iterate(9, 50)))
