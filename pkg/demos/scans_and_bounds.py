"""
Which order-two witnesses can ever fire
=======================================

``x^2 + p^2 + c0`` never detects a Fock state, ``2xp + c0`` stays above
-1, and four Fock levels are too few for ``2xp + c0`` to go negative.
"""

from wignerneg import fa_scan, general_order2_search, necessity_check

for row in fa_scan(5):
    print("n=%d  <r^4> - <r^2>^2 = %.12f" % (row["n"], row["margin"]))

search = general_order2_search()
print("lowest f_a value:", search.minimum("fa"))
print("lowest f_b value:", search.minimum("fb"), "(bounded below by -1)")
print("best witness:", search.best.params)

cases = necessity_check()
worst = min(cases, key=lambda c: c["min_value"])
print(f"{len(cases)} subspaces of <= 4 levels; lowest value {worst['min_value']:.4f} on {worst['labels']}")
