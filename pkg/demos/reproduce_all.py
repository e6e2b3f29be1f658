"""
Recompute every published value
===============================

Equivalent to ``wignerneg reproduce-paper``; a smaller sample keeps it quick.
"""

from wignerneg.reproduce import reproduce_paper

report = reproduce_paper(samples=10**6)
for row in report.rows:
    print(f"{row.claim_id:4s} {'pass' if row.passed else 'FAIL'}  {row.location}")
print("all passed:", report.passed)
