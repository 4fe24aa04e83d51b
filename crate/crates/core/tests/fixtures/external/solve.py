"""Solve an exported model with HiGHS and write `name value` lines.

usage: python3 solve.py MODEL.lp OUT.sol [START.txt] [GAP]

START is an optional warm start in the same format, e.g. the heuristic's
solution.txt. GAP is the relative MIP gap (default 1e-6).
"""
import sys

import highspy

model, out = sys.argv[1], sys.argv[2]
start = sys.argv[3] if len(sys.argv) > 3 else None
gap = float(sys.argv[4]) if len(sys.argv) > 4 else 1e-6

h = highspy.Highs()
h.setOptionValue("mip_rel_gap", gap)
h.setOptionValue("threads", 1)
h.readModel(model)
lp = h.getLp()
if start:
    index = {n: i for i, n in enumerate(lp.col_names_)}
    values = [0.0] * lp.num_col_
    for line in open(start):
        name, value = line.split()
        values[index[name]] = float(value)
    sol = highspy.HighsSolution()
    sol.col_value = values
    sol.value_valid = True
    h.setSolution(sol)
h.run()
info = h.getInfo()
print(h.modelStatusToString(h.getModelStatus()), info.objective_function_value, info.mip_gap)
with open(out, "w") as f:
    for name, value in zip(lp.col_names_, h.getSolution().col_value):
        if abs(value) > 1e-12:
            f.write(f"{name} {value!r}\n")
