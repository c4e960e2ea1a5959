#!/usr/bin/env python3
"""Competition-style wrapper around PySAT: pysat_solver.py FILE.cnf

Prints an `s` status line and `v` model lines; exits 10 (SAT) or 20 (UNSAT).
"""

import sys

from pysat.formula import CNF
from pysat.solvers import Solver


def main() -> int:
    if len(sys.argv) != 2:
        print("usage: pysat_solver.py FILE.cnf", file=sys.stderr)
        return 1
    cnf = CNF(from_file=sys.argv[1])
    with Solver(name="minisat22", bootstrap_with=cnf.clauses) as solver:
        if not solver.solve():
            print("s UNSATISFIABLE")
            return 20
        model = solver.get_model() or []
    print("s SATISFIABLE")
    for i in range(0, len(model), 20):
        print("v " + " ".join(str(lit) for lit in model[i:i + 20]))
    print("v 0")
    return 10


if __name__ == "__main__":
    sys.exit(main())
