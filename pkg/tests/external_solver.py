#!/usr/bin/env python3
"""Tiny standalone DIMACS solver with SAT-competition output.

Brute force over at most 20 variables.  Deliberately independent of the
package under test: the differential harness uses it as a second opinion
and the external-adapter tests use it as a real subprocess solver.
"""

import itertools
import sys


def main() -> int:
    num_vars = 0
    clauses = []
    with open(sys.argv[1]) as handle:
        for line in handle:
            line = line.strip()
            if not line or line[0] in "c%":
                continue
            if line.startswith("p"):
                num_vars = int(line.split()[2])
                continue
            lits = [int(t) for t in line.split()]
            if lits and lits[-1] == 0:
                lits.pop()
            if lits:
                clauses.append(lits)
    if num_vars > 20:
        print("c instance too large for the brute-force solver")
        return 1
    for bits in itertools.product((False, True), repeat=num_vars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            model = [v + 1 if bits[v] else -(v + 1) for v in range(num_vars)]
            print("s SATISFIABLE")
            out = "v"
            for l in model:
                out += f" {l}"
            print(out + " 0")
            return 10
    print("s UNSATISFIABLE")
    return 20


if __name__ == "__main__":
    sys.exit(main())
