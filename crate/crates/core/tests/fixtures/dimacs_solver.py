#!/usr/bin/env python3
"""Small DPLL solver speaking DIMACS in and SAT-competition output out."""
import sys


def parse(path):
    clauses, cur = [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line[0] in "cp%":
                continue
            for tok in line.split():
                lit = int(tok)
                if lit == 0:
                    clauses.append(cur)
                    cur = []
                else:
                    cur.append(lit)
    if cur:
        clauses.append(cur)
    return clauses


def simplify(clauses, lit):
    out = []
    for c in clauses:
        if lit in c:
            continue
        out.append([l for l in c if l != -lit])
    return out


def dpll(clauses, assignment):
    while True:
        if any(not c for c in clauses):
            return None
        units = [c[0] for c in clauses if len(c) == 1]
        if not units:
            break
        assignment.append(units[0])
        clauses = simplify(clauses, units[0])
    if not clauses:
        return assignment
    lit = clauses[0][0]
    for choice in (lit, -lit):
        found = dpll(simplify(clauses, choice), assignment + [choice])
        if found is not None:
            return found
    return None


def main():
    sys.setrecursionlimit(100000)
    model = dpll(parse(sys.argv[-1]), [])
    if model is None:
        print("s UNSATISFIABLE")
        return
    print("s SATISFIABLE")
    print("v " + " ".join(str(l) for l in model) + " 0")


if __name__ == "__main__":
    main()
