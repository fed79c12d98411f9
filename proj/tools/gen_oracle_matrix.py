#!/usr/bin/env python3
"""Regenerates tests/fixtures/oracle_matrix_v1.txt.

The expected right-hand side of every case is computed here with Python
fractions, independently of the C++ enumeration."""
from fractions import Fraction
from itertools import product
import sys


def walk(x):
    s = [0]
    for v in x:
        s.append(s[-1] + v)
    return s


def argmax(s, lo, hi):
    best, tie = lo, False
    for k in range(lo + 1, hi + 1):
        if s[k] > s[best]:
            best, tie = k, False
        elif s[k] == s[best]:
            tie = True
    return None if tie or best in (lo, hi) else best


def g(piece, s):
    lo, hi, kind, c, _, _ = piece
    d = s[hi] - s[lo]
    return {"one": Fraction(1), "const": c, "pos": Fraction(int(d > 0)),
            "affine": 1 + c * d, "square": Fraction(d * d)}[kind]


def rhs(n, E, pieces):
    node_in = [False] + [E[k - 1] or E[k] for k in range(1, n)] + [False]
    total = Fraction(0)
    for x in product((-1, 1), repeat=n):
        for y in product((-1, 1), repeat=n):
            xe = [x[i] if E[i] else y[i] for i in range(n)]
            s, se = walk(x), walk(xe)
            term = Fraction(1)
            for p in pieces:
                a, b = argmax(s, p[4], p[5]), argmax(se, p[4], p[5])
                if a is None or a != b or not node_in[a]:
                    term = Fraction(0)
                    break
                term *= g(p, s) * g(p, se)
            total += term
    return total / 4 ** n


def basis(n):
    whole = lambda kind, c: [(0, n, kind, Fraction(c), 0, n)]
    out = [("one", whole("one", 1)), ("pos", whole("pos", 1)), ("aff", whole("affine", Fraction(1, 2))),
           ("sq", whole("square", 1)), ("const", whole("const", Fraction(3, 2)))]
    if n >= 3:
        out += [("left", [(0, n, "one", Fraction(1), 0, n - 1)]), ("right", [(0, n, "one", Fraction(1), 1, n)])]
    if n == 4:
        two = lambda k1, c1, k2, c2: [(0, 2, k1, Fraction(c1), 0, 2), (2, 4, k2, Fraction(c2), 2, 4)]
        out += [("split11", two("one", 1, "one", 1)), ("splitpa", two("pos", 1, "affine", Fraction(1, 2))),
                ("splitsq", two("square", 1, "one", 1))]
    return out


def main():
    lines = ["# oracle-matrix v1",
             "# case <id> n=<steps> E=<cell flags> pieces=<lo:hi:g:c:sel_lo:sel_hi>[;...] rhs=<exact>"]
    for n in (2, 3, 4):
        for mask in range(2 ** n):
            E = [bool(mask >> i & 1) for i in range(n)]
            for name, pieces in basis(n):
                ebits = "".join("1" if e else "0" for e in E)
                ptxt = ";".join(f"{lo}:{hi}:{k}:{c}:{a}:{b}" for lo, hi, k, c, a, b in pieces)
                lines.append(f"case n{n}-E{ebits}-{name} n={n} E={ebits} pieces={ptxt} rhs={rhs(n, E, pieces)}")
    out = sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/oracle_matrix_v1.txt"
    with open(out, "w") as f:
        f.write("\n".join(lines) + "\n")
    print(f"{len(lines) - 2} cases -> {out}")


if __name__ == "__main__":
    main()
