#!/usr/bin/env python3
"""Exact P((Q(p;m) + Q(q;n)) meets A) in d=1 by enumerating every edge
configuration of both trees with rational arithmetic.

Independent of the C++ code: survivors are rebuilt from words directly,
x = -2^{k-1} + sum_i 2^{k-1-i} w_i.

Usage: sum_hit_bruteforce.py > tests/golden/sum_hit_exact.txt
"""
import itertools
from fractions import Fraction

PQ = [(Fraction(3, 5), Fraction(7, 10)), (Fraction(11, 20), Fraction(4, 5))]
LEVELS = [(1, 1), (1, 2), (2, 2)]
TARGETS = [(0,), (-1,), (-2, 1), (-1, 0)]


def survivors(k, open_edges):
    out = set()
    for word in itertools.product([0, 1], repeat=k):
        if all(open_edges[word[: j + 1]] for j in range(k)):
            out.add(-(2 ** (k - 1)) + sum(2 ** (k - 1 - i) * word[i] for i in range(k)))
    return frozenset(out)


def law(k, p):
    if k == 0:
        return {frozenset([0]): Fraction(1)}
    paths = [w for j in range(1, k + 1) for w in itertools.product([0, 1], repeat=j)]
    res = {}
    for bits in itertools.product([0, 1], repeat=len(paths)):
        pr = Fraction(1)
        for b in bits:
            pr *= p if b else 1 - p
        s = survivors(k, dict(zip(paths, bits)))
        res[s] = res.get(s, Fraction(0)) + pr
    return res


def hit(m, n, p, q, target):
    a = set(target)
    total = Fraction(0)
    second = law(n, q)
    for s1, p1 in law(m, p).items():
        for s2, p2 in second.items():
            if any(x + y in a for x in s1 for y in s2):
                total += p1 * p2
    return total


def main():
    print("# p q m n target exact value")
    for p, q in PQ:
        for m, n in LEVELS:
            for t in TARGETS:
                v = hit(m, n, p, q, t)
                target = ";".join(str(x) for x in t)
                print(f"{float(p)!r} {float(q)!r} {m} {n} {target} {v.numerator}/{v.denominator} {float(v)!r}")


if __name__ == "__main__":
    main()
