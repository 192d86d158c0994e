#!/usr/bin/env python3
"""Writes the regression corpus of problem files to problems/corpus/.

Every instance has maps sharing one attracting multiplier.  Hit-producing
varieties are built from exact rational orbit points, so the expected hits are
known independently of the p-adic machinery.
"""

import json
import random
import sys
from fractions import Fraction
from pathlib import Path


def q(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def ev(poly, x):
    acc = Fraction(0)
    for c in reversed(poly):
        acc = acc * x + c
    return acc


def it(poly, x, n):
    for _ in range(n):
        x = ev(poly, x)
    return x


def shifted(alpha, coeffs):
    """alpha + sum_k coeffs[k] (X - alpha)^k, k >= 1, expanded."""
    out = [Fraction(alpha)]
    power = [Fraction(1)]
    for c in coeffs:
        power = [Fraction(0)] + power
        for i in range(len(power) - 1):
            power[i] -= alpha * power[i + 1]
        out += [Fraction(0)] * (len(power) - len(out))
        for i, pc in enumerate(power):
            out[i] += c * pc
    return out


def unit(rng, p, hi=20):
    while True:
        u = rng.randint(1, hi)
        if u % p:
            return u if rng.random() < 0.7 else -u


def term(exps, c):
    return {"exponents": list(exps), "coefficient": q(c)}


def linear(g, coeffs, const):
    terms = [term([1 if j == i else 0 for j in range(g)], c) for i, c in enumerate(coeffs) if c]
    if const:
        terms.append(term([0] * g, const))
    return terms


def random_map(rng, p, a1, alpha=0):
    degree = rng.choice([2, 2, 3])
    higher = [rng.randint(-4, 4) for _ in range(degree - 1)]
    if higher[-1] == 0:
        higher[-1] = 1
    return shifted(alpha, [a1] + higher)


def instance(rng, kind, idx):
    p = rng.choice([3, 5, 7])
    g = rng.choice([2, 3])
    a1 = p * unit(rng, p, 6)
    doc = {"name": f"{kind}-{idx:02d}", "prime": p, "precision": 128, "truncation": 48, "max_iterations": 100}
    alphas = [0] * g
    if kind == "shifted":
        alphas = [rng.randint(-3, 3) for _ in range(g)]
    maps = [random_map(rng, p, a1, alphas[i]) for i in range(g)]
    start = [alphas[i] + p ** rng.randint(1, 3) * unit(rng, p) for i in range(g)]
    variety = []

    if kind == "generic":
        for _ in range(rng.randint(1, 2)):
            terms = {}
            for _ in range(rng.randint(2, 4)):
                e = [0] * g
                for _ in range(rng.randint(0, 2)):
                    e[rng.randrange(g)] += 1
                terms[tuple(e)] = terms.get(tuple(e), 0) + rng.randint(-5, 5)
            gen = [term(e, c) for e, c in sorted(terms.items()) if c]
            variety.append(gen or [term([1] + [0] * (g - 1), 1)])
    elif kind == "diagonal":
        maps[1] = list(maps[0])
        if rng.random() < 0.5:
            start[1] = start[0]
            variety.append(linear(g, [1, -1] + [0] * (g - 2), 0))
        else:
            # the graph of P_0 is invariant: X_1 = P_0(X_0)
            start[1] = ev(maps[0], start[0])
            gen = [term([0, 1] + [0] * (g - 2), 1)]
            for k, c in enumerate(maps[0]):
                if c:
                    gen.append(term([k, 0] + [0] * (g - 2), -c))
            variety.append(gen)
    elif kind == "hit":
        k = rng.randrange(g)
        h = rng.randint(0, 4)
        maps[k] = shifted(0, [a1, rng.choice([-2, -1, 1, 2])])
        c = it(maps[k], start[k], h)
        if rng.random() < 0.3:
            # two orbit points on one coordinate: (X_k - c)(X_k - c')
            h2 = h + rng.randint(1, 3)
            c2 = it(maps[k], start[k], h2)
            e1 = [0] * g
            e1[k] = 1
            e2 = [0] * g
            e2[k] = 2
            variety.append([term(e2, 1), term(e1, -(c + c2)), term([0] * g, c * c2)])
        else:
            variety.append(linear(g, [1 if i == k else 0 for i in range(g)], -c))
            if rng.random() < 0.4:
                j = (k + 1) % g
                maps[j] = shifted(0, [a1, 1])
                cj = it(maps[j], start[j], h)
                variety.append(linear(g, [1 if i == j else 0 for i in range(g)], -cj))
    elif kind == "shifted":
        k = rng.randrange(g)
        maps[k] = shifted(alphas[k], [a1, 1])
        h = rng.randint(1, 3)
        c = it(maps[k], start[k], h)
        variety.append(linear(g, [1 if i == k else 0 for i in range(g)], -c))
        doc["fixed_points"] = [q(a) for a in alphas]

    doc["polynomials"] = [[q(c) for c in m] for m in maps]
    doc["start"] = [q(x) for x in start]
    doc["variety"] = variety
    return doc


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "problems" / "corpus")
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20240601)
    plan = [("generic", 18), ("diagonal", 10), ("hit", 16), ("shifted", 6)]
    idx = 0
    for kind, count in plan:
        for _ in range(count):
            doc = instance(rng, kind, idx)
            (out / f"{idx:02d}-{kind}.json").write_text(json.dumps(doc, indent=2) + "\n")
            idx += 1


if __name__ == "__main__":
    main()
