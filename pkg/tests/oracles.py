"""Independent brute-force oracles, sharing no code with the package."""

from collections import Counter


def standard_multitableaux(charges, n):
    """Yield (shape, residue sequence) for every standard multitableau with n boxes.

    Component k of the multipartition has charge ``charges[k]``; the box in
    row a, column b of that component has residue ``charge + b - a``.
    """
    def rec(shape, seq):
        if len(seq) == n:
            yield tuple(map(tuple, shape)), tuple(seq)
            return
        for k, rows in enumerate(shape):
            for a in range(len(rows) + 1):
                b = rows[a] if a < len(rows) else 0
                if a > 0 and rows[a - 1] <= b:
                    continue
                new = list(rows) + ([0] if a == len(rows) else [])
                new[a] += 1
                nxt = [list(p) for p in shape]
                nxt[k] = new
                yield from rec(nxt, seq + [charges[k] + b - a])
    yield from rec([[] for _ in charges], [])


def cyclotomic_dimension(nu: dict, weight: dict) -> int:
    """dim R^Lambda_nu = sum over multipartitions of (number of standard tableaux)^2."""
    charges = [v for v, c in sorted(weight.items()) for _ in range(c)]
    target = Counter({v: c for v, c in nu.items() if c})
    counts = Counter()
    for shape, seq in standard_multitableaux(charges, sum(target.values())):
        if Counter(seq) == target:
            counts[shape] += 1
    return sum(c * c for c in counts.values())


def idempotent_dimension(seq, weight: dict) -> int:
    """dim 1_i R^Lambda 1_i = (number of standard tableaux with residue sequence i)^2."""
    charges = [v for v, c in sorted(weight.items()) for _ in range(c)]
    n = sum(1 for _, s in standard_multitableaux(charges, len(seq)) if s == tuple(seq))
    return n * n
