"""Independent reference computations used by the tests.

Nothing here calls into the package's arithmetic: elements of Z_p[pi]/pi^M
(pi^N = p) are plain digit lists normalized by carrying ``p`` from position k
to position k + N, and F_p[[t^(1/N)]] digits are plain polynomials mod p.
"""

from __future__ import annotations

import itertools


def carry(coeffs, p, N, M):
    """Normalize integer coefficients of pi^k into digits in [0, p)."""
    c = list(coeffs) + [0] * max(0, M - len(coeffs))
    c = c[:M] + [0] * N
    for k in range(M):
        q, c[k] = divmod(c[k], p)
        if k + N < M:
            c[k + N] += q
    return tuple(c[:M])


def mixed_mul(a, b, p, N, M):
    prod = [0] * (2 * M)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] += x * y
    return carry(prod[:M], p, N, M)


def mixed_add(a, b, p, N, M):
    return carry([x + y for x, y in itertools.zip_longest(a, b, fillvalue=0)], p, N, M)


def equal_mul(a, b, p, M):
    prod = [0] * M
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if i + j < M:
                prod[i + j] = (prod[i + j] + x * y) % p
    return tuple(prod)


def digits_of_int(n, p, N, M):
    """Digits of the integer n, which lives in Z_p = span of pi^(kN)."""
    coeffs = [0] * M
    n %= p ** ((M + N - 1) // N)
    k = 0
    while n and k * N < M:
        n, coeffs[k * N] = divmod(n, p)
        k += 1
    return tuple(coeffs)


def order(digits):
    for k, d in enumerate(digits):
        if d:
            return k
    return None


def level_exists(vertices, edges):
    """Brute force: an integer labeling increasing strictly along every edge."""
    for values in itertools.product(range(len(vertices)), repeat=len(vertices)):
        lv = dict(zip(vertices, values))
        if all(lv[t] > lv[o] for o, t in edges):
            return True
    return False


def cycle_rank(vertices, edges):
    """b_1 = number of non-tree edges of a spanning forest built by DFS."""
    adj = {v: [] for v in vertices}
    for k, (a, b) in enumerate(edges):
        adj[a].append((b, k))
        adj[b].append((a, k))
    seen, tree = set(), 0
    for root in vertices:
        if root in seen:
            continue
        seen.add(root)
        stack = [root]
        while stack:
            v = stack.pop()
            for w, _ in adj[v]:
                if w not in seen:
                    seen.add(w)
                    tree += 1
                    stack.append(w)
    return len(edges) - tree
