"""Slow, explicit reference implementations used as test oracles.

Nothing here imports from the package under test except plain data
containers; every formula is evaluated with Python loops.
"""
import itertools
import math

import numpy as np


def corrected_averages(num_users, num_items, triples, k1, k2):
    """Returns (global_mean, item_means, global_offset, user_offsets) as Python lists."""
    ratings = {(u, i): float(r) for u, i, r in triples}
    total = 0.0
    for r in ratings.values():
        total += r
    gmean = total / len(ratings)

    item_means = []
    for i in range(num_items):
        rated = [r for (uu, ii), r in ratings.items() if ii == i]
        if rated:
            s = 0.0
            for r in rated:
                s += r
            item_means.append((k1 * gmean + s) / (k1 + len(rated)))
        else:
            item_means.append(gmean)

    s = 0.0
    for (u, i), r in ratings.items():
        s += r - item_means[i]
    goffset = s / len(ratings)

    user_offsets = []
    for u in range(num_users):
        resid = [r - item_means[ii] for (uu, ii), r in ratings.items() if uu == u]
        if resid:
            s = 0.0
            for d in resid:
                s += d
            user_offsets.append((k2 * goffset + s) / (k2 + len(resid)))
        else:
            user_offsets.append(goffset)
    return gmean, item_means, goffset, user_offsets


def corrected_fill(num_users, num_items, triples, k1, k2):
    _, item_means, _, user_offsets = corrected_averages(num_users, num_items, triples, k1, k2)
    known = {(u, i): r for u, i, r in triples}
    out = np.empty((num_users, num_items))
    for u in range(num_users):
        for i in range(num_items):
            out[u, i] = known[u, i] if (u, i) in known else item_means[i] + user_offsets[u]
    return out


def mean_fill(num_users, num_items, triples):
    known = {(u, i): r for u, i, r in triples}
    gmean = sum(known.values()) / len(known)
    out = np.empty((num_users, num_items))
    for i in range(num_items):
        col = [r for (uu, ii), r in known.items() if ii == i]
        fill = sum(col) / len(col) if col else gmean
        for u in range(num_users):
            out[u, i] = known.get((u, i), fill)
    return out


def column_stats(m):
    rows, cols = m.shape
    mu, sigma = [], []
    for j in range(cols):
        s = 0.0
        for i in range(rows):
            s += m[i, j]
        mean = s / rows
        v = 0.0
        for i in range(rows):
            v += (m[i, j] - mean) ** 2
        sd = math.sqrt(v / rows)
        mu.append(mean)
        sigma.append(sd if sd >= 1e-12 else 1.0)
    return mu, sigma


def jacobi_eigenvalues(a, sweeps=100):
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending."""
    a = [list(map(float, row)) for row in a]
    n = len(a)
    for _ in range(sweeps):
        off = sum(a[p][q] ** 2 for p in range(n) for q in range(n) if p != q)
        if off < 1e-30:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p][q]) < 1e-300:
                    continue
                theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp, akq = a[k][p], a[k][q]
                    a[k][p] = c * akp - s * akq
                    a[k][q] = s * akp + c * akq
                for k in range(n):
                    apk, aqk = a[p][k], a[q][k]
                    a[p][k] = c * apk - s * aqk
                    a[q][k] = s * apk + c * aqk
    return sorted((a[i][i] for i in range(n)), reverse=True)


def gram_eigenvalues(m):
    m = np.asarray(m, dtype=float)
    small = m if m.shape[0] >= m.shape[1] else m.T
    gram = [[sum(small[k][i] * small[k][j] for k in range(small.shape[0]))
             for j in range(small.shape[1])] for i in range(small.shape[1])]
    return jacobi_eigenvalues(gram)


def optimal_rank_error(m, c):
    """Best achievable Frobenius error at rank c: sqrt of the trailing Gram eigenvalues."""
    eig = gram_eigenvalues(m)
    return math.sqrt(max(0.0, sum(max(e, 0.0) for e in eig[c:])))


def neighbor_weights(points, assignment, u):
    out = []
    for v in range(len(points)):
        if v == u or assignment[v] != assignment[u]:
            continue
        d2 = 0.0
        for j in range(len(points[u])):
            d2 += (points[u][j] - points[v][j]) ** 2
        d = math.sqrt(d2)
        out.append((v, d, 1.0 / (1.0 + d * d)))
    return out


def weighted_fill(points, assignment, missing):
    points = np.asarray(points, dtype=float)
    out = points.copy()
    for u in range(points.shape[0]):
        nb = neighbor_weights(points, assignment, u)
        for i in range(points.shape[1]):
            if not missing[u][i] or not nb:
                continue
            num = den = 0.0
            for v, _, w in nb:
                num += w * points[v][i]
                den += w
            out[u, i] = num / den
    return out


def centroid_fill(points, centroids, assignment, missing):
    points = np.asarray(points, dtype=float)
    out = points.copy()
    for u in range(points.shape[0]):
        for i in range(points.shape[1]):
            if missing[u][i]:
                out[u, i] = centroids[assignment[u]][i]
    return out


def partition_cost(points, labels):
    points = np.asarray(points, dtype=float)
    cost = 0.0
    for c in set(labels):
        members = [p for p, l in zip(points, labels) if l == c]
        centre = [sum(col) / len(members) for col in zip(*members)]
        for p in members:
            cost += sum((a - b) ** 2 for a, b in zip(p, centre))
    return cost


def best_two_partition(points):
    """Minimum within-cluster sum of squares over every split into two non-empty groups.

    Enumerates all 2**(n-1) - 1 splits; per group SSE = sum |x|^2 - |sum x|^2 / size.
    """
    x = np.asarray(points, dtype=float)
    n = len(x)
    splits = np.array(list(itertools.product((0.0, 1.0), repeat=n - 1)))[1:]
    member = np.hstack([np.zeros((len(splits), 1)), splits])  # point 0 always in group 0
    size_b = member.sum(axis=1)
    sum_b = member @ x
    sum_a = x.sum(axis=0) - sum_b
    total = float(np.sum(x * x))
    cost = total - np.sum(sum_a ** 2, axis=1) / (n - size_b) - np.sum(sum_b ** 2, axis=1) / size_b
    return float(cost.min())
