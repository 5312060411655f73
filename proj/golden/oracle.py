#!/usr/bin/env python3
"""Independent oracle for the golden values in golden_values.json.

Nothing here shares code with the C++ library. Gabor atoms are sampled from
their closed form (no interpolation, no FFT shifts), Hermite functions come
from scipy's physicists' polynomials with log-space normalization, model sets
are enumerated with integer (n, m) coordinates and the exact star map, and
p-adic counts use Python integers.

Usage: python3 golden/oracle.py > golden/golden_values.json
"""
import itertools
import json
import math
from fractions import Fraction

import numpy as np
from scipy.special import eval_hermite, gammaln

TAU = (1 + math.sqrt(5)) / 2
TAU_C = (1 - math.sqrt(5)) / 2


# --------------------------------------------------------------------------
# Fibonacci model set via integer coordinates
# --------------------------------------------------------------------------
def fibonacci_nm(radius, window=1.0):
    """All (n, m) with |n + m tau| <= radius and |n + m tau'| <= window."""
    out = []
    mmax = int((radius + window) / math.sqrt(5)) + 2
    for m in range(-mmax, mmax + 1):
        nlo = math.floor(-radius - m * TAU) - 1
        nhi = math.ceil(radius - m * TAU) + 1
        for n in range(nlo, nhi + 1):
            if abs(n + m * TAU) <= radius + 1e-12 and abs(n + m * TAU_C) <= window * (1 + 1e-12):
                out.append((n, m))
    return out


def phys(nm):
    return nm[0] + nm[1] * TAU


def star(nm):
    return nm[0] + nm[1] * TAU_C


def fibonacci_goldens():
    g = {}
    g["count_radius_10"] = len(fibonacci_nm(10.0))

    lam100 = fibonacci_nm(100.0)
    xs = sorted(phys(p) for p in lam100)
    g["count_r100_center0_r50"] = sum(1 for x in xs if abs(x) <= 50.0 + 1e-9)

    gaps = np.diff(xs)
    g["min_separation_r100"] = float(gaps.min())
    # Exact continuous sup-distance covering radius over [-(100-10), 100-10].
    inner = 90.0
    pts = [x for x in xs if abs(x) <= 100.0]
    best = 0.0
    probes = [-inner, inner]
    for a, b in zip(pts, pts[1:]):
        lo, hi = max(a, -inner), min(b, inner)
        if lo < hi:
            mid = 0.5 * (a + b)
            if -inner <= mid <= inner:
                probes.append(mid)
    for pr in probes:
        best = max(best, min(abs(pr - x) for x in pts))
    g["covering_radius_r100_margin10"] = best

    # Greedy cover on (Lambda+Lambda) inside the verified region, candidates
    # restricted to sums with |f| <= R_b - R_v, tie-break (sup-norm, lex).
    rb = 100.0
    rv = 50.0
    sums = {}
    for p, q in itertools.product(lam100, lam100):
        s = (p[0] + q[0], p[1] + q[1])
        if abs(phys(s)) <= 100.0 + 1e-12:
            sums[s] = phys(s)
    sums = sorted(sums.items(), key=lambda kv: kv[1])
    targets = [s for s, x in sums if abs(x) <= rv + 1e-12]
    cands = [s for s, x in sums if abs(x) <= rb - rv + 1e-12]

    def covers(f, s):
        d = (s[0] - f[0], s[1] - f[1])
        return abs(star(d)) <= 1.0 * (1 + 1e-12) and abs(phys(d)) <= rb + 1e-12

    cover_sets = {f: {i for i, s in enumerate(targets) if covers(f, s)} for f in cands}
    uncovered = set(range(len(targets)))
    chosen = []
    while uncovered:
        best_f = min(cands, key=lambda f: (-len(cover_sets[f] & uncovered), abs(phys(f)), phys(f)))
        gain = cover_sets[best_f] & uncovered
        assert gain
        chosen.append(best_f)
        uncovered -= gain
    g["cover_k_greedy"] = len(chosen)
    g["cover_defect_set"] = sorted(phys(f) for f in chosen)
    g["cover_targets"] = len(targets)
    # Exhaustive minimum over the same candidate pool.
    full = set(range(len(targets)))
    kmin = None
    for size in range(1, len(chosen) + 1):
        for combo in itertools.combinations(cands, size):
            if set().union(*(cover_sets[f] for f in combo)) == full:
                kmin = size
                break
        if kmin:
            break
    g["cover_k_min"] = kmin

    # Sumset of Lambda_10 lies in the window-[-2,2] model set (star map check).
    lam10 = fibonacci_nm(10.0)
    sums10 = {(p[0] + q[0], p[1] + q[1]) for p in lam10 for q in lam10}
    sums10 = [s for s in sums10 if abs(phys(s)) <= 10.0 + 1e-12]
    g["sumset_r10_count"] = len(sums10)
    g["sumset_r10_max_star"] = max(abs(star(s)) for s in sums10)
    return g


# --------------------------------------------------------------------------
# Gabor oracle: closed-form atoms on a sample grid
# --------------------------------------------------------------------------
class Grid:
    def __init__(self, T, dt):
        self.dt = dt
        self.t = -T + dt * np.arange(int(math.floor(2 * T / dt + 1e-9)) + 1)


def atom(grid, x, xi):
    t = grid.t
    return np.exp(2j * np.pi * xi * t) * 2 ** 0.25 * np.exp(-np.pi * (t - x) ** 2)


def hermite(grid, n):
    u = math.sqrt(2 * math.pi) * grid.t
    lognorm = -0.5 * (n * math.log(2) + gammaln(n + 1) + 0.5 * math.log(math.pi))
    with np.errstate(all="ignore"):
        h = (2 * math.pi) ** 0.25 * eval_hermite(n, u) * np.exp(lognorm - u ** 2 / 2)
    return np.nan_to_num(h).astype(complex)


def rect_lattice(a, b, radius):
    na = int(math.floor(radius / a + 1e-9))
    nb = int(math.floor(radius / b + 1e-9))
    return [(a * i, b * j) for i in range(-na, na + 1) for j in range(-nb, nb + 1)]


def family(grid, pts):
    return np.stack([atom(grid, x, xi) for x, xi in pts], axis=1)


def ls_residual(grid, target, pts):
    w = math.sqrt(grid.dt)
    if not pts:
        return float(np.linalg.norm(target * w))
    V = family(grid, pts) * w
    c, *_ = np.linalg.lstsq(V, target * w, rcond=None)
    return float(np.linalg.norm(target * w - V @ c))


def frame_sweep(grid, pts, n_max, step):
    V = family(grid, pts)
    H = np.stack([hermite(grid, n) for n in range(n_max)], axis=1)
    A = V.conj().T @ H * grid.dt
    M = A.T @ A.conj()
    lower, upper = [], []
    for n in range(step, n_max + 1, step):
        w = np.linalg.eigvalsh(M[:n, :n])
        lower.append(float(w[0]))
        upper.append(float(w[-1]))
    return lower, upper


def gabor_goldens():
    g = {}
    fine = Grid(12.0, 0.001)
    g0 = atom(fine, 0, 0)
    g["ambiguity_1_0"] = float(abs(np.sum(g0 * np.conj(atom(fine, 1.0, 0.0))) * fine.dt))

    big = Grid(16.0, 0.01)
    s = 1 / math.sqrt(2)
    lo, hi = frame_sweep(big, rect_lattice(s, s, 10.5), 60, 10)
    g["frame_05_lower"] = lo
    g["frame_05_upper"] = hi
    lo, hi = frame_sweep(big, rect_lattice(2.5, 0.42, 10.5), 60, 10)
    g["frame_105_lower"] = lo
    g["frame_105_upper"] = hi
    r = math.sqrt(1.05)
    lo, hi = frame_sweep(big, rect_lattice(r, r, 10.5), 60, 10)
    g["frame_105_square_lower"] = lo

    std = Grid(12.0, 0.01)
    lo, hi = frame_sweep(std, rect_lattice(s, s, 9.6), 40, 10)
    g["frame_05_N40_T12_lower"] = lo[-1]
    g["frame_05_N40_T12_upper"] = hi[-1]

    pts = rect_lattice(2.0, 1.0, 6.0)
    V = family(std, pts)
    G = V.conj().T @ V * std.dt
    w = np.linalg.eigvalsh(G)
    g["riesz_2x1_r6_count"] = len(pts)
    g["riesz_2x1_r6_lower"] = float(w[0])
    g["riesz_2x1_r6_upper"] = float(w[-1])
    Gi = np.linalg.inv(G)
    g["riesz_2x1_r6_bsup"] = float(np.max(np.real(np.diag(Gi))))
    deltas = [ls_residual(std, V[:, i], [p for j, p in enumerate(pts) if j != i]) for i in range(len(pts))]
    g["riesz_2x1_r6_delta"] = float(min(deltas))

    lat = rect_lattice(s, s, 10.5)
    hap = {}
    for K in (2.0, 4.0, 6.0):
        worst = 0.0
        for x, xi in itertools.product(np.linspace(-1, 1, 5), repeat=2):
            local = [p for p in lat if max(abs(p[0] - x), abs(p[1] - xi)) <= K + 1e-9]
            worst = max(worst, ls_residual(std, atom(std, x, xi), local))
        hap[str(int(K))] = worst
    g["hap_05_max_residual"] = hap
    g["complete_05_hermite10"] = max(ls_residual(std, hermite(std, n), lat) for n in range(10))
    return g


# --------------------------------------------------------------------------
# p-adic model set in Q_p, exact integers
# --------------------------------------------------------------------------
def padic_goldens():
    def count(p, w, n):
        w = Fraction(w)
        bound = math.floor(w * p ** n)
        return len({Fraction(a, p ** n) for a in range(-bound, bound + 1)})

    g = {}
    g["p2_w1_counts"] = [count(2, 1, n) for n in range(13)]
    g["p3_whalf_counts"] = [count(3, Fraction(1, 2), n) for n in range(9)]
    g["p5_w07_counts"] = [count(5, Fraction(7, 10), n) for n in range(7)]
    return g


def main():
    out = {
        "fibonacci": fibonacci_goldens(),
        "gabor": gabor_goldens(),
        "padic": padic_goldens(),
    }
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
