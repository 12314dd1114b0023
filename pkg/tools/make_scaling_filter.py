#!/usr/bin/env python3
"""Derive the 32-tap least-asymmetric (symlet) orthogonal scaling filter.

Construction follows the classical orthogonal-wavelet recipe: factor the
degree-15 Daubechies half-band polynomial, then pick one root out of every
reciprocal pair so that the resulting filter's phase is as close to linear
as possible.  Brute-forcing all conjugate-consistent root selections is
cheap (2^8 candidates) and avoids the fragile analytic selection rules.

Run this script to regenerate the coefficient table embedded in
``gazetime/wavelets.py``; it prints the table plus the validation metrics
(orthonormality defect, vanishing moments) so the numbers can be checked
before pasting.
"""

import itertools

import mpmath as mp
import numpy as np

mp.mp.dps = 60

N_MOMENTS = 16  # vanishing moments; filter length is 2 * N_MOMENTS


def halfband_roots():
    """Roots (in z) of z^(N-1) * P((2 - z - 1/z)/4), P the Daubechies polynomial."""
    n = N_MOMENTS
    # P(y) = sum_k C(n-1+k, k) y^k
    p_y = [mp.binomial(n - 1 + k, k) for k in range(n)]
    # y = (2 - z - 1/z)/4  ->  y * z = (-z^2 + 2z - 1)/4
    # Build B(z) = z^(n-1) * P(y(z)) as a polynomial of degree 2(n-1).
    poly = [mp.mpf(0)] * (2 * n - 1)
    base = [mp.mpf(1)]  # (-(z^2) + 2z - 1)^k / 4^k, expanded iteratively
    quad = [mp.mpf(-1) / 4, mp.mpf(2) / 4, mp.mpf(-1) / 4]  # ascending powers
    for k in range(n):
        # add p_y[k] * z^(n-1-k) * base(z)
        for i, c in enumerate(base):
            poly[n - 1 - k + i] += p_y[k] * c
        nxt = [mp.mpf(0)] * (len(base) + 2)
        for i, c in enumerate(base):
            for j, q in enumerate(quad):
                nxt[i + j] += c * q
        base = nxt
    coeffs = list(reversed(poly))  # mpmath wants descending powers
    roots = mp.polyroots(coeffs, maxsteps=200, extraprec=200)
    return roots


def group_roots(roots):
    """Group roots into reciprocal pairs, merging conjugates into quadruples."""
    inside = [r for r in roots if abs(r) < 1]
    assert len(inside) == len(roots) // 2, "no roots may sit on the unit circle"
    groups = []  # each entry: (inside_choice, outside_choice) lists of roots
    used = [False] * len(inside)
    for i, r in enumerate(inside):
        if used[i]:
            continue
        used[i] = True
        if abs(mp.im(r)) < mp.mpf("1e-40"):
            groups.append(([r], [1 / r]))
        else:
            for j in range(i + 1, len(inside)):
                if not used[j] and abs(inside[j] - mp.conj(r)) < mp.mpf("1e-30"):
                    used[j] = True
                    break
            else:
                raise AssertionError("conjugate partner missing")
            pair = [r, mp.conj(r)]
            groups.append((pair, [1 / q for q in pair]))
    return groups


def filter_from_selection(groups, picks):
    """Assemble the 32-tap filter for one inside/outside selection."""
    chosen = []
    for (ins, outs), pick in zip(groups, picks):
        chosen.extend(outs if pick else ins)
    # Q(z) from its roots, then H = (1+z)^N * Q, normalised to sum sqrt(2).
    q = [mp.mpf(1)]
    for r in chosen:
        q = [mp.mpf(0)] + q
        q = [q[i] - (r * q[i + 1] if i + 1 < len(q) else 0) for i in range(len(q))]
        # the line above computes convolution with (z - r) in ascending powers
    q = [mp.re(c) for c in q]
    h = [mp.mpf(1)]
    for _ in range(N_MOMENTS):
        h = [mp.mpf(0)] + h
        h = [h[i] + (h[i + 1] if i + 1 < len(h) else 0) for i in range(len(h))]
    out = [mp.mpf(0)] * (len(h) + len(q) - 1)
    for i, a in enumerate(h):
        for j, b in enumerate(q):
            out[i + j] += a * b
    s = sum(out)
    return [c * mp.sqrt(2) / s for c in out]


def phase_nonlinearity(h):
    """RMS deviation of the passband phase from its best linear fit."""
    hf = np.array([float(c) for c in h])
    n = len(hf)
    omegas = np.linspace(0.02, 0.9 * np.pi / 2, 160)  # passband only
    response = np.array(
        [np.sum(hf * np.exp(-1j * w * np.arange(n))) for w in omegas]
    )
    phase = np.unwrap(np.angle(response))
    slope = np.polyfit(omegas, phase, 1)
    resid = phase - np.polyval(slope, omegas)
    return float(np.sqrt(np.mean(resid**2)))


def validate(h):
    two = mp.mpf(2)
    report = {
        "sum_minus_sqrt2": float(abs(sum(h) - mp.sqrt(two))),
        "norm_minus_1": float(abs(sum(c * c for c in h) - 1)),
    }
    worst = mp.mpf(0)
    for k in range(1, N_MOMENTS):
        dot = sum(h[i] * h[i + 2 * k] for i in range(len(h) - 2 * k))
        worst = max(worst, abs(dot))
    report["max_shift_dot"] = float(worst)
    # wavelet moments: sum (-1)^i h[L-1-i] i^p must vanish for p < N
    g = [(-1) ** i * h[len(h) - 1 - i] for i in range(len(h))]
    worst = mp.mpf(0)
    for p in range(N_MOMENTS):
        m = sum(g[i] * mp.mpf(i) ** p for i in range(len(g)))
        scale = sum(abs(g[i]) * mp.mpf(i) ** p for i in range(len(g)))
        worst = max(worst, abs(m) / scale)
    report["max_rel_moment"] = float(worst)
    return report


def main():
    groups = group_roots(halfband_roots())
    print(f"{len(groups)} root groups -> {2 ** len(groups)} candidate filters")
    best = None
    for picks in itertools.product([0, 1], repeat=len(groups)):
        h = filter_from_selection(groups, picks)
        score = phase_nonlinearity(h)
        if best is None or score < best[0]:
            best = (score, picks, h)
    score, picks, h = best
    # canonical orientation: energy centre of mass in the front half
    com = sum(i * float(c) ** 2 for i, c in enumerate(h))
    if com > (len(h) - 1) / 2:
        h = list(reversed(h))
    print(f"selected picks={picks} phase-RMS={score:.6g}")
    for key, val in validate(h).items():
        print(f"  {key}: {val:.3e}")
    print("\nSYM16_DEC_LO = (")
    for c in h:
        print(f"    {float(c)!r},")
    print(")")


if __name__ == "__main__":
    main()
