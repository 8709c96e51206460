"""Freeze extended-precision reference values of E_{a,b}(-eta).

Two independent routes, both in mpmath:

* the power series at working precision sized to the cancellation
  (~eta**(1/a) nats), stopped with a ratio-test remainder bound;
* for arguments where the series is too expensive, the inverse-Laplace
  representation: the two residues at s = eta**(1/a) e^{+-i pi/a} plus the
  branch-cut integral along the negative real axis.

Where both are affordable they are cross-checked.  Output goes to
tests/data/ml_oracle.json and is consumed read-only by the test-suite.

    python scripts/build_ml_oracle.py
"""

from __future__ import annotations

import json
import math
import sys
import time
from pathlib import Path

import mpmath as mp
import numpy as np

OUT = Path(__file__).resolve().parents[1] / "tests" / "data" / "ml_oracle.json"
SERIES_MAX_NATS = 600.0
ORACLE_DIGITS = 30


def series(alpha, beta, eta):
    """Returns (value, remainder bound)."""
    a, b, x = mp.mpf(alpha), mp.mpf(beta), mp.mpf(eta)
    nats = float(x) ** (1.0 / alpha) if eta > 0 else 0.0
    bits = int(nats * 1.4427 + 60 * 3.33 + 64)
    with mp.workprec(max(bits, 200)):
        a, b, x = mp.mpf(alpha), mp.mpf(beta), mp.mpf(eta)
        s = mp.mpf(0)
        k = 0
        prev = None
        while True:
            t = (-x) ** k * mp.rgamma(a * k + b)
            s += t
            if x == 0:
                return s, mp.mpf(0)
            if prev is not None and t != 0:
                ratio = abs(t / prev)
                # terms decrease geometrically beyond this point; alternating
                # tail bounded by |t| * r / (1 - r)
                if ratio < 0.5 and abs(t) < mp.mpf(10) ** (-ORACLE_DIGITS - 10) * abs(s):
                    bound = abs(t) * ratio / (1 - ratio)
                    return +s, bound
            prev = t
            k += 1


def laplace(alpha, beta, eta):
    with mp.workdps(ORACLE_DIGITS + 15):
        a, b, x = mp.mpf(alpha), mp.mpf(beta), mp.mpf(eta)
        pi = mp.pi
        s = x ** (1 / a) * mp.expjpi(1 / a)
        residues = (2 / a) * mp.re(s ** (1 - b) * mp.exp(s))
        sb, sab, ca = mp.sinpi(b), mp.sinpi(a - b), mp.cospi(a)

        g = a - b + 1  # r**(a-b) dr = du / g with u = r**g removes the endpoint singularity

        def f(u):
            r = u ** (1 / g)
            ra = r**a
            return mp.exp(-r) * (ra * sb - x * sab) / (ra * ra + 2 * x * ra * ca + x * x) / g

        pts = [mp.mpf(0), mp.mpf(1), mp.mpf(10), mp.mpf(40), mp.mpf(120)]
        if ca < 0:
            r0 = (-x * ca) ** (1 / a)
            for c in (r0 / 2, r0, 2 * r0):
                if c < 120:
                    pts.append(c)
        pts = sorted(set(p**g for p in pts)) + [mp.inf]
        integral = mp.quad(f, pts, maxdegree=10)
        return residues + integral / pi


def grid():
    etas = [0.0] + [float(v) for v in np.logspace(-2, 6, 33)]
    pts = []
    for alpha in (1.1, 1.5, 1.9):
        for beta in (1.0, 2.0, alpha):
            for eta in etas:
                pts.append(("grid", alpha, beta, eta))
            for eta in (40.0, 50.0, 60.0, 70.0, 80.0):
                pts.append(("overlap", alpha, beta, eta))
    extra = [
        (1.5, 1.5, 5.0),
        (1.5, 1.5, 100.0),
        (1.5, 1.0, 1.0),
        (1.5, 2.0, 1.0),
        (1.5, 1.5, 1.0),
        (1.2, 1.0, 3.0),
        (1.8, 1.8, 30.0),
        (1.5, 1.0, 1e5),
        (1.5, 2.0, 1e5),
        (1.5, 1.5, 1e5),
        (1.5, 1.0, 1e6),
        (1.5, 2.0, 1e6),
        (1.5, 1.5, 1e6),
    ]
    pts += [("extra", a, b, e) for a, b, e in extra]
    return pts


def main() -> int:
    rows = []
    t0 = time.time()
    for tag, alpha, beta, eta in grid():
        nats = eta ** (1.0 / alpha) if eta > 0 else 0.0
        cross = None
        if nats <= SERIES_MAX_NATS:
            val, bound = series(alpha, beta, eta)
            method = "series"
            if 1.0 <= eta and nats <= 150:
                cross = laplace(alpha, beta, eta)
        else:
            val, bound = laplace(alpha, beta, eta), None
            method = "laplace"
        if cross is not None:
            rel = abs((cross - val) / val) if val != 0 else abs(cross)
            if rel > 1e-22:
                print(f"cross-check mismatch {alpha} {beta} {eta}: {mp.nstr(rel, 5)}", file=sys.stderr)
                return 1
        rows.append(
            {
                "tag": tag,
                "alpha": alpha,
                "beta": beta,
                "eta": eta,
                "value": mp.nstr(val, ORACLE_DIGITS, strip_zeros=False),
                "method": method,
                "remainder_bound": None if bound is None else mp.nstr(bound, 5),
                "cross_checked": cross is not None,
            }
        )
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({"digits": ORACLE_DIGITS, "rows": rows}, indent=1) + "\n")
    print(f"{len(rows)} rows -> {OUT} ({time.time() - t0:.1f}s)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
