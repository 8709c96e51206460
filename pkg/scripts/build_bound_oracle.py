"""Freeze reference values of the path integrals nu_1..nu_3, the zero bound and the safe time.

On the ray ``|zeta| = r >= 1`` the integrand is ``exp(r^{1/a} cos(theta/a)) r^w``;
with ``s = r^{1/a}`` and ``c = -cos(theta/a) > 0``

    int_1^inf exp(-c s) s^{a w} a s^{a-1} ds = a c^{-(p+1)} Gamma(p+1, c),   p = a w + a - 1,

an upper incomplete Gamma function.  The arc contributes
``int_0^theta exp(cos(phi/a)) dphi``, done by adaptive quadrature.  Everything
is in mpmath at 40 digits, independent of the package quadrature.

    python scripts/build_bound_oracle.py
"""

from __future__ import annotations

import json
from pathlib import Path

import mpmath as mp

OUT = Path(__file__).resolve().parents[1] / "tests" / "data" / "bound_oracle.json"
CASES = [(1.5, "7/8"), (1.2, "mid"), (1.8, "mid")]


def nu(alpha, theta):
    a = mp.mpf(alpha)
    c = -mp.cos(theta / a)
    assert c > 0
    arc = mp.quad(lambda phi: mp.exp(mp.cos(phi / a)), [0, theta])
    pref = 2 / (2 * mp.pi * a * mp.sin(theta))
    out = []
    for w in (1, 1 - 1 / a, 1 + 1 / a):
        p = a * w + a - 1
        ray = a * c ** (-(p + 1)) * mp.gammainc(p + 1, c, mp.inf)
        out.append(pref * (ray + arc))
    return out


def bound(alpha, theta, nus):
    a = mp.mpf(alpha)
    g = mp.gamma(-a)
    k1, k2, k3 = 1 / (a * g), 1 / ((a * a - a) * g), 1 / g
    n1, n2, n3 = nus
    algebraic = a * a * (a - 1) * g**2 * (k2 * n3 + k3 * n2 + 2 * k1 * n1 + n1 * n1 + n2 * n3)
    return max(1 / abs(mp.cos(theta)), algebraic), (k1, k2, k3)


def main() -> int:
    mp.mp.dps = 40
    rows = []
    for alpha, which in CASES:
        a = mp.mpf(alpha)
        theta = 7 * mp.pi / 8 if which == "7/8" else (mp.pi * a / 2 + mp.pi) / 2
        nus = nu(alpha, theta)
        eta_bound, kappas = bound(alpha, theta, nus)
        rows.append(
            {
                "alpha": alpha,
                "theta": mp.nstr(theta, 25),
                "kappa": [mp.nstr(k, 25) for k in kappas],
                "nu": [mp.nstr(v, 25) for v in nus],
                "eta_bound": mp.nstr(eta_bound, 25),
                # mu_min = 1
                "safe_time": mp.nstr(eta_bound ** (1 / a), 25),
            }
        )
        print(alpha, mp.nstr(theta, 10), [mp.nstr(v, 12) for v in nus], mp.nstr(eta_bound, 12))
    OUT.write_text(json.dumps({"digits": 25, "rows": rows}, indent=1) + "\n")
    print(f"-> {OUT}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
