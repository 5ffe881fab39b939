"""Integrate the Moser flow for a trivial deformation and compare with its closed-form gauge.

    python scripts/moser_demo.py [--family g2 --k s --m 0] [--smax 0.2] [--steps 1000]
"""

import argparse

from crossedhom import deformation as dfm


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", default="g2")
    ap.add_argument("--f")
    ap.add_argument("--k", default="s")
    ap.add_argument("--m", default="0")
    ap.add_argument("--g")
    ap.add_argument("--h")
    ap.add_argument("--smax", type=float, default=0.2)
    ap.add_argument("--steps", type=int, default=1000)
    args = ap.parse_args()

    texts = {n: getattr(args, n) for n in dfm.PARAM_NAMES[args.family]}
    P = dfm.DeformationPath.from_strings(args.family, **texts)
    print("verdict:", dfm.rigidity_verdict(P).summary())

    trace = dfm.moser_flow(P, args.smax, args.steps)
    print(f"gauge residual along the flow: {dfm.moser_gauge_residual(P, trace):.3e}")
    closed = dfm.closed_form_gauge(P)
    print(f"{'s':>8} {'tau_a':>14} {'tau_b':>14}" + ("   |flow - closed|" if closed else ""))
    for i in range(0, len(trace.s), max(1, args.steps // 10)):
        s, a, b = trace.rows()[i]
        line = f"{s:8.4f} {a:14.10f} {b:14.10f}"
        if closed:
            t = closed[1](s)
            line += f"   {max(abs(a - t.a), abs(b - t.b)):.2e}"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
