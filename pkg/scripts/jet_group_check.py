"""Measure the group-law residuals of the jet products over random samples:
associativity, two-sided unit and two-sided inverse for the tangent layout at
orders 1-4 and the iterated layout at orders 1-3.

Usage: python3 scripts/jet_group_check.py [--trials N] [--seed S]
"""

import argparse

import numpy as np

from unimech import (
    iterated_inverse,
    iterated_multiply,
    random_jet,
    tn_inverse,
    tn_multiply,
    unit_jet,
)


def _gap(a, b) -> float:
    return max(
        float(np.max(np.abs(a.base - b.base))),
        float(np.max(np.abs(a.slots - b.slots), initial=0.0)),
    )


def _law_residuals(group, dim, order, kind, mul, inv, trials, rng):
    e = unit_jet(group, dim, order, kind=kind)
    assoc = unit = inverse = 0.0
    for _ in range(trials):
        a = random_jet(group, dim, order, kind=kind, rng=rng)
        b = random_jet(group, dim, order, kind=kind, rng=rng)
        c = random_jet(group, dim, order, kind=kind, rng=rng)
        assoc = max(assoc, _gap(mul(order, mul(order, a, b), c), mul(order, a, mul(order, b, c))))
        unit = max(unit, _gap(mul(order, a, e), a), _gap(mul(order, e, a), a))
        ai = inv(order, a)
        inverse = max(inverse, _gap(mul(order, a, ai), e), _gap(mul(order, ai, a), e))
    return assoc, unit, inverse


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)

    print(f"{'group':>6} {'layout':>8} {'order':>5} {'assoc':>10} {'unit':>10} {'inverse':>10}")
    for group, dim in (("SO", 3), ("SL", 2), ("GL", 3)):
        for order in (1, 2, 3, 4):
            a, u, i = _law_residuals(
                group, dim, order, "tangent", tn_multiply, tn_inverse, args.trials, rng
            )
            print(f"{group:>6} {'tangent':>8} {order:5d} {a:10.2e} {u:10.2e} {i:10.2e}")
        for order in (1, 2, 3):
            a, u, i = _law_residuals(
                group, dim, order, "iterated",
                iterated_multiply, iterated_inverse, args.trials, rng,
            )
            print(f"{group:>6} {'iterated':>8} {order:5d} {a:10.2e} {u:10.2e} {i:10.2e}")


if __name__ == "__main__":
    main()
