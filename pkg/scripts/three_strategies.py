#!/usr/bin/env python3
"""Enumerate the strategies of the one-question game and match them to B.

With one cell and no values on each side, a strategy can only stay
silent or ask one of the two coordinates, so the function space
o*o -> o has exactly three inhabitants: the boolean type rebuilt from
pure control flow.
"""

from cdslab import boolean_iso, enumerate_algorithms, fixtures


def main():
    fx = fixtures()
    algs = enumerate_algorithms(fx.oo, fx.o)
    print(f"{len(algs)} strategies for {fx.oo.name} -> {fx.o.name}:")
    for alg in algs:
        print("  " + (alg.text() or "(silent)"))
    print("\nmatched with the three boolean states:")
    for state, alg in boolean_iso().items():
        label = str(state) if state.events else "bottom"
        print(f"  {label:12} ~ {alg.text() or '(silent)'}")


if __name__ == "__main__":
    main()
