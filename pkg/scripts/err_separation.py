#!/usr/bin/env python3
"""Show how the error value makes reading order observable.

The two and-schedules compute the same function on ordinary inputs, but
feeding (err, bottom) tells them apart: the one that reads b first gets
stuck waiting, the one that reads a first swallows the error and aborts.
"""

from cdslab import StaticState, apply, check_state, fixtures, fun_of, lift_err


def main():
    fx = fixtures()
    lifted = lift_err(fx.B2)
    probe = StaticState(check_state(lifted, [("a", "err")]))
    for alg in (fx.A, fx.A_prime):
        outcome, trace = apply(alg, probe, "out")
        print(f"{alg.name} on (err, bottom):")
        print("  " + "\n  ".join(trace.lines()))
    same = fun_of(fx.A) == fun_of(fx.A_prime)
    print(f"\nerr-free function parts equal: {same}")
    print(f"event sets equal: {fx.A.state.events == fx.A_prime.state.events}")


if __name__ == "__main__":
    main()
