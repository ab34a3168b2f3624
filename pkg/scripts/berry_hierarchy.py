#!/usr/bin/env python3
"""Classify the desk tables and print the monotone/stable/sequential ladder.

The three verdicts separate strictly: parallel-or is monotone but not
stable, Gustave's function is stable but admits no schedule, and the
strict conjunction is realized by two distinct schedules.
"""

from cdslab import fixtures, is_monotone, is_stable, sequential_realizers


def classify(t):
    mono = is_monotone(t)
    row = {"table": t.name, "monotone": mono.ok, "stable": None, "realizers": None}
    if mono.ok:
        st = is_stable(t)
        row["stable"] = st.ok
        if not st.ok:
            x, y = st.witness
            row["witness"] = f"x={x} y={y}"
    else:
        x, y = mono.witness
        row["witness"] = f"x={x} y={y}"
    row["realizers"] = len(sequential_realizers(t))
    return row


def main():
    fx = fixtures()
    for t in (fx.and_table, fx.por_table, fx.por_bottom_table, fx.bk_table):
        row = classify(t)
        print(f"table {row['table']}:")
        print(f"  monotone   {row['monotone']}")
        print(f"  stable     {row['stable']}")
        print(f"  realizers  {row['realizers']}")
        if "witness" in row:
            print(f"  witness    {row['witness']}")
    realizers = sequential_realizers(fx.and_table)
    print("\nschedules realizing the strict conjunction:")
    for i, alg in enumerate(realizers):
        print(f"-- {i}")
        print(alg.text() or "(empty)")


if __name__ == "__main__":
    main()
