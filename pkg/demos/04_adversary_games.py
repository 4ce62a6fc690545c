#!/usr/bin/env python3
"""Adaptive-priority games that build hard instances on the fly.

Plays the budgetless adversary against the minimum-degree encoding for
degree bounds 3..8 (the tight ratio ladder), shows a game transcript,
then lets the node-count-announcing adversary drive the ratio towards
2/3 from above.
"""

from fractions import Fraction

from matchforge import (
    AdversaryB,
    AdversaryBPrime,
    maximum_matching,
    play_game,
)


def main():
    print("tight ladder (budgetless adversary vs minimum-degree encoding):")
    for delta in range(3, 9):
        result = play_game("mingreedy", AdversaryB(delta))
        opt = len(maximum_matching(result.graph))
        ratio = Fraction(len(result.matching), opt)
        print(f"  delta {delta}: |M| = {len(result.matching)}, |M*| = {opt}, "
              f"ratio {ratio}  (graph: {result.graph.n} nodes)")

    print("\ntranscript of the delta = 4 game:")
    result = play_game("mingreedy", AdversaryB(4))
    for line in result.transcript:
        if not line.startswith("q "):
            print("  " + line)

    print("\nannounced-budget adversary at delta = 3:")
    for t in (20, 50, 100, 200):
        result = play_game("mingreedy", AdversaryBPrime(3, t))
        opt = len(maximum_matching(result.graph))
        ratio = Fraction(len(result.matching), opt)
        print(f"  t = {t:3d}: {result.graph.n:3d} nodes, ratio {str(ratio):>8s}"
              f" = {float(ratio):.5f}  (excess {float(ratio - Fraction(2, 3)):.5f})")


if __name__ == "__main__":
    main()
