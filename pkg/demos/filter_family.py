"""Compare the nonclassicality filter family across q at unit width.

Prints the filter Omega(b), its Fourier transform and the fraction of the
transform's mass within radius 1. Larger q pushes the filter toward the
compact q = INF shape and makes the transform's tails heavier.
"""

import numpy as np

from regp.filters import INF, FilterSpec, filter_table, ft_filter, ft_mass

QS = (2.0, 3.0, 4.0, 20.0, INF)


def main():
    b = np.array([0.0, 0.5, 1.0, 1.5, 2.0, 2.5])
    print("Omega(b), w = 1")
    print("q      " + "".join(f"{x:>10.2f}" for x in b))
    for q in QS:
        vals = filter_table(b, FilterSpec(q, 1.0))
        print(f"{q:<7g}" + "".join(f"{v:>10.4f}" for v in vals))

    g = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
    print("\nFourier transform, w = 1")
    print("q      " + "".join(f"{x:>11.1f}" for x in g))
    for q in QS:
        vals = ft_filter(g, FilterSpec(q, 1.0))
        print(f"{q:<7g}" + "".join(f"{v:>11.3e}" for v in vals))

    print("\nmass of the transform inside |gamma| <= 1")
    for q in QS:
        print(f"q = {q:<5g} {ft_mass(FilterSpec(q, 1.0), 1.0):.4f}")


if __name__ == "__main__":
    main()
