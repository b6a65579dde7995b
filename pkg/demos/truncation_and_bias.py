"""How the ECF amplitude cutoff affects the regularization.

Cutting the classical field at gamma_c loses a fraction E of the filter's
mass and ripples the realised filter. The ripple could in principle create
fake negativity; the bound below shows it stays orders of magnitude under a
typical statistical error.
"""

from regp.ecf import truncation_error, truncation_error_asymptote
from regp.syserr import bound_sweep


def main(w=1.3):
    print("w*gamma_c   E            1/(pi w gamma_c)")
    for x in (10, 15, 30, 100, 300, 1000):
        print(f"{x:>9g}   {truncation_error(x):.4e}   {truncation_error_asymptote(x):.4e}")

    print(f"\nfake-negativity bound, w = {w}, b_c = 2w")
    print("w*gamma_c   bound      transform minimum   at |gamma|")
    for rep in bound_sweep(w, [25, 50, 100, 200]):
        print(f"{rep.w * rep.gamma_c:>9g}   {rep.bound:.2e}   {rep.min_value:>12.2e}        {rep.minimizer_gamma_abs:.3f}")


if __name__ == "__main__":
    main()
