"""Walk through the classification of a few equilibria.

For each pair of planar Hessian eigenvalues we print the region of the
(beta1, beta2) plane, the periods at which small closed orbits may be born,
and the bifurcation number attached to each of those periods.  A nonzero
number guarantees that a family of closed orbits starts there.

Run with ``python demos/classify_equilibria.py``.
"""

from coriolis_orbits import SpectralData, emanation_report
from coriolis_orbits.spectrum import morse_ST_planar

CASES = [
    ("potential minimum", 1.0, 1.0, None),
    ("saddle", -1.0, 2.0, None),
    ("shallow maximum", -0.5, -0.5, None),
    ("deep maximum, with a vertical direction", -4.0, -4.0, 9.0),
]


def describe(label, b1, b2, b3):
    rep = emanation_report(SpectralData(b1, b2, b3))
    print(f"\n{label}: beta = ({b1}, {b2}" + (f", {b3})" if b3 else ")"))
    print(f"  region {rep.region.value}, flags {list(rep.flags) or 'none'}")
    if not rep.gammas:
        print("  no period carries a nonzero bifurcation number")
    for T, g in rep.gammas:
        print(f"  period {T:.9f}: gamma = {g:+d}")


def morse_staircase(b1, b2):
    # the Morse index of S_T only changes at the characteristic periods
    print(f"\nMorse index of S_T for beta = ({b1}, {b2}) as T grows:")
    for T in (0.5, 2.0, 3.0, 10.0, 16.0, 40.0):
        print(f"  T = {T:5.1f}: {morse_ST_planar(b1, b2, T)}")


if __name__ == "__main__":
    for case in CASES:
        describe(*case)
    morse_staircase(1.0, 1.0)
