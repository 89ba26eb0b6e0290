"""Disjoint indicator blocks from doubling-failure witnesses.

Each witness t_n spawns a block X_n = t_n * 1_{A_n} with
P(A_n) = 1/(2^n phi(t_n)) and a dual block Y_n with E[X_n Y_n] = 1
exactly.  The witness inequality pins the norms into fixed windows and
makes the series modular telescope to a geometric sum -- the raw
material for the counterexample's operator T.
"""

from orlicz_lab import (
    CATALOG,
    block_luxemburg_norm,
    build_disjoint_sequence,
    discretize,
    dual_block_orlicz_norm,
    pairing,
    series_modular,
)


def main():
    phi = CATALOG["exp"]
    xs, ys = build_disjoint_sequence(phi, 10)

    print("=== Block sequence from exp(t)-1 witnesses ===\n")
    print(f"{'n':>3} {'t_n':>12} {'p_n':>12} {'||X_n||_phi':>12} "
          f"{'||Y_n||*':>10}")
    for bx, by in zip(xs.blocks, ys.blocks):
        print(f"{bx.index:>3} {bx.height:>12.4f} {bx.probability:>12.3e} "
              f"{block_luxemburg_norm(bx, phi):>12.6f} "
              f"{dual_block_orlicz_norm(by, phi):>10.6f}")
    print("\nEvery ||X_n||_phi lies in (1/2, 1] and every dual Orlicz norm")
    print("is below 2 -- forced by the witness inequality, not tuned.")

    value, tail = series_modular(xs, phi, 1.0)
    print(f"\nSeries modular of the pointwise sum at lam = 1: {value:.10f}")
    print(f"Certified tail bound beyond the truncation:      {tail:.3e}")
    print(f"Total stays below 1:                             "
          f"{value + tail:.10f}")

    print("\nDiscretized cross-check (one atom per block):")
    space, (x_rvs, y_rvs) = discretize(xs, ys)
    for k in range(3):
        print(f"  E[X_{k + 1} Y_{k + 1}] = {pairing(x_rvs[k], y_rvs[k])!r}")
    print(f"  E[X_1 Y_2] = {pairing(x_rvs[0], y_rvs[1])!r}  "
          "(disjoint supports)")


if __name__ == "__main__":
    main()
