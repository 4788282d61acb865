"""Perturbed subspaces: the classical vector stays bad, the refined one tracks.

The exact-capture basis of demo 01 is perturbed by complex Gaussian noise of
standard deviation 1e-4 and re-orthonormalized, making the deviation eps of
the target eigenvector from the subspace O(1e-4).  Across seeds the selected
eigenvalue approximation and the refined vector error scale with eps, while
the classical vector keeps an O(1) error no matter how small eps gets: the
two near-kernel directions of the projected problem stay entangled.
"""

import nepritz as nr

result = nr.run_example2(sigma=1e-4, seeds=tuple(range(20)))

print(f"{'seed':>4} {'eps':>10} {'|mu|':>10} {'sin(classical)':>15} "
      f"{'sin(refined)':>13} {'ratio r^/r~':>12}")
for rec in result["records"]:
    ratio = rec["sigma_hat_1"] / rec["rho_ritz"]
    print(f"{rec['seed']:>4} {rec['epsilon']:>10.2e} "
          f"{abs(complex(*rec['mu'])):>10.2e} {rec['sin_ritz']:>15.2e} "
          f"{rec['sin_refined']:>13.2e} {ratio:>12.2e}")

med = result["medians"]
print(f"\nmedians over {result['n_seeds']} seeds:")
print(f"  deviation eps:             {med['epsilon']:.2e}")
print(f"  selected |mu|:             {med['abs_mu']:.2e}   (tracks eps)")
print(f"  sin angle, classical:      {med['sin_ritz']:.2e}   (stuck at O(1))")
print(f"  sin angle, refined:        {med['sin_refined']:.2e}   (tracks eps)")
print(f"  residual ratio:            {med['residual_ratio']:.2e}   (tracks eps)")

print("\nsame run at sigma = 1e-6 shows the identical split, two decades lower:")
smaller = nr.run_example2(sigma=1e-6, seeds=tuple(range(8)))
m2 = smaller["medians"]
print(f"  sin classical {m2['sin_ritz']:.2e}   sin refined {m2['sin_refined']:.2e}")
