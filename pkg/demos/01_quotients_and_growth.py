"""Groups, congruence quotients, and growth.

Builds the three group families, reduces them modulo m, and measures how
fast balls grow in the infinite group, including the gap between the
growth degree and the Hirsch length for the unitriangular group.
"""
from boxdim import (
    CongruenceQuotient,
    build_quotient_cayley,
    fit_growth,
    free_abelian,
    growth_profile,
    hirsch_length,
    unitriangular,
)

# Three groups: the line, the plane, and 3x3 upper unitriangular matrices.
for spec in (free_abelian(1), free_abelian(2), unitriangular(3)):
    print(f"== {spec.describe()} (Hirsch length {hirsch_length(spec)})")

    # Congruence quotient: reduce every coordinate mod 4.
    q = CongruenceQuotient(spec, 4)
    g = build_quotient_cayley(q)
    print(f"   mod 4: {g.n_vertices} vertices, degree {g.degree}, "
          f"diameter {g.diameter}")

    # Word-metric balls of the infinite group, by exact enumeration.
    profile = growth_profile(spec, 8)
    print(f"   |B(e, r)| for r = 0..8: {list(profile.sizes)}")

    # A certified polynomial bound |B(e, r)| <= C r^d.  The constant is an
    # exact rational, so the inequality is checked without rounding.
    bound = fit_growth(profile)
    print(f"   fitted bound: C = {bound.C}, d = {bound.d} "
          f"(log-log slope {bound.slope:.3f})")
    print()

# For unitriangular(3) the fitted degree is 4 while the Hirsch length is 3:
# the center grows quadratically in the word length, so the homogeneous
# growth degree exceeds the subnormal-series rank.  Both numbers are
# correct; they measure different things.
ut = unitriangular(3)
print(f"unitriangular(3): growth degree {fit_growth(growth_profile(ut, 10)).d}"
      f" vs Hirsch length {hirsch_length(ut)}")
