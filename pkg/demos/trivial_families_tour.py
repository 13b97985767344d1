"""Tour of the trivial Cameron-Liebler families in PG(3,2).

Builds each trivial kind, decides CL membership from the incidence row
space, and checks the spread-intersection property against the standard
field-reduction spread.
"""

from clgeom import clcore as cc
from clgeom.geometry import field_reduction_spread, geometry

geom = geometry("PG", 3, 2)
print(f"{geom}: {geom.num_points} points, {geom.subspace_count(1)} lines")

spread = field_reduction_spread(3, 1, 2)
print(f"standard line spread: {len(spread)} pairwise disjoint lines\n")

kinds = [("empty", {}),
         ("point_pencil", {}),
         ("hyperplane_class", {}),
         ("pencil_plus_hyperplane", {"point": (1, 0, 0, 0)})]

for kind, kw in kinds:
    fam = cc.construct_trivial(geom, 1, kind, **kw)
    rep = cc.is_cl(fam)
    meets = cc.check_spread(fam, spread)
    print(f"{kind:24s} size={fam.size:2d}  x={fam.x}  "
          f"is_cl={rep.is_cl}  meets every spread element x times: {meets}")
    comp = cc.complement(fam)
    print(f"{'  complement':24s} size={comp.size:2d}  x={comp.x}  "
          f"is_cl={cc.is_cl(comp).is_cl}")

print("\nA random 7-line family is almost never CL:")
fam = cc.KFamily(geom, 1, {0, 3, 8, 13, 21, 27, 34})
print(f"random size-7 family: x={fam.x}, is_cl={cc.is_cl(fam).is_cl}")
