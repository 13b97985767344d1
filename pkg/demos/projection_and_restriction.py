"""Projection and restriction keep families Cameron-Liebler.

Projects a plane pencil of PG(5,2) through a point onto PG(4,2), then
restricts a line pencil of PG(4,2) to a solid and checks that the
restriction forces the pencil structure globally.
"""

from clgeom import clcore as cc
from clgeom.geometry import geometry, make_subspace, point_in_subspace

g5 = geometry("PG", 5, 2)
pen = cc.construct_trivial(g5, 2, "point_pencil", point=1)
print(f"plane pencil in {g5}: size={pen.size}, x={pen.x}")

pi = make_subspace([g5.points[0]], g5.field)
img = cc.project(pen, pi)
print(f"projected through a second point: {img.geom}, k={img.k}, "
      f"size={img.size}, x={img.x}, is_cl={cc.is_cl(img).is_cl}\n")

g4 = geometry("PG", 4, 2)
pencil = cc.construct_trivial(g4, 1, "point_pencil")
anchor = g4.points[0]
solid = next(s for s in g4.subspaces(3)
             if point_in_subspace(g4.field, anchor, s))
R = cc.restrict(pencil, solid)
print(f"line pencil of {g4} restricted to a solid: {R.geom}, "
      f"size={R.size}, x={R.x}, is_cl={cc.is_cl(R).is_cl}")
print("a pencil restriction propagates back to the full pencil:",
      cc.check_pencil_propagation(pencil, solid))

tau = cc.find_skew_space(pencil)
print(f"a plane containing no pencil line: {tau.mat if tau else None}")
