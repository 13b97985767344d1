import json
import random
from fractions import Fraction

import pytest

from clgeom import clcore as cc
from clgeom.errors import (
    AnchorInvalid,
    DimensionTooLarge,
    DimensionTooSmall,
    FamilyFormatError,
    GuardViolated,
    MemberInsideHyperplane,
    NotASpread,
    NotContained,
    NotDisjoint,
    PointNotInSubspace,
    PreconditionNotMet,
)
from clgeom.geometry import (
    field_reduction_spread,
    gauss_binom,
    geometry,
    make_subspace,
    point_in_subspace,
)


def hyperplane_param(n, k, q):
    return Fraction(q ** (n - k) - 1, q ** (k + 1) - 1)


def trivial_families(geom, k):
    """All trivial kinds valid in the geometry, with their expected x."""
    out = [(cc.construct_trivial(geom, k, "empty"), Fraction(0)),
           (cc.construct_trivial(geom, k, "point_pencil"), Fraction(1))]
    if geom.kind == "PG":
        xh = hyperplane_param(geom.n, k, geom.q)
        out.append((cc.construct_trivial(geom, k, "hyperplane_class"), xh))
        out.append((cc.construct_trivial(geom, k, "pencil_plus_hyperplane",
                                         point=_off_hyperplane_point(geom)),
                    1 + xh))
    xmax = cc.x_max(geom, k)
    out += [(cc.complement(f), xmax - x) for f, x in list(out)]
    return out


def _off_hyperplane_point(geom):
    # first point with X0 != 0 (the default hyperplane is X0 = 0)
    return next(i for i, p in enumerate(geom.points) if p[0] != 0)


SMALL_GEOMS = [("PG", 3, 2, 1), ("PG", 3, 3, 1), ("PG", 4, 2, 1),
               ("AG", 3, 2, 1), ("AG", 3, 3, 1)]


@pytest.mark.parametrize("kind,n,q,k", SMALL_GEOMS)
def test_trivial_families_are_cl(kind, n, q, k):
    geom = geometry(kind, n, q)
    for fam, x in trivial_families(geom, k):
        assert fam.x == x
        rep = cc.is_cl(fam)
        assert rep.is_cl and rep.x == x
        assert cc.is_cl(fam, method="kernel").is_cl


def test_random_same_size_families_are_not_cl():
    geom = geometry("PG", 3, 2)
    pencils = [frozenset(cc.construct_trivial(geom, 1, "point_pencil",
                                              point=i).members)
               for i in range(len(geom.points))]
    rng = random.Random(424242)
    total = geom.subspace_count(1)
    checked = 0
    while checked < 30:
        members = frozenset(rng.sample(range(total), 7))
        if members in pencils:
            continue
        assert not cc.is_cl(cc.KFamily(geom, 1, members)).is_cl
        checked += 1


def test_parameter_and_size():
    geom = geometry("PG", 3, 2)
    pencil = cc.construct_trivial(geom, 1, "point_pencil")
    assert pencil.size == 7
    assert pencil.x == 1
    full = cc.complement(cc.KFamily(geom, 1, ()))
    assert full.x == Fraction(15, 3) == cc.x_max(geom, 1)


def test_set_algebra():
    geom = geometry("PG", 3, 2)
    pencil = cc.construct_trivial(geom, 1, "point_pencil")
    hp = cc.construct_trivial(geom, 1, "hyperplane_class")
    # default pencil anchor (0,0,0,1) lies in X0=0, so these share members
    with pytest.raises(NotDisjoint):
        cc.union_disjoint(pencil, hp)
    p_off = _off_hyperplane_point(geom)
    pencil2 = cc.construct_trivial(geom, 1, "point_pencil", point=p_off)
    u = cc.union_disjoint(pencil2, hp)
    assert u.x == pencil2.x + hp.x
    d = cc.difference(hp, u)
    assert d.members == pencil2.members
    with pytest.raises(NotContained):
        cc.difference(u, pencil2)
    with pytest.raises(GuardViolated):
        cc.union_disjoint(pencil, cc.KFamily(geometry("PG", 3, 3), 1, ()))


def test_construct_trivial_anchor_errors():
    geom = geometry("PG", 3, 2)
    with pytest.raises(AnchorInvalid):
        cc.construct_trivial(geom, 1, "point_pencil", point=(1, 1))
    with pytest.raises(AnchorInvalid):
        cc.construct_trivial(geom, 1, "nonsense")
    with pytest.raises(AnchorInvalid):
        # anchor point inside the anchor hyperplane
        cc.construct_trivial(geom, 1, "pencil_plus_hyperplane",
                             point=(0, 0, 0, 1))
    ag = geometry("AG", 3, 2)
    with pytest.raises(AnchorInvalid):
        cc.construct_trivial(ag, 1, "hyperplane_class")


# -- counting identity checkers ---------------------------------------------

def corrupted(fam):
    """Swap one member for the first non-member (breaks CL)."""
    total = fam.geom.subspace_count(fam.k)
    out_idx = next(i for i in range(total) if i not in fam.members)
    dropped = min(fam.members)
    return cc.KFamily(fam.geom, fam.k,
                      (fam.members - {dropped}) | {out_idx})


@pytest.mark.parametrize("kind,n,q,k", [("PG", 3, 2, 1), ("PG", 3, 3, 1),
                                        ("PG", 4, 2, 1)])
def test_disjoint_and_meet_profile(kind, n, q, k):
    geom = geometry(kind, n, q)
    for fam, _ in trivial_families(geom, k):
        assert cc.check_disjoint_count(fam).ok
        for i in range(1, k + 2):
            assert cc.check_meet_profile(fam, i).ok
    pencil = cc.construct_trivial(geom, k, "point_pencil")
    bad = corrupted(pencil)
    assert not cc.check_disjoint_count(bad).ok
    assert any(not cc.check_meet_profile(bad, i).ok for i in range(1, k + 2))


def test_meet_profile_example_value():
    # pencil of PG(3,2), i=1, member K: 6 members meet K in a point
    geom = geometry("PG", 3, 2)
    pencil = cc.construct_trivial(geom, 1, "point_pencil")
    assert cc.meet_profile_expected(pencil, 1, member=True) == 6
    assert cc.check_meet_profile(pencil, 1).ok


def test_meet_profile_guard():
    geom = geometry("PG", 3, 2)
    pencil = cc.construct_trivial(geom, 1, "point_pencil")
    with pytest.raises(GuardViolated):
        cc.check_meet_profile(pencil, 0)
    with pytest.raises(GuardViolated):
        cc.check_meet_profile(pencil, 3)


def test_spread_check():
    geom = geometry("PG", 3, 2)
    S = field_reduction_spread(3, 1, 2)
    for fam, x in trivial_families(geom, 1):
        assert cc.check_spread(fam, S)
    bad = corrupted(cc.construct_trivial(geom, 1, "point_pencil"))
    # a corrupted pencil misses some spread of PG(3,2) in != x elements;
    # this particular one changes the intersection with the standard spread
    results = [cc.check_spread(cc.construct_trivial(geom, 1, "point_pencil",
                                                    point=i), S)
               for i in range(15)]
    assert all(results)
    with pytest.raises(NotASpread):
        cc.check_spread(bad, S[:-1])
    with pytest.raises(NotASpread):
        cc.check_spread(bad, S + [S[0]])


def test_drudge_identity():
    geom = geometry("PG", 3, 2)
    fams = trivial_families(geom, 1)
    rng = random.Random(31337)
    planes = geom.subspaces(2)
    for fam, _ in fams:
        for _ in range(10):
            tau = planes[rng.randrange(len(planes))]
            pts = [i for i, p in enumerate(geom.points)
                   if point_in_subspace(geom.field, p, tau)]
            assert cc.check_drudge_identity(fam, rng.choice(pts), tau)
    pencil = fams[1][0]
    tau = planes[0]
    outside = next(i for i, p in enumerate(geom.points)
                   if not point_in_subspace(geom.field, p, tau))
    with pytest.raises(PointNotInSubspace):
        cc.check_drudge_identity(pencil, outside, tau)
    bad = corrupted(pencil)
    hits = 0
    for tau in planes:
        pts = [i for i, p in enumerate(geom.points)
               if point_in_subspace(geom.field, p, tau)]
        hits += sum(not cc.check_drudge_identity(bad, p, tau) for p in pts)
    assert hits > 0


def test_aid_identity():
    geom = geometry("PG", 4, 2)
    for fam, _ in trivial_families(geom, 1):
        for K in range(0, geom.subspace_count(1), 31):
            assert cc.check_aid_identity(fam, K, 3)
    pencil = cc.construct_trivial(geom, 1, "point_pencil")
    bad = corrupted(pencil)
    assert any(not cc.check_aid_identity(bad, K, 3)
               for K in range(geom.subspace_count(1)))
    with pytest.raises(GuardViolated):
        cc.check_aid_identity(pencil, 0, 4)  # t must be <= n-1
    with pytest.raises(GuardViolated):
        cc.check_aid_identity(cc.construct_trivial(geometry("PG", 3, 2), 1,
                                                   "point_pencil"), 0, 3)


def test_affine_line_identities():
    for q in (2, 3):
        ag = geometry("AG", 3, q)
        for fam, _ in trivial_families(ag, 1):
            assert cc.check_affine_line(fam).ok
        bad = corrupted(cc.construct_trivial(ag, 1, "point_pencil"))
        assert not cc.check_affine_line(bad).ok
    with pytest.raises(GuardViolated):
        cc.check_affine_line(cc.KFamily(geometry("PG", 3, 2), 1, ()))


# -- transforms -------------------------------------------------------------

def test_restrict_preserves_cl():
    geom = geometry("PG", 4, 2)
    solid = geom.subspaces(3)[0]
    for fam, _ in trivial_families(geom, 1):
        R = cc.restrict(fam, solid)
        assert cc.is_cl(R).is_cl
    pencil = cc.construct_trivial(geom, 1, "point_pencil")
    with pytest.raises(DimensionTooSmall):
        cc.restrict(pencil, geom.subspaces(1)[0])


def test_restriction_of_pencil_is_pencil_or_full_hyperplane_count():
    geom = geometry("PG", 4, 2)
    pencil = cc.construct_trivial(geom, 1, "point_pencil")
    anchor = geom.points[0]
    solid = next(s for s in geom.subspaces(3)
                 if point_in_subspace(geom.field, anchor, s))
    R = cc.restrict(pencil, solid)
    assert R.x == 1 and R.size == gauss_binom(3, 1, 2)


def test_project_pencil():
    geom = geometry("PG", 5, 2)
    pen = cc.construct_trivial(geom, 2, "point_pencil", point=1)
    pi = make_subspace([geom.points[0]], geom.field)
    img = cc.project(pen, pi)
    assert img.geom.n == 4 and img.k == 1
    assert img.x == 1
    assert cc.is_cl(img).is_cl
    with pytest.raises(DimensionTooLarge):
        cc.project(pen, geom.subspaces(2)[0])


def test_pencil_propagation():
    geom = geometry("PG", 4, 2)
    pencil = cc.construct_trivial(geom, 1, "point_pencil")
    anchor = geom.points[0]
    solid = next(s for s in geom.subspaces(3)
                 if point_in_subspace(geom.field, anchor, s))
    assert cc.check_pencil_propagation(pencil, solid)
    hp = cc.construct_trivial(geom, 1, "hyperplane_class")
    with pytest.raises(PreconditionNotMet):
        cc.check_pencil_propagation(hp, solid)


def test_find_skew_space():
    geom = geometry("PG", 4, 2)
    pencil = cc.construct_trivial(geom, 1, "point_pencil")
    tau = cc.find_skew_space(pencil)
    assert tau is not None and tau.k == 2
    # tau really contains no member
    taumask = geom.point_mask_of(tau)
    masks = geom.point_masks(1)
    assert all(masks[m] & taumask != masks[m] for m in pencil.members)
    full = cc.complement(cc.KFamily(geom, 1, ()))
    assert cc.find_skew_space(full) is None


def test_pg_ag_roundtrip_default_hyperplane():
    geom = geometry("PG", 3, 2)
    hp = cc.construct_trivial(geom, 1, "hyperplane_class")
    fam = cc.complement(hp)  # lines not inside X0=0
    aff = cc.pg_to_ag(fam)
    assert aff.geom.kind == "AG" and aff.size == fam.size
    back = cc.ag_to_pg(aff)
    assert back.members == fam.members
    with pytest.raises(MemberInsideHyperplane):
        cc.pg_to_ag(hp)


def test_pg_ag_nondefault_hyperplane():
    geom = geometry("PG", 3, 2)
    # hyperplane X3 = 0
    H = make_subspace([(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)], geom.field)
    cls = cc._indices_inside(geom, 1, H)
    fam = cc.KFamily(geom, 1, set(range(geom.subspace_count(1))) - cls)
    aff = cc.pg_to_ag(fam, H=H)
    assert aff.size == fam.size
    assert cc.is_cl(aff).is_cl == cc.is_cl(fam).is_cl
    with pytest.raises(MemberInsideHyperplane):
        cc.pg_to_ag(cc.KFamily(geom, 1, set(cls)), H=H)


def test_ag_pencil_roundtrip():
    ag = geometry("AG", 3, 3)
    pen = cc.construct_trivial(ag, 1, "point_pencil")
    proj = cc.ag_to_pg(pen)
    assert proj.geom.kind == "PG" and proj.size == pen.size
    # not CL in the projective sense (misses the lines at infinity through p)
    assert cc.pg_to_ag(proj) == pen


# -- serialization ----------------------------------------------------------

def test_family_json_roundtrip(tmp_path):
    geom = geometry("PG", 3, 2)
    fam = cc.construct_trivial(geom, 1, "pencil_plus_hyperplane",
                               point=_off_hyperplane_point(geom))
    path = tmp_path / "fam.json"
    cc.save_family(fam, str(path))
    again = cc.load_family(str(path))
    assert again == fam
    # byte-identical re-serialization
    cc.save_family(again, str(tmp_path / "fam2.json"))
    assert path.read_bytes() == (tmp_path / "fam2.json").read_bytes()


def test_family_json_validates_schema(tmp_path):
    import jsonschema
    from importlib import resources
    schema = json.loads(resources.files("clgeom")
                        .joinpath("schemas/family.schema.json").read_text())
    fam = cc.construct_trivial(geometry("AG", 3, 2), 1, "point_pencil")
    jsonschema.validate(cc.family_to_dict(fam), schema)


def test_family_json_rejects_noncanonical():
    fam = cc.construct_trivial(geometry("PG", 3, 2), 1, "point_pencil")
    d = cc.family_to_dict(fam)
    ok = cc.family_from_dict(d)
    assert ok == fam
    import copy
    bad = copy.deepcopy(d)
    # scale a row: same subspace, different matrix, must be rejected
    bad["members"][0][1] = bad["members"][0][0]
    with pytest.raises(FamilyFormatError):
        cc.family_from_dict(bad)
    bad = copy.deepcopy(d)
    bad["members"][0][0][0] = 9
    with pytest.raises(FamilyFormatError):
        cc.family_from_dict(bad)
    bad = copy.deepcopy(d)
    bad["space"] = "XX"
    with pytest.raises(FamilyFormatError):
        cc.family_from_dict(bad)
    bad = copy.deepcopy(d)
    del bad["k"]
    with pytest.raises(FamilyFormatError):
        cc.family_from_dict(bad)
