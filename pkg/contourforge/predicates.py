"""
Orientation and in-circle predicates.

A floating point evaluation is trusted when it clears the static error
bound of Shewchuk's stage A filter; otherwise the determinant is evaluated
exactly. Floats are dyadic rationals, so scaling every coordinate by the
largest denominator turns the exact evaluation into integer arithmetic.
"""

EPSILON = 2.0 ** -53
CCW_ERRBOUND = (3.0 + 16.0 * EPSILON) * EPSILON
ICC_ERRBOUND = (10.0 + 96.0 * EPSILON) * EPSILON


def _sign(value):
    if value > 0:
        return 1
    if value < 0:
        return -1
    return 0


def _as_integers(*coords):
    ratios = [float(c).as_integer_ratio() for c in coords]
    den = max(d for _, d in ratios)
    return [n * (den // d) for n, d in ratios]


def _orient2d_exact(pa, pb, pc):
    ax, ay, bx, by, cx, cy = _as_integers(pa[0], pa[1], pb[0], pb[1],
                                          pc[0], pc[1])
    return _sign((ax - cx) * (by - cy) - (ay - cy) * (bx - cx))


def orient2d(pa, pb, pc):
    """
    Sign of the turn pa -> pb -> pc
    :return: 1 for a left turn (counterclockwise), -1 for a right turn,
    0 for collinear points
    """
    detleft = (pa[0] - pc[0]) * (pb[1] - pc[1])
    detright = (pa[1] - pc[1]) * (pb[0] - pc[0])
    det = detleft - detright
    errbound = CCW_ERRBOUND * (abs(detleft) + abs(detright))
    if det > errbound or -det > errbound:
        return _sign(det)
    return _orient2d_exact(pa, pb, pc)


def _incircle_exact(pa, pb, pc, pd):
    ax, ay, bx, by, cx, cy, dx, dy = _as_integers(
        pa[0], pa[1], pb[0], pb[1], pc[0], pc[1], pd[0], pd[1])
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdx * cdy - cdx * bdy) +
           blift * (cdx * ady - adx * cdy) +
           clift * (adx * bdy - bdx * ady))
    return _sign(det)


def incircle(pa, pb, pc, pd):
    """
    Position of pd relative to the circle through pa, pb, pc, which must be
    in counterclockwise order
    :return: 1 inside, -1 outside, 0 on the circle
    """
    adx = pa[0] - pd[0]
    bdx = pb[0] - pd[0]
    cdx = pc[0] - pd[0]
    ady = pa[1] - pd[1]
    bdy = pb[1] - pd[1]
    cdy = pc[1] - pd[1]

    bdxcdy = bdx * cdy
    cdxbdy = cdx * bdy
    alift = adx * adx + ady * ady
    cdxady = cdx * ady
    adxcdy = adx * cdy
    blift = bdx * bdx + bdy * bdy
    adxbdy = adx * bdy
    bdxady = bdx * ady
    clift = cdx * cdx + cdy * cdy

    det = (alift * (bdxcdy - cdxbdy) +
           blift * (cdxady - adxcdy) +
           clift * (adxbdy - bdxady))
    permanent = ((abs(bdxcdy) + abs(cdxbdy)) * alift +
                 (abs(cdxady) + abs(adxcdy)) * blift +
                 (abs(adxbdy) + abs(bdxady)) * clift)
    errbound = ICC_ERRBOUND * permanent
    if det > errbound or -det > errbound:
        return _sign(det)
    return _incircle_exact(pa, pb, pc, pd)


def segments_cross(a, b, c, d):
    """True if the open segments ab and cd cross in a single interior point"""
    o1 = orient2d(a, b, c)
    o2 = orient2d(a, b, d)
    if o1 == 0 or o2 == 0 or o1 == o2:
        return False
    o3 = orient2d(c, d, a)
    o4 = orient2d(c, d, b)
    return o3 != 0 and o4 != 0 and o3 != o4


def _on_segment(a, b, p):
    return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and
            min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def segments_intersect(a, b, c, d):
    """True if the closed segments ab and cd share at least one point"""
    o1 = orient2d(a, b, c)
    o2 = orient2d(a, b, d)
    o3 = orient2d(c, d, a)
    o4 = orient2d(c, d, b)
    if o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4):
        return True
    if o1 == 0 and _on_segment(a, b, c):
        return True
    if o2 == 0 and _on_segment(a, b, d):
        return True
    if o3 == 0 and _on_segment(c, d, a):
        return True
    if o4 == 0 and _on_segment(c, d, b):
        return True
    return o1 != o2 and o3 != o4 and o1 * o2 < 0 and o3 * o4 < 0
