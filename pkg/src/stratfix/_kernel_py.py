"""Pure-Python kernel: the hot loops behind function enumeration and the
stratified fixed point on finite tables.

Mirrors stratfix._kernel (the compiled twin) exactly; all relation and
index tables arrive as flat bytes.  Index 255 marks an undefined
restriction, so carriers are capped well below that.
"""

from stratfix.errors import (
    InnerNotConverged,
    PreconditionViolated,
    SupremumUndefined,
)

BACKEND = "pure"

UNDEFINED = 255


def check_monotone(table, dom_n, cod_n, kappa, dom_sq, cod_sq):
    """True iff the graph preserves every stratum preorder."""
    for al in range(kappa):
        dbase = al * dom_n * dom_n
        cbase = al * cod_n * cod_n
        for x in range(dom_n):
            row = dbase + x * dom_n
            vx = table[x]
            for y in range(dom_n):
                if dom_sq[row + y] and not cod_sq[cbase + table[y] + vx * cod_n]:
                    return False
    return True


def enum_monotone(dom_n, cod_n, kappa, dom_sq, cod_sq):
    """All graphs dom -> cod preserving every stratum preorder.

    Backtracking over domain positions in index order; emitted tables are
    bytes of length ``dom_n`` in lexicographic order.
    """
    # earlier positions related to d, per direction, flattened as
    # (stratum, position) pairs
    fwd = [[] for _ in range(dom_n)]
    bwd = [[] for _ in range(dom_n)]
    for al in range(kappa):
        base = al * dom_n * dom_n
        for d in range(dom_n):
            for e in range(d):
                if dom_sq[base + d * dom_n + e]:
                    fwd[d].append((al, e))
                if dom_sq[base + e * dom_n + d]:
                    bwd[d].append((al, e))

    assign = bytearray(dom_n)
    out = []
    d = 0
    assign[0] = 0
    pending = [0] * dom_n  # next value to try at each depth
    while d >= 0:
        v = pending[d]
        if v >= cod_n:
            d -= 1
            continue
        pending[d] = v + 1
        ok = True
        for al, e in fwd[d]:
            cbase = al * cod_n * cod_n
            if not cod_sq[cbase + v * cod_n + assign[e]]:
                ok = False
                break
        if ok:
            for al, e in bwd[d]:
                cbase = al * cod_n * cod_n
                if not cod_sq[cbase + assign[e] * cod_n + v]:
                    ok = False
                    break
        if not ok:
            continue
        assign[d] = v
        if d == dom_n - 1:
            out.append(bytes(assign))
        else:
            d += 1
            pending[d] = 0
    return out


def dagger_table(fgraph, n, n_param, kappa, sq, join_idx, restrict_idx, bottom):
    """Stratified least fixed point of a table function, per parameter.

    ``fgraph`` is the graph of f : L x P -> L flattened row-major over
    (element, parameter); the result holds one L-index per parameter.
    Runs the two-level construction: per stratum, iterate from the join of
    the earlier stages until the chain repeats up to stratum equivalence,
    then take the restriction of the plateau point.
    """
    out = bytearray(n_param)
    budget = n + 2
    for p in range(n_param):
        x = bottom
        for al in range(kappa):
            sbase = al * n * n
            fx = fgraph[x * n_param + p]
            if not sq[sbase + x * n + fx]:
                raise PreconditionViolated(
                    f"start {x} not below its image {fx} at stratum {al}"
                )
            c = x
            steps = 0
            while True:
                cn = fgraph[c * n_param + p]
                if sq[sbase + c * n + cn] and sq[sbase + cn * n + c]:
                    break
                c = cn
                steps += 1
                if steps > budget:
                    raise InnerNotConverged(
                        f"chain exceeded {budget} steps at stratum {al}"
                    )
            z = restrict_idx[al * n + c]
            if z == UNDEFINED:
                raise SupremumUndefined(
                    f"restriction of {c} undefined at stratum {al}"
                )
            x = join_idx[x * n + z]
        out[p] = x
    return bytes(out)
