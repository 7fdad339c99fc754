# cython: language_level=3
"""Compiled kernel: hot loops behind function enumeration and the
stratified fixed point on finite tables.

Semantics mirror stratfix._kernel_py exactly; keep both in sync.
"""

from libc.stdlib cimport free, malloc
from libc.string cimport memset

from stratfix.errors import (
    InnerNotConverged,
    PreconditionViolated,
    SupremumUndefined,
)

BACKEND = "compiled"

DEF UNDEF = 255


def check_monotone(const unsigned char[::1] table, int dom_n, int cod_n,
                   int kappa, const unsigned char[::1] dom_sq,
                   const unsigned char[::1] cod_sq):
    """True iff the graph preserves every stratum preorder."""
    cdef int al, x, y, dbase, cbase, row, vx
    for al in range(kappa):
        dbase = al * dom_n * dom_n
        cbase = al * cod_n * cod_n
        for x in range(dom_n):
            row = dbase + x * dom_n
            vx = table[x]
            for y in range(dom_n):
                if dom_sq[row + y] and not cod_sq[cbase + vx * cod_n + table[y]]:
                    return False
    return True


def enum_monotone(int dom_n, int cod_n, int kappa,
                  const unsigned char[::1] dom_sq,
                  const unsigned char[::1] cod_sq):
    """All graphs dom -> cod preserving every stratum preorder, as bytes,
    in lexicographic order."""
    cdef int al, d, e, v, k, cnt, ok
    cdef int total = dom_n * dom_n
    cdef int stride = kappa * dom_n
    # flattened (stratum, earlier-position) constraint lists per depth
    cdef int *fwd = <int *> malloc(dom_n * stride * 2 * sizeof(int))
    cdef int *bwd = <int *> malloc(dom_n * stride * 2 * sizeof(int))
    cdef int *fwd_len = <int *> malloc(dom_n * sizeof(int))
    cdef int *bwd_len = <int *> malloc(dom_n * sizeof(int))
    cdef unsigned char *assign = <unsigned char *> malloc(dom_n)
    cdef int *pending = <int *> malloc(dom_n * sizeof(int))
    if not (fwd and bwd and fwd_len and bwd_len and assign and pending):
        raise MemoryError()
    out = []
    try:
        memset(fwd_len, 0, dom_n * sizeof(int))
        memset(bwd_len, 0, dom_n * sizeof(int))
        for al in range(kappa):
            for d in range(dom_n):
                for e in range(d):
                    if dom_sq[al * total + d * dom_n + e]:
                        cnt = fwd_len[d]
                        fwd[(d * stride + cnt) * 2] = al
                        fwd[(d * stride + cnt) * 2 + 1] = e
                        fwd_len[d] = cnt + 1
                    if dom_sq[al * total + e * dom_n + d]:
                        cnt = bwd_len[d]
                        bwd[(d * stride + cnt) * 2] = al
                        bwd[(d * stride + cnt) * 2 + 1] = e
                        bwd_len[d] = cnt + 1

        d = 0
        pending[0] = 0
        while d >= 0:
            v = pending[d]
            if v >= cod_n:
                d -= 1
                continue
            pending[d] = v + 1
            ok = 1
            for k in range(fwd_len[d]):
                al = fwd[(d * stride + k) * 2]
                e = fwd[(d * stride + k) * 2 + 1]
                if not cod_sq[al * cod_n * cod_n + v * cod_n + assign[e]]:
                    ok = 0
                    break
            if ok:
                for k in range(bwd_len[d]):
                    al = bwd[(d * stride + k) * 2]
                    e = bwd[(d * stride + k) * 2 + 1]
                    if not cod_sq[al * cod_n * cod_n + assign[e] * cod_n + v]:
                        ok = 0
                        break
            if not ok:
                continue
            assign[d] = <unsigned char> v
            if d == dom_n - 1:
                out.append(bytes(assign[:dom_n]))
            else:
                d += 1
                pending[d] = 0
    finally:
        free(fwd)
        free(bwd)
        free(fwd_len)
        free(bwd_len)
        free(assign)
        free(pending)
    return out


def dagger_table(const unsigned char[::1] fgraph, int n, int n_param,
                 int kappa, const unsigned char[::1] sq,
                 const unsigned char[::1] join_idx,
                 const unsigned char[::1] restrict_idx, int bottom):
    """Stratified least fixed point of a table function, per parameter."""
    cdef int p, al, x, fx, c, cn, steps, z, sbase
    cdef int budget = n + 2
    out = bytearray(n_param)
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
            if z == UNDEF:
                raise SupremumUndefined(
                    f"restriction of {c} undefined at stratum {al}"
                )
            x = join_idx[x * n + z]
        out[p] = <unsigned char> x
    return bytes(out)
