"""Pure-numpy kernels; fallback when the compiled extension is absent.

Both backends must produce bit-identical results: accumulations run in
the same edge order (np.bincount adds sequentially, like the C loop) and
the cautious-round counts are integers, so no float-ordering slack exists.
"""

import numpy as np


def goodness_sums(src, dst, weight, fairness, n):
    """Per-target sums of fairness[src] * weight."""
    return np.bincount(dst, weights=fairness[src] * weight, minlength=n)


def fairness_sums(src, dst, weight, goodness, n):
    """Per-source sums of |weight * goodness[dst]|."""
    return np.bincount(src, weights=np.abs(weight * goodness[dst]), minlength=n)


def cautious_round(indptr, indices, pivot, delta, n):
    """One pivot round of the cautious delta-clean procedure.

    Operates on a symmetric positive-sign CSR (self-loops present) over the
    still-unclustered nodes. Grows the candidate set from the pivot's
    positive neighborhood, repeatedly evicts the lowest-indexed member that
    is not 3delta-good, then batch-admits every outside node that is
    7delta-good against the settled set. Returns the member mask (possibly
    empty if the removal cascade consumed the set).
    """
    member = np.zeros(n, dtype=bool)
    member[indices[indptr[pivot]:indptr[pivot + 1]]] = True
    posdeg = np.diff(indptr)
    inside = np.zeros(n, dtype=np.int64)
    for x in np.flatnonzero(member):
        inside[indices[indptr[x]:indptr[x + 1]]] += 1
    csize = int(member.sum())

    while csize > 0:
        lo = (1.0 - 3.0 * delta) * csize
        hi = 3.0 * delta * csize
        bad = member & ((inside < lo) | (posdeg - inside > hi))
        hits = np.flatnonzero(bad)
        if hits.size == 0:
            break
        x = int(hits[0])
        member[x] = False
        csize -= 1
        inside[indices[indptr[x]:indptr[x + 1]]] -= 1

    if csize > 0:
        lo = (1.0 - 7.0 * delta) * csize
        hi = 7.0 * delta * csize
        grown = (~member) & (inside >= lo) & (posdeg - inside <= hi)
        member |= grown
    return member
