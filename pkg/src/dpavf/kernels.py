"""Compiled in-place point-update sweeps (numba, nogil).

The per-point algebra is the closed-form solve of the pointwise implicit
system: a complex 2x2 (handled as real arithmetic on P, Q) for the
Schrodinger pair, and a precomputed 2x2 inverse for the U-V pair.
Neighbor values are read in place, so a neighbor already visited in the
sweep contributes its new value and an unvisited one its old value.

``nogil=True`` lets thread-pool lanes run these sweeps concurrently; the
schedule's phase-safety rule guarantees the result is independent of the
interleaving, bit for bit.

Arithmetic order here is normative: the pure-Python oracle sweeps mirror
it expression by expression so that results match bitwise.
"""
from __future__ import annotations

from numba import njit

_SIG_CACHE = dict(cache=True, nogil=True)


@njit(**_SIG_CACHE)
def sweep_base(P, Q, U, V, nbrs, order,
               alpha, beta, gcoef, c_uv, uv_nbr, gU, half_tau,
               i00, i01, i10, i11):
    """Base sweep: Psi solve first (old U), then U-V solve (new Psi)."""
    nn = nbrs.shape[1]
    for t in range(order.shape[0]):
        i = order[t]
        Pi = P[i]
        Qi = Q[i]
        Ui = U[i]
        Vi = V[i]
        SP = 0.0
        SQ = 0.0
        SU = 0.0
        for k in range(nn):
            j = nbrs[i, k]
            SP += P[j]
            SQ += Q[j]
            SU += U[j]
        cr = gcoef * Ui - alpha
        rr = -cr * Pi - Qi - beta * SP
        ri = Pi - cr * Qi - beta * SQ
        den = cr * cr + 1.0
        Pn = (rr * cr + ri) / den
        Qn = (ri * cr - rr) / den
        P[i] = Pn
        Q[i] = Qn
        r1 = Ui + half_tau * Vi
        r2 = Vi - c_uv * Ui + uv_nbr * SU + gU * (Pn * Pn + Qn * Qn)
        U[i] = i00 * r1 + i01 * r2
        V[i] = i10 * r1 + i11 * r2


@njit(**_SIG_CACHE)
def sweep_adjoint(P, Q, U, V, nbrs, order,
                  alpha, beta, gcoef, c_uv, uv_nbr, gU, half_tau,
                  i00, i01, i10, i11):
    """Adjoint sweep: U-V solve first (old Psi), then Psi.

    The Psi solve uses the freshly updated U on BOTH sides: swapping
    n <-> n+1 and tau <-> -tau in the base scheme turns every U^n
    coefficient into U^{n+1}.  (Using the old U on the right-hand side
    breaks exact energy conservation.)
    """
    nn = nbrs.shape[1]
    for t in range(order.shape[0]):
        i = order[t]
        Pi = P[i]
        Qi = Q[i]
        Ui = U[i]
        Vi = V[i]
        SP = 0.0
        SQ = 0.0
        SU = 0.0
        for k in range(nn):
            j = nbrs[i, k]
            SP += P[j]
            SQ += Q[j]
            SU += U[j]
        r1 = Ui + half_tau * Vi
        r2 = Vi - c_uv * Ui + uv_nbr * SU + gU * (Pi * Pi + Qi * Qi)
        Un = i00 * r1 + i01 * r2
        Vn = i10 * r1 + i11 * r2
        U[i] = Un
        V[i] = Vn
        cr = gcoef * Un - alpha
        rr = -cr * Pi - Qi - beta * SP
        ri = Pi - cr * Qi - beta * SQ
        den = cr * cr + 1.0
        P[i] = (rr * cr + ri) / den
        Q[i] = (ri * cr - rr) / den
