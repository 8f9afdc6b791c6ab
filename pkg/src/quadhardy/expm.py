"""
Matrix exponential by scaling and squaring with diagonal Padé approximants.

Follows Higham's 2005 selection scheme: the lowest Padé degree in
(3, 5, 7, 9, 13) whose backward-error bound covers the 1-norm of the input,
and otherwise degree 13 after scaling the argument by a power of two.
"""

import numpy as np

from .errors import NumericOverflowError

# Padé numerator coefficients b_0..b_m for each degree.
_PADE_COEFFS = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
         960960.0, 16380.0, 182.0, 1.0),
}

# Largest 1-norm for which degree m meets unit roundoff in double precision.
_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068e0,
    13: 5.371920351148152e0,
}


def _pade(A, m):
    b = _PADE_COEFFS[m]
    ident = np.eye(A.shape[0])
    A2 = A @ A
    if m == 13:
        A4 = A2 @ A2
        A6 = A2 @ A4
        U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
                 + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
        V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
             + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident)
    else:
        powers = [ident, A2]
        for _ in range(2, (m + 1) // 2):
            powers.append(powers[-1] @ A2)
        U = sum(b[k] * powers[(k - 1) // 2] for k in range(m, 0, -2))
        U = A @ U
        V = sum(b[k] * powers[k // 2] for k in range(m - 1, -1, -2))
    return np.linalg.solve(V - U, V + U)


def expm(A):
    """Exponential of a real or complex square matrix.

    Parameters
    ----------
    A : array_like, shape (k, k)

    Returns
    -------
    ndarray, shape (k, k)

    Raises
    ------
    NumericOverflowError
        If the input or the result contains non-finite entries.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expm expects a square matrix")
    if not np.all(np.isfinite(A)):
        raise NumericOverflowError("non-finite entries in exponent")
    if not np.issubdtype(A.dtype, np.inexact):
        A = A.astype(float)
    if A.shape[0] == 0:
        return A.copy()

    norm = np.linalg.norm(A, 1)
    with np.errstate(over="ignore", invalid="ignore"):
        for m in (3, 5, 7, 9):
            if norm <= _THETA[m]:
                F = _pade(A, m)
                break
        else:
            s = 0
            if norm > _THETA[13]:
                s = int(np.ceil(np.log2(norm / _THETA[13])))
            F = _pade(A / 2.0**s, 13)
            for _ in range(s):
                F = F @ F

    if not np.all(np.isfinite(F)):
        raise NumericOverflowError("matrix exponential overflowed")
    return F
