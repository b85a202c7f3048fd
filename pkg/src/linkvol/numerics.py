"""Complex elementary/special functions and mod-pi^2 comparison helpers.

Everything here is branch-sensitive: logs are principal with the imaginary
part in (-pi, pi], the closed end of the cut taken on the positive side, and
the dilogarithm is evaluated consistently with that choice term by term.
"""

import cmath
import math

import numpy as np

from . import _kernels

PI_SQUARED = math.pi * math.pi


def principal_log(z):
    """Principal logarithm with arg in (-pi, pi].

    Real arguments on the negative axis map to the upper edge of the cut
    (arg = +pi) even when the imaginary part is a signed -0.0, so values
    on the cut are deterministic.
    """
    z = complex(z)
    if z == 0:
        raise ValueError("log of zero")
    out = cmath.log(z)
    if out.imag == -math.pi and z.imag == 0.0:
        out = complex(out.real, math.pi)
    return out


def dilog(z):
    """Dilogarithm Li2(z) on the principal branch.

    Power series near 0, the inversion/reflection functional equations for
    moderate and large |z|, and a Bernoulli-coefficient series in
    -log(1-z) for the remaining annulus around the two series' blind spot
    near exp(+-i*pi/3). Relative accuracy ~1e-14 away from the cut ends.
    For real z > 1 the value is the limit from below the cut, which is what
    principal branches of the functional equations produce.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("dilog of non-finite value")
    return _kernels._dilog_scalar(z)


def dilog_array(z):
    """Vectorized dilog over an array (JIT or numpy path per env flag)."""
    z = np.ascontiguousarray(z, dtype=np.complex128)
    if not np.all(np.isfinite(z)):
        raise ValueError("dilog of non-finite value")
    shape = z.shape
    out = _kernels.dilog_many(z.ravel())
    return out.reshape(shape)


def mod_pi2_equal(a, b, tol=1e-9):
    """True iff a and b agree up to an integer multiple of pi^2 in the real
    part, and exactly (within tol) in the imaginary part."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = complex(a)
    b = complex(b)
    if abs(a.imag - b.imag) > tol:
        return False
    d = (a.real - b.real) / PI_SQUARED
    return abs(d - round(d)) * PI_SQUARED <= tol
