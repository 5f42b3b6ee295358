"""Numerically stable special functions shared by the whole package.

Everything here works in log-factorial space with explicit sign tracking,
so that quantities like sqrt((j+m)!(j-m)!) stay finite well beyond the
point where the raw factorials overflow a double (j ~ 85).

Half-integer angular momentum labels are handled internally as doubled
integers (2j, 2m), which keeps index arithmetic exact.
"""

import numpy as np

J_MAX_DEFAULT = 25

_MAX_FACT = 512
_LOG_FACT = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, _MAX_FACT + 1)))))


def log_factorials(k_max):
    """Return a read-only view of [ln(0!), ln(1!), ..., ln(k_max!)]."""
    global _LOG_FACT, _MAX_FACT
    if k_max > _MAX_FACT:
        _MAX_FACT = int(k_max * 2)
        _LOG_FACT = np.concatenate(
            ([0.0], np.cumsum(np.log(np.arange(1, _MAX_FACT + 1))))
        )
    view = _LOG_FACT[: k_max + 1]
    view.flags.writeable = False
    return view


def log_factorial(k):
    """ln(k!) for integer k >= 0."""
    if k < 0:
        raise ValueError(f"factorial of negative integer: {k}")
    return log_factorials(int(k))[int(k)]


def _two_j(j, name="j"):
    """Convert a half-integer (possibly float) label to a doubled integer."""
    tj = int(round(2 * j))
    if abs(2 * j - tj) > 1e-9:
        raise ValueError(f"{name}={j} is not a half-integer")
    return tj


def hermite(n, x):
    """Physicists' Hermite polynomial H_n(x) by three-term recurrence.

    Accepts scalar or array x (real or complex).  Raises OverflowError if
    the recurrence leaves the double range; use a log-magnitude scheme for
    n beyond ~150 if that ever becomes necessary.
    """
    if n < 0 or n != int(n):
        raise ValueError(f"hermite order must be a non-negative integer, got {n}")
    n = int(n)
    x = np.asarray(x)
    h_prev = np.ones_like(x, dtype=x.dtype if x.dtype.kind == "c" else float)
    if n == 0:
        return h_prev if h_prev.ndim else h_prev[()]
    h = 2.0 * x
    for k in range(1, n):
        h, h_prev = 2.0 * x * h - 2.0 * k * h_prev, h
    if not np.all(np.isfinite(h)):
        raise OverflowError(f"hermite({n}, x) overflowed double precision")
    return h if h.ndim else h[()]


def laguerre_assoc(n, a, x):
    """Associated Laguerre polynomial L_n^(a)(x) by the degree recurrence.

    The upper index a may be a negative integer as long as n + a >= 0
    (the recurrence remains algebraically exact for any a).  Accepts
    scalar or array x.
    """
    if n < 0 or n != int(n):
        raise ValueError(f"laguerre degree must be a non-negative integer, got {n}")
    n = int(n)
    a = int(a)
    if n + a < 0:
        raise ValueError(f"laguerre_assoc requires n + a >= 0, got n={n}, a={a}")
    x = np.asarray(x, dtype=float)
    l_prev = np.ones_like(x)
    if n == 0:
        return l_prev if l_prev.ndim else l_prev[()]
    l = 1.0 + a - x
    for k in range(1, n):
        l, l_prev = ((2 * k + 1 + a - x) * l - (k + a) * l_prev) / (k + 1), l
    return l if l.ndim else l[()]


def wigner_d_small(j, mp, m, theta):
    """Wigner small-d matrix element d^j_{m'm}(theta) = <j m'|exp(-i theta J_y)|j m>.

    Evaluated by the standard factorial sum with log-factorial
    stabilization.  j, mp, m may be half-integers.
    """
    tj, tmp, tm = _two_j(j), _two_j(mp, "mp"), _two_j(m, "m")
    if abs(tmp) > tj or abs(tm) > tj:
        raise ValueError(f"|m'|,|m| must not exceed j (j={j}, mp={mp}, m={m})")
    if (tj - tm) % 2 or (tj - tmp) % 2:
        raise ValueError(f"j-m and j-m' must be integers (j={j}, mp={mp}, m={m})")
    lf = log_factorials(tj + 2)
    # integer index combinations (all guaranteed integral)
    jpm, jmm = (tj + tm) // 2, (tj - tm) // 2
    jpmp, jmmp = (tj + tmp) // 2, (tj - tmp) // 2
    log_pref = 0.5 * (lf[jpmp] + lf[jmmp] + lf[jpm] + lf[jmm])
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    s_lo = max(0, (tm - tmp) // 2)
    s_hi = min(jpm, jmmp)
    total = 0.0
    dmm = (tmp - tm) // 2  # m' - m
    for k in range(s_lo, s_hi + 1):
        log_den = lf[jpm - k] + lf[k] + lf[dmm + k] + lf[jmmp - k]
        mag = np.exp(log_pref - log_den)
        sign = -1.0 if (dmm + k) % 2 else 1.0
        total += sign * mag * c ** (jpm + jmmp - 2 * k) * s ** (dmm + 2 * k)
    return total


def wigner_3j(j1, j2, j3, m1, m2, m3):
    """Wigner 3j symbol via the Racah sum with log-factorial stabilization.

    Returns 0 when m1+m2+m3 != 0 or any |m| exceeds its j; raises on a
    triangle-inequality violation or non-half-integer input.
    """
    tj1, tj2, tj3 = _two_j(j1, "j1"), _two_j(j2, "j2"), _two_j(j3, "j3")
    tm1, tm2, tm3 = _two_j(m1, "m1"), _two_j(m2, "m2"), _two_j(m3, "m3")
    if tm1 + tm2 + tm3 != 0:
        return 0.0
    if abs(tm1) > tj1 or abs(tm2) > tj2 or abs(tm3) > tj3:
        return 0.0
    if tj3 < abs(tj1 - tj2) or tj3 > tj1 + tj2 or (tj1 + tj2 + tj3) % 2:
        return 0.0
    if (tj1 - tm1) % 2 or (tj2 - tm2) % 2 or (tj3 - tm3) % 2:
        raise ValueError("j - m must be an integer for every (j, m) pair")
    lf = log_factorials((tj1 + tj2 + tj3) // 2 + 2)
    # all the following are integers by the parity checks above
    a1 = (tj1 + tj2 - tj3) // 2
    a2 = (tj1 - tj2 + tj3) // 2
    a3 = (-tj1 + tj2 + tj3) // 2
    b1 = (tj1 - tm1) // 2
    b2 = (tj1 + tm1) // 2
    b3 = (tj2 - tm2) // 2
    b4 = (tj2 + tm2) // 2
    b5 = (tj3 - tm3) // 2
    b6 = (tj3 + tm3) // 2
    log_pref = 0.5 * (
        lf[a1] + lf[a2] + lf[a3] - lf[(tj1 + tj2 + tj3) // 2 + 1]
        + lf[b1] + lf[b2] + lf[b3] + lf[b4] + lf[b5] + lf[b6]
    )
    k_lo = max(0, (tj2 - tj3 - tm1) // 2, (tj1 - tj3 + tm2) // 2)
    k_hi = min(a1, b1, b4)
    total = 0.0
    for k in range(k_lo, k_hi + 1):
        log_den = (
            lf[k] + lf[a1 - k] + lf[b1 - k] + lf[b4 - k]
            + lf[(tj3 - tj2 + tm1) // 2 + k] + lf[(tj3 - tj1 - tm2) // 2 + k]
        )
        sign = -1.0 if k % 2 else 1.0
        total += sign * np.exp(log_pref - log_den)
    phase = -1.0 if ((tj1 - tj2 - tm3) // 2) % 2 else 1.0
    return phase * total


class WignerDMatrix:
    """Full rotation matrix D^(j)_{m'm}(psi, theta, phi) in the z-y-z convention.

    entries[i, k] = exp(-i m' psi) d^j_{m'm}(theta) exp(-i m phi), with the
    row index i running over m' = -j..j (ascending) and likewise for m.
    """

    def __init__(self, j, euler, entries):
        self.j = j
        self.euler = euler
        self.entries = entries

    @property
    def dim(self):
        return self.entries.shape[0]


def spin_m_values(j):
    """Array of m values -j..j (ascending) for spin j."""
    tj = _two_j(j)
    return (np.arange(-tj, tj + 1, 2)) / 2.0


def wigner_D(j, euler, j_max=J_MAX_DEFAULT):
    """Assemble the (2j+1) x (2j+1) Wigner D matrix for Euler angles (psi, theta, phi)."""
    if j > j_max:
        raise ValueError(f"j={j} exceeds configured limit j_max={j_max}")
    psi, theta, phi = euler
    ms = spin_m_values(j)
    d = np.array(
        [[wigner_d_small(j, mp, m, theta) for m in ms] for mp in ms]
    )
    entries = (
        np.exp(-1j * ms[:, None] * psi) * d * np.exp(-1j * ms[None, :] * phi)
    )
    return WignerDMatrix(j, tuple(euler), entries)
