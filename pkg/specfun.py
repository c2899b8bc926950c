"""
Special-function kernel for the wall condition.

Real-argument log-Gamma, digamma, Kummer's M(a, b; x), Tricomi's U(a, b; x)
and dU/da. Every M/U evaluation returns an FnEval carrying an absolute error
estimate so callers can tell a real sign change from rounding noise.

M(a, b; x) runs its power series at x >= 0 only (Kummer's transformation
covers x < 0); where a < 0 makes the series cancel, a downward recurrence
in b is tried as well.

U(a, b; x) dispatch:
    a in {0, -1, -2, ...}     terminating polynomial
    b < 1                     x^{1-b} U(a - b + 1, 2 - b; x)
    a < 0 otherwise           downward recurrence in a from a0, a0 + 1, a0 in (0, 1),
                              then the convergent forms for x <= 8
    a > 0                     in order: Poincare expansion (x >= 10),
                              logarithmic series / two-M connection (a*x <= 8),
                              Miller recurrence normalised by the sum rule (x >= 0.5),
                              Miller recurrence normalised at a0 (a > 1)

The first U path with a relative error estimate at or below ACCEPT_REL_ERR
wins; otherwise the one with the smallest absolute error estimate does.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

from constants import (
    EPS, EULER_GAMMA, LANCZOS_G, LANCZOS_NUM, LANCZOS_DEN,
    MAX_SERIES_TERMS, KUMMER_OVERFLOW_GUARD, KUMMER_SCALED_ABOVE,
    INTEGER_B_TOL, ASYMPTOTIC_MIN_X, DIRECT_AX_LIMIT, MILLER_DECADES,
    MILLER_SUM_MIN_X, MILLER_SUM_DEPTH, ACCEPT_REL_ERR,
    DA_STEP_MIN, DA_STEP_REL,
)
from errors import ArgumentOverflowError, ConvergenceFailure, DomainError, PoleError

logger = logging.getLogger(__name__)

MILLER_MAX_STEPS = 2_000_000
RESCALE = 1e250
SUM_RESCALE = 1e100             # d_n v_n products must stay finite


@dataclass(frozen=True)
class FnEval:
    """Value of a special function plus what it cost and how far to trust it."""

    value: float
    abs_err_estimate: float
    terms_used: int
    scaled: Optional[float] = None   # e^{-x} M for large x (kummer_m only)
    method: str = ""

    def __post_init__(self):
        if not (math.isfinite(self.abs_err_estimate) and self.abs_err_estimate >= 0.0):
            raise ValueError(f"abs_err_estimate must be finite and >= 0, got {self.abs_err_estimate}")
        if self.terms_used < 1:
            raise ValueError(f"terms_used must be >= 1, got {self.terms_used}")

    @property
    def rel_err(self):
        if self.value == 0.0:
            return math.inf if self.abs_err_estimate > 0 else 0.0
        return self.abs_err_estimate / abs(self.value)


def _checked(value, err, terms, method, scaled=None):
    if not math.isfinite(value):
        raise ArgumentOverflowError(f"{method} overflowed to {value}", parameter="x")
    if not math.isfinite(err):
        raise ConvergenceFailure(f"{method} lost all precision", value, err, terms)
    return FnEval(value, err, max(1, terms), scaled, method)


# ============================================================================
# Gamma family
# ============================================================================

def _is_nonpositive_integer(x):
    return x <= 0.0 and x == math.floor(x)


def _sinpi(x):
    n = round(x)
    s = math.sin(math.pi * (x - n))
    return -s if n % 2 else s


def _tanpi(x):
    return math.tan(math.pi * (x - round(x)))


def _lanczos_sum(z):
    num = den = 0.0
    if z <= 1.0:
        for c, d in zip(reversed(LANCZOS_NUM), reversed(LANCZOS_DEN)):
            num = num * z + c
            den = den * z + d
    else:
        # same rational in 1/z, avoids z**12 for large z
        w = 1.0 / z
        for c, d in zip(LANCZOS_NUM, LANCZOS_DEN):
            num = num * w + c
            den = den * w + d
    return num / den


def log_gamma(x):
    """
    ln|Gamma(x)| and the sign of Gamma(x).

    Args:
        x: real, not a non-positive integer

    Returns:
        tuple: (ln|Gamma(x)|, +1 or -1)

    Raises:
        PoleError: x in {0, -1, -2, ...}
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"log_gamma needs a finite argument, got {x}", parameter="x")
    if _is_nonpositive_integer(x):
        raise PoleError(f"Gamma has a pole at x = {x:g}", parameter="x")
    if x < 0.5:
        # reflection Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        s = _sinpi(x)
        lg, _ = log_gamma(1.0 - x)
        return math.log(math.pi / abs(s)) - lg, (1 if s > 0 else -1)
    zgh = x + LANCZOS_G - 0.5
    value = math.log(_lanczos_sum(x)) + (x - 0.5) * math.log(zgh) - zgh
    return value, 1


def rgamma(x):
    """1 / Gamma(x), zero at the poles."""
    if _is_nonpositive_integer(x):
        return 0.0
    lg, sign = log_gamma(x)
    return sign * math.exp(-lg)


def digamma(x):
    """psi(x) = Gamma'(x) / Gamma(x) for real x off the poles."""
    x = float(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"digamma has a pole at x = {x:g}", parameter="x")
    if x < 0.0:
        return digamma(1.0 - x) - math.pi / _tanpi(x)
    acc = 0.0
    while x < 12.0:
        acc -= 1.0 / x
        x += 1.0
    x2 = 1.0 / (x * x)
    tail = x2 * (1 / 12 - x2 * (1 / 120 - x2 * (1 / 252 - x2 * (1 / 240 - x2 / 132))))
    return acc + math.log(x) - 0.5 / x - tail


def _signed_gamma_quotient(top, bottom, extra_log=0.0):
    """Gamma(top) / Gamma(bottom) * exp(extra_log) and the log-magnitude used."""
    if _is_nonpositive_integer(bottom):
        return 0.0, 0.0
    lt, st = log_gamma(top)
    lb, sb = log_gamma(bottom)
    log_mag = lt - lb + extra_log
    return st * sb * math.exp(log_mag), abs(lt) + abs(lb) + abs(extra_log)


# ============================================================================
# Three-term recurrences
# ============================================================================

def _recur(coefficients, prev, cur, prev_err=0.0, cur_err=0.0):
    """
    Run new = p * cur + q * prev over the (p, q) pairs in `coefficients`.

    In exact arithmetic the result is P * prev + Q * cur for two sensitivities
    P and Q that are carried along with the values. Start-value errors enter
    as |P| prev_err + |Q| cur_err. Rounding adds a few ulps per step of
    |P| |prev| + |Q| |cur|, the size the recurrence actually reaches.

    Returns:
        tuple: (value, abs error estimate, steps taken)
    """
    p_prev, p_cur = 1.0, 0.0
    q_prev, q_cur = 0.0, 1.0
    start_prev, start_cur = abs(prev), abs(cur)
    steps = 0
    for p, q in coefficients:
        prev, cur = cur, p * cur + q * prev
        p_prev, p_cur = p_cur, p * p_cur + q * p_prev
        q_prev, q_cur = q_cur, p * q_cur + q * q_prev
        steps += 1
    reach = abs(p_cur) * start_prev + abs(q_cur) * start_cur
    err = abs(p_cur) * prev_err + abs(q_cur) * cur_err + 2.0 * (steps + 2) * EPS * reach
    return cur, err, steps


# ============================================================================
# Kummer M
# ============================================================================

def _m_series(a, b, x):
    """Plain power series of M(a, b; x): (fsum value, error bound, terms)."""
    terms = [1.0]
    term = 1.0
    running = 1.0
    abs_sum = 1.0
    weighted = 0.0
    k = 0
    k_min = max(0.0, -a)
    while True:
        term *= (a + k) / (b + k) * x / (k + 1)
        k += 1
        if not math.isfinite(term):
            raise ArgumentOverflowError(
                f"M({a:g}, {b:g}; {x:g}) series overflowed at term {k}", parameter="x")
        terms.append(term)
        running += term
        abs_sum += abs(term)
        weighted += k * abs(term)
        if term == 0.0:
            break
        if k > k_min and abs(term) <= 0.25 * EPS * abs(running):
            break
        if k >= MAX_SERIES_TERMS:
            raise ConvergenceFailure(
                f"M({a:g}, {b:g}; {x:g}) did not converge in {k} terms",
                running, abs(term) + EPS * abs_sum, k, parameter="x")
    value = math.fsum(terms)
    err = EPS * (abs_sum + 2.5 * weighted) + abs(term)
    return value, err, k + 1


def _m_b_recurrence(a, b, x):
    """
    b > 0, x >= 0: M(a, B-1) = (B + x - 1)/(B - 1) M(a, B) - x (B - a)/(B (B - 1)) M(a, B + 1),
    run down from B = b + K where the series terms fall off like 1/k!.
    """
    shift = int(math.ceil(2.0 * (abs(a) + 1.0) * x)) + 2
    top = b + shift
    hi, hi_err, hi_terms = _m_series(a, top + 1.0, x)
    lo, lo_err, lo_terms = _m_series(a, top, x)
    coefficients = (
        ((B + x - 1.0) / (B - 1.0), -x * (B - a) / (B * (B - 1.0)))
        for B in (top - j for j in range(shift))
    )
    value, err, steps = _recur(coefficients, hi, lo, hi_err, lo_err)
    return value, err, hi_terms + lo_terms + steps, "b-recurrence"


def _m_nonnegative(a, b, x):
    """x >= 0: the series, or the b-recurrence when the series cancels (a < 0)."""
    candidates = []
    try:
        value, err, terms = _m_series(a, b, x)
        candidates.append((value, err, terms, "series"))
    except ArgumentOverflowError as exc:
        logger.debug("M series overflowed at a=%g b=%g x=%g: %s", a, b, x, exc)
    series_loose = not candidates or candidates[0][1] > ACCEPT_REL_ERR * abs(candidates[0][0])
    if a < 0.0 and b > 0.0 and series_loose:
        try:
            candidates.append(_m_b_recurrence(a, b, x))
        except (ArgumentOverflowError, ConvergenceFailure) as exc:
            logger.debug("M b-recurrence failed at a=%g b=%g x=%g: %s", a, b, x, exc)
    if not candidates:
        raise ArgumentOverflowError(f"M({a:g}, {b:g}; {x:g}) overflowed on every path", parameter="x")
    return min(candidates, key=lambda c: c[1])


def kummer_m(a, b, x):
    """
    Kummer's confluent hypergeometric function M(a, b; x) = 1F1(a; b; x).

    Negative x goes through Kummer's transformation e^x M(b - a, b; -x), so
    the series only ever runs at x >= 0. There a < 0 makes the series
    alternate; when it loses digits the downward recurrence in b takes over.
    Above KUMMER_SCALED_ABOVE the scaled value e^{-x} M is returned too.
    """
    a, b, x = float(a), float(b), float(x)
    if _is_nonpositive_integer(b):
        raise PoleError(f"M(a, b; x) is undefined for b = {b:g}", parameter="b")
    if abs(x) > KUMMER_OVERFLOW_GUARD:
        raise ArgumentOverflowError(
            f"|x| = {abs(x):g} exceeds the overflow guard {KUMMER_OVERFLOW_GUARD:g}", parameter="x")
    if x == 0.0 or a == 0.0:
        return FnEval(1.0, 0.0, 1, math.exp(-x) if x > KUMMER_SCALED_ABOVE else None, "trivial")

    if x < 0.0:
        inner, inner_err, terms, method = _m_nonnegative(b - a, b, -x)
        ex = math.exp(x)
        value = inner * ex
        err = inner_err * ex + EPS * abs(value) * (1.0 + abs(x))
        method = "kummer-transform/" + method
    else:
        value, err, terms, method = _m_nonnegative(a, b, x)

    scaled = value * math.exp(-x) if x > KUMMER_SCALED_ABOVE else None
    return _checked(value, err, terms, method, scaled)


# ============================================================================
# Tricomi U building blocks
# ============================================================================

def _u_polynomial(m, b, x):
    """U(-m, b; x) = (-1)^m sum_s C(m, s) (b + s)_{m - s} (-x)^s."""
    terms = []
    poch = 1.0
    for s in range(m, -1, -1):
        if s < m:
            poch *= b + s
        terms.append(math.comb(m, s) * poch * (-x) ** s)
    total = math.fsum(terms)
    if m % 2:
        total = -total
    err = EPS * (m + 2) * math.fsum(abs(t) for t in terms)
    return _checked(total, err, m + 1, "polynomial")


def _u_connection(a, b, x):
    """Non-integer b: Gamma-weighted combination of two Kummer functions."""
    c1, lc1 = _signed_gamma_quotient(1.0 - b, a - b + 1.0)
    c2, lc2 = _signed_gamma_quotient(b - 1.0, a, (1.0 - b) * math.log(x))
    m1 = kummer_m(a, b, x) if c1 != 0.0 else FnEval(0.0, 0.0, 1)
    m2 = kummer_m(a - b + 1.0, 2.0 - b, x) if c2 != 0.0 else FnEval(0.0, 0.0, 1)
    t1 = c1 * m1.value
    t2 = c2 * m2.value
    value = t1 + t2
    err = (abs(c1) * m1.abs_err_estimate + abs(c2) * m2.abs_err_estimate
           + EPS * (abs(t1) * (1.0 + lc1) + abs(t2) * (1.0 + lc2)))
    return _checked(value, err, m1.terms_used + m2.terms_used, "connection")


def _u_logarithmic(a, n, x):
    """Integer b = n + 1: the logarithmic (digamma) series."""
    terms_used = 0
    pieces = []
    abs_total = 0.0

    # 1 / Gamma(a - n) as (a - 1)...(a - n) / Gamma(a): a - n rounds to -n for tiny a
    ra = rgamma(a)
    pre1 = ra / math.factorial(n)
    for j in range(1, n + 1):
        pre1 *= a - j
    if n % 2 == 0:
        pre1 = -pre1
    if pre1 != 0.0:
        log_x = math.log(x)
        psi_a = digamma(a)
        psi_1 = -EULER_GAMMA
        psi_n1 = digamma(n + 1.0)
        coeff = 1.0
        running = 0.0
        k = 0
        k_min = max(2.0, -a)
        while True:
            t = coeff * (log_x + psi_a - psi_1 - psi_n1)
            pieces.append(pre1 * t)
            running += t
            abs_total += abs(pre1 * t) * (1.0 + abs(log_x))
            terms_used += 1
            coeff *= (a + k) / ((n + 1 + k) * (k + 1)) * x
            # psi(a) + 1/a cancels to nothing for tiny a
            psi_a = digamma(a + 1.0) if k == 0 else psi_a + 1.0 / (a + k)
            psi_1 += 1.0 / (k + 1)
            psi_n1 += 1.0 / (n + 1 + k)
            k += 1
            if coeff == 0.0:
                break
            if k > k_min and abs(coeff) * (abs(log_x) + abs(psi_a) + abs(psi_1) + abs(psi_n1)) \
                    <= 0.25 * EPS * abs(running):
                break
            if k >= MAX_SERIES_TERMS:
                raise ConvergenceFailure(
                    f"logarithmic U({a:g}, {n + 1}; {x:g}) did not converge",
                    math.fsum(pieces), abs(coeff) + EPS * abs_total, k, parameter="x")

    for k in range(1, n + 1):
        poch = 1.0
        for j in range(n - k):
            poch *= 1.0 - a + k + j
        t = ra * math.factorial(k - 1) * poch / math.factorial(n - k) * x ** (-k)
        pieces.append(t)
        abs_total += abs(t)
        terms_used += 1

    value = math.fsum(pieces)
    err = 4.0 * EPS * abs_total * (1.0 + abs(math.log(abs(a) + n + 1.0)))
    return _checked(value, err, terms_used, "logarithmic")


def _u_asymptotic(a, b, x):
    """Poincare expansion x^{-a} sum (a)_k (a-b+1)_k / k! (-x)^{-k}, cut at the smallest term."""
    terms = [1.0]
    term = 1.0
    running = 1.0
    remainder = 0.0
    k = 0
    while True:
        nxt = term * (a + k) * (a - b + 1.0 + k) / ((k + 1) * -x)
        if nxt == 0.0:
            break
        if abs(nxt) >= abs(term):
            remainder = abs(nxt)
            break
        k += 1
        terms.append(nxt)
        running += nxt
        term = nxt
        if abs(nxt) <= 0.25 * EPS * abs(running):
            remainder = abs(nxt)
            break
        if k >= MAX_SERIES_TERMS:
            remainder = abs(nxt)
            break
    scale = x ** (-a)
    total = math.fsum(terms)
    value = scale * total
    err = abs(scale) * (2.0 * remainder + EPS * (k + 1) * math.fsum(abs(t) for t in terms)) \
        + EPS * abs(value) * (1.0 + abs(a * math.log(x)))
    return _checked(value, err, len(terms), "asymptotic")


def _u_convergent(a, b, x):
    """Logarithmic series for integer b, the two-M connection otherwise."""
    n = round(b)
    if abs(b - n) < INTEGER_B_TOL and n >= 1:
        return _u_logarithmic(a, n - 1, x)
    return _u_connection(a, b, x)


def _u_miller_sum(a, b, x):
    """
    a > 0, moderate x: backward recurrence normalised by the sum rule

        sum_n (alpha)_n (alpha - b + 1)_n / n! U(alpha + n, b; x) = x^{-alpha}

    with alpha = a - floor(a) + 1 in [1, 2). The recurrence runs on
    v_n = (alpha)_n U(alpha + n), which keeps the sum weights modest.
    """
    alpha = a - math.floor(a) + 1.0
    t = int(round(a - alpha))
    n_top = max(t + 20, int(math.ceil((math.sqrt(a + 1.0) + MILLER_SUM_DEPTH / math.sqrt(x)) ** 2)))
    if n_top > MILLER_MAX_STEPS:
        raise ConvergenceFailure(
            f"sum-rule Miller for U({a:g}, {b:g}; {x:g}) needs {n_top} steps",
            math.nan, math.inf, 1, parameter="x")

    v = [0.0] * (n_top + 2)
    v[n_top] = 1.0
    for n in range(n_top, 0, -1):
        A = alpha + n
        v[n - 1] = -((b - 2.0 * A - x) * v[n] + (A - b + 1.0) * v[n + 1]) / (A - 1.0)
        if abs(v[n - 1]) > SUM_RESCALE:
            v = [y / SUM_RESCALE for y in v]

    weighted = []
    d = 1.0
    for n in range(n_top + 1):
        weighted.append(d * v[n])
        d *= (alpha - b + 1.0 + n) / (n + 1.0)
    total = math.fsum(weighted)
    spread = math.fsum(abs(w) for w in weighted)
    tail = abs(weighted[-1]) + abs(weighted[-2])

    if t >= 0:
        head = v[t]
        step_spread = abs(head)
        log_poch = log_gamma(alpha + t)[0] - log_gamma(alpha)[0]
    else:
        first = (b - 2.0 * alpha - x) * v[0]
        second = (alpha - b + 1.0) * v[1]
        head = -(first + second)
        step_spread = abs(first) + abs(second)
        log_poch = 0.0
    if head == 0.0 or total == 0.0:
        raise ConvergenceFailure(
            f"sum-rule Miller for U({a:g}, {b:g}; {x:g}) lost its normalisation",
            0.0, math.inf, n_top, parameter="x")

    value = head / total * math.exp(-alpha * math.log(x) - log_poch)
    rel = (EPS * (8.0 + 2.0 * abs(t) + 4.0 * spread / abs(total) + 2.0 * step_spread / abs(head))
           + tail / abs(total))
    return _checked(value, rel * abs(value), n_top + 1, "miller-sum")


def _u_miller(a, b, x):
    """a > 1 at small x: backward recurrence from far above, normalised at a0."""
    a0 = a - math.floor(a)
    if a0 == 0.0:
        a0 = 1.0
    steps = int(round(a - a0))
    top = (math.sqrt(a) + MILLER_DECADES / (4.0 * math.sqrt(x))) ** 2
    n_top = max(int(math.ceil(top - a0)), steps + 10)
    if n_top > MILLER_MAX_STEPS:
        raise ConvergenceFailure(
            f"Miller recurrence for U({a:g}, {b:g}; {x:g}) needs {n_top} steps",
            math.nan, math.inf, 1, parameter="x")

    y_hi, y = 0.0, 1.0
    target = 1.0 if n_top == steps else None
    for j in range(n_top, 0, -1):
        A = a0 + j
        y_lo = -((b - 2.0 * A - x) * y + A * (A - b + 1.0) * y_hi)
        y_hi, y = y, y_lo
        if j - 1 == steps:
            target = y
        if abs(y) > RESCALE:
            y /= RESCALE
            y_hi /= RESCALE
            if target is not None:
                target /= RESCALE
    base = _u_positive(a0, b, x)
    value = target / y * base.value
    err = abs(value) * (base.rel_err + (n_top + 10) * EPS)
    return _checked(value, err, base.terms_used + n_top, "miller")


def _u_downward(a, b, x):
    """Non-integer a < 0: U(A-1) = (2A + x - b) U(A) - A(A - b + 1) U(A+1) from a0, a0 + 1."""
    a0 = a - math.floor(a)
    steps = int(round(a0 - a))
    upper = _u_positive(a0 + 1.0, b, x)
    lower = _u_positive(a0, b, x)
    coefficients = (
        (2.0 * A + x - b, -A * (A - b + 1.0))
        for A in (a0 - j for j in range(steps))
    )
    value, err, _ = _recur(coefficients, upper.value, lower.value,
                           upper.abs_err_estimate, lower.abs_err_estimate)
    return _checked(value, err, upper.terms_used + lower.terms_used + steps, "recurrence")


# ============================================================================
# U dispatch
# ============================================================================

def _positive_paths(a, b, x):
    if x >= ASYMPTOTIC_MIN_X:
        yield _u_asymptotic
    if max(a, 1.0) * x <= DIRECT_AX_LIMIT:
        yield _u_convergent
    if x >= MILLER_SUM_MIN_X:
        yield _u_miller_sum
    if a > 1.0:
        yield _u_miller


def _negative_paths(a, b, x):
    yield _u_downward
    if x <= DIRECT_AX_LIMIT:
        yield _u_convergent


def _best_of(paths, a, b, x):
    """First path at ACCEPT_REL_ERR or better, else the smallest absolute error."""
    best = None
    for path in paths:
        try:
            out = path(a, b, x)
        except (ArgumentOverflowError, ConvergenceFailure) as exc:
            logger.debug("%s failed at a=%g b=%g x=%g: %s", path.__name__, a, b, x, exc)
            continue
        if out.rel_err <= ACCEPT_REL_ERR:
            return out
        if best is None or out.abs_err_estimate < best.abs_err_estimate:
            best = out
    if best is None:
        raise ConvergenceFailure(
            f"no U path converged at a={a:g} b={b:g} x={x:g}", math.nan, math.inf, 1, parameter="x")
    return best


def _u_positive(a, b, x):
    return _best_of(_positive_paths(a, b, x), a, b, x)


# ============================================================================
# Tricomi U public surface
# ============================================================================

def tricomi_u(a, b, x):
    """
    Tricomi's confluent hypergeometric function of the second kind U(a, b; x).

    Args:
        a, b: real parameters
        x: real argument, x > 0

    Returns:
        FnEval: value, absolute error estimate, terms used and method tag

    Raises:
        DomainError: x <= 0
        ConvergenceFailure: a series or recurrence gave up (partial value attached)
    """
    a, b, x = float(a), float(b), float(x)
    if not (math.isfinite(a) and math.isfinite(b) and math.isfinite(x)):
        raise DomainError(f"U needs finite arguments, got a={a}, b={b}, x={x}", parameter="x")
    if not x > 0.0:
        raise DomainError(f"U(a, b; x) needs x > 0, got x = {x:g}", parameter="x")

    if _is_nonpositive_integer(a):
        return _u_polynomial(int(-a), b, x)

    if b < 1.0:
        # U(a, b; x) = x^{1-b} U(a - b + 1, 2 - b; x) moves b < 1 to b > 1
        n = round(b)
        if abs(b - n) < INTEGER_B_TOL:
            b = float(n)
        shifted = a - b + 1.0
        k = round(shifted)
        if k <= 0 and abs(shifted - k) <= 4.0 * EPS * (abs(a) + abs(b) + 1.0):
            # a - b + 1 is a non-positive integer up to its own rounding
            shifted = float(k)
        inner = tricomi_u(shifted, 2.0 - b, x)
        factor = x ** (1.0 - b)
        return _checked(inner.value * factor, inner.abs_err_estimate * factor,
                        inner.terms_used, inner.method)

    if a < 0.0:
        return _best_of(_negative_paths(a, b, x), a, b, x)
    return _u_positive(a, b, x)


def tricomi_u_da(a, b, x):
    """
    dU/da by a fourth-order central stencil with h = max(1e-6, 1e-8 |a|).

    The error estimate is the gap to the second-order central difference plus
    the propagated evaluation errors.
    """
    a = float(a)
    h = max(DA_STEP_MIN, DA_STEP_REL * abs(a))
    up1 = tricomi_u(a + h, b, x)
    dn1 = tricomi_u(a - h, b, x)
    up2 = tricomi_u(a + 2.0 * h, b, x)
    dn2 = tricomi_u(a - 2.0 * h, b, x)
    d2 = (up1.value - dn1.value) / (2.0 * h)
    d4 = (-up2.value + 8.0 * up1.value - 8.0 * dn1.value + dn2.value) / (12.0 * h)
    propagated = (up2.abs_err_estimate + 8.0 * up1.abs_err_estimate
                  + 8.0 * dn1.abs_err_estimate + dn2.abs_err_estimate) / (12.0 * h)
    terms = up1.terms_used + dn1.terms_used + up2.terms_used + dn2.terms_used
    return _checked(d4, abs(d4 - d2) + propagated, terms, "stencil4")


# ============================================================================
# TESTING (run this file directly for a quick self-check)
# ============================================================================

if __name__ == "__main__":
    print("Special-function kernel self-check\n" + "=" * 50)

    lg, sign = log_gamma(0.5)
    print(f"ln Gamma(1/2)  = {lg:.12f}   (ln sqrt(pi) = {0.5 * math.log(math.pi):.12f})")
    print(f"M(1, 1; 1)     = {kummer_m(1, 1, 1).value:.12f}   (e = {math.e:.12f})")
    u = tricomi_u(1, 1, 1)
    print(f"U(1, 1; 1)     = {u.value:.12f} +- {u.abs_err_estimate:.1e} [{u.method}]")
    u = tricomi_u(-2.3, 1.5, 0.5)
    print(f"U(-2.3, 1.5; .5) = {u.value:.12f} +- {u.abs_err_estimate:.1e} [{u.method}]")
    for a in (-1.5, 0.5, 2.5):
        x = 3.0
        u = tricomi_u(a, a + 1.0, x)
        print(f"U({a}, {a + 1}; {x}) = {u.value:.12e}  x^-a = {x ** -a:.12e}")
