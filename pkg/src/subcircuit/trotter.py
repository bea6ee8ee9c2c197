"""Suzuki-Trotter product formulas and analytic error bounds.

A formula of order p (1 or even) over M layers is held as its expanded
stage sequence; every stage applies all M layers once, forward or
reversed, with a stage coefficient.  Four upper-bound families on the
Trotter error |U(T) - P(delta)^(T/delta)| are implemented:

* ``basic``            - crude product bound with closed-form constant;
* ``explicit_sum``     - stage coefficients summed exactly;
* ``commutator``       - exploits the count of non-commuting term pairs
                         across layers (N terms/layer, n_tilde clashes);
* ``taylor_of_taylor`` - an exactly computed series in the step size with
                         word-expansion coefficients plus a bounded
                         remainder.

Bounds are monotone in the step size and can be inverted for the largest
admissible step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import InfeasibleTargetError, QuadratureError

FAMILIES = ("basic", "explicit_sum", "commutator", "taylor_of_taylor")

DELTA_CAP = math.pi  # beyond a full rotation per step the expansion is moot

DEFAULT_EXTRA_ORDERS = 3  # series order q = p + 3 unless budget-capped

WORD_BUDGET = 3_000_000  # max distinct words tracked by the expansion


def suzuki_a(k: int) -> float:
    """Recursion coefficient 1/(4 - 4^(1/(2k-1))) of the order-2k formula."""
    return 1.0 / (4.0 - 4.0 ** (1.0 / (2 * k - 1)))


@dataclass(frozen=True)
class ProductFormula:
    """Expanded stage sequence of an order-p formula on M layers."""

    order: int
    n_layers: int
    stage_coeffs: tuple  # per stage: (direction +1/-1, coefficient)

    @property
    def n_stages(self) -> int:
        return len(self.stage_coeffs)

    @property
    def coefficients(self) -> tuple:
        return tuple(c for _, c in self.stage_coeffs)

    @property
    def column_sum(self):
        """Sum of stage coefficients; equals 1 for every layer."""
        return sum(self.coefficients)

    @property
    def abs_coefficient_sum(self):
        """Sum of |coeff| over one layer's column, i.e. H_p."""
        return sum(abs(c) for c in self.coefficients)

    @property
    def max_abs_coefficient(self):
        return max(abs(c) for c in self.coefficients)

    def slots(self):
        """(layer, coefficient) in application order, all stages expanded."""
        out = []
        for direction, c in self.stage_coeffs:
            layers = range(self.n_layers)
            if direction < 0:
                layers = reversed(layers)
            out.extend((i, c) for i in layers)
        return out

    def tcoeff_matrix(self):
        return [[c] * self.n_layers for c in self.coefficients]


def build_formula(order: int, n_layers: int) -> ProductFormula:
    """Expand the recursive Suzuki construction to its stage sequence."""
    if n_layers < 2:
        raise ValueError("need at least two layers")
    if order == 1:
        return ProductFormula(1, n_layers, ((1, Fraction(1)),))
    if order < 1 or order % 2:
        raise ValueError("order must be 1 or even")

    def expand(p, scale):
        if p == 2:
            return [(1, scale / 2), (-1, scale / 2)]
        a = suzuki_a(p // 2)
        outer = expand(p - 2, a * scale)
        middle = expand(p - 2, (1 - 4 * a) * scale)
        return outer + outer + middle + outer + outer

    scale = Fraction(1) if order <= 2 else 1.0
    return ProductFormula(order, n_layers, tuple(expand(order, scale)))


def stage_count_cap(order: int) -> int:
    return 1 if order == 1 else 2 * 5 ** (order // 2 - 1)


def b_constant(order: int) -> float:
    """Bound B_p on the largest |stage coefficient|."""
    if order == 1:
        return 1.0
    if order == 2:
        return 0.5
    prod = 1.0
    for i in range(2, order // 2 + 1):
        prod *= abs(1 - 4 * suzuki_a(i))
    return 0.5 * prod


def h_constant(order: int) -> float:
    """Per-layer sum of |stage coefficients| (empty product = 1 at p=2)."""
    if order == 1:
        return 1.0
    prod = 1.0
    for i in range(1, order // 2):
        root = 4.0 ** (1.0 / (2 * i + 1))
        prod *= (4 + root) / abs(4 - root)
    return prod


def g_constant(order: int) -> float:
    """Constant of the basic bound; 1 at first order."""
    if order == 1:
        return 1.0
    return (
        2.0
        / math.factorial(order + 1)
        * (10.0 / 3.0) ** ((order + 1) * (order / 2 - 1))
    )


@dataclass(frozen=True)
class BoundQuery:
    """Inputs of a bound evaluation.

    ``n_terms``/``n_clash`` describe the layer structure for the
    commutator-aware families: terms per layer and the worst count of
    terms in one layer not commuting with a fixed term of another.
    """

    order: int
    n_layers: int
    lam: float
    total_time: float
    delta: float
    n_terms: int = 1
    n_clash: int = 0
    series_order: int | None = None

    def __post_init__(self):
        if min(self.n_layers, self.lam, self.total_time, self.delta) < 0:
            raise ValueError("query parameters must be nonnegative")
        q = self.series_order
        if q is not None and q < self.order:
            raise ValueError("series order must be >= formula order")

    @property
    def effective_series_order(self) -> int:
        if self.series_order is not None:
            return self.series_order
        return self.order + DEFAULT_EXTRA_ORDERS


@dataclass(frozen=True)
class BoundResult:
    family: str
    epsilon: float
    details: dict = field(default_factory=dict)


def bound_basic(q: BoundQuery) -> BoundResult:
    p = q.order
    eps = (
        q.total_time
        * q.delta**p
        * (q.n_layers * q.lam) ** (p + 1)
        * g_constant(p)
    )
    return BoundResult("basic", eps, {"g_p": g_constant(p)})


def _explicit_sum_eps(q: BoundQuery, deriv: int) -> float:
    h = h_constant(q.order)
    return (
        2.0
        * q.total_time
        * q.delta**deriv
        * (q.n_layers * q.lam * h) ** (deriv + 1)
        / math.factorial(deriv + 1)
    )


def bound_explicit_sum(q: BoundQuery) -> BoundResult:
    if q.order == 1:
        return BoundResult("explicit_sum", bound_basic(q).epsilon, {"delegated": True})
    eps = _explicit_sum_eps(q, q.order)
    return BoundResult("explicit_sum", eps, {"h_p": h_constant(q.order)})


def _commutator_integral_series(delta: float, deriv: int, rate: float) -> float:
    """Closed form of the double integral in the commutator bound.

    Equals sum_m rate^m (m+1) delta^(deriv+m+2) / (deriv+m+2)!, iterated
    multiplicatively so large rate*delta does not overflow term by term.
    """
    try:
        term = delta ** (deriv + 2) / math.factorial(deriv + 2)
    except OverflowError:
        return math.inf
    total, m = term, 0
    peak = rate * delta
    while True:
        term *= rate * delta * (m + 2) / ((m + 1) * (deriv + m + 3))
        total += term
        if not math.isfinite(total):
            return math.inf
        if m > peak and (term < 1e-300 or term < 1e-16 * total):
            return total
        m += 1
        if m > 100_000:
            raise QuadratureError("commutator integral series did not converge")


def _commutator_integral_quadrature(delta: float, deriv: int, rate: float) -> float:
    from scipy.integrate import dblquad

    def integrand(x, tau):
        return (
            deriv
            * (1 - x) ** (deriv - 1)
            * x
            * tau ** (deriv + 1)
            / math.factorial(deriv)
            * math.exp(x * tau * rate)
        )

    val, err = dblquad(integrand, 0.0, delta, 0.0, 1.0, epsabs=0.0, epsrel=1e-10)
    if val != 0.0 and err > 1e-8 * abs(val):
        raise QuadratureError(f"quadrature error {err:.2e} too large")
    return val


def _commutator_eps(q: BoundQuery, deriv: int, integral="series") -> tuple[float, dict]:
    p = q.order
    if q.n_clash == 0 or q.delta == 0.0:
        return 0.0, {"c1": 0.0, "c2": 0.0}
    s = build_formula(p, q.n_layers).n_stages
    sm = s * q.n_layers
    b = b_constant(p)
    h = h_constant(p)
    m_layers, lam, n = q.n_layers, q.lam, q.n_terms
    if lam == 0:
        return 0.0, {"c1": 0.0, "c2": 0.0}
    c1 = (
        q.n_clash
        * deriv
        * b**2
        * lam ** (deriv - 1)
        * n
        * (m_layers * h - b + b * (n / lam)) ** (deriv - 1)
        * (sm**2 - sm)
    )
    c2 = q.n_clash * b**2 * (m_layers * h * lam) ** deriv * n * (sm**2 - sm)
    rate = n * b
    if integral == "series":
        integ = _commutator_integral_series(q.delta, deriv, rate)
    else:
        integ = _commutator_integral_quadrature(q.delta, deriv, rate)
    eps = (
        c1 * q.total_time * q.delta**deriv / math.factorial(deriv + 1)
        + c2 * (q.total_time / q.delta) * integ
    )
    return eps, {"c1": c1, "c2": c2, "integral": integ}


def bound_commutator(q: BoundQuery, integral: str = "series") -> BoundResult:
    """Commutator-aware bound at derivative order p (coefficients summed
    exactly through H_p)."""
    eps, details = _commutator_eps(q, q.order, integral)
    return BoundResult("commutator", eps, details)


# ---------------------------------------------------------------------------
# Exact series coefficients by word expansion
# ---------------------------------------------------------------------------


def _word_tables(formula: ProductFormula, max_degree: int, exact: bool):
    """Degree-indexed maps word -> scaled coefficient of the formula's
    Taylor expansion in non-commuting layer symbols.

    With ``exact`` the stage coefficients are rationals with a common
    denominator D and the stored value is n! * r_n(word) * D^n (an
    integer); otherwise plain floats n! * r_n(word).  Words are tuples of
    layer indices, leftmost symbol applied last.
    """
    slots = formula.slots()
    if exact:
        denom = max(c.denominator for _, c in formula.stage_coeffs)
        tables: list[dict] = [dict() for _ in range(max_degree + 1)]
        tables[0][()] = 1
        for layer, coeff in slots:
            x = int(coeff * denom)
            if x == 0:
                continue
            for n in range(max_degree - 1, -1, -1):
                table = tables[n]
                if not table:
                    continue
                for w, val in list(table.items()):
                    prefix = ()
                    for a in range(1, max_degree - n + 1):
                        prefix = (layer,) + prefix
                        contrib = val * math.comb(n + a, a) * x**a
                        dest = tables[n + a]
                        key = prefix + w
                        dest[key] = dest.get(key, 0) + contrib
                        _check_budget(dest)
        return tables, denom
    tables = [dict() for _ in range(max_degree + 1)]
    tables[0][()] = 1.0
    for layer, coeff in slots:
        x = float(coeff)
        for n in range(max_degree - 1, -1, -1):
            table = tables[n]
            if not table:
                continue
            for w, val in list(table.items()):
                prefix = ()
                fac = 1.0
                for a in range(1, max_degree - n + 1):
                    prefix = (layer,) + prefix
                    fac *= x
                    contrib = val * math.comb(n + a, a) * fac
                    dest = tables[n + a]
                    key = prefix + w
                    dest[key] = dest.get(key, 0.0) + contrib
                    _check_budget(dest)
    return tables, 1


def _check_budget(table):
    if len(table) > WORD_BUDGET:
        from .errors import CapacityLimitError

        raise CapacityLimitError(
            "word expansion exceeds the configured budget; lower the series order"
        )


@lru_cache(maxsize=64)
def _cached_tables(order: int, n_layers: int, max_degree: int):
    formula = build_formula(order, n_layers)
    exact = order <= 2
    tables, denom = _word_tables(formula, max_degree, exact=exact)
    return tables, denom, exact


@lru_cache(maxsize=4096)
def taylor_coefficients(order: int, n_layers: int, series_index: int):
    """Series coefficient f(p, M, l) of the exact Trotter-error expansion.

    Computed by expanding the l-th derivative of the error integrand at 0
    as a signed sum over length-(l+1) words in the layer symbols and
    taking the 1-norm of the per-word coefficients, so cancellations
    between the product-rule and Hamiltonian parts are honored.  Exact
    (a Fraction) for orders 1 and 2, floating point above.
    """
    if series_index < order:
        raise ValueError("series index must be >= formula order")
    tables, denom, exact = _cached_tables(order, n_layers, series_index + 1)
    l = series_index
    upper, lower = tables[l + 1], tables[l]
    # Stored values are already n! r_n(word) D^n, so the two parts align
    # after one extra factor of the common denominator on the lower table.
    total = 0 if exact else 0.0
    for word, val in upper.items():
        sub = lower.get(word[1:], 0)
        total += abs(val - denom * sub)
    # Words reachable only through the Hamiltonian prefix part.
    for tail, val in lower.items():
        for m in range(n_layers):
            if ((m,) + tail) not in upper:
                total += abs(denom * val)
    if exact:
        return Fraction(total, denom ** (l + 1))
    return total / denom ** (l + 1)


def bound_taylor_of_taylor(q: BoundQuery) -> BoundResult:
    """Series-plus-remainder bound; the remainder at order q+1 is the
    smaller of the generalized explicit-sum and commutator tails."""
    p = q.order
    q_ord = q.effective_series_order
    series = 0.0
    terms = []
    for l in range(p, q_ord + 1):
        f = float(taylor_coefficients(p, q.n_layers, l))
        t = (
            q.total_time
            * q.delta**l
            * q.lam ** (l + 1)
            / math.factorial(l + 1)
            * f
        )
        series += t
        terms.append((l, f, t))
    rem_exp = _explicit_sum_eps(q, q_ord + 1)
    if q.n_clash > 0:
        rem_comm, _ = _commutator_eps(q, q_ord + 1)
        remainder, choice = min((rem_exp, "explicit_sum"), (rem_comm, "commutator"))
    else:
        remainder, choice = rem_exp, "explicit_sum"
    return BoundResult(
        "taylor_of_taylor",
        series + remainder,
        {
            "series_order": q_ord,
            "series": series,
            "remainder": remainder,
            "remainder_family": choice,
            "terms": terms,
        },
    )


def evaluate_bound(q: BoundQuery, family: str) -> BoundResult:
    if family == "basic":
        return bound_basic(q)
    if family == "explicit_sum":
        return bound_explicit_sum(q)
    if family == "commutator":
        return bound_commutator(q)
    if family == "taylor_of_taylor":
        return bound_taylor_of_taylor(q)
    raise ValueError(f"unknown bound family {family!r}")


def tightest_bound(q: BoundQuery) -> BoundResult:
    """Smallest of the four bounds; ties keep the earlier family."""
    best = None
    for family in FAMILIES:
        res = evaluate_bound(q, family)
        if best is None or res.epsilon < best.epsilon:
            best = res
    return BoundResult(best.family, best.epsilon, dict(best.details, tightest=True))


def invert_for_delta(
    q: BoundQuery, epsilon_target: float, family: str = "tightest"
) -> float:
    """Largest step with bound <= epsilon_target (relative 1e-9).

    The basic family inverts in closed form; the others bisect on the
    (monotone nondecreasing) bound, capped at DELTA_CAP.
    """
    if epsilon_target <= 0:
        raise ValueError("epsilon target must be positive")
    p = q.order

    def value(delta: float) -> float:
        qq = BoundQuery(
            p, q.n_layers, q.lam, q.total_time, delta, q.n_terms, q.n_clash,
            q.series_order,
        )
        if family == "tightest":
            return tightest_bound(qq).epsilon
        return evaluate_bound(qq, family).epsilon

    if family == "basic":
        base = q.total_time * (q.n_layers * q.lam) ** (p + 1) * g_constant(p)
        if base == 0:
            return DELTA_CAP
        return min((epsilon_target / base) ** (1.0 / p), DELTA_CAP)

    if value(min(1e-9, DELTA_CAP)) > epsilon_target:
        raise InfeasibleTargetError(
            f"{family} bound exceeds {epsilon_target} even at delta=1e-9"
        )
    if value(DELTA_CAP) <= epsilon_target:
        return DELTA_CAP
    lo, hi = 1e-9, DELTA_CAP
    while hi - lo > 1e-9 * hi:
        mid = 0.5 * (lo + hi)
        if value(mid) <= epsilon_target:
            lo = mid
        else:
            hi = mid
    return lo


def formula_to_json(formula: ProductFormula) -> str:
    import json

    return json.dumps(
        {
            "order": formula.order,
            "n_layers": formula.n_layers,
            "stages": [
                {"direction": d, "coefficient": float(c)}
                for d, c in formula.stage_coeffs
            ],
            "b_p": b_constant(formula.order),
            "h_p": h_constant(formula.order),
        },
        indent=2,
    )
