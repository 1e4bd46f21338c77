"""Numerical values of the (twisted) adjoint L-function at s = 1.

The completed function Lambda(s) = Q^(s/2) prod_j Gamma_R(s + mu_j) L(s) of a
self-dual Dirichlet series is evaluated by the smoothed approximate
functional equation

    Lambda(s) = sum_n a_n [F_s(n / sqrt Q) + eps F_(w-s)(n / sqrt Q)],

where F_s(x) = int_1^oo phi(x t) t^(s-1) dt and phi is the inverse Mellin
transform of the gamma factor; both are Meijer G-functions. The sign eps is
measured from the theta symmetry theta(1/t) = eps t^w theta(t).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .dvr import valuation
from .errors import (
    ConditionViolated,
    CongruaError,
    NotPrimitive,
    PoleHit,
    SlowConvergence,
    UnsupportedLocalType,
)
from .qexp import prime_factors, primes_up_to

DEFAULT_BUDGET = 20000


# ---------------------------------------------------------------------------
# archimedean factors


def gamma_R(s):
    return mpmath.pi ** (-mpmath.mpf(s) / 2) * mpmath.gamma(mpmath.mpf(s) / 2)


def gamma_C(s):
    return 2 * (2 * mpmath.pi) ** (-mpmath.mpf(s)) * mpmath.gamma(s)


def gamma_factor(k: int, nu: int, s) -> float:
    """Gamma_C(s + k - 1) Gamma_R(s + nu)."""
    for arg in (s + nu, s + k - 1):
        if arg <= 0 and float(arg) == int(arg) and (int(arg) % 2 == 0 or arg == s + k - 1):
            raise PoleHit(f"gamma factor has a pole at s = {s} (nu = {nu}, k = {k})")
    return float(gamma_C(s + k - 1) * gamma_R(s + nu))


# ---------------------------------------------------------------------------
# quadratic characters


def is_fundamental_discriminant(D: int) -> bool:
    if D == 1:
        return True
    if D % 4 == 1:
        return all((D // q) % q for q in prime_factors(abs(D)))
    if D % 4 == 0:
        m = D // 4
        if m % 4 in (2, 3):
            return all((m // q) % q for q in prime_factors(abs(m)))
    return False


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D / n)."""
    if n == 0:
        return 1 if abs(D) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if D < 0:
            result = -result
    while n % 2 == 0:
        n //= 2
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5):
            result = -result
    # Jacobi symbol (D / n) for odd n
    a = D % n if n > 1 else 0
    if n == 1:
        return result
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


@dataclass(frozen=True)
class QuadraticCharacter:
    """The primitive quadratic character attached to a fundamental discriminant D."""

    D: int

    @classmethod
    def of(cls, D: int) -> "QuadraticCharacter":
        if not is_fundamental_discriminant(D):
            raise NotPrimitive(f"{D} is not a fundamental discriminant")
        return cls(D)

    @property
    def conductor(self) -> int:
        return abs(self.D)

    @property
    def is_even(self) -> bool:
        return self.D > 0

    @property
    def parity(self) -> int:
        """nu = 1 for even characters and 0 for odd ones, as in the adjoint gamma factor."""
        return 1 if self.is_even else 0

    def __call__(self, n: int) -> int:
        return kronecker(self.D, n)


def gauss_sum(alpha: QuadraticCharacter) -> complex:
    D = alpha.conductor
    if D == 1:
        return complex(1)
    with mpmath.workdps(30):
        total = mpmath.fsum(alpha(a) * mpmath.expjpi(mpmath.mpf(2 * a) / D) for a in range(1, D))
    return complex(total)


# ---------------------------------------------------------------------------
# rational detection


def detect_rational(x, max_denominator: int, error: float):
    """(num, den) of a continued-fraction approximant within error, or None."""
    x = Fraction(x) if not isinstance(x, Fraction) else x
    r = x.limit_denominator(max_denominator)
    if abs(r - x) <= Fraction(error):
        return r.numerator, r.denominator
    return None


# ---------------------------------------------------------------------------
# generic self-dual L-series


def _meijerg(a, b, z, d):
    # the kernels decay like exp(-d z^(1/d)); far beyond working precision they are 0
    if d * z ** (mpmath.mpf(1) / d) > 2.31 * (mpmath.mp.dps + 40):
        return mpmath.mpf(0)
    return mpmath.meijerg(a, b, z, zeroprec=400)


class LogChebyshev:
    """Piecewise Chebyshev fit of log g(x) in the variable log x, for positive g.

    The kernels below are smooth and positive on (0, oo), so a few dozen
    exact evaluations replace one Meijer G evaluation per Dirichlet term.
    """

    def __init__(self, fn, xmin: float, xmax: float, width: float = 1.0, degree: int = 30):
        self.u0 = math.log(xmin)
        self.width = width
        self.count = max(1, math.ceil((math.log(xmax) - self.u0) / width))
        K = degree + 1
        nodes = [math.cos(math.pi * (j + 0.5) / K) for j in range(K)]
        self.pieces = []
        for i in range(self.count):
            mid = self.u0 + (i + 0.5) * width
            vals = [float(mpmath.log(fn(mpmath.exp(mid + width / 2 * t)))) for t in nodes]
            coef = [2.0 / K * math.fsum(v * math.cos(math.pi * m * (j + 0.5) / K) for j, v in enumerate(vals)) for m in range(K)]
            coef[0] /= 2
            self.pieces.append(coef)

    def __call__(self, x: float) -> float:
        u = math.log(x)
        i = min(self.count - 1, max(0, int((u - self.u0) / self.width)))
        t = 2 * (u - self.u0 - i * self.width) / self.width - 1
        c = self.pieces[i]
        b1 = b2 = 0.0
        for ck in reversed(c[1:]):
            b1, b2 = 2 * t * b1 - b2 + ck, b1
        return math.exp(t * b1 - b2 + c[0])


class SelfDualLSeries:
    """Dirichlet series with gamma factor prod Gamma_R(s + mu_j) and Lambda(s) = eps Lambda(w - s)."""

    direct_limit = 300  # below this many terms the kernels are evaluated exactly

    def __init__(self, coefficients, mu, weight, conductor, dps: int = 20):
        self.a = coefficients  # a[0] unused
        self.mu = list(mu)
        self.w = weight
        self.Q = conductor
        self.dps = dps
        self.sqrtQ = mpmath.sqrt(conductor)
        self.interpolation_error = 0.0

    def gamma(self, s):
        out = mpmath.mpf(1)
        for m in self.mu:
            out *= gamma_R(s + m)
        return out

    def phi(self, x):
        d = len(self.mu)
        pre = 2 * mpmath.pi ** (-mpmath.fsum(self.mu) / 2)
        return pre * _meijerg([[], []], [[m / mpmath.mpf(2) for m in self.mu], []], mpmath.pi**d * x**2, d)

    def incomplete(self, s, x):
        """F_s(x) = int_1^oo phi(x t) t^(s-1) dt."""
        d = len(self.mu)
        pre = mpmath.pi ** (-mpmath.fsum(self.mu) / 2)
        b = [m / mpmath.mpf(2) for m in self.mu] + [-mpmath.mpf(s) / 2]
        return pre * _meijerg([[], [1 - mpmath.mpf(s) / 2]], [b, []], mpmath.pi**d * x**2, d)

    def cutoff(self, s, error: float) -> float:
        """Smallest x (on a grid) where both incomplete kernels fall below error."""
        x = mpmath.mpf("0.5")
        while x < 200:
            if abs(self.incomplete(s, x)) < error and abs(self.incomplete(self.w - s, x)) < error:
                return float(x)
            x *= 1.25
        raise SlowConvergence("kernel does not decay")

    def terms_needed(self, s, error: float) -> int:
        return int(self.cutoff(s, error) * float(self.sqrtQ)) + 1

    def _kernel(self, fn, xmin: float, xmax: float):
        """Fast evaluator for fn on [xmin, xmax]; records the fit error at test points."""
        with mpmath.workdps(self.dps):
            table = LogChebyshev(fn, xmin, xmax)
            for j in range(7):
                x = math.exp(math.log(xmin) + (j + 0.37) / 7 * (math.log(xmax) - math.log(xmin)))
                exact = float(fn(mpmath.mpf(x)))
                if exact:
                    self.interpolation_error = max(self.interpolation_error, abs(table(x) / exact - 1))
        return table

    def _sum(self, fn, xs_scale: float, n_terms: int) -> float:
        """sum_n a_n fn(n * xs_scale) over the first n_terms coefficients."""
        n_terms = min(n_terms, len(self.a) - 1)
        if n_terms <= self.direct_limit:
            with mpmath.workdps(self.dps):
                return float(mpmath.fsum(self.a[n] * fn(mpmath.mpf(n) * xs_scale) for n in range(1, n_terms + 1) if self.a[n]))
        table = self._kernel(fn, xs_scale, n_terms * xs_scale)
        return math.fsum(self.a[n] * table(n * xs_scale) for n in range(1, n_terms + 1) if self.a[n])

    def theta(self, t, n_terms: int | None = None):
        n_terms = n_terms or len(self.a) - 1
        return self._sum(self.phi, float(t / self.sqrtQ), n_terms)

    def root_number(self, t: float = 1.15):
        """eps measured from theta(1/t) = eps t^w theta(t); returns (eps, residual)."""
        lhs = self.theta(1 / t)
        rhs = t**self.w * self.theta(t)
        eps = lhs / rhs
        sign = 1 if eps > 0 else -1
        return sign, abs(eps - sign)

    def completed_value(self, s, eps: int, n_terms: int) -> float:
        scale = float(1 / self.sqrtQ)
        first = self._sum(lambda x: self.incomplete(s, x), scale, n_terms)
        if eps == 0:
            return first
        return first + eps * self._sum(lambda x: self.incomplete(self.w - s, x), scale, n_terms)

    def value(self, s, eps: int, n_terms: int):
        lam = self.completed_value(s, eps, n_terms)
        with mpmath.workdps(self.dps):
            return float(lam / (self.Q ** (mpmath.mpf(s) / 2) * self.gamma(s))), lam


# ---------------------------------------------------------------------------
# the adjoint series


def local_type(level: int, weight: int, ell: int, a_ell: int) -> str:
    """'special' or 'principal' at a prime dividing the level."""
    if level % (ell * ell) == 0:
        raise UnsupportedLocalType(f"{ell}^2 divides the level {level}", "the level must be squarefree at each ramified prime")
    if a_ell * a_ell == ell ** (weight - 2):
        return "special"
    if a_ell != 0:
        return "principal"
    raise UnsupportedLocalType(f"a_{ell} = 0: supercuspidal at {ell}", "only principal series and special local types are covered")


def adjoint_coefficients(f, alpha: QuadraticCharacter, n: int) -> list:
    """Dirichlet coefficients of L(Ad f (x) alpha, s) up to n, as floats."""
    k, N = f.weight, f.level
    local = {}
    for ell in primes_up_to(n):
        chi = alpha(ell)
        powers = [Fraction(1)]
        q = ell
        depth = 0
        while q <= n:
            depth += 1
            q *= ell
        if N % ell == 0:
            kind = local_type(N, k, ell, f.eigenvalues[ell])
            root = Fraction(chi) if kind == "principal" else Fraction(chi, ell)
            for _ in range(depth):
                powers.append(powers[-1] * root)
        elif chi == 0:
            powers += [Fraction(0)] * depth
        else:
            t2 = Fraction(f.eigenvalues[ell] ** 2, ell ** (k - 1))
            # 1 / ((1 - chi X)(1 - chi (t2 - 2) X + X^2)) as a power series in X
            c1 = chi * (t2 - 2) + chi
            c2 = Fraction(chi * chi) + chi * chi * (t2 - 2)
            c3 = Fraction(chi**3)
            # denominator 1 - c1 X + c2 X^2 - c3 X^3
            for j in range(1, depth + 1):
                v = c1 * powers[j - 1]
                if j >= 2:
                    v -= c2 * powers[j - 2]
                if j >= 3:
                    v += c3 * powers[j - 3]
                powers.append(v)
        local[ell] = powers
    a = [0.0] * (n + 1)
    a[1] = 1.0
    spf = list(range(n + 1))
    for i in range(2, int(n**0.5) + 1):
        if spf[i] == i:
            for j in range(i * i, n + 1, i):
                if spf[j] == j:
                    spf[j] = i
    exact = [Fraction(0)] * (n + 1)
    exact[1] = Fraction(1)
    for m in range(2, n + 1):
        ell = spf[m]
        e, rest = 0, m
        while rest % ell == 0:
            rest //= ell
            e += 1
        exact[m] = local[ell][e] * exact[rest]
        a[m] = float(exact[m])
    return a


@dataclass
class LValueResult:
    level: int
    weight: int
    disc: int
    value: float
    completed: float
    root_number: int
    symmetry_residual: float
    terms: int
    error_bound: float
    normalized: float | None = None
    rational: tuple | None = None
    valuations: dict = field(default_factory=dict)
    periods: dict = field(default_factory=dict)
    detection: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "weight": self.weight,
            "disc": self.disc,
            "valuations": {str(p): v for p, v in sorted(self.valuations.items())},
            "rational": None if self.rational is None else {"num": self.rational[0], "den": self.rational[1]},
            "provenance": {
                "coefficient_budget": self.terms,
                "error_bound": self.error_bound,
                "detection": self.detection,
                "root_number": self.root_number,
                "symmetry_residual": self.symmetry_residual,
            },
            "diagnostics": {
                "l_value": self.value,
                "completed_value": self.completed,
                "normalized_value": self.normalized,
                "periods": self.periods,
            },
        }


def adjoint_series(f, alpha: QuadraticCharacter, n_terms: int) -> SelfDualLSeries:
    k = f.weight
    mu = [k - 1, k, alpha.parity]
    Q = f.level**2 * alpha.conductor**3
    return SelfDualLSeries([0.0] + adjoint_coefficients(f, alpha, n_terms)[1:], mu, 1, Q)


def adjoint_l_value(
    f,
    alpha: QuadraticCharacter | None = None,
    target_error: float = 1e-12,
    budget: int = DEFAULT_BUDGET,
    space=None,
    periods=None,
    primes=(),
    max_denominator: int = 10**6,
    detection_error: float = 1e-8,
) -> LValueResult:
    """L(Ad f (x) alpha, 1) and, given periods, the normalized value L*.

    ``periods`` is a PeriodResult; without it only the raw value is returned.
    """
    from .modsym.localize import extend_eigenvalues
    from .modsym.space import build_space

    alpha = alpha or QuadraticCharacter(1)
    if alpha.conductor > 1 and any(f.level % q == 0 for q in prime_factors(alpha.conductor)):
        raise ConditionViolated(f"discriminant {alpha.D} shares a prime with the level {f.level}", "D is prime to the level N")
    k = f.weight
    Q = f.level**2 * alpha.conductor**3
    probe = SelfDualLSeries([0.0, 1.0], [k - 1, k, alpha.parity], 1, Q)
    n_terms = probe.terms_needed(1, target_error / 10)
    if n_terms > budget:
        raise SlowConvergence(f"{n_terms} coefficients needed, budget is {budget}")
    S = space or build_space(f.level, f.weight)
    extend_eigenvalues(S, f, n_terms)
    series = adjoint_series(f, alpha, n_terms)
    eps, residual = series.root_number()
    value, completed = series.value(1, eps, n_terms)
    # tail estimate: size of the first omitted kernel values
    tail = abs(series.incomplete(1, mpmath.mpf(n_terms) / series.sqrtQ)) + abs(series.incomplete(0, mpmath.mpf(n_terms) / series.sqrtQ))
    err = float(tail * n_terms / (Q ** mpmath.mpf(0.5) * series.gamma(1))) + target_error / 10
    # kernel-table fit error, scaled by the size of the sum (heuristic)
    err += 10 * series.interpolation_error * abs(float(value))
    res = LValueResult(f.level, k, alpha.D, float(value), float(completed), eps, residual, n_terms, err)
    res.detection = {"max_denominator": max_denominator, "error": detection_error}
    if periods is not None:
        g = gauss_sum(alpha)
        g2 = (g * g).real  # alpha(-1) D
        gam = gamma_factor(k, alpha.parity, 1)
        normalized = g2 * gam * float(value) / (periods.omega_plus * periods.omega_minus)
        res.normalized = normalized
        res.periods = periods.to_json()
        rat = detect_rational(normalized, max_denominator, detection_error)
        res.rational = rat
        if rat is not None:
            for p in primes:
                res.valuations[p] = valuation(Fraction(rat[0], rat[1]), p)
    return res


def classical_ratio(f, periods, target_error: float = 1e-12, space=None, budget: int = DEFAULT_BUDGET):
    """L(Ad f, 1) / (pi^(k+1) Omega+ Omega-) together with the LValueResult."""
    res = adjoint_l_value(f, None, target_error, budget, space=space)
    ratio = res.value / (float(mpmath.pi) ** (f.weight + 1) * periods.omega_plus * periods.omega_minus)
    return ratio, res


# ---------------------------------------------------------------------------
# congruence prime predictions


def _phi_F(N: int, D: int) -> int:
    """#(O_F / N O_F)^x for F = Q(sqrt D) and squarefree N prime to D."""
    out = 1
    for q in prime_factors(N):
        s = kronecker(D, q)
        if s == 1:
            out *= (q - 1) ** 2
        elif s == -1:
            out *= q * q - 1
        else:
            out *= q * (q - 1)
    return out


def congruence_prime_report(f, discs, primes, space=None, periods=None, target_error: float = 1e-12, budget: int = DEFAULT_BUDGET) -> dict:
    """Predicted non-base-change congruence primes for each quadratic discriminant."""
    from .modsym.periods import manin_periods
    from .modsym.space import build_space

    S = space or build_space(f.level, f.weight)
    entries = []
    for D in discs:
        entry = {"disc": D}
        try:
            alpha = QuadraticCharacter.of(D)
            if D < 0:
                res = adjoint_l_value(f, alpha, target_error, budget, space=S)
                entry.update(
                    {
                        "status": "RAW_ONLY",
                        "l_value": res.value,
                        "note": "normalization for imaginary quadratic fields needs a period outside this library",
                    }
                )
                entries.append(entry)
                continue
            if periods is None:
                periods = manin_periods(S, f)
            res = adjoint_l_value(f, alpha, target_error, budget, space=S, periods=periods, primes=primes)
            entry["normalized_value"] = res.normalized
            entry["root_number"] = res.root_number
            if res.rational is None:
                entry["status"] = "Undetected"
                entry["predictions"] = []
            else:
                entry["rational"] = {"num": res.rational[0], "den": res.rational[1]}
                entry["status"] = "DETECTED"
                preds = []
                for p in primes:
                    cond = 6 * f.level * abs(D) * _phi_F(f.level, D)
                    item = {"p": p, "valuation": res.valuations.get(p)}
                    if cond % p == 0 or p <= f.weight - 2:
                        item["flag"] = "ConditionViolated"
                        item["hypothesis"] = "p > k - 2 and p prime to 6 N D phi_F(N)"
                    elif res.valuations.get(p, 0) >= 1:
                        item["flag"] = "PREDICTED"
                    else:
                        item["flag"] = "NONE"
                    preds.append(item)
                entry["predictions"] = preds
        except CongruaError as exc:
            entry["status"] = "ERROR"
            entry.update(exc.to_json())
        entries.append(entry)
    return {"level": f.level, "weight": f.weight, "label": f.label, "entries": entries}
