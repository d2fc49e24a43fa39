"""Sparse multivariate polynomials over the rationals.

Exponent vectors are packed into a single int (one fixed-width field per
variable, first variable most significant) so that monomial products are
integer additions and integer order is lex order.  Coefficients are ints
whenever possible and ``Fraction`` otherwise.
"""

from __future__ import annotations

import ast
import heapq
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import CertificationFailed, DepthLimit, InternalError, ZeroPolynomial

_BITS = 24
_FIELD = (1 << _BITS) - 1
_PREFERRED = {"a": 0, "b": 1, "c": 2, "d": 3, "t": 4, "u": 5, "v": 6, "w": 7, "x": 8}


def _var_key(name):
    return (_PREFERRED.get(name, 100), name)


def _norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _div(c, k):
    if k == 1:
        return c
    if k == -1:
        return -c
    return _norm(Fraction(c) / k)


def _pack(exps):
    key = 0
    for e in exps:
        key = (key << _BITS) | e
    return key


def _unpack(key, n):
    out = [0] * n
    for i in range(n - 1, -1, -1):
        out[i] = key & _FIELD
        key >>= _BITS
    return out


def _repack(t, old_vars, new_vars):
    if old_vars == new_vars:
        return t
    pos = [new_vars.index(v) for v in old_vars]
    n_old, n_new = len(old_vars), len(new_vars)
    out = {}
    for k, c in t.items():
        e = _unpack(k, n_old)
        ne = [0] * n_new
        for i, p in enumerate(pos):
            ne[p] = e[i]
        out[_pack(ne)] = c
    return out


def _merge_vars(v1, v2):
    if v1 == v2:
        return v1
    return tuple(sorted(set(v1) | set(v2), key=_var_key))


class MultiPoly:
    """Immutable sparse polynomial in named variables."""

    __slots__ = ("vars", "_t")

    def __init__(self, terms: Mapping | None = None, vars: Iterable[str] = ()):
        vars = tuple(vars)
        ordered = tuple(sorted(vars, key=_var_key))
        t = {}
        for exps, c in (terms or {}).items():
            c = _norm(Fraction(c)) if not isinstance(c, int) else c
            if c:
                exps = tuple(exps)
                if len(exps) != len(vars):
                    raise ValueError("exponent vector does not match variables")
                k = _pack(exps)
                t[k] = t.get(k, 0) + c
        t = {k: c for k, c in t.items() if c}
        self.vars = ordered
        self._t = _repack(t, vars, ordered)

    @classmethod
    def _raw(cls, vars, t):
        p = cls.__new__(cls)
        p.vars = vars
        p._t = t
        return p

    # constructors -----------------------------------------------------
    @classmethod
    def const(cls, c) -> "MultiPoly":
        c = _norm(Fraction(c))
        return cls._raw((), {0: c} if c else {})

    @classmethod
    def var(cls, name: str) -> "MultiPoly":
        return cls._raw((name,), {1: 1})

    @classmethod
    def coerce(cls, x) -> "MultiPoly":
        if isinstance(x, MultiPoly):
            return x
        if isinstance(x, str):
            return parse(x)
        return cls.const(x)

    # structure ----------------------------------------------------------
    def _aligned(self, vars):
        return _repack(self._t, self.vars, vars)

    def terms(self):
        """Yield (exponent dict, coefficient) pairs, zero exponents omitted."""
        n = len(self.vars)
        for k, c in sorted(self._t.items(), reverse=True):
            e = _unpack(k, n)
            yield {v: x for v, x in zip(self.vars, e) if x}, c

    def __len__(self):
        return len(self._t)

    def is_zero(self):
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def is_constant(self):
        return all(k == 0 for k in self._t)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return Fraction(self._t.get(0, 0))

    def free_vars(self):
        """Variables that actually occur with positive exponent."""
        n = len(self.vars)
        seen = [False] * n
        for k in self._t:
            e = _unpack(k, n)
            for i in range(n):
                if e[i]:
                    seen[i] = True
        return tuple(v for v, s in zip(self.vars, seen) if s)

    def degree(self, var: str | None = None) -> int:
        if not self._t:
            return -1
        n = len(self.vars)
        if var is None:
            return max(sum(_unpack(k, n)) for k in self._t)
        if var not in self.vars:
            return 0
        i = self.vars.index(var)
        return max(_unpack(k, n)[i] for k in self._t)

    def low_degree(self, vars: Iterable[str]) -> int:
        """Minimum over terms of the total degree in ``vars``."""
        if not self._t:
            return -1
        idx = [i for i, v in enumerate(self.vars) if v in set(vars)]
        n = len(self.vars)
        return min(sum(_unpack(k, n)[i] for i in idx) for k in self._t)

    def coeffs(self, var: str) -> list["MultiPoly"]:
        """Coefficients in ``var`` as polynomials in the other variables, low to high."""
        if var not in self.vars:
            return [self]
        n = len(self.vars)
        i = self.vars.index(var)
        rest = self.vars[:i] + self.vars[i + 1:]
        buckets: dict[int, dict] = {}
        for k, c in self._t.items():
            e = _unpack(k, n)
            d = e.pop(i)
            buckets.setdefault(d, {})[_pack(e)] = c
        top = max(buckets)
        return [MultiPoly._raw(rest, buckets.get(j, {})) for j in range(top + 1)]

    def coeff(self, var: str, k: int) -> "MultiPoly":
        cs = self.coeffs(var)
        return cs[k] if k < len(cs) else MultiPoly.const(0)

    def homogeneous_part(self, vars: Iterable[str], deg: int) -> "MultiPoly":
        """Terms whose total degree in ``vars`` equals ``deg``."""
        vs = set(vars)
        idx = [i for i, v in enumerate(self.vars) if v in vs]
        n = len(self.vars)
        t = {k: c for k, c in self._t.items() if sum(_unpack(k, n)[i] for i in idx) == deg}
        return MultiPoly._raw(self.vars, t)

    def univariate(self, var: str | None = None) -> list[Fraction]:
        """Coefficient list (low to high) of a polynomial in at most one variable."""
        fv = self.free_vars()
        if len(fv) > 1 or (var is not None and fv and fv[0] != var):
            raise ValueError(f"not univariate in {var}: {fv}")
        if not fv:
            return [self.constant_value()] if self._t else []
        return [c.constant_value() for c in self.coeffs(fv[0])]

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        other = MultiPoly.coerce(other)
        vars = _merge_vars(self.vars, other.vars)
        t = dict(self._aligned(vars))
        for k, c in other._aligned(vars).items():
            v = t.get(k, 0) + c
            if v:
                t[k] = _norm(v)
            else:
                t.pop(k, None)
        return MultiPoly._raw(vars, t)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.vars, {k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        return self + (-MultiPoly.coerce(other))

    def __rsub__(self, other):
        return MultiPoly.coerce(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            if isinstance(other, str):
                other = parse(other)
            else:
                s = _norm(Fraction(other))
                if not s:
                    return MultiPoly._raw(self.vars, {})
                return MultiPoly._raw(self.vars, {k: _norm(c * s) for k, c in self._t.items()})
        vars = _merge_vars(self.vars, other.vars)
        a = self._aligned(vars)
        b = other._aligned(vars)
        if len(a) < len(b):
            a, b = b, a
        t: dict[int, object] = {}
        get = t.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                t[k] = get(k, 0) + ca * cb
        return MultiPoly._raw(vars, {k: _norm(c) for k, c in t.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, s):
        if isinstance(s, MultiPoly):
            if not s.is_constant():
                return self.divexact(s)
            s = s.constant_value()
        s = Fraction(s)
        if not s:
            raise ZeroDivisionError("division by zero scalar")
        return MultiPoly._raw(self.vars, {k: _norm(c / s) for k, c in self._t.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = MultiPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            try:
                other = MultiPoly.coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        fv = self.free_vars()
        p = self._restricted(fv)
        return hash((fv, frozenset(p._t.items())))

    def _restricted(self, vars):
        return MultiPoly._raw(vars, _repack_down(self._t, self.vars, vars))

    def divexact(self, other: "MultiPoly") -> "MultiPoly":
        """Exact quotient; ``ValueError`` if ``other`` does not divide ``self``."""
        other = MultiPoly.coerce(other)
        if not other:
            raise ZeroDivisionError("division by zero polynomial")
        vars = _merge_vars(self.vars, other.vars)
        n = len(vars)
        b = other._aligned(vars)
        if len(b) == 1:
            (lk, lc), = b.items()
            le = _unpack(lk, n)
            t = {}
            for k, c in self._aligned(vars).items():
                e = _unpack(k, n)
                if any(x < y for x, y in zip(e, le)):
                    raise ValueError("not divisible")
                t[k - lk] = _div(c, lc)
            return MultiPoly._raw(vars, t)
        rem = dict(self._aligned(vars))
        lk = max(b)
        lc = b[lk]
        le = _unpack(lk, n)
        rest = [(k, c) for k, c in b.items() if k != lk]
        heap = [-k for k in rem]
        heapq.heapify(heap)
        q = {}
        while rem:
            k = -heapq.heappop(heap)
            c = rem.pop(k, None)
            if c is None:
                continue
            e = _unpack(k, n)
            if any(x < y for x, y in zip(e, le)):
                raise ValueError("not divisible")
            qk = k - lk
            qc = _div(c, lc)
            q[qk] = qc
            for bk, bc in rest:
                kk = qk + bk
                old = rem.get(kk)
                v = (old or 0) - qc * bc
                if v:
                    if old is None:
                        heapq.heappush(heap, -kk)
                    rem[kk] = _norm(v)
                elif old is not None:
                    del rem[kk]
        return MultiPoly._raw(vars, q)

    def divides(self, other: "MultiPoly") -> bool:
        try:
            other.divexact(self)
        except ValueError:
            return False
        return True

    # calculus and substitution ---------------------------------------------
    def diff(self, var: str, k: int = 1) -> "MultiPoly":
        if var not in self.vars:
            return MultiPoly.const(0) if k else self
        n = len(self.vars)
        i = self.vars.index(var)
        shift = _BITS * (n - 1 - i)
        t = {}
        for key, c in self._t.items():
            e = (key >> shift) & _FIELD
            if e >= k:
                f = math.perm(e, k)
                t[key - (k << shift)] = c * f
        return MultiPoly._raw(self.vars, t)

    def subs(self, mapping: Mapping[str, object]) -> "MultiPoly":
        """Simultaneous substitution of variables by polynomials or scalars."""
        if not mapping:
            return self
        targets = [v for v in self.vars if v in mapping]
        if not targets:
            return self
        keep = tuple(v for v in self.vars if v not in mapping)
        vals = [MultiPoly.coerce(mapping[v]) for v in targets]
        n = len(self.vars)
        tidx = [self.vars.index(v) for v in targets]
        kidx = [self.vars.index(v) for v in keep]
        groups: dict[tuple, dict] = {}
        for key, c in self._t.items():
            e = _unpack(key, n)
            sig = tuple(e[i] for i in tidx)
            groups.setdefault(sig, {})[_pack([e[i] for i in kidx])] = c
        powers: list[dict[int, MultiPoly]] = [{0: MultiPoly.const(1)} for _ in targets]

        def power(j, m):
            cache = powers[j]
            if m not in cache:
                cache[m] = power(j, m - 1) * vals[j]
            return cache[m]

        result = MultiPoly.const(0)
        for sig, t in groups.items():
            term = MultiPoly._raw(keep, t)
            for j, m in enumerate(sig):
                if m:
                    term = term * power(j, m)
            result = result + term
        return result

    def __call__(self, **point):
        return self.subs(point)

    def evaluate(self, point: Mapping[str, object]) -> Fraction:
        """Value at a point assigning every free variable a scalar."""
        missing = [v for v in self.free_vars() if v not in point]
        if missing:
            raise ValueError(f"no value for {missing}")
        n = len(self.vars)
        vals = [Fraction(point[v]) if v in point else Fraction(0) for v in self.vars]
        total = Fraction(0)
        for k, c in self._t.items():
            e = _unpack(k, n)
            m = Fraction(c)
            for x, p in zip(vals, e):
                if p:
                    m *= x ** p
            total += m
        return total

    def eval_float(self, point: Mapping[str, float]) -> float:
        n = len(self.vars)
        vals = [float(point.get(v, 0.0)) for v in self.vars]
        total = 0.0
        for k, c in self._t.items():
            e = _unpack(k, n)
            m = float(c)
            for x, p in zip(vals, e):
                if p:
                    m *= x ** p
            total += m
        return total

    def map_coeffs(self, f) -> "MultiPoly":
        t = {k: _norm(f(c)) for k, c in self._t.items()}
        return MultiPoly._raw(self.vars, {k: c for k, c in t.items() if c})

    def coefficient_values(self):
        return [Fraction(c) for c in self._t.values()]

    # display -------------------------------------------------------------
    def __str__(self):
        if not self._t:
            return "0"
        parts = []
        for e, c in self.terms():
            mono = "*".join(v if x == 1 else f"{v}**{x}" for v, x in e.items())
            c = Fraction(c)
            if not mono:
                s = str(c)
            elif c == 1:
                s = mono
            elif c == -1:
                s = "-" + mono
            else:
                s = f"{c}*{mono}" if c.denominator == 1 else f"({c})*{mono}"
            parts.append(s)
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"MultiPoly({self})"


def _repack_down(t, old_vars, new_vars):
    n_old = len(old_vars)
    pos = [old_vars.index(v) for v in new_vars]
    out = {}
    for k, c in t.items():
        e = _unpack(k, n_old)
        out[_pack([e[i] for i in pos])] = c
    return out


def var(name: str) -> MultiPoly:
    return MultiPoly.var(name)


def variables(names: str):
    return tuple(MultiPoly.var(n) for n in names.replace(",", " ").split())


class _Evaluator(ast.NodeVisitor):
    def visit_Expression(self, node):
        return self.visit(node.body)

    def visit_BinOp(self, node):
        left, right = self.visit(node.left), self.visit(node.right)
        op = type(node.op)
        if op is ast.Add:
            return left + right
        if op is ast.Sub:
            return left - right
        if op is ast.Mult:
            return left * right
        if op is ast.Div:
            return left / right
        if op is ast.Pow:
            return left ** int(right.constant_value())
        raise ValueError(f"unsupported operator {op.__name__}")

    def visit_UnaryOp(self, node):
        v = self.visit(node.operand)
        if isinstance(node.op, ast.USub):
            return -v
        if isinstance(node.op, ast.UAdd):
            return v
        raise ValueError("unsupported unary operator")

    def visit_Constant(self, node):
        if isinstance(node.value, bool) or not isinstance(node.value, int):
            raise ValueError("only integer literals are allowed")
        return MultiPoly.const(node.value)

    def visit_Name(self, node):
        return MultiPoly.var(node.id)

    def generic_visit(self, node):
        raise ValueError(f"unsupported syntax {type(node).__name__}")


def parse(text: str) -> MultiPoly:
    """Parse an arithmetic expression such as ``"2*(c**2+d**2) - c*d/3"``."""
    text = text.replace("^", "**")
    return _Evaluator().visit(ast.parse(text, mode="eval"))


# ---------------------------------------------------------------------------
# resultants

def bareiss_det(rows: list[list[MultiPoly]]) -> MultiPoly:
    """Fraction-free determinant of a square matrix of polynomials."""
    m = [[MultiPoly.coerce(x) for x in r] for r in rows]
    n = len(m)
    if n == 0:
        return MultiPoly.const(1)
    sign = 1
    prev = MultiPoly.const(1)
    for k in range(n - 1):
        if not m[k][k]:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return MultiPoly.const(0)
        pivot = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            for j in range(k + 1, n):
                num = m[i][j] * pivot
                if mik and m[k][j]:
                    num = num - mik * m[k][j]
                m[i][j] = num.divexact(prev)
        prev = pivot
    det = m[n - 1][n - 1]
    return det if sign > 0 else -det


def sylvester_matrix(p: MultiPoly, q: MultiPoly, var: str) -> list[list[MultiPoly]]:
    pc = p.coeffs(var)[::-1]
    qc = q.coeffs(var)[::-1]
    m, n = len(pc) - 1, len(qc) - 1
    size = m + n
    zero = MultiPoly.const(0)
    rows = []
    for i in range(n):
        rows.append([zero] * i + pc + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + qc + [zero] * (size - n - 1 - i))
    return rows


def resultant(p, q, var: str) -> MultiPoly:
    """Sylvester resultant of ``p`` and ``q`` with respect to ``var``."""
    p, q = MultiPoly.coerce(p), MultiPoly.coerce(q)
    if not p or not q:
        raise ZeroPolynomial("resultant of a zero polynomial")
    if p.degree(var) <= 0 and q.degree(var) <= 0:
        raise ZeroPolynomial(f"neither polynomial involves {var}")
    return bareiss_det(sylvester_matrix(p, q, var))


def taylor_at_one(h, var: str, k: int) -> MultiPoly:
    """k-th partial derivative in ``var``, evaluated at ``var = 1``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return MultiPoly.coerce(h).diff(var, k).subs({var: 1})


def taylor_list(h, var: str) -> list[MultiPoly]:
    """All nonzero-range Taylor coefficients H^(0..m) at var = 1."""
    h = MultiPoly.coerce(h)
    return [taylor_at_one(h, var, k) for k in range(max(h.degree(var), 0) + 1)]


# ---------------------------------------------------------------------------
# univariate tools

def _utrim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def uevaluate(p, x) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def uderiv(p):
    return [i * c for i, c in enumerate(p)][1:]


def urem(p, q):
    p = [Fraction(c) for c in _utrim(p)]
    q = _utrim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    dq, lq = len(q) - 1, Fraction(q[-1])
    while len(p) - 1 >= dq and p:
        f = p[-1] / lq
        shift = len(p) - 1 - dq
        for i, c in enumerate(q):
            p[shift + i] -= f * c
        p = _utrim(p)
    return p


def sturm_chain(p):
    p = _utrim([Fraction(c) for c in p])
    chain = [p, uderiv(p)]
    while _utrim(chain[-1]):
        r = urem(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-c for c in r])
    return [c for c in chain if _utrim(c)]


def _sign_at(p, x):
    """Sign of p at x; x may be +inf or -inf."""
    p = _utrim(p)
    if not p:
        return 0
    if x == math.inf:
        return 1 if p[-1] > 0 else -1
    if x == -math.inf:
        s = 1 if p[-1] > 0 else -1
        return s if (len(p) - 1) % 2 == 0 else -s
    v = uevaluate(p, x)
    return (v > 0) - (v < 0)


def _variations(chain, x):
    signs = [s for s in (_sign_at(p, x) for p in chain) if s]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def sturm_count(p, lo=None, hi=None) -> int:
    """Number of distinct real roots of p in (lo, hi]; None means infinite."""
    chain = sturm_chain(p)
    lo = -math.inf if lo is None else Fraction(lo)
    hi = math.inf if hi is None else Fraction(hi)
    return _variations(chain, lo) - _variations(chain, hi)


# ---------------------------------------------------------------------------
# domains and certificates

@dataclass(frozen=True)
class Interval:
    lo: Fraction | None = None
    hi: Fraction | None = None
    closed_lo: bool = False
    closed_hi: bool = False

    def __post_init__(self):
        if self.lo is not None:
            object.__setattr__(self, "lo", Fraction(self.lo))
        if self.hi is not None:
            object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo is not None and self.hi is not None and self.lo >= self.hi:
            raise ValueError("empty interval")

    def contains(self, x) -> bool:
        x = Fraction(x)
        if self.lo is not None and (x < self.lo or (x == self.lo and not self.closed_lo)):
            return False
        if self.hi is not None and (x > self.hi or (x == self.hi and not self.closed_hi)):
            return False
        return True


@dataclass(frozen=True)
class DomainBox:
    """Product of intervals, optionally with the joint origin of some variables removed."""

    intervals: tuple
    punctured: tuple = ()

    def __init__(self, intervals: Mapping, punctured: Iterable[str] = ()):
        items = []
        for name, iv in intervals.items():
            if not isinstance(iv, Interval):
                lo, hi = iv
                iv = Interval(lo, hi)
            items.append((name, iv))
        object.__setattr__(self, "intervals", tuple(sorted(items, key=lambda x: _var_key(x[0]))))
        object.__setattr__(self, "punctured", tuple(punctured))

    def __getitem__(self, name) -> Interval:
        for n, iv in self.intervals:
            if n == name:
                return iv
        raise KeyError(name)

    def names(self):
        return tuple(n for n, _ in self.intervals)

    def contains(self, point: Mapping) -> bool:
        if not all(iv.contains(point[n]) for n, iv in self.intervals):
            return False
        if self.punctured and all(point[n] == 0 for n in self.punctured):
            return False
        return True

    def sample(self, rng, count: int, denominator: int = 997):
        """Random rational points of the domain (unbounded sides truncated at 50)."""
        out = []
        while len(out) < count:
            pt = {}
            for n, iv in self.intervals:
                lo = iv.lo if iv.lo is not None else Fraction(-50)
                hi = iv.hi if iv.hi is not None else lo + 50
                pt[n] = lo + (hi - lo) * Fraction(rng.randint(1, denominator - 1), denominator)
            if self.contains(pt):
                out.append(pt)
        return out


@dataclass
class Certificate:
    """Outcome of a positivity or identity proof."""

    claim: str
    method: str
    passed: bool
    details: dict = field(default_factory=dict)
    children: list = field(default_factory=list)

    def to_json(self):
        return {
            "claim": self.claim,
            "method": self.method,
            "passed": self.passed,
            "details": {k: _jsonable(v) for k, v in self.details.items()},
            "children": [c.to_json() for c in self.children],
        }


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, MultiPoly):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


# specialp -----------------------------------------------------------------

def special_poly(lam, c="c", d="d") -> MultiPoly:
    """f(c,d) = c^2 + d^2 - 2c^2d^2 + lam (c^3 d - c d^3)."""
    C, D = MultiPoly.var(c), MultiPoly.var(d)
    return C**2 + D**2 - 2 * C**2 * D**2 + Fraction(lam) * (C**3 * D - C * D**3)


def specialp_proof(lam) -> Certificate:
    """Positivity of the special polynomial on the punctured open square.

    The argument: f is invariant under the order-4 rotation, so restrict to
    c, d >= 0.  On the axes f = c^2 or d^2.  Write A = (u^2+v^2) - f, which
    is homogeneous of degree 4.  On the outer boundary max(u,v) = 1 the
    factorizations f(u,1) = (1-u^2)(1-lam u) and f(1,v) = (1-v^2)(1+lam v)
    are nonnegative, so A <= u^2+v^2 there and scaling by r in (0,1) gives
    r^-2 f(ru, rv) = u^2+v^2 - r^2 A(u,v) > 0.  Each step below is an exact
    check.
    """
    lam = Fraction(lam)
    c, d, u, r = variables("c d u r")
    f = special_poly(lam)
    steps = []

    def step(name, ok, **info):
        steps.append(Certificate(name, "exact", bool(ok), info))
        return ok

    step("rotation invariance f(c,d)=f(-d,c)", f.subs({"c": -d, "d": c}) == f)
    step("axis values f(c,0)=c^2", f.subs({"d": 0}) == c**2)
    A = c**2 + d**2 - f
    step("A homogeneous of degree 4",
         A.subs({"c": r * c, "d": r * d}) == r**4 * A)
    step("f(u,1) = (1-u^2)(1-lam u)", f.subs({"c": u, "d": 1}) == (1 - u**2) * (1 - lam * u))
    step("f(1,u) = (1-u^2)(1+lam u)", f.subs({"c": 1, "d": u}) == (1 - u**2) * (1 + lam * u))
    # linear factors 1 -/+ lam u are nonnegative on [0,1] iff they are at the endpoints
    ok = step("1 - lam u >= 0 on [0,1]", 1 - lam >= 0, value_at_1=1 - lam)
    ok &= step("1 + lam u >= 0 on [0,1]", 1 + lam >= 0, value_at_1=1 + lam)
    step("scaling identity r^-2 f(ru,rv) = u^2+v^2 - r^2 A(u,v)",
         f.subs({"c": r * c, "d": r * d}) == r**2 * (c**2 + d**2) - r**4 * A)
    passed = all(s.passed for s in steps)
    cert = Certificate(f"f_lambda > 0 on (-1,1)^2 minus origin, lambda={lam}",
                       "specialp", passed, {"lambda": lam}, steps)
    if not passed:
        witness = _specialp_witness(lam) if not ok else None
        raise CertificationFailed(f"special polynomial with lambda={lam} not certified",
                                  witness=witness)
    return cert


def _specialp_witness(lam):
    f = special_poly(lam)
    best = None
    for i, j in itertools.product(range(-19, 20), repeat=2):
        pt = {"c": Fraction(i, 20), "d": Fraction(j, 20)}
        if i == j == 0:
            continue
        v = f.evaluate(pt)
        if best is None or v < best[1]:
            best = (pt, v)
    return best[0] if best and best[1] <= 0 else None


def match_special(p: MultiPoly, c="c", d="d"):
    """Return (kappa, lam) with p = kappa * f_lam(c,d), or None."""
    if not set(p.free_vars()) <= {c, d} or p.is_zero():
        return None
    f0 = special_poly(0, c, d)
    g = special_poly(1, c, d) - f0
    kappa = p.coeff(c, 2).coeff(d, 0)
    if kappa.is_zero():
        return None
    kappa = kappa.constant_value()
    mu = p.coeff(c, 3).coeff(d, 1)
    mu = mu.constant_value() if mu else Fraction(0)
    if p != kappa * f0 + mu * g:
        return None
    return kappa, mu / kappa


# positivity ---------------------------------------------------------------

def positivity_check(p, domain: DomainBox, strict: bool = True, decomposition=None,
                     max_depth: int = 20, max_cells: int = 200_000) -> Certificate:
    """Prove p > 0 (or p >= 0) on ``domain``; raises CertificationFailed.

    Methods are tried in order: nonnegative coefficients after shifting each
    variable to its lower bound, recognized decompositions (special
    polynomial instances or a caller-supplied sum of products), and finally
    centered-form interval bounds with bisection.
    """
    p = MultiPoly.coerce(p)
    claim = f"{p} {'>' if strict else '>='} 0"
    for name in p.free_vars():
        if name not in domain.names():
            raise ValueError(f"domain does not constrain variable {name}")

    cert = _shift_method(p, domain, strict)
    if cert:
        cert.claim = claim
        return cert

    if decomposition is not None:
        return _decomposition_method(p, domain, strict, decomposition, claim)

    cert = _special_method(p, domain, strict)
    if cert:
        cert.claim = claim
        return cert

    return _subdivision_method(p, domain, strict, claim, max_depth, max_cells)


def _shift_method(p, domain, strict):
    """Nonnegative coefficients after moving each variable to an endpoint.

    Each variable is written as lo + w or hi - w with w >= 0; every choice of
    side is tried.
    """
    names = p.free_vars()
    options = []
    for name in names:
        iv = domain[name]
        opts = []
        if iv.lo is not None:
            opts.append(("lo", iv.lo, iv.closed_lo))
        if iv.hi is not None:
            opts.append(("hi", iv.hi, iv.closed_hi))
        if not opts:
            return None
        options.append(opts)
    for choice in itertools.product(*options):
        subs = {}
        closed = set()
        for name, (side, end, is_closed) in zip(names, choice):
            w = MultiPoly.var(name)
            subs[name] = end + w if side == "lo" else end - w
            if is_closed:
                closed.add(name)
        q = p.subs(subs)
        if q.is_zero() or any(c < 0 for c in q.coefficient_values()):
            continue
        if strict and not any(c > 0 and not (set(e) & closed) for e, c in q.terms()):
            continue
        return Certificate("", "shifted-coefficients", True,
                           {"shift": {n: f"{side} {end}" for n, (side, end, _) in zip(names, choice)},
                            "shifted": q})
    return None


def _special_method(p, domain, strict):
    fv = p.free_vars()
    if len(fv) != 2:
        return None
    c, d = fv
    for n in (c, d):
        iv = domain[n]
        if iv.lo is None or iv.hi is None or iv.lo < -1 or iv.hi > 1:
            return None
        if (iv.lo == -1 and iv.closed_lo) or (iv.hi == 1 and iv.closed_hi):
            if strict:
                return None
    if strict:
        origin_in = all(domain[n].contains(0) for n in (c, d))
        if origin_in and set(domain.punctured) != {c, d}:
            return None
    m = match_special(p, c, d)
    if m is None:
        return None
    kappa, lam = m
    if kappa <= 0 or abs(lam) > 1:
        return None
    proof = specialp_proof(lam)
    return Certificate("", "specialp", True, {"kappa": kappa, "lambda": lam}, [proof])


def _decomposition_method(p, domain, strict, decomposition, claim):
    total = MultiPoly.const(0)
    children = []
    for coeff, factors in decomposition:
        coeff = Fraction(coeff)
        if coeff <= 0:
            raise CertificationFailed(f"decomposition coefficient {coeff} is not positive")
        term = MultiPoly.const(coeff)
        for f in factors:
            f = MultiPoly.coerce(f)
            term = term * f
            children.append(positivity_check(f, domain, strict))
        total = total + term
    if total != p:
        raise CertificationFailed("decomposition does not reproduce the polynomial")
    return Certificate(claim, "decomposition", True,
                       {"terms": len(decomposition)}, children)


def _compactify(p, domain):
    """Map every variable onto [0,1] (closed) and return (poly, back-map)."""
    q = p
    back = {}
    for name in p.free_vars():
        iv = domain[name]
        x = MultiPoly.var(name)
        if iv.lo is not None and iv.hi is not None:
            q = q.subs({name: iv.lo + (iv.hi - iv.lo) * x})
            back[name] = ("affine", iv.lo, iv.hi)
        elif iv.lo is not None:
            q = _rational_sub(q, name, iv.lo, +1)
            back[name] = ("ray+", iv.lo, None)
        elif iv.hi is not None:
            q = _rational_sub(q, name, iv.hi, -1)
            back[name] = ("ray-", iv.hi, None)
        else:
            raise CertificationFailed(f"variable {name} unbounded on both sides")
    return q, back


def _rational_sub(q, name, base, direction):
    """Substitute name = base + direction * u/(1-u) and clear (1-u)^deg."""
    deg = q.degree(name)
    u = MultiPoly.var(name)
    out = MultiPoly.const(0)
    for k, ck in enumerate(q.coeffs(name)):
        if ck:
            # (base(1-u) + direction*u)^k (1-u)^(deg-k)
            out = out + ck * (base * (1 - u) + direction * u) ** k * (1 - u) ** (deg - k)
    return out


def _from_unit(name, x, back):
    kind, base, extra = back[name]
    if kind == "affine":
        return base + (extra - base) * x
    if x == 1:
        return None
    off = x / (1 - x)
    return base + off if kind == "ray+" else base - off


def _centered_bounds(q, cell):
    """Lower and upper bounds of q over a box via expansion at its center."""
    mapping = {}
    center = {}
    for name, (lo, hi) in cell.items():
        m = (lo + hi) / 2
        h = (hi - lo) / 2
        center[name] = m
        mapping[name] = m + h * MultiPoly.var(name)
    e = q.subs(mapping)
    lo = hi = Fraction(0)
    for exps, c in e.terms():
        c = Fraction(c)
        if not exps:
            lo += c
            hi += c
        elif all(x % 2 == 0 for x in exps.values()):
            if c > 0:
                hi += c
            else:
                lo += c
        else:
            lo -= abs(c)
            hi += abs(c)
    return lo, hi, center


def _subdivision_method(p, domain, strict, claim, max_depth, max_cells):
    q, back = _compactify(p, domain)
    names = list(q.free_vars())
    if not names:
        v = q.constant_value() if q else Fraction(0)
        ok = v > 0 if strict else v >= 0
        if not ok:
            raise CertificationFailed(f"constant {v} fails", witness={})
        return Certificate(claim, "constant", True, {"value": v})
    stack = [({n: (Fraction(0), Fraction(1)) for n in names}, 0)]
    leaves = 0
    min_lower = None
    while stack:
        cell, depth = stack.pop()
        lo, _, center = _centered_bounds(q, cell)
        if lo > 0 or (not strict and lo >= 0):
            leaves += 1
            min_lower = lo if min_lower is None else min(min_lower, lo)
            if leaves > max_cells:
                raise DepthLimit("too many cells")
            continue
        cv = q.evaluate(center)
        if cv < 0 or (strict and cv == 0):
            witness = {}
            for n in names:
                x = _from_unit(n, center[n], back)
                witness[n] = x
            raise CertificationFailed(f"{claim} fails", witness=witness)
        if depth >= max_depth:
            raise DepthLimit(f"subdivision depth {max_depth} exhausted for {claim}")
        widest = max(names, key=lambda n: cell[n][1] - cell[n][0])
        a, b = cell[widest]
        mid = (a + b) / 2
        left = dict(cell)
        left[widest] = (a, mid)
        right = dict(cell)
        right[widest] = (mid, b)
        stack.append((left, depth + 1))
        stack.append((right, depth + 1))
    return Certificate(claim, "interval-subdivision", True,
                       {"leaves": leaves, "min_lower_bound": min_lower,
                        "compactified_degree": q.degree()})


def taylor_certify(h, var: str, lam, domain: DomainBox, **kw) -> Certificate:
    """Certify h >= lam on domain x {var >= 1} by the b = 1 Taylor expansion."""
    h = MultiPoly.coerce(h)
    lam = Fraction(lam)
    m = max(h.degree(var), 0)
    coeffs = taylor_list(h, var)
    children = []
    try:
        children.append(positivity_check(coeffs[0] - lam, domain, strict=False, **kw))
    except CertificationFailed as exc:
        raise CertificationFailed(f"H^(0) >= {lam} fails", witness=exc.witness, index=0)
    for k in range(1, m + 1):
        try:
            children.append(positivity_check(coeffs[k], domain, strict=True, **kw))
        except CertificationFailed as exc:
            raise CertificationFailed(f"H^({k}) > 0 fails", witness=exc.witness, index=k)
    if not taylor_at_one(h, var, m + 1).is_zero():
        raise InternalError("Taylor coefficient beyond the degree is nonzero")
    return Certificate(f"{h} >= {lam} for {var} >= 1", "taylor", True,
                       {"degree": m, "coefficients": [str(c) for c in coeffs]}, children)


# ---------------------------------------------------------------------------
# 3x3 matrices with polynomial entries

def pmat(rows) -> list[list[MultiPoly]]:
    return [[MultiPoly.coerce(x) for x in row] for row in rows]


def pmat_mul(a, b):
    return [[a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j] for j in range(3)]
            for i in range(3)]


def pmat_trace(a) -> MultiPoly:
    return a[0][0] + a[1][1] + a[2][2]


def pmat_det(a) -> MultiPoly:
    return (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))


def pmat_scale(a, s):
    return [[x * s for x in row] for row in a]


def pmat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def pmat_identity():
    return pmat([[1, 0, 0], [0, 1, 0], [0, 0, 1]])


def pmat_eval(a, point):
    return [[x.evaluate(point) for x in row] for row in a]
