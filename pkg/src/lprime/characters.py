"""Dirichlet characters modulo q.

A character is stored exactly: every value chi(n) with gcd(n, q) = 1 is the
root of unity exp(2*pi*i*k/E), where E is the exponent of (Z/qZ)* and k is an
integer kept in ``value_exponents``. Non-coprime residues carry -1.

Characters are indexed by the lexicographic order of their exponent vectors
over a fixed generator decomposition of (Z/qZ)*: prime-power factors in
increasing order, and for 2^e with e >= 3 the generator -1 before 5. Index 0
is the principal character.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import DomainError

__all__ = [
    "DirichletCharacter",
    "enumerate_characters",
    "get_character",
    "primitive_characters",
    "chi_eval",
    "gauss_sum",
    "root_number",
    "smallest_nondividing_prime",
    "factorize",
    "is_prime",
]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization as sorted (p, e) pairs."""
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def smallest_nondividing_prime(q: int) -> int:
    """Least prime m with m not dividing q."""
    if q < 3:
        raise DomainError(f"q must be >= 3, got {q}")
    m = 2
    while q % m == 0 or not is_prime(m):
        m += 1
    return m


def _root_of_unity(k: int, order: int) -> complex:
    """exp(2*pi*i*k/order), exact at multiples of a quarter turn."""
    k %= order
    if (4 * k) % order == 0:
        return (1 + 0j, 1j, -1 + 0j, -1j)[(4 * k) // order]
    if 2 * k > order:
        # exact conjugate symmetry: chi-bar gets bitwise conjugated values
        return _root_of_unity(order - k, order).conjugate()
    return cmath.exp(2j * math.pi * k / order)


# ---------------------------------------------------------------------------
# group structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Component:
    modulus: int        # p^e
    generator: int
    order: int
    dlog: dict          # residue mod p^e -> exponent of generator
    sign_split: bool = False  # 2^e, e >= 3: component for -1 (dlog of sign)


def _cyclic_component(pe: int, phi: int) -> _Component:
    for g in range(2, pe):
        if math.gcd(g, pe) != 1:
            continue
        table = {}
        x = 1
        for k in range(phi):
            table[x] = k
            x = x * g % pe
        if len(table) == phi:
            return _Component(pe, g, phi, table)
    raise AssertionError(f"no generator mod {pe}")


def _two_power_components(e: int) -> list[_Component]:
    pe = 2**e
    if e == 1:
        return []
    if e == 2:
        return [_Component(4, 3, 2, {1: 0, 3: 1})]
    sign = {}
    five = {}
    x = 1
    for k in range(2 ** (e - 2)):
        five[x] = k
        five[(-x) % pe] = k
        sign[x] = 0
        sign[(-x) % pe] = 1
        x = x * 5 % pe
    return [
        _Component(pe, pe - 1, 2, sign, sign_split=True),
        _Component(pe, 5, 2 ** (e - 2), five),
    ]


@dataclass(frozen=True)
class _Group:
    q: int
    components: tuple
    exponent: int

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(c.order for c in self.components)

    def dlogs(self, n: int) -> tuple[int, ...]:
        return tuple(c.dlog[n % c.modulus] for c in self.components)


@lru_cache(maxsize=None)
def _group(q: int) -> _Group:
    comps: list[_Component] = []
    for p, e in factorize(q):
        if p == 2:
            comps.extend(_two_power_components(e))
        else:
            pe = p**e
            comps.append(_cyclic_component(pe, pe - pe // p))
    exponent = 1
    for c in comps:
        exponent = exponent * c.order // math.gcd(exponent, c.order)
    return _Group(q, tuple(comps), exponent)


# ---------------------------------------------------------------------------
# characters
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DirichletCharacter:
    """Immutable Dirichlet character mod ``q``.

    ``value_exponents[n]`` is k with chi(n) = exp(2*pi*i*k/root_order), or
    -1 when gcd(n, q) > 1.
    """

    q: int
    index: int
    exponents: tuple[int, ...]
    component_orders: tuple[int, ...]
    root_order: int
    value_exponents: tuple[int, ...]
    conductor: int
    primitive: bool
    parity: int

    @cached_property
    def values(self) -> np.ndarray:
        """Complex value table indexed by residue 0..q-1."""
        return np.array(
            [0j if k < 0 else _root_of_unity(k, self.root_order) for k in self.value_exponents],
            dtype=complex,
        )

    @property
    def kappa(self) -> int:
        return self.parity

    @property
    def is_principal(self) -> bool:
        return all(c == 0 for c in self.exponents)

    @property
    def is_real(self) -> bool:
        return all(k < 0 or (2 * k) % self.root_order == 0 for k in self.value_exponents)

    def __call__(self, n: int) -> complex:
        return chi_eval(self, n)

    def exponent_at(self, n: int) -> int:
        """Exact root-of-unity exponent of chi(n), -1 if chi(n) = 0."""
        return self.value_exponents[n % self.q]

    def conjugate(self) -> "DirichletCharacter":
        conj = tuple((-c) % o for c, o in zip(self.exponents, self.component_orders))
        return get_character(self.q, _lex_index(conj, self.component_orders))

    def __eq__(self, other):
        if not isinstance(other, DirichletCharacter):
            return NotImplemented
        return self.q == other.q and self.index == other.index

    def __hash__(self):
        return hash((self.q, self.index))

    def __repr__(self):
        return (
            f"DirichletCharacter(q={self.q}, index={self.index}, conductor={self.conductor}, "
            f"primitive={self.primitive}, kappa={self.parity})"
        )


def _lex_index(exps: tuple[int, ...], orders: tuple[int, ...]) -> int:
    idx = 0
    for c, o in zip(exps, orders):
        idx = idx * o + c
    return idx


def _conductor(q: int, vexp: tuple[int, ...]) -> int:
    for d in sorted(d for d in range(1, q + 1) if q % d == 0):
        if all(vexp[n] == 0 for n in range(1, q, d) if math.gcd(n, q) == 1):
            return d
    return q


def _build(q: int, exps: tuple[int, ...], index: int) -> DirichletCharacter:
    grp = _group(q)
    E = grp.exponent
    vexp = []
    for n in range(q):
        if math.gcd(n, q) != 1:
            vexp.append(-1)
            continue
        k = sum(c * d * (E // o) for c, d, o in zip(exps, grp.dlogs(n), grp.orders))
        vexp.append(k % E)
    vexp_t = tuple(vexp)
    cond = _conductor(q, vexp_t)
    minus_one = vexp_t[q - 1]
    return DirichletCharacter(
        q=q,
        index=index,
        exponents=exps,
        component_orders=grp.orders,
        root_order=E,
        value_exponents=vexp_t,
        conductor=cond,
        primitive=cond == q,
        parity=0 if minus_one == 0 else 1,
    )


@lru_cache(maxsize=None)
def enumerate_characters(q: int) -> tuple[DirichletCharacter, ...]:
    """All phi(q) characters mod q in lexicographic exponent order."""
    if q < 3:
        raise DomainError(f"q must be >= 3, got {q}")
    grp = _group(q)
    return tuple(
        _build(q, exps, i)
        for i, exps in enumerate(itertools.product(*(range(o) for o in grp.orders)))
    )


def get_character(q: int, index: int) -> DirichletCharacter:
    chars = enumerate_characters(q)
    if not 0 <= index < len(chars):
        raise DomainError(f"character index {index} out of range for q={q} ({len(chars)} characters)")
    return chars[index]


def primitive_characters(q: int) -> list[DirichletCharacter]:
    return [c for c in enumerate_characters(q) if c.primitive]


def chi_eval(chi: DirichletCharacter, n: int) -> complex:
    k = chi.value_exponents[n % chi.q]
    if k < 0:
        return 0j
    return _root_of_unity(k, chi.root_order)


def _require_primitive(chi: DirichletCharacter) -> None:
    if not chi.primitive:
        raise DomainError(f"{chi!r} is not primitive")


def gauss_sum(chi: DirichletCharacter) -> complex:
    """tau(chi) = sum_{a=1}^{q} chi(a) exp(2*pi*i*a/q)."""
    _require_primitive(chi)
    q = chi.q
    return sum(chi_eval(chi, a) * _root_of_unity(a, q) for a in range(1, q + 1))


def root_number(chi: DirichletCharacter) -> complex:
    """epsilon(chi) = tau(chi) / (i^kappa sqrt(q)), a unit complex number."""
    tau = gauss_sum(chi)
    return tau / ((1j) ** chi.parity * math.sqrt(chi.q))
