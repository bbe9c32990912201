"""Problem data, transmission-parameter families, and the interface symbol.

The model problem is the complex diffusion equation

    lap(u) - (eta - i*eps) u = f

on a rectangle decomposed into J vertical strips of width L with overlap
delta, homogeneous Dirichlet walls at top and bottom.  Expanding in
sin(k*y) modes, k = m*pi/Lhat, reduces every question about the Schwarz
iteration to one-dimensional two-point problems governed by the symbol
lambda(k) = sqrt(k^2 + eta - i*eps), root taken with positive real part.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "OuterBC",
    "ProblemParams",
    "Robin1",
    "Robin2",
    "Ventcell1",
    "Ventcell2",
    "TransmissionParams",
    "FrequencyGrid",
    "DegenerateSymbolWarning",
    "lambda_symbol",
    "lambda_array",
    "effective_p",
    "effective_pq",
    "subdomain_set",
    "frequency_grid",
    "problem_to_json",
    "problem_from_json",
    "transmission_to_json",
    "transmission_from_json",
]


class DegenerateSymbolWarning(UserWarning):
    """Raised as a warning when lambda(k) degenerates to zero (pure Laplace, k=0)."""


@dataclass(frozen=True)
class OuterBC:
    """Boundary condition on the left/right walls of the global strip domain.

    kind is "dirichlet" or "robin"; the Robin variant carries the two
    coefficients p_a (left wall) and p_b (right wall).
    """

    kind: str = "dirichlet"
    p_a: float | None = None
    p_b: float | None = None

    def __post_init__(self):
        if self.kind not in ("dirichlet", "robin"):
            raise ValueError(f"unknown outer boundary kind {self.kind!r}")
        if self.kind == "robin":
            if self.p_a is None or self.p_b is None or self.p_a <= 0 or self.p_b <= 0:
                raise ValueError("robin outer boundary requires p_a > 0 and p_b > 0")

    @classmethod
    def dirichlet(cls):
        return cls("dirichlet")

    @classmethod
    def robin(cls, p_a, p_b):
        return cls("robin", float(p_a), float(p_b))


@dataclass(frozen=True)
class ProblemParams:
    """Physical and geometric data shared by every module.

    eta, epsilon: zeroth-order coefficient eta - i*epsilon (both >= 0; the
        Laplace case eta = epsilon = 0 is allowed since the analysis grid
        starts at k_min = pi/Lhat > 0).
    L: strip (subdomain) width, Lhat: transverse height, J >= 2 strips,
    delta: overlap width with 0 < delta < L.
    """

    eta: float
    epsilon: float
    L: float
    Lhat: float
    J: int
    delta: float
    outer_bc: OuterBC = OuterBC.dirichlet()

    def __post_init__(self):
        if self.eta < 0 or self.epsilon < 0:
            raise ValueError("eta and epsilon must be nonnegative")
        if self.L <= 0 or self.Lhat <= 0:
            raise ValueError("L and Lhat must be positive")
        if self.J < 2:
            raise ValueError("need at least two subdomains")
        if not 0 < self.delta < self.L:
            raise ValueError("overlap must satisfy 0 < delta < L")

    @property
    def k_min(self):
        return math.pi / self.Lhat

    def with_delta(self, delta):
        return ProblemParams(self.eta, self.epsilon, self.L, self.Lhat,
                             self.J, delta, self.outer_bc)


@dataclass(frozen=True)
class Robin1:
    """One-sided Robin transmission: du/dn + p u on both sides of every interface."""

    p: float

    family = "robin1"

    def __post_init__(self):
        if self.p <= 0:
            raise ValueError("p must be positive")


@dataclass(frozen=True)
class Robin2:
    """Two-sided Robin transmission with alternating coefficient sets p1, p2."""

    p1: float
    p2: float

    family = "robin2"

    def __post_init__(self):
        if self.p1 <= 0 or self.p2 <= 0:
            raise ValueError("p1 and p2 must be positive")


@dataclass(frozen=True)
class Ventcell1:
    """One-sided second-order transmission: du/dn + p u - q d2u/dtau2."""

    p: float
    q: float

    family = "ventcell1"

    def __post_init__(self):
        if self.p <= 0:
            raise ValueError("p must be positive")
        if self.q < 0:
            raise ValueError("q must be nonnegative")


@dataclass(frozen=True)
class Ventcell2:
    """Two-sided second-order transmission with alternating sets (p1,q1), (p2,q2)."""

    p1: float
    q1: float
    p2: float
    q2: float

    family = "ventcell2"

    def __post_init__(self):
        if self.p1 <= 0 or self.p2 <= 0:
            raise ValueError("p1 and p2 must be positive")
        if self.q1 < 0 or self.q2 < 0:
            raise ValueError("q1 and q2 must be nonnegative")


TransmissionParams = Robin1 | Robin2 | Ventcell1 | Ventcell2

FAMILY_NAMES = ("robin1", "robin2", "ventcell1", "ventcell2")


@dataclass(frozen=True)
class FrequencyGrid:
    """Transverse Fourier modes k_m = m*pi/Lhat, m = 1..M (M ~ 1/h)."""

    Lhat: float
    M: int

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("grid needs at least one mode")

    @property
    def k_min(self):
        return math.pi / self.Lhat

    @property
    def k_max(self):
        return self.M * math.pi / self.Lhat

    @property
    def samples(self):
        return np.arange(1, self.M + 1) * (math.pi / self.Lhat)


def lambda_array(k, eta, epsilon):
    """Vectorized sqrt(k^2 + eta - i*epsilon) with positive real part.

    The principal square root already has Re >= 0 for our right-half-plane
    arguments; entries with Re < 0 (cannot occur for epsilon >= 0, guarded
    anyway) are negated.
    """
    k = np.asarray(k, dtype=float)
    val = np.sqrt(k.astype(complex) ** 2 + complex(eta, -epsilon))
    return np.where(val.real < 0, -val, val)


def lambda_symbol(k, params):
    """Interface symbol lambda(k) = sqrt(k^2 + eta - i*eps), Re lambda > 0.

    At k^2 + eta = 0 with eps = 0 the symbol degenerates to zero; a
    DegenerateSymbolWarning is emitted and 0 returned.
    """
    if k < 0:
        raise ValueError("frequency must be nonnegative")
    if k * k + params.eta == 0.0 and params.epsilon == 0.0:
        warnings.warn("degenerate symbol: k^2 + eta = 0 and epsilon = 0",
                      DegenerateSymbolWarning)
        return 0j
    return complex(lambda_array(np.array([k]), params.eta, params.epsilon)[0])


def _sets(tp):
    """The two coefficient sets (p, q) of a family; one-sided families repeat theirs."""
    if isinstance(tp, Robin1):
        return (tp.p, 0.0), (tp.p, 0.0)
    if isinstance(tp, Robin2):
        return (tp.p1, 0.0), (tp.p2, 0.0)
    if isinstance(tp, Ventcell1):
        return (tp.p, tp.q), (tp.p, tp.q)
    if isinstance(tp, Ventcell2):
        return (tp.p1, tp.q1), (tp.p2, tp.q2)
    raise TypeError(f"not a transmission-parameter family: {tp!r}")


def effective_pq(tp, side):
    """(p, q) pair seen by one side of an interface.

    Side "plus" carries set 1 and side "minus" set 2, the convention for an
    odd-numbered interface; even interfaces swap, which is what
    subdomain_set() encodes.
    """
    s1, s2 = _sets(tp)
    if side == "plus":
        return s1
    if side == "minus":
        return s2
    raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")


def effective_p(tp, side, k):
    """Frequency-dependent transmission coefficient p + k^2 q for one side."""
    if k < 0:
        raise ValueError("frequency must be nonnegative")
    p, q = effective_pq(tp, side)
    return p + k * k * q


def subdomain_set(tp, j):
    """(p, q) pair used on both boundaries of subdomain j.

    Interfaces are numbered 1..J-1; on interface i the plus side (owned by
    subdomain i) carries set 1 when i is odd and set 2 when i is even, the
    minus side the other set.  Unwinding both interfaces of subdomain j
    assigns set 1 to odd j and set 2 to even j.
    """
    s1, s2 = _sets(tp)
    return s1 if j % 2 == 1 else s2


def frequency_grid(params, h):
    """Analysis grid with M = ceil(Lhat/h) modes; errors when h >= Lhat."""
    if h <= 0:
        raise ValueError("mesh size must be positive")
    if h >= params.Lhat:
        raise ValueError("mesh coarser than domain")
    return FrequencyGrid(Lhat=params.Lhat, M=math.ceil(params.Lhat / h))


# ---------------------------------------------------------------------------
# JSON round trips


def problem_to_json(pp):
    bc = {"type": pp.outer_bc.kind}
    if pp.outer_bc.kind == "robin":
        bc["p_a"] = pp.outer_bc.p_a
        bc["p_b"] = pp.outer_bc.p_b
    doc = {"eta": pp.eta, "epsilon": pp.epsilon, "L": pp.L, "Lhat": pp.Lhat,
           "J": pp.J, "delta": pp.delta, "outer_bc": bc}
    return json.dumps(doc)


def problem_from_json(text):
    doc = json.loads(text) if isinstance(text, str) else dict(text)
    bc = doc.get("outer_bc", {"type": "dirichlet"})
    kind = bc.get("type", "dirichlet")
    if kind == "dirichlet":
        outer = OuterBC.dirichlet()
    elif kind == "robin":
        outer = OuterBC.robin(bc["p_a"], bc["p_b"])
    else:
        raise ValueError(f"unknown outer_bc type {kind!r}")
    return ProblemParams(eta=float(doc["eta"]), epsilon=float(doc["epsilon"]),
                         L=float(doc["L"]), Lhat=float(doc["Lhat"]),
                         J=int(doc["J"]), delta=float(doc["delta"]),
                         outer_bc=outer)


def transmission_to_json(tp):
    if isinstance(tp, Robin1):
        doc = {"family": "robin1", "p": tp.p}
    elif isinstance(tp, Robin2):
        doc = {"family": "robin2", "p1": tp.p1, "p2": tp.p2}
    elif isinstance(tp, Ventcell1):
        doc = {"family": "ventcell1", "p": tp.p, "q": tp.q}
    elif isinstance(tp, Ventcell2):
        doc = {"family": "ventcell2", "p1": tp.p1, "q1": tp.q1,
               "p2": tp.p2, "q2": tp.q2}
    else:
        raise TypeError(f"not a transmission-parameter family: {tp!r}")
    return json.dumps(doc)


def transmission_from_json(text):
    doc = json.loads(text) if isinstance(text, str) else dict(text)
    family = doc["family"]
    if family == "robin1":
        return Robin1(p=float(doc["p"]))
    if family == "robin2":
        return Robin2(p1=float(doc["p1"]), p2=float(doc["p2"]))
    if family == "ventcell1":
        return Ventcell1(p=float(doc["p"]), q=float(doc["q"]))
    if family == "ventcell2":
        return Ventcell2(p1=float(doc["p1"]), q1=float(doc["q1"]),
                         p2=float(doc["p2"]), q2=float(doc["q2"]))
    raise ValueError(f"unknown family {family!r}")
