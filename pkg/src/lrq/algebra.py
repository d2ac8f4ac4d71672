"""Matrix representations of the supersymmetric Jaynes-Cummings generators
and of spin-j angular momentum.

The doublet basis used everywhere downstream is

    e_up   = |m>   (x) |atom up>
    e_down = |m+k> (x) |atom down>

so that ``Q = (a^dag)^k sigma_-`` has its only entry in the lower-left corner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, RangeError

MAX_FACTORIAL_ARG = 20  # 20! < 2**63
MAX_FOCK_LEVEL = 64


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def comm(a, b):
    return a @ b - b @ a


def anticomm(a, b):
    return a @ b + b @ a


def fro(a) -> float:
    return float(np.linalg.norm(a))


def falling_factorial_ratio(m: int, k: int) -> int:
    """Exact ``(m + k)! / m!``."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if m < 0:
        raise DomainError(f"m must be >= 0, got {m}")
    if m + k > MAX_FACTORIAL_ARG:
        raise RangeError(
            f"(m+k)! with m+k={m + k} exceeds the 64-bit factorial range (m+k <= {MAX_FACTORIAL_ARG})"
        )
    return math.factorial(m + k) // math.factorial(m)


@dataclass(frozen=True)
class SubspaceRep:
    """Generators restricted to one eigenspace of ``N' `` (eigenvalue ``lambda_m``)."""

    m: int
    k: int
    lambda_m: int
    Q: np.ndarray = field(repr=False)
    Q_dag: np.ndarray = field(repr=False)
    sigma_z: np.ndarray = field(repr=False)
    N: np.ndarray = field(repr=False)

    @property
    def sqrt_lambda(self) -> float:
        return math.sqrt(self.lambda_m)

    @property
    def dim(self) -> int:
        return 2


def build_subspace_rep(m: int, k: int) -> SubspaceRep:
    lam = falling_factorial_ratio(m, k)
    s = math.sqrt(lam)
    return SubspaceRep(
        m=m,
        k=k,
        lambda_m=lam,
        Q=_frozen([[0, 0], [s, 0]]),
        Q_dag=_frozen([[0, s], [0, 0]]),
        sigma_z=_frozen(np.diag([1.0, -1.0])),
        N=_frozen(np.diag([m + k / 2, m + k / 2 + 1])),
    )


@dataclass(frozen=True)
class Relation:
    name: str
    residual: float
    passed: bool


def verify_susy_relations(rep: SubspaceRep, tol: float = 1e-12) -> list[Relation]:
    """Check the eleven quasi-algebra identities as matrix equations.

    Each residual is the Frobenius norm of ``lhs - rhs``.
    """
    Q, Qd, sz, N = rep.Q, rep.Q_dag, rep.sigma_z, rep.N
    lam = rep.lambda_m
    one = np.eye(2)
    zero = np.zeros((2, 2))
    checks = [
        ("Q^2=0", Q @ Q, zero),
        ("Qdag^2=0", Qd @ Qd, zero),
        ("[Qdag,Q]=lambda_m*sigma_z", comm(Qd, Q), lam * sz),
        ("{Qdag,Q}=lambda_m", anticomm(Qd, Q), lam * one),
        ("(Qdag-Q)^2=-lambda_m", (Qd - Q) @ (Qd - Q), -lam * one),
        ("[N,Q]=Q", comm(N, Q), Q),
        ("[N,Qdag]=-Qdag", comm(N, Qd), -Qd),
        ("{Q,sigma_z}=0", anticomm(Q, sz), zero),
        ("{Qdag,sigma_z}=0", anticomm(Qd, sz), zero),
        ("[Q,sigma_z]=2Q", comm(Q, sz), 2 * Q),
        ("[Qdag,sigma_z]=-2Qdag", comm(Qd, sz), -2 * Qd),
    ]
    out = []
    for name, lhs, rhs in checks:
        r = fro(lhs - rhs)
        out.append(Relation(name, r, r <= tol))
    return out


@dataclass(frozen=True)
class SpinRep:
    two_j: int
    J_plus: np.ndarray = field(repr=False)
    J_minus: np.ndarray = field(repr=False)
    J3: np.ndarray = field(repr=False)

    @property
    def j(self) -> float:
        return self.two_j / 2

    @property
    def dim(self) -> int:
        return self.two_j + 1

    @property
    def J1(self) -> np.ndarray:
        return (self.J_plus + self.J_minus) / 2

    @property
    def J2(self) -> np.ndarray:
        return (self.J_plus - self.J_minus) / 2j

    @property
    def vector(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.J1, self.J2, self.J3

    @property
    def m_values(self) -> np.ndarray:
        """J3 eigenvalues in basis order: j, j-1, ..., -j."""
        return self.j - np.arange(self.dim)

    def basis_index(self, m: float) -> int:
        idx = self.j - m
        if abs(idx - round(idx)) > 1e-12 or not 0 <= round(idx) < self.dim:
            raise DomainError(f"{m} is not a J3 eigenvalue for j={self.j}")
        return int(round(idx))

    def dot(self, v) -> np.ndarray:
        """``v . J`` for a real 3-vector ``v``."""
        return v[0] * self.J1 + v[1] * self.J2 + v[2] * self.J3


def build_spin_rep(two_j: int) -> SpinRep:
    if two_j < 1:
        raise DomainError(f"two_j must be >= 1, got {two_j}")
    j = two_j / 2
    m = j - np.arange(two_j + 1)
    # <m+1|J+|m> sits just above the diagonal in descending-m order
    jp = np.diag(np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1)), 1)
    return SpinRep(
        two_j=two_j,
        J_plus=_frozen(jp),
        J_minus=_frozen(jp.T),
        J3=_frozen(np.diag(m)),
    )


def verify_spin_relations(rep: SpinRep, tol: float = 1e-12) -> list[Relation]:
    Jp, Jm, J3 = rep.J_plus, rep.J_minus, rep.J3
    j = rep.j
    casimir = rep.J1 @ rep.J1 + rep.J2 @ rep.J2 + J3 @ J3
    checks = [
        ("[J3,J+]=J+", comm(J3, Jp), Jp),
        ("[J3,J-]=-J-", comm(J3, Jm), -Jm),
        ("[J+,J-]=2J3", comm(Jp, Jm), 2 * J3),
        ("J-=J+^dag", Jm, Jp.conj().T),
        ("J^2=j(j+1)", casimir, j * (j + 1) * np.eye(rep.dim)),
    ]
    return [Relation(n, fro(a - b), fro(a - b) <= tol) for n, a, b in checks]


@dataclass(frozen=True)
class FockRep:
    """Fock-truncated generators on the full ``2 (n_max + 1)`` dimensional space.

    Index ``n`` is ``|n, up>`` and index ``n_max + 1 + n`` is ``|n, down>``.
    """

    k: int
    n_max: int
    a: np.ndarray = field(repr=False)
    a_dag: np.ndarray = field(repr=False)
    Q_full: np.ndarray = field(repr=False)
    Q_dag_full: np.ndarray = field(repr=False)
    sigma_z_full: np.ndarray = field(repr=False)
    N_full: np.ndarray = field(repr=False)
    N_prime_full: np.ndarray = field(repr=False)

    @property
    def levels(self) -> int:
        return self.n_max + 1

    def up(self, n: int) -> int:
        return n

    def down(self, n: int) -> int:
        return self.levels + n

    def doublet(self, m: int) -> list[int]:
        return [self.up(m), self.down(m + self.k)]

    def embedded(self, op: np.ndarray, m: int) -> np.ndarray:
        idx = self.doublet(m)
        return op[np.ix_(idx, idx)]

    def safe_projector(self) -> np.ndarray:
        """Projector onto Fock levels ``0..n_max-k`` in both atomic blocks."""
        keep = np.zeros(self.levels)
        keep[: self.n_max - self.k + 1] = 1.0
        return np.diag(np.concatenate([keep, keep]))

    def hamiltonian(self, omega: float, omega0: float, g: complex) -> np.ndarray:
        delta = self.k * omega - omega0
        dim = 2 * self.levels
        return (
            omega * self.N_full
            + (omega - delta) / 2 * self.sigma_z_full
            + g * self.Q_full
            + np.conj(g) * self.Q_dag_full
            - omega / 2 * np.eye(dim)
        )


def build_fock_rep(k: int, n_max: int) -> FockRep:
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if n_max < k:
        raise DomainError(f"n_max={n_max} is smaller than k={k}")
    if n_max > MAX_FOCK_LEVEL:
        raise DomainError(f"n_max={n_max} exceeds {MAX_FOCK_LEVEL}")
    L = n_max + 1
    a = np.diag(np.sqrt(np.arange(1, L)), 1).astype(complex)
    ad = a.conj().T
    adk = np.linalg.matrix_power(ad, k)
    ak = np.linalg.matrix_power(a, k)
    Z = np.zeros((L, L), dtype=complex)
    n = np.arange(L)
    return FockRep(
        k=k,
        n_max=n_max,
        a=_frozen(a),
        a_dag=_frozen(ad),
        Q_full=_frozen(np.block([[Z, Z], [adk, Z]])),
        Q_dag_full=_frozen(np.block([[Z, ak], [Z, Z]])),
        sigma_z_full=_frozen(np.diag(np.concatenate([np.ones(L), -np.ones(L)]))),
        # a a^dag is corrupted at the top level by truncation, so use its spectrum
        N_full=_frozen(np.diag(np.concatenate([n + k / 2, n + 1 - k / 2]))),
        N_prime_full=_frozen(np.block([[ak @ adk, Z], [Z, adk @ ak]])),
    )
