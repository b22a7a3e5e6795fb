"""Repeated-interaction engine: a system qubit colliding with fresh ancillas.

Each collision couples the system (first tensor factor) to one reservoir
ancilla through an excitation-exchange pair Hamiltonian, evolves the pair
unitarily for a time ``tau`` and traces the ancilla out.  Several reservoirs
are combined per collision according to ``EngineConfig.mixing_mode``:

* ``convex``     - rho' = sum_i q_i E_i[rho]  (default)
* ``sequential`` - rho' = E_N[... E_1[rho]]   (list order)
* ``stochastic`` - one E_i drawn per collision with probability q_i

Randomness (stochastic mixing, preparation noise) comes from numpy's PCG64
generator seeded from ``EngineConfig.seed``, so runs are reproducible across
platforms.  Draw order per collision: stochastic channel choice first, then
one uniform noise draw per noisy reservoir in list order (convex/sequential
modes draw noise for every noisy reservoir, stochastic only for the chosen
one).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    IDENTITY_2,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_Z,
    DimensionMismatch,
    dagger,
    expm_skew_hermitian,
    kron,
    partial_trace,
)
from .states import AngleOutOfRange, bloch_to_density, bloch_vector, pure_qubit, validate_density_matrix

DEFAULT_SEED = 0xC0111DE

MIXING_MODES = ("convex", "sequential", "stochastic")


class NonUnitaryPropagator(ValueError):
    """Raised when a collision propagator fails the unitarity check."""


class WeightsNotNormalized(ValueError):
    """Raised when mixture weights are negative, partial or do not sum to one."""


class NoiseNotSupported(ValueError):
    """Raised when a deterministic-only routine receives a random map."""


class SingularSystem(ValueError):
    """Raised when the steady-state linear system has no unique solution."""


@dataclass(frozen=True)
class NoiseSpec:
    """Preparation noise: each collision the ancilla is depolarized by
    epsilon_eff = epsilon + u*eta with u drawn uniformly from [-1, 1]."""

    epsilon: float
    eta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.epsilon) and math.isfinite(self.eta)):
            raise ValueError("noise parameters must be finite")
        if self.eta < 0.0 or self.epsilon - self.eta < 0.0 or self.epsilon + self.eta > 1.0:
            raise ValueError(
                f"need 0 <= epsilon - eta and epsilon + eta <= 1, got epsilon={self.epsilon}, eta={self.eta}"
            )


@dataclass(frozen=True)
class ReservoirSpec:
    """One reservoir species: ancilla state angles, coupling and mixture weight.

    ``weight=None`` means "uniform": either all reservoirs in a set carry
    explicit weights summing to one, or none do.
    """

    theta: float
    coupling: float
    weight: float | None = None
    phi: float = 0.0
    noise: NoiseSpec | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta <= math.pi:
            raise AngleOutOfRange(f"reservoir theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise AngleOutOfRange(f"reservoir phi must lie in [0, 2*pi), got {self.phi}")
        if not math.isfinite(self.coupling) or self.coupling < 0.0:
            raise ValueError(f"coupling must be finite and >= 0, got {self.coupling}")
        if self.weight is not None and not 0.0 <= self.weight <= 1.0:
            raise WeightsNotNormalized(f"weight must lie in [0, 1], got {self.weight}")


@dataclass(frozen=True)
class EngineConfig:
    """Engine parameters.

    ``tau=0`` is accepted (the collision degenerates to the identity map);
    it exists so the singular steady-state branch can be exercised.
    """

    h: float = 1.0
    tau: float = 0.5
    max_collisions: int = 5000
    tol: float = 1e-9
    window: int = 10
    mixing_mode: str = "convex"
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if not math.isfinite(self.h) or not math.isfinite(self.tau) or self.tau < 0.0:
            raise ValueError(f"h must be finite and tau >= 0, got h={self.h}, tau={self.tau}")
        if self.tol <= 0.0 or self.window < 1 or self.max_collisions < self.window:
            raise ValueError(
                f"need tol > 0, window >= 1, max_collisions >= window; got tol={self.tol}, "
                f"window={self.window}, max_collisions={self.max_collisions}"
            )
        if self.mixing_mode not in MIXING_MODES:
            raise ValueError(f"mixing_mode must be one of {MIXING_MODES}, got {self.mixing_mode!r}")


@dataclass
class Trajectory:
    """Per-collision record; row 0 is the initial state, so len = n_used + 1.

    ``fidelity`` is None when no target state was supplied."""

    n: np.ndarray
    sigma_z: np.ndarray
    bloch: np.ndarray
    fidelity: np.ndarray | None

    def __len__(self) -> int:
        return int(self.n.shape[0])


@dataclass
class SteadyStateResult:
    rho_ss: np.ndarray
    sigma_z_ss: float
    p_e: float
    p_g: float
    n_used: int
    converged: bool


def pair_hamiltonian(h: float, j: float) -> np.ndarray:
    """Two-qubit generator: free splitting h/2 on each spin plus an
    excitation-exchange term of strength j (couples |eg> and |ge> only)."""
    free = 0.5 * h * (kron(SIGMA_Z, IDENTITY_2) + kron(IDENTITY_2, SIGMA_Z))
    exchange = j * (kron(SIGMA_MINUS, SIGMA_PLUS) + kron(SIGMA_PLUS, SIGMA_MINUS))
    return free + exchange


def collision_unitary(h: float, j: float, tau: float) -> np.ndarray:
    """Pair propagator exp(-i * pair_hamiltonian(h, j) * tau)."""
    return expm_skew_hermitian(pair_hamiltonian(h, j), tau)


def _unitarity_defect(u: np.ndarray) -> float:
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])))


def _apply_channel(rho_s: np.ndarray, rho_r: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Un-validated collision map Tr_anc[u (rho_s x rho_r) u^dag]."""
    joint = u @ np.kron(rho_s, rho_r) @ u.conj().T
    return np.trace(joint.reshape(2, 2, 2, 2), axis1=1, axis2=3)


def single_collision(rho_s: np.ndarray, rho_r: np.ndarray, u: np.ndarray) -> np.ndarray:
    """One validated collision; CPTP by construction."""
    rho_s = validate_density_matrix(rho_s)
    rho_r = validate_density_matrix(rho_r)
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise DimensionMismatch(f"propagator must be 4x4, got {u.shape}")
    defect = _unitarity_defect(u)
    if defect > 1e-12:
        raise NonUnitaryPropagator(f"unitarity defect {defect:.3e} exceeds 1e-12")
    out = partial_trace(u @ kron(rho_s, rho_r) @ dagger(u), keep=0)
    return out


def noisy_reservoir_state(spec: ReservoirSpec, rng: np.random.Generator) -> np.ndarray:
    """Fresh ancilla state; with noise, a depolarized copy of the pure state."""
    base = pure_qubit(spec.theta, spec.phi)
    if spec.noise is None:
        return base
    eps = spec.noise.epsilon + rng.uniform(-1.0, 1.0) * spec.noise.eta
    return (1.0 - eps) * base + 0.5 * eps * IDENTITY_2


def resolve_weights(reservoirs: list[ReservoirSpec]) -> np.ndarray:
    """Mixture weights as an array; uniform when none are given."""
    if not reservoirs:
        raise WeightsNotNormalized("reservoir list is empty")
    given = [r.weight for r in reservoirs]
    if all(w is None for w in given):
        return np.full(len(reservoirs), 1.0 / len(reservoirs))
    if any(w is None for w in given):
        raise WeightsNotNormalized("either all reservoirs carry weights or none do")
    weights = np.array([float(w) for w in given])
    if abs(float(weights.sum()) - 1.0) > 1e-12:
        raise WeightsNotNormalized(f"weights sum to {weights.sum()!r}, expected 1")
    return weights


def _channel_superop(rho_r: np.ndarray, u: np.ndarray) -> np.ndarray:
    """4x4 matrix acting on row-major vec(rho); exact compile of the channel."""
    s = np.empty((4, 4), dtype=complex)
    basis = np.zeros((2, 2), dtype=complex)
    for k in range(4):
        basis.flat[k] = 1.0
        s[:, k] = _apply_channel(basis, rho_r, u).reshape(4)
        basis.flat[k] = 0.0
    return s


def _successive_distance(prev: np.ndarray, cur: np.ndarray) -> float:
    """trace_distance between two vectorized 2x2 states, closed form."""
    a = (cur[0] - prev[0]).real
    d = (cur[3] - prev[3]).real
    b = cur[1] - prev[1]
    center = 0.5 * (a + d)
    rad = math.sqrt(0.25 * (a - d) * (a - d) + (b.real * b.real + b.imag * b.imag))
    return 0.5 * (abs(center + rad) + abs(center - rad))


def _canonical_order(reservoirs: list[ReservoirSpec], weights: np.ndarray) -> list[int]:
    # Summing the convex mixture in a canonical order makes the trajectory
    # bitwise invariant under permutations of the reservoir list.
    key = lambda i: (reservoirs[i].theta, reservoirs[i].coupling, float(weights[i]), reservoirs[i].phi)
    return sorted(range(len(reservoirs)), key=key)


class _Engine:
    """Per-run compiled form of the collision map shared by step and evolve."""

    def __init__(self, reservoirs: list[ReservoirSpec], cfg: EngineConfig):
        self.reservoirs = reservoirs
        self.cfg = cfg
        self.weights = resolve_weights(reservoirs)
        self.units = [collision_unitary(cfg.h, r.coupling, cfg.tau) for r in reservoirs]
        for u in self.units:
            defect = _unitarity_defect(u)
            if defect > 1e-12:
                raise NonUnitaryPropagator(f"unitarity defect {defect:.3e} exceeds 1e-12")
        self.base_ops = [
            _channel_superop(pure_qubit(r.theta, r.phi), u) for r, u in zip(reservoirs, self.units)
        ]
        # Preparation noise is affine in the depolarization strength, so each
        # noisy channel is S_base + eps * (S_maximally_mixed - S_base).
        half = 0.5 * IDENTITY_2
        self.noise_ops = [
            _channel_superop(half, u) - s if r.noise is not None else None
            for r, u, s in zip(reservoirs, self.units, self.base_ops)
        ]
        self.noisy = any(r.noise is not None for r in reservoirs)
        self.random = self.noisy or cfg.mixing_mode == "stochastic"
        self.cum_weights = np.cumsum(self.weights)

        self.static_op = None
        if not self.random:
            if cfg.mixing_mode == "convex":
                acc = np.zeros((4, 4), dtype=complex)
                for i in _canonical_order(reservoirs, self.weights):
                    acc = acc + self.weights[i] * self.base_ops[i]
                self.static_op = acc
            elif cfg.mixing_mode == "sequential":
                acc = np.eye(4, dtype=complex)
                for op in self.base_ops:
                    acc = op @ acc
                self.static_op = acc

    def _noisy_channel(self, i: int, rng: np.random.Generator) -> np.ndarray:
        op = self.base_ops[i]
        if self.reservoirs[i].noise is None:
            return op
        noise = self.reservoirs[i].noise
        eps = noise.epsilon + rng.uniform(-1.0, 1.0) * noise.eta
        return op + eps * self.noise_ops[i]

    def advance(self, vec: np.ndarray, rng: np.random.Generator | None) -> np.ndarray:
        if self.static_op is not None:
            return self.static_op @ vec
        mode = self.cfg.mixing_mode
        if mode == "stochastic":
            i = int(np.searchsorted(self.cum_weights, rng.random(), side="right"))
            i = min(i, len(self.reservoirs) - 1)
            return self._noisy_channel(i, rng) @ vec
        if mode == "sequential":
            for i in range(len(self.reservoirs)):
                vec = self._noisy_channel(i, rng) @ vec
            return vec
        out = np.zeros(4, dtype=complex)
        for i in range(len(self.reservoirs)):
            out += self.weights[i] * (self._noisy_channel(i, rng) @ vec)
        return out


def step(
    rho_s: np.ndarray,
    reservoirs: list[ReservoirSpec],
    cfg: EngineConfig,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Apply one full collision round to ``rho_s`` and return the new state."""
    rho_s = validate_density_matrix(rho_s)
    if rho_s.shape != (2, 2):
        raise DimensionMismatch(f"system state must be 2x2, got {rho_s.shape}")
    engine = _Engine(reservoirs, cfg)
    if engine.random and rng is None:
        rng = np.random.default_rng(cfg.seed)
    return engine.advance(rho_s.reshape(4).astype(complex), rng).reshape(2, 2)


def evolve(
    rho0: np.ndarray | None,
    reservoirs: list[ReservoirSpec],
    cfg: EngineConfig,
    target: np.ndarray | None = None,
    record: bool = True,
    rng: np.random.Generator | None = None,
) -> tuple[Trajectory, SteadyStateResult]:
    """Iterate collisions until the state settles or the budget runs out.

    Convergence means trace_distance(rho_{n+1}, rho_n) < cfg.tol for
    cfg.window consecutive collisions; running out of collisions is reported
    through ``converged=False``, never raised.  ``rho0=None`` starts from
    the +x eigenstate.  With ``record=False`` the returned trajectory is
    empty (sweeps use this; it changes nothing about the result).
    """
    if rho0 is None:
        rho0 = pure_qubit(math.pi / 2.0)
    rho0 = validate_density_matrix(rho0)
    if rho0.shape != (2, 2):
        raise DimensionMismatch(f"system state must be 2x2, got {rho0.shape}")
    if target is not None:
        target = validate_density_matrix(target)

    engine = _Engine(reservoirs, cfg)
    if engine.random and rng is None:
        rng = np.random.default_rng(cfg.seed)

    if record:
        sigma_z = np.empty(cfg.max_collisions + 1)
        bloch = np.empty((cfg.max_collisions + 1, 3))
        fid = np.empty(cfg.max_collisions + 1) if target is not None else None
    if target is not None:
        t00 = target[0, 0].real
        t11 = target[1, 1].real
        t01 = complex(target[0, 1])
        det_t = max(float(np.linalg.det(target).real), 0.0)

    def observe(idx: int, vec: np.ndarray) -> None:
        if not record:
            return
        sigma_z[idx] = vec[0].real - vec[3].real
        bloch[idx, 0] = 2.0 * vec[1].real
        bloch[idx, 1] = -2.0 * vec[1].imag
        bloch[idx, 2] = vec[0].real - vec[3].real
        if fid is not None:
            overlap = (vec[0] * t00 + vec[1] * t01.conjugate() + vec[2] * t01 + vec[3] * t11).real
            det_r = max((vec[0] * vec[3] - vec[1] * vec[2]).real, 0.0)
            val = overlap + 2.0 * math.sqrt(det_r * det_t)
            fid[idx] = math.sqrt(min(max(val, 0.0), 1.0))

    vec = rho0.reshape(4).astype(complex)
    observe(0, vec)
    consecutive = 0
    converged = False
    n_used = 0
    for n in range(1, cfg.max_collisions + 1):
        new = engine.advance(vec, rng)
        dist = _successive_distance(vec, new)
        vec = new
        observe(n, vec)
        n_used = n
        if dist < cfg.tol:
            consecutive += 1
            if consecutive >= cfg.window:
                converged = True
                break
        else:
            consecutive = 0

    rho_ss = vec.reshape(2, 2).copy()
    p_e = float(rho_ss[0, 0].real)
    p_g = float(rho_ss[1, 1].real)
    result = SteadyStateResult(rho_ss, p_e - p_g, p_e, p_g, n_used, converged)
    if record:
        stop = n_used + 1
        trajectory = Trajectory(
            np.arange(stop),
            sigma_z[:stop].copy(),
            bloch[:stop].copy(),
            fid[:stop].copy() if fid is not None else None,
        )
    else:
        trajectory = Trajectory(np.arange(0), np.empty(0), np.empty((0, 3)), None)
    return trajectory, result


def affine_representation(
    reservoirs: list[ReservoirSpec], cfg: EngineConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Bloch-space form b' = M b + c of one deterministic collision round.

    Probes the step map on I/2 and the three states (I + sigma_k)/2; refuses
    random maps (preparation noise, stochastic mixing) since they have no
    single affine form.
    """
    if any(r.noise is not None for r in reservoirs):
        raise NoiseNotSupported("affine form undefined under preparation noise")
    if cfg.mixing_mode == "stochastic":
        raise NoiseNotSupported("affine form undefined for stochastic mixing")
    half = 0.5 * IDENTITY_2
    c = bloch_vector(step(half, reservoirs, cfg))
    m = np.empty((3, 3))
    paulis = (
        np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
        np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
        np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
    )
    for k, pauli in enumerate(paulis):
        m[:, k] = bloch_vector(step(half + 0.5 * pauli, reservoirs, cfg)) - c
    return m, c


def steady_state_oracle(reservoirs: list[ReservoirSpec], cfg: EngineConfig) -> SteadyStateResult:
    """Steady state from the affine fixed point (I - M) b = c.

    Independent of the iterated route: no collisions are performed, the
    linear system is solved directly.  Degenerate maps (tau = 0, zero
    couplings) leave (I - M) singular and raise SingularSystem.
    """
    m, c = affine_representation(reservoirs, cfg)
    a = np.eye(3) - m
    # The Bloch map has norm <= 1, so I - M lives on an O(1) scale and an
    # absolute singular-value floor is the honest degeneracy test (a relative
    # condition number is blind to I - M collapsing to epsilon * identity).
    if float(np.linalg.svd(a, compute_uv=False)[-1]) < 1e-12:
        raise SingularSystem("I - M is singular; the collision map has no unique fixed point")
    b = np.linalg.solve(a, c)
    rho_ss = bloch_to_density(b)
    validate_density_matrix(rho_ss)
    p_e = float(rho_ss[0, 0].real)
    p_g = float(rho_ss[1, 1].real)
    return SteadyStateResult(rho_ss, p_e - p_g, p_e, p_g, 0, True)
