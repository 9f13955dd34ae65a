"""Trajectory generation for autonomous and controlled linear systems.

Observations carry optional measurement noise, drawn iid uniform on
``[-M, M]`` per component from a seeded PCG64 generator.  The initial state
is always stored noiseless.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError, TrajectoryOverflowError

OVERFLOW_BOUND = 1e300
PRNG_NAME = "numpy.random.PCG64"


@dataclass(frozen=True)
class LinearSystem:
    A: np.ndarray
    B: Optional[np.ndarray] = None

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionError(f"A must be square, got shape {A.shape}")
        object.__setattr__(self, "A", A)
        if self.B is not None:
            B = np.asarray(self.B, dtype=float)
            if B.ndim == 1:
                B = B.reshape(-1, 1)
            if B.ndim != 2 or B.shape[0] != A.shape[0] or B.shape[1] < 1:
                raise DimensionError(f"B must be {A.shape[0]}xm with m >= 1, got shape {B.shape}")
            object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return 0 if self.B is None else self.B.shape[1]


@dataclass(frozen=True)
class NoiseSpec:
    amplitude: float
    seed: int = 0

    def __post_init__(self):
        if not np.isfinite(self.amplitude) or self.amplitude < 0:
            raise ValueError(f"noise amplitude must be a finite nonnegative number, got {self.amplitude}")


@dataclass(frozen=True)
class PerturbationSpec:
    """Componentwise quadratic perturbation ``epsilon * x_i(k)**2``."""

    epsilon: float

    def __post_init__(self):
        if not np.isfinite(self.epsilon):
            raise ValueError("epsilon must be finite")


@dataclass
class Trajectory:
    """Observed states ``x(0..N)`` with optional inputs ``u(0..N-1)``.

    ``inputs`` may carry one extra row ``u(N)``; it is only consulted by the
    paper-literal kernel expansion of controlled data.  ``clean_states`` holds
    the noiseless states when the trajectory was simulated.
    """

    states: np.ndarray
    inputs: Optional[np.ndarray] = None
    clean_states: Optional[np.ndarray] = None
    noise_amplitude: float = 0.0
    noise_seed: Optional[int] = None
    prng: Optional[str] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        states = np.asarray(self.states, dtype=float)
        if states.ndim == 1:
            states = states.reshape(-1, 1)
        if states.ndim != 2 or states.shape[0] < 2:
            raise DimensionError("a trajectory needs at least two states x(0), x(1)")
        self.states = states
        if self.inputs is not None:
            u = np.asarray(self.inputs, dtype=float)
            if u.ndim == 1:
                u = u.reshape(-1, 1)
            if u.shape[0] not in (self.N, self.N + 1):
                raise DimensionError(
                    f"inputs must have N={self.N} (or N+1) rows, got {u.shape[0]}"
                )
            self.inputs = u
        if self.clean_states is not None:
            self.clean_states = np.asarray(self.clean_states, dtype=float).reshape(states.shape)

    @property
    def N(self) -> int:
        return self.states.shape[0] - 1

    @property
    def n(self) -> int:
        return self.states.shape[1]

    @property
    def m(self) -> int:
        return 0 if self.inputs is None else self.inputs.shape[1]

    def to_csv(self, path=None) -> str:
        """Write ``k,x1..xn[,u1..um]`` rows; floats use shortest round-trip repr."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["k"] + [f"x{i + 1}" for i in range(self.n)]
        header += [f"u{j + 1}" for j in range(self.m)]
        w.writerow(header)
        for k in range(self.N + 1):
            row = [str(k)] + [repr(float(v)) for v in self.states[k]]
            if self.inputs is not None:
                if k < self.inputs.shape[0]:
                    row += [repr(float(v)) for v in self.inputs[k]]
                else:
                    row += [""] * self.m
            w.writerow(row)
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, source) -> "Trajectory":
        """Read a trajectory written by :meth:`to_csv` (path or text)."""
        if isinstance(source, str) and "\n" in source:
            text = source
        else:
            with open(source, newline="") as fh:
                text = fh.read()
        rows = list(csv.reader(io.StringIO(text)))
        header, body = rows[0], [r for r in rows[1:] if r]
        if not header or header[0] != "k":
            raise ValueError("trajectory CSV must start with a 'k' column")
        xcols = [i for i, h in enumerate(header) if h.startswith("x")]
        ucols = [i for i, h in enumerate(header) if h.startswith("u")]
        ks = [int(r[0]) for r in body]
        if ks != list(range(len(body))):
            raise ValueError("trajectory CSV rows must be indexed 0..N in order")
        states = np.array([[float(r[i]) for i in xcols] for r in body])
        inputs = None
        if ucols:
            urows = [[float(r[i]) for i in ucols] for r in body if r[ucols[0]] != ""]
            inputs = np.array(urows)
        return cls(states=states, inputs=inputs)


def sample_noise(spec: NoiseSpec, n: int, count: int) -> np.ndarray:
    """Draw ``count`` noise vectors of dimension ``n`` (shape ``(count, n)``)."""
    if spec.amplitude < 0:
        raise ValueError("negative noise amplitude")
    if n < 1 or count < 0:
        raise ValueError("need n >= 1 and count >= 0")
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    if spec.amplitude == 0:
        return np.zeros((count, n))
    return rng.uniform(-spec.amplitude, spec.amplitude, size=(count, n))


def _check_finite(x: np.ndarray, k: int):
    if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > OVERFLOW_BOUND:
        raise TrajectoryOverflowError(k, OVERFLOW_BOUND)


def _observe(clean: np.ndarray, noise: Optional[NoiseSpec]) -> np.ndarray:
    observed = clean.copy()
    if noise is not None and noise.amplitude > 0:
        observed[1:] += sample_noise(noise, clean.shape[1], clean.shape[0] - 1)
    return observed


def _traj(clean, observed, inputs, noise):
    return Trajectory(
        states=observed,
        inputs=inputs,
        clean_states=clean,
        noise_amplitude=0.0 if noise is None else noise.amplitude,
        noise_seed=None if noise is None else noise.seed,
        prng=None if noise is None else PRNG_NAME,
    )


def simulate_autonomous(
    sys: LinearSystem,
    x0,
    N: int,
    noise: Optional[NoiseSpec] = None,
    perturb: Optional[PerturbationSpec] = None,
) -> Trajectory:
    """Iterate ``x(k+1) = A x(k) + eps * x(k)**2`` for ``k = 0..N-1``."""
    x0 = np.asarray(x0, dtype=float).ravel()
    if x0.shape[0] != sys.n:
        raise DimensionError(f"x0 has dimension {x0.shape[0]}, A is {sys.n}x{sys.n}")
    if N < 1:
        raise ValueError("N must be >= 1")
    eps = 0.0 if perturb is None else perturb.epsilon
    clean = np.empty((N + 1, sys.n))
    clean[0] = x0
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(N):
            x = sys.A @ clean[k]
            if eps != 0.0:
                x = x + eps * clean[k] ** 2
            _check_finite(x, k + 1)
            clean[k + 1] = x
    return _traj(clean, _observe(clean, noise), None, noise)


def simulate_controlled(
    sys: LinearSystem,
    x0,
    u: Sequence,
    noise: Optional[NoiseSpec] = None,
    final_input=None,
) -> Trajectory:
    """Iterate ``x(k+1) = A x(k) + B u(k)``; ``N = len(u)``.

    ``u`` has shape ``(N,)`` or ``(N, m)``.  ``final_input`` optionally
    records ``u(N)``, which does not affect the states.
    """
    if sys.B is None:
        raise DimensionError("simulate_controlled needs an input matrix B")
    x0 = np.asarray(x0, dtype=float).ravel()
    if x0.shape[0] != sys.n:
        raise DimensionError(f"x0 has dimension {x0.shape[0]}, A is {sys.n}x{sys.n}")
    u = np.asarray(u, dtype=float)
    if u.ndim == 1:
        u = u.reshape(-1, 1)
    if u.shape[1] != sys.m:
        raise DimensionError(f"inputs have dimension {u.shape[1]}, B has {sys.m} columns")
    N = u.shape[0]
    if N < 1:
        raise ValueError("need at least one input sample")
    clean = np.empty((N + 1, sys.n))
    clean[0] = x0
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(N):
            x = sys.A @ clean[k] + sys.B @ u[k]
            _check_finite(x, k + 1)
            clean[k + 1] = x
    stored = u
    if final_input is not None:
        stored = np.vstack([u, np.asarray(final_input, dtype=float).reshape(1, -1)])
    return _traj(clean, _observe(clean, noise), stored, noise)
