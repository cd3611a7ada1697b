"""Implicit midpoint time stepping with Picard fixed-point solves.

The scheme advances z by solving

    z_new = z + dt * f((z + z_new) / 2)

with plain fixed-point iteration started from z_new = z.  Convergence is
measured on the iterate update in max-norm, relative with absolute
floor 1.  The method is symplectic and preserves quadratic invariants of
linear Hamiltonian systems exactly (up to the Picard tolerance).
"""

import struct
from dataclasses import dataclass

import numpy as np

from ._binio import FileFormatError, read_exact

__all__ = [
    "IntegratorConfig",
    "Trajectory",
    "PicardDivergenceError",
    "midpoint_step",
    "integrate",
    "save_trajectory",
    "load_trajectory",
    "iter_state_chunks",
]

_TRAJ_MAGIC = b"HRTRAJ01"


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 0.01
    t_final: float = 50.0
    picard_tol: float = 1e-12
    picard_max_iter: int = 100

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.picard_tol <= 0:
            raise ValueError("picard_tol must be positive")
        if self.picard_max_iter < 1:
            raise ValueError("picard_max_iter must be at least 1")

    def step_count(self) -> int:
        """Number of steps round(t_final/dt); errors on a fractional count."""
        steps = round(self.t_final / self.dt)
        if abs(self.t_final - steps * self.dt) > 1e-9 * max(1.0, abs(self.t_final)):
            raise ValueError(
                f"t_final={self.t_final} is not an integer multiple of dt={self.dt}"
            )
        return steps


class PicardDivergenceError(RuntimeError):
    """Fixed-point iteration failed to reach the update tolerance."""

    def __init__(self, iterations, residual, step=None):
        self.iterations = iterations
        self.residual = residual
        self.step = step
        where = "" if step is None else f" at step {step}"
        super().__init__(
            f"Picard iteration did not converge{where}: "
            f"residual {residual:.3e} after {iterations} iterations"
        )


class Trajectory:
    """Dense record of an integration: one state row per step, t0 included."""

    def __init__(self, states, times, picard_iters=None):
        states = np.asarray(states, dtype=float)
        times = np.asarray(times, dtype=float)
        if states.ndim != 2 or states.shape[0] != times.shape[0]:
            raise ValueError("states and times must have matching first dimension")
        self.states = states
        self.times = times
        self.dim = states.shape[1]
        self.picard_iters = picard_iters

    def __len__(self):
        return self.states.shape[0]

    @property
    def steps(self) -> int:
        return self.states.shape[0] - 1


def _picard_solve(f, z, dt, tol, max_iter):
    """Solve the midpoint equation; returns (z_new, iterations)."""
    z_new = z
    half = 0.5 * z
    for it in range(1, max_iter + 1):
        z_next = z + dt * f(half + 0.5 * z_new)
        residual = float(np.max(np.abs(z_next - z_new)))
        z_new = z_next
        if residual <= tol * max(1.0, float(np.max(np.abs(z_new)))):
            return z_new, it
    raise PicardDivergenceError(max_iter, residual)


def midpoint_step(f, z, config: IntegratorConfig) -> np.ndarray:
    """Advance one implicit midpoint step of size config.dt."""
    z = np.asarray(z, dtype=float)
    return _picard_solve(f, z, config.dt, config.picard_tol, config.picard_max_iter)[0]


def integrate(f, z0, config: IntegratorConfig, observer=None) -> Trajectory:
    """Integrate z' = f(z) from z0 over round(t_final/dt) midpoint steps.

    The observer, if given, is called after each step as
    observer(step_index, t, state).  Picard failures are re-raised with
    the offending step index attached.
    """
    z0 = np.asarray(z0, dtype=float)
    if not np.all(np.isfinite(z0)):
        raise ValueError("initial state contains non-finite entries")
    steps = config.step_count()
    states = np.empty((steps + 1, z0.shape[0]))
    states[0] = z0
    iters = np.zeros(steps, dtype=np.int64)
    z = z0
    dt = config.dt
    tol = config.picard_tol
    max_iter = config.picard_max_iter
    for k in range(steps):
        try:
            z, iters[k] = _picard_solve(f, z, dt, tol, max_iter)
        except PicardDivergenceError as exc:
            raise PicardDivergenceError(exc.iterations, exc.residual, step=k) from None
        states[k + 1] = z
        if observer is not None:
            observer(k + 1, (k + 1) * dt, z)
    times = np.arange(steps + 1) * dt
    return Trajectory(states, times, picard_iters=iters)


# ---------------------------------------------------------------------------
# Trajectory persistence: little-endian binary, states in row-major order.


def save_trajectory(traj: Trajectory, path, dt=None):
    """Write a trajectory to disk (magic HRTRAJ01, float64 payload)."""
    if dt is None:
        dt = float(traj.times[1] - traj.times[0]) if len(traj) > 1 else 0.0
    header = struct.pack(
        "<8sIQQdd", _TRAJ_MAGIC, 1, traj.dim, len(traj), dt, float(traj.times[0])
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(traj.states, dtype="<f8").tobytes())


def _read_traj_header(fh, path):
    head = read_exact(fh, struct.calcsize("<8sIQQdd"), "trajectory header")
    magic, version, dim, count, dt, t0 = struct.unpack("<8sIQQdd", head)
    if magic != _TRAJ_MAGIC:
        raise FileFormatError(f"{path}: bad magic {magic!r}")
    if version != 1:
        raise FileFormatError(f"{path}: unsupported version {version}")
    if dim == 0 or count == 0 or dim * count > 1 << 40:
        raise FileFormatError(f"{path}: implausible dimensions {dim} x {count}")
    return dim, count, dt, t0


def load_trajectory(path) -> Trajectory:
    with open(path, "rb") as fh:
        dim, count, dt, t0 = _read_traj_header(fh, path)
        payload = read_exact(fh, 8 * dim * count, "state data")
    states = np.frombuffer(payload, dtype="<f8").reshape(count, dim).copy()
    times = t0 + np.arange(count) * dt
    return Trajectory(states, times)


def iter_state_chunks(path, chunk=1024):
    """Stream (start_index, block) pairs of states from a trajectory file."""
    with open(path, "rb") as fh:
        dim, count, _, _ = _read_traj_header(fh, path)
        start = 0
        while start < count:
            m = min(chunk, count - start)
            payload = read_exact(fh, 8 * dim * m, "state data")
            yield start, np.frombuffer(payload, dtype="<f8").reshape(m, dim)
            start += m
