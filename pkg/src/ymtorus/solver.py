"""Gradient-descent search for discrete Yang-Mills connections.

Minimizes the squared Frobenius norm of the selected residual over the
su(2) coordinates of the connection.  The parametrization is linear in the
coordinates, so iterates stay valid connections with no projection step,
and the objective is a real nonnegative polynomial (the residual
coefficients need not be anti-Hermitian, which is why the Hermitian norm
is used rather than the trace form; the zero sets coincide).

Gradients are central finite differences of the objective; the energy is
polynomial, so this is well-behaved, and an analytic gradient can later
replace it behind the same interface.

Line searches exploit the polynomial structure: the objective restricted
to any ray is a univariate polynomial of degree at most six (the residual
is cubic in the connection), so its global minimizer along the ray is
computable from seven samples.  The backtracking rule uses that minimizer
as the trial step and keeps the Armijo test as the acceptance gate; each
iteration then runs a second improvement-only line search along the
previous displacement direction.  Plain steepest descent zig-zags and
stalls on this objective's flat valleys; the displacement search is what
restores fast convergence (on a quadratic the pair is equivalent to
conjugate gradient) while keeping the accepted objective monotone.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .cochain import TorusGrid
from .errors import ConfigError
from .yang_mills import Connection

_EQUATIONS = ("dstar", "delta")
_STEP_UNDERFLOW = 1e-16
# sampling nodes (in units of the current scale) for the degree-6 fit
_RAY_NODES = np.array([0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0])


class SolveStatus(enum.Enum):
    CONVERGED = "converged"
    ITER_LIMIT = "iter_limit"
    STALLED = "stalled"


@dataclass(frozen=True)
class SolverConfig:
    """Solver hyperparameters.

    init modes: "zero", "random" (su(2) coordinates uniform in
    scale*[-1, 1]^3, deterministic in seed) or "file" (connection JSON at
    init_path).

    step rules: "fixed" applies step_init times the raw gradient
    unconditionally; "backtracking" accepts a step along the normalized
    gradient ray once it passes the sufficient-decrease test
    f_new <= f - armijo_c * t * |grad|, shrinking the trial by ``shrink``
    until it does.  The trial step starts from step_init and thereafter
    from the exact minimizer of the degree-6 restriction of the objective
    to the ray, so the step can grow without bound as the landscape
    flattens.
    """

    n: int = 2
    m: int = 2
    equation: str = "delta"
    init: str = "random"
    scale: float = 0.05
    seed: int = 0
    init_path: str | None = None
    step_rule: str = "backtracking"
    step_init: float = 0.1
    shrink: float = 0.5
    armijo_c: float = 1e-4
    fd_step: float = 1e-6
    tol_residual: float = 1e-10
    max_iters: int = 5000

    def validate(self):
        if self.n < 1 or self.m < 1:
            raise ConfigError(f"grid dimensions must be positive, got {self.n}x{self.m}")
        if self.equation not in _EQUATIONS:
            raise ConfigError(f"equation must be one of {_EQUATIONS}, got {self.equation!r}")
        if self.init not in ("zero", "random", "file"):
            raise ConfigError(f"init must be zero, random or file, got {self.init!r}")
        if self.init == "file" and not self.init_path:
            raise ConfigError("init mode 'file' needs init_path")
        if self.scale <= 0:
            raise ConfigError(f"scale must be positive, got {self.scale}")
        if self.step_rule not in ("fixed", "backtracking"):
            raise ConfigError(f"step_rule must be fixed or backtracking, got {self.step_rule!r}")
        if self.step_init <= 0:
            raise ConfigError(f"step_init must be positive, got {self.step_init}")
        if not 0.0 < self.shrink < 1.0:
            raise ConfigError(f"shrink must lie in (0, 1), got {self.shrink}")
        if not 0.0 < self.armijo_c < 1.0:
            raise ConfigError(f"armijo_c must lie in (0, 1), got {self.armijo_c}")
        if self.fd_step <= 0:
            raise ConfigError(f"fd_step must be positive, got {self.fd_step}")
        if self.tol_residual <= 0:
            raise ConfigError(f"tol_residual must be positive, got {self.tol_residual}")
        if self.max_iters < 0:
            raise ConfigError(f"max_iters must be nonnegative, got {self.max_iters}")


@dataclass(frozen=True)
class TraceRow:
    """One iteration record; ``step`` is the norm of the parameter update
    that produced this iterate (0.0 on the first row)."""

    iteration: int
    objective: float
    grad_norm: float
    step: float


@dataclass
class SolverTrace:
    """Per-iteration diagnostics plus the final status."""

    rows: list[TraceRow] = field(default_factory=list)
    status: SolveStatus = SolveStatus.ITER_LIMIT

    def to_csv(self) -> str:
        lines = ["iter,objective,grad_norm,step"]
        for r in self.rows:
            lines.append(f"{r.iteration},{r.objective!r},{r.grad_norm!r},{r.step!r}")
        return "\n".join(lines) + "\n"


def objective(A: Connection, equation: str = "delta") -> float:
    """Squared Frobenius norm of the selected residual; zero iff it vanishes."""
    if equation not in _EQUATIONS:
        raise ConfigError(f"equation must be one of {_EQUATIONS}, got {equation!r}")
    return kernels.objective(A.flat_coords(), A.grid.n, A.grid.m, equation == "delta")


def gradient_fd(A: Connection, equation: str = "delta", h: float = 1e-6) -> np.ndarray:
    """Central finite-difference gradient of the objective.

    One entry per su(2) coordinate, ordered (k, s, edge, basis)
    lexicographically with k outermost.
    """
    if equation not in _EQUATIONS:
        raise ConfigError(f"equation must be one of {_EQUATIONS}, got {equation!r}")
    if h <= 0:
        raise ConfigError(f"finite-difference step must be positive, got {h}")
    return kernels.gradient_fd(A.flat_coords(), A.grid.n, A.grid.m, equation == "delta", h)


def _initial_coords(cfg: SolverConfig, grid: TorusGrid) -> np.ndarray:
    if cfg.init == "zero":
        return np.zeros(6 * grid.n * grid.m)
    if cfg.init == "random":
        rng = np.random.default_rng(cfg.seed)
        return rng.uniform(-cfg.scale, cfg.scale, size=6 * grid.n * grid.m)
    with open(cfg.init_path, encoding="utf-8") as fh:
        A = Connection.from_json(fh.read())
    if A.grid != grid:
        raise ConfigError(
            f"init file grid {A.grid.n}x{A.grid.m} does not match configured {grid.n}x{grid.m}"
        )
    return np.array(A.flat_coords())


def _ray_minimizer(fun, x, direction, f0, tscale):
    """Global minimizer of the degree-6 restriction t -> fun(x + t*direction).

    Fits the exact polynomial through seven samples (in a scaled variable
    for conditioning), takes the real positive critical points, and keeps
    the best actually-evaluated candidate, so a badly conditioned fit can
    only cost progress, never fabricate it.  One refinement pass re-fits
    around the found minimizer, which matters when the first sampling
    scale dwarfs the true step.  Returns (t, f(x + t*d)) with t = 0 when
    no candidate improves on f0.
    """
    for _ in range(4):
        ys = np.empty(7)
        ys[0] = f0
        finite = True
        for i in range(1, 7):
            ys[i] = fun(x + (tscale * _RAY_NODES[i]) * direction)
            if not np.isfinite(ys[i]):
                finite = False
                break
        if finite:
            break
        tscale *= 0.25
    else:
        return 0.0, f0
    best_t, best_f = 0.0, f0
    for _pass in range(2):
        coef = np.polynomial.polynomial.polyfit(_RAY_NODES, ys, 6)
        roots = np.polynomial.polynomial.polyroots(
            np.polynomial.polynomial.polyder(coef)
        )
        improved = False
        for r in roots:
            if abs(r.imag) > 1e-8 or r.real <= 0.0:
                continue
            t = float(r.real) * tscale
            ft = fun(x + t * direction)
            if ft < best_f:
                best_t, best_f = t, ft
                improved = True
        if not improved or best_t == 0.0 or _pass == 1:
            break
        tscale = best_t / 2.0
        ys[0] = f0
        for i in range(1, 7):
            ys[i] = fun(x + (tscale * _RAY_NODES[i]) * direction)
    return best_t, best_f


def solve(cfg: SolverConfig) -> tuple[Connection, SolverTrace]:
    """Minimize the residual norm; returns the final connection and trace.

    Status is CONVERGED when the objective reaches tol_residual, STALLED
    when backtracking underflows the step below 1e-16 without sufficient
    decrease, and ITER_LIMIT when the budget runs out.  Under the
    backtracking rule the accepted objective sequence is non-increasing.
    Single-threaded and bitwise deterministic for a fixed config and
    kernel backend.
    """
    cfg.validate()
    grid = TorusGrid(cfg.n, cfg.m)
    n, m = grid.n, grid.m
    eq_delta = cfg.equation == "delta"

    def fun(v):
        return kernels.objective(v, n, m, eq_delta)

    x = _initial_coords(cfg, grid)
    f = fun(x)
    trace = SolverTrace()
    update_norm = 0.0
    tscale = cfg.step_init
    x_prev = None
    for it in range(cfg.max_iters + 1):
        # fd probe scales with the iterate so it stays relative
        h = cfg.fd_step * max(1.0, float(np.max(np.abs(x))) if x.size else 1.0)
        g = kernels.gradient_fd(x, n, m, eq_delta, h)
        gn = float(np.sqrt(np.dot(g, g)))
        trace.rows.append(TraceRow(it, f, gn, update_norm))
        if f <= cfg.tol_residual:
            trace.status = SolveStatus.CONVERGED
            break
        if it == cfg.max_iters:
            trace.status = SolveStatus.ITER_LIMIT
            break

        if cfg.step_rule == "fixed":
            x_new = x - cfg.step_init * g
            f_new = fun(x_new)
            update_norm = float(np.linalg.norm(x_new - x))
            x_prev, x, f = x, x_new, f_new
            continue

        if gn == 0.0:
            # flat gradient but objective above tolerance: no ray to search
            trace.status = SolveStatus.STALLED
            break
        d1 = -g / gn
        trial, f_trial = _ray_minimizer(fun, x, d1, f, tscale)
        if trial <= 0.0:
            trial = tscale
            f_trial = fun(x + trial * d1)
        # Armijo acceptance gate along the unit gradient ray
        t = trial
        ft = f_trial
        accepted = False
        while t >= _STEP_UNDERFLOW:
            if ft <= f - cfg.armijo_c * t * gn:
                accepted = True
                break
            t *= cfg.shrink
            ft = fun(x + t * d1)
        if not accepted:
            trace.status = SolveStatus.STALLED
            break
        x_new = x + t * d1
        f_new = ft
        tscale = max(t, 1e-8)
        # improvement-only search along the recent displacement; this is
        # what prevents the zig-zag stall on flat valleys
        if x_prev is not None:
            dm = x_new - x_prev
            ndm = float(np.linalg.norm(dm))
            if ndm > 0.0:
                dm /= ndm
                t2, f2 = _ray_minimizer(fun, x_new, dm, f_new, max(ndm, 1e-8))
                if t2 > 0.0 and f2 < f_new:
                    x_new = x_new + t2 * dm
                    f_new = f2
        update_norm = float(np.linalg.norm(x_new - x))
        x_prev, x, f = x, x_new, f_new
    return Connection.from_coords(grid, x), trace
