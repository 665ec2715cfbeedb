"""Optimizers behind a single step interface, plus the run drivers.

The iteratively preconditioned method (IPG) keeps, next to the estimate
x_t, a matrix K_t that is driven toward the shifted inverse Hessian
(H + beta*I)**-1 by a fixed-point iteration instead of an explicit solve:

    step 1:  x_{t+1} = x_t - delta * K_t * g_t
    step 2:  K_{t+1} = K_t - alpha * ((H_t + beta*I) * K_t - I)

with per-iteration scalars chosen from the Hessian spectrum so that
delta <= 1, beta > -lambda_min(H) and alpha < 1/(lambda_max(H) + beta).
Both updates use quantities evaluated at x_t, in that order.  K is not
symmetrized or projected; the beta shift is the only regularization.

Problems passed to the optimizers expose ``value(x)``, ``gradient(x)``
and, for IPG, ``gradient_and_hessian(x)`` (one evaluation serving both).
"""

import time
from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np


class NumericalAbortError(RuntimeError):
    """A step produced non-finite quantities; the run cannot continue."""


# -- single steps --------------------------------------------------------


def gd_step(x: np.ndarray, gradient: np.ndarray, learning_rate: float) -> np.ndarray:
    if learning_rate <= 0:
        raise ValueError("learning rate must be positive")
    return x - learning_rate * gradient


@dataclass(frozen=True)
class IpgSchedule:
    """Scalar schedule for the preconditioner iteration.

    beta is set to max(0, -lambda_min) + beta_margin and alpha to
    alpha_safety / (lambda_max + beta), from an exact symmetric eigensolve
    of the Hessian ("exact") or Gershgorin disc bounds ("gershgorin") for
    larger dimensions.
    """

    delta: float = 1.0
    beta_margin: float = 1e-3
    alpha_safety: float = 0.9
    bounds: str = "exact"

    def __post_init__(self):
        if not 0.0 < self.delta <= 1.0:
            raise ValueError("delta must lie in (0, 1]")
        if self.beta_margin <= 0.0:
            raise ValueError("beta_margin must be positive")
        if not 0.0 < self.alpha_safety < 1.0:
            raise ValueError("alpha_safety must lie in (0, 1)")
        if self.bounds not in ("exact", "gershgorin"):
            raise ValueError("bounds must be 'exact' or 'gershgorin'")


def hessian_eig_bounds(hessian: np.ndarray, method: str = "exact"):
    """(lambda_min, lambda_max) of a symmetric matrix, exact or Gershgorin."""
    h = np.asarray(hessian, dtype=float)
    if not np.all(np.isfinite(h)):
        raise NumericalAbortError("non-finite Hessian")
    if method == "exact":
        eigs = np.linalg.eigvalsh(0.5 * (h + h.T))
        return float(eigs[0]), float(eigs[-1])
    radius = np.sum(np.abs(h), axis=1) - np.abs(np.diag(h))
    diag = np.diag(h)
    return float(np.min(diag - radius)), float(np.max(diag + radius))


def ipg_schedule(hessian: np.ndarray, schedule: IpgSchedule | None = None):
    """(alpha, beta, delta) for one iteration, from the Hessian spectrum."""
    schedule = schedule or IpgSchedule()
    lam_min, lam_max = hessian_eig_bounds(hessian, schedule.bounds)
    beta = max(0.0, -lam_min) + schedule.beta_margin
    alpha = schedule.alpha_safety / (lam_max + beta)
    assert schedule.delta <= 1.0
    assert beta > -lam_min
    assert alpha * (lam_max + beta) < 1.0
    return alpha, beta, schedule.delta


def ipg_step(x, preconditioner, gradient, hessian, alpha, beta, delta):
    """One estimate update followed by one preconditioner update."""
    x = np.asarray(x, dtype=float)
    k = np.asarray(preconditioner, dtype=float)
    eye = np.eye(len(x))
    x_new = x - delta * (k @ gradient)
    k_new = k - alpha * ((hessian + beta * eye) @ k - eye)
    if not (np.all(np.isfinite(x_new)) and np.all(np.isfinite(k_new))):
        raise NumericalAbortError("non-finite IPG update")
    return x_new, k_new


# -- stateful optimizers -------------------------------------------------


class GradientDescent:
    def __init__(self, learning_rate: float = 0.09):
        if learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        self.learning_rate = learning_rate

    def step(self, problem, x: np.ndarray) -> np.ndarray:
        return gd_step(x, problem.gradient(x), self.learning_rate)


class Adam:
    """Bias-corrected first/second moment updates, standard defaults."""

    def __init__(self, learning_rate: float = 0.05, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        if learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self._m = None
        self._v = None
        self._t = 0

    def step(self, problem, x: np.ndarray) -> np.ndarray:
        g = problem.gradient(x)
        if self._m is None:
            self._m = np.zeros_like(g)
            self._v = np.zeros_like(g)
        self._t += 1
        self._m = self.beta1 * self._m + (1.0 - self.beta1) * g
        self._v = self.beta2 * self._v + (1.0 - self.beta2) * g * g
        m_hat = self._m / (1.0 - self.beta1 ** self._t)
        v_hat = self._v / (1.0 - self.beta2 ** self._t)
        return x - self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)


class Lbfgs:
    """Limited-memory BFGS: two-loop recursion with Armijo backtracking.

    Curvature pairs with non-positive s'y are skipped.  When the line
    search fails after ``max_halvings`` halvings the iterate is returned
    unchanged and ``stagnated`` is set (the run keeps going, producing the
    flat cost history typical of a trapped quasi-Newton method).
    """

    def __init__(self, memory: int = 10, armijo_c: float = 1e-4,
                 max_halvings: int = 30):
        if memory < 1:
            raise ValueError("memory must be at least 1")
        self.memory = memory
        self.armijo_c = armijo_c
        self.max_halvings = max_halvings
        self._pairs = deque(maxlen=memory)
        self._prev = None
        self.stagnated = False

    def step(self, problem, x: np.ndarray) -> np.ndarray:
        f0 = float(problem.value(x))
        g = problem.gradient(x)
        if self._prev is not None:
            px, pg = self._prev
            s = x - px
            y = g - pg
            sty = float(s @ y)
            if sty > 0.0:
                self._pairs.append((s, y, 1.0 / sty))
        self._prev = (x.copy(), g.copy())
        if not np.any(g):
            return x
        d = -self._two_loop(g)
        slope = float(g @ d)
        step = 1.0
        for _ in range(self.max_halvings + 1):
            x_new = x + step * d
            if float(problem.value(x_new)) <= f0 + self.armijo_c * step * slope:
                return x_new
            step *= 0.5
        self.stagnated = True
        return x

    def _two_loop(self, g: np.ndarray) -> np.ndarray:
        q = g.copy()
        alphas = []
        for s, y, rho in reversed(self._pairs):
            a = rho * (s @ q)
            alphas.append(a)
            q -= a * y
        if self._pairs:
            s, y, _ = self._pairs[-1]
            q *= (s @ y) / (y @ y)
        for (s, y, rho), a in zip(self._pairs, reversed(alphas)):
            b = rho * (y @ q)
            q += (a - b) * s
        return q


class Ipg:
    """Iteratively preconditioned gradient descent.

    The preconditioner starts as a scaled identity at the inverse scale of
    the first shifted Hessian (so the first move is well-scaled gradient
    descent), or as a plain identity / zero matrix.
    """

    K0_STYLES = ("scaled-identity", "identity", "zero")

    def __init__(self, schedule: IpgSchedule | None = None,
                 k0_style: str = "scaled-identity"):
        if k0_style not in self.K0_STYLES:
            raise ValueError(f"k0_style must be one of {self.K0_STYLES}")
        self.schedule = schedule or IpgSchedule()
        self.k0_style = k0_style
        self.preconditioner = None

    def step(self, problem, x: np.ndarray) -> np.ndarray:
        g, h = problem.gradient_and_hessian(x)
        if not (np.all(np.isfinite(g)) and np.all(np.isfinite(h))):
            raise NumericalAbortError("non-finite gradient or Hessian")
        alpha, beta, delta = ipg_schedule(h, self.schedule)
        if self.preconditioner is None:
            d = len(x)
            if self.k0_style == "scaled-identity":
                # alpha = safety/(lambda_max + beta)  =>  1/(lambda_max + beta)
                self.preconditioner = (alpha / self.schedule.alpha_safety) * np.eye(d)
            elif self.k0_style == "identity":
                self.preconditioner = np.eye(d)
            else:
                self.preconditioner = np.zeros((d, d))
        x_new, k_new = ipg_step(x, self.preconditioner, g, h, alpha, beta, delta)
        self.preconditioner = k_new
        return x_new


# -- run driver ----------------------------------------------------------

ALGORITHMS = ("gd", "adam", "lbfgs", "ipg")

_DEFAULT_LEARNING_RATES = {"gd": 0.09, "adam": 0.05}


@dataclass(frozen=True)
class OptimizerConfig:
    """One optimizer's settings plus the termination rule."""

    algorithm: str
    label: str | None = None
    learning_rate: float | None = None
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    memory: int = 10
    armijo_c: float = 1e-4
    max_halvings: int = 30
    delta: float = 1.0
    beta_margin: float = 1e-3
    alpha_safety: float = 0.9
    eig_bounds: str = "exact"
    k0_style: str = "scaled-identity"
    max_iterations: int = 100
    tolerance: float = 0.0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, "
                             f"got {self.algorithm!r}")
        if self.learning_rate is not None and self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if self.memory < 1:
            raise ValueError("memory must be at least 1")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")

    @property
    def name(self) -> str:
        return self.label or self.algorithm

    def effective_learning_rate(self) -> float:
        if self.learning_rate is not None:
            return self.learning_rate
        return _DEFAULT_LEARNING_RATES.get(self.algorithm, 0.05)

    def build(self):
        if self.algorithm == "gd":
            return GradientDescent(self.effective_learning_rate())
        if self.algorithm == "adam":
            return Adam(self.effective_learning_rate(), self.beta1, self.beta2, self.eps)
        if self.algorithm == "lbfgs":
            return Lbfgs(self.memory, self.armijo_c, self.max_halvings)
        return Ipg(IpgSchedule(self.delta, self.beta_margin, self.alpha_safety,
                               self.eig_bounds), self.k0_style)

    def to_dict(self) -> dict:
        out = {"algorithm": self.algorithm}
        defaults = OptimizerConfig(self.algorithm)
        for key in ("label", "learning_rate", "beta1", "beta2", "eps", "memory",
                    "armijo_c", "max_halvings", "delta", "beta_margin",
                    "alpha_safety", "eig_bounds", "k0_style", "max_iterations",
                    "tolerance"):
            value = getattr(self, key)
            if value != getattr(defaults, key):
                out[key] = value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "OptimizerConfig":
        return cls(**data)


@dataclass
class RunRecord:
    """Per-run artifact: full cost history plus where the run ended up."""

    algorithm: str
    seed: int | None
    cost_history: list[float]
    final_params: np.ndarray
    wall_time: float
    iterations: int
    aborted: bool = False
    stagnated: bool = False
    description: str = ""

    @property
    def final_cost(self) -> float:
        return self.cost_history[-1]

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "seed": self.seed,
            "cost_history": [float(c) for c in self.cost_history],
            "final_params": [float(p) for p in np.asarray(self.final_params)],
            "wall_time": float(self.wall_time),
            "iterations": int(self.iterations),
            "aborted": bool(self.aborted),
            "stagnated": bool(self.stagnated),
            "description": self.description,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunRecord":
        return cls(
            algorithm=data["algorithm"],
            seed=data["seed"],
            cost_history=list(data["cost_history"]),
            final_params=np.asarray(data["final_params"], dtype=float),
            wall_time=data["wall_time"],
            iterations=data["iterations"],
            aborted=data.get("aborted", False),
            stagnated=data.get("stagnated", False),
            description=data.get("description", ""),
        )


def optimize(cost, config: OptimizerConfig, init, seed: int | None = None) -> RunRecord:
    """Run one optimizer from one starting point.

    The cost is recorded at every iterate including the start, so the
    history has ``iterations + 1`` entries.  Non-finite values abort the
    run and flag the record instead of raising.
    """
    x = np.array(init, dtype=float, copy=True)
    optimizer = config.build()
    history = [float(cost.value(x))]
    aborted = False
    start = time.perf_counter()
    for _ in range(config.max_iterations):
        try:
            x = optimizer.step(cost, x)
        except NumericalAbortError:
            aborted = True
            break
        current = float(cost.value(x))
        history.append(current)
        if not np.isfinite(current):
            aborted = True
            break
        if current < config.tolerance:
            break
    wall = time.perf_counter() - start
    return RunRecord(
        algorithm=config.algorithm,
        seed=seed,
        cost_history=history,
        final_params=x,
        wall_time=wall,
        iterations=len(history) - 1,
        aborted=aborted,
        stagnated=getattr(optimizer, "stagnated", False),
    )


@dataclass
class MultiRunResult:
    best: RunRecord
    average_history: list[float]
    records: list[RunRecord] = field(default_factory=list)


def multi_run(cost, config: OptimizerConfig, n_runs: int, base_seed: int) -> MultiRunResult:
    """Independent seeded restarts; seeds are base_seed + run index.

    Returns the run with the lowest final cost together with the
    per-iteration mean across runs (histories that stopped early are
    padded with their final value).
    """
    from .ansatz import random_init

    if n_runs < 1:
        raise ValueError("need at least one run")
    records = []
    for i in range(n_runs):
        seed = base_seed + i
        init = random_init(cost.template, seed)
        records.append(optimize(cost, config, init, seed=seed))
    best = min(records, key=lambda r: r.final_cost)
    longest = max(len(r.cost_history) for r in records)
    padded = np.array([
        r.cost_history + [r.cost_history[-1]] * (longest - len(r.cost_history))
        for r in records
    ])
    average = [float(c) for c in padded.mean(axis=0)]
    return MultiRunResult(best=best, average_history=average, records=records)
