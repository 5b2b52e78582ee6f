"""Noise sampling, Monte-Carlo fidelity estimation, metrics and result files."""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .codes import CodeSpec, hexagonal_shape, rectangular_shape, rotated_surface_code
from .gkp import (DEFAULT_NV, SQRT_PI, SurfaceGkpCode, run_correlated, run_separable)
from .graph import assign_edge_weights, build_model_graph, highlight_from_syndrome
from .qubit_decoder import class_label, logical_class, matching_to_error, pauli_to_gkp_params
from .tree import MatchingEnumerator

CODE_KINDS = ("surface-square", "surface-hex", "surface-rect", "qubit-surface")
MLD_MAX_DISTANCE = 3


# --- noise ---------------------------------------------------------------------

@dataclass(frozen=True)
class NoiseModel:
    """Gaussian displacements (``sigma``) or iid Pauli errors (``eps``).

    A Pauli model stores ``(eps_x, eps_y, eps_z)``; a single rate ``eps``
    means depolarizing noise with ``eps / 3`` on each Pauli.
    """

    kind: str
    sigma: float | None = None
    eps: tuple | None = None

    def __post_init__(self):
        if self.kind == "gaussian":
            if self.sigma is None or not self.sigma > 0:
                raise ValueError("gaussian noise needs sigma > 0")
        elif self.kind == "pauli":
            eps = tuple(float(e) for e in self.eps)
            if len(eps) != 3 or min(eps) < 0 or not 0 < sum(eps) < 0.75:
                raise ValueError("pauli noise needs eps_x, eps_y, eps_z >= 0 with total in (0, 3/4)")
            object.__setattr__(self, "eps", eps)
        else:
            raise ValueError(f"unknown noise kind {self.kind!r}")

    @classmethod
    def gaussian(cls, sigma: float) -> "NoiseModel":
        return cls("gaussian", sigma=float(sigma))

    @classmethod
    def pauli(cls, eps_x: float, eps_y: float, eps_z: float) -> "NoiseModel":
        return cls("pauli", eps=(eps_x, eps_y, eps_z))

    @classmethod
    def depolarizing(cls, eps: float) -> "NoiseModel":
        return cls("pauli", eps=(eps / 3.0,) * 3)

    @classmethod
    def parse(cls, text: str) -> "NoiseModel":
        """``sigma=<v>``, ``epsilon=<v>`` (depolarizing) or ``epsXYZ=<x,y,z>``."""
        key, _, value = text.partition("=")
        if key == "sigma":
            return cls.gaussian(float(value))
        if key == "epsilon":
            return cls.depolarizing(float(value))
        if key == "epsXYZ":
            parts = [float(v) for v in value.split(",")]
            if len(parts) != 3:
                raise ValueError("epsXYZ needs three comma-separated rates")
            return cls.pauli(*parts)
        raise ValueError(f"cannot parse noise {text!r}")

    @property
    def label(self) -> tuple[str, str]:
        """CSV ``(noise_kind, noise_value)``."""
        if self.kind == "gaussian":
            return "sigma", repr(self.sigma)
        return "epsXYZ", ";".join(repr(e) for e in self.eps)

    def to_dict(self) -> dict:
        if self.kind == "gaussian":
            return {"kind": "gaussian", "sigma": self.sigma}
        return {"kind": "pauli", "eps": list(self.eps)}

    @classmethod
    def from_dict(cls, data: dict) -> "NoiseModel":
        if data["kind"] == "gaussian":
            return cls.gaussian(data["sigma"])
        return cls.pauli(*data["eps"])


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream for one trial, a pure function of (seed, trial)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def sample_pauli(eps, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """iid Paulis as ``(x_bits, z_bits)``."""
    ex, ey, ez = eps
    draw = rng.choice(4, size=n, p=[1.0 - ex - ey - ez, ex, ey, ez])  # I, X, Y, Z
    return (np.isin(draw, (1, 2)).astype(np.int64), np.isin(draw, (2, 3)).astype(np.int64))


def sample_shift(model: NoiseModel, dimension: int, rng: np.random.Generator,
                 shapes=None) -> np.ndarray:
    """A displacement ``(q_1..q_N, p_1..p_N)`` of length ``dimension = 2N``.

    Pauli noise emits ``sqrt(pi) S_i b`` per mode with ``b`` the (x, z)
    bits of the sampled Pauli; ``shapes`` defaults to square.
    """
    if model.kind == "gaussian":
        return rng.standard_normal(dimension) * model.sigma
    n = dimension // 2
    x, z = sample_pauli(model.eps, n, rng)
    if shapes is None:
        shapes = np.tile(np.eye(2), (n, 1, 1))
    shift = np.einsum("nij,nj->ni", shapes, np.stack([x, z], axis=1).astype(float)) * SQRT_PI
    return np.concatenate([shift[:, 0], shift[:, 1]])


# --- codes ---------------------------------------------------------------------

@dataclass(frozen=True)
class CodeChoice:
    kind: str
    distance: int
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in CODE_KINDS:
            raise ValueError(f"unknown code {self.kind!r}; choose from {', '.join(CODE_KINDS)}")
        if self.distance < 2:
            raise ValueError("distance must be at least 2")

    @property
    def gkp(self) -> bool:
        return self.kind != "qubit-surface"

    def routes_through_gkp(self, noise: NoiseModel | None) -> bool:
        """Qubit codes with correlated (Y) noise are decoded as discrete GKP codes."""
        return self.gkp or (noise is not None and noise.kind == "pauli" and noise.eps[1] > 0)

    def build(self, noise: NoiseModel | None = None) -> CodeSpec:
        """The code with its shapes; Pauli noise on GKP codes uses the mapped shape."""
        code = rotated_surface_code(self.distance)
        if not self.routes_through_gkp(noise):
            return code
        if noise is not None and noise.kind == "pauli":
            shape = pauli_to_gkp_params(*noise.eps).shape
        elif self.kind == "surface-hex":
            shape = hexagonal_shape()
        elif self.kind == "surface-rect":
            shape = rectangular_shape(self.scale)
        else:
            shape = np.eye(2)
        return code.with_shapes(np.tile(shape, (code.n, 1, 1)))


@lru_cache(maxsize=8)
def _context(choice: CodeChoice, noise: NoiseModel):
    code = choice.build(noise)
    if choice.routes_through_gkp(noise):
        return SurfaceGkpCode(code)
    return code, _sector_graphs(code, noise.eps)


# --- trials --------------------------------------------------------------------

@dataclass
class TrialOutcome:
    success: list            # one bool per requested K (or one for MLD)
    no_solution: bool
    seconds: list            # cumulative decode time up to each K
    weights: list = field(default_factory=list)


def _gkp_trial(ctx: SurfaceGkpCode, noise, ks, include_explored, rng, n_v, reference, keep_weights):
    sigma = noise.sigma if noise.kind == "gaussian" else pauli_to_gkp_params(*noise.eps).sigma
    discrete = noise.kind == "pauli"
    shift = sample_shift(noise, 2 * ctx.n, rng, ctx.shapes)
    cand = ctx.lattice.syndrome_and_candidate(shift)
    truth = ctx.true_class(cand, shift)
    if reference == "mld":
        from .oracle import brute_force_mld_gkp
        t0 = time.perf_counter()
        decision = brute_force_mld_gkp(ctx, cand, sigma, discrete=discrete).decision
        return TrialOutcome([decision == truth], False, [time.perf_counter() - t0])
    success, seconds, weights = [], [], []
    t0 = time.perf_counter()
    no_solution = False
    if ctx.separable:
        res = run_separable(ctx, cand, sigma, ks[0], n_v, discrete)
        for k in ks:
            res.grow(k)
            decision = res.decision(k, include_explored)
            seconds.append(time.perf_counter() - t0)
            success.append(decision == truth)
        no_solution = res.empty
        if keep_weights:
            weights = [res.q.weights, res.p.weights]
    else:
        for k in ks:
            t1 = time.perf_counter()
            res = run_correlated(ctx, cand, sigma, k, n_v, discrete)
            tally = res.tally(include_explored)
            seconds.append(time.perf_counter() - t1)
            no_solution = not res.emitted
            success.append(not no_solution and tally.decision == truth)
        if keep_weights:
            weights = [[float(p) for _, p, _ in res.emitted]]
    return TrialOutcome(success, no_solution, seconds, weights)


def _sector_graphs(code: CodeSpec, eps) -> dict:
    ex, ey, ez = eps
    out = {}
    for error_type, rate in (("Z", ez + ey), ("X", ex + ey)):
        if rate > 0:
            model = build_model_graph(code.checks_for(error_type))
            out[error_type] = assign_edge_weights(model, rate)
    return out


def _qubit_trial(ctx, noise, ks, include_explored, rng, reference, keep_weights):
    code, graphs = ctx
    x, z = sample_pauli(noise.eps, code.n, rng)
    truth = logical_class(np.concatenate([x, z]), code)
    if reference == "mld":
        from .oracle import brute_force_mld_qubit
        t0 = time.perf_counter()
        syndrome = np.concatenate([code.hx @ z % 2, code.hz @ x % 2])
        decision = brute_force_mld_qubit(code, syndrome, noise.eps).decision
        return TrialOutcome([decision == truth], False, [time.perf_counter() - t0])
    t0 = time.perf_counter()
    sectors = {}
    for error_type, model in graphs.items():
        error = z if error_type == "Z" else x
        graph = highlight_from_syndrome(model, code.checks_for(error_type) @ error % 2)
        sectors[error_type] = (graph, MatchingEnumerator(graph))
    success, seconds, weights = [], [], []
    no_solution = False
    for k in ks:
        bits = {"X": 0, "Z": 0}
        for error_type, (graph, enum) in sectors.items():
            found = enum.take(k)
            if not found:
                no_solution = True
                continue
            members = found[:k] + (enum.explored(len(found[:k])) if include_explored else [])
            sums = [0.0, 0.0]
            for m in members:
                eta = matching_to_error(graph, m, code.n)
                sums[int(eta @ code.opposing_logical(error_type)) % 2] += math.exp(-m.weight)
            bits[error_type] = 0 if sums[0] >= sums[1] * (1 - 1e-9) else 1
        seconds.append(time.perf_counter() - t0)
        success.append(not no_solution and class_label(bits["X"], bits["Z"]) == truth)
    if keep_weights:
        weights = [[m.weight for m in enum.found] for _, enum in sectors.values()]
    return TrialOutcome(success, no_solution, seconds, weights)


def _run_chunk(args):
    choice, noise, ks, include_explored, seed, lo, hi, n_v, reference, keep_weights = args
    ctx = _context(choice, noise)
    out = []
    for i in range(lo, hi):
        rng = trial_rng(seed, i)
        if isinstance(ctx, SurfaceGkpCode):
            out.append(_gkp_trial(ctx, noise, ks, include_explored, rng, n_v, reference, keep_weights))
        else:
            out.append(_qubit_trial(ctx, noise, ks, include_explored, rng, reference, keep_weights))
    return out


@dataclass
class TrialSummary:
    """Per-K fidelities of one (code, noise) run."""

    code: str
    distance: int
    noise: NoiseModel
    ks: list
    fidelity: list
    stderr: list
    trials: int
    seconds: list | None
    seed: int
    include_explored: bool
    no_solution: int = 0
    reference: str = "kmwm"
    scale: float | None = None
    weights: list | None = None

    def point(self, k: int) -> int:
        return self.ks.index(k)


def binomial_stderr(f: float, trials: int) -> float:
    return math.sqrt(f * (1.0 - f) / trials)


def run_trials(choice: CodeChoice, noise: NoiseModel, ks, trials: int, seed: int,
               workers: int = 1, include_explored: bool = False, n_v: int = DEFAULT_NV,
               reference: str = "kmwm", timing: bool = False, keep_weights: bool = False,
               chunk: int = 64) -> TrialSummary:
    """Monte-Carlo fidelity per K.

    Trial ``i`` draws from ``trial_rng(seed, i)``; the decoder runs once up
    to ``max(ks)`` and each K reads a prefix of the enumeration (correlated
    decoding reruns per K since its initial frontier depends on K).  With
    ``reference="mld"`` the brute-force decoder is used instead (d <= 3).
    Results do not depend on ``workers``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if reference not in ("kmwm", "mld"):
        raise ValueError("reference must be 'kmwm' or 'mld'")
    if reference == "mld":
        if choice.distance > MLD_MAX_DISTANCE:
            raise ValueError(f"brute-force reference limited to distance {MLD_MAX_DISTANCE}")
        ks = [0]
    else:
        ks = sorted(set(int(k) for k in ks))
        if not ks or ks[0] < 1:
            raise ValueError("K values must be positive")
    if not choice.gkp and noise.kind != "pauli":
        raise ValueError("qubit-surface needs Pauli noise")
    jobs = [(choice, noise, tuple(ks), include_explored, seed, lo, min(lo + chunk, trials), n_v,
             reference, keep_weights) for lo in range(0, trials, chunk)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_chunk, jobs))
    else:
        chunks = [_run_chunk(job) for job in jobs]
    outcomes = [o for c in chunks for o in c]
    wins = np.zeros(len(ks), dtype=np.int64)
    secs = np.zeros(len(ks))
    for o in outcomes:
        wins += np.asarray(o.success, dtype=np.int64)
        secs += np.asarray(o.seconds)
    fid = [int(w) / trials for w in wins]
    return TrialSummary(
        code=choice.kind, distance=choice.distance, noise=noise, ks=list(ks), fidelity=fid,
        stderr=[binomial_stderr(f, trials) for f in fid], trials=trials,
        seconds=[float(s) for s in secs] if timing else None, seed=seed,
        include_explored=include_explored, no_solution=sum(o.no_solution for o in outcomes),
        reference=reference, scale=choice.scale if choice.kind == "surface-rect" else None,
        weights=[o.weights for o in outcomes] if keep_weights else None)


# --- metrics -------------------------------------------------------------------

@dataclass
class Metric:
    k: int
    inaccuracy: float
    inaccuracy_err: float
    improvement: float | None
    improvement_err: float | None
    improvement_defined: bool


def decoding_inaccuracy(f_opt, f_k, s_opt=0.0, s_k=0.0) -> tuple[float, float]:
    """``|f_opt - f_K| / f_opt`` with first-order error propagation."""
    if f_opt <= 0:
        raise ValueError("reference fidelity must be positive")
    value = abs(f_opt - f_k) / f_opt
    err = math.sqrt((s_k / f_opt) ** 2 + (f_k * s_opt / f_opt ** 2) ** 2)
    return value, err


def accuracy_improvement(f_opt, f_k, f_1, s_opt=0.0, s_k=0.0, s_1=0.0):
    """``|f_K - f_1| / |f_opt - f_1|``; ``(None, None)`` when ``f_opt = f_1``."""
    b = abs(f_opt - f_1)
    if b == 0:
        return None, None
    a = abs(f_k - f_1)
    var_a = s_k ** 2 + s_1 ** 2
    var_b = s_opt ** 2 + s_1 ** 2
    return a / b, math.sqrt(var_a / b ** 2 + a ** 2 * var_b / b ** 4)


def compute_metrics(reference: TrialSummary, summary: TrialSummary) -> dict:
    """Inaccuracy and improvement per K against a reference summary.

    The reference fidelity is the reference run's last point (its largest K,
    or the brute-force decoder).  Improvement needs K = 1 in ``summary``.
    """
    if (reference.code, reference.distance, reference.noise) != (summary.code, summary.distance,
                                                                  summary.noise):
        raise ValueError("summaries describe different codes or noise")
    f_opt, s_opt = reference.fidelity[-1], reference.stderr[-1]
    has_one = 1 in summary.ks
    f_1 = summary.fidelity[summary.point(1)] if has_one else None
    s_1 = summary.stderr[summary.point(1)] if has_one else None
    rows = []
    for k, f, s in zip(summary.ks, summary.fidelity, summary.stderr):
        inacc, inacc_err = decoding_inaccuracy(f_opt, f, s_opt, s)
        imp, imp_err = (accuracy_improvement(f_opt, f, f_1, s_opt, s, s_1) if has_one
                        else (None, None))
        rows.append(Metric(k, inacc, inacc_err, imp, imp_err, imp is not None))
    label = "mld" if reference.reference == "mld" else f"k={reference.ks[-1]}"
    return {"reference": label, "f_opt": f_opt, "f_opt_stderr": s_opt,
            "per_k": [asdict(r) for r in rows]}


# --- persistence ---------------------------------------------------------------

CSV_COLUMNS = ("code", "distance", "noise_kind", "noise_value", "k", "fidelity", "stderr",
               "trials", "seconds")


def summary_to_dict(summary: TrialSummary, metrics: dict | None = None) -> dict:
    run = {"code": summary.code, "distance": summary.distance, "noise": summary.noise.to_dict(),
           "seed": summary.seed, "trials": summary.trials, "reference": summary.reference,
           "no_solution": summary.no_solution}
    if summary.scale is not None:
        run["scale"] = summary.scale
    points = []
    for i, k in enumerate(summary.ks):
        points.append({"k": k, "fidelity": summary.fidelity[i], "stderr": summary.stderr[i],
                       "seconds": None if summary.seconds is None else summary.seconds[i],
                       "explored_included": summary.include_explored})
    out = {"run": run, "points": points, "metrics": metrics or {}}
    if summary.weights is not None:
        out["weights"] = summary.weights
    return out


def summary_from_dict(data: dict) -> TrialSummary:
    run, points = data["run"], data["points"]
    secs = [p["seconds"] for p in points]
    return TrialSummary(
        code=run["code"], distance=run["distance"], noise=NoiseModel.from_dict(run["noise"]),
        ks=[p["k"] for p in points], fidelity=[p["fidelity"] for p in points],
        stderr=[p["stderr"] for p in points], trials=run["trials"],
        seconds=None if any(s is None for s in secs) else secs, seed=run["seed"],
        include_explored=bool(points and points[0]["explored_included"]),
        no_solution=run.get("no_solution", 0), reference=run.get("reference", "kmwm"),
        scale=run.get("scale"), weights=data.get("weights"))


def write_results(summaries, path, metrics=None) -> tuple[Path, Path]:
    """Write ``<path>`` (JSON) and a sibling ``.csv``; overwrites both.

    A single summary is written as one ``{run, points, metrics}`` object,
    several (or none) as ``{"runs": [...]}``.
    """
    path = Path(path)
    summaries = list(summaries)
    metrics = list(metrics) if metrics is not None else [None] * len(summaries)
    docs = [summary_to_dict(s, m) for s, m in zip(summaries, metrics)]
    doc = docs[0] if len(docs) == 1 else {"runs": docs}
    path.write_text(json.dumps(doc, indent=2) + "\n")
    csv_path = path.with_suffix(".csv")
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for s in summaries:
            kind, value = s.noise.label
            for i, k in enumerate(s.ks):
                writer.writerow([s.code, s.distance, kind, value, k, repr(s.fidelity[i]),
                                 repr(s.stderr[i]), s.trials,
                                 "" if s.seconds is None else repr(s.seconds[i])])
    return path, csv_path


def read_results(path) -> list[TrialSummary]:
    doc = json.loads(Path(path).read_text())
    docs = doc["runs"] if "runs" in doc else [doc]
    return [summary_from_dict(d) for d in docs]
