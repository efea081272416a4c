"""Noise-sweep benchmark: generate, permute, perturb, order and score.

A sweep runs every (amplitude, trial) job of an :class:`ExperimentConfig`.
Each job builds one noisy permuted matrix and scores every configured
method on it, so methods are compared on identical inputs. Jobs may run in
a process pool; rows are always emitted in (amplitude, trial, method) order.
"""
import math
import os
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameter, SeriationError
from .io import TrialResult
from .linalg import Scaling
from .matgen import (
    CIRCULAR_KINDS,
    GENERATORS,
    NoiseSpec,
    add_noise,
    generate,
    inverse_permutation,
    permute_matrix,
    random_permutation,
)
from .mdso import MdsoParams, mdso_order
from .metrics import circular_kendall_tau, linear_score
from .seriation import circular_order, spectral_order


@dataclass(frozen=True)
class Method:
    """``baseline`` or ``mdso`` with its neighbourhood size, dimension and scaling."""

    name: str
    k: int = 0
    d: int = 1
    scaling: str = "none"


_METHOD_RE = re.compile(r"^\s*(baseline|mdso)\s*(?:\((.*)\))?\s*$")


def parse_methods(text, k, d, scaling):
    """Parse ``baseline, mdso, mdso(k=5;d=3;scaling=ctd)``.

    Options in parentheses override the config-wide ``k``, ``d`` and
    ``scaling`` for that method only.
    """
    out = []
    for item in _split_top(text):
        m = _METHOD_RE.match(item)
        if not m:
            raise InvalidParameter("cannot parse method %r" % item)
        name, opts = m.group(1), m.group(2)
        if name == "baseline":
            if opts:
                raise InvalidParameter("baseline takes no options")
            out.append(Method("baseline"))
            continue
        kw = {"k": k, "d": d, "scaling": scaling}
        for opt in filter(None, (o.strip() for o in (opts or "").split(";"))):
            key, sep, val = opt.partition("=")
            key = key.strip()
            if not sep or key not in kw:
                raise InvalidParameter("bad mdso option %r" % opt)
            kw[key] = val.strip() if key == "scaling" else int(val)
        kw["scaling"] = str(Scaling.parse(kw["scaling"]))
        out.append(Method("mdso", **kw))
    if not out:
        raise InvalidParameter("no methods given")
    return out


def _split_top(text):
    # commas inside parentheses do not separate methods
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p for p in parts if p.strip()]


@dataclass
class ExperimentConfig:
    kind: str = "banded"
    n: int = 200
    param: float = 10.0
    amplitudes: tuple = (0.0, 1.0, 2.0, 3.0, 4.0, 5.0)
    trials: int = 20
    methods: tuple = field(default_factory=lambda: (Method("baseline"), Method("mdso", 15, 10, "heuristic")))
    seed: int = 0
    update: str = "neg_distance_offset"
    timing: bool = False

    def __post_init__(self):
        if self.kind not in GENERATORS:
            raise InvalidParameter("unknown matrix kind %r" % (self.kind,))
        if self.n < 4:
            raise InvalidParameter("n must be >= 4")
        if self.trials < 1:
            raise InvalidParameter("trials must be >= 1")
        if any(not a >= 0 for a in self.amplitudes):
            raise InvalidParameter("noise amplitudes must be >= 0")

    @property
    def circular(self):
        return self.kind in CIRCULAR_KINDS


_BOOL = {"1": True, "true": True, "yes": True, "on": True,
         "0": False, "false": False, "no": False, "off": False}


def parse_config(text):
    """Build an :class:`ExperimentConfig` from ``key = value`` lines.

    Recognized keys: kind, n, param, amplitudes, trials, methods, k, d,
    scaling, seed, update, timing. Lists are comma-separated; ``#`` starts
    a comment.
    """
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise InvalidParameter("line %d: expected key = value" % lineno)
        raw[key.strip().lower()] = val.strip()
    known = {"kind", "n", "param", "amplitudes", "trials", "methods", "k", "d",
             "scaling", "seed", "update", "timing"}
    unknown = set(raw) - known
    if unknown:
        raise InvalidParameter("unknown config key(s): %s" % ", ".join(sorted(unknown)))
    try:
        kw = {}
        if "kind" in raw:
            kw["kind"] = raw["kind"]
        for key in ("n", "trials", "seed"):
            if key in raw:
                kw[key] = int(raw[key])
        if "param" in raw:
            kw["param"] = float(raw["param"])
        if "amplitudes" in raw:
            kw["amplitudes"] = tuple(float(a) for a in raw["amplitudes"].split(",") if a.strip())
        if "update" in raw:
            kw["update"] = raw["update"]
        if "timing" in raw:
            kw["timing"] = _BOOL[raw["timing"].lower()]
        k = int(raw.get("k", 15))
        d = int(raw.get("d", 10))
    except (ValueError, KeyError) as exc:
        raise InvalidParameter("bad config value: %s" % exc) from None
    scaling = raw.get("scaling", "heuristic")
    kw["methods"] = tuple(parse_methods(raw.get("methods", "baseline, mdso"), k, d, scaling))
    return ExperimentConfig(**kw)


def trial_seeds(seed):
    """Independent streams for the permutation and for the noise of one trial."""
    perm, noise = np.random.SeedSequence(seed).spawn(2)
    return perm, noise


def make_instance(kind, n, param, amplitude, seed):
    """Noisy permuted matrix and its ground-truth ordering for one trial."""
    perm_ss, noise_ss = trial_seeds(seed)
    A = generate(kind, n, param)
    A = add_noise(A, NoiseSpec(amplitude, noise_ss))
    p = random_permutation(n, perm_ss)
    return permute_matrix(A, p), inverse_permutation(p)


def run_method(method, A, circular, update="neg_distance_offset"):
    if method.name == "baseline":
        return circular_order(A) if circular else spectral_order(A)
    params = MdsoParams(k=method.k, d=method.d, scaling=method.scaling,
                        kind="circular" if circular else "linear", update=update)
    return mdso_order(A, params)


# failures that turn into NaN rows instead of aborting the sweep
_RECOVERABLE = (SeriationError, np.linalg.LinAlgError, ArithmeticError, ValueError)


def run_job(config, amplitude, trial):
    """Score every method on one (amplitude, trial) instance."""
    seed = config.seed + trial
    rows = []
    try:
        A, truth = make_instance(config.kind, config.n, config.param, amplitude, seed)
    except _RECOVERABLE:
        A = truth = None
    score_fn = circular_kendall_tau if config.circular else linear_score
    for method in config.methods:
        score, seconds = math.nan, 0.0
        if A is not None:
            t0 = time.perf_counter()
            try:
                order = run_method(method, A, config.circular, config.update)
                score = float(score_fn(order, truth))
            except _RECOVERABLE:
                pass
            if config.timing:
                seconds = time.perf_counter() - t0
        rows.append(TrialResult(
            matrix=config.kind, n=config.n, noise=float(amplitude), trial=trial, seed=seed,
            method=method.name, k=method.k, d=method.d, scaling=method.scaling,
            score=score, seconds=seconds,
        ))
    return rows


def _run_job_args(args):
    return run_job(*args)


def worker_count():
    """Pool size from ``MDSO_THREADS``, else the machine's CPU count."""
    env = os.environ.get("MDSO_THREADS", "").strip()
    if env:
        try:
            value = int(env)
        except ValueError:
            raise InvalidParameter("MDSO_THREADS must be an integer, got %r" % env) from None
        if value < 1:
            raise InvalidParameter("MDSO_THREADS must be >= 1")
        return value
    return os.cpu_count() or 1


def run_sweep(config, workers=None, progress=None):
    """Run the full grid and return rows in (amplitude, trial, method) order."""
    jobs = [(config, a, t) for a in config.amplitudes for t in range(config.trials)]
    workers = worker_count() if workers is None else workers
    rows = []
    if workers <= 1 or len(jobs) <= 1:
        for job in jobs:
            rows.extend(_run_job_args(job))
            if progress:
                progress(len(rows))
        return rows
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        # map preserves job order regardless of completion order
        for chunk in pool.map(_run_job_args, jobs):
            rows.extend(chunk)
            if progress:
                progress(len(rows))
    return rows


@dataclass
class Summary:
    method: str
    k: int
    d: int
    scaling: str
    noise: float
    mean: float
    spread: float
    count: int
    failures: int


def summarize(rows, sem=False):
    """Mean and standard deviation of the score per (method, amplitude).

    With ``sem=True`` the spread is the standard error ``std / sqrt(trials)``.
    Failed (NaN) trials are excluded and counted separately.
    """
    groups = {}
    for r in rows:
        groups.setdefault((r.method, r.k, r.d, r.scaling, r.noise), []).append(r.score)
    out = []
    for (method, k, d, scaling, noise), scores in groups.items():
        s = np.asarray(scores, dtype=np.float64)
        ok = s[~np.isnan(s)]
        mean = float(ok.mean()) if ok.size else math.nan
        std = float(ok.std()) if ok.size else math.nan
        if sem and ok.size:
            std /= math.sqrt(ok.size)
        out.append(Summary(method, k, d, scaling, noise, mean, std, int(ok.size),
                           int(s.size - ok.size)))
    return out
