"""Shared oracles and fixtures for the test suite.

The oracles are deliberately independent of the implementation paths they
check: brute-force enumeration, direct formula evaluation, and analytic
reference densities.
"""

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from itertools import combinations

import numpy as np
from scipy.special import betainc
from scipy.stats import chi2

from iterprior.numerics import GRID_AXIS, Density1D


def ks_distance_1d(samples, density: Density1D) -> float:
    """KS distance between samples living at bin centers and a discretized density.

    Both CDFs are step functions jumping only at bin centers, so the supremum
    is attained at the bin upper edges.
    """
    samples = np.sort(np.asarray(samples, dtype=float))
    emp = np.searchsorted(samples, density.edges[1:], side="right") / samples.size
    return float(np.abs(emp - density.cumulative()).max())


def ks_distance_marginal(samples, marginal_masses) -> float:
    """KS distance between samples at grid nodes and a marginal on GRID_AXIS."""
    samples = np.sort(np.asarray(samples, dtype=float))
    emp = np.searchsorted(samples, GRID_AXIS, side="right") / samples.size
    return float(np.abs(emp - np.cumsum(marginal_masses)).max())


def chi_squared_two_sample_p(counts_a, counts_b) -> float:
    """Two-sample chi-squared homogeneity test on aligned count vectors."""
    counts_a = np.asarray(counts_a, dtype=float)
    counts_b = np.asarray(counts_b, dtype=float)
    keep = (counts_a + counts_b) > 0
    a, b = counts_a[keep], counts_b[keep]
    na, nb = a.sum(), b.sum()
    pooled = (a + b) / (na + nb)
    expected_a = na * pooled
    expected_b = nb * pooled
    stat = float((((a - expected_a) ** 2) / expected_a).sum() + (((b - expected_b) ** 2) / expected_b).sum())
    dof = int(keep.sum()) - 1
    return float(chi2.sf(stat, dof))


def brute_force_mw_p(a, b) -> tuple[float, float]:
    """Exact two-sided permutation p-value for the Mann-Whitney U statistic.

    Enumerates every assignment of the pooled values into groups of the
    observed sizes and counts assignments at least as extreme (in |U - mean|)
    as the observed one. Returns (u_observed, p).
    """
    a = list(a)
    b = list(b)
    pool = a + b
    n1, n = len(a), len(pool)
    mu = n1 * (n - n1) / 2.0

    def u_stat(group):
        rest = list(pool)
        for value in group:
            rest.remove(value)
        return sum(
            (1.0 if x > y else 0.5 if x == y else 0.0) for x in group for y in rest
        )

    u_obs = u_stat(a)
    deviation = abs(u_obs - mu)
    hits = 0
    total = 0
    for idx in combinations(range(n), n1):
        group = [pool[i] for i in idx]
        total += 1
        if abs(u_stat(group) - mu) >= deviation - 1e-12:
            hits += 1
    return u_obs, hits / total


def beta_bin_masses(a: float, b: float, bins: int = 100) -> np.ndarray:
    """Analytic Beta(a, b) probability mass per uniform bin of [0, 1]."""
    edges = np.linspace(0.0, 1.0, bins + 1)
    masses = np.diff(betainc(a, b, edges))
    return masses / masses.sum()


def multinomial_within_3_sigma(counts, probabilities, n_draws) -> bool:
    """Each observed count within three binomial standard deviations of its mean."""
    counts = np.asarray(counts, dtype=float)
    p = np.asarray(probabilities, dtype=float)
    expected = n_draws * p
    sigma = np.sqrt(n_draws * p * (1.0 - p))
    return bool((np.abs(counts - expected) <= 3.0 * sigma).all())


class PriorSamplingAgent:
    """Ignores the observation and samples its prior directly (stationary from t=1)."""

    deterministic = True

    def __init__(self, prior: Density1D):
        self.prior = prior

    def respond(self, task, observation, rng):
        from iterprior.agents import AgentResponse

        cuts = np.cumsum(self.prior.masses)
        u = rng.generator.random() * cuts[-1]
        idx = min(int(np.searchsorted(cuts, u, side="right")), cuts.size - 1)
        return AgentResponse(hypothesis=float(self.prior.centers[idx]))


def synthetic_chainset(hypotheses_by_iteration, task_name="coin-flips", bounds=(0.0, 1.0)):
    """Build a ChainSet from a (n_iterations, n_chains) array of scalar hypotheses."""
    from iterprior.chains import ChainRecord, ChainResult, ChainSet
    from iterprior.likelihoods import CoinObservation
    from iterprior.tasks import HypothesisKind

    values = np.asarray(hypotheses_by_iteration, dtype=float)
    n_iter, n_chains = values.shape
    chains = []
    for c in range(n_chains):
        records = [
            ChainRecord(chain_id=c, iteration=0, observation=CoinObservation(5), hypothesis=None)
        ]
        for t in range(1, n_iter + 1):
            records.append(
                ChainRecord(
                    chain_id=c,
                    iteration=t,
                    observation=CoinObservation(5),
                    hypothesis=float(values[t - 1, c]),
                )
            )
        chains.append(ChainResult(chain_id=c, records=tuple(records)))
    return ChainSet(
        task_name=task_name,
        hypothesis_kind=HypothesisKind.PROPORTION,
        hypothesis_bounds=bounds,
        n_iterations=n_iter,
        base_seed=0,
        chains=tuple(chains),
    )


class ScriptedLlmServer:
    """A local chat-completions stub that replays a scripted response list.

    Each script entry is ``(status, content)``: on success the content is
    wrapped in a chat-completion body, on failure it becomes the error text.
    The final entry repeats once the script is exhausted. Records every
    request body it saw.
    """

    def __init__(self, script, response_delay: float = 0.0):
        self.script = list(script)
        self.requests: list[dict] = []
        self.max_in_flight = 0
        self._in_flight = 0
        self._delay = response_delay
        self._lock = threading.Lock()
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", "0"))
                payload = json.loads(self.rfile.read(length) or b"{}")
                with outer._lock:
                    outer.requests.append(payload)
                    outer._in_flight += 1
                    outer.max_in_flight = max(outer.max_in_flight, outer._in_flight)
                    index = min(len(outer.requests) - 1, len(outer.script) - 1)
                if outer._delay:
                    import time

                    time.sleep(outer._delay)
                with outer._lock:
                    outer._in_flight -= 1
                status, content = outer.script[index]
                if status == 200:
                    body = json.dumps(
                        {"choices": [{"message": {"role": "assistant", "content": content}}]}
                    ).encode()
                else:
                    body = json.dumps({"error": content}).encode()
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, *args):
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}/v1/chat/completions"

    def __enter__(self):
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._server.shutdown()
        self._server.server_close()
