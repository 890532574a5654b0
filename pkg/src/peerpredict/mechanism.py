"""Deployable mechanisms: seeded peer-matched payments, the all-same-report
punishment that removes the uninformative equilibria, and the focality
arithmetic tying the punishment level to the agent count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .equilibria import equilibrium_set
from .errors import IndexOutOfRange, NeverFocal, OutOfRange
from .prior import GenerativeModel, epsilon_q, prior_from_model
from .scoring import PayoffMatrix


@dataclass(frozen=True)
class MechanismSpec:
    """Everything needed to pay a round: payment matrix, optional punishment,
    agent count, the generative model behind the prior, and (for multi-bit
    signals) one matrix per dimension."""

    matrix: PayoffMatrix
    n_agents: int
    punishment: float = 0.0
    model: Optional[GenerativeModel] = None
    dim_matrices: tuple = ()

    def __post_init__(self):
        if self.n_agents < 2:
            raise OutOfRange(f"a mechanism needs at least 2 agents, got {self.n_agents}")
        if self.punishment < 0.0:
            raise OutOfRange(f"punishment must be non-negative, got {self.punishment}")
        if self.punishment > 0.0 and self.model is None:
            raise OutOfRange("a punishment level requires the generative model that sets it")

    @property
    def dimensions(self) -> int:
        return len(self.dim_matrices) if self.dim_matrices else 1

    def matrix_for(self, dim: int) -> PayoffMatrix:
        if self.dimensions == 1:
            return self.matrix
        return self.dim_matrices[dim]

    def to_dict(self) -> dict:
        d = {"matrix": self.matrix.to_dict(), "n_agents": self.n_agents,
             "punishment": self.punishment, "dimensions": self.dimensions}
        if self.model is not None:
            d["model"] = self.model.to_dict()
        if self.dim_matrices:
            d["dim_matrices"] = [m.to_dict() for m in self.dim_matrices]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MechanismSpec":
        from .prior import model_from_dict
        return cls(
            matrix=PayoffMatrix.from_dict(d["matrix"]),
            n_agents=int(d["n_agents"]),
            punishment=float(d.get("punishment", 0.0)),
            model=model_from_dict(d["model"]) if "model" in d else None,
            dim_matrices=tuple(PayoffMatrix.from_dict(m) for m in d.get("dim_matrices", ())),
        )


@dataclass(frozen=True)
class PaymentRound:
    """One round of collected reports; reports[i] is agent i's bit, or a
    length-d bit vector in the multidimensional mechanism."""

    reports: tuple
    seed: int = 0
    round_id: int = 0
    pairing: str = "uniform"

    @classmethod
    def from_csv(cls, text: str, seed: int = 0, round_id: int = 0) -> "PaymentRound":
        """Parse reports from CSV: one row per agent, d columns of bits."""
        rows = []
        for line in text.strip().splitlines():
            bits = tuple(int(cell) for cell in line.split(","))
            if any(b not in (0, 1) for b in bits):
                raise OutOfRange(f"reports must be bits, got row {line!r}")
            rows.append(bits)
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise OutOfRange("every agent row needs the same number of bit columns")
        if len(rows[0]) == 1:
            return cls(reports=tuple(r[0] for r in rows), seed=seed, round_id=round_id)
        return cls(reports=tuple(rows), seed=seed, round_id=round_id)


def _round_words(seed: int, round_id: int, agent: int, count: int) -> list[int]:
    """First raw 64-bit outputs of the counter-based stream keyed by
    (seed, round, agent): independent across agents, reproducible, and cheap
    to evaluate for any round without materializing global state."""
    bg = np.random.Philox(key=seed & (2 ** 64 - 1), counter=[0, 0, round_id, agent])
    return [int(w) for w in bg.random_raw(count)]


def _peer_from_word(word: int, n: int, i: int) -> int:
    j = word % (n - 1)  # modulo bias is O(n / 2^64), far below payment precision
    return j if j < i else j + 1


def ppm_pay(spec: MechanismSpec, rnd: PaymentRound, i: int) -> float:
    """Pay agent i against a uniformly drawn peer: h[peer report, own report]."""
    n = spec.n_agents
    if not 0 <= i < n or len(rnd.reports) != n:
        raise IndexOutOfRange(f"agent {i} / reports of length {len(rnd.reports)} vs n={n}")
    word = _round_words(rnd.seed, rnd.round_id, i, 1)[0]
    j = _peer_from_word(word, n, i)
    return spec.matrix.payment(int(rnd.reports[j]), int(rnd.reports[i]))


def ppm_pay_rounds(spec: MechanismSpec, reports, i: int, seed: int, round_ids) -> np.ndarray:
    """Vectorized ppm_pay over many round ids with fixed reports; bit-identical
    to calling ppm_pay round by round."""
    n = spec.n_agents
    if not 0 <= i < n or len(reports) != n:
        raise IndexOutOfRange(f"agent {i} / reports of length {len(reports)} vs n={n}")
    bg = np.random.Philox(key=seed & (2 ** 64 - 1))
    state = bg.state
    counter = state["state"]["counter"]
    counter[3] = i
    words = np.empty(len(round_ids), dtype=np.uint64)
    for pos, rid in enumerate(round_ids):
        counter[2] = rid
        bg.state = state
        words[pos] = bg.random_raw()
    peers = (words % (n - 1)).astype(np.int64)
    peers = peers + (peers >= i)
    rep = np.asarray(reports, dtype=np.int64)
    table = np.array([[spec.matrix.payment(pb, ob) for ob in (0, 1)] for pb in (0, 1)])
    return table[rep[peers], rep[i]]


def mppm_pay(spec: MechanismSpec, rnd: PaymentRound, i: int) -> float:
    """ppm_pay minus the punishment when all other agents reported alike."""
    pay = ppm_pay(spec, rnd, i)
    others = [int(rnd.reports[j]) for j in range(spec.n_agents) if j != i]
    if all(b == others[0] for b in others):
        pay -= spec.punishment
    return pay


def multidim_pay(spec: MechanismSpec, rnd: PaymentRound, i: int) -> float:
    """Pay agent i on a uniformly drawn dimension k against a uniformly drawn
    peer, using the dimension-k matrix.  Reduces to ppm_pay when d = 1."""
    n, d = spec.n_agents, spec.dimensions
    if not 0 <= i < n or len(rnd.reports) != n:
        raise IndexOutOfRange(f"agent {i} / reports of length {len(rnd.reports)} vs n={n}")
    if d == 1:
        return ppm_pay(spec, rnd, i)
    w_dim, w_peer = _round_words(rnd.seed, rnd.round_id, i, 2)
    k = w_dim % d
    j = _peer_from_word(w_peer, n, i)
    return spec.matrix_for(k).payment(int(rnd.reports[j][k]), int(rnd.reports[i][k]))


def punishment_level(t: float, delta_star: float, eps_q: float) -> float:
    """Midpoint of the feasible punishment window:
    (1-t)/(2(1-eps)) + delta_star/(2 eps)."""
    if not (0.0 < eps_q < 1.0):
        raise OutOfRange(f"eps_q must lie in (0,1), got {eps_q}")
    return (1.0 - t) / (2.0 * (1.0 - eps_q)) + delta_star / (2.0 * eps_q)


def focality_condition(eps_q: float, t: float, delta_star: float) -> bool:
    """True when the punishment window is non-empty:
    eps_q < delta_star / (1 - t + delta_star)."""
    return eps_q < delta_star / (1.0 - t + delta_star)


def min_agents_focal(model: GenerativeModel, t: float, delta_star: float,
                     n_max: int = 10 ** 6) -> int:
    """Smallest agent count whose eps_q satisfies the focality condition.

    eps_q is decreasing in n for a non-degenerate model, so the threshold is
    found by doubling then bisecting."""
    if delta_star <= 0.0:
        raise NeverFocal("non-positive payoff gap; no punishment level works")

    def ok(n: int) -> bool:
        return focality_condition(epsilon_q(model.with_agents(n)), t, delta_star)

    if ok(2):
        return 2
    hi = 4
    while hi <= n_max and not ok(hi):
        hi *= 2
    if hi > n_max:
        if not ok(n_max):
            raise NeverFocal(f"focality condition still fails at n = {n_max}")
        hi = n_max
    lo = hi // 2  # ok(lo) is False, ok(hi) is True
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def all_same_report_probability(model: GenerativeModel,
                                strategies: Sequence[tuple[float, float]]) -> float:
    """Probability that every listed agent reports the same bit, under
    conditionally i.i.d. signals: E[prod r_j(p)] + E[prod (1 - r_j(p))] with
    r_j(p) = t0_j + (t1_j - t0_j) p.

    Evaluated by Gauss-Legendre quadrature against the mixing density; the
    integrand stays in [0,1], and the node count makes the rule exact for the
    uniform kind (monomial expansions cancel catastrophically here)."""
    m = len(strategies)
    if model.kind == "discrete":
        ps = np.asarray(model.points)
        ws = np.asarray(model.weights)
    else:
        nodes, gl_weights = np.polynomial.legendre.leggauss(max(96, m + 1))
        if model.kind == "uniform":
            ps = 0.5 * (model.b - model.a) * (nodes + 1.0) + model.a
            ws = gl_weights / 2.0  # density 1/(b-a) times interval half-width
        else:
            ps = 0.5 * (nodes + 1.0)
            norm = math.exp(math.lgamma(model.a + model.b)
                            - math.lgamma(model.a) - math.lgamma(model.b))
            dens = norm * ps ** (model.a - 1.0) * (1.0 - ps) ** (model.b - 1.0)
            ws = gl_weights / 2.0 * dens
    ones = np.ones_like(ps)
    zeros = np.ones_like(ps)
    for t0, t1 in strategies:
        r = t0 + (t1 - t0) * ps
        ones *= r
        zeros *= 1.0 - r
    return float(np.sum(ws * (ones + zeros)))


def mppm_equilibrium_payoffs(spec: MechanismSpec) -> dict:
    """Expected per-agent payoff of every enumerated equilibrium under the
    punished mechanism, computed analytically from the generative model."""
    if spec.model is None:
        raise OutOfRange("equilibrium payoffs under punishment need the generative model")
    prior = prior_from_model(spec.model)
    eqs = equilibrium_set(prior, spec.matrix)
    m = spec.n_agents - 1
    out = {}
    for e in eqs.equilibria:
        p_same = all_same_report_probability(spec.model, [(e.strategy.t0, e.strategy.t1)] * m)
        out[e.label] = e.payoff - spec.punishment * p_same
    return out


def build_mppm(model: GenerativeModel, epsilon: Optional[float] = None) -> MechanismSpec:
    """Assemble the punished mechanism for a generative model: the optimal
    matrix for the induced prior plus the punishment keyed to eps_q."""
    from .optimizer import optimal_mechanism

    prior = prior_from_model(model)
    report = optimal_mechanism(prior, epsilon=epsilon)
    p = punishment_level(report.truth_payoff, report.delta_star, epsilon_q(model))
    return MechanismSpec(matrix=report.mechanism, n_agents=model.n_agents,
                         punishment=p, model=model)


def renormalized(spec: MechanismSpec) -> MechanismSpec:
    """Affine rescale so all possible payments (including punished ones) land
    in [0,1]; focality comparisons are preserved."""
    entries = spec.matrix.entries()
    lo = min(entries) - spec.punishment
    hi = max(entries)
    span = hi - lo
    if span <= 0.0:
        raise OutOfRange("payment range is empty; nothing to rescale")
    matrix = PayoffMatrix(*((v - lo) / span for v in entries))
    return MechanismSpec(matrix=matrix, n_agents=spec.n_agents,
                         punishment=spec.punishment / span, model=spec.model,
                         dim_matrices=spec.dim_matrices)
