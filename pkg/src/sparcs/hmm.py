"""Bite-sequencing preference model.

Synthetic bite sequences are generated from per-item affinity scores and a
high-level eating preference; a discrete-emission hidden Markov model is
fit to them with weighted Baum-Welch, updated online by re-weighting
observed meals into the corpus, and queried for the next bite under the
remaining-inventory constraint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import canon
from .errors import SparcsError


class EmptyMeal(SparcsError):
    """Meal specification without items."""


class DegenerateInput(SparcsError):
    """Training corpus carries no weight."""


class NoRemainingItems(SparcsError):
    """Prediction requested with an exhausted inventory."""


class EatingPreference(str, Enum):
    SAVE_FAVORITE_FOR_LAST = "SaveFavoriteForLast"
    FAVORITE_FIRST = "FavoriteFirst"
    MIX_AND_MATCH = "MixAndMatch"


@dataclass(frozen=True)
class MealSpec:
    items: tuple
    bites_per_item: int

    def __post_init__(self):
        if len(self.items) == 0:
            raise EmptyMeal("meal needs at least one item")
        if len(set(self.items)) != len(self.items):
            raise SparcsError("meal items must be unique")
        if self.bites_per_item < 1:
            raise SparcsError("bites_per_item must be >= 1")

    @property
    def length(self) -> int:
        return len(self.items) * self.bites_per_item

    def full_inventory(self) -> np.ndarray:
        return np.full(len(self.items), self.bites_per_item, dtype=int)


@dataclass(frozen=True)
class UserPrefProfile:
    affinity: dict                      # item name -> score in [1, 5]
    eating_preference: EatingPreference

    def __post_init__(self):
        for item, score in self.affinity.items():
            if not 1.0 <= score <= 5.0:
                raise SparcsError(f"affinity for {item!r} is {score}, outside [1, 5]")

    def affinity_vector(self, spec: MealSpec) -> np.ndarray:
        missing = [i for i in spec.items if i not in self.affinity]
        if missing:
            raise SparcsError(f"affinity missing for {missing}")
        return np.array([float(self.affinity[i]) for i in spec.items])


def _preference_scores(profile, spec, prev: int | None) -> np.ndarray:
    """Unnormalized desirability used by the generator, before temperature."""
    a = profile.affinity_vector(spec)
    if profile.eating_preference is EatingPreference.FAVORITE_FIRST:
        return a
    if profile.eating_preference is EatingPreference.SAVE_FAVORITE_FOR_LAST:
        return -a
    scores = np.ones(len(spec.items))
    if prev is not None:
        scores[prev] = 0.25
    return scores


def _pick(scores, remaining, temperature, rng, repeat_weights: bool) -> int:
    live = remaining > 0
    if temperature == 0.0:
        masked = np.where(live, scores, -np.inf)
        return int(np.argmax(masked))
    if repeat_weights:
        w = np.where(live, scores, 0.0)
    else:
        shifted = (scores - scores[live].max()) / temperature
        w = np.where(live, np.exp(np.where(live, shifted, 0.0)), 0.0)
    return int(rng.choice(len(scores), p=w / w.sum()))


def simulate_sequences(
    profile: UserPrefProfile,
    meal_spec: MealSpec,
    n_meals: int,
    temperature: float,
    rng_seed,
) -> list:
    """Complete simulated meals as lists of item indices.

    Sampling weight over items with bites remaining: favorite-first uses
    exp(affinity/t), save-for-last uses exp(-affinity/t), mix-and-match is
    uniform with a 0.25 penalty on repeating the previous bite. t = 0 is
    the deterministic argmax with lowest-index tie-break.
    """
    if n_meals < 1:
        raise SparcsError("n_meals must be >= 1")
    if temperature < 0:
        raise SparcsError("temperature must be >= 0")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    mix = profile.eating_preference is EatingPreference.MIX_AND_MATCH
    meals = []
    for _ in range(n_meals):
        remaining = meal_spec.full_inventory()
        prev = None
        seq = []
        for _ in range(meal_spec.length):
            scores = _preference_scores(profile, meal_spec, prev)
            item = _pick(scores, remaining, temperature, rng, repeat_weights=mix)
            seq.append(item)
            remaining[item] -= 1
            prev = item
        meals.append(seq)
    return meals


@dataclass(frozen=True)
class DiscreteHmm:
    """Discrete-emission HMM over a fixed symbol alphabet."""

    pi: np.ndarray                      # (n_states,)
    a: np.ndarray                       # (n_states, n_states)
    b: np.ndarray                       # (n_states, n_symbols)
    symbols: tuple = ()
    trained_on: dict = field(default_factory=dict)

    @property
    def n_states(self) -> int:
        return self.pi.shape[0]

    @property
    def n_symbols(self) -> int:
        return self.b.shape[1]

    def validate(self, tol: float = 1e-9) -> None:
        for name, arr in (("pi", self.pi[None, :]), ("A", self.a), ("B", self.b)):
            if np.any(arr < 0):
                raise SparcsError(f"{name} has negative entries")
            if np.any(np.abs(arr.sum(axis=1) - 1.0) > tol):
                raise SparcsError(f"{name} rows do not sum to 1 within {tol}")

    def to_json(self) -> dict:
        return {
            "n_states": self.n_states,
            "symbols": list(self.symbols),
            "pi": self.pi.tolist(),
            "A": self.a.tolist(),
            "B": self.b.tolist(),
            "trained_on": dict(self.trained_on),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "DiscreteHmm":
        model = cls(
            pi=np.array(doc["pi"], dtype=float),
            a=np.array(doc["A"], dtype=float),
            b=np.array(doc["B"], dtype=float),
            symbols=tuple(doc.get("symbols", ())),
            trained_on=dict(doc.get("trained_on", {})),
        )
        model.validate(1e-6)
        return model

    def dumps(self) -> str:
        return canon.dumps(self.to_json())


def random_hmm(n_states: int, n_symbols: int, rng, symbols=()) -> DiscreteHmm:
    """Symmetric Dirichlet(1.0) rows; the standard EM starting point here."""
    return DiscreteHmm(
        pi=rng.dirichlet(np.ones(n_states)),
        a=np.vstack([rng.dirichlet(np.ones(n_states)) for _ in range(n_states)]),
        b=np.vstack([rng.dirichlet(np.ones(n_symbols)) for _ in range(n_states)]),
        symbols=tuple(symbols),
    )


def _forward_scaled(hmm: DiscreteHmm, seq) -> tuple:
    """Normalized forward variables and per-step scale factors."""
    t_len = len(seq)
    alphas = np.empty((t_len, hmm.n_states))
    scales = np.empty(t_len)
    for t, sym in enumerate(seq):
        raw = hmm.pi * hmm.b[:, sym] if t == 0 else (alphas[t - 1] @ hmm.a) * hmm.b[:, sym]
        total = float(raw.sum())
        scales[t] = total
        # zero total means an impossible prefix; likelihood becomes -inf
        alphas[t] = raw / total if total > 0.0 else np.full(hmm.n_states, 1.0 / hmm.n_states)
    return alphas, scales


def forward_loglik(hmm: DiscreteHmm, sequence) -> float:
    """log P(sequence | model) via the scaled forward recursion."""
    if len(sequence) == 0:
        return 0.0
    _, scales = _forward_scaled(hmm, sequence)
    if np.any(scales <= 0.0):
        return -math.inf
    return float(np.sum(np.log(scales)))


def state_posterior(hmm: DiscreteHmm, prefix) -> np.ndarray:
    """P(state at the last prefix position | prefix); pi for an empty prefix."""
    if len(prefix) == 0:
        return hmm.pi.copy()
    alphas, _ = _forward_scaled(hmm, prefix)
    return alphas[-1]


def baum_welch(
    hmm0: DiscreteHmm,
    sequences,
    seq_weights=None,
    max_iter: int = 100,
    tol: float = 1e-6,
) -> tuple:
    """Weighted EM for a discrete HMM: (trained model, log-likelihood trace).

    Per-sequence sufficient statistics are scaled by seq_weights. Stops when
    the weighted log-likelihood gain drops below tol. The trace is
    non-decreasing up to floating-point slack.
    """
    sequences = [list(s) for s in sequences]
    if seq_weights is None:
        seq_weights = [1.0] * len(sequences)
    weights = np.asarray(list(seq_weights), dtype=float)
    if len(weights) != len(sequences):
        raise SparcsError("one weight per sequence required")
    if np.any(weights < 0):
        raise SparcsError("sequence weights must be >= 0")
    if len(sequences) == 0 or float(weights.sum()) == 0.0:
        raise DegenerateInput("training corpus has zero total weight")
    for s in sequences:
        if len(s) == 0:
            raise SparcsError("sequences must be nonempty")
        if any(not 0 <= sym < hmm0.n_symbols for sym in s):
            raise SparcsError("sequence symbol outside the model alphabet")

    # Identical sequences are merged with summed weights, then batched by
    # length; the statistics are unchanged and the E-step vectorizes.
    merged = {}
    for seq, w in zip(sequences, weights):
        if w == 0.0:
            continue
        key = tuple(seq)
        merged[key] = merged.get(key, 0.0) + float(w)
    by_len = {}
    for seq, w in merged.items():
        by_len.setdefault(len(seq), ([], []))
        by_len[len(seq)][0].append(seq)
        by_len[len(seq)][1].append(w)
    batches = [
        (np.array(seqs, dtype=int), np.array(ws, dtype=float)) for seqs, ws in by_len.values()
    ]

    pi, a, b = hmm0.pi.copy(), hmm0.a.copy(), hmm0.b.copy()
    n, m = hmm0.n_states, hmm0.n_symbols
    trace = []
    prev_ll = -math.inf
    for _ in range(max_iter):
        pi_acc = np.zeros(n)
        a_acc = np.zeros((n, n))
        b_acc = np.zeros((n, m))
        ll = 0.0
        for obs, w in batches:
            s_count, t_len = obs.shape
            emit = b.T[obs]                              # (S, T, n)
            alphas = np.empty((s_count, t_len, n))
            scales = np.empty((s_count, t_len))
            raw = pi[None, :] * emit[:, 0]
            for t in range(t_len):
                if t > 0:
                    raw = (alphas[:, t - 1] @ a) * emit[:, t]
                total = raw.sum(axis=1)
                scales[:, t] = total
                safe = np.where(total > 0.0, total, 1.0)
                alphas[:, t] = raw / safe[:, None]
            if np.any(scales <= 0.0):
                ll = -math.inf
            else:
                ll += float(w @ np.log(scales).sum(axis=1))
            betas = np.empty((s_count, t_len, n))
            betas[:, -1] = 1.0
            for t in range(t_len - 2, -1, -1):
                nxt = emit[:, t + 1] * betas[:, t + 1]
                betas[:, t] = (nxt @ a.T) / np.maximum(scales[:, t + 1], 1e-300)[:, None]
            gammas = alphas * betas
            gammas /= np.maximum(gammas.sum(axis=2, keepdims=True), 1e-300)
            pi_acc += w @ gammas[:, 0]
            if t_len > 1:
                right = emit[:, 1:] * betas[:, 1:] / np.maximum(scales[:, 1:], 1e-300)[:, :, None]
                a_acc += a * np.einsum("sti,stj,s->ij", alphas[:, :-1], right, w)
            for sym in range(m):
                mask = (obs == sym).astype(float)
                b_acc[:, sym] += np.einsum("st,stn,s->n", mask, gammas, w)
        trace.append(ll)
        if ll - prev_ll < tol and len(trace) > 1:
            break
        prev_ll = ll
        pi = pi_acc / pi_acc.sum() if pi_acc.sum() > 0 else pi
        a = _normalize_rows(a_acc, fallback=a)
        b = _normalize_rows(b_acc, fallback=b)
    trained = DiscreteHmm(pi, a, b, hmm0.symbols, dict(hmm0.trained_on))
    trained.validate()
    return trained, trace


def _normalize_rows(acc: np.ndarray, fallback: np.ndarray) -> np.ndarray:
    # States with zero expected visits keep their previous rows; they do
    # not affect the likelihood either way.
    sums = acc.sum(axis=1, keepdims=True)
    out = fallback.copy()
    hit = sums[:, 0] > 0
    out[hit] = acc[hit] / sums[hit]
    return out


def train_preference_model(
    sequences,
    n_symbols: int,
    symbols=(),
    seq_weights=None,
    n_states: int = 4,
    restarts: int = 5,
    max_iter: int = 100,
    tol: float = 1e-6,
    rng_seed=0,
) -> DiscreteHmm:
    """Baum-Welch from several seeded Dirichlet starts; best final loglik wins."""
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    best, best_ll = None, -math.inf
    for _ in range(max(1, restarts)):
        hmm0 = random_hmm(n_states, n_symbols, rng, symbols)
        model, trace = baum_welch(hmm0, sequences, seq_weights, max_iter, tol)
        if trace[-1] > best_ll:
            best, best_ll = model, trace[-1]
    return best


def online_update(
    hmm_hs: DiscreteHmm,
    user_sequences,
    user_weight: float,
    sim_corpus,
    max_iter: int = 100,
    tol: float = 1e-6,
) -> DiscreteHmm:
    """Fold observed meals into the corpus at user_weight and re-run EM,
    initialized at the already-trained model."""
    if len(user_sequences) == 0:
        raise SparcsError("online update needs at least one observed sequence")
    sequences = list(sim_corpus) + list(user_sequences)
    weights = [1.0] * len(sim_corpus) + [float(user_weight)] * len(user_sequences)
    model, _ = baum_welch(hmm_hs, sequences, weights, max_iter, tol)
    return model


def _as_counts(remaining, n_symbols: int) -> np.ndarray:
    if isinstance(remaining, dict):
        counts = np.zeros(n_symbols, dtype=int)
        for idx, count in remaining.items():
            counts[idx] = count
        return counts
    return np.asarray(remaining, dtype=int)


def predict_next(hmm: DiscreteHmm, prefix, remaining) -> int:
    """Most likely next item with bites remaining; lowest index on ties."""
    counts = _as_counts(remaining, hmm.n_symbols)
    if not np.any(counts > 0):
        raise NoRemainingItems("no items left to predict")
    posterior = state_posterior(hmm, prefix)
    if len(prefix) == 0:
        dist = posterior @ hmm.b
    else:
        dist = (posterior @ hmm.a) @ hmm.b
    dist = np.where(counts > 0, dist, 0.0)
    total = dist.sum()
    if total <= 0.0:
        # model assigns zero mass to every live item: fall back to inventory
        dist = (counts > 0).astype(float)
        total = dist.sum()
    return int(np.argmax(dist / total))


def random_policy(remaining, rng_seed) -> int:
    """Uniform choice over items with positive remaining count."""
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    if isinstance(remaining, dict):
        counts = _as_counts(remaining, max(remaining) + 1 if remaining else 0)
    else:
        counts = np.asarray(remaining, dtype=int)
    live = np.flatnonzero(counts > 0)
    if live.size == 0:
        raise NoRemainingItems("no items left to choose")
    return int(rng.choice(live))


def evaluate_accuracy(policy, test_meal) -> float:
    """Fraction of positions where policy(prefix, remaining) matches the meal.

    The prefix and the remaining inventory are always the true ones
    (teacher forcing).
    """
    test_meal = list(test_meal)
    if not test_meal:
        raise SparcsError("test meal must be complete")
    n_items = max(test_meal) + 1
    remaining = np.bincount(test_meal, minlength=n_items).astype(int)
    matches = 0
    prefix = []
    for actual in test_meal:
        if policy(prefix, remaining.copy()) == actual:
            matches += 1
        prefix.append(actual)
        remaining[actual] -= 1
    return matches / len(test_meal)


def expected_random_accuracy(profile: UserPrefProfile, spec: MealSpec, temperature: float) -> float:
    """Exact expected accuracy of the uniform-random policy for this user.

    At each position the match probability is 1/k where k counts distinct
    items remaining, so the expectation only depends on the inventory
    trajectory. Dynamic programming over (remaining counts, previous item)
    states of the user's own generator.
    """
    n = len(spec.items)
    start = tuple([spec.bites_per_item] * n)
    states = {(start, None): 1.0}
    total = 0.0
    for _ in range(spec.length):
        nxt = {}
        for (counts, prev), prob in states.items():
            live = [i for i in range(n) if counts[i] > 0]
            total += prob / len(live)
            scores = _preference_scores(profile, spec, prev)
            if temperature == 0.0:
                masked = [scores[i] if counts[i] > 0 else -math.inf for i in range(n)]
                choices = {int(np.argmax(masked)): 1.0}
            elif profile.eating_preference is EatingPreference.MIX_AND_MATCH:
                w = np.array([scores[i] if counts[i] > 0 else 0.0 for i in range(n)])
                w = w / w.sum()
                choices = {i: w[i] for i in live}
            else:
                shift = max(scores[i] for i in live)
                w = np.array(
                    [math.exp((scores[i] - shift) / temperature) if counts[i] > 0 else 0.0 for i in range(n)]
                )
                w = w / w.sum()
                choices = {i: w[i] for i in live}
            for item, p_item in choices.items():
                if p_item == 0.0:
                    continue
                new_counts = list(counts)
                new_counts[item] -= 1
                key = (tuple(new_counts), item if profile.eating_preference is EatingPreference.MIX_AND_MATCH else None)
                nxt[key] = nxt.get(key, 0.0) + prob * p_item
        states = nxt
    return total / spec.length
