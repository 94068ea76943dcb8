"""Bite sequencing: simulate a user's meals from their affinity profile,
train the discrete-emission model, update it online with observed meals,
and compare next-bite prediction accuracy against a random baseline."""

import numpy as np

from sparcs import (
    EatingPreference,
    MealSpec,
    UserPrefProfile,
    evaluate_accuracy,
    online_update,
    predict_next,
    random_policy,
    simulate_sequences,
    train_preference_model,
)

meal = MealSpec(("banana", "kiwi", "grape", "carrot"), bites_per_item=3)
user = UserPrefProfile(
    {"banana": 5, "kiwi": 4, "grape": 2, "carrot": 1},
    EatingPreference.SAVE_FAVORITE_FOR_LAST,
)

# what the simulator believes about the user is a coarse self-report;
# jitter the affinities to mimic that gap
rng = np.random.default_rng(0)
reported = UserPrefProfile(
    {k: float(np.clip(v + rng.normal(0, 1), 1, 5)) for k, v in user.affinity.items()},
    user.eating_preference,
)

sim_corpus = simulate_sequences(reported, meal, 50, temperature=0.5, rng_seed=1)
hs = train_preference_model(sim_corpus, n_symbols=len(meal.items), symbols=meal.items, rng_seed=2)

observed = simulate_sequences(user, meal, 6, temperature=0.5, rng_seed=3)
seventh = simulate_sequences(user, meal, 1, temperature=0.5, rng_seed=4)[0]
ho = online_update(hs, observed, user_weight=10.0, sim_corpus=sim_corpus)

names = lambda seq: [meal.items[i] for i in seq]
print("observed meal #1:", names(observed[0]))
print("seventh meal    :", names(seventh))

acc = {
    "HS (simulated only)": evaluate_accuracy(lambda p, r: predict_next(hs, p, r), seventh),
    "HO (online update)": evaluate_accuracy(lambda p, r: predict_next(ho, p, r), seventh),
    "Random": float(np.mean([
        evaluate_accuracy(lambda p, r: random_policy(r, rng), seventh) for _ in range(200)
    ])),
}
print("\nseventh-meal prediction accuracy:")
for name, value in acc.items():
    print(f"  {name:<20} {value:.3f}")
