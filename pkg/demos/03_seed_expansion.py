"""Seed expansion: ranking candidates and stopping.

Expands a handful of seed accounts with the fixed-centre ranking and with
the agglomerative variant, under both stopping rules: a fixed result count
and an audience-coverage threshold.
"""

from graphsketch import (
    BandingConfig,
    HashFamily,
    SeedSet,
    build_index,
    build_signatures,
    expand_ac,
    expand_ms,
    generate_planted_partition,
    make_stopping_rule,
)

dataset, truth = generate_planted_partition(
    n_accounts=600, n_communities=6, universe=6000, p_in=0.3, p_out=0.01, seed=5
)
family = HashFamily.create(k=1000, universe_size=dataset.universe_size, master_seed=5)
matrix = build_signatures(dataset, family, workers=2)
index = build_index(matrix, BandingConfig(500, 2))

members = sorted(truth.communities[2])
seeds = SeedSet.of(members[:10])
print(f"seeds: {list(seeds.seeds)} (community 2 has {len(members)} members)")

for name, expander in (("fixed-centre", expand_ms), ("agglomerative", expand_ac)):
    result = expander(index, matrix, seeds, make_stopping_rule("fixed_count", 15))
    hits = sum(1 for acct, _ in result.ranked if acct in set(members))
    print(f"\n{name} ranking, top 15 ({hits} correct):")
    for acct, dist in result.ranked[:5]:
        tag = "+" if acct in set(members) else "-"
        print(f"  {tag} account {acct:4d}  distance {dist:.3f}")
    print(f"  ... stop reason: {result.stop_reason.value}")

# coverage stopping: grow until the audience reaches 2500 unique neighbours
covered = expand_ms(index, matrix, seeds, make_stopping_rule("coverage_threshold", 2500))
print(f"\ncoverage run: {len(covered.ranked)} accounts reach an estimated "
      f"{covered.coverage[-1]:.0f} unique neighbours ({covered.stop_reason.value})")
