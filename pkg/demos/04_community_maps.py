"""From ranked accounts to a structured community map.

Takes an expansion result, embeds it in a weighted similarity graph, and
partitions it by random-walk agglomeration; mixing seeds from two planted
communities produces a two-community map.
"""

from graphsketch import (
    BandingConfig,
    HashFamily,
    SeedSet,
    build_index,
    build_signatures,
    build_weighted_subgraph,
    expand_ms,
    generate_planted_partition,
    make_stopping_rule,
    modularity,
    walktrap,
)

dataset, truth = generate_planted_partition(
    n_accounts=600, n_communities=6, universe=6000, p_in=0.3, p_out=0.01, seed=9
)
family = HashFamily.create(k=1000, universe_size=dataset.universe_size, master_seed=9)
matrix = build_signatures(dataset, family, workers=2)
index = build_index(matrix, BandingConfig(500, 2))

# seeds drawn from two different planted communities
seeds = SeedSet.of(sorted(truth.communities[1])[:5] + sorted(truth.communities[4])[:5])
result = expand_ms(index, matrix, seeds, make_stopping_rule("fixed_count", 60))
members = list(seeds.seeds) + [acct for acct, _ in result.ranked]

subgraph = build_weighted_subgraph(matrix, members, threshold=0.01)
print(f"weighted subgraph: {len(subgraph)} vertices, "
      f"{(subgraph.weights > 0).sum() // 2} edges above threshold")

cmap = walktrap(subgraph, t=4)
groups: dict[int, list[int]] = {}
for acct, com in cmap.labels.items():
    groups.setdefault(com, []).append(acct)
print(f"partition: {len(groups)} communities, modularity {cmap.modularity:.3f} "
      f"(recomputed {modularity(subgraph, cmap.labels):.3f})")
for com, accts in sorted(groups.items()):
    true_tags = {truth.label_of(a) for a in accts}
    print(f"  community {com}: {len(accts)} accounts, planted tags {sorted(true_tags)}")

print("\nJSON payload for the browser map (truncated):")
print(cmap.to_json()[:200] + " ...")
