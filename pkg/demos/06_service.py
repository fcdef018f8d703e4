"""The persistent store, the CLI, and the HTTP service.

Writes an edge list, builds a signature store with the command-line tool,
queries it, and exercises the HTTP endpoints in-process.
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from graphsketch import Engine, create_app, generate_planted_partition
from graphsketch.service import main

workdir = Path(tempfile.mkdtemp(prefix="graphsketch-demo-"))
edges = workdir / "edges.tsv"

# derive a small edge list from a planted graph: account -> neighbour id
dataset, truth = generate_planted_partition(120, 3, 1200, 0.4, 0.02, seed=21)
with open(edges, "w") as fh:
    for ns in dataset.accounts:
        for nbr in ns.neighbors:
            fh.write(f"{ns.account + 10000}\t{int(nbr)}\n")  # offset ids out of the dst space

store = workdir / "store.gsm"
print("== CLI build ==")
main(["build", "--edges", str(edges), "--out", str(store), "--k", "512", "--seed", "1",
      "--workers", "2", "--direction", "as_given"])

print("\n== CLI query ==")
seeds = ",".join(str(a + 10000) for a in sorted(truth.communities[0])[:5])
main(["query", "--store", str(store), "--seeds", seeds,
      "--method", "ms", "--stop-kind", "fixed_count", "--stop-value", "8"])

print("\n== HTTP service (in-process) ==")
engine = Engine.from_store(str(store))
client = TestClient(create_app(engine))
print("GET /health ->", client.get("/health").text)
print("GET /accounts?prefix=100 ->", client.get("/accounts", params={"prefix": "100"}).json()["accounts"][:3], "...")
body = {
    "seeds": [int(s) for s in seeds.split(",")],
    "method": "ms",
    "stop": {"kind": "fixed_count", "value": 8},
    "community_detection": True,
    "edge_threshold": 0.01,
}
resp = client.post("/query", json=body).json()
print("POST /query ->", json.dumps({
    "ranked": resp["ranked"][:3],
    "stop_reason": resp["stop_reason"],
    "communities": len(set(resp["community"]["labels"].values())),
    "timings": {k: round(v, 2) for k, v in resp["timings"].items()},
}, indent=2))
print(f"\n(long-running server: graphsketch serve --store {store} --bind 127.0.0.1:8000)")
