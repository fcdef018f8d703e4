"""Query engine, command-line interface, and HTTP service.

The engine loads a signature store once, builds the LSH index, and then
answers any number of concurrent queries against the immutable pair.  The
CLI and the HTTP endpoint share the same query path, so their answers are
identical for the same store and request.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from . import community as community_mod
from .errors import GraphSketchError, InvalidParameterError
from .expansion import (
    ExpansionResult,
    SeedSet,
    StopKind,
    StoppingRule,
    expand_ac,
    expand_ms,
    make_stopping_rule,
)
from .ingest import load_edge_list
from .lsh import BandingConfig, LshIndex, build_index, query_candidates
from .sketch import HashFamily, SignatureMatrix, build_signatures, load_signatures, save_signatures

SCHEMA_VERSION = 1
MAX_SEEDS = 1000


def default_banding(k: int) -> BandingConfig:
    """Largest standard banding that fits the signature length."""
    rows = 2 if k >= 2 else 1
    bands = min(500, k // rows)
    return BandingConfig(max(1, bands), rows)


@dataclass(eq=False)
class Engine:
    """Immutable store + index pair shared by every query."""

    matrix: SignatureMatrix
    index: LshIndex

    @classmethod
    def from_store(cls, path: str, banding: BandingConfig | None = None) -> "Engine":
        matrix = load_signatures(path)
        config = banding or default_banding(matrix.k)
        return cls(matrix, build_index(matrix, config))

    def query(
        self,
        seeds: list[int],
        method: str = "ms",
        stop: StoppingRule | None = None,
        community_detection: bool = False,
        edge_threshold: float = 0.01,
        walk_length: int = 4,
    ) -> dict:
        """Run one expansion (+ optional community map); returns the response dict."""
        if method not in ("ms", "ac"):
            raise InvalidParameterError(f"unknown method {method!r}")
        if not 0.0 <= edge_threshold <= 1.0:
            raise InvalidParameterError("edge_threshold must lie in [0, 1]")
        stop = stop or make_stopping_rule(StopKind.FIXED_COUNT, 100)
        seed_set = SeedSet.of(seeds)
        resolved = [s for s in seed_set.seeds if self.matrix.row_of(s) is not None]
        if not resolved:
            raise InvalidParameterError("none of the seeds exist in the store")

        t0 = time.perf_counter()
        candidates = query_candidates(self.index, list(seed_set.seeds))
        t_lsh = time.perf_counter()
        expander = expand_ms if method == "ms" else expand_ac
        result: ExpansionResult = expander(
            self.index, self.matrix, seed_set, stop, candidates=candidates
        )
        t1 = time.perf_counter()

        community_json = None
        t2 = t1
        if community_detection:
            members = resolved + [acct for acct, _ in result.ranked]
            subgraph = community_mod.build_weighted_subgraph(self.matrix, members, edge_threshold)
            cmap = community_mod.walktrap(subgraph, walk_length)
            community_json = json.loads(cmap.to_json())
            t2 = time.perf_counter()

        return {
            "schema_version": SCHEMA_VERSION,
            "ranked": [{"id": acct, "distance": dist} for acct, dist in result.ranked],
            "stop_reason": result.stop_reason.value,
            "coverage": result.coverage,
            "community": community_json,
            "timings": {
                "lsh_ms": (t_lsh - t0) * 1000.0,
                "rank_ms": (t1 - t_lsh) * 1000.0,
                "community_ms": (t2 - t1) * 1000.0,
            },
            "warnings": {"unindexed_seeds": list(result.unindexed_seeds)},
        }

    def lookup(self, prefix: str, limit: int = 50) -> list[dict]:
        """Accounts whose decimal id starts with the prefix."""
        out = []
        for i, acct in enumerate(self.matrix.ids):
            if str(int(acct)).startswith(prefix):
                out.append({"id": int(acct), "degree": int(self.matrix.degrees[i])})
                if len(out) >= limit:
                    break
        return out


# ---------------------------------------------------------------------------
# HTTP service


def create_app(engine: Engine, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="graphsketch", version="0.1.0")

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    def error(status: int, code: str, message: str, fld: str | None = None) -> JSONResponse:
        body = {"code": code, "message": message}
        if fld:
            body["field"] = fld
        return JSONResponse(body, status_code=status)

    @app.get("/health")
    def health() -> PlainTextResponse:
        return PlainTextResponse("ok")

    @app.get("/accounts")
    def accounts(prefix: str = "") -> JSONResponse:
        return JSONResponse({"accounts": engine.lookup(prefix)})

    @app.post("/query")
    async def query(request: Request):
        try:
            payload = await request.json()
        except Exception:
            return error(400, "bad_json", "request body is not valid JSON")
        if not isinstance(payload, dict):
            return error(400, "bad_request", "request body must be an object")
        seeds = payload.get("seeds")
        if not isinstance(seeds, list) or not seeds or not all(
            isinstance(s, int) and not isinstance(s, bool) for s in seeds
        ):
            return error(400, "bad_seeds", "seeds must be a non-empty list of integers", "seeds")
        if len(seeds) > MAX_SEEDS:
            return error(413, "too_many_seeds", f"at most {MAX_SEEDS} seeds per query", "seeds")
        method = payload.get("method", "ms")
        if method not in ("ms", "ac"):
            return error(400, "bad_method", "method must be 'ms' or 'ac'", "method")
        stop_desc = payload.get("stop", {"kind": "fixed_count", "value": 100})
        try:
            stop = make_stopping_rule(stop_desc.get("kind", "fixed_count"), stop_desc.get("value", 100))
        except (GraphSketchError, ValueError, AttributeError) as exc:
            return error(400, "bad_stop", str(exc), "stop")
        community_detection = bool(payload.get("community_detection", False))
        edge_threshold = payload.get("edge_threshold", 0.01)
        if not isinstance(edge_threshold, (int, float)) or not 0.0 <= edge_threshold <= 1.0:
            return error(400, "bad_threshold", "edge_threshold must lie in [0, 1]", "edge_threshold")
        try:
            response = engine.query(
                seeds,
                method=method,
                stop=stop,
                community_detection=community_detection,
                edge_threshold=float(edge_threshold),
            )
        except GraphSketchError as exc:
            return error(400, "query_failed", str(exc))
        return JSONResponse(response)

    return app


# ---------------------------------------------------------------------------
# CLI


def _cmd_build(args: argparse.Namespace) -> int:
    if args.k < 1:
        print("error: --k must be >= 1", file=sys.stderr)
        return 2
    t0 = time.perf_counter()
    dataset = load_edge_list(args.edges, direction_mode=args.direction, min_degree=args.min_degree)
    family = HashFamily.create(args.k, dataset.universe_size, args.seed)
    matrix = build_signatures(dataset, family, workers=args.workers)
    save_signatures(matrix, args.out)
    elapsed = time.perf_counter() - t0
    print(
        f"built {len(matrix)} signatures (k={args.k}, universe={dataset.universe_size}, "
        f"modulus={family.modulus}) in {elapsed:.2f}s -> {args.out}"
    )
    return 0


def _parse_seeds(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise InvalidParameterError(f"seeds must be integers, got {text!r}") from None


def _cmd_query(args: argparse.Namespace) -> int:
    engine = Engine.from_store(args.store)
    stop = make_stopping_rule(args.stop_kind, args.stop_value)
    try:
        response = engine.query(
            _parse_seeds(args.seeds),
            method=args.method,
            stop=stop,
            community_detection=args.community,
            edge_threshold=args.edge_threshold,
        )
    except GraphSketchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps(response))
        return 0
    if response["warnings"]["unindexed_seeds"]:
        print(f"# skipped seeds: {response['warnings']['unindexed_seeds']}")
    print(f"# stop reason: {response['stop_reason']}")
    for entry in response["ranked"]:
        print(f"{entry['id']}\t{entry['distance']:.4f}")
    if response["community"]:
        labels = response["community"]["labels"]
        print(f"# communities: {len(set(labels.values()))}, modularity {response['community']['modularity']:.4f}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    host, _, port = args.bind.rpartition(":")
    engine = Engine.from_store(args.store)
    app = create_app(engine, ui_dir=args.ui)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="graphsketch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="sketch an edge list into a signature store")
    p_build.add_argument("--edges", required=True)
    p_build.add_argument("--out", required=True)
    p_build.add_argument("--k", type=int, default=1000)
    p_build.add_argument("--seed", type=int, default=0)
    p_build.add_argument("--workers", type=int, default=1)
    p_build.add_argument("--direction", choices=["undirected", "as_given"], default="undirected")
    p_build.add_argument("--min-degree", type=int, default=1)
    p_build.set_defaults(func=_cmd_build)

    p_query = sub.add_parser("query", help="expand seeds against a signature store")
    p_query.add_argument("--store", required=True)
    p_query.add_argument("--seeds", required=True, help="comma- or space-separated account ids")
    p_query.add_argument("--method", choices=["ms", "ac"], default="ms")
    p_query.add_argument("--stop-kind", choices=["fixed_count", "coverage_threshold"], default="fixed_count")
    p_query.add_argument("--stop-value", type=float, default=100)
    p_query.add_argument("--json", action="store_true")
    p_query.add_argument("--community", action="store_true")
    p_query.add_argument("--edge-threshold", type=float, default=0.01)
    p_query.set_defaults(func=_cmd_query)

    p_serve = sub.add_parser("serve", help="run the HTTP query service")
    p_serve.add_argument("--store", required=True)
    p_serve.add_argument("--bind", default="127.0.0.1:8000")
    p_serve.add_argument("--ui", default=None, help="directory of built browser assets to mount at /ui")
    p_serve.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GraphSketchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
