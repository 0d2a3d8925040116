#!/usr/bin/env python3
"""Scripted evaluation worker for bridge tests.

Modes: echo, silent, garbage, crash, crash-once, wrong-id, error, slow-once.
"""
import argparse
import json
import os
import sys
import time


def reply(obj):
    sys.stdout.write(json.dumps(obj, separators=(",", ":")) + "\n")
    sys.stdout.flush()


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--mode", default="echo")
    parser.add_argument("--fitness", type=float, default=0.5)
    parser.add_argument("--marker", default="")
    parser.add_argument("--log", default="")
    args = parser.parse_args()

    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        request = json.loads(line)
        if args.log:
            with open(args.log, "a") as fh:
                fh.write(line + "\n")
        first = bool(args.marker) and not os.path.exists(args.marker)
        if first:
            open(args.marker, "w").close()

        if args.mode == "silent":
            time.sleep(3600)
        elif args.mode == "garbage":
            sys.stdout.write("this is not json\n")
            sys.stdout.flush()
        elif args.mode == "crash" or (args.mode == "crash-once" and first):
            sys.exit(3)
        elif args.mode == "slow-once" and first:
            time.sleep(3600)
        elif args.mode == "wrong-id":
            reply({"id": request["id"] + 1, "status": "ok", "fitness": args.fitness, "metrics": {}})
        elif args.mode == "error":
            reply({"id": request["id"], "status": "error", "metrics": {}, "message": "build"})
        else:
            nodes = len(request.get("phenotype", {}).get("nodes", []))
            reply({
                "id": request["id"],
                "status": "ok",
                "fitness": args.fitness,
                "metrics": {"budget": request["budget"], "nodes": nodes,
                            "workers": float(os.environ.get("SANE_WORKER_TAG", "0"))},
            })


if __name__ == "__main__":
    main()
