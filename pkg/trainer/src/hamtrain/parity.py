"""Cross-component metric parity against the generator CLI.

The harness computes the Euclidean token distance from manifest token
index sets (sqrt of the symmetric-difference count, identical to the
multi-hot vector distance) and compares it with `hamflow dist` on the
corresponding canonical strings.
"""

from __future__ import annotations

import math
import random
import subprocess

from .data import load_records


class ParityError(RuntimeError):
    pass


def _cli_dist(a: str, b: str, metric="euclid", command="hamflow") -> float:
    proc = subprocess.run(
        [command, "dist", f"--a={a}", f"--b={b}", "--metric", metric],
        capture_output=True, text=True)
    if proc.returncode != 0:
        raise ParityError(f"{command} dist failed: {proc.stderr.strip()}")
    return float(proc.stdout)


def harness_dist(tokens_a, tokens_b) -> float:
    return math.sqrt(len(set(tokens_a) ^ set(tokens_b)))


def metric_parity(dataset_dir, n_pairs=1000, seed=0, tol=1e-9,
                  command="hamflow") -> dict:
    """Compare the two implementations on random corpus function pairs."""
    functions = {}
    for rec in load_records(dataset_dir):
        functions[rec["corpus_index"]] = (rec["hamiltonian"],
                                          tuple(rec["token_indices"]))
    if len(functions) < 2:
        raise ParityError(f"{dataset_dir}: need at least 2 corpus functions")
    pool = list(functions.values())
    rng = random.Random(seed)
    worst = 0.0
    mismatches = 0
    for _ in range(n_pairs):
        (ha, ta), (hb, tb) = rng.sample(pool, 2)
        diff = abs(_cli_dist(ha, hb, command=command) - harness_dist(ta, tb))
        worst = max(worst, diff)
        mismatches += diff > tol
    return {"n_pairs": n_pairs, "max_abs_diff": worst,
            "mismatches": mismatches, "ok": mismatches == 0}
