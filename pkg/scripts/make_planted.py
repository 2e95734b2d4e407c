"""Regenerate the shipped planted-outlier benchmark and its manifest entry.

500 points from a standard Gaussian in 4-D plus 25 points drawn uniformly
from [-8, 8]^4, keeping only draws at least 5 units from the origin.
Outliers carry label 1.

    python scripts/make_planted.py
"""

import hashlib
from pathlib import Path

import numpy as np

from outlierkit.core import validate_dataset
from outlierkit.data import write_csv

SEED = 20211014
N_INLIERS, N_OUTLIERS, DIM = 500, 25, 4
OUT = Path(__file__).resolve().parents[1] / "src" / "outlierkit" / "datasets"


def planted(seed=SEED):
    rng = np.random.default_rng(seed)
    inliers = rng.standard_normal((N_INLIERS, DIM))
    outliers = []
    while len(outliers) < N_OUTLIERS:
        p = rng.uniform(-8.0, 8.0, DIM)
        if np.linalg.norm(p) >= 5.0:
            outliers.append(p)
    X = np.vstack([inliers, np.array(outliers)])
    y = np.r_[np.zeros(N_INLIERS, dtype=int), np.ones(N_OUTLIERS, dtype=int)]
    order = rng.permutation(len(X))
    names = [f"x{j}" for j in range(DIM)]
    return validate_dataset(X[order], y[order], names)


def main():
    text = write_csv(planted()).encode("utf-8")
    (OUT / "planted.csv").write_bytes(text)
    sha = hashlib.sha256(text).hexdigest()
    manifest = (
        "# name\turl\tsha256\tlabel_column\tpositive_label\n"
        f"planted\tplanted.csv\t{sha}\tlabel\t1\n"
    )
    (OUT / "manifest.tsv").write_text(manifest, encoding="utf-8")
    print(sha)


if __name__ == "__main__":
    main()
