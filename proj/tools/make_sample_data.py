#!/usr/bin/env python3
"""Regenerates the bundled sample data under data/.

annotations.csv: 3198 artwork annotations (id, artist, period, nationality,
title, school, location) whose per-period counts are
Medieval 721, Early Renaissance 448, Northern Renaissance 385, Baroque 724,
Romanticism 302, Impressionism 618. Per-artist counts follow the published
artist table except Goya, which is reduced so the period totals hold.

sample_embeddings.csv: synthetic 32-dimensional feature vectors for 50
artworks of each period (300 rows), one gaussian blob per period with the two
Renaissance blobs placed close together. Stand-in data for demos only.
"""
import csv
import pathlib

import numpy as np

ARTISTS = [
    # name, period, nationality, location, count
    ("ANGELICO, Fra", "Early Renaissance", "Italian", "Florence", 244),
    ("BOTTICELLI, Sandro", "Early Renaissance", "Italian", "Florence", 204),
    ("BOSCH, Hieronymus", "Northern Renaissance", "Dutch", "'s-Hertogenbosch", 162),
    ("BRUEGEL, Pieter the Elder", "Northern Renaissance", "Belgian", "Antwerp", 223),
    ("CARAVAGGIO", "Baroque", "Italian", "Rome", 185),
    ("REMBRANDT Harmenszoon van Rijn", "Baroque", "Dutch", "Amsterdam", 539),
    ("DELACROIX, Eugene", "Romanticism", "French", "Paris", 105),
    ("GOYA Y LUCIENTES, Francisco Jose de", "Romanticism", "Spanish", "Madrid", 197),
    ("DUCCIO di Buoninsegna", "Medieval", "Italian", "Siena", 170),
    ("GIOTTO di Bondone", "Medieval", "Italian", "Florence", 551),
    ("MONET, Claude", "Impressionism", "French", "Giverny", 198),
    ("GOGH, Vincent van", "Impressionism", "Dutch", "Arles", 420),
]

PERIODS = ["Medieval", "Early Renaissance", "Northern Renaissance", "Baroque", "Romanticism", "Impressionism"]


def main() -> None:
    root = pathlib.Path(__file__).resolve().parent.parent / "data"
    root.mkdir(exist_ok=True)
    rows = []
    next_id = 1001
    for name, period, nat, loc, count in ARTISTS:
        for i in range(count):
            rows.append([str(next_id), name, period, nat, f"work {i + 1}", "painter", loc])
            next_id += 1
    assert len(rows) == 3198
    with open(root / "annotations.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id", "artist", "period", "nationality", "title", "school", "location"])
        w.writerows(rows)

    rng = np.random.default_rng(7)
    dim = 32
    centers = {}
    for p_idx, period in enumerate(PERIODS):
        c = np.zeros(dim)
        c[p_idx] = 4.0
        centers[period] = c
    centers["Northern Renaissance"] = centers["Early Renaissance"] + 1.0 * np.eye(dim)[2]
    by_period = {p: [r for r in rows if r[2] == p] for p in PERIODS}
    with open(root / "sample_embeddings.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id"] + [f"f{j + 1}" for j in range(dim)])
        for period in PERIODS:
            picks = rng.choice(len(by_period[period]), size=50, replace=False)
            for idx in sorted(picks):
                v = centers[period] + rng.normal(0.0, 1.0, dim)
                w.writerow([by_period[period][idx][0]] + [f"{x:.6f}" for x in v])


if __name__ == "__main__":
    main()
