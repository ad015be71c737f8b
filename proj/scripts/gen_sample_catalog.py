#!/usr/bin/env python3
"""Generates the bundled synthetic catalog and its rating records.

Stickers carry fixed valence/arousal means. Animation and vibration points
are the means of synthetic 1-7 ratings (52 and 26 respondents per element),
written alongside as JSON lines so the aggregation can be re-checked. The
candidate pool is written too, for re-running the filter.

The vibration set is chosen the same way the library's filter works: a pool
of 120 candidate patterns, minus those longer than 10 s, minus those not
among the 5 nearest of at least two stickers. The seed search stops at the
first pool that leaves exactly 60.

Usage: gen_sample_catalog.py <out_dir>
"""

import json
import math
import random
import sys
from pathlib import Path

STICKERS = [
    # (id, label, codepoints, valence, arousal)
    ("s_grin", "grinning face", [0x1F600], 6.21, 4.95),
    ("s_beam", "beaming face with smiling eyes", [0x1F601], 6.18, 5.12),
    ("s_joy", "face with tears of joy", [0x1F602], 6.35, 6.02),
    ("s_rofl", "rolling on the floor laughing", [0x1F923], 6.42, 6.31),
    ("s_smiley", "grinning face with big eyes", [0x1F603], 6.10, 4.88),
    ("s_smile", "grinning face with smiling eyes", [0x1F604], 6.15, 4.92),
    ("s_sweat_smile", "grinning face with sweat", [0x1F605], 5.02, 4.61),
    ("s_laughing", "grinning squinting face", [0x1F606], 6.24, 5.71),
    ("s_wink", "winking face", [0x1F609], 5.78, 4.23),
    ("s_blush", "smiling face with smiling eyes", [0x1F60A], 6.05, 3.92),
    ("s_yum", "face savoring food", [0x1F60B], 5.88, 4.40),
    ("s_cool", "smiling face with sunglasses", [0x1F60E], 5.71, 4.02),
    ("s_heart_eyes", "smiling face with heart-eyes", [0x1F60D], 6.48, 5.55),
    ("s_kissing_heart", "face blowing a kiss", [0x1F618], 6.22, 4.85),
    ("s_hugging", "hugging face", [0x1F917], 6.01, 4.37),
    ("s_star_struck", "star-struck", [0x1F929], 6.40, 6.10),
    ("s_thinking", "thinking face", [0x1F914], 4.02, 3.35),
    ("s_neutral", "neutral face", [0x1F610], 3.90, 2.21),
    ("s_expressionless", "expressionless face", [0x1F611], 3.41, 2.30),
    ("s_no_mouth", "face without mouth", [0x1F636], 3.62, 2.45),
    ("s_rolling_eyes", "face with rolling eyes", [0x1F644], 2.95, 3.40),
    ("s_smirk", "smirking face", [0x1F60F], 4.41, 3.72),
    ("s_persevere", "persevering face", [0x1F623], 2.40, 4.55),
    ("s_relieved", "relieved face", [0x1F60C], 5.35, 2.60),
    ("s_pensive", "pensive face", [0x1F614], 2.55, 2.42),
    ("s_sleepy", "sleepy face", [0x1F62A], 3.20, 1.85),
    ("s_sleeping", "sleeping face", [0x1F634], 4.10, 1.52),
    ("s_mask", "face with medical mask", [0x1F637], 2.82, 2.75),
    ("s_nauseated", "nauseated face", [0x1F922], 1.75, 4.20),
    ("s_dizzy", "dizzy face", [0x1F635], 2.61, 5.15),
    ("s_unamused", "unamused face", [0x1F612], 2.35, 3.02),
    ("s_confused", "confused face", [0x1F615], 2.90, 3.25),
    ("s_worried", "worried face", [0x1F61F], 2.31, 4.02),
    ("s_astonished", "astonished face", [0x1F632], 3.85, 6.05),
    ("s_flushed", "flushed face", [0x1F633], 3.60, 5.48),
    ("s_pleading", "pleading face", [0x1F97A], 3.95, 4.30),
    ("s_fearful", "fearful face", [0x1F628], 1.95, 5.72),
    ("s_cold_sweat", "anxious face with sweat", [0x1F630], 2.05, 5.30),
    ("s_cry", "crying face", [0x1F622], 1.90, 4.05),
    ("s_sob", "loudly crying face", [0x1F62D], 1.72, 5.80),
    ("s_scream", "face screaming in fear", [0x1F631], 1.80, 6.45),
    ("s_disappointed", "disappointed face", [0x1F61E], 2.12, 2.95),
    ("s_weary", "weary face", [0x1F629], 2.05, 4.48),
    ("s_tired", "tired face", [0x1F62B], 2.22, 4.15),
    ("s_triumph", "face with steam from nose", [0x1F624], 2.60, 5.62),
    ("s_rage", "pouting face", [0x1F621], 1.45, 6.30),
    ("s_angry", "angry face", [0x1F620], 1.62, 5.95),
    ("s_cursing", "face with symbols on mouth", [0x1F92C], 1.38, 6.55),
    ("s_smiling_imp", "smiling face with horns", [0x1F608], 4.55, 5.20),
    ("s_skull", "skull", [0x1F480], 2.48, 3.90),
]

BEHAVIORS = [
    "bounce", "spin", "shake", "pulse", "wobble", "float", "jump", "breathe",
    "flash", "swing", "tilt", "zoom", "shiver", "nod", "sway",
]

ANIMATION_RESPONDENTS = 52
VIBRATION_RESPONDENTS = 26
CANDIDATES = 120
TARGET_VIBRATIONS = 60
NEAREST = 5


def clamp_score(x):
    return max(1, min(7, int(round(x))))


def ratings_for(rng, element_id, centre, respondents, prefix):
    records = []
    for r in range(respondents):
        records.append({
            "element_id": element_id,
            "respondent_id": f"{prefix}{r:03d}",
            "valence": clamp_score(rng.gauss(centre[0], 1.1)),
            "arousal": clamp_score(rng.gauss(centre[1], 1.1)),
        })
    return records


def mean_point(records):
    n = len(records)
    return (sum(r["valence"] for r in records) / n, sum(r["arousal"] for r in records) / n)


def vibration_pattern(rng, long_pattern):
    events = []
    offset = 0
    limit = rng.randint(10_500, 14_000) if long_pattern else rng.randint(400, 9_000)
    while True:
        duration = rng.randint(40, 600)
        if offset + duration > limit:
            break
        events.append({
            "offset_ms": offset,
            "duration_ms": duration,
            "intensity": round(rng.uniform(0.1, 1.0), 2),
            "sharpness": round(rng.uniform(0.0, 1.0), 2),
        })
        offset += duration + rng.randint(0, 500)
    if not events:
        events.append({"offset_ms": 0, "duration_ms": 200, "intensity": 0.5, "sharpness": 0.5})
    if long_pattern and events[-1]["offset_ms"] + events[-1]["duration_ms"] <= 10_000:
        events.append({"offset_ms": 10_100, "duration_ms": 300, "intensity": 0.4, "sharpness": 0.2})
    return events


def extent(events):
    return events[-1]["offset_ms"] + events[-1]["duration_ms"]


def nearest(sticker_point, pool, k):
    ranked = sorted(range(len(pool)),
                    key=lambda i: (math.dist(sticker_point, pool[i]["point"]), i))
    return [pool[i]["id"] for i in ranked[:k]]


def choose_vibrations(seed):
    rng = random.Random(seed)
    pool = []
    for i in range(CANDIDATES):
        # Researcher-rated points, spread over the whole plane.
        point = (round(rng.uniform(1.0, 7.0), 2), round(rng.uniform(1.0, 7.0), 2))
        long_pattern = rng.random() < 0.15
        pool.append({"id": f"v{i + 1:03d}", "point": point,
                     "events": vibration_pattern(rng, long_pattern)})
    short = [c for c in pool if extent(c["events"]) <= 10_000]
    marks = {}
    for s in STICKERS:
        for vid in nearest((s[3], s[4]), short, NEAREST):
            marks[vid] = marks.get(vid, 0) + 1
    kept = [c for c in short if marks.get(c["id"], 0) >= 2]
    return rng, kept, pool


def main():
    out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "data")
    out_dir.mkdir(parents=True, exist_ok=True)

    for seed in range(10_000):
        rng, vibrations, pool = choose_vibrations(seed)
        if len(vibrations) == TARGET_VIBRATIONS:
            break
    else:
        raise SystemExit("no seed produced exactly 60 vibrations")

    ratings = []
    animations = []
    for i, behavior in enumerate(BEHAVIORS):
        aid = f"a{i + 1:02d}_{behavior}"
        centre = (rng.uniform(2.0, 6.0), rng.uniform(1.5, 6.5))
        recs = ratings_for(rng, aid, centre, ANIMATION_RESPONDENTS, "mt")
        ratings.extend(recs)
        v, a = mean_point(recs)
        animations.append({
            "id": aid, "label": behavior, "valence": v, "arousal": a,
            "asset": {"behavior": behavior, "period_ms": rng.choice([600, 800, 1000, 1200, 1500]),
                      "amplitude": round(rng.uniform(0.2, 1.0), 2)},
        })

    vib_elements = []
    for c in vibrations:
        recs = ratings_for(rng, c["id"], c["point"], VIBRATION_RESPONDENTS, "wm")
        ratings.extend(recs)
        v, a = mean_point(recs)
        vib_elements.append({"id": c["id"], "label": f"pattern {c['id'][1:]}",
                             "valence": v, "arousal": a, "asset": {"events": c["events"]}})

    catalog = {
        "version": 1,
        "behaviors": BEHAVIORS,
        "stickers": [{"id": sid, "label": label, "valence": v, "arousal": a,
                      "asset": {"codepoints": cps}} for sid, label, cps, v, a in STICKERS],
        "animations": animations,
        "vibrations": vib_elements,
    }
    (out_dir / "sample_catalog.json").write_text(json.dumps(catalog, indent=2) + "\n")
    candidates = [{"id": c["id"], "valence": c["point"][0], "arousal": c["point"][1],
                   "extent_ms": extent(c["events"])} for c in pool]
    (out_dir / "vibration_candidates.json").write_text(json.dumps(candidates, indent=1) + "\n")
    with (out_dir / "sample_ratings.jsonl").open("w") as f:
        for r in ratings:
            f.write(json.dumps(r) + "\n")
    print(f"seed {seed}: {len(STICKERS)} stickers, {len(animations)} animations, "
          f"{len(vib_elements)} vibrations, {len(ratings)} ratings")


if __name__ == "__main__":
    main()
