#!/usr/bin/env python3
# Copyright (C) 2026 The LogicQA Engine Authors
# SPDX-License-Identifier: Apache-2.0
"""Writes the bundled mock dataset and its backend fixture.

Layout (under --out, default fixtures/mock_loco):

  breakfast_box/train/good/000..009.png
  breakfast_box/test/good/000..009.png
  breakfast_box/test/logical_anomalies/000..009.png
  fixture.json   mock backend answers keyed by role|class|image|sha256(question)[:16]
  config.json    run configuration pointing at the two above

Every test anomaly fails at least one kept Main-Q; every test normal passes
all of them, so a correct engine separates the two sets perfectly.
"""

import argparse
import hashlib
import json
import random
import re
from pathlib import Path

from PIL import Image

CLASS_KEY = "breakfast box"
CATEGORY = "breakfast_box"

MAIN_QUESTIONS = [
    "Are there exactly two tangerines in the box?",
    "Is there exactly one nectarine in the box?",
    "Are the tangerines and the nectarine on the left side of the box?",
    "Are the cereals and the banana chips with almonds on the right side of the box?",
    # Answered No on normal references, so the filter drops it.
    "Is the box completely empty?",
]

SUB_QUESTIONS = {
    MAIN_QUESTIONS[0]: [
        "Does the box contain exactly two tangerines?",
        "Can you count two tangerines in the box, no more and no less?",
        "Is the number of tangerines in the box equal to two?",
        "Are precisely two tangerines present in the box?",
        "Does the box hold two tangerines in total?",
    ],
    MAIN_QUESTIONS[1]: [
        "Does the box contain exactly one nectarine?",
        "Is there a single nectarine in the box?",
        "Is the number of nectarines in the box equal to one?",
        "Is precisely one nectarine present in the box?",
        "Does the box hold only one nectarine?",
    ],
    MAIN_QUESTIONS[2]: [
        "Are the tangerines and the nectarine placed on the left-hand side of the box?",
        "Is all of the fruit located in the left part of the box?",
        "Do the tangerines and the nectarine sit on the left side of the box?",
        "Is the fruit positioned on the left half of the box?",
        "Are the two tangerines and the nectarine found on the left side?",
    ],
    MAIN_QUESTIONS[3]: [
        "Are the cereals and the banana chips with almonds placed on the right-hand side of the box?",
        "Is the cereal and nut mix located in the right part of the box?",
        "Do the cereals and the banana chips with almonds sit on the right side?",
        "Is the granola section positioned on the right half of the box?",
        "Are the cereals and the banana chip mix found on the right side of the box?",
    ],
    MAIN_QUESTIONS[4]: [
        "Does the box contain nothing at all?",
        "Is the box free of any food items?",
        "Is there nothing inside the box?",
        "Is the box entirely empty?",
        "Are there no items in the box?",
    ],
}

KEPT = MAIN_QUESTIONS[:4]

# Anomaly k: {main index (0-based): sub-answer pattern}. Unlisted Main-Qs pass.
ANOMALY_FAILURES = {
    0: {0: "NNNNY"},
    1: {1: "NNNYY"},
    2: {2: "NNNNN"},
    3: {3: "YNNYN"},
    4: {0: "NNNNN", 1: "NNNNY"},
    5: {2: "NNYNY"},
    6: {0: "NNNYY", 3: "NNNNN"},
    7: {1: "NNNNN"},
    8: {3: "NNNNY"},
    9: {0: "NYNNN", 1: "YNNNN", 2: "NNNNN"},
}

# Normal images that still pass every Main-Q, with a dissenting Sub-Q.
NORMAL_DISSENT = {5: {1: "YYYYN"}, 8: {2: "NYYYY"}}
# (image, main, sub) whose first answer is unparseable; the retry answers Yes.
UNPARSED_FIRST = {("test/good/003", 0, 0)}
# (image, main, sub) whose decision word is split across two tokens.
SPLIT_TOKEN = {("test/good/004", 1, 2)}


def qhash(question: str) -> str:
    return hashlib.sha256(question.encode()).hexdigest()[:16]


def key(role: str, image_id: str, question: str, attempt: int = 0) -> str:
    k = f"{role}|{CLASS_KEY}|{image_id}|{qhash(question)}"
    return k + (f"#{attempt}" if attempt else "")


def tokens_for(text: str, rng: random.Random, answer_lp: float | None, split: bool = False):
    """Whitespace-led tokens; the decision word gets `answer_lp`."""
    parts = re.findall(r"\s*\S+", text)
    marker = text.rfind("- Result:")
    toks = []
    pos = 0
    for p in parts:
        start = pos + (len(p) - len(p.lstrip()))
        pos += len(p)
        is_answer = answer_lp is not None and marker >= 0 and start > marker + len("- Result:") - 1
        if is_answer and split:
            head, tail = p[: len(p) - 2], p[len(p) - 2 :]
            toks.append({"token": head, "logprob": round(answer_lp / 2, 6)})
            toks.append({"token": tail, "logprob": round(answer_lp / 2, 6)})
        elif is_answer:
            toks.append({"token": p, "logprob": answer_lp})
        else:
            toks.append({"token": p, "logprob": round(-rng.uniform(0.0, 0.4), 6)})
    return toks


def answer_entry(rng: random.Random, answer: str, subject: str, split: bool = False) -> dict:
    lp = round(-rng.uniform(0.01, 0.3), 6) if answer == "Yes" else round(-rng.uniform(0.05, 0.5), 6)
    text = f"The image shows {subject}.\n- Result: {answer}"
    return {"content": text, "tokens": tokens_for(text, rng, lp, split)}


def plain_entry(text: str) -> dict:
    return {"content": text, "tokens": []}


def write_images(root: Path) -> list[str]:
    ids = []
    for split_dir, shade in (("train/good", 40), ("test/good", 120), ("test/logical_anomalies", 200)):
        d = root / CATEGORY / split_dir
        d.mkdir(parents=True, exist_ok=True)
        for k in range(10):
            img = Image.new("RGB", (8, 8), (shade, 10 * k, 255 - shade))
            img.putpixel((k % 8, k // 8), (255, 255, 255))
            img.save(d / f"{k:03d}.png", optimize=False)
            ids.append(f"{split_dir}/{k:03d}")
    return ids


def build_fixture() -> dict:
    rng = random.Random(20260419)
    e: dict[str, dict] = {}

    for k in range(10):
        img = f"train/good/{k:03d}"
        e[key("describe", img, "")] = plain_entry(
            f"A transparent breakfast box (reference {k}). Two tangerines and one nectarine lie on the left; "
            "cereals topped with banana chips and almonds fill the right side."
        )
    e[key("summarize", "", "")] = plain_entry(
        "A breakfast box holding two tangerines and one nectarine on the left and a cereal mix with banana "
        "chips and almonds on the right."
    )
    e[key("generate_main", "", "")] = plain_entry(
        "\n".join(f"(Q{i + 1}) : {q}" for i, q in enumerate(MAIN_QUESTIONS))
    )
    for q in MAIN_QUESTIONS:
        e[key("augment_sub", "", q)] = plain_entry(
            "\n".join(f"Output{i + 1}: {s}" for i, s in enumerate(SUB_QUESTIONS[q]))
        )

    # Main-Q filtering on normal training images.
    for k in range(10):
        img = f"train/good/{k:03d}"
        for q in MAIN_QUESTIONS:
            ans = "No" if q == MAIN_QUESTIONS[4] else "Yes"
            e[key("test", img, q)] = answer_entry(rng, ans, "a breakfast box")

    # Testing stage.
    for split_dir, failures in (("test/good", NORMAL_DISSENT), ("test/logical_anomalies", ANOMALY_FAILURES)):
        for k in range(10):
            img = f"{split_dir}/{k:03d}"
            pattern = failures.get(k, {})
            for mi, mq in enumerate(KEPT):
                answers = pattern.get(mi, "YYYYY")
                for si, sq in enumerate(SUB_QUESTIONS[mq]):
                    ans = "Yes" if answers[si] == "Y" else "No"
                    if (img, mi, si) in UNPARSED_FIRST:
                        e[key("test", img, sq)] = plain_entry("The image is too blurry to tell.")
                        e[key("test", img, sq, 1)] = answer_entry(rng, ans, "a breakfast box")
                        continue
                    split = (img, mi, si) in SPLIT_TOKEN
                    e[key("test", img, sq)] = answer_entry(rng, ans, "a breakfast box", split)
    return e


def build_config() -> dict:
    return {
        "dataset": {"root": ".", "category": CATEGORY, "layout": "loco"},
        "profile": "../../profiles/breakfast_box.json",
        "backend": {"kind": "mock", "fixture": "fixture.json", "model": "gpt-4o"},
        "seed": 7,
        "seed_policy": "per_run",
        "parallelism": 1,
        "runs": 3,
        "filter": {"enabled": True, "threshold": 0.8, "pool_size": 50, "mode": "direct"},
        "out_dir": "out",
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "fixtures" / "mock_loco")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    write_images(args.out)
    fixture = dict(sorted(build_fixture().items()))
    (args.out / "fixture.json").write_text(json.dumps({"entries": fixture}, indent=1) + "\n")
    (args.out / "config.json").write_text(json.dumps(build_config(), indent=2) + "\n")
    print(f"wrote {len(fixture)} fixture entries to {args.out}")


if __name__ == "__main__":
    main()
