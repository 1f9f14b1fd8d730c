#!/usr/bin/env python3
"""Regenerates the bundled synthetic corpus under data/.

Seven six-member groups discuss a fictitious security-breach case with three
suspects. Comment text is assembled from chat-like templates; dominance labels
are drawn from a logistic model over the comment's surface cues, then passed
through two simulated coders plus a consensus column. Deterministic: run it
again and the files come out byte-identical.
"""

import csv
import io
import json
import math
import os
import random

SEED = 20240811
OUT = os.path.join(os.path.dirname(__file__), "..", "data")

SUSPECTS = ["alex", "mansi", "nali", "john", "donahue"]

# (template, manual-code flags, ed_boost)
# flags: q=questions a=answers v=call_for_vote o=organizational
#        s=asymmetric_info r=refocus h=humor ha=humor_appreciated p=profanity
TEMPLATES = [
    ("damn it, the alibi doesn't hold", "p", 0.2),
    ("who the hell deleted the logs?", "p q", 0.1),
    ("this damn clue makes no sense", "p", 0.0),
    ("i think it was {name}", "", 0.4),
    ("{name} did it", "", 0.5),
    ("it has to be {NAME}", "", 0.9),
    ("IT WAS {NAME} FOR SURE", "", 1.0),
    ("GUYS the logs are UP", "", -0.4),
    ("WAIT i read that clue wrong", "", -0.6),
    ("maybe {name}?", "q", -0.2),
    ("why {name}??", "q", -0.3),
    ("but why u say {name}", "q", -0.5),
    ("what about the firewall alert?", "q", -0.6),
    ("who had server access?", "q", -0.4),
    ("enough time for him to do it", "a", 0.2),
    ("he was in the office that night", "a", 0.1),
    ("the login came from her machine", "a", 0.2),
    ("the breach used the shared vpn account", "a", 0.1),
    ("because the badge log ends at midnight", "a", 0.0),
    ("he is lying about the alibi", "", 0.4),
    ("i bet she did it", "", 0.5),
    ("it was him, no doubt", "", 0.6),
    ("my clue says the breach was at 2am", "s", 0.3),
    ("i have a clue you guys don't have", "s", 0.6),
    ("my sheet says {name} left early", "s", 0.3),
    ("anyone who think its {name} type yes", "v", 1.5),
    ("lets vote now, type yes for {name}", "v", 1.6),
    ("final answers people, {name} or {name2}?", "v q", 1.0),
    ("now lets analyze {name}", "o", 1.3),
    ("ok first the alibis, then the logs", "o", 1.1),
    ("get back to work", "r", 0.9),
    ("focus guys, {n} mins left", "r", 1.0),
    ("only {n} mins left", "", 0.6),
    ("we still have time", "", 0.0),
    ("hurry up guys!!", "", 0.7),
    ("good point #{k}!!", "", 0.1),
    ("lol", "ha", -0.8),
    ("haha true", "ha", -0.7),
    ("it was the gardener in the kitchen with the candle stick", "h", -0.3),
    ("plot twist: it was all three of them lol", "h", 0.5),
    ("my cat could solve this case faster", "h", 0.4),
    ("ok", "", -0.9),
    ("agreed", "", -0.6),
    ("no way!!", "", 0.3),
    ("so it is {name} or {name2}???", "q", 0.2),
    ("i'm not sure", "", -0.7),
    ("i'll check my notes", "", -0.4),
    ("me too", "", -0.8),
    ("trust me, it's {name}", "", 0.8),
]

TIME_WORDS = {"mins", "time"}


def tokens(text):
    out = []
    for chunk in text.split():
        t = chunk.strip("!?.,:;()\"'")
        if t:
            out.append(t)
    return out


def features(text):
    toks = tokens(text)
    lower = [t.lower() for t in toks]
    return {
        "chars": len(text),
        "words": len(toks),
        "awl": (sum(len(t) for t in toks) / len(toks)) if toks else 0.0,
        "choice": sum(1 for t in lower if t in SUSPECTS),
        "caps": sum(1 for t in toks if len(t) >= 2 and t.isalpha() and t.isupper()),
        "time": 1 if any(t in TIME_WORDS for t in lower) else 0,
        "excl": text.count("!"),
        "qm": text.count("?"),
        "selfr": sum(1 for t in lower if t in {"i", "i'm", "im", "i'll", "me", "my"}),
    }


def ed_probability(f, boost):
    eta = (
        -2.0
        + 0.004 * f["chars"]
        - 0.03 * f["words"]
        - 0.05 * f["awl"]
        + 0.9 * f["choice"]
        + 0.15 * f["caps"]
        + 1.6 * f["time"]
        + 0.25 * f["excl"]
        - 0.35 * f["qm"]
        + 0.25 * f["selfr"]
        + boost
    )
    p = 1.0 / (1.0 + math.exp(-eta))
    return min(max(p, 0.07), 0.88)


def render(template, rng):
    name = rng.choice(SUSPECTS)
    name2 = rng.choice([s for s in SUSPECTS if s != name])
    if rng.random() < 0.5:
        name = name.capitalize()
    if rng.random() < 0.4:
        name2 = name2.capitalize()
    return (
        template.replace("{NAME}", name.upper())
        .replace("{name2}", name2)
        .replace("{name}", name)
        .replace("{n}", str(rng.choice([2, 3, 5, 10, 15])))
        .replace("{k}", str(rng.randint(1, 9)))
    )


def iso(ts):
    h = 10 + ts // 3600
    m = (ts % 3600) // 60
    s = ts % 60
    return f"2024-03-0{1}T{h:02d}:{m:02d}:{s:02d}Z"


def main():
    rng = random.Random(SEED)
    os.makedirs(os.path.join(OUT, "corpus"), exist_ok=True)
    os.makedirs(os.path.join(OUT, "annotations"), exist_ok=True)
    os.makedirs(os.path.join(OUT, "models"), exist_ok=True)

    # participation weights: most groups skewed toward one or two speakers,
    # one group (g6) deliberately flat
    weights = {
        "g1": [8, 3, 3, 2, 2, 2],
        "g2": [6, 5, 2, 2, 2, 2],
        "g3": [7, 4, 3, 3, 2, 1],
        "g4": [5, 5, 4, 2, 2, 2],
        "g5": [9, 2, 2, 2, 2, 2],
        "g6": [3, 3, 3, 3, 3, 3],
        "g7": [6, 4, 4, 2, 2, 2],
    }

    annotation_rows = []
    for g in range(1, 8):
        gid = f"g{g}"
        n_comments = 36 + rng.randint(0, 14)
        participants = [f"p{i}" for i in range(1, 7)]
        w = weights[gid]
        use_iso = g % 2 == 0

        buf = io.StringIO()
        wtr = csv.writer(buf, lineterminator="\n")
        wtr.writerow(["group_id", "participant_id", "timestamp", "text"])
        ts = 0
        for seq in range(n_comments):
            pid = rng.choices(participants, weights=w)[0]
            template, flags, boost = rng.choice(TEMPLATES)
            text = render(template, rng)
            ts += rng.randint(3, 25)
            wtr.writerow([gid, pid, iso(ts) if use_iso else str(ts), text])

            f = features(text)
            flagset = set(flags.split())
            p = ed_probability(f, boost)
            true_ed = 1 if rng.random() < p else 0
            ed_a = true_ed if rng.random() > 0.05 else 1 - true_ed
            ed_b = true_ed if rng.random() > 0.07 else 1 - true_ed
            resolved = "" if ed_a == ed_b else str(true_ed)
            pronouns = sum(1 for t in tokens(text.lower()) if t in {"he", "she", "him", "her"})
            annotation_rows.append(
                [
                    gid,
                    seq,
                    1 if "h" in flagset else 0,
                    1 if "ha" in flagset else 0,
                    1 if "p" in flagset else 0,
                    1 if "q" in flagset else 0,
                    1 if "a" in flagset else 0,
                    1 if "v" in flagset else 0,
                    1 if "o" in flagset else 0,
                    1 if "s" in flagset else 0,
                    1 if "r" in flagset else 0,
                    f["choice"] + pronouns,
                    ed_a,
                    ed_b,
                    resolved,
                ]
            )
        with open(os.path.join(OUT, "corpus", f"{gid}.csv"), "w", newline="") as fh:
            fh.write(buf.getvalue())

    with open(os.path.join(OUT, "annotations", "annotations.csv"), "w", newline="") as fh:
        wtr = csv.writer(fh, lineterminator="\n")
        wtr.writerow(
            [
                "group_id",
                "seq",
                "humor",
                "humor_appreciated",
                "profanity",
                "questions",
                "answers",
                "call_for_vote",
                "organizational",
                "asymmetric_info",
                "refocus",
                "choice_reference_pro",
                "ed_a",
                "ed_b",
                "resolved",
            ]
        )
        wtr.writerows(annotation_rows)

    with open(os.path.join(OUT, "lexicon.json"), "w") as fh:
        json.dump(
            {
                "choice_terms": sorted(SUSPECTS),
                "time_terms": sorted(
                    [
                        "time", "min", "mins", "minute", "minutes", "hour", "hours",
                        "sec", "secs", "second", "seconds", "clock", "deadline",
                    ]
                ),
                "self_terms": sorted(
                    ["i", "i'm", "im", "i'll", "i've", "i'd", "me", "my", "mine", "myself"]
                ),
                "min_allcaps_len": 2,
            },
            fh,
            indent=2,
        )
        fh.write("\n")

    # pretrained scoring model over the automatic feature set
    pretrained_coefficients = [
        ("intercept", -1.20, 0.51, 5.65),
        ("comment_length_chars", -0.001, 0.02, 0.00),
        ("word_count", -0.04, 0.11, 0.15),
        ("average_word_length", -0.20, 0.12, 2.96),
        ("choice_reference", 2.43, 0.17, 218.35),
        ("all_caps_words", 0.06, 0.06, 0.78),
        ("time_reference", 5.57, 1.49, 14.06),
        ("exclamation_points", 0.16, 0.11, 2.05),
        ("question_marks", -0.92, 0.30, 9.57),
        ("self_references", 0.27, 0.18, 2.10),
    ]
    model = {
        "coefficients": [
            {"name": n, "estimate": e, "std_error": s, "wald_chisq": w}
            for (n, e, s, w) in pretrained_coefficients
        ],
        "residual_deviance": 1102.0,
        "aic": 1122.0,
        "n_params": 10,
        "n_obs": 1283,
        "converged": True,
        "iterations": 0,
        "separation": None,
        "ridge": 0.0,
    }
    with open(os.path.join(OUT, "models", "pretrained_automatic.json"), "w") as fh:
        json.dump(model, fh, indent=2)
        fh.write("\n")

    print(f"wrote corpus under {os.path.abspath(OUT)}")


if __name__ == "__main__":
    main()
