#!/usr/bin/env python3
"""Regenerates the files under presets/. Output is deterministic."""

import csv
import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "presets"

GROUPS = ["Republican", "Democrat"]

PERSONAS = [
    "A retired high school chemistry teacher who volunteers at the county library",
    "A long-haul truck driver who listens to history podcasts on the road",
    "A nurse working night shifts in a rural hospital",
    "A software developer who builds accessibility tools",
    "A small bakery owner who sponsors the local youth soccer team",
    "A graduate student researching coastal erosion",
    "A farmer who grows soybeans and keeps bees",
    "A public defender in a mid-sized city",
    "A church choir director and piano tutor",
    "A veteran who now runs a hardware store",
    "A stay-at-home parent who writes a cooking blog",
    "A paramedic and amateur astronomer",
    "An insurance claims adjuster who coaches little league",
    "A museum curator specializing in folk art",
    "A union electrician who restores vintage motorcycles",
    "A dental hygienist who hikes every weekend",
    "A community college math instructor",
    "A real estate agent who fosters rescue dogs",
    "A warehouse supervisor studying for an accounting degree",
    "A freelance photographer covering local sports",
]

DEMOGRAPHICS = {
    "gender": [("Female", 0.51), ("Male", 0.49)],
    "race": [("White", 0.75), ("Black or African American", 0.14), ("Asian", 0.07), ("Two or more races", 0.04)],
    "ethnicity": [("Not Hispanic or Latino", 0.81), ("Hispanic or Latino", 0.19)],
    "education": [("High school graduate", 0.28), ("Some college", 0.26), ("Bachelor's degree", 0.23),
                  ("Graduate degree", 0.14), ("Less than high school", 0.09)],
    "age": [("18-24", 0.12), ("25-34", 0.17), ("35-44", 0.16), ("45-54", 0.16), ("55-64", 0.17), ("65+", 0.22)],
}


def draw(rng, options):
    labels = [o[0] for o in options]
    weights = [o[1] for o in options]
    return rng.choices(labels, weights=weights, k=1)[0]


def demographics(rng):
    return "; ".join(f"{k}: {draw(rng, v)}" for k, v in DEMOGRAPHICS.items())


def write_json(path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def write_agents(path, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id", "persona_description", "demographics", "political_standpoint", "is_observer"])
        w.writerows(rows)


def words(text, n):
    """Pads or trims text to exactly n whitespace-separated words."""
    filler = "and that is honestly how I see it from where I stand today".split()
    out = text.split()
    i = 0
    while len(out) < n:
        out.append(filler[i % len(filler)])
        i += 1
    return " ".join(out[:n])


def delta_vector(low_part, high_part, seed):
    values = list(low_part) + list(high_part)
    random.Random(seed).shuffle(values)
    return values


def questionnaires():
    write_json(ROOT / "questionnaires" / "thermometer.json", {"items": [
        {"id": "warmth_republicans", "group": "Republican", "kind": "warmth",
         "question": "On a feeling thermometer from 0 (very cold) to 100 (very warm), how do you feel about Republicans?"},
        {"id": "warmth_democrats", "group": "Democrat", "kind": "warmth",
         "question": "On a feeling thermometer from 0 (very cold) to 100 (very warm), how do you feel about Democrats?"},
    ]})
    items = []
    for g, plural in (("Republican", "Republicans"), ("Democrat", "Democrats")):
        items.append({"id": f"love_{plural.lower()}", "group": g, "kind": "love",
                      "question": f"From 0 (not at all) to 10 (completely), how much do you love {plural}?"})
        items.append({"id": f"hate_{plural.lower()}", "group": g, "kind": "hate",
                      "question": f"From 0 (not at all) to 10 (completely), how much do you hate {plural}?"})
    write_json(ROOT / "questionnaires" / "love_hate.json", {"items": items})


def cross_partisan():
    rng = random.Random(20250154)
    rows = []
    for pair in range(77):
        for party in GROUPS:
            n = len(rows) + 1
            rows.append([f"agent_{n:03d}", rng.choice(PERSONAS), demographics(rng), party, "false"])
    write_agents(ROOT / "agents" / "cross_partisan_154.csv", rows)
    pairs = [[rows[2 * i][0], rows[2 * i + 1][0]] for i in range(77)]

    # Out-group warmth deltas per run. Democrat vectors: median 5; Republican vectors: median 0.
    low_d = [0] * 20 + [3] * 10 + [5] * 9
    variants = {
        "nonpolitical": {
            "words": 29,
            "topic": "The meaning of life",
            "context": "You are chatting online with a person from the other major U.S. party. "
                       "Talk about what gives your life meaning, for example family, work, faith or community.",
            "d": delta_vector(low_d, [10] * 31 + [15] * 7, 1),          # sum 490
            "r": delta_vector([-2] * 5 + [0] * 34, [0] * 21 + [5] * 17, 2),  # sum 75
            "lines": {
                "Republican": ["Hi, I am {agent}. For me meaning comes from family dinners on Sunday and",
                               "I hear you. My work at the shop gives me purpose because neighbors rely on",
                               "That is a good point. Faith matters to me too, but I also find meaning in"],
                "Democrat": ["Nice to meet you, I am {agent}. I find meaning in helping my community and",
                             "Honestly that resonates. My kids keep me grounded and remind me why small things",
                             "I agree more than I expected. Service to others seems like common ground for"],
            },
        },
        "political": {
            "words": 26,
            "topic": "Immigration policy",
            "context": "You are chatting online with a person from the other major U.S. party. "
                       "Discuss immigration policy, for example border security, asylum and work visas.",
            "d": delta_vector(low_d, [10] * 36 + [15] * 2, 3),          # sum 465
            "r": delta_vector([-2] * 5 + [0] * 34, [0] * 19 + [5] * 19, 4),  # sum 85
            "lines": {
                "Republican": ["I am {agent}. Border security comes first for me, though legal pathways should be",
                               "Fair enough. Work visas for farms make sense when the process is enforced and",
                               "We probably agree that the asylum backlog hurts everyone waiting in line for"],
                "Democrat": ["Hi, {agent} here. I think asylum seekers deserve fair hearings and a humane process",
                             "I understand the security concern. Faster courts would help both goals at once",
                             "Agreed on the backlog. Funding more judges seems like something both sides could"],
            },
        },
    }

    for name, v in variants.items():
        replies = {f"standpoint:{party}": [words(line, v["words"]) for line in lines]
                   for party, lines in v["lines"].items()}
        answers = {
            "standpoint:Republican": {"pre": {"warmth_republicans": "I would say 85.",
                                              "warmth_democrats": "Around 30"}},
            "standpoint:Democrat": {"pre": {"warmth_republicans": "30, to be honest.",
                                            "warmth_democrats": "85"}},
        }
        runs = {}
        for i in range(77):
            runs[str(i)] = {"answers": {
                "standpoint:Republican": {"post": {"warmth_republicans": "85",
                                                   "warmth_democrats": f"Now maybe {30 + v['r'][i]}."}},
                "standpoint:Democrat": {"post": {"warmth_republicans": f"{30 + v['d'][i]}",
                                                 "warmth_democrats": "85"}},
            }}
        write_json(ROOT / "scenarios" / f"cross_partisan_{name}.json",
                   {"max_retries": 2, "replies": replies, "answers": answers, "runs": runs})

        spec = {
            "name": f"cross_partisan_{name}",
            "agents_file": "agents/cross_partisan_154.csv",
            "groups": GROUPS,
            "runs": 77,
            "messages_per_run": 9,
            "word_limit": 50,
            "order_policy": "alternate_starter",
            "pairing": {"kind": "groups", "groups": pairs},
            "trigger": {"topic": v["topic"], "context": v["context"],
                        "instructions": "Reply in a friendly, conversational tone."},
            "pre_questionnaire": "questionnaires/thermometer.json",
            "post_questionnaire": "questionnaires/thermometer.json",
            "backend": {"kind": "scripted", "scenario": f"scenarios/cross_partisan_{name}.json"},
            "master_seed": 154,
        }
        write_json(ROOT / f"cross_partisan_{name}.json", spec)

    demo = json.loads((ROOT / "cross_partisan_nonpolitical.json").read_text())
    demo["name"] = "cross_partisan_demo"
    demo["runs"] = 4
    demo["pairing"] = {"kind": "groups", "groups": pairs[:4]}
    write_json(ROOT / "cross_partisan_demo.json", demo)


def observer_outcomes(adopt_r, adopt_r_polarized, adopt_d, total):
    """Scripted post answers (loveR, hateR, loveD, hateD) for the observer of each run."""
    outcomes = []
    for i in range(total):
        if i < adopt_r_polarized:
            outcomes.append((7, 2, 3, 7))
        elif i < adopt_r:
            outcomes.append((6, 3, 4, 5))
        elif i < adopt_r + adopt_d:
            outcomes.append((3, 6, 6, 2))
        else:
            outcomes.append((5, 5, 5, 5))
    random.Random(total * 7 + adopt_r).shuffle(outcomes)
    return outcomes


def love_hate_answers(love_r, hate_r, love_d, hate_d):
    return {"love_republicans": str(love_r), "hate_republicans": str(hate_r),
            "love_democrats": str(love_d), "hate_democrats": str(hate_d)}


def social_media():
    rng = random.Random(1174)
    rows = [[f"rep_{i:02d}", rng.choice(PERSONAS), demographics(rng),
             "Republican, strongly identifies with the party", "false"] for i in range(1, 11)]
    observer = ["observer", "A recent college graduate who follows the news casually", demographics(rng),
                "Non-partisan, no affiliation with any party", "true"]
    write_agents(ROOT / "agents" / "exp1_social_media.csv", rows + [observer])
    dems = [[f"dem_{i}", rng.choice(PERSONAS), demographics(rng),
             "Democrat, strongly identifies with the party", "false"] for i in range(1, 4)]
    write_agents(ROOT / "agents" / "exp2_social_media.csv", rows + dems + [observer])

    trigger = {
        "topic": "Joe Biden's tweet about climate change",
        "context": "You are on X (formerly Twitter). Joe Biden just tweeted: \"Climate change is an existential "
                   "threat. We are investing in clean energy and good union jobs.\" Reply in the thread.",
        "instructions": "Write like a real X user. Hashtags and mentions are allowed.",
    }
    partisan = {
        "standpoint:Republican": {"pre": love_hate_answers(8, 1, 3, 7), "post": love_hate_answers(8, 1, 3, 7)},
        "standpoint:Democrat": {"pre": love_hate_answers(3, 7, 8, 1), "post": love_hate_answers(3, 7, 8, 1)},
        "observer": {"pre": love_hate_answers(5, 5, 5, 5)},
    }
    replies = {
        "standpoint:Republican": ["@JoeBiden Another tax hike dressed up as climate policy. #EnergyIndependence",
                                  "Replying to @{last_author}: exactly, American energy built this country."],
        "standpoint:Democrat": ["@JoeBiden Clean energy jobs are real jobs. Proud of this. #ClimateAction",
                                "@{last_author} solar installers in my town would disagree with you."],
    }

    for name, csv_name, adopt_r, adopt_r_pol, adopt_d, order, extra in (
            ("exp1_nonpartisan_observer", "exp1_social_media.csv", 32, 29, 2, "fixed", {"rounds": 1}),
            ("exp2_with_democrats", "exp2_social_media.csv", 23, 21, 1, "randomized", {"rounds": 1})):
        runs = {}
        for i, (lr, hr, ld, hd) in enumerate(observer_outcomes(adopt_r, adopt_r_pol, adopt_d, 50)):
            runs[str(i)] = {"answers": {"observer": {"post": love_hate_answers(lr, hr, ld, hd)}}}
        write_json(ROOT / "scenarios" / f"{name}.json",
                   {"max_retries": 2, "replies": replies, "answers": partisan, "runs": runs})
        spec = {
            "name": name,
            "agents_file": f"agents/{csv_name}",
            "groups": GROUPS,
            "runs": 50,
            **extra,
            "word_limit": 50,
            "order_policy": order,
            "trigger": trigger,
            "pre_questionnaire": "questionnaires/love_hate.json",
            "post_questionnaire": "questionnaires/love_hate.json",
            "backend": {"kind": "scripted", "scenario": f"scenarios/{name}.json"},
            "master_seed": 50,
        }
        write_json(ROOT / f"{name}.json", spec)

    live = json.loads((ROOT / "exp1_nonpartisan_observer.json").read_text())
    live["name"] = "exp1_live"
    live["runs"] = 2
    live["clock"] = "system"
    live["backend"] = {"kind": "remote", "endpoint": "https://api.openai.com/v1/chat/completions",
                       "model": "gpt-4o-mini", "temperature": 1.0, "api_key_env": "POLARSIM_API_KEY",
                       "max_in_flight": 4}
    write_json(ROOT / "exp1_live.json", live)


def extremist():
    rng = random.Random(3)
    rows = [["extremist", "A political activist who organizes protests and posts daily about politics",
             demographics(rng), "Democrat, extremely partisan", "false"]]
    rows += [[f"moderate_{i}", rng.choice(PERSONAS), demographics(rng), "Republican, moderate", "false"]
             for i in range(1, 4)]
    write_agents(ROOT / "agents" / "exp3_extremist.csv", rows)
    answers = {
        "extremist": {"pre": love_hate_answers(0, 10, 10, 0), "post": love_hate_answers(0, 10, 10, 0)},
        "moderate_1": {"pre": love_hate_answers(7, 2, 3, 6), "post": love_hate_answers(8, 1, 2, 7)},
        "moderate_2": {"pre": love_hate_answers(6, 3, 4, 5), "post": love_hate_answers(7, 2, 3, 6)},
        "moderate_3": {"pre": love_hate_answers(7, 2, 3, 4), "post": love_hate_answers(7, 2, 3, 4)},
    }
    replies = {
        "extremist": ["Republicans are destroying this country and everyone knows it.",
                      "@{last_author} your party has no shame. None.",
                      "Post {turn}: I will never stop calling this out."],
        "standpoint:Republican": ["I think we can disagree without insults.",
                                  "@{last_author} that is not fair to millions of ordinary people.",
                                  "Honestly this kind of talk pushes me further away."],
    }
    write_json(ROOT / "scenarios" / "exp3_extremist.json",
               {"max_retries": 2, "replies": replies, "answers": answers})
    write_json(ROOT / "exp3_extremist.json", {
        "name": "exp3_extremist",
        "agents_file": "agents/exp3_extremist.csv",
        "groups": GROUPS,
        "runs": 1,
        "rounds": 3,
        "word_limit": 50,
        "order_policy": "fixed",
        "trigger": {"topic": "Gun control after a mass shooting",
                    "context": "You are in a public online thread reacting to news of a mass shooting.",
                    "instructions": "Post your reaction."},
        "pre_questionnaire": "questionnaires/love_hate.json",
        "post_questionnaire": "questionnaires/love_hate.json",
        "backend": {"kind": "scripted", "scenario": "scenarios/exp3_extremist.json"},
        "master_seed": 3,
    })


if __name__ == "__main__":
    questionnaires()
    cross_partisan()
    social_media()
    extremist()
