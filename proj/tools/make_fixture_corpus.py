# Copyright 2026 The sumbias Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the 50-document fixture corpus and its content-word side file.

Usage: python3 tools/make_fixture_corpus.py [out_dir]

Output is deterministic. Documents use the compact 7-column layout
(doc-id part token-index token POS NE coref).
"""

import json
import random
import sys
from pathlib import Path

MALE = [("Daniel", "Ortiz"), ("Thomas", "Brennan"), ("Gary", "Holt"), ("Kevin", "Marsh"),
        ("Peter", "Lang"), ("Walter", "Crane"), ("Frank", "Dixon"), ("Eric", "Novak"),
        ("Carl", "Pruitt"), ("Roger", "Whitley"), ("Samuel", "Ferris"), ("Henry", "Vance")]
FEMALE = [("Melissa", "Levin"), ("Karen", "Walsh"), ("Laura", "Finch"), ("Susan", "Moreno"),
          ("Janet", "Keogh"), ("Alice", "Barlow"), ("Diane", "Sutter"), ("Helen", "Quist"),
          ("Nancy", "Rourke"), ("Ruth", "Danner"), ("Teresa", "Glenn"), ("Irene", "Pike")]
CITIES = ["Boston", "Denver", "Chicago", "Portland", "Atlanta"]
ORGS = [["United", "Nations"], ["World", "Bank"], ["Red", "Cross"]]

PRONOUNS = {
    "male": {"SUBJ": "he", "OBJ": "him", "POSS": "his", "REFL": "himself"},
    "female": {"SUBJ": "she", "OBJ": "her", "POSS": "her", "REFL": "herself"},
}
POS = {"SUBJ": "PRP", "OBJ": "PRP", "POSS": "PRP$", "REFL": "PRP"}

# Placeholders: {KIND:i} refers to the i-th entity of the sentence.
TEMPLATES = [
    "{SUBJ:0} said the decision was final .",
    "{TITLE_LAST:0} thanked {POSS:0} colleagues in {CITY} .",
    "Critics asked {LAST:0} about {POSS:0} record .",
    "Officials from the {ORG} met {OBJ:0} last week .",
    "{FIRST:0} described {REFL:0} as cautious .",
    "The report praised {OBJ:0} for the work .",
    "{POSS:0} team won the game on Sunday .",
    "{LAST:0} , the committee chairman , declined to comment .",
    "{FULL:0} and {FULL:1} spoke after the meeting .",
    "{SUBJ:0} told {LAST:1} that the vote would pass .",
    "{TITLE_LAST:1} said {SUBJ:0} had been helpful .",
    "Supporters of {LAST:0} gathered in {CITY} .",
]
TAGS = {"the": "DT", "a": "DT", "and": "CC", "in": "IN", "on": "IN", "for": "IN",
        "of": "IN", "from": "IN", "about": "IN", "after": "IN", "as": "IN", "that": "IN",
        "monday": "NNP", "tuesday": "NNP", "sunday": "NNP"}
NEUTRAL = [
    "The council approved the budget on Tuesday .",
    "Local residents expressed concern about the new road .",
    "The {ORG} issued a statement in {CITY} .",
    "Shares rose slightly in early trading .",
]


class Sentence:
    def __init__(self):
        self.tokens = []  # (text, pos)
        self.mentions = []  # (start, end, chain)
        self.nes = []  # (start, end, label)
        self.content = []  # (start, chain)

    def add(self, text, pos):
        self.tokens.append((text, pos))
        return len(self.tokens) - 1


def render(template, ents, rng, sent_index_is_first):
    s = Sentence()
    for piece in template.split():
        if piece.startswith("{") and piece.endswith("}"):
            body = piece[1:-1]
            kind, _, idx = body.partition(":")
            if kind == "CITY":
                i = s.add(rng.choice(CITIES), "NNP")
                s.nes.append((i, i, "GPE"))
                continue
            if kind == "ORG":
                words = rng.choice(ORGS)
                a = s.add(words[0], "NNP")
                b = s.add(words[1], "NNP")
                s.nes.append((a, b, "ORG"))
                continue
            e = ents[int(idx)]
            chain = e["chain"]
            if kind in ("FULL", "FIRST", "LAST"):
                if kind == "FULL":
                    a = s.add(e["first"], "NNP")
                    b = s.add(e["last"], "NNP")
                elif kind == "FIRST":
                    a = b = s.add(e["first"], "NNP")
                else:
                    a = b = s.add(e["last"], "NNP")
                s.nes.append((a, b, "PERSON"))
                s.mentions.append((a, b, chain))
            elif kind == "TITLE_LAST":
                a = s.add(e["title"], "NNP")
                b = s.add(e["last"], "NNP")
                s.nes.append((b, b, "PERSON"))
                s.mentions.append((a, b, chain))
            else:
                word = PRONOUNS[e["gender"]][kind]
                i = s.add(word, POS[kind])
                s.mentions.append((i, i, chain))
        elif piece == "chairman" and s.mentions:
            chain = s.mentions[0][2]
            female = any(e["chain"] == chain and e["gender"] == "female" for e in ents)
            i = s.add("chairwoman" if female else "chairman", "NN")
            s.content.append((i, chain))
        else:
            s.add(piece, TAGS.get(piece.lower(), "." if piece in ".," else "NN"))
    text0, pos0 = s.tokens[0]
    s.tokens[0] = (text0[0].upper() + text0[1:], pos0)
    return s


def make_document(n, rng):
    sentences = []
    if n in (41, 45, 49):
        # No person entities at all.
        for t in rng.sample(NEUTRAL, 3):
            sentences.append(render(t, [], rng, False))
        return sentences
    count = 1 if n == 7 else 1 + (n % 3)
    males = rng.sample(MALE, 2)
    females = rng.sample(FEMALE, 2)
    ents = []
    for k in range(count):
        gender = "male" if (n + k) % 2 == 0 else "female"
        first, last = (males if gender == "male" else females)[k // 2]
        title = "Mr." if gender == "male" else rng.choice(["Ms.", "Mrs."])
        ents.append({"chain": str(k + 1), "gender": gender, "first": first, "last": last,
                     "title": title})
    if n == 7:
        # An entity only ever named by one token.
        ents[0].update(first="Obama", last="Obama", gender="male", title="Mr.")
        sentences.append(render("{LAST:0} arrived in {CITY} .", ents, rng, True))
    else:
        for e in ents:
            sentences.append(render("{FULL:0} announced a new plan on Monday .", [e], rng, True))
    if n == 13:
        s = Sentence()
        for w in ["The", ents[0]["last"], "Foundation", "funded", "the", "project", "."]:
            s.add(w, TAGS.get(w.lower(), "NNP" if w[0].isupper() else "."))
        s.nes.append((1, 2, "ORG"))
        sentences.append(s)
    body = rng.randint(3, 6)
    for _ in range(body):
        if len(ents) >= 2 and rng.random() < 0.4:
            template = rng.choice(TEMPLATES[8:])
            pair = rng.sample(ents, 2)
        else:
            template = rng.choice(TEMPLATES[:8])
            pair = [rng.choice(ents)]
        if n == 7 and ("FIRST" in template or "FULL" in template):
            template = "The report praised {OBJ:0} for the work ."
        sentences.append(render(template, pair, rng, False))
    if rng.random() < 0.5:
        sentences.append(render(rng.choice(NEUTRAL), [], rng, False))
    return sentences


def columns(name, sentences):
    lines = [f"#begin document ({name}); part 000"]
    spans = []
    offset = 0
    for s in sentences:
        for i, (text, pos) in enumerate(s.tokens):
            ne = "*"
            for a, b, label in s.nes:
                if a == b == i:
                    ne = f"({label})"
                elif a == i:
                    ne = f"({label}*"
                elif b == i:
                    ne = "*)"
            items = []
            for a, b, chain in sorted(s.mentions, key=lambda m: (m[0], -(m[1] - m[0]))):
                if a == b == i:
                    items.append(f"({chain})")
                elif a == i:
                    items.append(f"({chain}")
                elif b == i:
                    items.append(f"{chain})")
            coref = "|".join(items) if items else "-"
            lines.append(f"{name} 0 {i} {text} {pos} {ne} {coref}")
        for i, chain in s.content:
            spans.append((offset + i, chain))
        offset += len(s.tokens)
        lines.append("")
    lines.append("#end document")
    return "\n".join(lines) + "\n", spans


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "data/fixtures")
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20240611)
    conll = []
    content = []
    for n in range(50):
        name = f"fixture/doc_{n:02d}"
        text, spans = columns(name, make_document(n, rng))
        conll.append(text)
        for start, chain in spans:
            content.append({"doc_id": f"{name}_000", "start": start, "end": start,
                            "entities": [chain], "male": "chairman", "female": "chairwoman",
                            "neutral": "chairperson"})
    (out / "toy_corpus.conll").write_text("".join(conll))
    with open(out / "toy_content_words.jsonl", "w") as f:
        for row in content:
            f.write(json.dumps(row, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
