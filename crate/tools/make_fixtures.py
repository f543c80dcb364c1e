#!/usr/bin/env python3
"""Generate the word-list and corpus fixtures under fixtures/ from the
wordnet-extract database. Offsets in word-list files must match the
extract, so they are generated rather than hand-typed.

Usage: python3 tools/make_fixtures.py
"""

import json
import os

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
EXTRACT = os.path.join(ROOT, "fixtures", "wordnet-extract")


def load_index(pos):
    idx = {}
    for line in open(os.path.join(EXTRACT, f"index.{pos}")):
        p = line.split()
        idx[p[0]] = [int(x) for x in p[6 : 6 + int(p[2])]]
    return idx


def load_glosses(pos):
    g = {}
    for line in open(os.path.join(EXTRACT, f"data.{pos}")):
        head, _, gloss = line.partition(" | ")
        g[int(head.split()[0])] = gloss.strip()
    return g


NIDX = load_index("noun")
VIDX = load_index("verb")
AIDX = load_index("adj")
AGLO = load_glosses("adj")


def noun(lemma, sense=1):
    return f"{lemma}.n {NIDX[lemma][sense - 1]:08d}"


def verb(lemma, sense=1):
    return f"{lemma}.v {VIDX[lemma][sense - 1]:08d}"


def adj(lemma, sense=1):
    return f"{lemma}.a {AIDX[lemma][sense - 1]:08d}"


def adj_by_gloss(lemma, needle):
    for off in AIDX[lemma]:
        if needle in AGLO[off]:
            return f"{lemma}.a {off:08d}"
    raise KeyError(f"{lemma}: no adj sense with {needle!r}")


def write(path, lines):
    full = os.path.join(ROOT, path)
    os.makedirs(os.path.dirname(full), exist_ok=True)
    with open(full, "w") as f:
        f.write("\n".join(lines) + "\n")
    print(f"wrote {path}")


# ---------------------------------------------------------------- word lists

write(
    "fixtures/wordlists/non_imageable_people.txt",
    ["# occupations, roles, and judgments that are not visually inferable"]
    + [
        noun(w)
        for w in [
            "accountant", "lawyer", "engineer", "philosopher", "genius",
            "hero", "friend", "stranger", "expert", "owner", "leader",
            "winner",
        ]
    ],
)

write(
    "fixtures/wordlists/offensive_people.txt",
    ["# person-subtree synsets flagged as offensive or demeaning"]
    + [noun(w) for w in ["homeless", "villager", "clown", "fool", "loser"]],
)

write(
    "fixtures/wordlists/adjective_categories.txt",
    [
        "# people-descriptor adjectives grouped by category",
        "category: attractiveness",
        adj("beautiful"),
        adj("attractive"),
        adj("handsome"),
        adj("cute"),
        adj("ugly"),
        "",
        "category: ethnicity",
        adj_by_gloss("black", "racial group"),
        adj_by_gloss("white", "racial group"),
        adj("asian"),
        adj("african"),
        adj("hispanic"),
        "",
        "category: judgment",
        adj("crazy"),
        adj("stupid"),
        adj("lazy"),
        adj("weird"),
        adj("silly"),
        adj("dumb"),
        "",
        "category: mood",
        adj("happy"),
        adj("sad"),
        adj("angry"),
        adj("excited"),
    ],
)

write(
    "fixtures/wordlists/visual_verbs.txt",
    ["# verbs with an unambiguous visual connotation"]
    + [
        verb(w)
        for w in [
            "ride", "hold", "sit", "stand", "walk", "run", "eat", "drink",
            "play", "jump", "fly", "surf", "ski", "carry", "wear", "cut",
            "smile", "sleep", "swim", "throw", "catch", "hit", "look",
            "watch", "drive", "pull", "push", "climb", "skate", "read",
            "feed", "graze", "lean", "race", "greet", "raise", "point",
            "park", "serve", "fill", "cross", "wait", "cook",
        ]
    ],
)

write(
    "fixtures/wordlists/person_words.txt",
    ["# roots of the person vocabulary; hyponyms count as mentions", noun("person"), noun("people")],
)

# ------------------------------------------------------------- coco corpus

W, H = 640, 480
CATS = [
    "person", "surfboard", "wave", "fruit", "table", "tie", "dress", "dog",
    "bench", "horse", "kitchen", "cabinet", "appliance", "racket", "field",
]
CAT_ID = {c: i + 1 for i, c in enumerate(CATS)}

# image id -> list of (category, x, y, w, h) in pixels
BOXES = {
    1: [("kitchen", 0, 0, 640, 480), ("cabinet", 40, 40, 200, 160), ("appliance", 300, 200, 180, 200)],
    2: [("person", 200, 100, 160, 240), ("surfboard", 180, 300, 260, 60), ("wave", 0, 240, 640, 240)],
    3: [("fruit", 260, 180, 120, 100), ("table", 40, 200, 560, 240)],
    4: [("person", 220, 60, 200, 400), ("tie", 300, 160, 40, 140)],
    5: [("person", 240, 80, 180, 380), ("dress", 250, 200, 160, 220)],
    6: [("person", 200, 80, 200, 380), ("dog", 60, 300, 140, 120)],
    7: [("person", 220, 90, 180, 360), ("racket", 380, 140, 80, 120)],
    8: [("person", 210, 70, 190, 390), ("bench", 100, 320, 380, 120)],
    9: [("person", 230, 60, 170, 400), ("field", 0, 200, 640, 280)],
    10: [("person", 240, 100, 160, 340)],
    11: [("table", 100, 220, 420, 200)],
    12: [("person", 200, 60, 160, 300), ("horse", 160, 180, 320, 260)],
}

CAPTIONS = {
    1: [
        "a kitchen with wooden cabinets and black appliances",
        "a clean kitchen with a counter and cabinets",
        "an empty kitchen with wooden cabinets",
        "a kitchen with a sink and black appliances",
        "cabinets and appliances in a small kitchen",
    ],
    2: [
        "a person riding a wave on a surfboard",
        "a surfer riding a large wave",
        "someone on a surfboard in the ocean",
        "a person surfing on a big wave",
        "a surfer on a wave near the beach",
    ],
    3: [
        "a piece of fruit on a wooden table",
        "fruit sitting on a table",
        "a table with fruit on it",
        "some fruit on a small table",
        "a round fruit on the table",
    ],
    4: [
        "a man wearing a tie standing in a room",
        "a man in a suit and tie",
        "a man with a tie looking at the camera",
        "a man wearing a black tie",
        "a smiling man in a tie",
    ],
    5: [
        "a woman wearing a long dress",
        "a woman in a dress standing outside",
        "a woman in a white dress",
        "a smiling woman wearing a dress",
        "a woman in a dress at a party",
    ],
    6: [
        "a man standing next to a dog",
        "a man and his dog in the yard",
        "a man with a small dog",
        "a man standing with a dog outside",
        "a dog beside a standing man",
    ],
    7: [
        "a woman holding a racket on a court",
        "a woman playing tennis with a racket",
        "a woman swinging a tennis racket",
        "a woman with a racket at a game",
        "a woman holding a racket outside",
    ],
    8: [
        "a man sitting on a bench in a park",
        "a man resting on a wooden bench",
        "a man sitting on a bench outside",
        "a man on a park bench",
        "a man sitting alone on a bench",
    ],
    9: [
        "a man standing in a grassy field",
        "a man walking through a field",
        "a man in a large green field",
        "a man standing in the grass",
        "a man out in an open field",
    ],
    10: [
        "a woman standing on a beach",
        "a woman at the beach near the water",
        "a woman standing by the ocean",
        "a woman on the sand at a beach",
        "a woman enjoying the beach",
    ],
    12: [
        "a man riding a horse",
        "a man on a brown horse",
        "a man riding a horse down a road",
        "a person riding a large horse",
        "a man on horseback outside",
    ],
}

VG = [
    {
        "image_id": 1,
        "attributes": [
            {"object": "cabinet.n.1", "attribute": "wooden.a.1"},
            {"object": "appliance.n.1", "attribute": "black.a.1"},
        ],
        "relationships": [
            {"subject": "kitchen.n.1", "predicate": "with", "object": "cabinet.n.1"},
            {"subject": "kitchen.n.1", "predicate": "with", "object": "appliance.n.1"},
        ],
    },
    {
        "image_id": 12,
        "attributes": [{"object": "horse.n.1", "attribute": "brown.a.1"}],
        "relationships": [
            {"subject": "person.n.1", "predicate": "ride.v.1", "object": "horse.n.1"}
        ],
    },
]

# image id -> (gender, skin_tone) for the largest person
DEMOGRAPHICS = {
    2: ("female", "lighter"),
    4: ("male", "lighter"),
    5: ("female", "lighter"),
    6: ("male", "darker"),
    7: ("female", "darker"),
    8: ("male", "darker"),
    9: ("male", "lighter"),
    10: ("female", "darker"),
    12: ("male", "lighter"),
}

S2 = {
    1: "kitchen,cabinet,appliance",
    2: "person,surfboard,wave",
    3: "fruit,table",
    4: "person,tie",
    5: "person,dress",
    6: "person,dog",
    7: "person,racket",
    8: "person,bench",
    9: "person,field",
    10: "person",
    11: "table",
    12: "person,horse",
}

S4 = {
    1: "a kitchen with wooden cabinets and black appliances",
    2: "a woman in a bikini riding a wave on a surfboard",
    3: "an apple on a table",
    4: "a man wearing a tie",
    5: "a woman in a dress",
    6: "a man holding a gun",
    7: "a girl holding a racket",
    8: "a boy sitting on a bench",
    9: "a dog standing in a field",
    10: "island which includes a beach and water sports as well as an individual female",
    11: "a wooden table",
    12: "a man riding a horse",
}


def make_coco():
    images = [{"id": i, "width": W, "height": H, "file_name": f"{i:06d}.jpg"} for i in BOXES]
    annotations = []
    aid = 1
    for img, boxes in BOXES.items():
        for cat, x, y, w, h in boxes:
            annotations.append(
                {"id": aid, "image_id": img, "category_id": CAT_ID[cat], "bbox": [x, y, w, h]}
            )
            aid += 1
    categories = [{"id": i, "name": c} for c, i in CAT_ID.items()]
    write_json("fixtures/corpus-coco/instances.json", {
        "images": images, "annotations": annotations, "categories": categories,
    })

    rows = []
    cid = 1000
    for img, caps in CAPTIONS.items():
        for c in caps:
            rows.append({"id": cid, "image_id": img, "caption": c})
            cid += 1
    write_json("fixtures/corpus-coco/captions.json", {"annotations": rows})

    write_json("fixtures/corpus-coco/vg.json", VG)

    demo = ["image_id,gender,skin_tone,x,y,w,h"]
    for img, (g, s) in DEMOGRAPHICS.items():
        cat, x, y, w, h = next(b for b in BOXES[img] if b[0] == "person")
        demo.append(f"{img},{g},{s},{x},{y},{w},{h}")
    write("fixtures/corpus-coco/demographics.csv", demo)

    write("fixtures/corpus-coco/s2.tsv", [f"{i}\t{v}" for i, v in S2.items()])
    write("fixtures/corpus-coco/s4.tsv", [f"{i}\t{v}" for i, v in S4.items()])


def write_json(path, obj):
    full = os.path.join(ROOT, path)
    os.makedirs(os.path.dirname(full), exist_ok=True)
    with open(full, "w") as f:
        json.dump(obj, f, indent=1)
        f.write("\n")
    print(f"wrote {path}")


CC = [
    ("cc1", "father and son on a horse"),
    ("cc2", "portraits of the homeless by person"),
    ("cc3", "a woman holding a racket on a court"),
    ("cc4", "an abstract painting of a man playing guitar"),
    ("cc5", "island which includes a beach and water sports as well as an individual female"),
]

CC_S4 = [
    ("cc1", "horse and cart on the road"),
    ("cc2", "portrait of a local villager with a moustache"),
    ("cc3", "a girl holding a racket"),
    ("cc4", "pink wallpaper from the collection"),
    ("cc5", "happy female high school student raising hands in the classroom"),
]

make_coco()
write("fixtures/corpus-cc.tsv", [f"{i}\t{c}" for i, c in CC])
write("fixtures/cc-s4.tsv", [f"{i}\t{c}" for i, c in CC_S4])
