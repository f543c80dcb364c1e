#!/usr/bin/env python3
"""Build fixtures/wordnet-extract from a real WordNet 3.x dict directory.

The extract is a self-consistent subset of the standard plain-text database:
every sense of every seed lemma, plus the full hypernym closure of those
senses, plus the complete subtrees of a few configured roots. Only
hypernym/hyponym pointers between kept synsets are retained (p_cnt is
rewritten); word lists, lex ids, sense ordering, and glosses are verbatim.

Usage:
    python3 tools/make_wordnet_extract.py /path/to/dict fixtures/wordnet-extract

A real dict directory can be obtained from the `wordnet-db` npm package or a
system WordNet installation.
"""

import os
import sys
from collections import defaultdict

POSES = ["noun", "verb", "adj", "adv"]
POS_TAG = {"noun": "n", "verb": "v", "adj": "a", "adv": "r"}

SEED_NOUNS = """
person man woman boy girl child baby kid adult lady guy father mother son
daughter brother sister family couple friend stranger neighbor owner leader
winner loser hero genius expert philosopher engineer lawyer accountant
controller villager clown fool vagrant surfer skier rider runner student
player crowd people group pair team
dog cat horse bird elephant bear zebra giraffe sheep cow animal puppy kitten
fork knife spoon bowl plate cup glass bottle utensil cutlery tableware
kitchen cabinet appliance stove oven microwave toaster sink refrigerator
counter table chair couch bench bed desk shelf room bathroom living_room
house building wall window door floor city street road sidewalk park field
beach ocean sea water wave snow mountain sky tree grass flower plant
food fruit apple banana orange sandwich pizza cake donut broccoli carrot
hot_dog vegetable noodle sushi tray pan wine beer bread cheese meal
car bus train truck boat motorcycle bicycle airplane traffic_light
bench backpack umbrella handbag suitcase book clock vase scissors
teddy_bear toothbrush laptop mouse remote keyboard cell_phone phone tv
television camera surfboard ski snowboard kite baseball_bat baseball_glove
bat glove skateboard tennis_racket racket ball frisbee helmet uniform
jacket shirt hat tie dress suit bikini wedding_dress
hand head hair face eye arm leg wheel engine light lamp mirror towel
blanket pillow toy sign pole platform track station game tennis baseball
marathon race start classroom school high_school island sport portrait
painting picture image photo weapon gun rifle pistol sword cart dirt
male female dad mom pop substitute homeless cellphone cellular_telephone
mobile_phone wineglass hair_dryer dining_table fire_hydrant parking_meter
baseball_player tennis_racket remote_control moustache villager
""".split()

SEED_VERBS = """
ride hold sit stand walk run look watch eat drink play jump fly surf ski
carry wear cut talk smile sleep lie swim throw catch hit drive pull push
greet raise read feed graze race park cook serve fill cross wait climb
skate lean point prepare have be make do get go come take relax enjoy
isolate glow post love think know want bunt wade
""".split()

SEED_ADJS = """
wooden black white red blue green yellow brown gray grey pink purple
orange small large big little young old tall short long happy sad angry
excited crazy creepy lazy stupid weird dumb beautiful pretty attractive
handsome cute ugly dirty clean empty full open wet dry individual local
blank abstract interesting nice dark light female male homeless busy
modern asian african hispanic blond elderly silly wise
""".split()

SEED_ADVS = "very together outside slowly well down fast".split()

SEEDS = {"noun": SEED_NOUNS, "verb": SEED_VERBS, "adj": SEED_ADJS, "adv": SEED_ADVS}

# Full hyponym subtrees to keep (lemma, pos, sense index).
SUBTREE_ROOTS = [("weapon", "noun", 0)]


def read_index(path):
    order = {}
    for line in open(path, encoding="utf-8"):
        if line.startswith("  "):
            continue
        parts = line.split()
        lemma, synset_cnt, p_cnt = parts[0], int(parts[2]), int(parts[3])
        rest = parts[4 + p_cnt:]
        order[lemma] = [int(x) for x in rest[2 : 2 + synset_cnt]]
    return order


def read_data(path, pos):
    syns = {}
    for line in open(path, encoding="utf-8"):
        if line.startswith("  "):
            continue
        head, _, gloss = line.rstrip("\n").partition(" | ")
        parts = head.split()
        off = int(parts[0])
        lex_filenum, ss_type = parts[1], parts[2]
        w_cnt = int(parts[3], 16)
        words = [(parts[4 + 2 * i], parts[5 + 2 * i]) for i in range(w_cnt)]
        pi = 4 + 2 * w_cnt
        p_cnt = int(parts[pi])
        ptrs = []
        for i in range(p_cnt):
            sym = parts[pi + 1 + 4 * i]
            tgt = int(parts[pi + 2 + 4 * i])
            tpos = parts[pi + 3 + 4 * i]
            ptrs.append((sym, tgt, tpos))
        syns[off] = {
            "lex": lex_filenum,
            "type": ss_type,
            "words": words,
            "ptrs": ptrs,
            "gloss": gloss,
        }
    return syns


def strip_marker(word):
    return word[: word.index("(")] if "(" in word else word


def main():
    src, dst = sys.argv[1], sys.argv[2]
    os.makedirs(dst, exist_ok=True)

    index = {p: read_index(os.path.join(src, f"index.{p}")) for p in POSES}
    data = {p: read_data(os.path.join(src, f"data.{p}"), p) for p in POSES}

    # Data-file pos key for a pointer target: adj satellites live in data.adj.
    def data_pos(tag):
        return {"n": "noun", "v": "verb", "a": "adj", "s": "adj", "r": "adv"}[tag]

    keep = {p: set() for p in POSES}

    def hypernyms(pos, off):
        return [
            (data_pos(tpos), tgt)
            for (sym, tgt, tpos) in data[pos][off]["ptrs"]
            if sym in ("@", "@i")
        ]

    def keep_with_ancestors(pos, off):
        stack = [(pos, off)]
        while stack:
            p, o = stack.pop()
            if o in keep[p]:
                continue
            keep[p].add(o)
            stack.extend(hypernyms(p, o))

    missing = []
    for pos, seeds in SEEDS.items():
        for lemma in seeds:
            offs = index[pos].get(lemma)
            if not offs:
                missing.append(f"{lemma}.{POS_TAG[pos]}")
                continue
            for off in offs:
                keep_with_ancestors(pos, off)

    hypo = defaultdict(list)
    for pos in POSES:
        for off, syn in data[pos].items():
            for sym, tgt, tpos in syn["ptrs"]:
                if sym in ("@", "@i"):
                    hypo[(data_pos(tpos), tgt)].append((pos, off))
    for lemma, pos, sense in SUBTREE_ROOTS:
        root = index[pos][lemma][sense]
        stack = [(pos, root)]
        seen = set()
        while stack:
            cur = stack.pop()
            if cur in seen:
                continue
            seen.add(cur)
            keep_with_ancestors(*cur)
            stack.extend(hypo[cur])

    total = 0
    for pos in POSES:
        kept = keep[pos]
        total += len(kept)
        with open(os.path.join(dst, f"data.{pos}"), "w", encoding="utf-8") as f:
            for off in sorted(kept):
                syn = data[pos][off]
                ptrs = [
                    (sym, tgt, tpos)
                    for (sym, tgt, tpos) in syn["ptrs"]
                    if sym in ("@", "@i", "~", "~i") and tgt in keep[data_pos(tpos)]
                ]
                toks = [f"{off:08d}", syn["lex"], syn["type"], f"{len(syn['words']):02x}"]
                for w, lid in syn["words"]:
                    toks += [w, lid]
                toks.append(f"{len(ptrs):03d}")
                for sym, tgt, tpos in ptrs:
                    toks += [sym, f"{tgt:08d}", tpos, "0000"]
                if pos == "verb":
                    toks.append("00")
                f.write(" ".join(toks) + " | " + syn["gloss"] + "\n")

        # Every word of every kept synset gets an index entry, preserving
        # the original sense order restricted to kept offsets.
        lemmas = defaultdict(set)
        for off in kept:
            for w, _ in data[pos][off]["words"]:
                lemmas[strip_marker(w).lower()].add(off)
        with open(os.path.join(dst, f"index.{pos}"), "w", encoding="utf-8") as f:
            for lemma in sorted(lemmas):
                original = index[pos].get(lemma, [])
                offs = [o for o in original if o in kept]
                offs += sorted(lemmas[lemma] - set(offs))
                n = len(offs)
                f.write(
                    f"{lemma} {POS_TAG[pos]} {n} 0 {n} 0 "
                    + " ".join(f"{o:08d}" for o in offs)
                    + "\n"
                )
        print(f"{pos}: kept {len(kept)} synsets, {len(lemmas)} lemmas")

    print(f"total synsets: {total}")
    if missing:
        print("seeds not present in source database:", " ".join(sorted(missing)))


if __name__ == "__main__":
    main()
