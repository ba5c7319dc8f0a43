#!/usr/bin/env python3
"""Regenerates the bundled pipeline fixtures (deterministic, stdlib only).

Layout produced:
  config.json          five-document end-to-end pipeline configuration
  docs/                raw document pairs (pseudo-Bengali / pseudo-English)
  trans/               line-aligned translation stand-ins for the bleu aligner
  dict/                small bilingual lexicon for the length-aligner boost
  emb/                 sentence -> vector lookup tables for the margin filter
  eval/                evaluation pairs for leakage removal
  sweep/               single-document corpus whose embedding geometry places
                       every pair's margin score at a chosen value

Planted constructs the tests assert on: one cross-document duplicate, one
embedding-orthogonal noise pair, one 2-1 merge, two leakage pairs, curly
quotes, a dangling ASCII numeral, and a shared Cyrillic run.
"""

import math
import os
import random

random.seed(20240809)
HERE = os.path.dirname(os.path.abspath(__file__))


def write(path, text):
    full = os.path.join(HERE, path)
    os.makedirs(os.path.dirname(full), exist_ok=True)
    with open(full, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


# Paired vocabulary: bengali word k translates to english word k.
BN = ["আমরা", "তারা", "নদীর", "পাহাড়", "গ্রামে", "শহরের", "বইটি", "পড়ে",
      "লেখে", "দেখে", "যায়", "আসে", "ভালো", "বড়", "ছোট", "নতুন", "পুরনো",
      "মানুষ", "ছেলেটি", "মেয়েটি", "পাখির", "গানটি", "জলের", "আকাশে", "আলোর",
      "রাতে", "সকালে", "বাজারে", "কৃষক", "শিক্ষক"]
EN = ["we", "they", "river", "mountain", "village", "city", "book", "reads",
      "writes", "sees", "goes", "comes", "good", "big", "small", "new", "old",
      "people", "boy", "girl", "bird", "song", "water", "sky", "light",
      "night", "morning", "market", "farmer", "teacher"]

CYR = "Привет большой мир"


def compose(text):
    # Keep fixture text in the composed forms the normalization table
    # produces, so normalize is a no-op on it and eval pairs match exactly.
    return (text.replace("য়", "য়")
                .replace("ড়", "ড়")
                .replace("ঢ়", "ঢ়"))


BN = [compose(w) for w in BN]


def fresh_seq(used, lo=4, hi=9):
    while True:
        seq = tuple(random.randrange(len(BN)) for _ in range(random.randint(lo, hi)))
        if seq not in used:
            used.add(seq)
            return seq


def bn_words(seq):
    return [BN[k] for k in seq]


def en_words(seq):
    return [EN[k] for k in seq]


def decorate(words, plan, i, side):
    out = list(words)
    if plan.get("numeral_at") == i:
        out.insert(1, "1971")
    if plan.get("cyrillic_at") == i:
        out.insert(len(out) // 2, CYR)
    if plan.get("quotes_at") == i:
        out[1] = "“" + out[1] + "”"
    if side == "en":
        out[0] = out[0].capitalize()
    return out


used = set()
d1 = [fresh_seq(used) for _ in range(8)]
d2 = [fresh_seq(used) for _ in range(9)]
d2[2] = d1[5]  # planted cross-document duplicate
d3 = [fresh_seq(used) for _ in range(10)]
d4 = [fresh_seq(used) for _ in range(7)]
d5 = [fresh_seq(used) for _ in range(8)]

plans = {
    "d1": {"seqs": d1, "numeral_at": 3},
    "d2": {"seqs": d2, "leak_at": 6},
    "d3": {"seqs": d3, "noise_at": 4},
    "d4": {"seqs": d4, "merge_at": 2},
    "d5": {"seqs": d5, "leak_at": 3, "quotes_at": 1, "cyrillic_at": 6},
}

eval_pairs = []
dim = 32


def unit(v):
    n = math.sqrt(sum(x * x for x in v))
    return [x / n for x in v]


def gauss_unit():
    return unit([random.gauss(0, 1) for _ in range(dim)])


def rotate(z, cos_angle):
    u = [random.gauss(0, 1) for _ in range(dim)]
    proj = sum(a * b for a, b in zip(u, z))
    u = unit([a - proj * b for a, b in zip(u, z)])
    s = math.sqrt(1 - cos_angle * cos_angle)
    return [cos_angle * a + s * b for a, b in zip(z, u)]


src_lex = {}  # sentence text -> vector
tgt_lex = {}
total_bn_chars = 0
total_en_chars = 0

for doc_id in ["d1", "d2", "d3", "d4", "d5"]:
    plan = plans[doc_id]
    seqs = plan["seqs"]
    merge_at = plan.get("merge_at")

    src_sents, tgt_sents, trans_lines, pi = [], [], [], []
    i = 0
    j = 0
    while i < len(seqs):
        if merge_at is not None and i == merge_at:
            merged = list(seqs[i]) + list(seqs[i + 1])
            tgt_sents.append(" ".join(decorate(en_words(merged), plan, i, "en")) + ".")
            pi += [j, j]
            i += 2
        else:
            tgt_sents.append(" ".join(decorate(en_words(seqs[i]), plan, i, "en")) + ".")
            pi.append(j)
            i += 1
        j += 1
    for i, seq in enumerate(seqs):
        src_sents.append(" ".join(decorate(bn_words(seq), plan, i, "bn")) + "।")
        rendered = decorate(en_words(seq), plan, i, "en")
        if len(rendered) > 5:
            del rendered[len(rendered) // 2]
        trans_lines.append(" ".join(rendered) + ".")

    total_bn_chars += sum(len(s) for s in src_sents)
    total_en_chars += sum(len(t) for t in tgt_sents)

    # Embedding geometry: one latent per target sentence; sources rotate
    # their intended target's latent. The planted noise pair gets a vector
    # orthogonal to its partner, pinning its margin score near zero.
    latents = [gauss_unit() for _ in tgt_sents]
    for jj, text in enumerate(tgt_sents):
        tgt_lex[text] = latents[jj]
    for ii, text in enumerate(src_sents):
        if plan.get("noise_at") == ii:
            z = latents[pi[ii]]
            v = [random.gauss(0, 1) for _ in range(dim)]
            proj = sum(a * b for a, b in zip(v, z))
            src_lex[text] = unit([a - proj * b for a, b in zip(v, z)])
        else:
            src_lex[text] = rotate(latents[pi[ii]], 0.96)
    # Adjacent joins: the intended merge tracks its target, others are far.
    for ii in range(len(src_sents) - 1):
        join = src_sents[ii] + " " + src_sents[ii + 1]
        if merge_at is not None and ii == merge_at:
            src_lex[join] = rotate(latents[pi[ii]], 0.96)
        else:
            src_lex[join] = gauss_unit()
    for jj in range(len(tgt_sents) - 1):
        tgt_lex[tgt_sents[jj] + " " + tgt_sents[jj + 1]] = gauss_unit()

    if "leak_at" in plan:
        k = plan["leak_at"]
        eval_pairs.append((src_sents[k], tgt_sents[pi[k]]))

    write("docs/%s.src.txt" % doc_id, " ".join(src_sents) + "\n")
    write("docs/%s.tgt.txt" % doc_id, " ".join(tgt_sents) + "\n")
    write("trans/%s.txt" % doc_id, "\n".join(trans_lines) + "\n")

# One eval pair that never occurs in training data.
extra = fresh_seq(used)
eval_pairs.append((" ".join(bn_words(extra)) + "।",
                   " ".join(en_words(extra)).capitalize() + "."))
write("eval/eval.tsv", "".join(f"{s}\t{t}\n" for s, t in eval_pairs))

write("dict/lex.tsv", "".join(f"{BN[k]}\t{EN[k]}\n" for k in range(8)))


def write_lex(prefix, lex):
    sentences = list(lex.keys())
    write(prefix + ".sentences.txt", "\n".join(sentences) + "\n")
    rows = []
    for s in sentences:
        rows.append(" ".join("%.8f" % x for x in lex[s]))
    write(prefix + ".vectors.txt", "\n".join(rows) + "\n")


write_lex("emb/src", src_lex)
write_lex("emb/tgt", tgt_lex)

mean_ratio = total_en_chars / total_bn_chars
config = """{
  "seed": 42,
  "output_dir": "out",
  "jobs": 1,
  "src_lang": "bn",
  "tgt_lang": "en",
  "documents": [
%s
  ],
  "segmenter": {"abbreviations": "../../data/abbreviations.txt"},
  "aligners": [
    {"name": "bleu", "method": "bleu", "max_ngram": 2, "anchor_threshold": 0.1},
    {"name": "length", "method": "length", "dict": "dict/lex.tsv", "mean_ratio": %.4f}
  ],
  "ensemble": ["bleu", "length"],
  "filter": {
    "enabled": true, "mode": "batch", "margin": 1.0, "k": 4,
    "batch_size": 1000, "seed": 42,
    "src_embeddings": {"sentences": "emb/src.sentences.txt", "vectors": "emb/src.vectors.txt"},
    "tgt_embeddings": {"sentences": "emb/tgt.sentences.txt", "vectors": "emb/tgt.vectors.txt"}
  },
  "preprocess": {
    "steps": ["normalize", "foreign", "translit", "dedup"],
    "table": "../../data/normalization.tsv",
    "translit_side": "src"
  },
  "leakage": {"eval_sets": ["eval/eval.tsv"], "mode": "both"}
}
""" % (",\n".join(
    '    {"pair_id": "%s", "src": "docs/%s.src.txt", "tgt": "docs/%s.tgt.txt",'
    ' "src_translated": "trans/%s.txt"}' % (d, d, d, d)
    for d in ["d1", "d2", "d3", "d4", "d5"]), mean_ratio)
write("config.json", config)

# ---------------------------------------------------------------------------
# Sweep fixture: hub construction with exact margin scores.
# x_i = sqrt(w) h + sqrt(1-w) e_i ; y_i = sqrt(w) h + sqrt(1-w)(a e_i + b g_i)
# All cross cosines are w; cos(x_i, y_i) = w + (1-w) a. For k = 4 neighbors
# the margin score is t/w below w and 4t/(t+3w) above it.
# ---------------------------------------------------------------------------

W = 0.4
N_GOLD, N_NOISE = 60, 40
N = N_GOLD + N_NOISE
BN_LETTERS = "কখগঘচছজঝটঠডতথদধনপফবভমযরলশষসহ"


def cos_for_score(s):
    return s * W if s <= 1.0 else 3.0 * W * s / (4.0 - s)


ABBREV_STEMS = set()
with open(os.path.join(HERE, "..", "..", "data", "abbreviations.txt"),
          encoding="utf-8") as f:
    for line in f:
        line = line.strip()
        if line and not line.startswith("#"):
            ABBREV_STEMS.add(line[:-1].lower())


def filler_sentence(length, letters, terminal, capital=False):
    # Distinct words of >= 3 letters, exact codepoint length including the
    # terminal. The final word must not collide with an abbreviation entry
    # or a bare initial, or the segmenter would rightly refuse to split.
    while True:
        body = length - 1
        lens = []
        remaining = body
        while remaining > 9:
            w = random.randint(3, 6)
            lens.append(w)
            remaining -= w + 1
        lens.append(remaining)  # 3..9 by construction
        words = ["".join(random.choice(letters) for _ in range(w))
                 for w in lens]
        if words[-1].lower() in ABBREV_STEMS:
            continue
        text = " ".join(words) + terminal
        if capital:
            text = text[0].upper() + text[1:]
        assert len(text) == length, (len(text), length)
        return text


scores = [1.08 + 0.37 * i / (N_GOLD - 1) for i in range(N_GOLD)]
scores += [0.92 + 0.11 * j / (N_NOISE - 1) for j in range(N_NOISE)]
is_gold = [True] * N_GOLD + [False] * N_NOISE
order = list(range(N))
random.shuffle(order)

sweep_src, sweep_tgt, gold_rows = [], [], []
src_rows, tgt_rows = [], []
d_sweep = 2 * N + 1
for pos, idx in enumerate(order):
    length = random.randint(40, 100)
    s_text = filler_sentence(length, BN_LETTERS, "।")
    t_text = filler_sentence(length, "abcdefghijklmnopqrstuvwxyz", ".", True)
    sweep_src.append(s_text)
    sweep_tgt.append(t_text)
    t = cos_for_score(scores[idx])
    a = (t - W) / (1.0 - W)
    b = math.sqrt(max(0.0, 1.0 - a * a))
    x = [0.0] * d_sweep
    y = [0.0] * d_sweep
    x[0] = y[0] = math.sqrt(W)
    x[1 + pos] = math.sqrt(1 - W)
    y[1 + pos] = math.sqrt(1 - W) * a
    y[1 + N + pos] = math.sqrt(1 - W) * b
    src_rows.append((s_text, x))
    tgt_rows.append((t_text, y))
    if is_gold[idx]:
        gold_rows.append((s_text, t_text))

write("sweep/docs/sweep.src.txt", " ".join(sweep_src) + "\n")
write("sweep/docs/sweep.tgt.txt", " ".join(sweep_tgt) + "\n")
write("sweep/gold.tsv", "".join(f"{s}\t{t}\n" for s, t in gold_rows))
write("sweep/emb/src.sentences.txt", "\n".join(s for s, _ in src_rows) + "\n")
write("sweep/emb/src.vectors.txt",
      "\n".join(" ".join("%.8f" % v for v in vec) for _, vec in src_rows) + "\n")
write("sweep/emb/tgt.sentences.txt", "\n".join(s for s, _ in tgt_rows) + "\n")
write("sweep/emb/tgt.vectors.txt",
      "\n".join(" ".join("%.8f" % v for v in vec) for _, vec in tgt_rows) + "\n")

write("sweep/config.json", """{
  "seed": 7,
  "output_dir": "out",
  "src_lang": "bn",
  "tgt_lang": "en",
  "documents": [
    {"pair_id": "sweep", "src": "docs/sweep.src.txt", "tgt": "docs/sweep.tgt.txt"}
  ],
  "aligners": [
    {"name": "length", "method": "length"}
  ],
  "ensemble": ["length"],
  "filter": {
    "enabled": true, "mode": "global", "margin": 0.96, "k": 4,
    "src_embeddings": {"sentences": "emb/src.sentences.txt", "vectors": "emb/src.vectors.txt"},
    "tgt_embeddings": {"sentences": "emb/tgt.sentences.txt", "vectors": "emb/tgt.vectors.txt"}
  }
}
""")

print("fixture written; mean_ratio=%.4f, eval pairs=%d, lexicon sizes=%d/%d"
      % (mean_ratio, len(eval_pairs), len(src_lex), len(tgt_lex)))
