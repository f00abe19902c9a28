"""Frozen (true, predicted, reward) triples from trained-agent transcripts.

These are the library's reward oracles: every environment must reproduce the
recorded total reward exactly, in both dense and sparse flavors.
"""

CONLL_LABELS = ["PER", "LOC", "ORG", "MISC", "O"]
UDPOS_LABELS = [
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X",
]


def tag_seq(n: int, changes: dict[int, str], fill: str = "O") -> list[str]:
    seq = [fill] * n
    for pos, label in changes.items():
        seq[pos] = label
    return seq


# (name, true_label, predicted_label, total_reward)
SEQTAG_EPISODES = [
    (
        "conll_justin",
        tag_seq(15, {0: "PER"}),
        tag_seq(15, {0: "PER"}),
        1.0,
    ),
    (
        "conll_ricky_watters",
        tag_seq(27, {0: "PER", 1: "PER"}),
        tag_seq(27, {0: "PER", 1: "PER", 6: "ORG"}),
        0.9629629629629629,
    ),
    (
        "conll_sacramento",
        tag_seq(5, {0: "ORG"}),
        tag_seq(5, {0: "LOC"}),
        0.8000000000000002,
    ),
    (
        "conll_tampico",
        tag_seq(35, {0: "LOC", 33: "MISC"}),
        tag_seq(35, {0: "ORG", 33: "PER"}),
        0.9428571428571428,
    ),
    (
        "conll_beijing",
        tag_seq(2, {0: "LOC"}),
        tag_seq(2, {0: "LOC"}),
        1.0,
    ),
    (
        "udpos_wei_ligang",
        ["PROPN", "PROPN", "PUNCT", "DET", "VERB", "NOUN", "ADP", "ADJ",
         "NOUN", "ADP", "PROPN", "PUNCT", "ADV", "VERB", "DET", "NOUN",
         "ADP", "PROPN", "PUNCT", "NUM", "ADP", "PROPN", "PROPN", "PUNCT"],
        ["PROPN", "PROPN", "PUNCT", "DET", "VERB", "NOUN", "ADP", "ADJ",
         "NOUN", "ADP", "PROPN", "PUNCT", "ADV", "VERB", "DET", "NOUN",
         "ADP", "PROPN", "PUNCT", "NUM", "ADP", "PROPN", "PROPN", "PUNCT"],
        1.0,
    ),
    (
        "udpos_google",
        ["PRON", "SCONJ", "PROPN", "VERB", "ADP", "PROPN", "PUNCT"],
        ["PRON", "CCONJ", "PROPN", "VERB", "ADP", "PROPN", "PUNCT"],
        0.8571428571428571,
    ),
    (
        "udpos_they_know",
        ["PRON", "VERB", "SCONJ", "DET", "ADJ", "NOUN", "VERB", "ADP",
         "PRON", "DET", "NOUN", "PUNCT", "CCONJ", "DET", "NOUN", "ADP",
         "DET", "PROPN", "CCONJ", "PROPN", "PUNCT", "CCONJ",
         "PRON", "VERB", "PART", "VERB", "ADV", "PUNCT"],
        ["PRON", "VERB", "PRON", "DET", "ADJ", "NOUN", "VERB", "ADP",
         "PRON", "DET", "NOUN", "PUNCT", "CCONJ", "DET", "NOUN", "ADP",
         "DET", "PROPN", "CCONJ", "PROPN", "PUNCT", "CCONJ",
         "PRON", "VERB", "ADP", "VERB", "ADV", "PUNCT"],
        0.9285714285714286,
    ),
    (
        "udpos_ellipsis",
        ["SYM"],
        ["PUNCT"],
        0.0,
    ),
    (
        "udpos_police",
        ["AUX", "NOUN", "VERB", "DET", "NOUN", "NOUN", "ADV",
         "SCONJ", "PRON", "AUX", "VERB", "ADP", "PUNCT"],
        ["AUX", "ADJ", "NOUN", "DET", "NOUN", "NOUN",
         "ADV", "CCONJ", "PRON", "AUX", "VERB", "ADP", "PUNCT"],
        0.7692307692307693,
    ),
]

# (name, oracle label set, emitted label sequence, total_reward)
MLC_EPISODES = [
    ("reuters_fed", ["interest", "money-fx"], ["money-fx", "interest"], 1.0),
    ("reuters_nerci", ["acq", "crude", "nat-gas"], ["crude"], 0.5),
    ("reuters_ssoa", ["earn"], ["earn"], 1.0),
    ("reuters_cpi", ["cpi"], ["money-supply"], 0.0),
    ("aapd_relay", ["quant-ph", "cs.IT", "math.IT"], ["cs.IT", "math.IT"], 0.8),
    ("aapd_adhoc", ["cs.CR", "cs.NI"], ["cs.CR", "cs.NI"], 1.0),
]

MLC_LABELS = sorted(
    {label for _, true, pred, _ in MLC_EPISODES for label in true + pred}
)

# (name, choices, answer_key, selected_key, total_reward)
QA_EPISODES = [
    (
        "flooding",
        {k: f"choice {k}" for k in "ABCDEFGH"},
        "F",
        "F",
        1.0,
    ),
    (
        "cryptosporidium",
        {k: f"choice {k}" for k in "ABCDEFGH"},
        "D",
        "A",
        0.0,
    ),
    (
        "magnets",
        {k: f"choice {k}" for k in "ABCDEFGH"},
        "H",
        "H",
        1.0,
    ),
]
