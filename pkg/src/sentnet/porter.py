"""Porter suffix-stripping stemmer.

Follows the classic five-step algorithm with the refinements that NLTK's
default ``PorterStemmer`` applies (irregular forms, the ``y -> i`` rule only
after a consonant, ``bli -> ble``, ``logi -> log``, ``fulli -> ful``), so
stems agree with that widely used implementation.
"""
from functools import lru_cache

_VOWELS = frozenset("aeiou")

_IRREGULAR = {
    "skies": "sky", "sky": "sky",
    "dying": "die", "lying": "lie", "tying": "tie",
    "news": "news",
    "innings": "inning", "inning": "inning",
    "outings": "outing", "outing": "outing",
    "cannings": "canning", "canning": "canning",
    "howe": "howe",
    "proceed": "proceed", "exceed": "exceed", "succeed": "succeed",
}


def _consonant_flags(word):
    flags = []
    for i, ch in enumerate(word):
        if ch in _VOWELS:
            flags.append(False)
        elif ch == "y":
            flags.append(True if i == 0 else not flags[i - 1])
        else:
            flags.append(True)
    return flags


def _is_consonant(word, i):
    return _consonant_flags(word[: i + 1])[i]


def _measure(stem):
    seq = "".join("c" if c else "v" for c in _consonant_flags(stem))
    return seq.count("vc")


def _has_vowel(stem):
    return not all(_consonant_flags(stem))


def _ends_double_consonant(word):
    return len(word) >= 2 and word[-1] == word[-2] and _is_consonant(word, len(word) - 1)


def _ends_cvc(word):
    if len(word) >= 3:
        f = _consonant_flags(word)
        return f[-3] and not f[-2] and f[-1] and word[-1] not in "wxy"
    if len(word) == 2:
        f = _consonant_flags(word)
        return not f[0] and f[1]
    return False


def _m_pos(stem):
    return _measure(stem) > 0


def _m_gt1(stem):
    return _measure(stem) > 1


def _apply_rules(word, rules):
    # first rule whose suffix matches decides, whether or not its condition holds
    for suffix, repl, cond in rules:
        if suffix == "*d":
            if _ends_double_consonant(word):
                stem = word[:-2]
                return stem + repl if cond is None or cond(stem) else word
            continue
        if word.endswith(suffix):
            stem = word[: len(word) - len(suffix)]
            return stem + repl if cond is None or cond(stem) else word
    return word


def _step1a(word):
    if word.endswith("ies") and len(word) == 4:
        return word[:-3] + "ie"
    return _apply_rules(word, [("sses", "ss", None), ("ies", "i", None),
                               ("ss", "ss", None), ("s", "", None)])


def _step1b(word):
    if word.endswith("ied"):
        return word[:-3] + ("ie" if len(word) == 4 else "i")
    if word.endswith("eed"):
        stem = word[:-3]
        return stem + "ee" if _measure(stem) > 0 else word
    for suffix in ("ed", "ing"):
        if word.endswith(suffix) and _has_vowel(word[: -len(suffix)]):
            stem = word[: -len(suffix)]
            break
    else:
        return word
    return _apply_rules(stem, [
        ("at", "ate", None),
        ("bl", "ble", None),
        ("iz", "ize", None),
        ("*d", stem[-1], lambda s: stem[-1] not in "lsz"),
        ("", "e", lambda s: _measure(s) == 1 and _ends_cvc(s)),
    ])


def _step1c(word):
    return _apply_rules(word, [
        ("y", "i", lambda s: len(s) > 1 and _is_consonant(s, len(s) - 1)),
    ])


_STEP2 = [
    ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"), ("bli", "ble"), ("alli", "al"), ("entli", "ent"),
    ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
    ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
    ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
    ("fulli", "ful"),
]


def _step2(word):
    if word.endswith("alli") and _m_pos(word[:-4]):
        return _step2(word[:-4] + "al")
    rules = [(s, r, _m_pos) for s, r in _STEP2]
    rules.append(("logi", "log", lambda s: _m_pos(word[:-3])))
    return _apply_rules(word, rules)


def _step3(word):
    return _apply_rules(word, [
        ("icate", "ic", _m_pos), ("ative", "", _m_pos), ("alize", "al", _m_pos),
        ("iciti", "ic", _m_pos), ("ical", "ic", _m_pos), ("ful", "", _m_pos),
        ("ness", "", _m_pos),
    ])


_STEP4 = ["al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
          "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize"]


def _step4(word):
    rules = []
    for suffix in _STEP4:
        if suffix == "ion":
            rules.append((suffix, "", lambda s: _measure(s) > 1 and s[-1:] in ("s", "t")))
        else:
            rules.append((suffix, "", _m_gt1))
    return _apply_rules(word, rules)


def _step5a(word):
    if word.endswith("e"):
        stem = word[:-1]
        m = _measure(stem)
        if m > 1 or (m == 1 and not _ends_cvc(stem)):
            return stem
    return word


def _step5b(word):
    return _apply_rules(word, [("ll", "l", lambda s: _measure(word[:-1]) > 1)])


@lru_cache(maxsize=65536)
def stem(word: str) -> str:
    """Porter stem of a lowercase word."""
    word = word.lower()
    if word in _IRREGULAR:
        return _IRREGULAR[word]
    if len(word) <= 2:
        return word
    for step in (_step1a, _step1b, _step1c, _step2, _step3, _step4, _step5a, _step5b):
        word = step(word)
    return word
