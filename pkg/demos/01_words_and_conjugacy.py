"""Free-group words, cyclic words, and conjugacy keys.

Words live over a fixed basis a, b, c, ... with uppercase inverses; the
empty word prints as 1.  Conjugacy classes get a canonical representative:
the lexicographically least rotation of the cyclically reduced core.
"""

from aperiodic_lab.words import (
    Alphabet,
    CyclicWord,
    cyclic_reduce,
    parse_word,
    word_str,
)

F2 = Alphabet(2)

print("== free reduction ==")
for text in ["aA", "abBA", "abAB", "baBA"]:
    word = parse_word(F2, text)
    print(f"  {text:6} reduces to {word_str(word)}")

print("\n== cyclic reduction splits off the conjugator ==")
for text in ["baB", "babAB", "aabAA"]:
    word = parse_word(F2, text)
    core, conj = cyclic_reduce(word)
    print(
        f"  {word_str(word):8} = {word_str(conj)} * {word_str(core.as_word())} * {word_str(conj)}^-1"
    )

print("\n== conjugate words share one canonical core ==")
u = parse_word(F2, "ab")
for conj_text in ["1", "a", "ba", "abab"]:
    g = parse_word(F2, conj_text)
    twisted = g * u * g.inverse()
    core, _ = cyclic_reduce(twisted)
    print(f"  {word_str(twisted):12} core {word_str(core.as_word())}")

print("\n== canonical rotation is a hashable conjugacy key ==")
classes = {CyclicWord(F2, parse_word(F2, t).letters) for t in ["ab", "ba", "bA", "Ab"]}
print(f"  four spellings, {len(classes)} distinct classes")
