import pytest
from hypothesis import given, settings, strategies as st

from aperiodic_lab.words import (
    Alphabet,
    CyclicWord,
    Word,
    all_reduced_words,
    apply_endo,
    cyclic_reduce,
    parse_word,
    reduce,
    word_str,
)

A2 = Alphabet(2)
A3 = Alphabet(3)


def w(text, alphabet=A2):
    return parse_word(alphabet, text)


letters_2 = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=12)
letters_3 = st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=10)


class TestReduce:
    def test_adjacent_cancellation(self):
        assert reduce(A2, [1, -1, 2]) == w("b")

    def test_empty_is_identity(self):
        assert reduce(A2, []) == w("1")
        assert len(reduce(A2, [])) == 0

    def test_inner_cancellation(self):
        assert reduce(A2, [1, 2, -2, 1]) == w("aa")

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            reduce(A2, [3])
        with pytest.raises(ValueError):
            reduce(A2, [0])

    @given(letters_2)
    def test_idempotent(self, letters):
        once = reduce(A2, letters)
        assert reduce(A2, once.letters) == once

    @given(letters_2, letters_2)
    def test_concatenation_length_bounds(self, s, t):
        u, v = reduce(A2, s), reduce(A2, t)
        product = u * v
        assert abs(len(u) - len(v)) <= len(product) <= len(u) + len(v)


class TestCyclicReduce:
    def test_single_conjugation_layer(self):
        core, conj = cyclic_reduce(w("baB"))
        assert core.as_word() == w("a")
        assert conj == w("b")

    def test_already_cyclically_reduced(self):
        core, conj = cyclic_reduce(w("ab"))
        assert core == CyclicWord(A2, (1, 2))
        assert conj == w("1")

    def test_aba_inverse(self):
        core, conj = cyclic_reduce(w("abA"))
        assert core.as_word() == w("b")
        assert conj == w("a")

    @given(letters_2)
    def test_round_trip(self, letters):
        word = reduce(A2, letters)
        core, conj = cyclic_reduce(word)
        assert conj * core.as_word() * conj.inverse() == word

    @given(letters_2, letters_2)
    def test_conjugate_words_share_core(self, s, t):
        word = reduce(A2, s)
        g = reduce(A2, t)
        conjugated = g * word * g.inverse()
        assert cyclic_reduce(word)[0] == cyclic_reduce(conjugated)[0]


class TestConjugacyOracle:
    # for words of length <= 6 a conjugator of length <= 6 always suffices:
    # |conjugator| <= (|u| - |core|)/2 + (|v| - |core|)/2 + |core| - 1 <= 5

    @pytest.mark.parametrize("alphabet,word_len", [(A2, 4), (A3, 6)])
    def test_cores_detect_conjugacy(self, alphabet, word_len):
        import random

        rng = random.Random(0)
        words = all_reduced_words(alphabet, word_len)
        conjugators = all_reduced_words(alphabet, 6)
        pairs = [(rng.choice(words), rng.choice(words)) for _ in range(40)]
        # constructed positives exercise the conjugate branch
        for _ in range(20):
            u = rng.choice(words)
            g = rng.choice(conjugators[:200])
            pairs.append((u, g * u * g.inverse()))
        for u, v in pairs:
            brute = any(g * u * g.inverse() == v for g in conjugators)
            cores = cyclic_reduce(u)[0] == cyclic_reduce(v)[0]
            assert brute == cores, (word_str(u), word_str(v))


class TestApplyEndo:
    def test_substitution_then_cancellation(self):
        images = [w("ab"), w("b")]
        assert apply_endo(images, w("aB")) == w("a")

    def test_identity(self):
        images = [w("a"), w("b")]
        assert apply_endo(images, w("abAB")) == w("abAB")

    def test_substitution_no_cancellation(self):
        images = [w("ab"), w("a")]
        assert apply_endo(images, w("ba")) == w("aab")

    def test_image_count_mismatch(self):
        with pytest.raises(ValueError):
            apply_endo([w("a")], w("ab"))

    def test_alphabet_mismatch(self):
        with pytest.raises(ValueError):
            apply_endo([parse_word(A3, "a"), parse_word(A3, "b")], w("ab"))

    @given(letters_2, letters_2)
    def test_homomorphism(self, s, t):
        images = [w("ab"), w("bA")]
        u, v = reduce(A2, s), reduce(A2, t)
        assert apply_endo(images, u * v) == apply_endo(images, u) * apply_endo(
            images, v
        )


class TestCanonicalRotation:
    def test_rotation_invariance(self):
        assert CyclicWord(A2, (1, 2)) == CyclicWord(A2, (2, 1))

    def test_letter_order(self):
        # x_1 < x_1^-1 < x_2
        assert CyclicWord(A2, (2, 1)).letters[0] == 1
        assert CyclicWord(A2, (-1, 2)).letters == (-1, 2)

    def test_empty_cyclic_word(self):
        assert CyclicWord(A2, ()) == CyclicWord(A2, (1, -1))
        assert len(CyclicWord(A2, ())) == 0

    @given(letters_3)
    def test_hashable_conjugacy_keys(self, letters):
        word = reduce(A3, letters)
        core = cyclic_reduce(word)[0]
        rotated = CyclicWord(A3, core.letters[1:] + core.letters[:1])
        assert hash(core) == hash(rotated) and core == rotated


class TestTextFormat:
    def test_round_trip(self):
        for text in ["1", "a", "abAB", "zZ"[:2]]:
            assert word_str(parse_word(Alphabet(26), text)) in (text, "1")

    def test_empty_spelled_one(self):
        assert word_str(w("1")) == "1"

    def test_bad_character(self):
        with pytest.raises(ValueError):
            parse_word(A2, "a!b")

    def test_out_of_alphabet(self):
        with pytest.raises(ValueError):
            parse_word(A2, "abc")

    def test_immutability(self):
        word = w("ab")
        with pytest.raises(AttributeError):
            word.letters = ()
