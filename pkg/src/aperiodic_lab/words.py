"""Freely reduced words and cyclic words over a fixed free-group basis.

Letters are nonzero integers: ``i`` stands for the i-th basis letter and
``-i`` for its inverse.  The text format uses ``a..z`` for the basis,
uppercase for inverses, and ``1`` for the empty word.
"""

from __future__ import annotations

from typing import Iterable, Sequence, Tuple


class Alphabet:
    """Basis x_1..x_N of a free group of rank N."""

    __slots__ = ("rank",)

    def __init__(self, rank: int):
        if rank < 1:
            raise ValueError(f"rank must be >= 1, got {rank}")
        self.rank = rank

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self.rank == other.rank

    def __hash__(self):
        return hash(("Alphabet", self.rank))

    def __repr__(self):
        return f"Alphabet({self.rank})"

    def check_letter(self, letter: int) -> None:
        if not isinstance(letter, int) or letter == 0 or abs(letter) > self.rank:
            raise ValueError(f"letter {letter!r} out of range for rank {self.rank}")

    def letters(self) -> range:
        return range(1, self.rank + 1)

    def signed_letters(self) -> Tuple[int, ...]:
        return tuple(s * i for i in self.letters() for s in (1, -1))


def _letter_key(letter: int) -> int:
    # order: x_1 < x_1^-1 < x_2 < x_2^-1 < ...
    return 2 * letter if letter > 0 else 2 * (-letter) + 1


def reduce_letters(letters: Iterable[int]) -> Tuple[int, ...]:
    """Freely reduce a letter sequence.

    >>> reduce_letters([1, -1, 2])
    (2,)
    >>> reduce_letters([])
    ()
    >>> reduce_letters([1, 2, -2, 1])
    (1, 1)
    """
    out: list[int] = []
    for letter in letters:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


class Word:
    """A freely reduced word.  Immutable; constructor reduces its input."""

    __slots__ = ("alphabet", "letters")

    def __init__(self, alphabet: Alphabet, letters: Iterable[int] = ()):
        letters = tuple(letters)
        for letter in letters:
            alphabet.check_letter(letter)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "letters", reduce_letters(letters))

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    def __len__(self):
        return len(self.letters)

    def __eq__(self, other):
        return (
            isinstance(other, Word)
            and self.alphabet == other.alphabet
            and self.letters == other.letters
        )

    def __hash__(self):
        return hash((self.alphabet, self.letters))

    def __repr__(self):
        return f"Word({self.alphabet.rank}, {word_str(self)!r})"

    def __mul__(self, other: "Word") -> "Word":
        if self.alphabet != other.alphabet:
            raise ValueError("alphabet mismatch")
        return Word(self.alphabet, self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(self.alphabet, tuple(-l for l in reversed(self.letters)))

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        result = Word(self.alphabet)
        for _ in range(n):
            result = result * self
        return result

    def is_identity(self) -> bool:
        return not self.letters


class CyclicWord:
    """A conjugacy class representative: cyclically reduced, stored in the
    lexicographically least rotation (letter order x_1 < x_1^-1 < x_2 < ...).
    """

    __slots__ = ("alphabet", "letters")

    def __init__(self, alphabet: Alphabet, letters: Iterable[int] = ()):
        word = Word(alphabet, letters)
        core, _ = _strip_conjugation(word)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "letters", _canonical_rotation(core.letters))

    def __setattr__(self, name, value):
        raise AttributeError("CyclicWord is immutable")

    def __len__(self):
        return len(self.letters)

    def __eq__(self, other):
        return (
            isinstance(other, CyclicWord)
            and self.alphabet == other.alphabet
            and self.letters == other.letters
        )

    def __hash__(self):
        return hash((self.alphabet, "cyc", self.letters))

    def __repr__(self):
        return f"CyclicWord({self.alphabet.rank}, {word_str(self.as_word())!r})"

    def as_word(self) -> Word:
        return Word(self.alphabet, self.letters)


def _canonical_rotation(letters: Tuple[int, ...]) -> Tuple[int, ...]:
    if not letters:
        return letters
    n = len(letters)
    key = lambda rot: [_letter_key(l) for l in rot]
    return min((letters[i:] + letters[:i] for i in range(n)), key=key)


def _strip_conjugation(word: Word) -> Tuple[Word, Word]:
    # word = conj * core * conj^-1 with core cyclically reduced
    letters = word.letters
    i, j = 0, len(letters)
    while j - i >= 2 and letters[i] == -letters[j - 1]:
        i += 1
        j -= 1
    return Word(word.alphabet, letters[i:j]), Word(word.alphabet, letters[:i])


def reduce(alphabet: Alphabet, raw: Sequence[int]) -> Word:
    """Return the unique freely reduced word equal to ``raw``.

    >>> a = Alphabet(2)
    >>> word_str(reduce(a, [1, -1, 2]))
    'b'
    >>> word_str(reduce(a, []))
    '1'
    """
    return Word(alphabet, raw)


def cyclic_reduce(word: Word) -> Tuple[CyclicWord, Word]:
    """Split ``word`` as conjugator * core * conjugator^-1.

    Returns the canonical cyclic word and the conjugator, so that two words
    are conjugate iff their cores compare equal.

    >>> a = Alphabet(2)
    >>> core, conj = cyclic_reduce(parse_word(a, "baB"))
    >>> word_str(core.as_word()), word_str(conj)
    ('a', 'b')
    """
    core, conj = _strip_conjugation(word)
    cyclic = CyclicWord(word.alphabet, core.letters)
    # account for the rotation chosen by canonicalisation
    if cyclic.letters != core.letters and core.letters:
        n = len(core.letters)
        for i in range(n):
            if core.letters[i:] + core.letters[:i] == cyclic.letters:
                conj = conj * Word(word.alphabet, core.letters[:i])
                break
    return cyclic, conj


def apply_endo(images: Sequence[Word], word: Word) -> Word:
    """Substitute each basis letter of ``word`` by its image and reduce.

    ``images[i-1]`` is the image of x_i; inverse letters get inverted images.
    """
    alphabet = word.alphabet
    if len(images) != alphabet.rank:
        raise ValueError(f"expected {alphabet.rank} images, got {len(images)}")
    for image in images:
        if image.alphabet != alphabet:
            raise ValueError("image alphabet mismatch")
    out: list[int] = []
    for letter in word.letters:
        image = images[abs(letter) - 1].letters
        if letter < 0:
            image = tuple(-l for l in reversed(image))
        for l in image:
            if out and out[-1] == -l:
                out.pop()
            else:
                out.append(l)
    return Word(alphabet, out)


_LOWER = "abcdefghijklmnopqrstuvwxyz"


def parse_word(alphabet: Alphabet, text: str) -> Word:
    """Parse the text format: a..z basis, A..Z inverses, '1' the empty word.

    >>> word_str(parse_word(Alphabet(2), "abA"))
    'abA'
    """
    text = text.strip()
    if text in ("", "1"):
        return Word(alphabet)
    letters = []
    for ch in text:
        if ch in _LOWER:
            letters.append(_LOWER.index(ch) + 1)
        elif ch.lower() in _LOWER:
            letters.append(-(_LOWER.index(ch.lower()) + 1))
        else:
            raise ValueError(f"bad character {ch!r} in word {text!r}")
        alphabet.check_letter(letters[-1])
    return Word(alphabet, letters)


def word_str(word: Word) -> str:
    """Format a word in the text format (empty word prints as '1')."""
    if word.alphabet.rank > len(_LOWER):
        raise ValueError("text format only covers ranks up to 26")
    if not word.letters:
        return "1"
    return "".join(
        _LOWER[l - 1] if l > 0 else _LOWER[-l - 1].upper() for l in word.letters
    )


def all_reduced_words(alphabet: Alphabet, max_len: int) -> list:
    """All freely reduced words of length <= max_len, in shortlex order."""
    words = [()]
    frontier = [()]
    for _ in range(max_len):
        new_frontier = []
        for prefix in frontier:
            for letter in sorted(alphabet.signed_letters(), key=_letter_key):
                if prefix and prefix[-1] == -letter:
                    continue
                new_frontier.append(prefix + (letter,))
        words.extend(new_frontier)
        frontier = new_frontier
    return [Word(alphabet, w) for w in words]
