"""Genus-g surface groups realised by the side pairings of a regular 4g-gon.

Words are tuples of signed letters: a_j is ``2j - 1``, b_j is ``2j`` and a negative letter is the inverse.
Canonical forms are the ShortLex minimal geodesics with the letter order a1 < A1 < b1 < B1 < a2 < ...
"""
import hashlib
import json
import logging
import math
import re
from collections import namedtuple, deque

import numpy as np

from .config import TOLERANCES
from .halfplane import (
    IDENTITY, MoebiusMap, canonicalize, compose, inverse, trace, disk_to_halfplane, isometry_from_segments,
)


__all__ = [
    'SurfaceGroup', 'GroupElement',
    'build_octagon_group', 'letters', 'relator_word', 'free_reduce', 'inverse_word', 'shortlex_key',
    'reduce', 'is_trivial', 'abelianize', 'word_matrix', 'element_from_word', 'enumerate_words',
    'format_word', 'parse_word', 'group_record', 'group_from_record', 'group_digest',
]

logger = logging.getLogger(__name__)

SurfaceGroup = namedtuple('SurfaceGroup', [
    'genus',
    'generators',       # a1, b1, ..., ag, bg
    'letter_matrices',  # letter -> map, generators and inverses
    'relator',
    'volume',
    'relator_cycles',   # first two letters -> cyclic rotation of the relator or its inverse
])

GroupElement = namedtuple('GroupElement', ['word', 'matrix', 'abelianization'])

# Size limit for the set of words connected by half-relator swaps.
CLOSURE_CAP = 4096

_LETTER_PATTERN = re.compile(r'([abAB])(\d+)')


def letters(genus):
    """All 4g letters in ShortLex order."""
    return tuple(sign * k for k in range(1, 2 * genus + 1) for sign in (1, -1))


def relator_word(genus):
    """The product of commutators [a1, b1] ... [ag, bg]."""
    word = []
    for j in range(1, genus + 1):
        word += [2 * j - 1, 2 * j, -(2 * j - 1), -2 * j]
    return tuple(word)


def free_reduce(word):
    stack = []
    for letter in word:
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


def inverse_word(word):
    return tuple(-letter for letter in reversed(word))


def _letter_key(letter):
    return 2 * (abs(letter) - 1) + (0 if letter > 0 else 1)


def shortlex_key(word):
    return len(word), tuple(_letter_key(letter) for letter in word)


def format_word(word, sep=' '):
    """Text form of a word, e.g. ``a1 B1 b2``; the empty word is ``e``."""
    if not word:
        return 'e'
    names = []
    for letter in word:
        k = abs(letter)
        name = ('a' if k % 2 else 'b') + str((k + 1) // 2)
        names.append(name if letter > 0 else name.upper())
    return sep.join(names)


def parse_word(text):
    """Inverse of `format_word`, separators are optional."""
    text = text.strip()
    if text in ('', 'e'):
        return ()
    word = []
    position = 0
    for match in _LETTER_PATTERN.finditer(text):
        if text[position:match.start()].strip():
            raise ValueError('Unknown letters "%s" in word "%s"' % (text[position:match.start()], text))
        name, index = match.group(1), int(match.group(2))
        if index < 1:
            raise ValueError('Generator index must be positive in "%s"' % text)
        letter = 2 * index - (1 if name.lower() == 'a' else 0)
        word.append(letter if name.islower() else -letter)
        position = match.end()
    if text[position:].strip():
        raise ValueError('Unknown letters "%s" in word "%s"' % (text[position:], text))
    return tuple(word)


def _relator_cycles(relator):
    cycles = {}
    for base in (relator, inverse_word(relator)):
        for shift in range(len(base)):
            cycle = base[shift:] + base[:shift]
            cycles[cycle[:2]] = cycle
    if len(cycles) != 2 * len(relator):
        raise ValueError('Relator has pieces longer than one letter')
    return cycles


def _assemble(genus, generators):
    letter_matrices = {}
    for k, generator in enumerate(generators, start=1):
        letter_matrices[k] = canonicalize(generator)
        letter_matrices[-k] = inverse(generator)
    relator = relator_word(genus)
    group = SurfaceGroup(
        genus=genus,
        generators=tuple(letter_matrices[k] for k in range(1, 2 * genus + 1)),
        letter_matrices=letter_matrices,
        relator=relator,
        volume=4.0 * math.pi * (genus - 1),
        relator_cycles=_relator_cycles(relator),
    )
    product = word_matrix(group, relator)
    defect = max(abs(u - v) for u, v in zip(product, IDENTITY))
    if defect > TOLERANCES.relator:
        raise ValueError('Relator product differs from the identity by %.3g' % defect)
    for k, generator in enumerate(group.generators, start=1):
        if abs(trace(generator)) <= 2.0 + TOLERANCES.hyperbolic_trace:
            raise ValueError('Generator %s is not hyperbolic, trace %.17g' % (format_word((k,)), trace(generator)))
    return group


def build_octagon_group(genus):
    """Side pairings of the regular 4g-gon centred at i with vertex angles pi / 2g.

    Vertices v_0, ..., v_{4g-1} run counterclockwise. For block j the generator a_j sends the
    side (v_{4j+2}, v_{4j+3}) onto (v_{4j+1}, v_{4j}) and b_j sends (v_{4j+2}, v_{4j+1}) onto
    (v_{4j+3}, v_{4j+4}), so the vertex cycle closes up along [a1, b1] ... [ag, bg].

    :param genus: Genus, at least 2.
    :return: The validated group.
    """
    if genus < 2:
        raise ValueError('Genus must be at least 2 for a hyperbolic surface, got %d' % genus)
    sides = 4 * genus
    circumradius = math.acosh(1.0 / math.tan(math.pi / sides) ** 2)
    rho = math.tanh(circumradius / 2.0)
    vertices = [disk_to_halfplane(rho * np.exp(2j * np.pi * k / sides)) for k in range(sides)]

    def vertex(k):
        return vertices[k % sides]

    generators = []
    for j in range(genus):
        base = 4 * j
        generators.append(isometry_from_segments(
            vertex(base + 2), vertex(base + 3), vertex(base + 1), vertex(base)))
        generators.append(isometry_from_segments(
            vertex(base + 2), vertex(base + 1), vertex(base + 3), vertex(base + 4)))
    return _assemble(genus, generators)


def _relator_matches(group, word):
    # Maximal subwords of length >= 2g that follow a cyclic rotation of the relator or its inverse.
    half = 2 * group.genus
    for start in range(len(word) - half + 1):
        cycle = group.relator_cycles.get(word[start:start + 2])
        if cycle is None:
            continue
        length = 2
        limit = min(len(cycle), len(word) - start)
        while length < limit and word[start + length] == cycle[length]:
            length += 1
        if length >= half:
            yield start, length, cycle


def _dehn_shorten(group, word):
    half = 2 * group.genus
    word = free_reduce(word)
    while True:
        for start, length, cycle in _relator_matches(group, word):
            if length > half:
                word = free_reduce(word[:start] + inverse_word(cycle[length:]) + word[start + length:])
                break
        else:
            return word


def _half_swaps(group, word):
    half = 2 * group.genus
    for start, length, cycle in _relator_matches(group, word):
        if length == half:
            yield word[:start] + inverse_word(cycle[half:]) + word[start + half:]


def reduce(group, word):
    """Canonical form of a word.

    Dehn replacements remove every subword longer than half a relator cycle. Words that are
    equal in the group and have the same length are connected by swapping exact half cycles,
    so the swap closure either exposes a further shortening or contains the ShortLex minimum.

    :param group: The surface group.
    :param word: Tuple of signed letters.
    :return: The canonical word.
    """
    rank = 2 * group.genus
    for letter in word:
        if letter == 0 or abs(letter) > rank:
            raise ValueError('Letter %d is not a generator of the genus %d group' % (letter, group.genus))
    word = _dehn_shorten(group, tuple(word))
    while True:
        swaps = list(_half_swaps(group, word))
        if not swaps:
            return word
        seen = {word}
        queue = deque([word])
        shorter = None
        while queue and shorter is None:
            for candidate in _half_swaps(group, queue.popleft()):
                shortened = _dehn_shorten(group, candidate)
                if len(shortened) < len(candidate):
                    shorter = shortened
                    break
                if candidate not in seen:
                    seen.add(candidate)
                    queue.append(candidate)
            if len(seen) > CLOSURE_CAP:
                logger.warning('Half-relator closure of %s exceeded %d words', format_word(word), CLOSURE_CAP)
                break
        if shorter is None:
            return min(seen, key=shortlex_key)
        word = shorter


def is_trivial(group, word):
    """Word problem by Dehn's algorithm."""
    return not _dehn_shorten(group, tuple(word))


def abelianize(group, word):
    """Signed letter counts, the image in Z^2g."""
    counts = [0] * (2 * group.genus)
    for letter in word:
        counts[abs(letter) - 1] += 1 if letter > 0 else -1
    return tuple(counts)


def word_matrix(group, word):
    matrix = IDENTITY
    for letter in word:
        matrix = compose(matrix, group.letter_matrices[letter])
    return matrix


def element_from_word(group, word):
    word = reduce(group, word)
    return GroupElement(word=word, matrix=word_matrix(group, word), abelianization=abelianize(group, word))


def enumerate_words(group, max_length):
    """All canonical words up to a length, in ShortLex order.

    Prefixes of canonical words are canonical, so extending every canonical word by one letter
    and keeping the canonical results visits each element once.
    """
    if max_length < 0:
        raise ValueError('Maximum length must be non-negative, got %d' % max_length)
    alphabet = letters(group.genus)
    words, shell = [()], [()]
    for _ in range(max_length):
        shell = [
            child
            for parent in shell
            for child in (parent + (letter,) for letter in alphabet)
            if reduce(group, child) == child
        ]
        words += shell
    return words


def group_record(group):
    """Structured record of a group: genus, relator and the 4g letter matrices row-major."""
    return {
        'genus': group.genus,
        'relator': format_word(group.relator),
        'volume': group.volume,
        'letters': [
            {'letter': format_word((letter,)), 'matrix': [float(v) for v in group.letter_matrices[letter]]}
            for letter in letters(group.genus)
        ],
    }


def group_from_record(record):
    genus = int(record['genus'])
    if parse_word(record['relator']) != relator_word(genus):
        raise ValueError('Unsupported relator "%s"' % record['relator'])
    matrices = {}
    for entry in record['letters']:
        (letter,) = parse_word(entry['letter'])
        matrices[letter] = MoebiusMap(*entry['matrix'])
    missing = [format_word((k,)) for k in range(1, 2 * genus + 1) if k not in matrices]
    if missing:
        raise ValueError('Record lacks generators %s' % ', '.join(missing))
    return _assemble(genus, [matrices[k] for k in range(1, 2 * genus + 1)])


def group_digest(group):
    text = json.dumps(group_record(group), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(text.encode('utf-8')).hexdigest()
