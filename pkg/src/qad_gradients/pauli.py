"""Pauli-word algebra and decomposition of Hermitian operators into Pauli sums.

Words are stored as two bitmasks (X part, Z part) aligned with the big-endian
basis index: qubit 0 is the most significant bit and the leftmost label letter.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from .config import get_settings
from .exceptions import PauliError


logger = logging.getLogger(__name__)

LETTERS = "IXYZ"

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_LETTER = {bits: letter for letter, bits in _LETTER_BITS.items()}

PHASES = (1, 1j, -1, -1j)


def _popcount(value: int) -> int:
    return bin(value).count("1")


def _bit_parity(indices: np.ndarray, mask: int) -> np.ndarray:
    """Parity of popcount(indices & mask), elementwise."""
    masked = indices & mask
    parity = np.zeros_like(indices)
    while mask:
        parity ^= masked & 1
        masked = masked >> 1
        mask >>= 1
    return parity


@lru_cache(maxsize=4096)
def pauli_action(num_qubits: int, x: int, z: int) -> Tuple[np.ndarray, np.ndarray]:
    """Index permutation and phases of a Pauli word on basis states.

    P|b> = phase[b] |b ^ x>, with phase[b] = i^{#Y} (-1)^{popcount(b & z)}.

    Returns:
        Tuple of (target indices, phases), read-only arrays of length 2^N
    """
    indices = np.arange(1 << num_qubits, dtype=np.int64)
    signs = 1 - 2 * _bit_parity(indices, z)
    phases = PHASES[_popcount(x & z) % 4] * signs.astype(complex)
    targets = indices ^ x
    targets.setflags(write=False)
    phases.setflags(write=False)
    return targets, phases


@dataclass(frozen=True)
class PauliWord:
    """Tensor product of single-qubit Paulis over `num_qubits` qubits."""

    num_qubits: int
    x: int = 0
    z: int = 0

    def __post_init__(self) -> None:
        if self.num_qubits < 0:
            raise PauliError(f"Invalid qubit count: {self.num_qubits}")
        limit = 1 << self.num_qubits
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise PauliError(f"Bitmasks out of range for {self.num_qubits} qubits")

    @classmethod
    def from_label(cls, label: str) -> "PauliWord":
        """Parse a label such as "ZZIX" (qubit 0 leftmost)."""
        x = z = 0
        for letter in label.upper():
            if letter not in _LETTER_BITS:
                raise PauliError(f"Invalid Pauli letter '{letter}' in '{label}'")
            bx, bz = _LETTER_BITS[letter]
            x = (x << 1) | bx
            z = (z << 1) | bz
        return cls(len(label), x, z)

    @classmethod
    def identity(cls, num_qubits: int) -> "PauliWord":
        return cls(num_qubits, 0, 0)

    @classmethod
    def single(cls, num_qubits: int, qubit: int, letter: str) -> "PauliWord":
        """Word with `letter` on `qubit` and identity elsewhere."""
        if not 0 <= qubit < num_qubits:
            raise PauliError(f"Qubit {qubit} out of range for {num_qubits} qubits")
        bx, bz = _LETTER_BITS[letter.upper()]
        shift = num_qubits - 1 - qubit
        return cls(num_qubits, bx << shift, bz << shift)

    def letter(self, qubit: int) -> str:
        shift = self.num_qubits - 1 - qubit
        return _BITS_LETTER[((self.x >> shift) & 1, (self.z >> shift) & 1)]

    @property
    def label(self) -> str:
        return "".join(self.letter(q) for q in range(self.num_qubits))

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    @property
    def support(self) -> List[int]:
        return [q for q in range(self.num_qubits) if self.letter(q) != "I"]

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def y_count(self) -> int:
        return _popcount(self.x & self.z)

    def to_matrix(self) -> np.ndarray:
        """Dense 2^N x 2^N matrix."""
        targets, phases = pauli_action(self.num_qubits, self.x, self.z)
        dim = 1 << self.num_qubits
        matrix = np.zeros((dim, dim), dtype=complex)
        matrix[targets, np.arange(dim)] = phases
        return matrix

    def extend(self, letters: str) -> "PauliWord":
        """Append qubits carrying `letters` after the existing ones."""
        tail = PauliWord.from_label(letters)
        shift = tail.num_qubits
        return PauliWord(
            self.num_qubits + shift, (self.x << shift) | tail.x, (self.z << shift) | tail.z
        )

    def embed(self, positions: Sequence[int], width: int) -> "PauliWord":
        """Place qubit q of this word on qubit positions[q] of a `width`-qubit word."""
        if len(positions) != self.num_qubits:
            raise PauliError(
                f"Need {self.num_qubits} positions, got {len(positions)}"
            )
        result = PauliWord.identity(width)
        for q, target in enumerate(positions):
            letter = self.letter(q)
            if letter != "I":
                _, result = multiply(result, PauliWord.single(width, target, letter))
        return result

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"PauliWord('{self.label}')"


def _check_widths(a: PauliWord, b: PauliWord) -> None:
    if a.num_qubits != b.num_qubits:
        raise PauliError(
            f"Pauli length mismatch: {a.num_qubits} vs {b.num_qubits} qubits"
        )


def multiply(a: PauliWord, b: PauliWord) -> Tuple[complex, PauliWord]:
    """Product of two words as (phase, word) with phase in {1, i, -1, -i}."""
    _check_widths(a, b)
    result = PauliWord(a.num_qubits, a.x ^ b.x, a.z ^ b.z)
    exponent = a.y_count + b.y_count - result.y_count + 2 * _popcount(a.z & b.x)
    return PHASES[exponent % 4], result


def commutes(a: PauliWord, b: PauliWord) -> bool:
    """True iff the words commute (even symplectic product)."""
    _check_widths(a, b)
    return _popcount((a.x & b.z) ^ (a.z & b.x)) % 2 == 0


def qubitwise_commutes(a: PauliWord, b: PauliWord) -> bool:
    """True iff on every qubit the letters are equal or one of them is I."""
    _check_widths(a, b)
    overlap = (a.x | a.z) & (b.x | b.z)
    return ((a.x ^ b.x) | (a.z ^ b.z)) & overlap == 0


TermLike = Tuple[float, Union[str, PauliWord]]


class PauliSum:
    """Real-weighted sum of Pauli words.

    Duplicate words are merged and near-zero coefficients dropped on
    construction; insertion order of first occurrence is kept.
    """

    def __init__(self, terms: Iterable[TermLike] = (), num_qubits: Optional[int] = None):
        tolerance = get_settings().dedup_tolerance
        merged: Dict[PauliWord, float] = {}
        for coeff, word in terms:
            if isinstance(word, str):
                word = PauliWord.from_label(word)
            if num_qubits is None:
                num_qubits = word.num_qubits
            elif word.num_qubits != num_qubits:
                raise PauliError(
                    f"Term '{word.label}' has {word.num_qubits} qubits, expected {num_qubits}"
                )
            value = complex(coeff)
            if abs(value.imag) > tolerance:
                raise PauliError(f"Coefficient of '{word.label}' is not real: {coeff}")
            if not np.isfinite(value.real):
                raise PauliError(f"Coefficient of '{word.label}' is not finite: {coeff}")
            merged[word] = merged.get(word, 0.0) + value.real

        if num_qubits is None:
            raise PauliError("Cannot infer qubit count of an empty PauliSum")
        self.num_qubits = num_qubits
        self._terms: Tuple[Tuple[float, PauliWord], ...] = tuple(
            (c, w) for w, c in merged.items() if abs(c) >= tolerance
        )
        self._commuting: Optional[bool] = None

    @classmethod
    def from_terms(cls, terms: Sequence[Sequence], num_qubits: Optional[int] = None) -> "PauliSum":
        """Build from the JSON form [[coeff, "label"], ...]."""
        try:
            pairs = [(float(coeff), str(label)) for coeff, label in terms]
        except (TypeError, ValueError) as e:
            raise PauliError(f"Malformed Pauli term list: {e}") from e
        return cls(pairs, num_qubits)

    @classmethod
    def identity(cls, num_qubits: int, coeff: float = 1.0) -> "PauliSum":
        return cls([(coeff, PauliWord.identity(num_qubits))], num_qubits)

    @classmethod
    def zero(cls, num_qubits: int) -> "PauliSum":
        return cls([], num_qubits)

    @property
    def terms(self) -> Tuple[Tuple[float, PauliWord], ...]:
        return self._terms

    @property
    def coefficients(self) -> List[float]:
        return [c for c, _ in self._terms]

    @property
    def words(self) -> List[PauliWord]:
        return [w for _, w in self._terms]

    @property
    def term_count(self) -> int:
        """Number of non-identity terms."""
        return sum(1 for _, w in self._terms if not w.is_identity)

    @property
    def identity_coefficient(self) -> float:
        return sum(c for c, w in self._terms if w.is_identity)

    def non_identity(self) -> "PauliSum":
        return PauliSum([(c, w) for c, w in self._terms if not w.is_identity], self.num_qubits)

    def to_terms(self) -> List[List]:
        return [[c, w.label] for c, w in self._terms]

    def is_commuting(self) -> bool:
        if self._commuting is not None:
            return self._commuting
        words = self.words
        self._commuting = all(
            commutes(words[a], words[b])
            for a in range(len(words))
            for b in range(a + 1, len(words))
        )
        return self._commuting

    def extend(self, letters: str) -> "PauliSum":
        return PauliSum(
            [(c, w.extend(letters)) for c, w in self._terms], self.num_qubits + len(letters)
        )

    def embed(self, positions: Sequence[int], width: int) -> "PauliSum":
        return PauliSum([(c, w.embed(positions, width)) for c, w in self._terms], width)

    def to_matrix(self) -> np.ndarray:
        """Dense matrix sum of coefficient times word matrix."""
        dim = 1 << self.num_qubits
        matrix = np.zeros((dim, dim), dtype=complex)
        columns = np.arange(dim)
        for coeff, word in self._terms:
            targets, phases = pauli_action(word.num_qubits, word.x, word.z)
            matrix[targets, columns] += coeff * phases
        return matrix

    def eigen_spectrum(self) -> List[float]:
        """Sorted distinct eigenvalues, merged when closer than the tolerance."""
        if self.num_qubits > get_settings().max_decompose_qubits:
            raise PauliError(f"Spectrum of {self.num_qubits}-qubit operator exceeds the cap")
        tolerance = get_settings().eigenvalue_tolerance
        values = scipy.linalg.eigvalsh(self.to_matrix())
        distinct: List[float] = []
        for value in np.sort(values):
            if not distinct or value - distinct[-1] > tolerance:
                distinct.append(float(value))
        return distinct

    def approx_equal(self, other: "PauliSum", tolerance: float = 1e-10) -> bool:
        if self.num_qubits != other.num_qubits:
            return False
        mine = dict((w, c) for c, w in self._terms)
        theirs = dict((w, c) for c, w in other._terms)
        return all(
            abs(mine.get(w, 0.0) - theirs.get(w, 0.0)) <= tolerance
            for w in set(mine) | set(theirs)
        )

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if self.num_qubits != other.num_qubits:
            raise PauliError("Cannot add PauliSums of different widths")
        return PauliSum(self._terms + other._terms, self.num_qubits)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __mul__(self, scalar: float) -> "PauliSum":
        return PauliSum([(scalar * c, w) for c, w in self._terms], self.num_qubits)

    __rmul__ = __mul__

    def __neg__(self) -> "PauliSum":
        return self * -1.0

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Tuple[float, PauliWord]]:
        return iter(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.num_qubits == other.num_qubits and dict(
            (w, c) for c, w in self._terms
        ) == dict((w, c) for c, w in other._terms)

    def __hash__(self) -> int:
        return hash((self.num_qubits, frozenset((w, c) for c, w in self._terms)))

    def __repr__(self) -> str:
        body = " + ".join(f"{c:g}*{w.label}" for c, w in self._terms) or "0"
        return f"PauliSum({body})"


def _walsh_hadamard(vector: np.ndarray, num_qubits: int) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform over all qubit axes."""
    tensor = vector.reshape([2] * num_qubits) if num_qubits else vector.copy()
    for axis in range(num_qubits):
        low = np.take(tensor, 0, axis=axis)
        high = np.take(tensor, 1, axis=axis)
        tensor = np.stack([low + high, low - high], axis=axis)
    return tensor.reshape(-1)


def decompose(matrix: np.ndarray) -> PauliSum:
    """Decompose a Hermitian matrix into a PauliSum with Tr(P h)/2^N coefficients.

    Args:
        matrix: Square Hermitian matrix of dimension 2^N

    Returns:
        PauliSum sorted by label

    Raises:
        PauliError: If the matrix is not square, not 2^N-dimensional or not Hermitian
    """
    settings = get_settings()
    h = np.asarray(matrix, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise PauliError(f"Expected a square matrix, got shape {h.shape}")
    dim = h.shape[0]
    num_qubits = dim.bit_length() - 1
    if dim < 1 or (1 << num_qubits) != dim:
        raise PauliError(f"Dimension {dim} is not a power of two")
    if num_qubits > settings.max_decompose_qubits:
        raise PauliError(f"Decomposition limited to {settings.max_decompose_qubits} qubits")
    if np.max(np.abs(h - h.conj().T), initial=0.0) > settings.hermitian_tolerance:
        raise PauliError("Matrix is not Hermitian")

    rows = np.arange(dim)
    terms: List[Tuple[float, PauliWord]] = []
    for x in range(dim):
        transformed = _walsh_hadamard(h[rows, rows ^ x], num_qubits)
        for z in np.flatnonzero(np.abs(transformed) > 0):
            value = PHASES[_popcount(x & int(z)) % 4] * transformed[z] / dim
            terms.append((float(value.real), PauliWord(num_qubits, x, int(z))))

    terms.sort(key=lambda term: term[1].label)
    result = PauliSum(terms, num_qubits)
    logger.debug(f"Decomposed {num_qubits}-qubit operator into {len(result)} terms")
    return result


def to_matrix(operator: PauliSum) -> np.ndarray:
    return operator.to_matrix()


def eigen_spectrum(operator: PauliSum) -> List[float]:
    return operator.eigen_spectrum()


def expm_hermitian(operator: PauliSum, angle: float) -> np.ndarray:
    """Dense exp(-i * angle * operator / 2)."""
    return scipy.linalg.expm(-0.5j * angle * operator.to_matrix())
