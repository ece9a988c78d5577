"""Matrix-coefficient polynomials in non-commuting symmetric variables.

A polynomial in ``g`` variables is a finite sum ``sum_w c_w * w`` where each
word ``w`` is a finite product of the variables ``x_1..x_g`` and each
coefficient ``c_w`` is a real ``rows x cols`` matrix.  The involution reverses
words and transposes coefficients; a square polynomial fixed by it is called
symmetric.

Words are tuples of 1-based variable indices; the empty tuple is the empty
word (the multiplicative unit).  The canonical word order used everywhere for
coefficient-space coordinates is graded lexicographic: shorter words first,
ties broken by the index sequence.
"""

from __future__ import annotations

import itertools
import json
from typing import Iterable, Iterator, Mapping

import numpy as np

Word = tuple[int, ...]


class ShapeMismatchError(ValueError):
    """Operands have incompatible variable counts or coefficient shapes."""


def word_involution(w: Word) -> Word:
    """Reverse a word: (x_j x_k)^T = x_k x_j."""
    return tuple(reversed(w))


def graded_lex_key(w: Word) -> tuple[int, Word]:
    return (len(w), w)


def words_up_to(g: int, d: int) -> Iterator[Word]:
    """All words in g letters of length <= d, in graded-lex order."""
    for length in range(d + 1):
        for w in itertools.product(range(1, g + 1), repeat=length):
            yield w


def word_count(g: int, d: int) -> int:
    """Number of words of length <= d, i.e. sum_{j=0}^{d} g^j."""
    if d < 0:
        return 0
    if g == 1:
        return d + 1
    return (g ** (d + 1) - 1) // (g - 1)


class NcPolynomial:
    """A free polynomial with real matrix coefficients.

    Instances are immutable in spirit: operations return new polynomials and
    never mutate their arguments, so sharing across threads is safe.
    """

    __slots__ = ("g", "rows", "cols", "terms")

    def __init__(self, g: int, rows: int, cols: int,
                 terms: Mapping[Word, np.ndarray] | None = None):
        if g < 0 or rows < 0 or cols < 0:
            raise ValueError("g, rows, cols must be non-negative")
        self.g = g
        self.rows = rows
        self.cols = cols
        clean: dict[Word, np.ndarray] = {}
        for w, c in (terms or {}).items():
            w = tuple(int(j) for j in w)
            if any(j < 1 or j > g for j in w):
                raise ValueError(f"word {w} has letters outside 1..{g}")
            c = np.asarray(c, dtype=float)
            if c.shape != (rows, cols):
                raise ShapeMismatchError(
                    f"coefficient of {w} has shape {c.shape}, expected {(rows, cols)}")
            if np.any(c != 0.0):
                clean[w] = c.copy()
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(g: int, rows: int = 1, cols: int = 1) -> "NcPolynomial":
        return NcPolynomial(g, rows, cols, {})

    @staticmethod
    def constant(c, g: int) -> "NcPolynomial":
        c = np.atleast_2d(np.asarray(c, dtype=float))
        return NcPolynomial(g, c.shape[0], c.shape[1], {(): c})

    @staticmethod
    def variable(j: int, g: int) -> "NcPolynomial":
        """The scalar polynomial x_j."""
        if not 1 <= j <= g:
            raise ValueError(f"variable index {j} outside 1..{g}")
        return NcPolynomial(g, 1, 1, {(j,): np.array([[1.0]])})

    @staticmethod
    def monomial(w: Word, coeff, g: int) -> "NcPolynomial":
        c = np.atleast_2d(np.asarray(coeff, dtype=float))
        return NcPolynomial(g, c.shape[0], c.shape[1], {tuple(w): c})

    # -- structure ---------------------------------------------------------

    def degree(self) -> int:
        """Max word length of a stored term; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(len(w) for w in self.terms)

    def coeff(self, w: Word) -> np.ndarray:
        return self.terms.get(tuple(w), np.zeros((self.rows, self.cols)))

    def sorted_words(self) -> list[Word]:
        return sorted(self.terms, key=graded_lex_key)

    def transpose(self) -> "NcPolynomial":
        """The involution: w -> reversed w, coefficient -> its transpose."""
        return NcPolynomial(
            self.g, self.cols, self.rows,
            {word_involution(w): c.T for w, c in self.terms.items()})

    def is_symmetric(self, tol: float = 0.0) -> bool:
        if self.rows != self.cols:
            return False
        pt = self.transpose()
        words = set(self.terms) | set(pt.terms)
        for w in words:
            a, b = self.coeff(w), pt.coeff(w)
            if np.max(np.abs(a - b)) > tol * (1.0 + np.max(np.abs(a)) + np.max(np.abs(b))):
                return False
        return True

    def __eq__(self, other) -> bool:
        if not isinstance(other, NcPolynomial):
            return NotImplemented
        return (self.g == other.g and self.rows == other.rows
                and self.cols == other.cols
                and set(self.terms) == set(other.terms)
                and all(np.array_equal(self.terms[w], other.terms[w]) for w in self.terms))

    def allclose(self, other: "NcPolynomial", tol: float = 1e-12) -> bool:
        """Entrywise |a-b| <= tol*(1+|a|+|b|) across all words of either."""
        if (self.g, self.rows, self.cols) != (other.g, other.rows, other.cols):
            return False
        for w in set(self.terms) | set(other.terms):
            a, b = self.coeff(w), other.coeff(w)
            if np.any(np.abs(a - b) > tol * (1.0 + np.abs(a) + np.abs(b))):
                return False
        return True

    # -- arithmetic --------------------------------------------------------

    def _require_same_g(self, other: "NcPolynomial"):
        if self.g != other.g:
            raise ShapeMismatchError(f"variable counts differ: {self.g} vs {other.g}")

    def __add__(self, other: "NcPolynomial") -> "NcPolynomial":
        self._require_same_g(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeMismatchError(
                f"coefficient shapes differ: {(self.rows, self.cols)} vs {(other.rows, other.cols)}")
        out: dict[Word, np.ndarray] = {w: c.copy() for w, c in self.terms.items()}
        for w, c in other.terms.items():
            out[w] = out[w] + c if w in out else c
        return NcPolynomial(self.g, self.rows, self.cols, out)

    def __neg__(self) -> "NcPolynomial":
        return NcPolynomial(self.g, self.rows, self.cols,
                            {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "NcPolynomial") -> "NcPolynomial":
        return self + (-other)

    def scale(self, s: float) -> "NcPolynomial":
        return NcPolynomial(self.g, self.rows, self.cols,
                            {w: s * c for w, c in self.terms.items()})

    def __mul__(self, other: "NcPolynomial") -> "NcPolynomial":
        """Ring product: words concatenate, coefficients matrix-multiply."""
        self._require_same_g(other)
        if self.cols != other.rows:
            raise ShapeMismatchError(
                f"inner dimensions differ: {self.cols} vs {other.rows}")
        out: dict[Word, np.ndarray] = {}
        for u, a in self.terms.items():
            for v, b in other.terms.items():
                w = u + v
                c = a @ b
                out[w] = out[w] + c if w in out else c
        return NcPolynomial(self.g, self.rows, other.cols, out)

    def direct_sum(self, other: "NcPolynomial") -> "NcPolynomial":
        """Block-diagonal sum of the coefficient matrices, word by word."""
        self._require_same_g(other)
        rows = self.rows + other.rows
        cols = self.cols + other.cols
        out: dict[Word, np.ndarray] = {}
        for w in set(self.terms) | set(other.terms):
            c = np.zeros((rows, cols))
            c[:self.rows, :self.cols] = self.coeff(w)
            c[self.rows:, self.cols:] = other.coeff(w)
            out[w] = c
        return NcPolynomial(self.g, rows, cols, out)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "g": self.g,
            "rows": self.rows,
            "cols": self.cols,
            "terms": [{"word": list(w), "coeff": self.terms[w].tolist()}
                      for w in self.sorted_words()],
        }

    @staticmethod
    def from_dict(d: dict) -> "NcPolynomial":
        g, rows, cols = int(d["g"]), int(d["rows"]), int(d["cols"])
        terms: dict[Word, np.ndarray] = {}
        for t in d.get("terms", []):
            w = tuple(int(j) for j in t["word"])
            raw = t["coeff"]
            if len(raw) != rows or any(len(r) != cols for r in raw):
                raise ValueError(f"ragged or mis-sized coefficient for word {w}")
            c = np.array(raw, dtype=float)
            if w in terms:
                raise ValueError(f"duplicate word {w}")
            terms[w] = c
        return NcPolynomial(g, rows, cols, terms)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @staticmethod
    def from_json(s: str) -> "NcPolynomial":
        return NcPolynomial.from_dict(json.loads(s))

    def __repr__(self) -> str:
        names = ["1" if not w else "*".join(f"x{j}" for j in w)
                 for w in self.sorted_words()]
        return (f"NcPolynomial(g={self.g}, shape=({self.rows},{self.cols}), "
                f"words=[{', '.join(names)}])")


def scalar_poly(coeffs: Mapping[Word, float] | Iterable[tuple[Word, float]],
                g: int) -> NcPolynomial:
    """Scalar (1x1-coefficient) polynomial from {word: value}."""
    items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
    return NcPolynomial(g, 1, 1,
                        {tuple(w): np.array([[float(c)]]) for w, c in items})
