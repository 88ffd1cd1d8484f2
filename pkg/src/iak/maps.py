"""Contractions, words, and iterated function systems.

A system is a finite ordered family of contractions on R^n, all of one
variant: similarities (ratio times an isometry plus a translation), affine
maps (largest singular value below one), or abstract bi-Lipschitz data
(upper and lower constants only, no point action). Words over the alphabet
{1..N} index compositions. Composite upper and lower Lipschitz constants
are exact for similarity words (products of ratios) and affine words
(singular values of the exact matrix product); for abstract words they are
products of the per-map constants and are only bounds, flagged as such.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

from .errors import BudgetExceeded, InvalidWord, NoPointAction, WrongVariant

Word = tuple[int, ...]
EMPTY_WORD: Word = ()

DEFAULT_WORD_BUDGET = 10 ** 6

# max-norm tolerance for Q^T Q = I on declared isometries
ORTHOGONALITY_TOL = 1e-12


def word_str(word: Word) -> str:
    """Render a word for CSV output: letters joined by '.', empty word -> ''."""
    return ".".join(str(i) for i in word)


def parse_word(text: str) -> Word:
    """Inverse of word_str."""
    text = text.strip()
    if not text:
        return EMPTY_WORD
    return tuple(int(part) for part in text.split("."))


def is_prefix(shorter: Word, longer: Word) -> bool:
    return len(shorter) <= len(longer) and longer[: len(shorter)] == shorter


def words_of_length(n_maps: int, k: int) -> Iterator[Word]:
    """All length-k words in lexicographic order (letters 1..n_maps)."""
    if k == 0:
        yield EMPTY_WORD
        return
    word = [1] * k
    while True:
        yield tuple(word)
        pos = k - 1
        while pos >= 0 and word[pos] == n_maps:
            word[pos] = 1
            pos -= 1
        if pos < 0:
            return
        word[pos] += 1


@dataclass(frozen=True)
class Similarity:
    """x -> ratio * Q x + t with Q an isometry and 0 < ratio < 1."""

    ratio: float
    isometry: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        q = np.array(self.isometry, dtype=float)
        t = np.array(self.translation, dtype=float).reshape(-1)
        if not 0.0 < self.ratio < 1.0:
            raise ValueError(f"similarity ratio must lie in (0, 1), got {self.ratio}")
        if q.ndim != 2 or q.shape[0] != q.shape[1] or q.shape[0] != t.size:
            raise ValueError("isometry must be square and match the translation length")
        defect = np.max(np.abs(q.T @ q - np.eye(q.shape[0])))
        if defect > ORTHOGONALITY_TOL:
            raise ValueError(
                f"isometry fails Q^T Q = I within {ORTHOGONALITY_TOL:g} (defect {defect:.3g})"
            )
        q.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "isometry", q)
        object.__setattr__(self, "translation", t)

    @property
    def ambient_dim(self) -> int:
        return self.translation.size

    @property
    def lip_plus(self) -> float:
        return self.ratio

    @property
    def lip_minus(self) -> float:
        return self.ratio

    @property
    def linear(self) -> np.ndarray:
        return self.ratio * self.isometry

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return self.ratio * points @ self.isometry.T + self.translation


@dataclass(frozen=True)
class Affine:
    """x -> A x + t with singular values of A inside (0, 1)."""

    linear: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        a = np.array(self.linear, dtype=float)
        t = np.array(self.translation, dtype=float).reshape(-1)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] != t.size:
            raise ValueError("linear part must be square and match the translation length")
        sigma = np.linalg.svd(a, compute_uv=False)
        if sigma[0] >= 1.0:
            raise ValueError(f"largest singular value must be below 1, got {sigma[0]}")
        if sigma[-1] <= 0.0:
            raise ValueError("linear part must be invertible (smallest singular value > 0)")
        a.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "linear", a)
        object.__setattr__(self, "translation", t)
        object.__setattr__(self, "_sigma_max", float(sigma[0]))
        object.__setattr__(self, "_sigma_min", float(sigma[-1]))

    @property
    def ambient_dim(self) -> int:
        return self.translation.size

    @property
    def lip_plus(self) -> float:
        return self._sigma_max

    @property
    def lip_minus(self) -> float:
        return self._sigma_min

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return points @ self.linear.T + self.translation


@dataclass(frozen=True)
class AbstractLipschitz:
    """Bi-Lipschitz contraction known only through its constants."""

    lip_plus: float
    lip_minus: float

    def __post_init__(self):
        if not 0.0 < self.lip_minus <= self.lip_plus < 1.0:
            raise ValueError(
                f"need 0 < lip_minus <= lip_plus < 1, got ({self.lip_minus}, {self.lip_plus})"
            )


ContractionMap = Union[Similarity, Affine, AbstractLipschitz]


def _variant_of(m: ContractionMap) -> str:
    if isinstance(m, Similarity):
        return "similarity"
    if isinstance(m, Affine):
        return "affine"
    if isinstance(m, AbstractLipschitz):
        return "abstract"
    raise WrongVariant(f"unknown map type {type(m).__name__}")


@dataclass(frozen=True)
class IFSystem:
    """Ordered family of contractions of one variant on a common R^n.

    The separation flags are caller assertions and are never verified;
    downstream results quote them as hypotheses. bounded_distortion_L, when
    given, asserts sup over words of lip_plus/lip_minus <= L.
    """

    maps: tuple[ContractionMap, ...]
    ambient_dim: int
    asserted_sosc: bool = False
    asserted_cosc: bool = False
    bounded_distortion_L: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if len(self.maps) < 1:
            raise ValueError("a system needs at least one map")
        variants = {_variant_of(m) for m in self.maps}
        if len(variants) != 1:
            raise WrongVariant(f"maps must share one variant, got {sorted(variants)}")
        if self.variant != "abstract":
            for i, m in enumerate(self.maps):
                if m.ambient_dim != self.ambient_dim:
                    raise ValueError(
                        f"map {i + 1} acts on R^{m.ambient_dim}, system declares R^{self.ambient_dim}"
                    )
        if self.ambient_dim < 1:
            raise ValueError("ambient dimension must be a positive integer")
        if self.bounded_distortion_L is not None and not self.bounded_distortion_L > 1.0:
            raise ValueError("bounded distortion constant must exceed 1")

    @property
    def variant(self) -> str:
        return _variant_of(self.maps[0])

    @property
    def n_maps(self) -> int:
        return len(self.maps)

    @property
    def has_point_action(self) -> bool:
        return self.variant != "abstract"

    @property
    def lip_plus_vector(self) -> np.ndarray:
        return np.array([m.lip_plus for m in self.maps])

    @property
    def lip_minus_vector(self) -> np.ndarray:
        return np.array([m.lip_minus for m in self.maps])

    def validate_word(self, word: Word) -> None:
        for letter in word:
            if not 1 <= letter <= self.n_maps:
                raise InvalidWord(
                    f"letter {letter} outside alphabet 1..{self.n_maps} in word {word}"
                )


@dataclass(frozen=True)
class ComposedMap:
    """A word together with its composite action and Lipschitz data.

    exact is False when lip_plus/lip_minus are only product bounds
    (abstract systems); linear/translation are None in that case.
    """

    word: Word
    lip_plus: float
    lip_minus: float
    linear: np.ndarray | None
    translation: np.ndarray | None
    exact: bool

    def __post_init__(self):
        if self.linear is not None:
            self.linear.setflags(write=False)
            self.translation.setflags(write=False)

    @property
    def has_action(self) -> bool:
        return self.linear is not None

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Evaluate on one point (shape (n,)) or a batch (shape (m, n))."""
        if self.linear is None:
            raise NoPointAction(
                f"word {self.word or '()'} belongs to an abstract system with no point action"
            )
        points = np.asarray(points, dtype=float)
        return points @ self.linear.T + self.translation

    def inverse_apply(self, points: np.ndarray) -> np.ndarray:
        """Pull points back through the composite (used for cylinder membership)."""
        if self.linear is None:
            raise NoPointAction("abstract maps cannot be inverted pointwise")
        points = np.asarray(points, dtype=float)
        return np.linalg.solve(self.linear, (points - self.translation).T).T


def compose(ifs: IFSystem, word: Word) -> ComposedMap:
    """Composite of the maps named by word, first letter applied last.

    The empty word gives the identity with lip_plus = lip_minus = 1.
    """
    ifs.validate_word(tuple(word))
    word = tuple(word)
    n = ifs.ambient_dim
    if ifs.variant == "abstract":
        lp = float(np.prod([ifs.maps[i - 1].lip_plus for i in word])) if word else 1.0
        lm = float(np.prod([ifs.maps[i - 1].lip_minus for i in word])) if word else 1.0
        return ComposedMap(word, lp, lm, None, None, exact=not word)
    linear = np.eye(n)
    translation = np.zeros(n)
    ratio = 1.0
    for letter in word:
        m = ifs.maps[letter - 1]
        a = m.linear if isinstance(m, Affine) else m.ratio * m.isometry
        # (A, t) o (B, s) = (A B, A s + t), folding letters left to right
        translation = translation + linear @ (m.translation)
        linear = linear @ a
        if isinstance(m, Similarity):
            ratio *= m.ratio
    if ifs.variant == "similarity":
        lp = lm = ratio
    else:
        sigma = np.linalg.svd(linear, compute_uv=False) if word else np.ones(n)
        lp, lm = float(sigma[0]), float(sigma[-1])
    return ComposedMap(word, float(lp), float(lm), linear, translation, exact=True)


def apply(m: ComposedMap | ContractionMap, points: np.ndarray) -> np.ndarray:
    """Evaluate a map or composite on points; abstract maps raise NoPointAction."""
    if isinstance(m, ComposedMap):
        return m.apply(points)
    if isinstance(m, AbstractLipschitz):
        raise NoPointAction("abstract maps carry no point action")
    return m(points)


def fixed_point(m: ComposedMap | Similarity | Affine) -> np.ndarray:
    """Unique fixed point of a contracting affine action, solving (I - A) x = t."""
    if isinstance(m, ComposedMap):
        if m.linear is None:
            raise NoPointAction("abstract maps carry no point action")
        a, t = m.linear, m.translation
    elif isinstance(m, AbstractLipschitz):
        raise NoPointAction("abstract maps carry no point action")
    else:
        a = m.linear if isinstance(m, Affine) else m.ratio * m.isometry
        t = m.translation
    n = t.size
    return np.linalg.solve(np.eye(n) - a, t)


def check_word_budget(n_maps: int, k: int, budget: int) -> None:
    if n_maps ** k > budget:
        raise BudgetExceeded(
            f"{n_maps}^{k} words exceed the word budget {budget}; raise the budget or lower k"
        )


def iterate_system(ifs: IFSystem, k: int, budget: int = DEFAULT_WORD_BUDGET) -> IFSystem:
    """The system of all N^k length-k composites, in lexicographic word order.

    Separation assertions and the distortion constant are inherited.
    """
    if k < 1:
        raise InvalidWord("iterate level k must be a positive integer")
    check_word_budget(ifs.n_maps, k, budget)
    new_maps = []
    for word in words_of_length(ifs.n_maps, k):
        comp = compose(ifs, word)
        if ifs.variant == "similarity":
            q = comp.linear / comp.lip_plus
            new_maps.append(Similarity(comp.lip_plus, q, comp.translation))
        elif ifs.variant == "affine":
            new_maps.append(Affine(comp.linear, comp.translation))
        else:
            new_maps.append(AbstractLipschitz(comp.lip_plus, comp.lip_minus))
    return IFSystem(
        tuple(new_maps),
        ifs.ambient_dim,
        asserted_sosc=ifs.asserted_sosc,
        asserted_cosc=ifs.asserted_cosc,
        bounded_distortion_L=ifs.bounded_distortion_L,
    )
