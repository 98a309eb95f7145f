"""Synthetic texts with known rank-frequency behaviour.

Randomness comes from numpy's PCG64 bit generator seeded with the given
integer seed (``numpy.random.Generator(PCG64(seed))``); numpy guarantees
stream stability of PCG64 across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .ranking import RankedDistribution
from .text_ingest import TokenStream

# lowercase letters that survive case folding unchanged
ALPHABET = "abcdefghijklmnopqrstuvwxyz" + "àáâãäåæçèéêëìíîïðñòóôõöøùúûüýþ"


def make_rng(seed: int | None) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class MonkeyParams:
    M: int = 26
    q: float = 0.2
    length: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        if not 2 <= self.M <= len(ALPHABET):
            raise ConfigError(f"alphabet size must be in [2, {len(ALPHABET)}], got {self.M}")
        if not 0 < self.q < 1:
            raise ConfigError(f"space probability must be in (0, 1), got {self.q}")
        if self.length < 0:
            raise ConfigError("length must be non-negative")


@dataclass(frozen=True)
class ZipfParams:
    alpha: float = 1.0
    V: int = 10_000
    N: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        if self.alpha < 0:
            raise ConfigError("alpha must be non-negative")
        if self.V < 1 or self.N < 0:
            raise ConfigError("need V >= 1 and N >= 0")

    def probabilities(self) -> np.ndarray:
        w = np.arange(1, self.V + 1, dtype=float) ** -self.alpha
        return w / w.sum()


def analytic_monkey_alpha(M: int, q: float) -> float:
    """Exponent of the random-typing model: ``1 - ln(1 - q) / ln M``.

    A word of length L has probability proportional to ((1-q)/M)**L while
    about M**L words are at least as short, so f falls as a power of rank.
    """
    if M < 2 or not 0 < q < 1:
        raise ConfigError(f"need M >= 2 and 0 < q < 1, got M={M}, q={q}")
    return 1.0 - math.log(1.0 - q) / math.log(M)


def monkey_text(params: MonkeyParams) -> TokenStream:
    """Type ``length`` i.i.d. characters: space with probability q, else a uniform letter."""
    rng = make_rng(params.seed)
    is_space = rng.random(params.length) < params.q
    letters = rng.integers(0, params.M, size=params.length)
    codes = np.frombuffer(ALPHABET[: params.M].encode("utf-32-le"), dtype=np.uint32)[letters]
    codes[is_space] = ord(" ")
    text = codes.astype("<u4").tobytes().decode("utf-32-le")
    return TokenStream(tuple(text.split()), text_id=f"monkey-M{params.M}-q{params.q}-seed{params.seed}")


def monkey_fit_window(dist: RankedDistribution, M: int) -> tuple[int, int]:
    """Fit window for a sampled monkey text, clear of its two flat ends.

    Starts after the M single-letter words (the top plateau) and stops at
    the last word seen at least twice (before the hapax plateau).
    """
    seen_twice = np.flatnonzero(dist.frequencies >= 2)
    if seen_twice.size == 0 or seen_twice[-1] + 1 <= M + 1:
        raise ConfigError("sample too small: no ranks between the single-letter plateau and the hapaxes")
    return M + 1, int(seen_twice[-1]) + 1


def word_name(index: int) -> str:
    """Letter-only name for a 0-based index: a, b, ..., z, aa, ab, ..."""
    chars = []
    index += 1
    while index:
        index, rem = divmod(index - 1, 26)
        chars.append(chr(ord("a") + rem))
    return "".join(reversed(chars))


def _zipf_draws(params: ZipfParams) -> np.ndarray:
    rng = make_rng(params.seed)
    cdf = np.cumsum(params.probabilities())
    cdf[-1] = 1.0
    return np.searchsorted(cdf, rng.random(params.N), side="right")


def zipf_counts(params: ZipfParams) -> np.ndarray:
    """Counts of the V words after N i.i.d. draws with p(r) proportional to r**-alpha."""
    return np.bincount(_zipf_draws(params), minlength=params.V)


def zipf_sample(params: ZipfParams) -> TokenStream:
    """N draws from a finite Zipf law over letter-only words ``word_name(0..V-1)``."""
    draws = _zipf_draws(params)
    names = np.array([word_name(i) for i in range(params.V)], dtype=object)
    return TokenStream(tuple(names[draws].tolist()), text_id=f"zipf-a{params.alpha}-V{params.V}-seed{params.seed}")


def exact_zipf_table(alpha: float, V: int, C: float = 1.0) -> RankedDistribution:
    """Noise-free ``f(r) = C * r**-alpha`` for r = 1..V, as real numbers."""
    if C <= 0:
        raise ConfigError("C must be positive")
    r = np.arange(1, V + 1, dtype=float)
    return RankedDistribution([word_name(i) for i in range(V)], C * r**-alpha, real_valued=True, label=f"exact-zipf-{alpha}")


def two_regime_table(
    alpha_low: float,
    alpha_high: float,
    breakpoint: int,
    V: int,
    C: float = 1e6,
    noise_sigma: float = 0.0,
    seed: int | None = None,
) -> RankedDistribution:
    """Two power laws joined continuously at ``breakpoint``.

    Optional multiplicative noise is i.i.d. Gaussian in log10 f with
    standard deviation ``noise_sigma``. Noisy values are kept at their ranks
    (not re-sorted): sorting would turn the noise into smooth, strongly
    correlated wiggles.
    """
    r = np.arange(1, V + 1, dtype=float)
    logf = np.log10(C) - alpha_low * np.log10(r)
    tail = r > breakpoint
    logf[tail] = np.log10(C) - alpha_low * np.log10(breakpoint) - alpha_high * np.log10(r[tail] / breakpoint)
    if noise_sigma:
        logf = logf + make_rng(seed).normal(0.0, noise_sigma, size=V)
    return RankedDistribution([word_name(i) for i in range(V)], 10**logf, real_valued=True, label="two-regime")


def write_stream(stream: TokenStream, path, line_width: int = 20) -> None:
    """Write tokens space-separated, ``line_width`` per line."""
    words = stream.words
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(0, len(words), line_width):
            fh.write(" ".join(words[i: i + line_width]))
            fh.write("\n")
