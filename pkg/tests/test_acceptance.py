"""Acceptance criteria, one test per criterion.

Each test records a ``criterion N: PASS/FAIL ...`` line that pytest prints
in a summary section at the end of the run, then asserts.
"""

import math
import os
import time
from collections import Counter
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ACCEPTANCE_LINES, naive_rank
from zipfkit.corpus import compare
from zipfkit.fitting import FitWindow, detect_crossover, fit_power_law
from zipfkit.lexicon import Lexicon, PosTag, lemmatize, load_lexicon, tag_tokens
from zipfkit.ranking import class_sub_ranking, count_frequencies, count_sharded, merge_tables, rank, rank_stream
from zipfkit.synth import (
    MonkeyParams,
    ZipfParams,
    analytic_monkey_alpha,
    exact_zipf_table,
    monkey_fit_window,
    monkey_text,
    two_regime_table,
    zipf_sample,
)
from zipfkit.text_ingest import TokenStream, read_raw_text, tokenize

ROOT = Path(__file__).parents[1]
ULYSSES_TOKENS = 264_272


def record(n, ok, detail, elapsed=None):
    t = f" ({elapsed:.2f}s)" if elapsed is not None else ""
    ACCEPTANCE_LINES.append(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}{t}")


def check(n, conditions, detail, elapsed):
    ok = all(conditions.values())
    failed = [k for k, v in conditions.items() if not v]
    record(n, ok, detail + (f"; failed: {', '.join(failed)}" if failed else ""), elapsed)
    assert ok, failed


def _data_file(env, default):
    p = Path(os.environ.get(env, ROOT / default))
    return p if p.is_file() else None


def test_criterion_1_exact_recovery():
    t0 = time.perf_counter()
    fit = fit_power_law(exact_zipf_table(1.0, 10_000), FitWindow(10, 10_000))
    dt = time.perf_counter() - t0
    check(
        1,
        {"alpha": abs(fit.alpha - 1.0) <= 1e-10, "r2": fit.r_squared == pytest.approx(1.0, abs=1e-12), "time": dt < 1},
        f"alpha={fit.alpha!r} r2={fit.r_squared!r}",
        dt,
    )


def test_criterion_2_monkey_oracle():
    t0 = time.perf_counter()
    dist = rank_stream(monkey_text(MonkeyParams(M=26, q=0.2, length=10_000_000, seed=20240601)))
    window = monkey_fit_window(dist, 26)
    fit = fit_power_law(dist, window)
    dt = time.perf_counter() - t0
    target = analytic_monkey_alpha(26, 0.2)
    check(
        2,
        {"alpha": abs(fit.alpha - target) <= 0.05, "time": dt < 30},
        f"alpha={fit.alpha:.4f} vs analytic {target:.4f} over {window[0]}:{window[1]}",
        dt,
    )


def test_criterion_3_sampler_recovery():
    t0 = time.perf_counter()
    dist = rank_stream(zipf_sample(ZipfParams(alpha=1.2, V=10_000, N=10_000_000, seed=7)))
    fit = fit_power_law(dist, FitWindow(10, 3000))
    dt = time.perf_counter() - t0
    check(3, {"alpha": 1.17 <= fit.alpha <= 1.23, "time": dt < 60}, f"alpha={fit.alpha:.4f}", dt)


def test_criterion_4_ulysses():
    path = _data_file("ZIPFKIT_ULYSSES", "data/corpora/ulysses.txt")
    if path is None:
        record(4, False, "no Ulysses text found (set ZIPFKIT_ULYSSES or run the fetch script)")
        pytest.fail("Ulysses text not available")
    t0 = time.perf_counter()
    stream, _ = tokenize(read_raw_text(path, "en"))
    fit = fit_power_law(rank_stream(stream), FitWindow(10, 10_000))
    dt = time.perf_counter() - t0
    check(
        4,
        {
            "tokens": abs(len(stream) - ULYSSES_TOKENS) <= 0.03 * ULYSSES_TOKENS,
            "alpha": 0.95 <= fit.alpha <= 1.15,
            "r2": fit.r_squared > 0.98,
            "time": dt < 10,
        },
        f"tokens={len(stream)} alpha={fit.alpha:.4f} r2={fit.r_squared:.4f}",
        dt,
    )


def test_criterion_5_crossover():
    t0 = time.perf_counter()
    dist = two_regime_table(1.0, 1.6, 1000, 20_000, noise_sigma=0.02, seed=11)
    seg = detect_crossover(dist, FitWindow(10, 20_000))
    dt = time.perf_counter() - t0
    conditions = {
        "breakpoint": 667 <= seg.breakpoint <= 1500,
        "alpha_low": abs(seg.low_fit.alpha - 1.0) <= 0.05,
        "alpha_high": abs(seg.high_fit.alpha - 1.6) <= 0.05,
        "time": dt < 5,
    }
    detail = f"breakpoint={seg.breakpoint} alphas={seg.low_fit.alpha:.4f}/{seg.high_fit.alpha:.4f}"

    # order-of-magnitude check on real lemmatized text, when both inputs exist
    text = _data_file("ZIPFKIT_ULYSSES", "data/corpora/ulysses.txt")
    lex = _data_file("ZIPFKIT_LEXICON_EN", "data/lexicons/en.tsv")
    if text and lex:
        stream, _ = tokenize(read_raw_text(text, "en"))
        tagged, _ = tag_tokens(stream, load_lexicon(lex))
        lemmas = rank_stream(lemmatize(tagged))
        real = detect_crossover(lemmas, FitWindow(10, lemmas.vocabulary))
        conditions["ulysses_lemma_order"] = 100 <= real.breakpoint <= 10_000
        detail += f"; Ulysses lemma breakpoint={real.breakpoint}"
    else:
        detail += "; real-text lemma check not run (no Ulysses text + English lexicon)"
    check(5, conditions, detail, dt)


def test_criterion_6_oracle_equivalence():
    rng = np.random.default_rng(6)
    t0 = time.perf_counter()
    mismatches = shard_mismatches = 0
    for _ in range(100):
        n = int(rng.integers(0, 10_001))
        vocab = int(rng.integers(1, 2000))
        # skewed draws so there are many ties and many distinct counts
        idx = np.minimum(rng.zipf(1.3, size=n), vocab) - 1
        words = [f"w{i}" for i in idx]
        stream = TokenStream(tuple(words), "fp")
        got = [(e.rank, e.word, e.frequency) for e in rank_stream(stream)]
        mismatches += got != naive_rank(words)
        shard_mismatches += count_sharded(stream, int(rng.integers(1, 9))) != count_frequencies(stream)
    dt = time.perf_counter() - t0
    check(
        6,
        {"rank": mismatches == 0, "shards": shard_mismatches == 0, "time": dt < 5},
        f"{mismatches} rank mismatches, {shard_mismatches} shard mismatches in 100 streams",
        dt,
    )


# criterion 7: each property below runs CASES examples; the summary test
# checks the total and the wall time.
CASES = 200
_property_runs = Counter()
_property_time = [0.0]

words_st = st.lists(st.sampled_from(["a", "b", "c", "d", "e", "ab", "ba", "cc", "dd", "ee"]), max_size=300)
lex_rows_st = st.lists(
    st.tuples(
        st.sampled_from(["a", "b", "c", "d", "e", "ab", "ba", "cc"]),
        st.sampled_from(["x", "y", "z", "a"]),
        st.sampled_from(list(PosTag)),
    ),
    max_size=12,
)


def _timed(name):
    def deco(fn):
        def wrapper(*args, **kwargs):
            t0 = time.perf_counter()
            fn(*args, **kwargs)
            _property_time[0] += time.perf_counter() - t0
            _property_runs[name] += 1

        wrapper.__name__ = fn.__name__
        wrapper.__signature__ = __import__("inspect").signature(fn)
        return wrapper

    return deco


@settings(max_examples=CASES, database=None)
@given(words_st)
@_timed("rank completeness and monotonicity")
def test_prop_rank_complete_monotone(words):
    dist = rank_stream(words)
    assert sorted(dist.words) == sorted(set(words))
    assert list(dist.ranks) == list(range(1, len(set(words)) + 1))
    assert dist.total == len(words)
    assert np.all(np.diff(dist.frequencies) <= 0)


@settings(max_examples=CASES, database=None)
@given(words_st, lex_rows_st)
@_timed("conservation under class partition and lemmatization")
def test_prop_conservation(words, rows):
    tagged, _ = tag_tokens(words, Lexicon.from_rows(rows))
    assert sum(class_sub_ranking(tagged, p).total for p in PosTag) == len(words)
    assert len(lemmatize(tagged)) == len(words)


@settings(max_examples=CASES, database=None)
@given(words_st, lex_rows_st)
@_timed("lemma vocabulary contraction")
def test_prop_lemma_contraction(words, rows):
    tagged, _ = tag_tokens(words, Lexicon.from_rows(rows))
    assert len(set(lemmatize(tagged))) <= len(set(words))


@settings(max_examples=CASES, database=None)
@given(
    st.floats(0.3, 2.5),
    st.integers(50, 3000),
    st.floats(1e-3, 1e6),
    st.floats(-3, 3),
)
@_timed("scale equivariance of fits")
def test_prop_scale_equivariance(alpha, V, C, log_c):
    d = exact_zipf_table(alpha, V, C)
    noise = 1 + 0.1 * np.sin(np.arange(V))  # deterministic wiggle so the fit is not trivial
    d = type(d)(d.words, d.frequencies * noise, real_valued=True)
    w = FitWindow(2, V)
    a, b = fit_power_law(d, w), fit_power_law(d.scaled(10**log_c), w)
    assert b.alpha == pytest.approx(a.alpha, abs=1e-9)
    assert b.intercept == pytest.approx(a.intercept + log_c, abs=1e-9)
    assert b.r_squared == pytest.approx(a.r_squared, abs=1e-9)


@settings(max_examples=CASES, database=None)
@given(st.lists(st.integers(1, 10_000), min_size=1, max_size=500), st.floats(1e-3, 1e3))
@_timed("compare(d, c*d) gives zero gap")
def test_prop_compare_scaled(counts, c):
    d = rank({f"w{i}": n for i, n in enumerate(counts)})
    rep = compare(d, d.scaled(c))
    assert np.allclose(rep.delta, 0.0, atol=1e-12)
    assert rep.divergence_rank is None


def test_criterion_7_invariant_suite():
    total = sum(_property_runs.values())
    dt = _property_time[0]
    if not _property_runs:
        record(7, False, "property tests did not run in this session")
        pytest.fail("run the whole module so the property tests execute first")
    check(
        7,
        {"cases": total >= 1000, "properties": len(_property_runs) == 5, "time": dt < 60},
        f"{total} randomized cases over {len(_property_runs)} properties",
        dt,
    )


def test_criterion_8_substitute_divergence():
    # the non-reproducible items (copyrighted Polish Ulysses, BNC, unpublished
    # corpora) are replaced by a constructed faster-decaying tail
    t0 = time.perf_counter()
    native = exact_zipf_table(1.0, 20_000, 1e6)
    r = native.ranks.astype(float)
    translated = type(native)(native.words, np.where(r > 5000, native.frequencies * r**-0.1, native.frequencies), real_valued=True)
    rep = compare(native, translated, threshold=0.05)
    dt = time.perf_counter() - t0
    ok_rank = rep.divergence_rank is not None and 2500 <= rep.divergence_rank <= 10_000
    check(
        8,
        {"divergence_rank": ok_rank, "direction": rep.tail_sign == 1},
        f"divergence_rank={rep.divergence_rank} (f scaled by r^-0.1 beyond rank 5000); "
        "Polish Ulysses, BNC and the original native/translated corpora are not reproducible here",
        dt,
    )
