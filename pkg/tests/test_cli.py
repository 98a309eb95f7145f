import json
import shutil
from pathlib import Path

import numpy as np
import pytest

from zipfkit.cli import main, read_run_config
from zipfkit.errors import ConfigError, EmptyInputError, InputError, NumericError
from zipfkit.ranking import write_csv
from zipfkit.synth import exact_zipf_table, make_rng, word_name

DATA = Path(__file__).parent / "data"
LEX_EN = Path(__file__).parents[1] / "src" / "zipfkit" / "data" / "demo_lexicon_en.tsv"


def run_ok(*argv):
    assert main([str(a) for a in argv]) == 0


def test_rank_golden(tmp_path, monkeypatch):
    monkeypatch.chdir(DATA)
    run_ok("rank", "tiny.txt", "-o", tmp_path)
    assert (tmp_path / "tiny.rank.csv").read_bytes() == (DATA / "tiny.rank.golden.csv").read_bytes()
    summary = json.loads((tmp_path / "tiny.summary.json").read_text())
    assert summary["tokens"] == 38 and summary["vocabulary"] == 27
    assert summary["run"]["argv"] == ["rank", "tiny.txt"]


def test_rank_with_window_and_rejects(tmp_path):
    text = tmp_path / "z.txt"
    counts = np.rint(2000 * np.arange(1, 301) ** -1.0).astype(int)
    words = [word_name(i) for i in range(300)]
    text.write_text(" ".join(w for w, c in zip(words, counts) for _ in range(max(c, 1))) + " 42 $$\n")
    run_ok("rank", text, "--window", "2:200", "--rejects", "--log-binning", "5", "-o", tmp_path)
    summary = json.loads((tmp_path / "z.summary.json").read_text())
    assert summary["fit"]["alpha"] == pytest.approx(1.0, abs=0.05)
    assert "goodness" in summary and summary["rejects"] == 2
    rejects = (tmp_path / "z.rejects.tsv").read_text().splitlines()
    assert rejects[1].startswith("42\t") and rejects[2].startswith("$$\t")
    assert (tmp_path / "z.binned.csv").exists()


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("ZIPFKIT_OUTPUT_DIR", str(tmp_path / "env"))
    run_ok("rank", DATA / "tiny.txt")
    assert (tmp_path / "env" / "tiny.rank.csv").exists()


@pytest.mark.parametrize(
    "setup, argv, code",
    [
        (lambda p: p.write_text("  42 ... $$\n"), ["rank", "{p}"], EmptyInputError.exit_code),
        (lambda p: p.write_text(""), ["rank", "{p}"], EmptyInputError.exit_code),
        (lambda p: p.write_bytes(b"\xff\xfe"), ["rank", "{p}"], InputError.exit_code),
        (lambda p: None, ["rank", "{p}.missing"], InputError.exit_code),
        (lambda p: p.write_text("a b c"), ["rank", "{p}", "--window", "1:3"], NumericError.exit_code),
        (lambda p: p.write_text("a b c"), ["fig", "fig3", "{p}"], ConfigError.exit_code),
    ],
)
def test_exit_codes(tmp_path, setup, argv, code):
    p = tmp_path / "in.txt"
    setup(p)
    argv = [a.format(p=p) for a in argv] + ["-o", str(tmp_path)]
    assert main(argv) == code


def test_exit_codes_are_distinct():
    codes = [InputError.exit_code, EmptyInputError.exit_code, ConfigError.exit_code, NumericError.exit_code]
    assert len(set(codes)) == len(codes) and 0 not in codes


def test_fig1_on_exact_table(tmp_path):
    csv_path = tmp_path / "exact.csv"
    write_csv(exact_zipf_table(1.15, 20_000, 1e6), csv_path)
    run_ok("fig", "fig1", csv_path, "--window", "10:10000", "-o", tmp_path)
    fit = json.loads((tmp_path / "fig1.fit.json").read_text())["fits"]["exact"]["fit"]
    assert fit["alpha"] == pytest.approx(1.15, abs=1e-10)


def test_fig2_series(tmp_path):
    adj = tmp_path / "adj.txt"
    adj.write_text("old\nblack\n")
    text = tmp_path / "t.txt"
    text.write_text("The old dog ran. The black cat ran again. He saw the old man quickly. " * 20)
    run_ok("fig", "fig2", text, "--lexicon", LEX_EN, "--window", "1:5", "--approx", f"ADJ={adj}", "-o", tmp_path)
    payload = json.loads((tmp_path / "fig2.fit.json").read_text())
    assert set(payload["classes"]) == {"NOUN", "VERB", "ADJ", "ADV", "PRON", "OTHER", "approx:ADJ"}
    assert sum(payload["classes"][t]["tokens"] for t in ("NOUN", "VERB", "ADJ", "ADV", "PRON", "OTHER")) == 15 * 20
    assert payload["classes"]["approx:ADJ"]["tokens"] == payload["classes"]["ADJ"]["tokens"]
    series = {line.split(",")[0] for line in (tmp_path / "fig2.series.csv").read_text().splitlines() if not line.startswith("#")}
    assert {"NOUN", "VERB", "reference"} <= series


def test_fig3_identity_lexicon(tmp_path):
    text = tmp_path / "t.txt"
    words = [word_name(i) for i in range(200)]
    rng = make_rng(3)
    text.write_text(" ".join(rng.choice(words, size=5000, p=np.arange(1, 201) ** -1.0 / np.sum(np.arange(1, 201) ** -1.0))))
    lex = tmp_path / "id.tsv"
    lex.write_text("".join(f"{w}\t{w}\tNOUN\n" for w in words))
    run_ok("fig", "fig3", text, "--lexicon", lex, "--window", "1:100", "-o", tmp_path)
    rows = [ln.split(",") for ln in (tmp_path / "fig3.series.csv").read_text().splitlines() if not ln.startswith("#")][1:]
    inflected = [r[1:] for r in rows if r[0] == "inflected"]
    lemma = [r[1:] for r in rows if r[0] == "lemma"]
    assert inflected == lemma
    payload = json.loads((tmp_path / "fig3.fit.json").read_text())
    assert payload["lemma"]["fit"] == payload["inflected"]["fit"]


def _write_corpus(tmp_path, name, probs, seeds, n_tokens):
    words = np.array([word_name(i) for i in range(len(probs))])
    lines = ["[corpus]", f"name = {name}", ""]
    for s in seeds:
        draws = make_rng(s).choice(len(probs), size=n_tokens, p=probs)
        p = tmp_path / f"{name}{s}.txt"
        p.write_text(" ".join(words[draws]) + "\n")
        lines += [f"[text:{name}{s}]", f"path = {p.name}", "language = pl", "origin = " + ("native" if name == "native" else "translated")]
        if name != "native":
            lines.append("source_language = unknown")
        lines.append("")
    m = tmp_path / f"{name}.ini"
    m.write_text("\n".join(lines))
    return m


def test_fig4_synthetic_native_vs_translated(tmp_path):
    r = np.arange(1, 20_001, dtype=float)
    native = r**-1.0
    translated = np.where(r > 2000, native * (r / 2000) ** -0.8, native)
    ma = _write_corpus(tmp_path, "native", native / native.sum(), [1, 2], 150_000)
    mb = _write_corpus(tmp_path, "translated", translated / translated.sum(), [3, 4], 150_000)
    run_ok("fig", "fig4b", "--manifest-a", ma, "--manifest-b", mb, "--match-size", "--window", "10:1000", "-o", tmp_path)
    cmp = json.loads((tmp_path / "fig4b.fit.json").read_text())["comparison"]
    assert cmp["divergence_rank"] is not None
    assert cmp["tail_sign"] == 1  # translated tail lower
    assert cmp["total_a"] == cmp["total_b"]
    assert (tmp_path / "fig4b.delta.csv").exists()


def test_synth_and_rerun_reproduce(tmp_path):
    out = tmp_path / "m.txt"
    run_ok("synth", "monkey", out, "--length", "20000", "--seed", "3")
    side = json.loads((tmp_path / "m.txt.run.json").read_text())
    assert side["run"]["subcommand"] == "synth"
    first = tmp_path / "a"
    run_ok("rank", out, "--window", "1:100", "-o", first)
    cfg = read_run_config(first / "m.rank.csv")
    assert cfg["version"] and cfg["argv"][0] == "rank"
    second = tmp_path / "b"
    run_ok("rerun", first / "m.rank.csv", "-o", second)
    for name in ("m.rank.csv", "m.summary.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_synth_zipf(tmp_path):
    out = tmp_path / "z.txt"
    run_ok("synth", "zipf", out, "--alpha", "1.1", "--vocabulary", "100", "--tokens", "5000")
    assert len(out.read_text().split()) == 5000


def test_fetch_subcommand(tmp_path, capsys):
    src = tmp_path / "src.txt"
    src.write_text("abc")
    m = tmp_path / "m.ini"
    m.write_text(f"[corpus]\nname = x\n[text:a]\npath = dl/a.txt\nurl = {src.as_uri()}\n")
    run_ok("fetch", m)
    assert "a: downloaded" in capsys.readouterr().out
    assert (tmp_path / "dl" / "a.txt").read_text() == "abc"
