import csv
import json
import subprocess
import sys

import pytest

from d2tnlg.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main, read_config_file

ROWS = [
    ("name[The Eagle], eatType[pub], food[English]", "The Eagle is a pub serving English food."),
    ("name[The Eagle], eatType[pub], food[English]", "English food is served at The Eagle pub."),
    ("name[Cotto], eatType[restaurant], near[The Bakers]", "Cotto is a restaurant near The Bakers."),
    ("name[Cotto], eatType[restaurant], near[The Bakers]", "Near The Bakers is the restaurant Cotto."),
    ("name[Zizzi], eatType[coffee shop], area[riverside]", "Zizzi is a coffee shop by the riverside."),
]

TINY = ["embedding_dim=6", "hidden_dim=6", "max_epochs=2", "batch_size=2"]


@pytest.fixture
def csv_file(tmp_path):
    path = tmp_path / "train.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["mr", "ref"])
        w.writerows(ROWS)
    return path


@pytest.fixture
def prepped(tmp_path, csv_file):
    out = tmp_path / "prep"
    assert main(["preprocess", "--dataset", "e2e", "--input", str(csv_file), "--out-dir", str(out)]) == EXIT_OK
    return out


def _train(prepped, out, seed="7", extra=()):
    corpus = str(prepped / "corpus.tsv")
    argv = ["train", "--corpus", corpus, "--dev", corpus, "--preset", "e2e-word", "--seed", seed,
            "--out", str(out)]
    for kv in TINY:
        argv += ["--set", kv]
    return main(argv + list(extra))


def test_preprocess_writes_aligned_files(prepped):
    for name in ("corpus.tsv", "inputs.tsv", "vocab.input.json", "vocab.output.json", "stats.txt",
                 "references.txt", "mrs.txt"):
        assert (prepped / name).exists(), name
    assert len((prepped / "corpus.tsv").read_text().splitlines()) == 5
    assert len((prepped / "inputs.tsv").read_text().splitlines()) == 3
    assert len((prepped / "mrs.txt").read_text().splitlines()) == 3
    assert (prepped / "references.txt").read_text().count("\n\n") == 2
    assert "NAME" in (prepped / "corpus.tsv").read_text()
    json.loads((prepped / "vocab.input.json").read_text())


def test_full_flow(tmp_path, prepped, capsys):
    ckpt = tmp_path / "m.ckpt"
    assert _train(prepped, ckpt) == EXIT_OK
    assert "epoch\ttrain_loss" in capsys.readouterr().out
    hyps = tmp_path / "hyps.txt"
    assert main(["generate", "--checkpoint", str(ckpt), "--mrs", str(prepped / "mrs.txt"),
                 "--beam", "3", "--relex", "--out", str(hyps)]) == EXIT_OK
    assert len(hyps.read_text().splitlines()) == 3
    nbest = tmp_path / "nbest.txt"
    assert main(["generate", "--checkpoint", str(ckpt), "--corpus", str(prepped / "inputs.tsv"),
                 "--beam", "3", "--n-best", "3", "--out", str(nbest)]) == EXIT_OK
    reranked = tmp_path / "reranked.txt"
    assert main(["rerank", "--mrs", str(prepped / "mrs.txt"), "--nbest", str(nbest),
                 "--out", str(reranked)]) == EXIT_OK
    capsys.readouterr()
    assert main(["evaluate", "--hyps", str(hyps), "--refs", str(prepped / "references.txt")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "bleu=" in out and "rouge_l=" in out
    assert main(["evaluate", "--nbest", str(reranked), "--mrs", str(prepped / "mrs.txt")]) == EXIT_OK
    assert "c_at_1=" in capsys.readouterr().out


def test_self_evaluation_and_human(tmp_path, prepped, capsys):
    refs = prepped / "references.txt"
    first = tmp_path / "first.txt"
    first.write_text("".join(block.split("\n")[0] + "\n" for block in refs.read_text().strip().split("\n\n")))
    assert main(["evaluate", "--hyps", str(first), "--refs", str(refs)]) == EXIT_OK
    assert "bleu=100.00" in capsys.readouterr().out
    assert main(["evaluate", "--human", "--refs", str(refs)]) == EXIT_OK
    assert "human_bleu_mean=" in capsys.readouterr().out


def test_training_is_deterministic(tmp_path, prepped):
    assert _train(prepped, tmp_path / "a") == EXIT_OK
    assert _train(prepped, tmp_path / "b") == EXIT_OK
    assert _train(prepped, tmp_path / "c", seed="8") == EXIT_OK
    assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()
    assert (tmp_path / "a").read_bytes() != (tmp_path / "c").read_bytes()


def test_config_file_and_flag_precedence(tmp_path, prepped, capsys):
    cfg = tmp_path / "run.cfg"
    corpus = prepped / "corpus.tsv"
    cfg.write_text(f"# tiny run\ncorpus = {corpus}\ndev = {corpus}\npreset = e2e-word\nseed = 3\n"
                   "embedding_dim = 6\nhidden_dim = 6\nmax_epochs = 3\nbatch_size = 2\n")
    assert read_config_file(cfg)["max_epochs"] == "3"
    assert main(["train", "--config", str(cfg), "--out", str(tmp_path / "m")]) == EXIT_OK
    assert len([ln for ln in capsys.readouterr().out.splitlines() if ln[:1].isdigit()]) == 3
    assert main(["train", "--config", str(cfg), "--set", "max_epochs=1", "--out", str(tmp_path / "m")]) == EXIT_OK
    assert len([ln for ln in capsys.readouterr().out.splitlines() if ln[:1].isdigit()]) == 1


def test_usage_errors(tmp_path, prepped, capsys):
    corpus = str(prepped / "corpus.tsv")
    assert main([]) == EXIT_USAGE
    assert main(["train", "--corpus", corpus, "--dev", corpus, "--preset", "e2e-word",
                 "--out", str(tmp_path / "m")]) == EXIT_USAGE  # no seed
    assert main(["train", "--corpus", corpus, "--dev", corpus, "--preset", "nope", "--seed", "1",
                 "--out", str(tmp_path / "m")]) == EXIT_USAGE
    assert _train(prepped, tmp_path / "m", seed=str(2 ** 64)) == EXIT_USAGE
    assert _train(prepped, tmp_path / "m", extra=["--set", "colour=red"]) == EXIT_USAGE
    assert main(["evaluate", "--hyps", corpus, "--diversity"]) == EXIT_USAGE
    assert main(["synthesize", "--templates", "t1", "--out", str(tmp_path / "s")]) == EXIT_USAGE
    assert main(["generate", "--checkpoint", "x", "--out", "y"]) == EXIT_USAGE
    assert main(["preprocess", "--bogus"]) == EXIT_USAGE
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = red\n")
    assert main(["synthesize", "--config", str(cfg), "--templates", "t1", "--from-lexicon",
                 "--out", str(tmp_path / "s")]) == EXIT_USAGE
    assert "usage error" in capsys.readouterr().err


def test_data_errors(tmp_path, prepped, capsys):
    refs = prepped / "references.txt"
    short = tmp_path / "short.txt"
    short.write_text("only one line\n")
    assert main(["evaluate", "--hyps", str(short), "--refs", str(refs)]) == EXIT_DATA
    assert "instance 1" in capsys.readouterr().err
    assert main(["preprocess", "--dataset", "e2e", "--input", str(tmp_path / "missing.csv"),
                 "--out-dir", str(tmp_path / "o")]) == EXIT_DATA
    bad = tmp_path / "bad.ckpt"
    bad.write_bytes(b"garbage!" * 4)
    assert main(["generate", "--checkpoint", str(bad), "--mrs", str(prepped / "mrs.txt"),
                 "--out", str(tmp_path / "h")]) == EXIT_DATA
    nb = tmp_path / "nb.txt"
    nb.write_text("-1.0\tsome text\n")
    assert main(["rerank", "--mrs", str(prepped / "mrs.txt"), "--nbest", str(nb),
                 "--out", str(tmp_path / "r")]) == EXIT_DATA


def test_synthesize_from_lexicon(tmp_path, capsys):
    out = tmp_path / "synth.tsv"
    assert main(["synthesize", "--from-lexicon", "--templates", "t1t2", "--out", str(out)]) == EXIT_OK
    assert len(out.read_text().splitlines()) == 2 * 5670


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "d2tnlg", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "synthesize" in res.stdout
