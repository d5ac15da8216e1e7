import io
import json

import numpy as np
import pytest

from ugto import cli
from ugto.corpus import Corpus, load_conll, write_conll
from ugto.crf import CrfModel, FeatureSpace
from ugto.errors import ConfigError
from ugto.modelfile import ModelBundle, load_model, save_model

import synthetic


def run(*args):
    buf = io.StringIO()
    code = cli.main([str(a) for a in args], out=buf)
    return code, buf.getvalue()


@pytest.fixture
def worked_file(tmp_path, worked_sentences):
    p = tmp_path / "t5.conll"
    write_conll(Corpus.from_sentences(list(worked_sentences.values())), p)
    return p


# -- configuration -------------------------------------------------------------


def test_precedence_file_env_flags(tmp_path):
    cfg_file = tmp_path / "ugto.cfg"
    cfg_file.write_text("# comment\nthreshold_t = 0.5\nl2=2.0\nmax_iterations=7\n")
    cfg = cli.resolve_config(cfg_file, env={}, overrides={})
    assert (cfg.threshold_t, cfg.l2, cfg.max_iterations) == (0.5, 2.0, 7)
    cfg = cli.resolve_config(cfg_file, env={"UGTO_L2": "3", "UGTO_MAX_ITERATIONS": "9"}, overrides={})
    assert (cfg.threshold_t, cfg.l2, cfg.max_iterations) == (0.5, 3.0, 9)
    cfg = cli.resolve_config(cfg_file, env={"UGTO_L2": "3"}, overrides={"l2": 4.0})
    assert cfg.l2 == 4.0
    assert cli.resolve_config(None, env={"UGTO_USE_PRETAGS": "false"}).use_pretags is False


def test_defaults():
    cfg = cli.resolve_config(None, env={})
    assert cfg.threshold_t == 1.0 and cfg.typed_labels and cfg.bio_variant == "IOB1"
    assert cfg.use_pretags and cfg.use_clusters and cfg.use_lexical


@pytest.mark.parametrize("text", ["threshold_t=0\n", "threshold_t=1.5\n", "bogus=1\n",
                                  "no equals sign\n", "use_pretags=maybe\n", "bio_variant=IOB2\n"])
def test_bad_config(tmp_path, text):
    p = tmp_path / "bad.cfg"
    p.write_text(text)
    with pytest.raises(ConfigError):
        cli.resolve_config(p, env={})


def test_bad_config_exit_code(tmp_path, worked_file, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text("threshold_t=2\n")
    assert run("induce", "--config", p, "--train", worked_file)[0] == 1
    assert "error" in capsys.readouterr().err


def test_missing_inputs(tmp_path, capsys):
    assert run("induce")[0] == 1
    assert run("induce", "--train", tmp_path / "nope.conll")[0] == 1
    assert run("tag", "--model", tmp_path / "nope.model", "--test", tmp_path / "x")[0] == 1
    assert run("eval", "--gold", tmp_path / "g")[0] == 1
    err = capsys.readouterr().err
    assert "ugto induce: error" in err and "ugto tag: error" in err


def test_env_config_path(tmp_path, worked_file, monkeypatch):
    p = tmp_path / "env.cfg"
    p.write_text(f"train={worked_file}\nbio_variant=BIO\n")
    monkeypatch.setenv("UGTO_CONFIG", str(p))
    code, out = run("induce")
    assert code == 0 and "Japan" in out


# -- commands ------------------------------------------------------------------


def test_induce_sorted_one_per_line(worked_file, tmp_path):
    code, out = run("induce", "--train", worked_file, "--bio-variant", "BIO")
    assert code == 0
    words = out.splitlines()
    assert words == sorted(words)
    assert {"Japan", "UK", "Asian", "Cup", "Tom", "Moody", "Australian"} <= set(words)
    assert "for" not in words and "began" not in words
    assert "of" in words  # only ever seen inside an entity here
    dest = tmp_path / "L.txt"
    assert run("induce", "--train", worked_file, "--bio-variant", "BIO", "-o", dest)[0] == 0
    assert dest.read_text() == out


def test_analyze_writes_csvs(tmp_path):
    train, test = synthetic.corpus(seed=1, n_sentences=50)
    write_conll(train, tmp_path / "train")
    write_conll(test, tmp_path / "test")
    outdir = tmp_path / "reports"
    code, out = run("analyze", "--train", tmp_path / "train", "--test", tmp_path / "test",
                    "--bio-variant", "BIO", "--scope", "per-split", "-o", outdir)
    assert code == 0
    assert "NNP" in out
    unc = (outdir / "uncommon.csv").read_text().splitlines()
    assert unc[0].split(",")[0] and len(unc) >= 2
    pos = (outdir / "pos.csv").read_text().splitlines()
    assert any(line.startswith("NNP,") for line in pos)


def _forced_bundle(worked_induction, worked_lexicon):
    labels = ("G-ORG", "O", "T-ORG", "U-ORG")
    words = {"UK": "U-ORG", "Department": "T-ORG", "of": "G-ORG", "Transport": "T-ORG"}
    attrs = tuple(f"w[0]={w}" for w in words)
    W = np.zeros((len(attrs), len(labels)))
    for a, lab in enumerate(words.values()):
        W[a, labels.index(lab)] = 5.0
    space = FeatureSpace(labels, attrs)
    # O wins wherever no word feature fires
    T = np.zeros((len(labels), len(labels)))
    T[:, labels.index("O")] = 1.0
    crf = CrfModel(space, np.concatenate([W.ravel(), T.ravel()]), {})
    return ModelBundle(crf, worked_induction, worked_lexicon, None,
                       {"typed": True, "use_pretags": False, "use_clusters": False,
                        "use_lexical": True})


def test_tag_forced_model(tmp_path, worked_induction, worked_lexicon, worked_sentences):
    model = tmp_path / "forced.model"
    save_model(model, _forced_bundle(worked_induction, worked_lexicon))
    inp = tmp_path / "in.conll"
    write_conll(Corpus.from_sentences([worked_sentences[2]]), inp)
    code, out = run("tag", "--model", model, "--test", inp, "--bio-variant", "BIO")
    assert code == 0
    body = [line for line in out.splitlines() if line and not line.startswith("-DOCSTART-")]
    assert body[:5] == [
        "UK NNP U-ORG B-ORG",
        "Department NNP T-ORG I-ORG",
        "of IN G-ORG I-ORG",
        "Transport NNP T-ORG I-ORG",
        "on IN O O",
    ]
    tagged = tmp_path / "out.conll"
    tagged.write_text(out)
    pred = load_conll(tagged, bio_variant="BIO")
    assert [(e.start, e.end, e.etype) for e in pred.sentences[0].entities] == [(0, 4, "ORG")]


def test_eval_gold_against_itself(worked_file, tmp_path):
    code, out = run("eval", "--gold", worked_file, "--pred", worked_file, "--bio-variant", "BIO",
                    "--json", "-o", tmp_path / "score.json")
    assert code == 0
    rep = json.loads(out.strip().splitlines()[-1])
    assert rep["f1"] == 1.0
    assert json.loads((tmp_path / "score.json").read_text())["f1"] == 1.0
    code, out = run("eval", "--test", worked_file, "--pred", worked_file, "--bio-variant", "BIO",
                    "--mode", "recognition", "--json")
    assert code == 0 and json.loads(out.strip().splitlines()[-1])["f1"] == 1.0


def test_train_zero_iterations_tie_break(tmp_path, worked_file):
    model = tmp_path / "zero.model"
    code, _ = run("train", "--train", worked_file, "--bio-variant", "BIO", "--max-iterations", 0,
                  "--model", model)
    assert code == 0
    b = load_model(model)
    assert not b.crf.weights.any()
    first = b.crf.labels[0]
    code, out = run("tag", "--model", model, "--test", worked_file, "--bio-variant", "BIO")
    raw = [line.split()[2] for line in out.splitlines() if line and not line.startswith("-DOCSTART-")]
    assert set(raw) == {first}


def test_train_flags_reach_model(tmp_path, worked_file):
    model = tmp_path / "m.model"
    code, _ = run("train", "--train", worked_file, "--bio-variant", "BIO", "--untyped",
                  "--no-pretags", "--drop-lexicon", "per,loc", "--max-iterations", 5,
                  "--model", model)
    assert code == 0
    b = load_model(model)
    assert set(b.crf.labels) <= {"O", "U", "T", "G"}
    assert not b.lexicon.entity_tokens["PER"] and not b.lexicon.entity_tokens["LOC"]
    assert b.lexicon.entity_tokens["MISC"]
    assert b.settings["typed"] == 0 and b.settings["use_pretags"] == 0
    assert not any(a.startswith("pt[") for a in b.crf.space.attributes)
    code, out = run("tag", "--model", model, "--test", worked_file, "--bio-variant", "BIO")
    assert code == 0


def test_train_rejects_bad_drop_category(tmp_path, worked_file):
    code, _ = run("train", "--train", worked_file, "--bio-variant", "BIO",
                  "--drop-lexicon", "org", "--model", tmp_path / "m")
    assert code == 1


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["--version"])
    assert exc.value.code == 0
    assert "ugto" in capsys.readouterr().out
