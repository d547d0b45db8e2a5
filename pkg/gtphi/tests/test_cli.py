import pytest

from gtphi import cli


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        cli.main(["train"])  # missing required flags
    assert exc.value.code == 1


def test_missing_dataset_is_run_failure(tmp_path):
    code = cli.main(["train", "--data", str(tmp_path / "nope"), "--out", str(tmp_path / "ck.pt")])
    assert code == 2


def test_bad_checkpoint_is_run_failure(tmp_path):
    bad = tmp_path / "bad.pt"
    bad.write_text("not a checkpoint")
    code = cli.main(["serve", "--checkpoint", str(bad)])
    assert code == 2
