import pandas as pd
import pytest

from src.main import PARAMS_FILE, PUBLIC_KEY_FILE, SECRET_KEY_FILE, STORE_FILE, main


def _write_toy_csv(path):
    rows = ["0.125,0.125,0", "0.25,0.125,0", "0.125,0.25,0",
            "0.75,0.75,1", "0.875,0.75,1", "0.75,0.875,1"]
    path.write_text("\n".join(rows) + "\n", encoding='utf-8')
    return path


def _last_line(capsys):
    return capsys.readouterr().out.strip().splitlines()[-1]


def test_parser_errors_exit_with_two():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(['attack', '--mode', 'svm'])
    assert exc.value.code == 2


def test_usage_errors(tmp_path):
    assert main(['attack']) == 2
    assert main(['compare', '--dataset', 'cancer1']) == 2
    assert main(['query', '--q', '0.1,0.1']) == 2
    assert main(['query', '--q', '0.1,0.1', '--store', str(tmp_path)]) == 2
    assert main(['query', '--q', '0.1,abc', '--dataset', 'x.csv']) == 2
    assert main(['--log-level', 'LOUD', 'keygen', '--out', str(tmp_path)]) == 2


def test_runtime_errors_exit_with_one(tmp_path):
    csv = _write_toy_csv(tmp_path / "toy.csv")
    # ключей нет
    assert main(['--seed', '1', 'outsource', '--dataset', str(csv), '--keys', str(tmp_path / "none"),
                 '--out', str(tmp_path / "store")]) == 1
    # ключ короче допустимого
    assert main(['--seed', '1', 'keygen', '--bits', '512', '--out', str(tmp_path / "keys")]) == 1


def test_keygen_outsource_query(tmp_path, capsys):
    csv = _write_toy_csv(tmp_path / "toy.csv")
    keys, store = tmp_path / "keys", tmp_path / "store"

    assert main(['--seed', '9', 'keygen', '--bits', '1024', '--out', str(keys)]) == 0
    assert (keys / PUBLIC_KEY_FILE).exists() and (keys / SECRET_KEY_FILE).exists()
    assert "bits=1024" in _last_line(capsys)

    assert main(['--seed', '9', 'outsource', '--dataset', str(csv), '--keys', str(keys),
                 '--sigma', '0.25', '--owners', '2', '--out', str(store)]) == 0
    assert (store / STORE_FILE).exists() and (store / PARAMS_FILE).exists()
    assert _last_line(capsys).startswith("tuples=6 m=2 c=2")

    for q, label in (("0.1,0.1", 0), ("0.9,0.9", 1)):
        assert main(['--seed', '9', 'query', '--q', q, '--store', str(store), '--keys', str(keys)]) == 0
        assert _last_line(capsys) == f"label={label}"


def test_query_against_plaintext(tmp_path, capsys):
    csv = _write_toy_csv(tmp_path / "toy.csv")
    assert main(['--seed', '4', 'query', '--q', '0.4,0.3', '--dataset', str(csv),
                 '--bits', '1024', '--sigma', '0.25', '--transport', 'inprocess']) == 0
    assert _last_line(capsys).endswith("match=True")


def test_attack_report_is_reproducible(tmp_path, capsys):
    args = ['attack', '--mode', '1nn', '--instances', '2', '--m', '2']
    assert main(['--seed', '3'] + args + ['--out', str(tmp_path / "a.txt")]) == 0
    assert main(['--seed', '3'] + args + ['--out', str(tmp_path / "b.txt")]) == 0
    capsys.readouterr()
    assert (tmp_path / "a.txt").read_text(encoding='utf-8') == (tmp_path / "b.txt").read_text(encoding='utf-8')
    assert (tmp_path / "a.csv").exists()


def test_attack_results_saved_to_db(tmp_path, capsys):
    from src.harness.report_store import ReportStore

    db = tmp_path / "results.db"
    assert main(['--seed', '5', '--db', str(db), 'attack', '--mode', 'kde', '--instances', '1',
                 '--out', str(tmp_path / "kde.txt")]) == 0
    capsys.readouterr()
    with ReportStore(db) as store:
        assert store.load_attacks('attack-kde-seed5')['status'].tolist() == ['no signal']


def test_attack_without_deletion(tmp_path, capsys):
    assert main(['--seed', '3', 'attack', '--mode', 'all_labels', '--k', '3', '--instances', '1',
                 '--no-deletion', '--out', str(tmp_path / "narrow.txt")]) == 0
    capsys.readouterr()
    df = pd.read_csv(tmp_path / "narrow.csv")
    assert df['status'].tolist() == ['ok']
    assert df['error'].iloc[0] < 1e-5
