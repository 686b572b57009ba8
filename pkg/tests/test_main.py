"""Tests for __main__.py."""
from unittest.mock import patch

import pytest

from fracwave.__main__ import main


@pytest.mark.parametrize('status', [0, 1, 2])
def test_main_exit_status(monkeypatch, status) -> None:
    """Test main() exits with the status of parse_and_dispatch."""
    monkeypatch.setattr('sys.argv', ['__main__.py', 'sweep', '--config', 'run.toml'])
    with patch('fracwave.__main__.parse_and_dispatch', return_value=status) as mock_dispatch:
        with pytest.raises(SystemExit) as exc_info:
            main()
    # Arguments are passed on without the program name.
    mock_dispatch.assert_called_once_with(['sweep', '--config', 'run.toml'])
    assert exc_info.value.code == status


def test_main_with_no_args(monkeypatch, capsys) -> None:
    """Test main() without arguments is a usage error."""
    monkeypatch.setattr('sys.argv', ['__main__.py'])
    with pytest.raises(SystemExit) as exc_info:
        main()
    assert exc_info.value.code == 2
    assert 'usage: fracwave' in capsys.readouterr().err


def test_main_help(monkeypatch, capsys) -> None:
    """Test main() --help lists subcommands and exits 0."""
    monkeypatch.setattr('sys.argv', ['__main__.py', '--help'])
    with pytest.raises(SystemExit) as exc_info:
        main()
    assert exc_info.value.code == 0
    out = capsys.readouterr().out
    for subcommand in ('kernel', 'evolve', 'contraction', 'entropy', 'sweep', 'tw', 'manifest'):
        assert subcommand in out
