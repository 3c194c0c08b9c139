import json

import pytest

from takegrant.cli import EXIT_DISAGREE, EXIT_ERROR, EXIT_FALSE, EXIT_TRUE, run
from takegrant.document import serialize_graph


@pytest.fixture
def write_graph(tmp_path):
    def write(g, name='g.tg'):
        path = tmp_path / name
        path.write_text(serialize_graph(g, 'structured' if name.endswith('.json') else 'text'))
        return str(path)
    return write


def test_analyze_true(write_graph, direct_graph, capsys):
    code = run(['analyze', '-i', write_graph(direct_graph), '--alpha', 'r', '--from', 'p', '--to', 'q'])
    out = capsys.readouterr().out
    assert code == EXIT_TRUE
    assert out.startswith('can_share(r, p, q): true')
    assert 'direct edge p -> q {r}' in out


def test_analyze_false(write_graph, common_object_graph, capsys):
    code = run(['analyze', '-i', write_graph(common_object_graph), '--alpha', 'r', '--from', 'u', '--to', 'q'])
    assert code == EXIT_FALSE
    assert 'no witness' in capsys.readouterr().out


def test_analyze_unknown_vertex(write_graph, direct_graph, capsys):
    code = run(['analyze', '-i', write_graph(direct_graph), '--alpha', 'r', '--from', 'p', '--to', 'z'])
    captured = capsys.readouterr()
    assert code == EXIT_ERROR
    assert "'z'" in captured.err
    assert captured.out == ''


def test_missing_file_and_usage_errors(tmp_path, capsys):
    assert run(['islands', '-i', str(tmp_path / 'missing.tg')]) == EXIT_ERROR
    assert run(['analyze', '--from', 'p', '--to', 'q']) == EXIT_ERROR
    assert run([]) == EXIT_ERROR
    assert run(['bogus']) == EXIT_ERROR
    capsys.readouterr()


def test_structured_output_agrees_with_text(write_graph, b3_graph, capsys):
    path = write_graph(b3_graph, 'g.json')
    args = ['analyze', '-i', path, '--alpha', 'r', '--from', 'u', '--to', 'q']
    assert run(args) == EXIT_TRUE
    text = capsys.readouterr().out
    assert run(args + ['--format', 'structured']) == EXIT_TRUE
    report = json.loads(capsys.readouterr().out)
    assert report['answer'] is True
    assert report['witness']['bridges'][0]['vertices'] == ['u', 'o', 'w', 'v']
    assert 'u -(t>)- o -(g>)- w -(<t)- v' in text


def test_islands(write_graph, chain_graph, capsys):
    assert run(['islands', '-i', write_graph(chain_graph)]) == EXIT_TRUE
    assert capsys.readouterr().out == 'a b\nc d\ne\n'


def test_bridges(write_graph, b3_graph, capsys):
    assert run(['bridges', '-i', write_graph(b3_graph), '--from', 'u']) == EXIT_TRUE
    assert capsys.readouterr().out == '0 -> 1: u -(t>)- o -(g>)- w -(<t)- v : B3\n'


def test_spans(write_graph, b3_graph, capsys):
    assert run(['spans', '-i', write_graph(b3_graph), '--to', 'w', '--format', 'structured']) == EXIT_TRUE
    report = json.loads(capsys.readouterr().out)
    assert [entry['subject'] for entry in report['initial']] == ['u']
    assert [entry['subject'] for entry in report['terminal']] == ['v']


def test_path(write_graph, b3_graph, common_object_graph, capsys):
    assert run(['path', '-i', write_graph(b3_graph), '--from', 'u', '--to', 'v']) == EXIT_TRUE
    assert capsys.readouterr().out == 'u - o - w - v\n'
    path = write_graph(common_object_graph.restricted_to({'r'}), 'other.tg')
    assert run(['path', '-i', path, '--from', 'u', '--to', 'v']) == EXIT_FALSE


def test_oracle_check(write_graph, b3_graph, common_object_graph, capsys):
    code = run(['oracle-check', '-i', write_graph(b3_graph), '--alpha', 'r', '--from', 'u', '--to', 'q'])
    out = capsys.readouterr().out
    assert code == EXIT_TRUE
    assert 'agreement: yes' in out
    path = write_graph(common_object_graph, 'negative.tg')
    code = run(['oracle-check', '-i', path, '--alpha', 'r', '--from', 'u', '--to', 'q', '--create-budget', '2',
                '--format', 'structured'])
    report = json.loads(capsys.readouterr().out)
    assert code == EXIT_FALSE
    assert report['agreement'] is True
    assert report['oracle']['outcome'] == 'not-found-within-bounds'
    assert report['bounds']['create_budget'] == 2


def test_oracle_check_disagreement(write_graph, b3_graph, capsys):
    # no creates allowed: the bridge cannot be crossed
    code = run(['oracle-check', '-i', write_graph(b3_graph), '--alpha', 'r', '--from', 'u', '--to', 'q',
                '--create-budget', '0'])
    assert code == EXIT_DISAGREE
    assert 'agreement: NO' in capsys.readouterr().out


def test_export_dot(write_graph, direct_graph, capsys):
    assert run(['export-dot', '-i', write_graph(direct_graph)]) == EXIT_TRUE
    assert '"p" -> "q" [label="r"];' in capsys.readouterr().out


def test_gen_random_is_reproducible(tmp_path, capsys):
    args = ['gen-random', '--n', '6', '--density', '0.4', '--seed', '5']
    assert run(args) == EXIT_TRUE
    first = capsys.readouterr().out
    assert run(args) == EXIT_TRUE
    assert capsys.readouterr().out == first
    output = tmp_path / 'random.json'
    assert run(args + ['--format', 'structured', '-o', str(output)]) == EXIT_TRUE
    assert len(json.loads(output.read_text())['vertices']) == 6


def test_safety(write_graph, b3_graph, capsys):
    path = write_graph(b3_graph)
    assert run(['safety', '-i', path, '--forbid', 'w:u:q']) == EXIT_TRUE
    assert 'state is safe' in capsys.readouterr().out
    assert run(['safety', '-i', path, '--forbid', 'w:u:q', '--forbid', 'r:u:q']) == EXIT_FALSE
    assert 'r u -> q: shareable' in capsys.readouterr().out
    assert run(['safety', '-i', path, '--forbid', 'r:u']) == EXIT_ERROR
