import pytest

from esis.cli import main
from esis.scenario import ScenarioError, parse_scenario

NSAP_HEX = "49" + "00" * 19


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_craft_ra(capsys):
    code, out, _ = run_cli(capsys, "craft", "--type", "ra", "--holding", "0")
    assert code == 0
    hexed = out.strip()
    assert len(hexed) == 18
    assert hexed.startswith("820901")


def test_craft_esh_requires_address(capsys):
    code, _, err = run_cli(capsys, "craft", "--type", "esh")
    assert code == 2
    assert "address count must be ≥ 1" in err


def test_craft_decode_roundtrip(capsys):
    code, out, _ = run_cli(capsys, "craft", "--type", "esh",
                           "--addr", NSAP_HEX, "--holding", "120")
    assert code == 0
    hexed = out.strip()
    code, out, _ = run_cli_with_stdin(capsys, hexed, "decode")
    assert code == 0
    assert "OK ESH" in out
    assert "checksum_verdict  VALID" in out


def run_cli_with_stdin(capsys, text, *argv, monkeypatch=None):
    import io
    import sys
    old = sys.stdin
    sys.stdin = io.StringIO(text)
    try:
        return run_cli(capsys, *argv)
    finally:
        sys.stdin = old


def test_craft_ish_esct_roundtrip(capsys):
    code, out, _ = run_cli(capsys, "craft", "--type", "ish",
                           "--addr", NSAP_HEX, "--opt", "esct=001e")
    assert code == 0
    code, out, _ = run_cli_with_stdin(capsys, out.strip(), "decode")
    assert code == 0
    assert "option esct        001e" in out
    assert "OK ISH" in out


def test_decode_detects_corruption(capsys):
    code, out, _ = run_cli(capsys, "craft", "--type", "esh", "--addr", NSAP_HEX)
    hexed = out.strip()
    # flip one header octet (not a 00<->ff alias)
    pos = 10
    octet = int(hexed[2 * pos:2 * pos + 2], 16)
    mutated = hexed[:2 * pos] + format((octet + 1) % 256, "02x") + hexed[2 * pos + 2:]
    code, out, _ = run_cli_with_stdin(capsys, mutated, "decode")
    assert code == 1
    assert "DISCARD ChecksumError" in out


def test_decode_truncated(capsys):
    code, out, _ = run_cli_with_stdin(capsys, "820901", "decode")
    assert code == 1
    assert "DISCARD ProtocolError(TruncatedPdu)" in out


def test_decode_garbage_input(capsys):
    code, _, err = run_cli_with_stdin(capsys, "zz-not-hex", "decode")
    assert code == 2


def test_decode_rd_fields(capsys):
    code, out, _ = run_cli(capsys, "craft", "--type", "rd", "--addr", NSAP_HEX,
                           "--snpa", "020000000002", "--net", "48" + "00" * 19)
    code, out, _ = run_cli_with_stdin(capsys, out.strip(), "decode")
    assert code == 0
    assert "better_snpa       020000000002" in out
    assert "OK RD" in out


def test_run_scenario_deterministic(capsys, tmp_path):
    args = ("run", "scenarios/discovery.scn", "--dump-ribs")
    code1, out1, _ = run_cli(capsys, *args)
    code2, out2, _ = run_cli(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    assert "-- rib ES1 --" in out1


def test_run_writes_log_file(capsys, tmp_path):
    dest = tmp_path / "out.log"
    code, out, _ = run_cli(capsys, "run", "scenarios/discovery.scn",
                           "--log", str(dest))
    assert code == 0 and out == ""
    assert "RIB ES" in dest.read_text()


def test_run_bad_scenario(capsys, tmp_path):
    bad = tmp_path / "bad.scn"
    bad.write_text("node X role=es snpa=020000000001 bogus=1\n")
    code, _, err = run_cli(capsys, "run", str(bad))
    assert code == 2
    assert "line 1" in err


# Scenario parser edge cases -------------------------------------------------

def test_parser_rejects_duplicates():
    base = "node A role=es snpa=020000000001\n"
    with pytest.raises(ScenarioError, match="duplicate node name"):
        parse_scenario(base + "node A role=es snpa=020000000002\n")
    with pytest.raises(ScenarioError, match="duplicate snpa"):
        parse_scenario(base + "node B role=es snpa=020000000001\n")


def test_parser_rejects_unknown_statement():
    with pytest.raises(ScenarioError, match="line 2"):
        parse_scenario("seed 1\nfrobnicate 3\n")


def test_parser_requires_is_net():
    with pytest.raises(ScenarioError, match="net="):
        parse_scenario("node R role=is snpa=020000000001\n")


def test_parser_action_unknown_node():
    with pytest.raises(ScenarioError, match="unknown node"):
        parse_scenario("at 5 down GHOST\n")


def test_parser_full_file():
    sc = parse_scenario(
        "node A role=es snpa=02:00:00:00:00:01 nsap=4900 ct=5 multiplier=3\n"
        "node R role=is snpa=020000000002 net=49ff start=7 profile=atn afi=47\n"
        "forward R prefix=49 net=48ff snpa=020000000003\n"
        "latency 2\nseed 11\nuntil 30\ndrop 2\ncorrupt 1 random random\n"
        "at 9 sendclnp A 4900 4901\n")
    assert sc.latency == 2 and sc.seed == 11 and sc.until == 30
    assert sc.nodes[0].config.holding_multiplier == 3
    assert sc.nodes[1].start == 7
    assert sc.nodes[1].config.validation_profile.atn
    assert sc.nodes[1].config.forwarding_table[0].prefix == b"\x49"
    assert sc.faults.drops == {2}
    assert sc.faults.corruptions == {1: (None, None)}
    assert sc.actions[0].kind == "sendclnp"
