import pytest

from esis.engine import ALL_ES, BROADCAST, Frame, NodeConfig, Role
from esis.sim import FaultPlan, Simulator, UnknownNode

NSAP1 = b"\x49\x01" + bytes(18)
NSAP2 = b"\x49\x02" + bytes(18)
NET = b"\x49\xff" + bytes(18)
S1 = bytes.fromhex("020000000001")
S2 = bytes.fromhex("020000000002")
S3 = bytes.fromhex("0200000000ff")


def es_config(snpa, nsap, ct=10):
    return NodeConfig(role=Role.END_SYSTEM, snpa=snpa, local_nsaps=(nsap,),
                      configuration_timer=ct)


def is_config(snpa, ct=10):
    return NodeConfig(role=Role.INTERMEDIATE_SYSTEM, snpa=snpa, local_net=NET,
                      configuration_timer=ct)


def three_node_sim(start=0, **kw):
    # start=1000 keeps the nodes' own hellos out of frame-level tests
    sim = Simulator(**kw)
    sim.add_node("ES1", es_config(S1, NSAP1), start=start)
    sim.add_node("ES2", es_config(S2, NSAP2), start=start)
    sim.add_node("IS1", is_config(S3), start=start)
    return sim


def recv_lines(log):
    return [l for l in log if " RECV " in l]


def test_empty_schedule_empty_log():
    sim = Simulator()
    assert sim.run_until(100) == []


def test_unicast_delivers_once():
    sim = three_node_sim(start=1000, )
    sim.transmit(Frame(S2, S1, b"\x55"), 0, "ES1")
    log = sim.run_until(2)
    assert len(recv_lines(log)) == 1
    assert "node=ES2 RECV" in recv_lines(log)[0]


def test_group_delivery_excludes_sender():
    sim = three_node_sim(start=1000, )
    sim.transmit(Frame(ALL_ES, S1, b"\x55"), 0, "ES1")
    log = sim.run_until(2)
    got = recv_lines(log)
    assert len(got) == 1 and "node=ES2" in got[0]

    sim = three_node_sim(start=1000)
    sim.transmit(Frame(BROADCAST, S1, b"\x55"), 0, "ES1")
    assert len(recv_lines(sim.run_until(2))) == 2


def test_drop_rule_suppresses_delivery():
    sim = three_node_sim(start=1000, faults=FaultPlan(drops={1}))
    sim.transmit(Frame(S2, S1, b"\x55"), 0, "ES1")
    log = sim.run_until(2)
    assert any(" SEND " in l for l in log)
    assert recv_lines(log) == []


def test_corruption_mutates_payload():
    sim = three_node_sim(start=1000, faults=FaultPlan(corruptions={1: (0, 0x99)}))
    sim.transmit(Frame(S2, S1, b"\x55\x66"), 0, "ES1")
    log = sim.run_until(2)
    assert "payload=9966" in recv_lines(log)[0]


def test_random_corruption_changes_an_octet():
    sim = three_node_sim(start=1000, seed=3, faults=FaultPlan(corruptions={1: (None, None)}))
    sim.transmit(Frame(S2, S1, b"\x55\x66"), 0, "ES1")
    payload = recv_lines(sim.run_until(2))[0].split("payload=")[1]
    assert payload != "5566"


def test_periodic_hellos():
    sim = Simulator()
    sim.add_node("ES1", es_config(S1, NSAP1, ct=10))
    sim.add_node("IS1", is_config(S3, ct=10))
    log = sim.run_until(25)
    es_sends = [l for l in log if "node=ES1 SEND" in l]
    is_sends = [l for l in log if "node=IS1 SEND" in l]
    assert len(es_sends) >= 2 and len(is_sends) >= 2


def test_time_never_decreases():
    sim = three_node_sim()
    log = sim.run_until(40)
    times = [int(l.split()[0][2:]) for l in log]
    assert times == sorted(times)


def test_determinism():
    def run():
        sim = three_node_sim(seed=9, faults=FaultPlan(corruptions={2: (None, None)}))
        sim.inject_clnp(5, "ES1", NSAP1, NSAP2)
        sim.inject_down(12, "ES2")
        sim.inject_up(18, "ES2")
        return sim.run_until(30), sim.dump_ribs()
    assert run() == run()


def test_down_node_receives_and_sends_nothing():
    sim = three_node_sim()
    sim.inject_down(1, "ES2")
    log = sim.run_until(15)
    late = [l for l in log if int(l.split()[0][2:]) >= 1]
    assert not any("node=ES2" in l for l in late)


def test_up_resumes_hellos():
    sim = three_node_sim()
    sim.inject_down(0, "ES2")
    sim.inject_up(14, "ES2")
    log = sim.run_until(20)
    assert any("node=ES2 SEND" in l and l.startswith("t=14 ") for l in log)


def test_inject_unknown_node():
    sim = three_node_sim()
    with pytest.raises(UnknownNode):
        sim.inject_down(0, "nope")
    with pytest.raises(UnknownNode):
        sim.inject_clnp(0, "nope", NSAP1, NSAP2)


def test_run_backwards_rejected():
    sim = three_node_sim()
    sim.run_until(10)
    with pytest.raises(ValueError):
        sim.run_until(5)


def test_duplicate_node_name_rejected():
    sim = Simulator()
    sim.add_node("A", es_config(S1, NSAP1))
    with pytest.raises(ValueError):
        sim.add_node("A", es_config(S2, NSAP2))


def test_corrupted_hello_is_discarded_not_recorded():
    # Corrupt an address octet of ES1's first hello toward the IS group.
    # IS1 must discard it on checksum grounds and learn nothing from it;
    # it only learns ES1 one tick later, from the ISH-triggered reply.
    sim = three_node_sim(faults=FaultPlan(corruptions={1: (12, None)}))
    log = sim.run_until(2)
    es1_nsap = NSAP1.hex()
    by_time = lambda t: [l for l in log if l.startswith(f"t={t} ")]
    assert any("node=IS1 DISCARD ChecksumError" in l for l in by_time(1))
    assert not any("node=IS1 RIB" in l and es1_nsap in l for l in by_time(1))
    assert any("node=IS1 RIB" in l and es1_nsap in l for l in by_time(2))
    # The uncorrupted hellos still land normally.
    assert any("node=IS1 RIB" in l and NSAP2.hex() in l for l in by_time(1))
