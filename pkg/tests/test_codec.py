import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tracetrim import codec
from tracetrim.errors import ParseError
from tracetrim.model import ActivityType, ContextId, MessageId, RawActivityRecord, TupleRecord

RECEIVE_LINE = "RECEIVE 1500 web1 httpd 100 7 10.0.0.9:41000 10.0.0.1:80 800"
BEGIN_LINE = "BEGIN 1400 web1 httpd 100 7 - - 0"
WEB = ContextId("web1", "httpd", 100, 7)
CLIENT_MSG = MessageId("10.0.0.9", 41000, "10.0.0.1", 80)


def test_parse_receive_line():
    r = codec.parse_raw_line(RECEIVE_LINE)
    assert r == RawActivityRecord(ActivityType.RECEIVE, 1500, WEB, CLIENT_MSG, 800)


def test_parse_begin_line():
    assert codec.parse_raw_line(BEGIN_LINE) == RawActivityRecord(ActivityType.BEGIN, 1400, WEB)


def test_message_fields_on_begin_rejected():
    with pytest.raises(ParseError) as err:
        codec.parse_raw_line("BEGIN 1400 web1 httpd 100 7 10.0.0.9:41000 10.0.0.1:80 0", lineno=3)
    assert err.value.lineno == 3
    assert "line 3" in str(err.value)


@pytest.mark.parametrize("line, field", [
    ("RECEIVE 1500 web1 httpd 100 7 10.0.0.9:41000 10.0.0.1:80", "line"),
    ("RECEIVE x15 web1 httpd 100 7 10.0.0.9:41000 10.0.0.1:80 800", "timestamp"),
    ("RECEIVE 1500 web1 httpd 100 7 10.0.0.9:4x 10.0.0.1:80 800", "src"),
    ("RECEIVE 1500 web1 httpd 100 7 10.0.0.9:41000 10.0.0.1:99999 800", "dst"),
    ("RECEIVE 1500 web1 httpd 100 7 10.0.0.9:41000 10.0.0.1:80 -5", "size"),
    ("SEND 1500 web1 httpd 100 7 - - 10", "src"),
    ("END 1500 web1 httpd 100 7 - - 10", "size"),
    ("HELLO 1500 web1 httpd 100 7 - - 0", "type"),
    ("", "line"),
])
def test_parse_errors_name_field(line, field):
    with pytest.raises(ParseError) as err:
        codec.parse_raw_line(line, lineno=12)
    assert err.value.field == field
    assert err.value.lineno == 12


@pytest.mark.parametrize("line", [RECEIVE_LINE, BEGIN_LINE])
def test_raw_round_trip_reproduces_line(line):
    assert codec.serialize_raw(codec.parse_raw_line(line)) == line


def test_tuple_lines():
    r = codec.parse_tuple_line("42,RECEIVE,1500,web1,httpd,100,7,10.0.0.9,41000,10.0.0.1,80,800")
    assert r == TupleRecord(42, ActivityType.RECEIVE, 1500, WEB, CLIENT_MSG, 800)
    b = codec.parse_tuple_line("0,BEGIN,1400,web1,httpd,100,7,-,-,-,-,0")
    assert b == TupleRecord(0, ActivityType.BEGIN, 1400, WEB)
    for line in ("42,RECEIVE,1500,web1,httpd,100,7,10.0.0.9,41000,10.0.0.1,80,800",
                 "0,BEGIN,1400,web1,httpd,100,7,-,-,-,-,0"):
        assert codec.serialize_tuple(codec.parse_tuple_line(line)) == line


def test_tuple_partial_placeholders_rejected():
    with pytest.raises(ParseError):
        codec.parse_tuple_line("1,SEND,5,web1,httpd,100,7,-,41000,10.0.0.1,80,9", lineno=1)


def test_non_canonical_integers_rejected():
    with pytest.raises(ParseError):
        codec.parse_raw_line("BEGIN 01400 web1 httpd 100 7 - - 0")
    with pytest.raises(ParseError):
        codec.parse_raw_line("BEGIN " + "9" * 40 + " web1 httpd 100 7 - - 0")


def test_simulated_logs_round_trip(small_workload):
    records, _ = small_workload
    for recs in records.values():
        for r in recs:
            line = codec.serialize_raw(r)
            assert codec.parse_raw_line(line) == r
            assert codec.serialize_raw(codec.parse_raw_line(line)) == line


def test_file_byte_accounting(tmp_path, small_workload):
    records, _ = small_workload
    recs = records["web1"]
    written = codec.write_raw_log(tmp_path / "web1.log", recs)
    assert written == (tmp_path / "web1.log").stat().st_size
    assert written == codec.encoded_size(map(codec.serialize_raw, recs))
    assert codec.read_raw_log(tmp_path / "web1.log") == recs
    tuples = [TupleRecord.from_raw(r, i) for i, r in enumerate(recs)]
    written = codec.write_tuple_file(tmp_path / "web1.tup", tuples)
    assert written == codec.encoded_size(map(codec.serialize_tuple, tuples))
    assert codec.read_tuple_file(tmp_path / "web1.tup") == tuples


def test_file_errors_carry_line_numbers(tmp_path):
    p = tmp_path / "bad.log"
    p.write_text(BEGIN_LINE + "\n" + "END 1 web1 httpd 1 1 - -\n")
    with pytest.raises(ParseError) as err:
        codec.read_raw_log(p)
    assert err.value.lineno == 2


names = st.text(alphabet="abcdefghijklmnopqrstuvwxyz0123456789-_.", min_size=1, max_size=8)
ips = st.tuples(*[st.integers(0, 255)] * 4).map(lambda t: ".".join(map(str, t)))
ports = st.integers(0, 65535)


@st.composite
def records(draw):
    atype = draw(st.sampled_from(list(ActivityType)))
    ctx = ContextId(draw(names), draw(names), draw(st.integers(0, 2**31)), draw(st.integers(0, 2**31)))
    ts = draw(st.integers(0, 2**62))
    if atype.is_message:
        msg = MessageId(draw(ips), draw(ports), draw(ips), draw(ports))
        return RawActivityRecord(atype, ts, ctx, msg, draw(st.integers(0, 2**40)))
    return RawActivityRecord(atype, ts, ctx)


@given(records(), st.integers(0, 2**40))
@settings(max_examples=300)
def test_round_trip_property(rec, seq):
    assert codec.parse_raw_line(codec.serialize_raw(rec)) == rec
    t = TupleRecord.from_raw(rec, seq)
    assert codec.parse_tuple_line(codec.serialize_tuple(t)) == t


@given(st.text(max_size=80))
@settings(max_examples=300)
def test_arbitrary_text_never_crashes(text):
    for parse in (codec.parse_raw_line, codec.parse_tuple_line):
        try:
            parse(text, lineno=5)
        except ParseError as err:
            assert err.lineno == 5 and err.field


def test_random_mutations_give_positioned_errors():
    rng = random.Random(3)
    base = [RECEIVE_LINE, BEGIN_LINE]
    alphabet = " ,:-.0123456789abcXYZ\t"
    for i in range(2000):
        line = list(rng.choice(base))
        pos = rng.randrange(len(line))
        line[pos] = rng.choice(alphabet)
        text = "".join(line)
        try:
            rec = codec.parse_raw_line(text, lineno=i + 1)
        except ParseError as err:
            assert err.lineno == i + 1
        else:
            assert codec.parse_raw_line(codec.serialize_raw(rec)) == rec
