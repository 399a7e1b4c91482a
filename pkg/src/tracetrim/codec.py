"""Line codecs for raw activity logs (space separated) and tuple files (CSV).

Raw line::

    <TYPE> <ts> <host> <program> <pid> <tid> <src_ip>:<src_port> <dst_ip>:<dst_port> <size>

Tuple line::

    <seq>,<TYPE>,<ts>,<host>,<program>,<pid>,<tid>,<src_ip>,<src_port>,<dst_ip>,<dst_port>,<size>

BEGIN/END carry ``-`` in the endpoint fields. Integers must be canonical
decimals so that ``serialize(parse(line)) == line`` for every accepted line.
"""

from __future__ import annotations

import os
from typing import Iterable, Iterator, Optional

from .errors import InvalidInputError, ParseError
from .model import ActivityType, ContextId, MessageId, RawActivityRecord, TupleRecord, is_ipv4

PLACEHOLDER = "-"
MAX_DIGITS = 19
RAW_FIELDS = ("type", "timestamp", "hostname", "program", "pid", "tid", "src", "dst", "size")
TUPLE_FIELDS = (
    "seq", "type", "timestamp", "hostname", "program", "pid", "tid",
    "src_ip", "src_port", "dst_ip", "dst_port", "size",
)

_TYPES = {t.value: t for t in ActivityType}


def _uint(text: str, field: str, lineno, line, *, maximum: Optional[int] = None) -> int:
    if not text.isascii() or not text.isdigit() or (len(text) > 1 and text[0] == "0"):
        raise ParseError(f"expected a non-negative integer, got {text!r}", field=field, lineno=lineno, line=line)
    if len(text) > MAX_DIGITS:
        raise ParseError(f"integer longer than {MAX_DIGITS} digits", field=field, lineno=lineno, line=line)
    value = int(text)
    if maximum is not None and value > maximum:
        raise ParseError(f"{value} exceeds {maximum}", field=field, lineno=lineno, line=line)
    return value


def _atype(text: str, lineno, line) -> ActivityType:
    try:
        return _TYPES[text]
    except KeyError:
        raise ParseError(f"unknown activity type {text!r}", field="type", lineno=lineno, line=line) from None


def _ip(text: str, field: str, lineno, line) -> str:
    if not is_ipv4(text):
        raise ParseError(f"not a canonical IPv4 address: {text!r}", field=field, lineno=lineno, line=line)
    return text


def _name(text: str, field: str, lineno, line) -> str:
    if not text or "," in text:
        raise ParseError(f"invalid name {text!r}", field=field, lineno=lineno, line=line)
    return text


def _strip_eol(line: str) -> str:
    if line.endswith("\n"):
        line = line[:-1]
        if line.endswith("\r"):
            line = line[:-1]
    return line


def _build(atype, ctx_parts, endpoints, size, field_prefix, lineno, line):
    """Shared tail of both decoders: message presence rules and construction."""
    try:
        ctx = ContextId(*ctx_parts)
    except InvalidInputError as exc:
        raise ParseError(str(exc), field="context", lineno=lineno, line=line) from None
    if atype.is_message:
        if endpoints is None:
            raise ParseError(f"{atype.value} requires endpoints", field=field_prefix, lineno=lineno, line=line)
        msg = MessageId(*endpoints)
    else:
        if endpoints is not None:
            raise ParseError(f"{atype.value} must use '-' endpoints", field=field_prefix, lineno=lineno, line=line)
        if size != 0:
            raise ParseError(f"{atype.value} must have size 0", field="size", lineno=lineno, line=line)
        msg = None
    return ctx, msg


def parse_raw_line(line: str, lineno: Optional[int] = None) -> RawActivityRecord:
    text = _strip_eol(line)
    parts = text.split()
    if len(parts) != 9:
        raise ParseError(f"expected 9 fields, got {len(parts)}", field="line", lineno=lineno, line=line)
    atype = _atype(parts[0], lineno, line)
    ts = _uint(parts[1], "timestamp", lineno, line)
    host = _name(parts[2], "hostname", lineno, line)
    prog = _name(parts[3], "program", lineno, line)
    pid = _uint(parts[4], "pid", lineno, line)
    tid = _uint(parts[5], "tid", lineno, line)
    src, dst = parts[6], parts[7]
    if src == PLACEHOLDER and dst == PLACEHOLDER:
        endpoints = None
    else:
        src_ip, src_port = _endpoint(src, "src", lineno, line)
        dst_ip, dst_port = _endpoint(dst, "dst", lineno, line)
        endpoints = (src_ip, src_port, dst_ip, dst_port)
    size = _uint(parts[8], "size", lineno, line)
    ctx, msg = _build(atype, (host, prog, pid, tid), endpoints, size, "src", lineno, line)
    return RawActivityRecord(atype, ts, ctx, msg, size)


def _endpoint(text: str, field: str, lineno, line) -> tuple[str, int]:
    ip, sep, port = text.rpartition(":")
    if not sep:
        raise ParseError(f"expected <ip>:<port>, got {text!r}", field=field, lineno=lineno, line=line)
    return _ip(ip, field, lineno, line), _uint(port, field, lineno, line, maximum=65535)


def _format_endpoints_raw(msg: Optional[MessageId]) -> str:
    if msg is None:
        return "- -"
    return f"{msg.src_ip}:{msg.src_port} {msg.dst_ip}:{msg.dst_port}"


def serialize_raw(record: RawActivityRecord) -> str:
    c = record.ctx
    return (
        f"{record.atype.value} {record.timestamp_ns} {c.hostname} {c.program} {c.pid} {c.tid} "
        f"{_format_endpoints_raw(record.msg)} {record.size_bytes}"
    )


def parse_tuple_line(line: str, lineno: Optional[int] = None) -> TupleRecord:
    text = _strip_eol(line)
    parts = text.split(",")
    if len(parts) != 12:
        raise ParseError(f"expected 12 fields, got {len(parts)}", field="line", lineno=lineno, line=line)
    seq = _uint(parts[0], "seq", lineno, line)
    atype = _atype(parts[1], lineno, line)
    ts = _uint(parts[2], "timestamp", lineno, line)
    host = _name(parts[3], "hostname", lineno, line)
    prog = _name(parts[4], "program", lineno, line)
    if any(ch.isspace() for ch in host):
        raise ParseError("whitespace in hostname", field="hostname", lineno=lineno, line=line)
    if any(ch.isspace() for ch in prog):
        raise ParseError("whitespace in program", field="program", lineno=lineno, line=line)
    pid = _uint(parts[5], "pid", lineno, line)
    tid = _uint(parts[6], "tid", lineno, line)
    ep = parts[7:11]
    if all(p == PLACEHOLDER for p in ep):
        endpoints = None
    else:
        endpoints = (
            _ip(ep[0], "src_ip", lineno, line),
            _uint(ep[1], "src_port", lineno, line, maximum=65535),
            _ip(ep[2], "dst_ip", lineno, line),
            _uint(ep[3], "dst_port", lineno, line, maximum=65535),
        )
    size = _uint(parts[11], "size", lineno, line)
    ctx, msg = _build(atype, (host, prog, pid, tid), endpoints, size, "src_ip", lineno, line)
    return TupleRecord(seq, atype, ts, ctx, msg, size)


def serialize_tuple(record: TupleRecord) -> str:
    c = record.ctx
    m = record.msg
    ep = "-,-,-,-" if m is None else f"{m.src_ip},{m.src_port},{m.dst_ip},{m.dst_port}"
    return (
        f"{record.seq},{record.atype.value},{record.timestamp_ns},{c.hostname},{c.program},"
        f"{c.pid},{c.tid},{ep},{record.size_bytes}"
    )


def iter_raw_lines(lines: Iterable[str]) -> Iterator[RawActivityRecord]:
    for lineno, line in enumerate(lines, start=1):
        yield parse_raw_line(line, lineno)


def iter_tuple_lines(lines: Iterable[str]) -> Iterator[TupleRecord]:
    for lineno, line in enumerate(lines, start=1):
        yield parse_tuple_line(line, lineno)


def read_raw_log(path: str | os.PathLike) -> list[RawActivityRecord]:
    with open(path, encoding="utf-8", newline="\n") as fh:
        return list(iter_raw_lines(fh))


def read_tuple_file(path: str | os.PathLike) -> list[TupleRecord]:
    with open(path, encoding="utf-8", newline="\n") as fh:
        return list(iter_tuple_lines(fh))


def _write_lines(path, lines: Iterable[str]) -> int:
    data = "".join(f"{line}\n" for line in lines).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(data)
    return len(data)


def write_raw_log(path: str | os.PathLike, records: Iterable[RawActivityRecord]) -> int:
    """Write one line per record; returns the number of bytes written."""
    return _write_lines(path, map(serialize_raw, records))


def write_tuple_file(path: str | os.PathLike, records: Iterable[TupleRecord]) -> int:
    return _write_lines(path, map(serialize_tuple, records))


def encoded_size(lines: Iterable[str]) -> int:
    """Bytes the lines occupy on disk, newline included."""
    return sum(len(line.encode("utf-8")) + 1 for line in lines)

