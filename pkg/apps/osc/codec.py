"""
OSC wire codec for the four game messages.

Decoding walks the datagram itself so that every failure carries a byte
offset and padding is checked strictly; numeric fields go through
python-osc's primitive readers once their length has been verified.
Encoding is plain python-osc message building.
"""
import logging
from dataclasses import dataclass, field

from pythonosc.osc_message_builder import OscMessageBuilder
from pythonosc.parsing import osc_types

from .exceptions import OscDecodeError
from .messages import TYPE_TAGS
from .serializers import MESSAGE_SCHEMAS

logger = logging.getLogger(__name__)

BUNDLE_PREFIX = b"#bundle\x00"
IMMEDIATELY = b"\x00" * 7 + b"\x01"
MAX_BUNDLE_DEPTH = 8


@dataclass(frozen=True)
class RawMessage:
    address: str
    type_tags: str
    args: tuple
    offset: int


@dataclass(frozen=True)
class Rejection:
    address: str
    offset: int
    reason: str


@dataclass
class DecodedPacket:
    messages: list = field(default_factory=list)
    rejected: list = field(default_factory=list)
    unknown: list = field(default_factory=list)


def _padded(n):
    return (n + 4) & ~3


def _read_string(data, index, base):
    try:
        end = data.index(b"\x00", index)
    except ValueError:
        raise OscDecodeError("unterminated string", base + index) from None
    next_index = index + _padded(end - index)
    if next_index > len(data):
        raise OscDecodeError("string padding runs past the end", base + end)
    if any(data[end:next_index]):
        raise OscDecodeError("non-zero string padding", base + end)
    try:
        value = data[index:end].decode("utf-8")
    except UnicodeDecodeError as exc:
        raise OscDecodeError(f"invalid utf-8 ({exc.reason})", base + index + exc.start) from None
    return value, next_index


def _read_word(data, index, base, reader, what):
    if len(data) - index < 4:
        raise OscDecodeError(f"truncated {what}", base + index)
    try:
        return reader(data, index)
    except osc_types.ParseError as exc:
        raise OscDecodeError(f"bad {what}: {exc}", base + index) from exc


def _parse_message(data, base):
    if not data.startswith(b"/"):
        raise OscDecodeError("address must start with '/'", base)
    address, index = _read_string(data, 0, base)
    if index >= len(data):
        raise OscDecodeError("missing type tag string", base + index)
    tag_offset = index
    tags, index = _read_string(data, index, base)
    if not tags.startswith(","):
        raise OscDecodeError("type tag string must start with ','", base + tag_offset)
    args = []
    for tag in tags[1:]:
        if tag == "s":
            value, index = _read_string(data, index, base)
        elif tag == "f":
            value, index = _read_word(data, index, base, osc_types.get_float, "float")
        elif tag == "i":
            value, index = _read_word(data, index, base, osc_types.get_int, "int32")
        elif tag in "TF":
            value = tag == "T"
        elif tag == "N":
            value = None
        else:
            raise OscDecodeError(f"unsupported type tag {tag!r}", base + tag_offset)
        args.append(value)
    if index != len(data):
        raise OscDecodeError("trailing bytes after arguments", base + index)
    return RawMessage(address, tags[1:], tuple(args), base)


def _walk(data, base=0, depth=0):
    if data.startswith(BUNDLE_PREFIX):
        if depth >= MAX_BUNDLE_DEPTH:
            raise OscDecodeError("bundles nested too deeply", base)
        if len(data) < 16:
            raise OscDecodeError("truncated bundle header", base)
        index = 16
        while index < len(data):
            size, body = _read_word(data, index, base, osc_types.get_int, "bundle element size")
            if size <= 0 or size % 4 or body + size > len(data):
                raise OscDecodeError(f"bad bundle element size {size}", base + index)
            yield from _walk(data[body:body + size], base + body, depth + 1)
            index = body + size
        return
    if len(data) % 4:
        raise OscDecodeError("message length is not a multiple of 4", base + len(data))
    yield _parse_message(data, base)


def decode_packet_report(dgram):
    """Decodes a datagram, keeping track of what was rejected or unknown."""
    dgram = bytes(dgram)
    if not dgram:
        raise OscDecodeError("empty datagram", 0)
    report = DecodedPacket()
    for raw in list(_walk(dgram)):
        schema = MESSAGE_SCHEMAS.get(raw.address)
        if schema is None:
            logger.warning("skipping unknown OSC address %r at byte %d", raw.address, raw.offset)
            report.unknown.append(raw.address)
            continue
        if raw.type_tags != TYPE_TAGS[raw.address]:
            report.rejected.append(
                Rejection(raw.address, raw.offset, f"expected ,{TYPE_TAGS[raw.address]} got ,{raw.type_tags}")
            )
            continue
        serializer_class, names = schema
        serializer = serializer_class(data=dict(zip(names, raw.args)))
        if not serializer.is_valid():
            report.rejected.append(Rejection(raw.address, raw.offset, str(serializer.errors)))
            continue
        report.messages.append(serializer.to_message())
    for rejection in report.rejected:
        logger.warning(
            "rejected %s at byte %d: %s", rejection.address, rejection.offset, rejection.reason
        )
    return report


def decode_packet(dgram):
    return decode_packet_report(dgram).messages


def encode_raw(address, args):
    """Builds one OSC message; known addresses coerce args to their declared tags."""
    builder = OscMessageBuilder(address=address)
    tags = TYPE_TAGS.get(address)
    if tags is not None and len(tags) != len(args):
        raise ValueError(f"{address} takes {len(tags)} arguments, got {len(args)}")
    for i, value in enumerate(args):
        if tags is None:
            builder.add_arg(value)
        elif tags[i] == "f":
            builder.add_arg(float(value), OscMessageBuilder.ARG_TYPE_FLOAT)
        else:
            builder.add_arg(str(value), OscMessageBuilder.ARG_TYPE_STRING)
    return builder.build().dgram


def encode_message(message):
    return encode_raw(message.address, message.osc_args())


def encode_bundle(elements, timetag=IMMEDIATELY):
    """Wraps already-encoded messages (or bundles) into one bundle."""
    parts = [BUNDLE_PREFIX, timetag]
    for element in elements:
        parts.append(osc_types.write_int(len(element)))
        parts.append(element)
    return b"".join(parts)
