"""PNMODEL v1 text serialization.

Line-oriented UTF-8 format, '#' starts a comment:

    PNMODEL v1
    m <int>
    names <comma-separated>            # optional
    norm <idx> <mean> <std>            # optional, per feature
    threshold <real>
    neuron <id> layer <int> in <ref> <ref> w <w0> <w1> <w2> <w3>
    output n<id>

A ref is ``f<idx>`` (feature) or ``n<id>`` (earlier neuron).  Reals are
written in shortest round-trip decimal form (Python repr).
"""

from __future__ import annotations

from .model import InputRef, Neuron, NetworkError, PolyNetwork, Weights4

__all__ = ["render_model", "parse_model", "ModelParseError"]

HEADER = "PNMODEL v1"


class ModelParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _fmt(x: float) -> str:
    return repr(float(x))


def render_model(net: PolyNetwork) -> str:
    lines = [HEADER, f"m {net.m}"]
    default_names = tuple(f"x{i+1}" for i in range(net.m))
    if tuple(net.feature_names) != default_names:
        lines.append("names " + ",".join(net.feature_names))
    if net.norm_stats is not None:
        for i, (mean, std) in enumerate(net.norm_stats):
            lines.append(f"norm {i} {_fmt(mean)} {_fmt(std)}")
    lines.append(f"threshold {_fmt(net.threshold)}")
    for j, neuron in enumerate(net.neurons):
        refs = " ".join(
            (f"f{r.index}" if r.kind == "feature" else f"n{r.index}")
            for r in neuron.inputs
        )
        w = neuron.weights
        lines.append(
            f"neuron {j} layer {neuron.layer} in {refs} "
            f"w {_fmt(w.w0)} {_fmt(w.w1)} {_fmt(w.w2)} {_fmt(w.w3)}"
        )
    lines.append(f"output n{net.output}")
    return "\n".join(lines) + "\n"


def _parse_real(tok: str, lineno: int, what: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ModelParseError(f"bad {what} value {tok!r}", lineno) from None


def _parse_int(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ModelParseError(f"bad {what} value {tok!r}", lineno) from None


def _parse_ref(tok: str, lineno: int, id_map: dict, m: int) -> InputRef:
    if len(tok) < 2 or tok[0] not in "fn":
        raise ModelParseError(f"bad input reference {tok!r}", lineno)
    idx = _parse_int(tok[1:], lineno, "reference index")
    if tok[0] == "f":
        if idx >= m:
            raise ModelParseError(f"dangling feature reference {tok!r} (m={m})", lineno)
        return InputRef.feature(idx)
    if idx not in id_map:
        raise ModelParseError(
            f"reference {tok!r} to an undefined or later neuron (cyclic or dangling)",
            lineno,
        )
    return InputRef.neuron(id_map[idx])


def parse_model(text: str) -> PolyNetwork:
    lines = text.splitlines()
    body = []
    for lineno, raw in enumerate(lines, start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            body.append((lineno, stripped))
    if not body:
        raise ModelParseError("empty model text")
    if body[0][1] != HEADER:
        raise ModelParseError(f"expected {HEADER!r} header", body[0][0])

    m = None
    names = None
    norm: dict = {}
    threshold = 0.5
    neurons: list = []
    id_map: dict = {}
    output_pos = None
    output_seen = False

    for lineno, line in body[1:]:
        toks = line.split()
        key = toks[0]
        if output_seen:
            raise ModelParseError("content after output line", lineno)
        if key == "m":
            if len(toks) != 2:
                raise ModelParseError("malformed m line", lineno)
            m = _parse_int(toks[1], lineno, "m")
            if m < 1:
                raise ModelParseError("m must be >= 1", lineno)
        elif key == "names":
            rest = line[len("names"):].strip()
            names = tuple(s.strip() for s in rest.split(","))
        elif key == "norm":
            if m is None:
                raise ModelParseError("norm before m", lineno)
            if len(toks) != 4:
                raise ModelParseError("malformed norm line", lineno)
            idx = _parse_int(toks[1], lineno, "norm index")
            if not 0 <= idx < m:
                raise ModelParseError(f"norm index {idx} out of range", lineno)
            norm[idx] = (
                _parse_real(toks[2], lineno, "norm mean"),
                _parse_real(toks[3], lineno, "norm std"),
            )
        elif key == "threshold":
            if len(toks) != 2:
                raise ModelParseError("malformed threshold line", lineno)
            threshold = _parse_real(toks[1], lineno, "threshold")
        elif key == "neuron":
            if m is None:
                raise ModelParseError("neuron before m", lineno)
            if (
                len(toks) != 12
                or toks[2] != "layer"
                or toks[4] != "in"
                or toks[7] != "w"
            ):
                raise ModelParseError("malformed neuron line", lineno)
            nid = _parse_int(toks[1], lineno, "neuron id")
            if nid in id_map:
                raise ModelParseError(f"duplicate neuron id {nid}", lineno)
            layer = _parse_int(toks[3], lineno, "layer")
            ref1 = _parse_ref(toks[5], lineno, id_map, m)
            ref2 = _parse_ref(toks[6], lineno, id_map, m)
            w = Weights4(
                _parse_real(toks[8], lineno, "weight"),
                _parse_real(toks[9], lineno, "weight"),
                _parse_real(toks[10], lineno, "weight"),
                _parse_real(toks[11], lineno, "weight"),
            )
            try:
                neurons.append(Neuron(inputs=(ref1, ref2), weights=w, layer=layer))
            except NetworkError as exc:
                raise ModelParseError(str(exc), lineno) from None
            id_map[nid] = len(neurons) - 1
        elif key == "output":
            if len(toks) != 2 or not toks[1].startswith("n"):
                raise ModelParseError("malformed output line", lineno)
            oid = _parse_int(toks[1][1:], lineno, "output id")
            if oid not in id_map:
                raise ModelParseError(f"output references unknown neuron n{oid}", lineno)
            output_pos = id_map[oid]
            output_seen = True
        else:
            raise ModelParseError(f"unknown key {key!r}", lineno)

    if m is None:
        raise ModelParseError("missing m line")
    if not neurons:
        raise ModelParseError("no output (model has no neurons)")
    if output_pos is None:
        raise ModelParseError("no output")
    if names is None:
        names = tuple(f"x{i+1}" for i in range(m))
    if len(names) != m:
        raise ModelParseError(f"names count {len(names)} != m {m}")
    norm_stats = None
    if norm:
        if set(norm) != set(range(m)):
            raise ModelParseError("norm lines must cover every feature or none")
        norm_stats = tuple(norm[i] for i in range(m))
    try:
        return PolyNetwork(
            m=m,
            feature_names=names,
            neurons=tuple(neurons),
            output=output_pos,
            threshold=threshold,
            norm_stats=norm_stats,
        )
    except NetworkError as exc:
        raise ModelParseError(str(exc)) from None
