"""Line-oriented text format for power-law reaction networks.

::

    # comment
    species A B C                 (optional; otherwise order of appearance)
    reaction r1: A + 2 B -> C
    kinetics r1: A=1, B=0.5       (unlisted species have order 0)
    rate r1: 2.5                  (optional, all reactions or none)
    block b1: r1, r2              (optional decomposition)

``0`` denotes the zero complex. Decimals are read as exact rationals. A
reaction without a kinetics line gets mass-action orders.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .linalg import Matrix
from .network import Network, NetworkError, _fmt_number, build_network, format_complex

_IDENT = r"[A-Za-z_][A-Za-z0-9_.']*"
_TERM = re.compile(rf"^(?:(?P<coef>[0-9][0-9./eE+-]*)\s*\*?\s*)?(?P<sp>{_IDENT})$")
_LABEL = re.compile(rf"^{_IDENT}$|^[0-9]+$")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass
class CRNDocument:
    network: Network
    F: Matrix
    rates: tuple[float, ...] | None = None
    blocks: list[tuple[str, list[str]]] = field(default_factory=list)
    mass_action_default: tuple[str, ...] = ()  # reactions that had no kinetics line


def _number(text: str, line: int, col: int) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"invalid number {text.strip()!r}", line, col) from None


def _combo(text: str, line: int, col: int) -> dict[str, Fraction]:
    text = text.strip()
    if text == "0":
        return {}
    if not text:
        raise ParseError("empty complex (write 0 for the zero complex)", line, col)
    out: dict[str, Fraction] = {}
    offset = 0
    for part in text.split("+"):
        m = _TERM.match(part.strip())
        here = col + offset + (len(part) - len(part.lstrip()))
        if not m:
            raise ParseError(f"cannot read term {part.strip()!r}", line, here)
        c = _number(m["coef"], line, here) if m["coef"] else Fraction(1)
        if c < 0:
            raise ParseError("stoichiometric coefficients must be nonnegative", line, here)
        out[m["sp"]] = out.get(m["sp"], Fraction(0)) + c
        offset += len(part) + 1
    return out


def _split_header(body: str, keyword: str, line: int, col: int) -> tuple[str, str, int]:
    if ":" not in body:
        raise ParseError(f"expected '{keyword} <label>: ...'", line, col)
    head, rest = body.split(":", 1)
    label = head.strip()
    if not _LABEL.match(label):
        raise ParseError(f"invalid label {label!r}", line, col)
    return label, rest, col + len(head) + 1


def parse_crn(text: str) -> CRNDocument:
    declared: list[str] | None = None
    reactions: list[tuple[str, dict, dict, int]] = []
    kinetics: dict[str, tuple[dict[str, Fraction], int]] = {}
    rates: dict[str, tuple[Fraction, int]] = {}
    blocks: list[tuple[str, list[str], int]] = []

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        kw, _, body = line.strip().partition(" ")
        col = indent + len(kw) + 2
        if kw == "species":
            if declared is not None:
                raise ParseError("species declared twice", lineno, indent + 1)
            declared = body.split()
            for s in declared:
                if not re.fullmatch(_IDENT, s):
                    raise ParseError(f"invalid species id {s!r}", lineno, col)
        elif kw == "reaction":
            label, rest, c2 = _split_header(body, kw, lineno, col)
            if any(label == r[0] for r in reactions):
                raise ParseError(f"duplicate reaction label {label!r}", lineno, col)
            if "->" not in rest:
                raise ParseError("expected '->'", lineno, c2)
            lhs, rhs = rest.split("->", 1)
            if "->" in rhs:
                raise ParseError("more than one '->'", lineno, c2)
            reactions.append((label, _combo(lhs, lineno, c2), _combo(rhs, lineno, c2 + len(lhs) + 2), lineno))
        elif kw == "kinetics":
            label, rest, c2 = _split_header(body, kw, lineno, col)
            if label in kinetics:
                raise ParseError(f"kinetics for {label} given twice", lineno, col)
            orders: dict[str, Fraction] = {}
            for item in filter(None, (x.strip() for x in rest.split(","))):
                if "=" not in item:
                    raise ParseError(f"expected species=value, got {item!r}", lineno, c2)
                sp, val = (x.strip() for x in item.split("=", 1))
                if not re.fullmatch(_IDENT, sp):
                    raise ParseError(f"invalid species id {sp!r}", lineno, c2)
                if sp in orders:
                    raise ParseError(f"order of {sp} given twice", lineno, c2)
                orders[sp] = _number(val, lineno, c2)
            kinetics[label] = (orders, lineno)
        elif kw == "rate":
            label, rest, c2 = _split_header(body, kw, lineno, col)
            if label in rates:
                raise ParseError(f"rate for {label} given twice", lineno, col)
            k = _number(rest, lineno, c2)
            if k <= 0:
                raise ParseError("rate constants must be positive", lineno, c2)
            rates[label] = (k, lineno)
        elif kw == "block":
            name, rest, c2 = _split_header(body, kw, lineno, col)
            members = [x.strip() for x in rest.split(",") if x.strip()]
            if not members:
                raise ParseError("empty block", lineno, c2)
            blocks.append((name, members, lineno))
        else:
            raise ParseError(f"unknown keyword {kw!r}", lineno, indent + 1)

    if not reactions:
        raise ParseError("no reactions", max(1, len(text.splitlines())))

    if declared is None:
        seen: dict[str, None] = {}
        for _, a, b, _ in reactions:
            for s in list(a) + list(b):
                seen.setdefault(s, None)
        species = list(seen)
        if not species:
            raise ParseError("cannot infer species from reactions; add a species line", reactions[0][3])
    else:
        species = declared
    sset = set(species)
    for label, a, b, ln in reactions:
        for s in list(a) + list(b):
            if s not in sset:
                raise ParseError(f"undeclared species {s!r}", ln)

    vecs: dict[tuple, int] = {}
    rx = []
    for label, a, b, ln in reactions:
        ends = []
        for combo in (a, b):
            v = tuple(combo.get(s, Fraction(0)) for s in species)
            ends.append(vecs.setdefault(v, len(vecs)))
        rx.append((label, ends[0], ends[1]))
    try:
        net = build_network(species, list(vecs), rx)
    except NetworkError as exc:
        bad = next((ln for lab, _, _, ln in reactions if lab in str(exc)), reactions[0][3])
        raise ParseError(str(exc), bad) from None

    labels = set(net.labels)
    for lab, (_, ln) in kinetics.items():
        if lab not in labels:
            raise ParseError(f"kinetics for unknown reaction {lab!r}", ln)
    for lab, (_, ln) in rates.items():
        if lab not in labels:
            raise ParseError(f"rate for unknown reaction {lab!r}", ln)
    rows = []
    defaulted = []
    for j, q in enumerate(net.reactions):
        if q.label in kinetics:
            orders, ln = kinetics[q.label]
            for s in orders:
                if s not in sset:
                    raise ParseError(f"kinetics refers to unknown species {s!r}", ln)
            rows.append([orders.get(s, Fraction(0)) for s in species])
        else:
            defaulted.append(q.label)
            rows.append(list(net.complexes[q.reactant]))
    F = Matrix.from_rows(rows, cols=net.m)

    rate_vec = None
    if rates:
        missing = [q.label for q in net.reactions if q.label not in rates]
        if missing:
            raise ParseError(f"rates missing for {', '.join(missing)}", min(ln for _, ln in rates.values()))
        rate_vec = tuple(float(rates[q.label][0]) for q in net.reactions)

    names = set()
    for name, members, ln in blocks:
        if name in names:
            raise ParseError(f"block {name!r} defined twice", ln)
        names.add(name)
        for mlab in members:
            if mlab not in labels:
                raise ParseError(f"block refers to unknown reaction {mlab!r}", ln)
    return CRNDocument(net, F, rate_vec, [(n, m) for n, m, _ in blocks], tuple(defaulted))


def read_crn(path: str | Path) -> CRNDocument:
    return parse_crn(Path(path).read_text())


def parse_blocks(text: str) -> list[tuple[str, list[str]]]:
    """Block lines only (a decomposition file)."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kw, _, body = line.partition(" ")
        if kw != "block":
            raise ParseError(f"expected a block line, got {kw!r}", lineno)
        name, rest, _ = _split_header(body, kw, lineno, len(kw) + 2)
        members = [x.strip() for x in rest.split(",") if x.strip()]
        if not members:
            raise ParseError("empty block", lineno)
        out.append((name, members))
    if not out:
        raise ParseError("no blocks", 1)
    return out


def parse_points(text: str, species: tuple[str, ...]) -> list[list[float]]:
    """One point per line as ``X=value, Y=value``; every species must be given."""
    pts = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        vals: dict[str, float] = {}
        for item in filter(None, (x.strip() for x in line.split(","))):
            if "=" not in item:
                raise ParseError(f"expected species=value, got {item!r}", lineno)
            sp, val = (x.strip() for x in item.split("=", 1))
            if sp not in species:
                raise ParseError(f"unknown species {sp!r}", lineno)
            try:
                vals[sp] = float(val)
            except ValueError:
                raise ParseError(f"invalid number {val!r}", lineno) from None
        missing = [s for s in species if s not in vals]
        if missing:
            raise ParseError(f"point misses {', '.join(missing)}", lineno)
        if any(v <= 0 for v in vals.values()):
            raise ParseError("concentrations must be strictly positive", lineno)
        pts.append([vals[s] for s in species])
    if not pts:
        raise ParseError("no points", 1)
    return pts


def _render_combo(vec, species) -> str:
    return format_complex(vec, species)


def render_crn(doc: CRNDocument) -> str:
    net, F = doc.network, doc.F
    lines = ["species " + " ".join(net.species)]
    for q in net.reactions:
        lines.append(f"reaction {q.label}: {_render_combo(net.complexes[q.reactant], net.species)}"
                     f" -> {_render_combo(net.complexes[q.product], net.species)}")
    for j, q in enumerate(net.reactions):
        orders = ", ".join(f"{s}={_fmt_number(x)}" for s, x in zip(net.species, F.row(j)) if x != 0)
        lines.append(f"kinetics {q.label}: {orders}".rstrip())
    if doc.rates is not None:
        for q, k in zip(net.reactions, doc.rates):
            lines.append(f"rate {q.label}: {k!r}")
    for name, members in doc.blocks:
        lines.append(f"block {name}: {', '.join(members)}")
    return "\n".join(lines) + "\n"


def documents_equal(a: CRNDocument, b: CRNDocument) -> bool:
    """Same content up to the internal numbering of complexes."""
    na, nb = a.network, b.network

    def ends(net):
        return [(q.label, net.complexes[q.reactant], net.complexes[q.product]) for q in net.reactions]

    return (
        na.species == nb.species
        and ends(na) == ends(nb)
        and a.F == b.F
        and a.rates == b.rates
        and a.blocks == b.blocks
    )


FIXTURES = ("schmitz.crn", "schmitz_sub.crn", "example4.crn", "example5.crn", "example6.crn")


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("plkdecomp") / "fixtures" / name))


def load_fixture(name: str) -> CRNDocument:
    return read_crn(fixture_path(name))
