"""Line-oriented text formats for algebras, relations, homs, congruences, certificates.

All formats are UTF-8 with '#' starting a comment line.  Operation tables
list whitespace-separated values in lexicographic argument order, first
argument most significant; values may wrap onto continuation lines, the
parser reads tokens until the expected count is reached.  Every serializer
output re-parses to an equal value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    Congruence,
    FiniteAlgebra,
    Homomorphism,
    Operation,
    ParseError,
    Relation,
    power_algebra,
)
from .affine import AffineTerm, TernaryTermOperation
from .entailment import (
    EntailmentCertificate,
    GraphToOperation,
    Intersection,
    Premise,
    StripPadding,
    TermPreimage,
    TermTree,
    certificate_premises,
)


@dataclass
class Document:
    """Everything parsed from one text input, in order of appearance."""

    algebras: dict = field(default_factory=dict)
    relations: list = field(default_factory=list)  # (name, algebra_name, Relation)
    homs: list = field(default_factory=list)  # (name, Homomorphism)
    congruences: list = field(default_factory=list)  # (name, algebra_name, Congruence)
    certificates: list = field(default_factory=list)  # (name, algebra_name, cert)


class _Lines:
    def __init__(self, text, source):
        self.source = source
        self.rows = []
        for i, raw in enumerate(text.splitlines(), start=1):
            stripped = raw.split("#", 1)[0].rstrip()
            if stripped.strip():
                indent = len(stripped) - len(stripped.lstrip())
                self.rows.append((i, indent, stripped.split()))
        self.pos = 0

    def peek(self):
        return self.rows[self.pos] if self.pos < len(self.rows) else None

    def next(self):
        row = self.peek()
        if row is None:
            raise ParseError("unexpected end of input", self.source, 0)
        self.pos += 1
        return row

    def error(self, message, line, token=""):
        raise ParseError(message, self.source, line, token)


def _read_ints(lines, count, line_no, what):
    """Collect `count` integers, consuming continuation rows as needed."""
    out = []
    row = lines.rows[lines.pos - 1]
    pending = list(row[2])
    while len(out) < count:
        while not pending:
            nxt = lines.peek()
            if nxt is None:
                lines.error(f"{what}: expected {count} values, got {len(out)}", line_no)
            lines.next()
            pending = list(nxt[2])
        tok = pending.pop(0)
        try:
            out.append(int(tok))
        except ValueError:
            lines.error(f"{what}: not an integer", line_no, tok)
    if pending:
        lines.error(f"{what}: {len(pending)} surplus values", line_no, pending[0])
    return out


def parse_document(text, source="<input>", known=None) -> Document:
    """Parse a multi-block document; `known` supplies already-loaded algebras."""
    doc = Document()
    if known:
        doc.algebras.update(known)
    lines = _Lines(text, source)
    while lines.peek() is not None:
        line_no, indent, toks = lines.next()
        if indent != 0:
            lines.error("unexpected indentation at top level", line_no, toks[0])
        head = toks[0]
        if head == "algebra":
            _parse_algebra(lines, doc, line_no, toks)
        elif head == "relation":
            _parse_relation(lines, doc, line_no, toks)
        elif head == "hom":
            _parse_hom(lines, doc, line_no, toks)
        elif head == "cong":
            _parse_cong(lines, doc, line_no, toks)
        elif head == "cert":
            _parse_cert(lines, doc, line_no, toks)
        else:
            lines.error("unknown block", line_no, head)
    return doc


def _algebra_for(doc, lines, name, line_no):
    if name not in doc.algebras:
        lines.error("unknown algebra", line_no, name)
    return doc.algebras[name]


def _parse_algebra(lines, doc, line_no, toks):
    if len(toks) != 2:
        lines.error("expected: algebra NAME", line_no, " ".join(toks))
    name = toks[1]
    row = lines.next()
    if row[2][0] != "size" or len(row[2]) != 2:
        lines.error("expected: size N", row[0], " ".join(row[2]))
    try:
        size = int(row[2][1])
    except ValueError:
        lines.error("size must be an integer", row[0], row[2][1])
    ops = []
    while lines.peek() is not None and lines.peek()[2][0] == "op":
        op_line, _, op_toks = lines.next()
        if len(op_toks) != 3:
            lines.error("expected: op NAME ARITY", op_line, " ".join(op_toks))
        try:
            arity = int(op_toks[2])
        except ValueError:
            lines.error("arity must be an integer", op_line, op_toks[2])
        lines.next()  # first value row
        values = _read_ints(lines, size**arity, op_line, f"table of {op_toks[1]}")
        try:
            ops.append(Operation(op_toks[1], arity, size, values))
        except ValueError as e:
            lines.error(str(e), op_line)
    try:
        doc.algebras[name] = FiniteAlgebra(name, size, ops)
    except ValueError as e:
        lines.error(str(e), line_no)


def _parse_relation(lines, doc, line_no, toks):
    if len(toks) != 5 or toks[3] != "over":
        lines.error("expected: relation NAME ARITY over ALGEBRA", line_no, " ".join(toks))
    name = toks[1]
    try:
        arity = int(toks[2])
    except ValueError:
        lines.error("arity must be an integer", line_no, toks[2])
    A = _algebra_for(doc, lines, toks[4], line_no)
    tuples = []
    while lines.peek() is not None and lines.peek()[2][0] == "t":
        row_line, _, row = lines.next()
        if len(row) != arity + 1:
            lines.error(f"tuple needs {arity} entries", row_line, " ".join(row[1:]))
        try:
            tuples.append(tuple(int(v) for v in row[1:]))
        except ValueError:
            lines.error("tuple entries must be integers", row_line)
    try:
        doc.relations.append((name, toks[4], Relation(arity, A.size, tuples)))
    except ValueError as e:
        lines.error(str(e), line_no)


def _parse_hom(lines, doc, line_no, toks):
    if len(toks) != 8 or toks[2] != "from" or toks[4] != "power" or toks[6] != "to":
        lines.error(
            "expected: hom NAME from ALGEBRA power N to ALGEBRA", line_no, " ".join(toks)
        )
    base = _algebra_for(doc, lines, toks[3], line_no)
    cod = _algebra_for(doc, lines, toks[7], line_no)
    try:
        n = int(toks[5])
    except ValueError:
        lines.error("power must be an integer", line_no, toks[5])
    domain = base if n == 1 else power_algebra(base, n)
    row = lines.next()
    if row[2][0] != "m":
        lines.error("expected a mapping row starting with m", row[0], row[2][0])
    values = list(row[2][1:])
    while len(values) < domain.size:
        nxt = lines.peek()
        if nxt is None:
            lines.error(f"mapping: expected {domain.size} values", row[0])
        lines.next()
        values.extend(nxt[2])
    if len(values) > domain.size:
        lines.error("mapping has surplus values", row[0], values[domain.size])
    try:
        mapping = [int(v) for v in values]
    except ValueError:
        lines.error("mapping entries must be integers", row[0])
    try:
        doc.homs.append((toks[1], Homomorphism(domain, cod, mapping)))
    except ValueError as e:
        lines.error(str(e), line_no)


def _parse_cong(lines, doc, line_no, toks):
    if len(toks) != 4 or toks[2] != "over":
        lines.error("expected: cong NAME over ALGEBRA", line_no, " ".join(toks))
    A = _algebra_for(doc, lines, toks[3], line_no)
    classes = []
    while lines.peek() is not None and lines.peek()[2][0] == "class":
        row_line, _, row = lines.next()
        try:
            classes.append([int(v) for v in row[1:]])
        except ValueError:
            lines.error("class entries must be integers", row_line)
    try:
        doc.congruences.append((toks[1], toks[3], Congruence.from_classes(A.size, classes)))
    except ValueError as e:
        lines.error(str(e), line_no)


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------


def _parse_sexpr(tokens, lines, line_no):
    if not tokens:
        lines.error("empty term expression", line_no)
    tok = tokens.pop(0)
    if tok != "(":
        lines.error("expected (", line_no, tok)
    head = tokens.pop(0)
    if head == "proj":
        idx = int(tokens.pop(0))
        if tokens.pop(0) != ")":
            lines.error("expected )", line_no)
        return ("proj", idx)
    children = []
    while tokens and tokens[0] == "(":
        children.append(_parse_sexpr(tokens, lines, line_no))
    if not tokens or tokens.pop(0) != ")":
        lines.error("expected )", line_no)
    return (head, tuple(children))


def _serialize_sexpr(expr):
    if expr[0] == "proj":
        return f"( proj {expr[1]} )"
    name, children = expr
    inner = " ".join(_serialize_sexpr(c) for c in children)
    return f"( {name} {inner} )".replace("  ", " ")


def _parse_cert(lines, doc, line_no, toks):
    if len(toks) != 6 or toks[2] != "over" or toks[4] != "base":
        lines.error("expected: cert NAME over ALGEBRA base N", line_no, " ".join(toks))
    name, alg_name = toks[1], toks[3]
    try:
        base = int(toks[5])
    except ValueError:
        lines.error("base must be an integer", line_no, toks[5])
    term_op = None
    neutral = 0
    extra_ops = []
    conclusion = None
    derivation = None
    while lines.peek() is not None and lines.peek()[1] >= 2:
        row_line, indent, row = lines.next()
        key = row[0]
        if key == "affine-op":
            vals = [int(v) for v in row[1:]]
            while len(vals) < base**3:
                nxt = lines.next()
                vals.extend(int(v) for v in nxt[2])
            term_op = TernaryTermOperation(base, tuple(vals))
        elif key == "neutral":
            neutral = int(row[1])
        elif key == "extra-op":
            op_name, arity = row[1], int(row[2])
            vals = [int(v) for v in row[3:]]
            while len(vals) < base**arity:
                nxt = lines.next()
                vals.extend(int(v) for v in nxt[2])
            extra_ops.append(Operation(op_name, arity, base, vals))
        elif key == "conclusion":
            conclusion = _parse_cert_value(lines, row, row_line, indent, base)
        elif key == "derivation":
            derivation = _parse_cert_node(lines, indent + 2, base)
        else:
            lines.error("unknown certificate field", row_line, key)
    if conclusion is None or derivation is None:
        lines.error("certificate needs a conclusion and a derivation", line_no)
    cert = EntailmentCertificate(
        conclusion=conclusion,
        premises=certificate_premises(derivation, term_op),
        derivation=derivation,
        term_op=term_op,
        neutral=neutral,
        extra_ops=tuple(extra_ops),
    )
    doc.certificates.append((name, alg_name, cert))


def _parse_cert_value(lines, row, row_line, indent, base):
    if row[1] == "relation":
        arity = int(row[2])
        tuples = []
        while lines.peek() is not None and lines.peek()[1] > indent:
            _, _, trow = lines.next()
            tuples.append(tuple(int(v) for v in trow[1:]))
        return Relation(arity, base, tuples)
    if row[1] == "op":
        op_name, arity = row[2], int(row[3])
        vals = []
        while lines.peek() is not None and lines.peek()[1] > indent:
            _, _, trow = lines.next()
            vals.extend(int(v) for v in trow[1:] if trow[0] == "table")
        return Operation(op_name, arity, base, vals)
    raise ParseError("conclusion must be a relation or an op", lines.source, row_line)


def _parse_cert_node(lines, indent, base):
    row_line, row_indent, row = lines.next()
    if row_indent != indent:
        raise ParseError(
            f"expected node at indent {indent}", lines.source, row_line, row[0]
        )
    head = row[0]
    if head == "premise":
        value = _parse_cert_value(lines, row, row_line, indent, base)
        return Premise(value)
    if head == "intersection":
        arity = int(row[1])
        children = []
        while lines.peek() is not None and lines.peek()[1] > indent:
            children.append(_parse_cert_node(lines, indent + 2, base))
        return Intersection(base, arity, tuple(children))
    if head == "preimage":
        terms = []
        while lines.peek() is not None and lines.peek()[1] > indent and lines.peek()[2][0] in (
            "term",
            "term-tree",
        ):
            t_line, _, trow = lines.next()
            if trow[0] == "term":
                terms.append(AffineTerm(tuple(int(v) for v in trow[1:])))
            else:
                arity = int(trow[1])
                expr = _parse_sexpr(list(trow[2:]), lines, t_line)
                terms.append(TermTree(arity, expr))
        child = _parse_cert_node(lines, indent + 2, base)
        return TermPreimage(tuple(terms), child)
    if head == "strip":
        return StripPadding(_parse_cert_node(lines, indent + 2, base))
    if head == "graph-to-op":
        op_name = row[1] if len(row) > 1 else "t"
        return GraphToOperation(_parse_cert_node(lines, indent + 2, base), name=op_name)
    raise ParseError("unknown derivation node", lines.source, row_line, head)


# ---------------------------------------------------------------------------
# Serializers
# ---------------------------------------------------------------------------


def serialize_algebra(A: FiniteAlgebra) -> str:
    out = [f"algebra {A.name}", f"size {A.size}"]
    for o in A.ops:
        out.append(f"op {o.name} {o.arity}")
        out.append(" ".join(str(v) for v in o.table))
    return "\n".join(out) + "\n"


def serialize_relation(R: Relation, name, algebra_name) -> str:
    out = [f"relation {name} {R.arity} over {algebra_name}"]
    for t in R.tuples:
        out.append("t " + " ".join(str(v) for v in t))
    return "\n".join(out) + "\n"


def serialize_hom(h: Homomorphism, name) -> str:
    if h.domain.power_of is not None:
        base, power = h.domain.power_of.base_name, h.domain.power_of.exponent
    else:
        base, power = h.domain.name, 1
    out = [
        f"hom {name} from {base} power {power} to {h.codomain.name}",
        "m " + " ".join(str(v) for v in h.mapping),
    ]
    return "\n".join(out) + "\n"


def serialize_congruence(c: Congruence, name, algebra_name) -> str:
    out = [f"cong {name} over {algebra_name}"]
    for block in c.classes():
        out.append("class " + " ".join(str(v) for v in block))
    return "\n".join(out) + "\n"


def serialize_term_dump(t: TernaryTermOperation, algebra_name) -> str:
    """The 3-dimensional table of an affine term as an op block."""
    out = [
        f"# affine term of {algebra_name}",
        "op t 3",
        " ".join(str(v) for v in t.table),
    ]
    return "\n".join(out) + "\n"


def serialize_certificate(cert: EntailmentCertificate, name, algebra_name) -> str:
    base = cert.conclusion.base_size
    out = [f"cert {name} over {algebra_name} base {base}"]
    if cert.term_op is not None:
        out.append("  affine-op " + " ".join(str(v) for v in cert.term_op.table))
        out.append(f"  neutral {cert.neutral}")
    for o in cert.extra_ops:
        out.append(f"  extra-op {o.name} {o.arity} " + " ".join(str(v) for v in o.table))
    out.extend(_serialize_cert_value(cert.conclusion, "conclusion", 2))
    out.append("  derivation")
    out.extend(_serialize_cert_node(cert.derivation, 4))
    return "\n".join(out) + "\n"


def _serialize_cert_value(value, label, indent):
    pad = " " * indent
    if isinstance(value, Relation):
        out = [f"{pad}{label} relation {value.arity}"]
        for t in value.tuples:
            out.append(f"{pad}  t " + " ".join(str(v) for v in t))
        return out
    out = [f"{pad}{label} op {value.name} {value.arity}"]
    out.append(f"{pad}  table " + " ".join(str(v) for v in value.table))
    return out


def _serialize_cert_node(node, indent):
    pad = " " * indent
    if isinstance(node, Premise):
        return _serialize_cert_value(node.value, "premise", indent)
    if isinstance(node, Intersection):
        out = [f"{pad}intersection {node.arity}"]
        for c in node.children:
            out.extend(_serialize_cert_node(c, indent + 2))
        return out
    if isinstance(node, TermPreimage):
        out = [f"{pad}preimage"]
        for t in node.terms:
            if isinstance(t, AffineTerm):
                out.append(f"{pad}  term " + " ".join(str(v) for v in t.coeffs))
            else:
                out.append(f"{pad}  term-tree {t.arity} " + _serialize_sexpr(t.expr))
        out.extend(_serialize_cert_node(node.child, indent + 2))
        return out
    if isinstance(node, StripPadding):
        return [f"{pad}strip"] + _serialize_cert_node(node.child, indent + 2)
    if isinstance(node, GraphToOperation):
        return [f"{pad}graph-to-op {node.name}"] + _serialize_cert_node(
            node.child, indent + 2
        )
    raise TypeError(f"cannot serialize node {node!r}")
