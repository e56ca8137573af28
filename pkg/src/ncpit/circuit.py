"""Noncommutative arithmetic circuits: DAG, text format, classifiers.

A circuit is a topologically ordered list of binary gates over free
variables x_1..x_n and scalar constants; multiplication gates order
their operands (left then right), which is what makes the computed
polynomial noncommutative.  The text format (.ncc) is line oriented:

    # comment
    field 101
    vars 2
    g1 = x1
    g2 = x2
    g3 = add g1 g2
    g4 = mul g3 g3
    output g4

Gate ids must be strictly increasing and may only reference earlier
gates, so files are acyclic by construction.

Classifiers work on a constant-folded copy of the circuit and treat a
maximal connected group of + gates as a single sum with arbitrary
fan-in (the binary IR represents wide sums as +-trees).  The two
recognized shapes are:

* layered-plus circuits: homogeneous, every + gate sits in a unique
  layer (counted by how many +-groups any path to the output crosses),
  layers have uniform syntactic degree, every variable crosses every
  layer, and the output is a + gate;
* sum-of-products circuits: a top sum whose summands are pure products
  of homogeneous linear forms, each extracted as a word program over a
  canonical form alphabet (products may be exponentially long, so they
  are never expanded here).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union

from .errors import ParseError
from .field import PrimeField
from .linforms import AlphabetBuilder, LinAlphabet
from .pistar import SigmaProduct
from .slp import SlpBuilder


class Gate(NamedTuple):
    op: str  # "x" | "const" | "add" | "mul"
    a: int  # variable index, constant value, or left child
    b: int = 0  # right child for add/mul


class Circuit:
    """Immutable gate list; ``names`` keeps the file's gate numbers."""

    __slots__ = ("field", "n", "gates", "out", "names")

    def __init__(self, field: PrimeField, n: int, gates: Sequence[Gate],
                 out: int, names: Optional[Sequence[int]] = None):
        self.field = field
        self.n = n
        self.gates = tuple(gates)
        self.out = out
        self.names = tuple(names) if names is not None else tuple(
            range(1, len(self.gates) + 1))

    def reachable(self) -> list[int]:
        """Dense indices reachable from the output, ascending."""
        seen = [False] * len(self.gates)
        stack = [self.out]
        while stack:
            i = stack.pop()
            if seen[i]:
                continue
            seen[i] = True
            op, a, b = self.gates[i]
            if op in ("add", "mul"):
                stack.append(a)
                stack.append(b)
        return [i for i, s in enumerate(seen) if s]

    def parents(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.gates]
        for i, (op, a, b) in enumerate(self.gates):
            if op in ("add", "mul"):
                out[a].append(i)
                out[b].append(i)
        return out

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Circuit) and self.field == other.field
                and self.n == other.n and self.gates == other.gates
                and self.out == other.out and self.names == other.names)

    def __repr__(self) -> str:
        return (f"Circuit(p={self.field.p}, n={self.n}, "
                f"gates={len(self.gates)}, out=g{self.names[self.out]})")


class CircuitBuilder:
    """Programmatic construction with the same validity guarantees."""

    def __init__(self, field: PrimeField, n: int):
        if n < 1:
            raise ValueError("need at least one variable")
        self.field = field
        self.n = n
        self.gates: list[Gate] = []
        self._var_memo: dict[int, int] = {}
        self._const_memo: dict[int, int] = {}

    def var(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise ValueError(f"variable x{i} outside 1..{self.n}")
        got = self._var_memo.get(i)
        if got is None:
            self.gates.append(Gate("x", i))
            got = self._var_memo[i] = len(self.gates) - 1
        return got

    def const(self, c: int) -> int:
        c %= self.field.p
        got = self._const_memo.get(c)
        if got is None:
            self.gates.append(Gate("const", c))
            got = self._const_memo[c] = len(self.gates) - 1
        return got

    def _binary(self, op: str, a: int, b: int) -> int:
        if not (0 <= a < len(self.gates) and 0 <= b < len(self.gates)):
            raise ValueError("child gate does not exist yet")
        self.gates.append(Gate(op, a, b))
        return len(self.gates) - 1

    def add(self, a: int, b: int) -> int:
        return self._binary("add", a, b)

    def mul(self, a: int, b: int) -> int:
        return self._binary("mul", a, b)

    def sum(self, ids: Sequence[int]) -> int:
        node = ids[0]
        for i in ids[1:]:
            node = self.add(node, i)
        return node

    def product(self, ids: Sequence[int]) -> int:
        node = ids[0]
        for i in ids[1:]:
            node = self.mul(node, i)
        return node

    def scaled(self, c: int, gate: int) -> int:
        return self.mul(self.const(c), gate)

    def build(self, out: int) -> Circuit:
        return Circuit(self.field, self.n, self.gates, out)


def parse(text: str) -> Circuit:
    """Parse the .ncc format; errors carry the offending line number."""
    header: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            header.append((lineno, line.split()))
    if len(header) < 3:
        raise ParseError("file needs field, vars and output lines",
                         header[-1][0] if header else 1)

    lineno, toks = header[0]
    if len(toks) != 2 or toks[0] != "field" or not _is_int(toks[1]):
        raise ParseError("expected `field <p>`", lineno)
    try:
        field = PrimeField(int(toks[1]))
    except ValueError as exc:
        raise ParseError(str(exc), lineno) from None

    lineno, toks = header[1]
    if len(toks) != 2 or toks[0] != "vars" or not _is_int(toks[1]):
        raise ParseError("expected `vars <n>`", lineno)
    n = int(toks[1])
    if n < 1:
        raise ParseError("vars must be at least 1", lineno)

    gates: list[Gate] = []
    names: list[int] = []
    index_of: dict[int, int] = {}
    out: Optional[int] = None
    for lineno, toks in header[2:]:
        if out is not None:
            raise ParseError("content after the output line", lineno)
        if toks[0] == "output":
            if len(toks) != 2:
                raise ParseError("expected `output g<k>`", lineno)
            out = _gate_ref(toks[1], index_of, lineno)
            continue
        if len(toks) < 3 or toks[1] != "=" or not toks[0].startswith("g"):
            raise ParseError("expected `g<k> = ...`", lineno)
        if not _is_int(toks[0][1:]):
            raise ParseError(f"bad gate id {toks[0]!r}", lineno)
        gid = int(toks[0][1:])
        if names and gid <= names[-1]:
            raise ParseError(f"gate ids must be strictly increasing "
                             f"(g{gid} after g{names[-1]})", lineno)
        rhs = toks[2:]
        if len(rhs) == 1 and rhs[0].startswith("x"):
            if not _is_int(rhs[0][1:]):
                raise ParseError(f"bad variable {rhs[0]!r}", lineno)
            v = int(rhs[0][1:])
            if not 1 <= v <= n:
                raise ParseError(f"variable x{v} outside 1..{n}", lineno)
            gate = Gate("x", v)
        elif len(rhs) == 2 and rhs[0] == "const":
            if not _is_int(rhs[1]):
                raise ParseError(f"bad constant {rhs[1]!r}", lineno)
            gate = Gate("const", int(rhs[1]) % field.p)
        elif len(rhs) == 3 and rhs[0] in ("add", "mul"):
            a = _gate_ref(rhs[1], index_of, lineno)
            b = _gate_ref(rhs[2], index_of, lineno)
            gate = Gate(rhs[0], a, b)
        else:
            raise ParseError(f"unrecognized gate definition {' '.join(toks)!r}",
                             lineno)
        index_of[gid] = len(gates)
        gates.append(gate)
        names.append(gid)
    if out is None:
        raise ParseError("missing output line", header[-1][0])
    return Circuit(field, n, gates, out, names)


def _is_int(s: str) -> bool:
    return s.lstrip("-").isdigit() and s != "-"


def _gate_ref(tok: str, index_of: dict[int, int], lineno: int) -> int:
    if not tok.startswith("g") or not _is_int(tok[1:]):
        raise ParseError(f"bad gate reference {tok!r}", lineno)
    gid = int(tok[1:])
    if gid not in index_of:
        raise ParseError(f"g{gid} referenced before definition", lineno)
    return index_of[gid]


def serialize(c: Circuit) -> str:
    lines = [f"field {c.field.p}", f"vars {c.n}"]
    for i, (op, a, b) in enumerate(c.gates):
        name = c.names[i]
        if op == "x":
            lines.append(f"g{name} = x{a}")
        elif op == "const":
            lines.append(f"g{name} = const {a}")
        else:
            lines.append(f"g{name} = {op} g{c.names[a]} g{c.names[b]}")
    lines.append(f"output g{c.names[c.out]}")
    return "\n".join(lines) + "\n"


def constant_fold(c: Circuit) -> Circuit:
    """Collapse constant subcircuits and algebraic units.

    Degree-0 subcircuits become single const gates; additionally
    g + 0 -> g, g * 0 -> 0, g * 1 -> g.  Unreachable gates are dropped.
    The computed polynomial is unchanged; folding makes syntactic
    degrees meaningful for the homogeneity and layering checks.
    """
    p = c.field.p
    reach = c.reachable()
    gates: list[Gate] = []
    names: list[int] = []
    const_at: dict[int, int] = {}
    # rep[i] = ("c", value) or ("g", new index)
    rep: dict[int, tuple[str, int]] = {}

    def materialize(r: tuple[str, int], name: int) -> int:
        if r[0] == "g":
            return r[1]
        v = r[1]
        if v not in const_at:
            gates.append(Gate("const", v))
            names.append(name)
            const_at[v] = len(gates) - 1
        return const_at[v]

    for i in reach:
        op, a, b = c.gates[i]
        if op == "x":
            gates.append(Gate("x", a))
            names.append(c.names[i])
            rep[i] = ("g", len(gates) - 1)
        elif op == "const":
            rep[i] = ("c", a % p)
        elif op == "add":
            ra, rb = rep[a], rep[b]
            if ra[0] == "c" and rb[0] == "c":
                rep[i] = ("c", (ra[1] + rb[1]) % p)
            elif ra[0] == "c" and ra[1] == 0:
                rep[i] = rb
            elif rb[0] == "c" and rb[1] == 0:
                rep[i] = ra
            else:
                ga = materialize(ra, c.names[a])
                gb = materialize(rb, c.names[b])
                gates.append(Gate("add", ga, gb))
                names.append(c.names[i])
                rep[i] = ("g", len(gates) - 1)
        else:
            ra, rb = rep[a], rep[b]
            if ra[0] == "c" and rb[0] == "c":
                rep[i] = ("c", ra[1] * rb[1] % p)
            elif (ra[0] == "c" and ra[1] == 0) or (rb[0] == "c" and rb[1] == 0):
                rep[i] = ("c", 0)
            elif ra[0] == "c" and ra[1] == 1:
                rep[i] = rb
            elif rb[0] == "c" and rb[1] == 1:
                rep[i] = ra
            else:
                ga = materialize(ra, c.names[a])
                gb = materialize(rb, c.names[b])
                gates.append(Gate("mul", ga, gb))
                names.append(c.names[i])
                rep[i] = ("g", len(gates) - 1)
    out_rep = rep[c.out]
    out = materialize(out_rep, c.names[c.out])
    return Circuit(c.field, c.n, gates, out, names)


def syntactic_degrees(c: Circuit) -> tuple[int, ...]:
    """Per-gate syntactic degree: x -> 1, const -> 0, mul sums, add
    takes the max (homogeneity requires the children to agree, which is
    checked separately)."""
    degs = [0] * len(c.gates)
    for i, (op, a, b) in enumerate(c.gates):
        if op == "x":
            degs[i] = 1
        elif op == "const":
            degs[i] = 0
        elif op == "add":
            degs[i] = max(degs[a], degs[b])
        else:
            degs[i] = degs[a] + degs[b]
    return tuple(degs)


def circuit_degree(c: Circuit) -> int:
    return syntactic_degrees(c)[c.out]


def first_inhomogeneous_gate(c: Circuit) -> Optional[int]:
    """Gate name of the first + gate whose children have unequal
    syntactic degree, after constant folding; None if homogeneous."""
    f = constant_fold(c)
    degs = syntactic_degrees(f)
    for i, (op, a, b) in enumerate(f.gates):
        if op == "add" and degs[a] != degs[b]:
            return f.names[i]
    return None


def check_homogeneous(c: Circuit) -> bool:
    return first_inhomogeneous_gate(c) is None


@dataclass
class Rejection:
    """Why a classifier refused a circuit (not an error)."""

    reason: str
    gate: Optional[int] = None  # gate name where the violation sits

    def __str__(self) -> str:
        return f"{self.reason} (at g{self.gate})" if self.gate else self.reason


@dataclass
class PlusLayering:
    """Accepted layered-plus structure over the folded circuit.

    Layers are numbered 1..layers bottom-up; ``layer_of`` maps dense
    gate indices of ``folded`` (+ gates only) to their layer, and
    ``layer_degrees[q-1]`` is the common syntactic degree of layer q.
    """

    layers: int
    layer_of: dict[int, int]
    layer_degrees: tuple[int, ...]
    folded: Circuit
    degrees: tuple[int, ...]


def classify_plus_regular(c: Circuit) -> Union[PlusLayering, Rejection]:
    """Layer the + gates by group-crossing counts, or say why not.

    For every gate the number of maximal +-groups on a path to the
    output (counting the gate's own group if it is a + gate) must not
    depend on the path; + gates then group into layers by that count,
    each layer must have one syntactic degree, every variable input
    must cross every layer, and the output must be a + gate.
    """
    f = constant_fold(c)
    degs = syntactic_degrees(f)
    out_op = f.gates[f.out].op
    if out_op != "add":
        return Rejection("output gate is not a + gate", f.names[f.out])
    for i, (op, a, b) in enumerate(f.gates):
        if op == "add" and degs[a] != degs[b]:
            return Rejection("not homogeneous: + gate children have syntactic "
                             f"degrees {degs[a]} and {degs[b]}", f.names[i])

    parents = f.parents()
    counts: list[Optional[set[int]]] = [None] * len(f.gates)
    counts[f.out] = {1}
    for i in range(len(f.gates) - 1, -1, -1):
        if i == f.out:
            continue
        ps = parents[i]
        if not ps:
            continue  # folding already dropped unreachable gates
        acc: set[int] = set()
        is_add = f.gates[i].op == "add"
        for q in ps:
            for cq in counts[q]:  # type: ignore[union-attr]
                if is_add and f.gates[q].op == "add":
                    acc.add(cq)  # same +-group as the parent
                elif is_add:
                    acc.add(cq + 1)
                else:
                    acc.add(cq)
        counts[i] = acc
        # Constants are scalars and may sit between any layers (a shared
        # const gate can legitimately be reached at several depths).
        if len(acc) > 1 and f.gates[i].op != "const":
            return Rejection("ambiguous +-layer count "
                             f"{sorted(acc)} over output paths", f.names[i])

    plus_counts = {i: next(iter(counts[i]))  # type: ignore[arg-type]
                   for i, g in enumerate(f.gates)
                   if g.op == "add" and counts[i]}
    depth = max(plus_counts.values())
    for i, g in enumerate(f.gates):
        if g.op == "x" and counts[i] is not None:
            cnt = next(iter(counts[i]))  # type: ignore[arg-type]
            if cnt != depth:
                return Rejection(f"variable x{g.a} reaches the output through "
                                 f"{cnt} of {depth} +-layers", f.names[i])

    layer_of = {i: depth - cnt + 1 for i, cnt in plus_counts.items()}
    layer_degree: dict[int, int] = {}
    for i, layer in layer_of.items():
        d = degs[i]
        if layer in layer_degree and layer_degree[layer] != d:
            return Rejection(f"+-layer {layer} mixes syntactic degrees "
                             f"{layer_degree[layer]} and {d}", f.names[i])
        layer_degree.setdefault(layer, d)
    layer_degrees = tuple(layer_degree[q] for q in range(1, depth + 1))
    return PlusLayering(depth, layer_of, layer_degrees, f, degs)


@dataclass
class SpsView:
    """A circuit flattened as sum(summands), each a product of forms.

    Each summand is a SigmaProduct: a scalar times a word program over
    ``alphabet`` (one letter per canonical linear form).  The top sum
    need not be homogeneous; ``homogeneous`` reports whether all
    summand degrees agree.
    """

    alphabet: LinAlphabet
    summands: list[SigmaProduct]
    folded: Circuit

    @property
    def s(self) -> int:
        return len(self.summands)

    @property
    def max_degree(self) -> int:
        return max((g.degree for g in self.summands), default=0)

    @property
    def homogeneous(self) -> bool:
        return len({g.degree for g in self.summands}) <= 1


class _Reject(Exception):
    def __init__(self, rejection: Rejection):
        self.rejection = rejection


def flatten_sum(c: Circuit, root: Optional[int] = None) -> list[tuple[int, int]]:
    """Summand gates of the maximal +-group at ``root`` (default: the
    output), each with its path multiplicity mod p.

    With DAG sharing a summand can feed the group through several +
    gates; the multiplicity is the number of such +-paths, which enters
    the summand's scalar.
    """
    root = c.out if root is None else root
    if c.gates[root].op != "add":
        return [(root, 1)]
    p = c.field.p
    group = {root}
    frontier = [root]
    while frontier:
        i = frontier.pop()
        _, a, b = c.gates[i]
        for child in (a, b):
            if c.gates[child].op == "add" and child not in group:
                group.add(child)
                frontier.append(child)
    # Children precede parents in the gate list, so descending order
    # processes each + gate after every +-parent inside the group.
    mult: dict[int, int] = {root: 1}
    summands: dict[int, int] = {}
    for i in sorted(group, reverse=True):
        m = mult.get(i, 0)
        if not m:
            continue
        _, a, b = c.gates[i]
        for child in (a, b):
            if c.gates[child].op == "add":
                mult[child] = (mult.get(child, 0) + m) % p
            else:
                summands[child] = (summands.get(child, 0) + m) % p
    return sorted(summands.items())


def _affine_view(c: Circuit, degs: tuple[int, ...], root: int,
                 cache: dict[int, tuple[int, tuple[int, ...]]]
                 ) -> tuple[int, tuple[int, ...]]:
    """(constant part, coefficient vector) of a degree <= 1 subcircuit."""
    got = cache.get(root)
    if got is not None:
        return got
    p = c.field.p
    op, a, b = c.gates[root]
    if op == "x":
        vec = tuple(1 if i == a else 0 for i in range(1, c.n + 1))
        res = (0, vec)
    elif op == "const":
        res = (a, tuple([0] * c.n))
    elif op == "add":
        c0, v0 = _affine_view(c, degs, a, cache)
        c1, v1 = _affine_view(c, degs, b, cache)
        res = ((c0 + c1) % p, tuple((x + y) % p for x, y in zip(v0, v1)))
    else:
        # degree 1 = 1 + 0, so one side is a constant after folding
        if degs[a] == 0:
            scalar = c.gates[a].a
            c1, v1 = _affine_view(c, degs, b, cache)
        else:
            scalar = c.gates[b].a
            c1, v1 = _affine_view(c, degs, a, cache)
        res = (scalar * c1 % p, tuple(scalar * x % p for x in v1))
    cache[root] = res
    return res


def extract_sigma_products(c: Circuit, degs: tuple[int, ...],
                           roots: Sequence[tuple[int, int]],
                           alphabet: AlphabetBuilder
                           ) -> list[SigmaProduct]:
    """Turn product subcircuits into scalar * word-program form.

    ``roots`` pairs each product gate with a multiplicity scalar.  A
    product's leaves are its degree <= 1 gates: degree-1 leaves must
    evaluate to homogeneous linear forms (letters), const gates fold
    into the scalar.  A + gate of degree >= 2 inside a product is a
    shape violation and raises _Reject.  Products containing a zero
    linear form are the zero polynomial and come back with scalar 0.
    """
    p = c.field.p
    affine_cache: dict[int, tuple[int, tuple[int, ...]]] = {}
    out = []
    for root, multiplicity in roots:
        # The alphabet grows while walking, so the builder's letter
        # bound is set wide and tightened after everything is extracted.
        b = SlpBuilder(1 << 30)
        memo: dict[int, tuple[Optional[int], int, bool]] = {}

        def walk(g: int) -> tuple[Optional[int], int, bool]:
            got = memo.get(g)
            if got is not None:
                return got
            op, x, y = c.gates[g]
            if op == "const":
                res: tuple[Optional[int], int, bool] = (None, x, False)
            elif degs[g] == 1:
                c0, vec = _affine_view(c, degs, g, affine_cache)
                if c0 != 0:
                    raise _Reject(Rejection(
                        "product factor is affine, not a homogeneous "
                        "linear form", c.names[g]))
                assigned = alphabet.add(vec)
                if assigned is None:
                    res = (None, 0, True)  # zero form: zero polynomial
                else:
                    letter, scalar = assigned
                    res = (b.letter(letter), scalar, False)
            elif op == "mul":
                nl, sl, zl = walk(x)
                nr, sr, zr = walk(y)
                node = nl if nr is None else (nr if nl is None
                                              else b.concat(nl, nr))
                res = (node, sl * sr % p, zl or zr)
            else:
                raise _Reject(Rejection(
                    "+ gate of degree >= 2 inside a product", c.names[g]))
            memo[g] = res
            return res

        node, scalar, has_zero = walk(root)
        scalar = scalar * multiplicity % p
        if has_zero or scalar == 0:
            out.append(SigmaProduct(0, None, degs[root]))
        elif node is None:
            out.append(SigmaProduct(scalar, None, 0))
        else:
            out.append(SigmaProduct(scalar, b.build(node), degs[root]))
    for prod in out:
        if prod.word is not None:
            prod.word.alphabet_size = len(alphabet.letters)
    return out


def classify_sps(c: Circuit) -> Union[SpsView, Rejection]:
    """Flatten the output sum into products of linear forms, or refuse.

    The output +-group's summands must each be a pure ×-circuit over
    homogeneous-linear-form leaves.  Scalars met along the way (const
    factors, form canonicalization, summand multiplicities) accumulate
    into each summand's scalar.  A circuit with no output + gate is a
    single summand.
    """
    f = constant_fold(c)
    degs = syntactic_degrees(f)
    roots = flatten_sum(f)
    alphabet = AlphabetBuilder(f.field, f.n)
    try:
        summands = extract_sigma_products(f, degs, roots, alphabet)
    except _Reject as exc:
        return exc.rejection
    return SpsView(alphabet.build([]), summands, f)


def evaluate_matrix(c: Circuit, dim: int,
                    assign: dict[int, Sequence[Sequence[int]]]
                    ) -> list[list[int]]:
    """Evaluate on square matrices; constants become c * identity.

    ``assign`` maps each variable index to a dim x dim matrix of ints
    (or anything int() accepts).  Multiplication respects the gate's
    left/right order, which is the whole point of matrix substitution.
    """
    p = c.field.p
    if dim < 1:
        raise ValueError("dimension must be positive")
    mats: dict[int, list[list[int]]] = {}
    for v in range(1, c.n + 1):
        if v not in assign:
            raise ValueError(f"missing matrix for x{v}")
        m = [[int(x) % p for x in row] for row in assign[v]]
        if len(m) != dim or any(len(row) != dim for row in m):
            raise ValueError(f"matrix for x{v} is not {dim}x{dim}")
        mats[v] = m
    rng_dim = range(dim)
    values: dict[int, list[list[int]]] = {}
    for i in c.reachable():
        op, a, b = c.gates[i]
        if op == "x":
            values[i] = mats[a]
        elif op == "const":
            values[i] = [[a if r == col else 0 for col in rng_dim]
                         for r in rng_dim]
        elif op == "add":
            ma, mb = values[a], values[b]
            values[i] = [[(ma[r][col] + mb[r][col]) % p for col in rng_dim]
                         for r in rng_dim]
        else:
            ma, mb = values[a], values[b]
            values[i] = [
                [sum(ma[r][k] * mb[k][col] for k in rng_dim) % p
                 for col in rng_dim]
                for r in rng_dim]
    return values[c.out]
