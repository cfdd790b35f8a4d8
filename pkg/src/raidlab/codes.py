"""Erasure codes as explicit parity-equation systems over small Galois fields.

A code is a set of symbols (data + checks) and a list of equations, each of
which field-sums to zero over the stored symbols.  Recoverability of an
erasure pattern is a rank question on the equation matrix restricted to the
erased columns.
"""

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations

from . import gf

DEFAULT_BUDGET = 5_000_000  # rank tests per enumeration call, overridable


class BudgetExceeded(Exception):
    """An enumeration would exceed its rank-test budget."""


class UnrecoverableError(Exception):
    """Requested operation needs a recoverable pattern."""


@dataclass
class CodeSpec:
    """An erasure code: symbols, parity equations, and placement maps."""

    name: str
    field: gf.Field
    n_symbols: int
    data_ids: tuple
    check_ids: tuple
    # equations: tuple of (check_id, ((symbol_id, coeff), ...)); terms sum to 0
    equations: tuple
    column_map: dict
    row_map: dict = None
    group_map: dict = None
    # dependent identities (implied parities) usable for decode/repair but not
    # owned by any check symbol
    extra_equations: tuple = ()
    # optional two-phase decoder description (local peel + base-code solve):
    # {"virtuals": {vid: ((sym, coeff), ...)}, "equations": [((id, coeff), ...)]}
    base_view: dict = None

    def __post_init__(self):
        seen = set()
        for cid, terms in self.equations:
            if cid in seen:
                raise ValueError("check %r owned by two equations" % (cid,))
            seen.add(cid)
            for s, c in terms:
                if c == 0:
                    raise ValueError("zero coefficient on %r" % (s,))
        for terms in self.extra_equations:
            for s, c in terms:
                if c == 0:
                    raise ValueError("zero coefficient on %r" % (s,))
        if set(self.column_map) != set(self.data_ids) | set(self.check_ids):
            raise ValueError("column_map must cover every symbol")

    @property
    def symbols(self):
        return tuple(self.data_ids) + tuple(self.check_ids)

    @property
    def k(self):
        return len(self.data_ids)

    @property
    def n(self):
        return self.n_symbols

    def columns(self):
        return sorted(set(self.column_map.values()), key=str)

    def column_symbols(self, col):
        return [s for s, c in self.column_map.items() if c == col]

    def parity_rows(self):
        """Equations (including implied identities) as {symbol: coeff} dicts."""
        rows = [dict(terms) for _, terms in self.equations]
        rows.extend(dict(terms) for terms in self.extra_equations)
        return rows


def _expand(code, pattern, granularity):
    if granularity == "symbol":
        return set(pattern)
    if granularity == "column":
        erased = set()
        for col in pattern:
            erased.update(code.column_symbols(col))
        return erased
    raise ValueError("granularity must be 'symbol' or 'column'")


def _solvable(field, rows, erased):
    """True iff `erased` symbols are determined by the equations `rows`.

    Peels equations with a single erased member first (cheap and it is how
    most local repairs resolve), then falls back to a joint rank test.
    """
    erased = set(erased)
    if not erased:
        return True
    touch = [set(r) & erased for r in rows]
    # peeling pass
    changed = True
    while changed and erased:
        changed = False
        for t in touch:
            if len(t) == 1:
                sym = next(iter(t))
                if sym in erased:
                    erased.discard(sym)
                    changed = True
        if changed:
            touch = [t & erased for t in touch]
    if not erased:
        return True
    cols = sorted(erased, key=str)
    idx = {s: i for i, s in enumerate(cols)}
    mat = []
    for r, t in zip(rows, touch):
        if t:
            row = [0] * len(cols)
            for s in t:
                row[idx[s]] = r[s]
            mat.append(row)
    return gf.rank(field, mat) == len(cols)


def is_recoverable(code, erasures, granularity="symbol"):
    """True iff the erased symbols are uniquely determined by the survivors."""
    erased = _expand(code, erasures, granularity)
    unknown = set(code.symbols)
    if not erased <= unknown:
        raise ValueError("erasures outside symbol space")
    return _solvable(code.field, code.parity_rows(), erased)


def _base_view_recoverable(code, erased):
    """Two-phase decode: peel local equations, then solve the base view.

    Virtual base symbols (e.g. a parity that was split into two stored local
    parities) count as erased while any of their constituents is erased; when
    the base system determines all its unknowns, everything else peels.
    """
    bv = code.base_view
    rows = code.parity_rows()
    field = code.field
    erased = set(erased)
    while erased:
        # phase 1: peel own equations (local repairs)
        progressed = True
        while progressed and erased:
            progressed = False
            for r in rows:
                t = set(r) & erased
                if len(t) == 1:
                    erased.discard(t.pop())
                    progressed = True
        if not erased:
            return True
        # phase 2: joint solve on the base view with virtual symbols
        base_erased = set()
        for vid, parts in bv["virtuals"].items():
            if any(s in erased for s, _ in parts):
                base_erased.add(vid)
        stored = {s for eq in bv["equations"] for s, _ in eq}
        base_erased |= erased & stored
        mat = []
        cols = sorted(base_erased, key=str)
        idx = {s: i for i, s in enumerate(cols)}
        for eq in bv["equations"]:
            row = [0] * len(cols)
            hit = False
            for s, c in eq:
                if s in base_erased:
                    row[idx[s]] = c
                    hit = True
            if hit:
                mat.append(row)
        if not cols:
            return not erased
        if gf.rank(field, mat) == len(cols):
            # base decode recovers its own symbols; drop them and re-peel
            recovered = {s for s in cols if s in erased}
            if not recovered:
                return False
            erased -= recovered
        else:
            return False
    return True


def erasure_tolerance(code, granularity="symbol", budget=DEFAULT_BUDGET):
    """Largest t such that every erasure pattern of size t is recoverable."""
    units = code.columns() if granularity == "column" else list(code.symbols)
    rows = code.parity_rows()
    spent = 0
    t = 0
    for size in range(1, len(units) + 1):
        total = _ncr(len(units), size)
        spent += total
        if spent > budget:
            raise BudgetExceeded("tolerance enumeration needs %d tests" % spent)
        ok = all(
            _solvable(code.field, rows, _expand(code, p, granularity))
            for p in combinations(units, size)
        )
        if not ok:
            return t
        t = size
    return t


def recoverable_fraction(code, f, granularity="symbol", decoder="joint",
                         budget=DEFAULT_BUDGET):
    """Fraction of size-f erasure patterns that are recoverable.

    decoder="joint" uses full linear decoding; "local-global" uses the
    two-phase decoder recorded in the code's base view (local parities first,
    then the base code), which is how split-parity codes are actually run.
    Returns (fraction, exact Fraction, (recoverable, total)).
    """
    units = code.columns() if granularity == "column" else list(code.symbols)
    total = _ncr(len(units), f)
    if total > budget:
        raise BudgetExceeded("fraction enumeration needs %d tests" % total)
    if decoder == "local-global" and not code.base_view:
        raise ValueError("code %s has no base view" % code.name)
    rows = code.parity_rows()
    good = 0
    for p in combinations(units, f):
        erased = _expand(code, p, granularity)
        if decoder == "local-global":
            ok = _base_view_recoverable(code, erased)
        else:
            ok = _solvable(code.field, rows, erased)
        good += ok
    frac = Fraction(good, total)
    return float(frac), frac, (good, total)


def loss_coefficients(code, granularity="symbol", budget=DEFAULT_BUDGET):
    """A[i] = number of i-failure sets NOT causing data loss, i = 0..n."""
    units = code.columns() if granularity == "column" else list(code.symbols)
    rows = code.parity_rows()
    coeffs = [1]
    spent = 0
    dead = False
    for size in range(1, len(units) + 1):
        if dead:
            coeffs.append(0)
            continue
        spent += _ncr(len(units), size)
        if spent > budget:
            raise BudgetExceeded("loss enumeration needs %d tests" % spent)
        good = sum(
            _solvable(code.field, rows, _expand(code, p, granularity))
            for p in combinations(units, size)
        )
        coeffs.append(good)
        if good == 0:
            dead = True
    return coeffs


def classify_array_code(code, n, m, r, s, budget=DEFAULT_BUDGET):
    """Classify as PMDS, SD or neither.

    PMDS: any m erased blocks per row plus any s more anywhere are
    recoverable.  SD: any m whole columns plus any s more sectors.  The PMDS
    property implies SD; both are decided by exhaustive enumeration.
    """
    rows_of = {}
    for sym, rr in (code.row_map or {}).items():
        rows_of.setdefault(rr, []).append(sym)
    if len(rows_of) != r:
        raise ValueError("row_map has %d rows, expected %d" % (len(rows_of), r))
    cols = code.columns()
    if len(cols) != n:
        raise ValueError("expected %d columns" % n)
    eq_rows = code.parity_rows()
    all_syms = set(code.symbols)

    def ok(erased):
        return _solvable(code.field, eq_rows, erased)

    # SD: m columns + s extra sectors
    sd_tests = _ncr(n, m) * _ncr(r * (n - m), s)
    if sd_tests > budget:
        raise BudgetExceeded("SD check needs %d tests" % sd_tests)
    sd = True
    for colset in combinations(cols, m):
        base = _expand(code, colset, "column")
        rest = sorted(all_syms - base, key=str)
        for extra in combinations(rest, s):
            if not ok(base | set(extra)):
                sd = False
                break
        if not sd:
            break

    # PMDS: m per row + s anywhere
    row_choices = [list(combinations(sorted(rows_of[rr], key=str), m))
                   for rr in sorted(rows_of)]
    pmds_tests = 1
    for rc in row_choices:
        pmds_tests *= len(rc)
    pmds_tests *= _ncr(r * n - r * m, s)
    if pmds_tests > budget:
        raise BudgetExceeded("PMDS check needs %d tests" % pmds_tests)
    pmds = True
    for picks in _product(row_choices):
        base = set()
        for p in picks:
            base.update(p)
        rest = sorted(all_syms - base, key=str)
        for extra in combinations(rest, s):
            if not ok(base | set(extra)):
                pmds = False
                break
        if not pmds:
            break
    if pmds and not sd:
        raise AssertionError("PMDS without SD; enumeration is inconsistent")
    if pmds:
        return "PMDS"
    if sd:
        return "SD"
    return "neither"


def _product(lists):
    if not lists:
        yield ()
        return
    for head in lists[0]:
        for tail in _product(lists[1:]):
            yield (head,) + tail


@dataclass
class RepairPlan:
    reads: tuple
    equations_used: tuple
    optimal: bool

    @property
    def symbols_read(self):
        return len(self.reads)


def repair_plan(code, erasures, granularity="symbol", exact_limit=1 << 16):
    """Minimum-read repair: a read set whose equations determine the erasures.

    Searches subsets of parity equations exactly when that is affordable,
    otherwise falls back to a greedy cover (flagged non-optimal).
    """
    erased = _expand(code, erasures, granularity)
    rows = code.parity_rows()
    if not _solvable(code.field, rows, erased):
        raise UnrecoverableError("pattern %r is not recoverable" % (erasures,))
    relevant = [(i, r) for i, r in enumerate(rows) if set(r) & erased]

    def evaluate(subset):
        sub = [r for _, r in subset]
        if not _solvable(code.field, sub, erased):
            return None
        reads = set()
        for r in sub:
            reads.update(set(r) - erased)
        return reads

    best = None
    best_eqs = None
    if 2 ** len(relevant) <= exact_limit:
        for mask in range(1, 2 ** len(relevant)):
            subset = [relevant[i] for i in range(len(relevant))
                      if mask >> i & 1]
            if len(subset) < len(erased):
                continue  # |E| unknowns need at least |E| equations
            reads = evaluate(subset)
            if reads is not None and (best is None or len(reads) < len(best)):
                best = reads
                best_eqs = tuple(i for i, _ in subset)
        return RepairPlan(tuple(sorted(best, key=str)), best_eqs, True)
    # greedy: add the equation that buys the most progress per new read
    chosen = []
    while True:
        reads = evaluate(chosen)
        if reads is not None:
            break
        scored = []
        for cand in relevant:
            if cand in chosen:
                continue
            new_reads = len(set(cand[1]) - erased -
                            {s for _, r in chosen for s in r})
            scored.append((new_reads, -len(set(cand[1]) & erased), cand))
        if not scored:
            raise UnrecoverableError("greedy repair failed")
        scored.sort(key=lambda x: (x[0], x[1]))
        chosen.append(scored[0][2])
    return RepairPlan(tuple(sorted(reads, key=str)),
                      tuple(i for i, _ in chosen), False)


def verify_plan(code, erasures, reads, granularity="symbol"):
    """Check that reading `reads` suffices to recover `erasures`.

    The erased values are determined by the read set alone iff adding every
    unread survivor as an extra unknown does not blur them:
    rank(H[:, E + U]) == |E| + rank(H[:, U]).
    """
    erased = _expand(code, erasures, granularity)
    reads = set(reads)
    unread = set(code.symbols) - erased - reads
    rows = code.parity_rows()

    def restricted_rank(cols):
        cols = sorted(cols, key=str)
        idx = {s: i for i, s in enumerate(cols)}
        mat = []
        for r in rows:
            t = set(r) & set(cols)
            if t:
                row = [0] * len(cols)
                for s in t:
                    row[idx[s]] = r[s]
                mat.append(row)
        return gf.rank(code.field, mat)

    lhs = restricted_rank(erased | unread)
    rhs = len(erased) + restricted_rank(unread)
    return lhs == rhs


def repair_metrics(code, budget=DEFAULT_BUDGET):
    """Per-symbol repair costs: ARC, NRC, ADRC, DRC and pairwise ARC2."""
    costs = {}
    for s in code.symbols:
        plan = repair_plan(code, [s])
        costs[s] = plan.symbols_read
    n = code.n_symbols
    k = code.k
    arc = sum(costs.values()) / n
    adrc = sum(costs[s] for s in code.data_ids) / k
    pair_total = 0
    pairs = list(combinations(code.symbols, 2))
    if len(pairs) > budget:
        raise BudgetExceeded("ARC2 needs %d plans" % len(pairs))
    arc2 = None
    try:
        for a, b in pairs:
            pair_total += repair_plan(code, [a, b]).symbols_read
        arc2 = pair_total / len(pairs)
    except UnrecoverableError:
        pass  # single-fault-tolerant codes have no two-erasure cost
    return {
        "ARC": arc,
        "NRC": arc * n / k,
        "ADRC": adrc,
        "DRC": adrc,
        "ARC2": arc2,
        "per_symbol": costs,
    }


def encode_xor_count(code):
    """XOR operations for a full-stripe encode (binary codes only)."""
    if code.field.w != 1:
        raise ValueError("XOR counting applies to binary-field codes")
    total = 0
    for _, terms in code.equations:
        total += len(terms) - 2  # one term is the check itself
    return total


def encode(code, data_values, rng=None):
    """Encode: assign data values, solve every check, return {sym: value}.

    With rng given, data_values may be None and random field elements are
    drawn.  Raises if the equation system does not determine the checks.
    """
    if data_values is None:
        data_values = {s: rng.integers(0, code.field.order)
                       for s in code.data_ids}
    values = dict(data_values)
    pending = list(code.equations)
    # iterative substitution handles chained checks (diagonal over row parity)
    progress = True
    while pending and progress:
        progress = False
        rest = []
        for cid, terms in pending:
            unknown = [(s, c) for s, c in terms if s not in values]
            if len(unknown) == 1:
                s, c = unknown[0]
                acc = 0
                for t, ct in terms:
                    if t != s:
                        acc ^= code.field.mul(ct, values[t])
                values[s] = code.field.mul(code.field.inv(c), acc)
                progress = True
            else:
                rest.append((cid, terms))
        pending = rest
    if pending:
        # fall back to a joint solve for the remaining checks
        unknown = sorted({s for _, terms in pending for s, _ in terms
                          if s not in values}, key=str)
        idx = {s: i for i, s in enumerate(unknown)}
        rows = []
        rhs = []
        for _, terms in pending:
            row = [0] * len(unknown)
            acc = 0
            for s, c in terms:
                if s in idx:
                    row[idx[s]] = c
                else:
                    acc ^= code.field.mul(c, values[s])
            rows.append(row)
            rhs.append(acc)
        if len(rows) != len(unknown):
            raise ValueError("encode system is not square")
        sol = gf.solve(code.field, rows, [rhs])
        if sol is None:
            raise ValueError("encode system is singular")
        for s, v in zip(unknown, sol[0]):
            values[s] = v
    return values


def decode(code, values, erased):
    """Solve the erased symbols from surviving values; None if not possible."""
    erased = sorted(set(erased), key=str)
    idx = {s: i for i, s in enumerate(erased)}
    rows = []
    rhs = []
    for _, terms in code.equations:
        row = [0] * len(erased)
        acc = 0
        hit = False
        for s, c in terms:
            if s in idx:
                row[idx[s]] = c
                hit = True
            else:
                acc ^= code.field.mul(c, values[s])
        if hit:
            rows.append(row)
            rhs.append(acc)
    # reduce to a square solvable system via elimination
    aug = [r + [b] for r, b in zip(rows, rhs)]
    f = code.field
    r = 0
    for c in range(len(erased)):
        piv = None
        for i in range(r, len(aug)):
            if aug[i][c]:
                piv = i
                break
        if piv is None:
            return None
        aug[r], aug[piv] = aug[piv], aug[r]
        iv = f.inv(aug[r][c])
        if iv != 1:
            aug[r] = [f.mul(v, iv) for v in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c]:
                fac = aug[i][c]
                aug[i] = [a ^ f.mul(fac, b) for a, b in zip(aug[i], aug[r])]
        r += 1
    if r < len(erased):
        return None
    return {s: aug[i][-1] for s, i in ((s, idx[s]) for s in erased)}


def grid_compose(row_factory, col_factory, k1, k2):
    """Compose 1-D stripe codes over the rows and columns of a k1 x k2 grid.

    The row code runs over each data row (its checks become extra columns);
    the column code then runs over every column of the augmented array,
    including the row-check columns, so corner checks satisfy both marginal
    identities by construction.
    """
    row_proto = row_factory(k2)
    col_rows = k1
    row_checks = len(row_proto.check_ids)
    width = k2 + row_checks
    col_proto = col_factory(col_rows)
    col_checks = len(col_proto.check_ids)

    def cell(i, j):
        return "s%d_%d" % (i, j)

    data = [cell(i, j) for i in range(k1) for j in range(k2)]
    checks = []
    equations = []
    column_map = {}
    for i in range(k1 + col_checks):
        for j in range(width):
            column_map[cell(i, j)] = j

    # row code instances
    for i in range(k1):
        mapping = {}
        for d_idx, s in enumerate(row_proto.data_ids):
            mapping[s] = cell(i, d_idx)
        for c_idx, s in enumerate(row_proto.check_ids):
            mapping[s] = cell(i, k2 + c_idx)
            checks.append(cell(i, k2 + c_idx))
        for cid, terms in row_proto.equations:
            equations.append((mapping[cid],
                              tuple((mapping[s], c) for s, c in terms)))
    # column code instances over all width columns
    for j in range(width):
        mapping = {}
        for d_idx, s in enumerate(col_proto.data_ids):
            mapping[s] = cell(d_idx, j)
        for c_idx, s in enumerate(col_proto.check_ids):
            mapping[s] = cell(k1 + c_idx, j)
            checks.append(cell(k1 + c_idx, j))
        for cid, terms in col_proto.equations:
            equations.append((mapping[cid],
                              tuple((mapping[s], c) for s, c in terms)))
    row_map = {}
    for s in data + checks:
        i = int(s[1:].split("_")[0])
        row_map[s] = i
    return CodeSpec(
        name="grid(%s,%s,%dx%d)" % (row_proto.name, col_proto.name, k1, k2),
        field=row_proto.field,
        n_symbols=len(data) + len(checks),
        data_ids=tuple(data),
        check_ids=tuple(checks),
        equations=tuple(equations),
        column_map=column_map,
        row_map=row_map,
    )


def find_lrc_coefficients(field=gf.GF16):
    """Smallest coefficient pair (alphas, betas) making the two-group LRC
    decode every information-theoretically decodable four-failure pattern.

    All three determinant families must be nonzero for every index choice:
    the 4x4 case (two failures per group), the 3x3 case (one local parity
    down), and the 2x2 case (both local parities down).
    """
    nonzero = [e for e in field.elements() if e]

    def valid(alphas, betas):
        for i, j in combinations(range(3), 2):
            if alphas[i] == alphas[j] or betas[i] == betas[j]:
                return False
        for i, j in combinations(range(3), 2):
            for s, t in combinations(range(3), 2):
                if alphas[i] ^ alphas[j] ^ betas[s] ^ betas[t] == 0:
                    return False
        for i, j in combinations(range(3), 2):
            for s in range(3):
                if betas[s] ^ alphas[i] ^ alphas[j] == 0:
                    return False
                if alphas[s] ^ betas[i] ^ betas[j] == 0:
                    return False
        for a in alphas:
            for b in betas:
                if a == b:
                    return False
        return True

    for alphas in combinations(nonzero, 3):
        for betas in combinations(nonzero, 3):
            if valid(alphas, betas):
                return tuple(alphas), tuple(betas)
    raise RuntimeError("no admissible coefficients in %r" % (field,))


def mds_update_cost(r, m, k):
    """Reference lower bound on the single-bit update cost of an MDS
    m x n array code with k data and r check columns.

    r=2: 2 + (1/m)(1 - 1/k);  r=3: 3 + (3/m)(2/3 - 1/k).
    """
    if r == 2:
        return 2.0 + (1.0 - 1.0 / k) / m
    if r == 3:
        return 3.0 + 3.0 / m * (2.0 / 3.0 - 1.0 / k)
    raise ValueError("bound is stated for r in {2, 3}")


def to_json(code):
    """CodeSpec as a plain JSON document (fixtures are data, not code)."""
    return {
        "name": code.name,
        "field_bits": code.field.w,
        "data_ids": list(code.data_ids),
        "check_ids": list(code.check_ids),
        "equations": [[cid, [[s, c] for s, c in terms]]
                      for cid, terms in code.equations],
        "extra_equations": [[[s, c] for s, c in terms]
                            for terms in code.extra_equations],
        "column_map": {str(s): code.column_map[s] for s in code.symbols},
        "row_map": None if code.row_map is None else
                   {str(s): code.row_map[s] for s in code.row_map},
        "group_map": None if code.group_map is None else
                     {str(s): code.group_map[s] for s in code.group_map},
    }


def from_json(doc):
    """Rebuild a CodeSpec from its JSON form (symbol ids become strings)."""
    field = gf.Field(doc["field_bits"])
    data_ids = tuple(doc["data_ids"])
    check_ids = tuple(doc["check_ids"])
    equations = tuple(
        (cid, tuple((s, int(c)) for s, c in terms))
        for cid, terms in doc["equations"])
    extra = tuple(tuple((s, int(c)) for s, c in terms)
                  for terms in doc.get("extra_equations", []))
    return CodeSpec(
        name=doc.get("name", "inline"),
        field=field,
        n_symbols=len(data_ids) + len(check_ids),
        data_ids=data_ids,
        check_ids=check_ids,
        equations=equations,
        extra_equations=extra,
        column_map=dict(doc["column_map"]),
        row_map=doc.get("row_map"),
        group_map=doc.get("group_map"),
    )


def _ncr(n, r):
    if r < 0 or r > n:
        return 0
    out = 1
    for i in range(r):
        out = out * (n - i) // (i + 1)
    return out
