"""Reading and writing similarity matrices, permutations and benchmark results.

Formats
-------
dense
    One matrix row per line, comma-separated reals.
coo
    Lines ``i j value`` (whitespace-separated, 0-based). ``#`` starts a
    comment. On save only the upper triangle is written, preceded by a
    ``# n=<size>`` header so that trailing isolated items survive a round
    trip. On load the matrix is symmetrized by the entrywise maximum.
permutation
    One 0-based index per line.
results
    CSV with header ``matrix,n,noise,trial,seed,method,k,d,scaling,score,seconds``.
"""
import csv
import math
import re
import warnings
from dataclasses import astuple, dataclass, fields

import numpy as np
import scipy.sparse as sp

from .errors import AsymmetryWarning, NotBijective, ParseError
from .matgen import as_dense

FORMATS = ("dense", "coo")
_HEADER_RE = re.compile(r"#\s*n\s*=\s*(\d+)")


def _fmt(x):
    return repr(float(x))


def _parse_float(tok, line, column):
    try:
        v = float(tok)
    except ValueError:
        raise ParseError("cannot parse %r as a number" % tok, line, column) from None
    if not math.isfinite(v):
        raise ParseError("non-finite value %r" % tok, line, column)
    return v


def _parse_index(tok, line, column):
    try:
        v = int(tok)
    except ValueError:
        raise ParseError("cannot parse %r as an index" % tok, line, column) from None
    if v < 0:
        raise ParseError("negative index %d" % v, line, column)
    return v


def format_from_path(path):
    """Guess ``"dense"`` or ``"coo"`` from the file extension."""
    name = str(path).lower()
    if name.endswith((".coo", ".txt", ".mtx", ".tsv")):
        return "coo"
    return "dense"


def _check_format(fmt):
    if fmt not in FORMATS:
        raise ValueError("unknown matrix format %r (expected one of %s)" % (fmt, ", ".join(FORMATS)))


def load_matrix(path, fmt=None):
    """Load a similarity matrix as a dense array.

    Raises
    ------
    ParseError
        On malformed content, with the offending line and column (1-based).
    """
    fmt = format_from_path(path) if fmt is None else fmt
    _check_format(fmt)
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if fmt == "dense":
        return _parse_dense(text)
    return _parse_coo(text)


def _parse_dense(text):
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            continue
        toks = raw.split(",")
        row = [_parse_float(t.strip(), lineno, c) for c, t in enumerate(toks, 1)]
        if rows and len(row) != len(rows[0]):
            raise ParseError("expected %d columns, found %d" % (len(rows[0]), len(row)), lineno, len(row))
        rows.append(row)
    if not rows:
        raise ParseError("empty matrix file", 1, 1)
    A = np.array(rows, dtype=np.float64)
    if A.shape[0] != A.shape[1]:
        raise ParseError("matrix is %dx%d, not square" % A.shape, len(rows), 1)
    if not np.allclose(A, A.T, rtol=0, atol=1e-9):
        warnings.warn("input matrix is not symmetric; averaging with its transpose", AsymmetryWarning,
                      stacklevel=3)
        A = 0.5 * (A + A.T)
    return A


def _parse_coo(text):
    ii, jj, vv = [], [], []
    n = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        body, _, comment = raw.partition("#")
        if not body.strip():
            m = _HEADER_RE.match(raw.strip())
            if m:
                n = max(n, int(m.group(1)))
            continue
        toks = body.split()
        if len(toks) != 3:
            raise ParseError("expected 'i j value', found %d fields" % len(toks), lineno, 1)
        i = _parse_index(toks[0], lineno, 1)
        j = _parse_index(toks[1], lineno, 2)
        v = _parse_float(toks[2], lineno, 3)
        ii.append(i)
        jj.append(j)
        vv.append(v)
    if ii:
        n = max(n, max(ii) + 1, max(jj) + 1)
    if n == 0:
        raise ParseError("no entries and no size header", 1, 1)
    # duplicates and mirrored entries resolve to the maximum; absent entries are 0
    A = np.full((n, n), -np.inf)
    ii, jj, vv = np.asarray(ii, dtype=np.int64), np.asarray(jj, dtype=np.int64), np.asarray(vv)
    np.maximum.at(A, (ii, jj), vv)
    np.maximum.at(A, (jj, ii), vv)
    A[np.isinf(A)] = 0.0
    return A


def save_matrix(A, path, fmt=None):
    """Write ``A`` so that :func:`load_matrix` returns it exactly."""
    fmt = format_from_path(path) if fmt is None else fmt
    _check_format(fmt)
    if fmt == "dense":
        W = as_dense(A)
        with open(path, "w", encoding="utf-8") as fh:
            for row in W:
                fh.write(",".join(_fmt(x) for x in row))
                fh.write("\n")
        return
    if sp.issparse(A):
        C = sp.triu(sp.coo_matrix(A)).tocsr()
        C.sum_duplicates()
        C = C.tocoo()
        n = A.shape[0]
        entries = sorted(zip(C.row.tolist(), C.col.tolist(), C.data.tolist()))
        entries = [e for e in entries if e[2] != 0]
    else:
        W = np.asarray(A, dtype=np.float64)
        n = W.shape[0]
        ii, jj = np.nonzero(np.triu(W))
        entries = [(int(i), int(j), float(W[i, j])) for i, j in zip(ii, jj)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# n=%d\n" % n)
        for i, j, v in entries:
            fh.write("%d %d %s\n" % (i, j, _fmt(v)))


def save_permutation(p, path):
    p = np.asarray(p, dtype=np.int64)
    with open(path, "w", encoding="utf-8") as fh:
        for x in p:
            fh.write("%d\n" % x)


def load_permutation(path):
    """Read a permutation, one index per line.

    Raises
    ------
    ParseError
        On a non-integer line.
    NotBijective
        If the indices are not exactly ``0..n-1``.
    """
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            tok = raw.strip()
            if not tok:
                continue
            try:
                out.append(int(tok))
            except ValueError:
                raise ParseError("cannot parse %r as an index" % tok, lineno, 1) from None
    p = np.asarray(out, dtype=np.int64)
    n = p.size
    if n == 0:
        raise NotBijective("empty permutation")
    if p.min() < 0 or p.max() >= n or np.unique(p).size != n:
        raise NotBijective("indices are not a permutation of 0..%d" % (n - 1))
    return p


# --------------------------------------------------------------------------
# benchmark results


@dataclass
class TrialResult:
    matrix: str
    n: int
    noise: float
    trial: int
    seed: int
    method: str
    k: int
    d: int
    scaling: str
    score: float
    seconds: float


RESULT_COLUMNS = tuple(f.name for f in fields(TrialResult))
_FLOAT_COLUMNS = {"noise", "score", "seconds"}
_INT_COLUMNS = {"n", "trial", "seed", "k", "d"}


def _cell(name, value):
    if name in _FLOAT_COLUMNS:
        return "%.17g" % float(value)
    return str(value)


def write_results(rows, path):
    """Write trial rows as CSV, floats with 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for r in rows:
            w.writerow([_cell(name, v) for name, v in zip(RESULT_COLUMNS, astuple(r))])


def read_results(path):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != RESULT_COLUMNS:
            raise ParseError("unexpected results header", 1, 1)
        out = []
        for lineno, rec in enumerate(reader, 2):
            if len(rec) != len(RESULT_COLUMNS):
                raise ParseError("expected %d columns" % len(RESULT_COLUMNS), lineno, len(rec))
            vals = {}
            for name, v in zip(RESULT_COLUMNS, rec):
                if name in _FLOAT_COLUMNS:
                    vals[name] = float(v)
                elif name in _INT_COLUMNS:
                    vals[name] = int(v)
                else:
                    vals[name] = v
            out.append(TrialResult(**vals))
    return out
