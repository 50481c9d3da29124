"""Matrix files, bound reports, and their canonical serializations.

Matrix files are UTF-8 JSON::

    {"n": 2, "entries": [[[2, 0], [1, 0]], [[1, 0], [2, 0]]], "metadata": {...}}

with each entry stored as a ``[re, im]`` pair.
"""

import csv
import dataclasses
import hashlib
import io
import json
import math
from pathlib import Path

import numpy as np

from .certificates import EULER_GAMMA, extract_rank1, gurvits_estimate, marcus_bounds
from .errors import ParseError
from .linalg import TOL_PSD, admit_hermitian_psd, cholesky_factor
from .permanent import per_psd_log
from .relaxation import SolverOptions, rel_solve
from .tightness import RatioRow

RATIO_CSV_HEADER = ["n", "d", "k", "seed", "log_rel", "log_per", "per_method", "ratio_root", "std_err_rel"]
EXACT_PER_MAX_N = 20


@dataclasses.dataclass
class LoadedMatrix:
    A: np.ndarray
    digest: str
    metadata: dict


def _read_bytes(source):
    if hasattr(source, "read"):
        data = source.read()
        return data.encode("utf-8") if isinstance(data, str) else data
    return Path(source).read_bytes()


def _decode_entries(doc):
    if not isinstance(doc, dict):
        raise ParseError("matrix file must be a JSON object")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError(f"'n' must be a positive integer, got {n!r}")
    entries = doc.get("entries")
    if not isinstance(entries, list) or len(entries) != n:
        raise ParseError(f"'entries' must be a list of {n} rows")
    raw = np.empty((n, n), dtype=complex)
    for i, row in enumerate(entries):
        if not isinstance(row, list) or len(row) != n:
            raise ParseError(f"row {i} must have {n} entries")
        for j, pair in enumerate(row):
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or not all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in pair)
            ):
                raise ParseError(f"entry ({i},{j}) must be a [re, im] pair of numbers")
            if not all(math.isfinite(p) for p in pair):
                raise ParseError(f"entry ({i},{j}) is not finite")
            raw[i, j] = complex(pair[0], pair[1])
    return raw


def parse_matrix_document(data, tol_psd=TOL_PSD):
    try:
        doc = json.loads(data.decode("utf-8") if isinstance(data, bytes) else data)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    raw = _decode_entries(doc)
    return admit_hermitian_psd(raw, tol_psd), doc.get("metadata") or {}


def parse_matrix(source, tol_psd=TOL_PSD):
    """Read a matrix file (path or stream) and admit it as hermitian PSD.

    Raises :class:`ParseError` for malformed documents and the
    :class:`ValidationError` subclasses ``NotHermitian`` / ``NotPSD``.
    """
    return load_matrix(source, tol_psd).A


def load_matrix(source, tol_psd=TOL_PSD):
    data = _read_bytes(source)
    A, metadata = parse_matrix_document(data, tol_psd)
    return LoadedMatrix(A=A, digest=hashlib.sha256(data).hexdigest(), metadata=metadata)


def matrix_document(A, metadata=None):
    A = np.asarray(A, dtype=complex)
    doc = {
        "n": int(A.shape[0]),
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in A],
    }
    if metadata:
        doc["metadata"] = metadata
    return doc


def write_matrix(A, path, metadata=None):
    # json writes floats with repr, which round-trips every double exactly
    Path(path).write_text(json.dumps(matrix_document(A, metadata)) + "\n", encoding="utf-8")


def decimal_string(log_value):
    """Courtesy ``"≈ X.XXXe±YY"`` for a log value, or None when it does not fit a double."""
    if log_value is None or log_value == -math.inf:
        return "≈ 0"
    if log_value > 709.0:
        return None
    return f"≈ {math.exp(log_value):.3e}"


@dataclasses.dataclass
class BoundReport:
    input_digest: str
    n: int
    rank: int
    log_rel: float
    log_marcus_lo: float
    log_marcus_hi: float
    guarantee_per_n: float
    seed: int
    tolerances: dict
    log_per_exact: float | None = None
    log_lower_cert: float | None = None
    mc_estimate: dict | None = None
    gap_per_n: float | None = None
    orderings: dict = dataclasses.field(default_factory=dict)

    @property
    def orderings_hold(self):
        return all(self.orderings.values())

    def to_dict(self):
        out = dataclasses.asdict(self)
        out["decimals"] = {
            key: decimal_string(out[key])
            for key in ("log_rel", "log_per_exact", "log_lower_cert", "log_marcus_lo", "log_marcus_hi")
            if out[key] is not None
        }
        return out

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in dataclasses.fields(cls)}
        kwargs = {k: v for k, v in data.items() if k in names}
        # JSON carries log(0) = -inf as null; the decimal string tells zero from absent
        zeros = {k for k, v in data.get("decimals", {}).items() if v == "≈ 0"}
        for key in ("log_rel", "log_per_exact", "log_lower_cert", "log_marcus_lo", "log_marcus_hi"):
            if kwargs.get(key) is None and (key in zeros or key in ("log_rel", "log_marcus_lo", "log_marcus_hi")):
                kwargs[key] = -math.inf
        return cls(**kwargs)


def _ordered(a, b, slack):
    # a <= b in log domain, treating -inf as zero
    return bool(a == -math.inf or a <= b + slack)


def build_bound_report(A, digest, seed, opts=None, mc_samples=10_000, cert_samples=512):
    """Everything the input size permits: relaxation, exact permanent, certificate, estimate."""
    opts = opts or SolverOptions()
    n = A.shape[0]
    lo, hi = marcus_bounds(A)
    sol = rel_solve(A, opts)
    factor = cholesky_factor(A)
    report = BoundReport(
        input_digest=digest,
        n=n,
        rank=factor.d if not sol.degenerate else int(np.linalg.matrix_rank(A)),
        log_rel=sol.log_rel,
        log_marcus_lo=lo.log,
        log_marcus_hi=hi.log,
        guarantee_per_n=EULER_GAMMA + 1.0,
        seed=int(seed),
        tolerances={"tol_opt": opts.tol_opt, "tol_feas": opts.tol_feas, "tol_psd": TOL_PSD},
    )
    if n <= EXACT_PER_MAX_N:
        report.log_per_exact = per_psd_log(A).log
    if not sol.degenerate:
        cert = extract_rank1(A, sol, n_samples=cert_samples, seed=seed)
        report.log_lower_cert = cert.log_lower.log
        report.gap_per_n = round((sol.log_rel - cert.log_lower.log) / n, 6)
    est = gurvits_estimate(factor, mc_samples, seed=seed)
    report.mc_estimate = {"mean_log": est.mean_log, "std_err_rel": est.std_err_rel, "samples": est.samples}

    checks = {"marcus_lo<=rel": _ordered(report.log_marcus_lo, report.log_rel, 1e-6)}
    if report.log_per_exact is not None:
        per = report.log_per_exact
        checks["marcus_lo<=per"] = _ordered(report.log_marcus_lo, per, 1e-9)
        checks["per<=marcus_hi"] = _ordered(per, report.log_marcus_hi, 1e-9)
        checks["per<=rel"] = _ordered(per, report.log_rel, 1e-6)
        if report.log_lower_cert is not None:
            checks["lower<=per"] = _ordered(report.log_lower_cert, per, 1e-6)
    if report.log_lower_cert is not None:
        checks["lower<=rel"] = _ordered(report.log_lower_cert, report.log_rel, 1e-6)
    report.orderings = checks
    return report


def _canonical(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(f"{obj:.12g}")
    if isinstance(obj, (np.floating, np.integer)):
        return _canonical(obj.item())
    if isinstance(obj, dict):
        return {str(k): _canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _canonical(obj.tolist())
    if isinstance(obj, complex):
        return [_canonical(obj.real), _canonical(obj.imag)]
    return obj


def _as_plain(report):
    if isinstance(report, BoundReport):
        return report.to_dict()
    if dataclasses.is_dataclass(report):
        return dataclasses.asdict(report)
    if isinstance(report, list) and report and isinstance(report[0], RatioRow):
        return [dataclasses.asdict(r) for r in report]
    return report


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def emit_report(report, fmt="json"):
    """Serialize a report, a list of :class:`RatioRow`, or a plain dict to bytes.

    JSON is canonical (sorted keys, floats rounded to 12 significant digits,
    non-finite values as ``null``). Row lists in CSV use the fixed ratio header.
    """
    rows = isinstance(report, list) and (not report or isinstance(report[0], RatioRow))
    if fmt == "json":
        text = json.dumps(_canonical(_as_plain(report)), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if rows:
            writer.writerow(RATIO_CSV_HEADER)
            for r in report:
                writer.writerow([_fmt(getattr(r, col)) for col in RATIO_CSV_HEADER])
        else:
            writer.writerow(["key", "value"])
            for key, value in sorted(_flatten(_canonical(_as_plain(report))).items()):
                writer.writerow([key, "" if value is None else value])
        text = buf.getvalue()
    elif fmt == "text":
        if rows:
            lines = ["  ".join(f"{c:>11}" for c in RATIO_CSV_HEADER)]
            lines += ["  ".join(f"{_fmt(getattr(r, c)):>11}" for c in RATIO_CSV_HEADER) for r in report]
        else:
            flat = _flatten(_as_plain(report))
            width = max((len(k) for k in flat), default=0)
            lines = [f"{k:<{width}}  {_fmt(v)}" for k, v in flat.items()]
        text = "\n".join(lines) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return text.encode("utf-8")


def _flatten(obj, prefix=""):
    out = {}
    if isinstance(obj, dict):
        for k, v in obj.items():
            out.update(_flatten(v, f"{prefix}{k}."))
        return out
    out[prefix[:-1]] = obj
    return out


def read_ratio_csv(text):
    """Parse a ratio CSV back into :class:`RatioRow` objects."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != RATIO_CSV_HEADER:
        raise ParseError(f"unexpected CSV header {reader.fieldnames}")
    rows = []
    for rec in reader:
        rows.append(
            RatioRow(
                n=int(rec["n"]),
                d=int(rec["d"]),
                k=int(rec["k"]),
                seed=int(rec["seed"]),
                log_rel=float(rec["log_rel"]),
                log_per=float(rec["log_per"]),
                per_method=rec["per_method"],
                ratio_root=float(rec["ratio_root"]),
                std_err_rel=float(rec["std_err_rel"]),
            )
        )
    return rows

