"""Persistent zero database, resumable scans, report and plot-data files.

A scan of one (q, chi, fn) lives in two files:

* ``<path>``: JSONL, one zero per line, append-only;
* ``<path>.manifest.json``: bands done so far, the contiguous verified
  height ``T_done``, the config digest and ``committed_bytes``, the length
  of the JSONL prefix that belongs to completed bands.

A band is committed by appending its zeros, fsyncing, and then atomically
replacing the manifest. Bytes past ``committed_bytes`` can only come from a
band interrupted between those two steps, so they are truncated on reopen.
"""

from __future__ import annotations

import contextlib
import csv
import fcntl
import hashlib
import io
import json
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .characters import DirichletCharacter, get_character
from .errors import ConfigMismatch, DomainError, StoreCorrupted, StoreError
from .evaluator import DEFAULT_CONFIG, EvalConfig
from .theorems import ResidualReport, STATISTICS, verify_counting, verify_n, verify_offset_sum
from .zerofinder import (
    BAND_HEIGHT,
    JITTER_RETRIES,
    MIN_BOX,
    SCAN_SIGMA_MIN,
    SPLIT_SIGMA,
    SPLIT_T,
    BandResult,
    ScanResult,
    ZeroRecord,
    band_edges,
    run_bands,
    scan_sigma_range,
    sort_zeros,
)

FORMAT_VERSION = 1
REPORT_COLUMNS = ("statistic", "q", "chi_index", "T", "measured", "main_term", "residual", "band", "pass")
PLOT_COLUMNS = ("T", "measured", "main", "residual")


def scan_cfg_hash(cfg: EvalConfig, fn: str, seed: int = 0) -> str:
    """Digest of everything that can change which zeros a scan reports."""
    params = {
        "eval": cfg.digest(), "fn": fn, "seed": seed, "band_height": BAND_HEIGHT,
        "sigma_min": SCAN_SIGMA_MIN, "split": [SPLIT_SIGMA, SPLIT_T],
        "min_box": MIN_BOX, "jitter_retries": JITTER_RETRIES, "format_version": FORMAT_VERSION,
    }
    return hashlib.sha256(json.dumps(params, sort_keys=True).encode()).hexdigest()[:32]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# manifest
# ---------------------------------------------------------------------------

@dataclass
class ScanManifest:
    q: int
    chi_index: int
    fn: str
    cfg_hash: str
    T_done: float = 0.0
    bands: list[tuple[float, float, str]] = field(default_factory=list)
    format_version: int = FORMAT_VERSION
    committed_bytes: int = 0

    def validate(self) -> None:
        if self.format_version != FORMAT_VERSION:
            raise StoreCorrupted(f"unsupported format_version {self.format_version}")
        if self.fn not in ("L", "Lprime"):
            raise StoreCorrupted(f"bad fn {self.fn!r}")
        prev = 0.0
        for lo, hi, status in self.bands:
            if lo < prev - 1e-12 or hi <= lo or status not in ("done", "failed"):
                raise StoreCorrupted(f"bands not disjoint and sorted at ({lo}, {hi}, {status})")
            prev = hi
        if abs(self.contiguous_done() - self.T_done) > 1e-12:
            raise StoreCorrupted("T_done disagrees with the band list")

    def contiguous_done(self) -> float:
        done = 0.0
        for lo, hi, status in self.bands:
            if status != "done" or lo > done + 1e-12:
                break
            done = hi
        return done

    def to_json(self) -> dict:
        return {"q": self.q, "chi_index": self.chi_index, "fn": self.fn, "T_done": self.T_done,
                "bands": [list(b) for b in self.bands], "cfg_hash": self.cfg_hash,
                "format_version": self.format_version, "committed_bytes": self.committed_bytes}

    @classmethod
    def from_json(cls, obj: dict) -> "ScanManifest":
        try:
            m = cls(q=int(obj["q"]), chi_index=int(obj["chi_index"]), fn=str(obj["fn"]),
                    cfg_hash=str(obj["cfg_hash"]), T_done=float(obj["T_done"]),
                    bands=[(float(a), float(b), str(c)) for a, b, c in obj["bands"]],
                    format_version=int(obj["format_version"]),
                    committed_bytes=int(obj["committed_bytes"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise StoreCorrupted(f"malformed manifest: {exc}") from exc
        m.validate()
        return m


def _atomic_write(path: str, text: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# zero store
# ---------------------------------------------------------------------------

class ZeroStore:
    """Single-writer JSONL zero file with its manifest."""

    def __init__(self, path: str):
        self.path = os.fspath(path)
        self.manifest_path = self.path + ".manifest.json"
        self.lock_path = self.path + ".lock"

    # -- locking ----------------------------------------------------------
    @contextlib.contextmanager
    def locked(self):
        fh = open(self.lock_path, "a+")
        try:
            try:
                fcntl.flock(fh.fileno(), fcntl.LOCK_EX | fcntl.LOCK_NB)
            except BlockingIOError as exc:
                raise StoreError(f"{self.path} is being written by another process") from exc
            yield self
        finally:
            fcntl.flock(fh.fileno(), fcntl.LOCK_UN)
            fh.close()

    # -- manifest ---------------------------------------------------------
    def exists(self) -> bool:
        return os.path.exists(self.manifest_path)

    def read_manifest(self) -> ScanManifest:
        try:
            with open(self.manifest_path, encoding="utf-8") as fh:
                obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise StoreCorrupted(f"manifest {self.manifest_path} is not JSON: {exc}") from exc
        return ScanManifest.from_json(obj)

    def write_manifest(self, manifest: ScanManifest) -> None:
        manifest.validate()
        _atomic_write(self.manifest_path, json.dumps(manifest.to_json(), indent=1) + "\n")

    def open(self, chi: DirichletCharacter, fn: str, cfg_hash: str) -> ScanManifest:
        """Create or reopen; checks identity and config, trims any uncommitted tail."""
        if not self.exists():
            if os.path.exists(self.path) and os.path.getsize(self.path) > 0:
                raise StoreError(f"{self.path} exists without a manifest; refusing to overwrite")
            open(self.path, "w").close()
            m = ScanManifest(chi.q, chi.index, fn, cfg_hash)
            self.write_manifest(m)
            return m
        m = self.read_manifest()
        if (m.q, m.chi_index, m.fn) != (chi.q, chi.index, fn):
            raise ConfigMismatch(
                f"{self.path} holds q={m.q} chi={m.chi_index} fn={m.fn}, "
                f"not q={chi.q} chi={chi.index} fn={fn}")
        if m.cfg_hash != cfg_hash:
            raise ConfigMismatch(
                f"{self.path} was scanned with config {m.cfg_hash}, current config is {cfg_hash}; "
                "resuming would mix accuracies. Use the original settings or a new --out path.")
        size = os.path.getsize(self.path) if os.path.exists(self.path) else 0
        if size < m.committed_bytes:
            self._quarantine()
            raise StoreCorrupted(f"{self.path} is shorter than its committed length")
        if size > m.committed_bytes:
            with open(self.path, "r+b") as fh:
                fh.truncate(m.committed_bytes)
        return m

    # -- records ----------------------------------------------------------
    def _quarantine(self) -> str:
        n = 0
        while os.path.exists(f"{self.path}.quarantine.{n}"):
            n += 1
        dest = f"{self.path}.quarantine.{n}"
        os.replace(self.path, dest)
        return dest

    def load_zeros(self, manifest: ScanManifest | None = None) -> list[ZeroRecord]:
        """All committed records, each re-validated."""
        m = manifest or self.read_manifest()
        with open(self.path, "rb") as fh:
            data = fh.read(m.committed_bytes)
        out = []
        for lineno, raw in enumerate(data.splitlines(), 1):
            try:
                rec = ZeroRecord.from_json(json.loads(raw))
                if (rec.q, rec.chi_index, rec.function_tag) != (m.q, m.chi_index, m.fn):
                    raise DomainError("record does not belong to this scan")
            except (ValueError, TypeError, KeyError) as exc:
                dest = self._quarantine()
                raise StoreCorrupted(f"{self.path}:{lineno}: {exc}; file moved to {dest}") from exc
            out.append(rec)
        return sort_zeros(out)

    def commit_band(self, manifest: ScanManifest, band: BandResult,
                    hook: Callable[[str, BandResult], None] | None = None) -> ScanManifest:
        if band.status == "done":
            payload = "".join(json.dumps(z.to_json()) + "\n" for z in band.zeros).encode()
            with open(self.path, "ab") as fh:
                fh.write(payload)
                fh.flush()
                os.fsync(fh.fileno())
            manifest.committed_bytes += len(payload)
        if hook:
            hook("data_written", band)
        manifest.bands = [b for b in manifest.bands if b[0] < band.t_lo - 1e-12]
        manifest.bands.append((band.t_lo, band.t_hi, band.status))
        manifest.T_done = manifest.contiguous_done()
        self.write_manifest(manifest)
        if hook:
            hook("committed", band)
        return manifest

    def as_scan_result(self) -> ScanResult:
        m = self.read_manifest()
        zeros = self.load_zeros(m)
        s0, s1 = scan_sigma_range(m.fn, m.q)
        bands = [BandResult(lo, hi, st) for lo, hi, st in m.bands]
        return ScanResult(m.q, m.chi_index, m.fn, m.T_done, s0, s1, zeros, bands)


def resume_scan(path: str, chi: DirichletCharacter, fn: str, T_target: float,
                cfg: EvalConfig = DEFAULT_CONFIG, seed: int = 0, workers: int = 1,
                hook: Callable[[str, BandResult], None] | None = None
                ) -> tuple[ScanManifest, list[ZeroRecord]]:
    """Extend the scan stored at ``path`` to height ``T_target``.

    Only bands above T_done are computed. The first failing band is recorded
    and ends the run, so T_done never skips a gap. Returns the updated
    manifest and the newly appended zeros. ``hook(stage, band)`` is called
    at "data_written" and "committed" for crash-injection testing.
    """
    if T_target < 2:
        raise DomainError("T must be >= 2")
    if not chi.primitive:
        raise DomainError(f"{chi!r} is not primitive")
    store = ZeroStore(path)
    with store.locked():
        m = store.open(chi, fn, scan_cfg_hash(cfg, fn, seed))
        store.load_zeros(m)  # validate committed lines before appending
        todo = band_edges(m.T_done, T_target)
        new: list[ZeroRecord] = []
        if not todo:
            return m, new
        stop = False

        def on_band(band: BandResult):
            nonlocal stop
            if stop:
                return
            store.commit_band(m, band, hook)
            if band.status == "done":
                new.extend(band.zeros)
            else:
                stop = True

        run_bands(chi, fn, todo, cfg, seed, workers, on_band)
        return m, sort_zeros(new)


def load_scan(path: str) -> ScanResult:
    return ZeroStore(path).as_scan_result()


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def _report_key(r: ResidualReport):
    return (r.statistic, r.q, r.chi_index, r.T)


def _report_cells(r: ResidualReport) -> list[str]:
    return [r.statistic, str(r.q), str(r.chi_index), _fmt(r.T), _fmt(r.measured),
            _fmt(r.main_term), _fmt(r.residual), _fmt(r.band), "true" if r.passed else "false"]


def format_reports(reports: Iterable[ResidualReport], fmt: str = "csv") -> str:
    rows = sorted(reports, key=_report_key)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for r in rows:
            w.writerow(_report_cells(r))
        return buf.getvalue()
    if fmt == "jsonl":
        lines = []
        for r in rows:
            cells = _report_cells(r)
            parts = [f'"statistic": {json.dumps(r.statistic)}', f'"q": {cells[1]}',
                     f'"chi_index": {cells[2]}']
            parts += [f'"{k}": {v}' for k, v in zip(REPORT_COLUMNS[3:8], cells[3:8])]
            parts.append(f'"pass": {cells[8]}')
            lines.append("{" + ", ".join(parts) + "}\n")
        return "".join(lines)
    raise DomainError("format must be csv or jsonl")


def emit_report(reports: Iterable[ResidualReport], fmt: str, path: str) -> str:
    text = format_reports(reports, fmt)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def _report_from_mapping(d: dict) -> ResidualReport:
    p = d["pass"]
    passed = p if isinstance(p, bool) else str(p).lower() == "true"
    if d["statistic"] not in STATISTICS:
        raise DomainError(f"unknown statistic {d['statistic']!r}")
    return ResidualReport(str(d["statistic"]), int(d["q"]), int(d["chi_index"]), float(d["T"]),
                          float(d["measured"]), float(d["main_term"]), float(d["residual"]),
                          float(d["band"]), passed)


def read_reports(path: str) -> list[ResidualReport]:
    """Parse a report file written by :func:`emit_report` (CSV or JSONL)."""
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    if text.startswith(",".join(REPORT_COLUMNS)):
        rows = list(csv.DictReader(io.StringIO(text)))
        if rows and list(rows[0]) != list(REPORT_COLUMNS):
            raise DomainError("unexpected CSV columns")
        return [_report_from_mapping(r) for r in rows]
    return [_report_from_mapping(json.loads(line)) for line in text.splitlines() if line.strip()]


# ---------------------------------------------------------------------------
# plot data
# ---------------------------------------------------------------------------

_VERIFIERS = {"N1": verify_counting, "offset_sum": verify_offset_sum, "N": verify_n}


def plot_rows(zeros_db: ScanResult, statistic: str, T_grid: Sequence[float],
              chi: DirichletCharacter | None = None) -> list[ResidualReport]:
    if statistic not in _VERIFIERS:
        raise DomainError(f"statistic must be one of {tuple(_VERIFIERS)}")
    chi = chi or get_character(zeros_db.q, zeros_db.chi_index)
    return [_VERIFIERS[statistic](chi, float(T), zeros_db) for T in T_grid]


def format_plotdata(reports: Sequence[ResidualReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PLOT_COLUMNS)
    for r in reports:
        w.writerow([_fmt(r.T), _fmt(r.measured), _fmt(r.main_term), _fmt(r.residual)])
    return buf.getvalue()


def emit_plotdata(zeros_db: ScanResult, statistic: str, T_grid: Sequence[float],
                  path: str | None = None) -> str:
    """CSV text with columns T, measured, main, residual; also written to ``path`` if given."""
    if any(not math.isfinite(T) for T in T_grid):
        raise DomainError("grid values must be finite")
    text = format_plotdata(plot_rows(zeros_db, statistic, T_grid))
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text
