"""Render publication-style figures from bolax CSV outputs.

Each figure kind names the CSV columns it needs; a mismatch is a schema
error.  Inputs are never modified and re-rendering an unchanged CSV yields
the same image.  When a manifest.json sits next to the input CSV its hash
prefix is stamped into the figure footer for provenance.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("spectrum_ladder", "gap_decay", "kappa_window", "mu_vs_q",
         "norm_vs_q", "xi_trace")

_REQUIRED = {
    "spectrum_ladder": ("n", "lambda", "gamma"),
    "gap_decay": ("n", "gamma"),
    "kappa_window": ("n", "kappa"),
    "mu_vs_q": ("q", "mu_q"),
    "norm_vs_q": ("q", "eps", "norm_sqrtlog"),
    "xi_trace": ("t", "xi_re", "xi_im"),
}


class SchemaError(ValueError):
    """Input CSV does not carry the columns the figure kind needs."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    csv_path: str
    out_path: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; have {KINDS}")


def load_columns(path, names):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        missing = [c for c in names if c not in fields]
        if missing:
            raise SchemaError(f"{path}: missing columns {missing} (have {fields})")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return {c: np.array([float(r[c]) for r in rows]) for c in names}


def _footer(ax, csv_path):
    manifest = Path(csv_path).parent / "manifest.json"
    if manifest.exists():
        digest = hashlib.sha256(manifest.read_bytes()).hexdigest()[:12]
        ax.figure.text(0.99, 0.01, f"manifest {digest}", ha="right", va="bottom",
                       fontsize=6, color="0.5")


def render(spec: FigureSpec) -> dict:
    """Write the figure; returns a summary of the plotted series."""
    cols = load_columns(spec.csv_path, _REQUIRED[spec.kind])
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    summary = {"kind": spec.kind, "points": len(next(iter(cols.values())))}
    if spec.kind == "spectrum_ladder":
        n, lam = cols["n"], cols["lambda"]
        lam0 = lam[n == 0][0] if np.any(n == 0) else lam.min()
        ax.plot(n, lam, "o", ms=3, label="eigenvalues")
        ax.plot(n, n, "-", lw=1, color="0.4", label="upper bound n")
        ax.plot(n, n + lam0, "--", lw=1, color="0.6",
                label="lower bound n + lambda_0")
        ax.set_xlabel("mode n")
        ax.set_ylabel("lambda_n")
        ax.legend(fontsize=8)
        summary["max_dist_to_line"] = float(np.max(np.abs(lam - n)))
    elif spec.kind == "gap_decay":
        n, g = cols["n"], cols["gamma"]
        keep = (n >= 1) & (g > 0)
        ax.semilogy(n[keep], g[keep], "o-", ms=3)
        ax.set_xlabel("mode n")
        ax.set_ylabel("gap gamma_n")
    elif spec.kind == "kappa_window":
        n, kap = cols["n"], cols["kappa"]
        keep = n >= 1
        ax.plot(n[keep], n[keep] * kap[keep], "o-", ms=3)
        ax.set_xlabel("mode n")
        ax.set_ylabel("n kappa_n")
    elif spec.kind == "mu_vs_q":
        q, mu = cols["q"], cols["mu_q"]
        keep = np.isfinite(mu)
        if not np.any(keep):
            raise SchemaError(f"{spec.csv_path}: no finite mu_q values")
        order = np.argsort(q[keep])
        ax.plot(q[keep][order], mu[keep][order], "o-")
        ax.set_xlabel("q")
        ax.set_ylabel("escaping eigenvalue mu_q")
        summary["monotone"] = bool(np.all(np.diff(mu[keep][order]) > 0))
    elif spec.kind == "norm_vs_q":
        q, norm = cols["q"], cols["norm_sqrtlog"]
        order = np.argsort(q)
        ax.plot(q[order], norm[order], "o-", label="|u|_{-1/2,sqrt-log}")
        ax.set_xlabel("q")
        ax.set_ylabel("norm")
        ax.legend(fontsize=8)
    elif spec.kind == "xi_trace":
        t, re, im = cols["t"], cols["xi_re"], cols["xi_im"]
        ax.plot(t, re, label="Re xi")
        ax.plot(t, im, label="Im xi")
        ax.plot(t, np.hypot(re, im), "--", color="0.5", label="|xi|")
        ax.set_xlabel("t")
        ax.set_ylabel("xi(t) = u_hat(1)(t)")
        ax.legend(fontsize=8)
        # dominant angular rate from the phase increments, for the summary
        phase = np.unwrap(np.angle(re + 1j * im))
        if t.size > 1:
            summary["mean_angular_rate"] = float(
                (phase[-1] - phase[0]) / (t[-1] - t[0]))
    _footer(ax, spec.csv_path)
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=110)
    plt.close(fig)
    return summary
