"""Markdown report rendering from a result store.

The report inlines every table (for external plotting, no plotting
dependency here), echoes the resolved configuration, restates slope fits
against their frozen bands, and reduces all table-level pass flags to a
single conjunction.  Missing pieces are listed rather than fatal: a
partial store still renders.
"""

from __future__ import annotations

from . import probe
from .store import ResultStore

# Order in which known tables appear; unknown tables follow alphabetically.
_TABLE_ORDER = ("rates", "inflation", "jk", "commutator", "v0_profile",
                "lemmas", "norms", "diagnostics")


def _config_section(manifest) -> list[str]:
    lines = ["## Configuration", ""]
    if not manifest:
        lines += ["_no results: manifest.json missing_", ""]
        return lines
    cfg = manifest.get("config", {})
    lines.append("```")
    lines.append("command: " + " ".join(manifest.get("argv", [])))
    for key in sorted(cfg):
        lines.append(f"{key}: {cfg[key]}")
    lines.append("```")
    lines.append("")
    return lines


def _table_section(store: ResultStore, name: str) -> list[str]:
    header, rows = store.read_table(name)
    lines = [f"## Table: {name}", ""]
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "---|" * len(header))
    for row in rows:
        lines.append("| " + " | ".join(c if c else " " for c in row) + " |")
    lines += ["", "Raw CSV for plotting:", "", "```csv",
              ",".join(header)]
    lines += [",".join(row) for row in rows]
    lines += ["```", ""]
    return lines


def _band_line(label: str, value, band) -> tuple[str, bool]:
    ok = band[0] <= value <= band[1]
    return (f"- {label} = {value:.6g}, band [{band[0]}, {band[1]}]: "
            f"{'PASS' if ok else 'FAIL'}", ok)


def _summary_section(summary) -> tuple[list[str], list[bool]]:
    lines = ["## Checks", ""]
    flags: list[bool] = []
    if not summary:
        lines += ["_no results: summary.json missing_", ""]
        return lines, flags
    if "slope_dev_s1" in summary:
        line, ok = _band_line("slope_dev_s1", summary["slope_dev_s1"],
                              probe.RATE1_BAND)
        lines.append(line)
        flags.append(ok)
    if "slope_h_s2" in summary:
        line, ok = _band_line("slope_h_s2", summary["slope_h_s2"],
                              probe.RATE2_BAND)
        lines.append(line)
        flags.append(ok)
    if "slope_j1" in summary:
        line, ok = _band_line("slope_j1", summary["slope_j1"],
                              probe.J1_SLOPE_BAND)
        lines.append(line)
        flags.append(ok)
    if "v0_slope" in summary:
        line, ok = _band_line("v0_slope", summary["v0_slope"],
                              probe.V0_SLOPE_BAND)
        lines.append(line)
        flags.append(ok)
    if "commutator_slope" in summary:
        ok = summary["commutator_slope"] <= probe.FLATNESS_MAX
        lines.append(f"- commutator_slope = {summary['commutator_slope']:.6g}, "
                     f"max {probe.FLATNESS_MAX}: {'PASS' if ok else 'FAIL'}")
        flags.append(ok)
    if "ratio" in summary:
        ok = summary["ratio"] >= probe.INFLATION_MIN_RATIO
        lines.append(f"- inflation min/max = {summary.get('min_dev', 0):.6g}"
                     f"/{summary.get('max_dev', 0):.6g}, ratio = "
                     f"{summary['ratio']:.6g} >= {probe.INFLATION_MIN_RATIO}: "
                     f"{'PASS' if ok else 'FAIL'}")
        flags.append(ok)
        if "u0_norm" in summary:
            floor = probe.INFLATION_FLOOR_FRACTION * summary["u0_norm"]
            ok = summary.get("min_dev", 0.0) >= floor
            lines.append(f"- inflation floor: min_dev >= {floor:.6g} "
                         f"(0.01 x u0 norm): {'PASS' if ok else 'FAIL'}")
            flags.append(ok)
    if "anchor_rel_error" in summary:
        ok = summary["anchor_rel_error"] <= 0.01
        lines.append(f"- c0 anchor relative error = "
                     f"{summary['anchor_rel_error']:.3e} <= 1e-2: "
                     f"{'PASS' if ok else 'FAIL'}")
        flags.append(ok)
    if "c0" in summary:
        lines.append(f"- c0 = {summary['c0']!r}, delta = "
                     f"{summary.get('delta')!r}")
    if "kappa" in summary:
        lines.append(f"- kappa (peak norm growth factor) = "
                     f"{summary['kappa']:.6g}")
    if "eps0" in summary:
        lines.append(f"- eps0 = {summary['eps0']!r}")
    if "pass" in summary:
        flags.append(bool(summary["pass"]))
    lines.append("")
    return lines, flags


def render_report(store: ResultStore) -> str:
    manifest = store.manifest()
    summary = store.summary()
    names = store.table_names()
    ordered = [n for n in _TABLE_ORDER if n in names]
    ordered += [n for n in names if n not in _TABLE_ORDER]

    lines = ["# Run report", ""]
    lines += _config_section(manifest)
    if ordered:
        for name in ordered:
            lines += _table_section(store, name)
    else:
        lines += ["## Tables", "", "_no results: no tables present_", ""]
    check_lines, flags = _summary_section(summary)
    lines += check_lines

    missing = [n for n in ("manifest.json", "summary.json")
               if (store.root / n).is_file() is False]
    if not ordered:
        missing.append("tables/*.csv")
    if missing:
        lines += ["## Missing", ""]
        lines += [f"- {m}" for m in missing]
        lines.append("")

    if flags:
        overall = all(flags)
        lines += [f"**Overall: {'PASS' if overall else 'FAIL'}**", ""]
    return "\n".join(lines)
