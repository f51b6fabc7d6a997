"""Write grid results: metrics.json, per-cell confusion CSVs, the text table and the input manifest."""

import hashlib
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import pandas as pd

from domain.models import DatasetSample
from evaluation.grid import MODALITY_SETS, TARGETS, GridCell
from logging_config import get_logger, write_json_atomic

LOGGER = get_logger("evaluation.reporting")

CLASS_NAMES = {"arousal": ("low", "high"), "valence": ("negative", "positive")}
GENDERS = ("male", "female")


def _cell_payload(cell: GridCell) -> Dict[str, Any]:
    best = cell.best
    if best is None:
        return {"absent": cell.absent or "not evaluated"}
    return {
        "uar": best.uar,
        "confusion": best.confusion.tolist(),
        "model": best.model,
        "model_label": best.model_label,
        "hyperparams": [dict(h) for h in best.fold_hyperparams],
        "n_samples": best.n_samples,
        "folds": [
            {"fold": f.fold, "test_couples": list(f.test_couples), "train_couples": list(f.train_couples)}
            for f in best.folds
        ],
        "candidates": {r.model: r.uar for r in cell.reports},
    }


def metrics_payload(cells: Iterable[GridCell]) -> Dict[str, Any]:
    """gender -> target -> modality set -> best-model summary."""
    out: Dict[str, Any] = {}
    for cell in cells:
        out.setdefault(cell.gender, {}).setdefault(cell.target, {})[cell.modality_set] = _cell_payload(cell)
    return out


def confusion_frame(cm, target: str) -> pd.DataFrame:
    low, high = CLASS_NAMES[target]
    return pd.DataFrame(
        {
            "true": [low, high],
            f"pred_{low}": [int(cm[0][0]), int(cm[1][0])],
            f"pred_{high}": [int(cm[0][1]), int(cm[1][1])],
        }
    )


def render_table(payload: Dict[str, Any]) -> str:
    """Best UAR in percent per modality set from a metrics payload; absent cells show '-'."""
    columns = [(t, g) for t in TARGETS for g in GENDERS]
    present = [
        name
        for name in MODALITY_SETS
        if any(name in by_set for by_target in payload.values() for by_set in by_target.values())
    ]
    label_width = max([len("Modality")] + [len(MODALITY_SETS[n][1]) for n in present])
    header = "Modality".ljust(label_width) + "".join(f"  {t[:3]}-{g:<6}" for t, g in columns)
    lines = [header, "-" * len(header)]
    for name in present:
        row = MODALITY_SETS[name][1].ljust(label_width)
        for target, gender in columns:
            entry = payload.get(gender, {}).get(target, {}).get(name, {})
            text = f"{100.0 * entry['uar']:.1f}" if "uar" in entry else "-"
            row += f"  {text:>10}"
        lines.append(row)
    return "\n".join(lines) + "\n"


def best_per_target(cells: Sequence[GridCell]) -> Dict[str, GridCell]:
    """Single best cell per target across genders and modality sets (first wins ties)."""
    best: Dict[str, GridCell] = {}
    for cell in cells:
        if cell.best is None:
            continue
        current = best.get(cell.target)
        if current is None or cell.best.uar > current.best.uar:
            best[cell.target] = cell
    return best


def label_distribution(samples: Iterable[DatasetSample]) -> pd.DataFrame:
    rows: Dict[tuple, List[int]] = {}
    for sample in samples:
        for target in TARGETS:
            key = (sample.couple_id, sample.gender.value, target)
            counts = rows.setdefault(key, [0, 0])
            counts[sample.label.binary(target)] += 1
    frame = pd.DataFrame(
        [(c, g, t, n0, n1) for (c, g, t), (n0, n1) in sorted(rows.items())],
        columns=["couple_id", "gender", "target", "negative_or_low", "positive_or_high"],
    )
    return frame


def write_grid_report(out_dir: Path, cells: Sequence[GridCell], samples: Optional[Sequence[DatasetSample]] = None) -> List[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [out_dir / "metrics.json"]
    payload = metrics_payload(cells)
    write_json_atomic(written[0], payload)
    for cell in cells:
        best = cell.best
        if best is None:
            continue
        path = out_dir / f"confusion_{cell.key}.csv"
        confusion_frame(best.confusion, cell.target).to_csv(path, index=False)
        written.append(path)
    for target, cell in best_per_target(cells).items():
        frame = confusion_frame(cell.best.confusion, target)
        frame["gender"] = cell.gender
        frame["modality_set"] = cell.modality_set
        frame["model"] = cell.best.model_label
        path = out_dir / f"confusion_best_{target}.csv"
        frame.to_csv(path, index=False)
        written.append(path)
    table = out_dir / "table.txt"
    table.write_text(render_table(payload), encoding="utf-8")
    written.append(table)
    if samples is not None:
        path = out_dir / "label_distribution.csv"
        label_distribution(samples).to_csv(path, index=False)
        written.append(path)
    LOGGER.info("wrote %d report files to %s", len(written), out_dir)
    return written


def sha256_of(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def hash_inputs(paths: Iterable[Path]) -> Dict[str, str]:
    """SHA-256 per input file keyed by name; directories are walked in sorted order."""
    hashes: Dict[str, str] = {}
    for path in paths:
        path = Path(path)
        if path.is_dir():
            for child in sorted(p for p in path.rglob("*") if p.is_file()):
                hashes[f"{path.name}/{child.relative_to(path).as_posix()}"] = sha256_of(child)
        elif path.is_file():
            hashes[path.name] = sha256_of(path)
    return hashes


def write_manifest(out_dir: Path, input_hashes: Mapping[str, str], seed: int, flags: Dict[str, Any]) -> Path:
    path = out_dir / "manifest.json"
    write_json_atomic(path, {"inputs": dict(sorted(input_hashes.items())), "seed": seed, "flags": flags})
    return path
