"""JSON and CSV files: skeletons, fitted models, datasets, positions, predictions and reports."""

import csv
import json
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .core import decode_position, encode_position
from .errors import ShapeError
from .models import EdgeRecord, ExperimentReport, Skeleton, SkeletonPosition, SseRecord
from .regressors import SKELETON_METHODS, model_from_dict


def skeleton_to_dict(skeleton: Skeleton) -> Dict[str, Any]:
    return {
        "dim": skeleton.dim,
        "knots": skeleton.knots.tolist(),
        "edges": [asdict(edge) for edge in skeleton.edges],
        "component": skeleton.component.tolist(),
        "meta": skeleton.meta,
    }


def skeleton_from_dict(data: Dict[str, Any]) -> Skeleton:
    knots = np.array(data["knots"], dtype=float)
    if "dim" in data and (knots.ndim != 2 or knots.shape[1] != int(data["dim"])):
        raise ShapeError(f"skeleton declares dim={data['dim']} but its knots have shape {knots.shape}")
    return Skeleton(
        knots=knots,
        edges=tuple(EdgeRecord(**edge) for edge in data["edges"]),
        component=np.array(data["component"], dtype=int),
        meta=data.get("meta", {}),
    )


def _write_json(path: Path, data: Any) -> None:
    with open(path, "w") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")


def _read_json(path: Path) -> Any:
    with open(path, "r") as f:
        return json.load(f)


def save_skeleton(path: Path, skeleton: Skeleton) -> None:
    _write_json(path, skeleton_to_dict(skeleton))
    logging.info(f"Wrote skeleton with {skeleton.k} knots to {path}")


def load_skeleton(path: Path) -> Skeleton:
    return skeleton_from_dict(_read_json(path))


def save_model(path: Path, model: Any) -> None:
    data = model.to_dict()
    if data["method"] in SKELETON_METHODS:
        data["skeleton"] = skeleton_to_dict(model.train.skeleton)
    _write_json(path, data)
    logging.info(f"Wrote {data['method']} model to {path}")


def load_model(path: Path) -> Any:
    data = _read_json(path)
    skeleton = skeleton_from_dict(data["skeleton"]) if "skeleton" in data else None
    return model_from_dict(data, skeleton)


def read_dataset_csv(path: Path) -> Tuple[np.ndarray, Optional[np.ndarray], Optional[np.ndarray]]:
    """Reads covariate columns x1..xd and the optional y and component columns."""
    with open(path, "r", newline="") as f:
        reader = csv.DictReader(f)
        fields = reader.fieldnames or []
        rows = list(reader)
    covariates = sorted(
        (name for name in fields if name.startswith("x") and name[1:].isdigit()),
        key=lambda name: int(name[1:]),
    )
    if not covariates:
        raise ShapeError(f"{path} has no covariate columns named x1..xd")
    X = np.array([[float(row[name]) for name in covariates] for row in rows], dtype=float).reshape(
        len(rows), len(covariates)
    )
    y = np.array([float(row["y"]) for row in rows]) if "y" in fields else None
    component = np.array([int(row["component"]) for row in rows]) if "component" in fields else None
    logging.debug(f"Read {len(rows)} rows with {len(covariates)} covariates from {path}")
    return X, y, component


def write_dataset_csv(
    path: Path, X: np.ndarray, y: Optional[np.ndarray] = None, component: Optional[np.ndarray] = None
) -> None:
    header = [f"x{j + 1}" for j in range(X.shape[1])]
    if y is not None:
        header.append("y")
    if component is not None:
        header.append("component")
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for i in range(X.shape[0]):
            row: List[Any] = [repr(float(v)) for v in X[i]]
            if y is not None:
                row.append(repr(float(y[i])))
            if component is not None:
                row.append(int(component[i]))
            writer.writerow(row)
    logging.info(f"Wrote {X.shape[0]} rows to {path}")


def write_positions_csv(path: Path, positions: Sequence[SkeletonPosition]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["row_id", "kind", "knot_or_edge_index", "t"])
        for row_id, position in enumerate(positions):
            kind, index, t = encode_position(position)
            writer.writerow([row_id, kind, index, repr(float(t))])


def read_positions_csv(path: Path) -> List[SkeletonPosition]:
    with open(path, "r", newline="") as f:
        rows = sorted(csv.DictReader(f), key=lambda row: int(row["row_id"]))
    return [decode_position(row["kind"], int(row["knot_or_edge_index"]), float(row["t"])) for row in rows]


def write_predictions_csv(path: Path, predictions: np.ndarray) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["row_id", "prediction"])
        for row_id, value in enumerate(predictions):
            writer.writerow([row_id, repr(float(value))])


def report_to_dict(report: ExperimentReport) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        method: {label: asdict(summary) for label, summary in rows.items()}
        for method, rows in report.summaries.items()
    }
    data["best"] = {
        method: dict(param=choice.params, **asdict(choice.summary)) for method, choice in report.best.items()
    }
    return data


def write_report_json(path: Path, report: ExperimentReport) -> None:
    _write_json(path, report_to_dict(report))
    logging.info(f"Wrote report to {path}")


def write_plot_csv(path: Path, records: Sequence[SseRecord]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["method", "param_name", "param_value", "replicate", "sse"])
        for record in records:
            writer.writerow(
                [record.method, record.param_name, record.param_value, record.replicate, repr(record.sse)]
            )
    logging.info(f"Wrote {len(records)} SSE records to {path}")
