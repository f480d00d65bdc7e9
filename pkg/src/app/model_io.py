"""Model and auxiliary-channel files: JSON in, JSON out."""

from __future__ import annotations

from dataclasses import dataclass
import json
from pathlib import Path
from typing import Any

from loguru import logger
import numpy as np

from ..core.errors import ModelValidationError
from ..core.prob import X, Y1, Y2, HypothesisPair, JointPmf
from ..regions.positive_rate import AuxChannels

AXIS_KEYS = (("x", X), ("y1", Y1), ("y2", Y2))
NORMALIZE_WARN_TOL = 1e-9


@dataclass(frozen=True)
class ModelFile:
    """Serialized form of a hypothesis pair."""

    alphabet_sizes: dict[str, int]
    p: list[float]
    p_bar: list[float]
    name: str = ""
    normalize: bool = False
    notes: str = ""

    @classmethod
    def from_pair(cls, pair: HypothesisPair, notes: str = "") -> ModelFile:
        sizes = dict(zip((key for key, _ in AXIS_KEYS), pair.sizes))
        return cls(
            alphabet_sizes=sizes,
            p=[float(v) for v in pair.p.probs],
            p_bar=[float(v) for v in pair.p_bar.probs],
            name=pair.name,
            notes=notes,
        )

    def to_pair(self) -> HypothesisPair:
        shape = tuple(self.alphabet_sizes[key] for key, _ in AXIS_KEYS)
        names = tuple(axis for _, axis in AXIS_KEYS)
        laws = []
        for label, values in (("p", self.p), ("p_bar", self.p_bar)):
            table = np.asarray(values, dtype=float)
            if table.size != int(np.prod(shape)):
                raise ModelValidationError(
                    f"{label} has {table.size} entries, alphabet sizes {shape} need {int(np.prod(shape))}"
                )
            total = float(table.sum())
            if self.normalize and abs(total - 1.0) > NORMALIZE_WARN_TOL:
                logger.warning("Renormalizing model law | name={} | law={} | total={:.12g}", self.name, label, total)
            laws.append(JointPmf.from_table(names, table.reshape(shape), normalize=self.normalize))
        return HypothesisPair(laws[0], laws[1], name=self.name)


def load_model(path: Path | str) -> HypothesisPair:
    payload = _read_json(Path(path))
    try:
        sizes = payload["alphabet_sizes"]
        model = ModelFile(
            alphabet_sizes={key: int(sizes[key]) for key, _ in AXIS_KEYS},
            p=list(payload["p"]),
            p_bar=list(payload["p_bar"]),
            name=str(payload.get("name", Path(path).stem)),
            normalize=bool(payload.get("normalize", False)),
            notes=str(payload.get("notes", "")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelValidationError(f"model file {path} is malformed: {exc!r}") from exc
    pair = model.to_pair()
    logger.debug("Loaded model | name={} | sizes={} | path={}", pair.name, pair.sizes, path)
    return pair


def save_model(pair: HypothesisPair, path: Path | str, notes: str = "") -> None:
    model = ModelFile.from_pair(pair, notes=notes)
    atomic_write_text(Path(path), json.dumps(model.__dict__, indent=2, ensure_ascii=False) + "\n")


def load_aux(path: Path | str, pair: HypothesisPair) -> AuxChannels:
    """Read P_U|X rows, P_V|U,Y1 rows (u-major) and optional P̄_U1|X rows."""
    payload = _read_json(Path(path))
    try:
        u1_rows = payload.get("u1_given_x")
        return AuxChannels.from_rows(
            np.asarray(payload["u_given_x"], dtype=float),
            np.asarray(payload["v_given_uy1"], dtype=float),
            pair.sizes[1],
            None if u1_rows is None else np.asarray(u1_rows, dtype=float),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelValidationError(f"auxiliary channel file {path} is malformed: {exc!r}") from exc


def aux_to_dict(aux: AuxChannels) -> dict[str, Any]:
    payload: dict[str, Any] = {
        "u_given_x": aux.u_given_x.rows.tolist(),
        "v_given_uy1": aux.v_given_uy1.rows.tolist(),
    }
    if aux.u1_given_x is not None:
        payload["u1_given_x"] = aux.u1_given_x.rows.tolist()
    return payload


def atomic_write_text(path: Path, text: str) -> None:
    """Write through a sibling temp file so readers never see a partial file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp_path = path.with_suffix(path.suffix + ".tmp")
    with tmp_path.open("w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    tmp_path.replace(path)


def _read_json(path: Path) -> dict[str, Any]:
    try:
        with path.open("r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except OSError as exc:
        raise ModelValidationError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ModelValidationError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ModelValidationError(f"{path} must hold a JSON object")
    return payload
