"""
JSON state files and decoherence spec files.

State file schema: {"dims": [...], "re": [[...]], "im": [[...]], "partition": [[...], ...]}
with "partition" optional.
"""
import json
import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

from entprod.decoherence import BipartiteSpec, LorentzDamping, LorentzSpec
from entprod.errors import ValidationError
from entprod.hilbert import DenseOperator, DensityOperator, Partition, SpaceLayout

# Set up logging
logger = logging.getLogger(__name__)


@dataclass
class StateFile:
    dims: list[int]
    re: list[list[float]]
    im: list[list[float]]
    partition: list[list[int]] | None = None

    @classmethod
    def from_operator(cls, op: DenseOperator, partition: Partition | None = None) -> "StateFile":
        return cls(
            dims=list(op.layout.dims),
            re=op.matrix.real.tolist(),
            im=op.matrix.imag.tolist(),
            partition=[list(block) for block in partition.blocks] if partition else None,
        )

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "StateFile":
        try:
            return cls(dims=data["dims"], re=data["re"], im=data["im"], partition=data.get("partition"))
        except (KeyError, TypeError) as e:
            raise ValidationError(f"state file is missing field {e}", invariant="state_file")

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"dims": self.dims, "re": self.re, "im": self.im}
        if self.partition is not None:
            data["partition"] = self.partition
        return data

    def to_json(self) -> str:
        # repr-based float output round-trips every double exactly
        return json.dumps(self.to_dict())

    def operator(self) -> DenseOperator:
        try:
            layout = SpaceLayout(tuple(self.dims))
            re, im = np.asarray(self.re, dtype=float), np.asarray(self.im, dtype=float)
        except (TypeError, ValueError) as e:
            raise ValidationError(f"malformed state file: {e}", invariant="state_file")
        if re.shape != im.shape:
            raise ValidationError(f"re {re.shape} and im {im.shape} disagree", invariant="state_file")
        return DenseOperator(layout, re + 1j * im)

    def parsed_partition(self, layout: SpaceLayout) -> Partition | None:
        if self.partition is None:
            return None
        partition = Partition(tuple(tuple(block) for block in self.partition))
        partition.validate_for(layout)
        return partition


def _read_json(path: str) -> dict[str, Any]:
    try:
        with open(path, "r") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path} is not valid JSON: {e}", invariant="state_file")
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e}", invariant="state_file")


def load_state_file(path: str) -> tuple[DenseOperator, Partition | None]:
    state = StateFile.from_dict(_read_json(path))
    op = state.operator()
    logger.info(f"loaded operator on {list(op.layout.dims)} from {path}")
    return op, state.parsed_partition(op.layout)


def _complex_matrix(data: Any, name: str) -> np.ndarray:
    try:
        if isinstance(data, dict):
            return np.asarray(data["re"], dtype=float) + 1j * np.asarray(data.get("im", 0.0), dtype=float)
        return np.asarray(data, dtype=float).astype(complex)
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"malformed {name}: {e}", invariant="spec_file")


def load_decoherence_spec(path: str) -> tuple[BipartiteSpec, LorentzDamping | None]:
    """
    Reads {"dims": [dA, dB], "energies": [[...]], "rho0": {"re", "im"},
    "gamma": scalar | matrix, "gamma_env": matrix}.

    A scalar gamma is used for both subsystems; a gamma matrix needs gamma_env.
    """
    data = _read_json(path)
    try:
        dims = tuple(int(d) for d in data["dims"])
        energies = np.asarray(data["energies"], dtype=float)
        rho_data = data["rho0"]
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"malformed decoherence spec: {e}", invariant="spec_file")
    if len(dims) != 2:
        raise ValidationError(f"decoherence spec needs two dims, got {list(dims)}", invariant="spec_file")

    rho0 = DensityOperator(DenseOperator(SpaceLayout(dims), _complex_matrix(rho_data, "rho0")))
    spec = BipartiteSpec(energies, rho0)

    gamma = data.get("gamma")
    if gamma is None:
        return spec, None
    try:
        if np.ndim(gamma) == 0:
            width = float(gamma)
            system, environment = LorentzSpec.uniform(width, dims[0]), LorentzSpec.uniform(width, dims[1])
        elif "gamma_env" not in data:
            raise ValidationError("a gamma matrix needs a matching gamma_env matrix", invariant="spec_file")
        else:
            system = LorentzSpec(np.asarray(gamma, dtype=float))
            environment = LorentzSpec(np.asarray(data["gamma_env"], dtype=float))
    except ValidationError:
        raise
    except (TypeError, ValueError) as e:
        raise ValidationError(f"malformed gamma: {e}", invariant="spec_file")
    damping = LorentzDamping(system, environment)
    damping.check(spec)
    return spec, damping
