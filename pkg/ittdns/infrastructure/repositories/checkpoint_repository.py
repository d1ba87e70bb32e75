"""
💾 Checkpoint Repository
Self-describing binary checkpoints: fixed little-endian header, then the raw
complex coefficients in component-major order
"""
import os
from pathlib import Path

import numpy as np
from loguru import logger

from ...application.interfaces import ICheckpointRepository
from ...domain.entities import Checkpoint, SpectralField
from ...domain.errors import ConfigurationError, OutputError
from ...domain.spectral import make_grid
from ...domain.value_objects import PhysicalParams

MAGIC = b"ITTS"
FORMAT_VERSION = 1

HEADER_DTYPE = np.dtype([
    ("magic", "S4"),
    ("version", "<u4"),
    ("d", "<u4"),
    ("n", "<u4"),
    ("step", "<u8"),
    ("time", "<f8"),
    ("lam", "<f8"),
    ("alpha", "<f8"),
    ("beta", "<f8"),
    ("nu", "<f8"),
    ("box_length", "<f8"),
    ("dealias_fraction", "<f8"),
])
COEFFICIENT_DTYPE = np.dtype("<c16")


class BinaryCheckpointRepository(ICheckpointRepository):
    """Checkpoint files in the ITTS format"""

    def encode(self, checkpoint: Checkpoint) -> bytes:
        grid = checkpoint.grid
        params = checkpoint.params
        header = np.zeros(1, dtype=HEADER_DTYPE)
        header["magic"] = MAGIC
        header["version"] = FORMAT_VERSION
        header["d"] = grid.d
        header["n"] = grid.n
        header["step"] = checkpoint.step
        header["time"] = checkpoint.time
        header["lam"] = params.lam
        header["alpha"] = params.alpha
        header["beta"] = params.beta
        header["nu"] = params.nu
        header["box_length"] = grid.box_length
        header["dealias_fraction"] = grid.dealias_fraction
        body = np.ascontiguousarray(checkpoint.field.components, dtype=COEFFICIENT_DTYPE)
        return header.tobytes() + body.tobytes(order="C")

    def decode(self, payload: bytes) -> Checkpoint:
        if len(payload) < HEADER_DTYPE.itemsize:
            raise OutputError(f"Checkpoint too short: {len(payload)} bytes")
        header = np.frombuffer(payload, dtype=HEADER_DTYPE, count=1)[0]
        if bytes(header["magic"]) != MAGIC:
            raise OutputError(f"Not a checkpoint: bad magic {bytes(header['magic'])!r}")
        if int(header["version"]) != FORMAT_VERSION:
            raise OutputError(f"Unsupported checkpoint version {int(header['version'])}")

        d, n = int(header["d"]), int(header["n"])
        try:
            grid = make_grid(d, n, float(header["box_length"]), float(header["dealias_fraction"]))
            params = PhysicalParams(
                lam=float(header["lam"]),
                alpha=float(header["alpha"]),
                beta=float(header["beta"]),
                nu=float(header["nu"]),
                box_length=float(header["box_length"]),
            )
        except ConfigurationError as e:
            raise OutputError(f"Malformed checkpoint header: {e}") from e

        expected = HEADER_DTYPE.itemsize + COEFFICIENT_DTYPE.itemsize * d * n ** d
        if len(payload) != expected:
            raise OutputError(f"Checkpoint size {len(payload)} does not match header ({expected} expected)")
        components = np.frombuffer(payload, dtype=COEFFICIENT_DTYPE, offset=HEADER_DTYPE.itemsize)
        components = components.reshape(grid.field_shape).astype(np.complex128)
        state = SpectralField(grid, components, float(header["time"]))
        return Checkpoint(field=state, params=params, step=int(header["step"]))

    def save(self, checkpoint: Checkpoint, path: Path) -> Path:
        path = Path(path)
        tmp = path.with_name(path.name + ".tmp")
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp.write_bytes(self.encode(checkpoint))
            os.replace(tmp, path)
        except OSError as e:
            raise OutputError(f"Could not write checkpoint {path}: {e}") from e
        logger.debug(f"💾 Checkpoint saved: {path} (step {checkpoint.step}, t={checkpoint.time:.6g})")
        return path

    def load(self, path: Path) -> Checkpoint:
        path = Path(path)
        try:
            payload = path.read_bytes()
        except OSError as e:
            raise OutputError(f"Could not read checkpoint {path}: {e}") from e
        return self.decode(payload)
