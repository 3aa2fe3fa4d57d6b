"""Binary cache of SuperMatrix payloads.

Layout (all little-endian)::

    magic      8 bytes   b"FZDSYMC\\x00"
    version    u32
    storage    u32       0 = dense row-major, 1 = CSR
    space      u32       0 = full cell basis, 1 = physical cells
    n_max      u32
    lam        f64
    basis_hash u64       FNV-1a 64 of the ordered basis description
    rows, cols u64, u64
    nnz        u64       stored complex entries
    meta_len   u32       then meta_len bytes of UTF-8 JSON (mask definitions, dtype, caller metadata)
    payload              dense: rows*cols complex as (re, im) f64 pairs
                         CSR:   indptr u64[rows+1], indices u64[nnz], data (re, im) f64[nnz]
    checksum   u64       BLAKE2b-64 of the payload bytes
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .represent import SuperMatrix

__all__ = [
    "CACHE_VERSION",
    "CacheCorruptError",
    "CacheError",
    "CacheHashError",
    "CacheVersionError",
    "cache_read",
    "cache_write",
]

MAGIC = b"FZDSYMC\x00"
CACHE_VERSION = 1
_HEADER = struct.Struct("<8sIIIIdQQQQI")
_SPACES = {"full": 0, "physical": 1}


class CacheError(Exception):
    """Base class of cache failures."""


class CacheVersionError(CacheError):
    pass


class CacheHashError(CacheError):
    pass


class CacheCorruptError(CacheError):
    pass


def _checksum(payload: bytes) -> int:
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


def _complex_bytes(values: np.ndarray) -> bytes:
    v = np.ascontiguousarray(values, dtype=np.complex128)
    return v.view("<f8").tobytes()


def cache_write(M: SuperMatrix, path: str | Path, meta: dict | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    m = M.matrix
    rows, cols = m.shape
    if sp.issparse(m):
        csr = sp.csr_matrix(m, dtype=complex)
        csr.sort_indices()
        storage = 1
        payload = (
            csr.indptr.astype("<u8").tobytes()
            + csr.indices.astype("<u8").tobytes()
            + _complex_bytes(csr.data)
        )
        nnz = csr.nnz
    else:
        storage = 0
        payload = _complex_bytes(np.asarray(m))
        nnz = rows * cols
    info = dict(meta or {})
    info.setdefault("masks", dict(M.masks))
    info["dtype"] = "float64" if not np.iscomplexobj(m.data if sp.issparse(m) else m) else "complex128"
    if M.overflow is not None:
        info["overflow"] = np.flatnonzero(M.overflow).tolist()
        info["overflow_len"] = int(len(M.overflow))
    meta_bytes = json.dumps(info, sort_keys=True).encode("utf-8")
    header = _HEADER.pack(
        MAGIC, CACHE_VERSION, storage, _SPACES[M.space], M.n_max, float(M.lam), M.basis_hash, rows, cols, nnz, len(meta_bytes)
    )
    blob = header + meta_bytes + payload + struct.pack("<Q", _checksum(payload))
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(blob)
    tmp.replace(path)
    return path


def cache_read(path: str | Path, expected_hash: int | None = None) -> SuperMatrix:
    """Load a cached SuperMatrix.

    Raises :class:`CacheVersionError`, :class:`CacheHashError` or
    :class:`CacheCorruptError`; a missing file raises ``FileNotFoundError``.
    """
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size:
        raise CacheCorruptError("file shorter than the header")
    magic, version, storage, space, n_max, lam, bhash, rows, cols, nnz, meta_len = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise CacheCorruptError("bad magic")
    if version != CACHE_VERSION:
        raise CacheVersionError(f"cache version {version}, expected {CACHE_VERSION}")
    if expected_hash is not None and bhash != expected_hash:
        raise CacheHashError(f"basis hash {bhash:#018x} does not match {expected_hash:#018x}")
    pos = _HEADER.size
    if storage == 0:
        payload_len = rows * cols * 16
    elif storage == 1:
        payload_len = (rows + 1) * 8 + nnz * 8 + nnz * 16
    else:
        raise CacheCorruptError(f"unknown storage kind {storage}")
    if len(blob) != pos + meta_len + payload_len + 8:
        raise CacheCorruptError("payload length does not match the header")
    try:
        meta = json.loads(blob[pos : pos + meta_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CacheCorruptError(f"unreadable metadata: {exc}") from None
    pos += meta_len
    payload = blob[pos : pos + payload_len]
    (checksum,) = struct.unpack_from("<Q", blob, pos + payload_len)
    if checksum != _checksum(payload):
        raise CacheCorruptError("checksum mismatch")
    if storage == 0:
        data = np.frombuffer(payload, dtype="<f8").view(np.complex128).reshape(rows, cols).copy()
        matrix = data
    else:
        a = (rows + 1) * 8
        b = a + nnz * 8
        indptr = np.frombuffer(payload[:a], dtype="<u8").astype(np.int64)
        indices = np.frombuffer(payload[a:b], dtype="<u8").astype(np.int64)
        data = np.frombuffer(payload[b:], dtype="<f8").view(np.complex128).copy()
        try:
            matrix = sp.csr_matrix((data, indices, indptr), shape=(rows, cols))
        except ValueError as exc:
            raise CacheCorruptError(f"inconsistent CSR payload: {exc}") from None
    if meta.get("dtype") == "float64":
        matrix = matrix.real.copy() if not sp.issparse(matrix) else matrix.real.tocsr()
    overflow = None
    if "overflow_len" in meta:
        overflow = np.zeros(meta["overflow_len"], dtype=bool)
        overflow[meta["overflow"]] = True
    space_name = {v: k for k, v in _SPACES.items()}.get(space)
    if space_name is None:
        raise CacheCorruptError(f"unknown space code {space}")
    return SuperMatrix(matrix, lam, n_max, space_name, bhash, overflow, meta.get("masks", {}))
