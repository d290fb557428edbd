"""One user-facing seed fans out to per-stage seeds by fixed derivation."""

import hashlib


def derive_seed(base: int, stage: str) -> int:
    digest = hashlib.sha256(f"{int(base)}:{stage}".encode()).digest()
    return int.from_bytes(digest[:8], "little")
