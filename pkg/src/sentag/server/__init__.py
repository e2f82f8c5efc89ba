"""HTTP service and admin CLI."""

from __future__ import annotations

import os
from dataclasses import dataclass

DEFAULT_ADDR = "127.0.0.1:8080"
DEFAULT_DB = "sentag.db"
DEFAULT_SESSION_TTL = 86400


@dataclass(frozen=True)
class Config:
    addr: str = DEFAULT_ADDR
    db_path: str = DEFAULT_DB
    session_ttl: int = DEFAULT_SESSION_TTL

    @property
    def host(self) -> str:
        return self.addr.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        return int(self.addr.rsplit(":", 1)[1])


def config_from_env() -> Config:
    return Config(
        addr=os.environ.get("SENTAG_ADDR", DEFAULT_ADDR),
        db_path=os.environ.get("SENTAG_DB", DEFAULT_DB),
        session_ttl=int(os.environ.get("SENTAG_SESSION_TTL", DEFAULT_SESSION_TTL)),
    )
