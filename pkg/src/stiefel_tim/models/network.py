"""Network instance: topology, message sharing and stream counts."""

import json
from collections.abc import Iterable
from pathlib import Path
from typing import Any

from pydantic import Field, ValidationError, model_validator

from stiefel_tim.exceptions import InputError, MalformedInstanceError

from .base import FrozenModel


class NetworkInstanceFile(FrozenModel):
    """On-disk form of a network instance (1-based indices).

    ``{"K": 3, "d": [1, 1, 1], "edges": [[1, 1], [1, 2], ...], "sharing": [[1], [2, 3], [3]]}``
    """

    K: int = Field(description="Number of transmitter-receiver pairs")
    d: list[int] = Field(description="Streams per user")
    edges: list[tuple[int, int]] = Field(description="Connected (receiver, transmitter) pairs")
    sharing: list[list[int]] = Field(description="Messages available at each transmitter")


class NetworkInstance(FrozenModel):
    """Partially connected K-user network with transmitter cooperation.

    Indices are 0-based. ``edges`` holds (receiver k, transmitter j) pairs and
    ``sharing[j]`` the set S_j of messages available at transmitter j.
    """

    K: int = Field(ge=1, description="Number of transmitter-receiver pairs")
    d: tuple[int, ...] = Field(description="Streams per user, d_k ≥ 1")
    edges: frozenset[tuple[int, int]] = Field(description="Connected (receiver, transmitter) pairs")
    sharing: tuple[frozenset[int], ...] = Field(description="Message index set S_j per transmitter")

    @model_validator(mode="after")
    def validate_invariants(self) -> "NetworkInstance":
        """Check index ranges, direct links and own-message availability.

        Raises:
            MalformedInstanceError: Naming the offending field
        """
        K = self.K
        if len(self.d) != K:
            msg = f"expected {K} stream counts, got {len(self.d)}"
            raise MalformedInstanceError(msg, field="d")
        if any(dk < 1 for dk in self.d):
            msg = "every stream count must be ≥ 1"
            raise MalformedInstanceError(msg, field="d")
        for k, j in self.edges:
            if not (0 <= k < K and 0 <= j < K):
                msg = f"edge ({k + 1}, {j + 1}) out of range 1..{K}"
                raise MalformedInstanceError(msg, field="edges")
        missing = [k + 1 for k in range(K) if (k, k) not in self.edges]
        if missing:
            msg = f"receivers {missing} are not connected to their own transmitter"
            raise MalformedInstanceError(msg, field="edges")
        if len(self.sharing) != K:
            msg = f"expected {K} message sets, got {len(self.sharing)}"
            raise MalformedInstanceError(msg, field="sharing")
        for j, s_j in enumerate(self.sharing):
            if j not in s_j:
                msg = f"transmitter {j + 1} must hold its own message"
                raise MalformedInstanceError(msg, field="sharing")
            if any(not 0 <= i < K for i in s_j):
                msg = f"transmitter {j + 1} lists a message outside 1..{K}"
                raise MalformedInstanceError(msg, field="sharing")
        return self

    @property
    def m(self) -> int:
        """Total number of streams Σ d_k (rows of X)."""
        return sum(self.d)

    @property
    def n(self) -> int:
        """Columns of X, K·m."""
        return self.K * self.m

    @property
    def N(self) -> int:
        """Factor height m + n."""
        return self.m + self.n

    @property
    def row_offsets(self) -> tuple[int, ...]:
        """First row of receiver k's block."""
        offsets = [0]
        for dk in self.d[:-1]:
            offsets.append(offsets[-1] + dk)
        return tuple(offsets)

    def column_offset(self, j: int, i: int) -> int:
        """First column of block (transmitter j, message i): j·m + offset(i)."""
        return j * self.m + self.row_offsets[i]

    def desired_transmitters(self, k: int) -> list[int]:
        """Transmitters j connected to receiver k that hold message k."""
        return [j for j in range(self.K) if (k, j) in self.edges and k in self.sharing[j]]

    def connected_transmitters(self, k: int) -> list[int]:
        """Transmitters j with (k, j) ∈ ℰ."""
        return [j for j in range(self.K) if (k, j) in self.edges]

    @property
    def single_stream(self) -> bool:
        return all(dk == 1 for dk in self.d)

    @classmethod
    def build(
        cls,
        K: int,
        d: int | Iterable[int],
        edges: Iterable[tuple[int, int]],
        sharing: Iterable[Iterable[int]],
    ) -> "NetworkInstance":
        """Build from 0-based plain collections; an integer ``d`` applies to every user."""
        streams = (d,) * K if isinstance(d, int) else tuple(d)
        return cls(
            K=K,
            d=streams,
            edges=frozenset((int(k), int(j)) for k, j in edges),
            sharing=tuple(frozenset(int(i) for i in s) for s in sharing),
        )

    @classmethod
    def from_dict(cls, data: Any, path: str | None = None) -> "NetworkInstance":  # noqa: ANN401
        """Parse the 1-based JSON form.

        Args:
            data: Decoded JSON object
            path: Source path, used in error messages

        Returns:
            Validated instance

        Raises:
            MalformedInstanceError: If a field is missing, mistyped or violates an invariant
        """
        try:
            raw = NetworkInstanceFile.model_validate(data)
        except ValidationError as e:
            first = e.errors()[0]
            field = str(first["loc"][0]) if first["loc"] else None
            msg = first["msg"]
            raise MalformedInstanceError(msg, field=field, path=path) from e
        try:
            return cls.build(
                K=raw.K,
                d=raw.d,
                edges=[(k - 1, j - 1) for k, j in raw.edges],
                sharing=[[i - 1 for i in s] for s in raw.sharing],
            )
        except MalformedInstanceError as e:
            e.path = path
            raise
        except ValidationError as e:
            first = e.errors()[0]
            field = str(first["loc"][0]) if first["loc"] else None
            raise MalformedInstanceError(first["msg"], field=field, path=path) from e

    @classmethod
    def from_file(cls, path: str | Path) -> "NetworkInstance":
        """Load an instance from a JSON file.

        Raises:
            InputError: If the file cannot be read or is not JSON
            MalformedInstanceError: If the content is not a valid instance
        """
        p = Path(path)
        try:
            data = json.loads(p.read_text(encoding="utf-8"))
        except OSError as e:
            msg = f"Cannot read topology file ({e.strerror})"
            raise InputError(msg, path=str(p)) from e
        except json.JSONDecodeError as e:
            msg = f"Topology file is not valid JSON (line {e.lineno}, column {e.colno})"
            raise InputError(msg, path=str(p)) from e
        return cls.from_dict(data, path=str(p))

    def to_dict(self) -> dict[str, Any]:
        """Return the 1-based JSON form with sorted indices."""
        return {
            "K": self.K,
            "d": list(self.d),
            "edges": [[k + 1, j + 1] for k, j in sorted(self.edges)],
            "sharing": [sorted(i + 1 for i in s) for s in self.sharing],
        }
