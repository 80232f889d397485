"""Virtual-output-queue state: the switch's ground truth.

Counts are a rectangular non-negative integer matrix; row and column sums
(the port weights) are maintained incrementally. Per-queue FIFO arrival
timestamps can be enabled to measure packet delays.
"""

from __future__ import annotations

from collections import deque
from typing import Optional, Sequence


class VoqState:
    """Per-(input, output) packet counts plus optional FIFO timestamps."""

    __slots__ = ("n_inputs", "n_outputs", "counts", "row_sums", "col_sums",
                 "timestamps")

    def __init__(self, counts: Sequence[Sequence[int]], track_delays: bool = False,
                 initial_slot: int = 0):
        rows = [[int(q) for q in row] for row in counts]
        n_inputs = len(rows)
        n_outputs = len(rows[0]) if rows else 0
        for row in rows:
            if len(row) != n_outputs:
                raise ValueError("VOQ matrix must be rectangular")
            for q in row:
                if q < 0:
                    raise ValueError("VOQ entries must be non-negative")
        self.n_inputs = n_inputs
        self.n_outputs = n_outputs
        self.counts = rows
        self.row_sums = [sum(row) for row in rows]
        self.col_sums = [sum(rows[i][j] for i in range(n_inputs))
                         for j in range(n_outputs)]
        if track_delays:
            # packets present at construction are stamped with initial_slot
            self.timestamps: Optional[list[list[deque]]] = [
                [deque([initial_slot] * rows[i][j]) for j in range(n_outputs)]
                for i in range(n_inputs)]
        else:
            self.timestamps = None

    @classmethod
    def zeros(cls, n_inputs: int, n_outputs: int,
              track_delays: bool = False) -> "VoqState":
        return cls([[0] * n_outputs for _ in range(n_inputs)], track_delays)

    def copy(self) -> "VoqState":
        return VoqState(self.counts, track_delays=self.timestamps is not None)

    def as_matrix(self) -> list[list[int]]:
        return [list(row) for row in self.counts]

    def total(self) -> int:
        return sum(self.row_sums)

    def is_empty(self) -> bool:
        return not any(self.row_sums)

    def max_port_weight(self) -> int:
        best = 0
        if self.row_sums:
            best = max(best, max(self.row_sums))
        if self.col_sums:
            best = max(best, max(self.col_sums))
        return best

    def add_arrival(self, i: int, j: int, slot: int = 0) -> None:
        self.counts[i][j] += 1
        self.row_sums[i] += 1
        self.col_sums[j] += 1
        if self.timestamps is not None:
            self.timestamps[i][j].append(slot)

    def remove_head(self, i: int, j: int, slot: int = 0) -> Optional[int]:
        """Serve the FIFO head of queue (i, j); returns its delay if tracked."""
        if self.counts[i][j] <= 0:
            raise ValueError(f"departure scheduled on empty queue ({i},{j})")
        self.counts[i][j] -= 1
        self.row_sums[i] -= 1
        self.col_sums[j] -= 1
        if self.timestamps is not None:
            return slot - self.timestamps[i][j].popleft()
        return None

    def check_consistency(self) -> None:
        """Assert the cached sums and timestamp lengths match the counts."""
        for i, row in enumerate(self.counts):
            assert sum(row) == self.row_sums[i]
            for j, q in enumerate(row):
                assert q >= 0
                if self.timestamps is not None:
                    assert len(self.timestamps[i][j]) == q
        for j in range(self.n_outputs):
            assert sum(self.counts[i][j] for i in range(self.n_inputs)) == self.col_sums[j]

    def __repr__(self) -> str:
        return f"VoqState({self.counts})"


def save_voq(voq, path) -> None:
    """Write a VOQ matrix as text: 'N1 N2' then N1 whitespace-separated rows."""
    counts = getattr(voq, "counts", voq)
    rows = [list(map(int, row)) for row in counts]
    n1 = len(rows)
    n2 = len(rows[0]) if rows else 0
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{n1} {n2}\n")
        for row in rows:
            fh.write(" ".join(str(q) for q in row) + "\n")


def load_voq(path, track_delays: bool = False) -> VoqState:
    """Read a VOQ matrix written by :func:`save_voq`."""
    with open(path, "r", encoding="ascii") as fh:
        tokens = fh.read().split()
    if len(tokens) < 2:
        raise ValueError(f"{path}: missing dimension header")
    try:
        n1, n2 = int(tokens[0]), int(tokens[1])
        values = [int(t) for t in tokens[2:]]
    except ValueError as exc:
        raise ValueError(f"{path}: non-integer content") from exc
    if n1 < 0 or n2 < 0 or len(values) != n1 * n2:
        raise ValueError(f"{path}: expected {n1}x{n2} entries, got {len(values)}")
    rows = [values[i * n2:(i + 1) * n2] for i in range(n1)]
    return VoqState(rows, track_delays=track_delays)
