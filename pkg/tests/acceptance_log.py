"""Collects one verdict line per acceptance criterion."""

RESULTS: list[tuple[str, bool, str]] = []


def record(cid: str, ok: bool, detail: str) -> str:
    line = f"[{'PASS' if ok else 'FAIL'}] {cid}: {detail}"
    RESULTS.append((cid, ok, line))
    print(line)
    return line
