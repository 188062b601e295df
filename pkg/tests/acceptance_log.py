"""Shared record of acceptance outcomes, printed at the end of the pytest run."""

RESULTS: dict = {}


def record(key: str, ok: bool, detail: str) -> None:
    RESULTS[key] = (ok, detail)


def lines() -> list:
    return [f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}"
            for key, (ok, detail) in sorted(RESULTS.items(), key=lambda kv: _order(kv[0]))]


def _order(key: str):
    head = key.split(".")[0]
    return (int(head) if head.isdigit() else 99, key)
