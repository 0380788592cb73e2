"""Lines recorded by the acceptance checks, echoed in the pytest summary."""

LINES = []


def record(number, ok, detail, status=None):
    status = status or ("PASS" if ok else "FAIL")
    line = f"criterion {number:>2}: {status}  {detail}"
    LINES.append(line)
    print(line, flush=True)
    return line
