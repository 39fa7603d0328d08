"""Check reports: deterministic JSON and text rendering.

Coefficients in reports are exact rationals rendered as strings; the
only nondeterministic field is the timing block, which sits under its
own key so reports can be compared with timings stripped.
"""

from __future__ import annotations

import json
import time


class Report:
    def __init__(self, tool, config):
        self.tool = tool
        self.config = dict(config)
        self.checks = []
        self.timings = {}
        self._t0 = time.time()

    def add(self, name, status, detail=""):
        assert status in ("pass", "fail", "skip")
        self.checks.append({"name": name, "status": status,
                            "detail": str(detail)})

    def add_residual(self, name, nonzeros, first=None):
        if nonzeros == 0:
            self.add(name, "pass")
        else:
            detail = "%d nonzero coefficients" % nonzeros
            if first is not None:
                detail += "; first counterexample %s" % (first,)
            self.add(name, "fail", detail)

    def time_stage(self, name):
        self.timings[name] = round(time.time() - self._t0, 3)
        self._t0 = time.time()

    @property
    def ok(self):
        return all(c["status"] != "fail" for c in self.checks)

    def to_json(self, with_timings=True):
        data = {
            "tool": self.tool,
            "config": self.config,
            "checks": self.checks,
            "ok": self.ok,
        }
        if with_timings:
            data["timings"] = self.timings
        return data

    def dumps(self, with_timings=True):
        return json.dumps(self.to_json(with_timings), indent=1,
                          sort_keys=True) + "\n"

    def to_text(self):
        lines = ["%s  (%s)" % (self.tool, " ".join(
            "%s=%s" % kv for kv in sorted(self.config.items())))]
        for c in self.checks:
            mark = {"pass": "ok  ", "fail": "FAIL", "skip": "skip"}[c["status"]]
            line = "  [%s] %s" % (mark, c["name"])
            if c["detail"]:
                line += "  -- %s" % c["detail"]
            lines.append(line)
        lines.append("overall: %s" % ("pass" if self.ok else "FAIL"))
        return "\n".join(lines) + "\n"

    @staticmethod
    def parse(text):
        return json.loads(text)
