"""Local what-if service: one loaded analysis, JSON API, static console.

The session is single-model and lives for the process lifetime. Matrices
and the risk analysis are immutable; the only mutable state is the current
countermeasure selection, guarded by one lock so every response is
computed from a consistent snapshot and concurrent readers never observe a
partially applied selection.

Endpoints (all JSON, rooted at ``/api``):

* ``GET /api/state`` - full session snapshot.
* ``POST /api/portfolio`` with ``{"selected": ["name", ...]}`` - replace the
  selection atomically; unknown names reject the whole request with 404.
* ``POST /api/optimize`` with ``{"threshold": 0.8, "cutoff": 0.0}`` - run the
  exact portfolio search and apply the result; infeasibility returns 409
  with the uncoverable risks and leaves the selection unchanged.

Responses carry no date or server headers, so identical session state
yields byte-identical responses. Static console assets are served at ``/``
from ``frontend/dist`` under the working directory when present.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .atree import EvaluatedTree
from .ddp import (
    EffectivenessMatrix,
    InfeasiblePortfolioError,
    RiskAnalysis,
    combined_risk_reduction,
    optimize_portfolio,
    overall_effectiveness,
)
from .model import SystemModel

_FALLBACK_PAGE = """<!doctype html>
<html><head><meta charset="utf-8"><title>strideflow what-if</title></head>
<body>
<h1>strideflow what-if service</h1>
<p>No console build found (expected <code>frontend/dist</code> in the working
directory). The JSON API is live:</p>
<ul>
<li><code>GET /api/state</code></li>
<li><code>POST /api/portfolio</code> &mdash; <code>{"selected": ["..."]}</code></li>
<li><code>POST /api/optimize</code> &mdash; <code>{"threshold": 0.8, "cutoff": 0.0}</code></li>
</ul>
<pre id="state">loading...</pre>
<script>
fetch("/api/state").then(r => r.json()).then(s => {
  document.getElementById("state").textContent = JSON.stringify(s, null, 2);
});
</script>
</body></html>
"""

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
    ".map": "application/json",
}


class UnknownCountermeasureError(Exception):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown countermeasure {name!r}")


class WhatIfSession:
    """Immutable analysis plus the one mutable piece: the selection."""

    def __init__(
        self,
        model: SystemModel,
        forest: list[EvaluatedTree],
        analysis: RiskAnalysis,
        effect: EffectivenessMatrix,
    ):
        risk_names = {r.name for r in analysis.risks}
        effect_names = set(effect.risk_names)
        if risk_names != effect_names:
            missing = sorted(risk_names - effect_names) + sorted(effect_names - risk_names)
            raise ValueError(
                f"effectiveness matrix risks do not match the analysis: {missing}"
            )
        self.model = model
        self.forest = forest
        self.analysis = analysis
        self.effect = effect
        self._oe = overall_effectiveness(effect)
        # Board order: most critical risk first, name breaking ties.
        self._risk_order = sorted(
            analysis.risks, key=lambda r: (-analysis.criticality[r.name], r.name)
        )
        self._lock = threading.Lock()
        self._selection = set(effect.countermeasure_names())

    def _snapshot_locked(self) -> dict:
        selection = self._selection
        crr = combined_risk_reduction(self.effect, selection)
        criticality = self.analysis.criticality
        residual = {name: criticality[name] * (1.0 - crr[name]) for name in crr}
        weights = self.analysis.matrix.weights()
        total_cost = sum(
            cm.cost for cm in self.effect.countermeasures if cm.name in selection
        )
        return {
            "model": self.model.name,
            "objectives": [
                {
                    "name": o.name,
                    "importance": o.importance,
                    "weight": weights[o.name],
                    "loss": self.analysis.loss[o.name],
                }
                for o in self.analysis.objectives
            ],
            "risks": [
                {
                    "name": r.name,
                    "category": r.category.tag,
                    "asset": r.asset,
                    "likelihood": r.likelihood,
                    "criticality": criticality[r.name],
                    "crr": crr[r.name],
                    "residual": residual[r.name],
                }
                for r in self._risk_order
            ],
            "countermeasures": [
                {
                    "name": cm.name,
                    "cost": cm.cost,
                    "oe": self._oe[cm.name],
                    "selected": cm.name in selection,
                }
                for cm in self.effect.countermeasures
            ],
            "selection": [
                cm.name for cm in self.effect.countermeasures if cm.name in selection
            ],
            "portfolio": {
                "totalCost": total_cost,
                "totalResidual": sum(residual.values()),
                "feasible": True,
            },
        }

    def state(self) -> dict:
        with self._lock:
            return self._snapshot_locked()

    def set_selection(self, names: list[str]) -> dict:
        known = set(self.effect.countermeasure_names())
        with self._lock:
            for name in names:
                if name not in known:
                    raise UnknownCountermeasureError(name)
            self._selection = set(names)
            return self._snapshot_locked()

    def optimize(self, threshold: float, cutoff: float) -> dict:
        with self._lock:
            portfolio = optimize_portfolio(self.effect, threshold, cutoff)
            self._selection = set(portfolio.selected)
            return self._snapshot_locked()


def _encode(payload: dict) -> bytes:
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":")).encode("utf-8")


class WhatIfHandler(BaseHTTPRequestHandler):
    session: WhatIfSession  # set on the subclass built by make_server
    assets_dir: Path | None = None

    def log_message(self, format, *args):  # noqa: A002 - stdlib signature
        pass

    def _reply(self, code: int, body: bytes, content_type: str = "application/json") -> None:
        # No Date/Server headers: identical state must yield identical bytes.
        self.send_response_only(code)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _reply_json(self, code: int, payload: dict) -> None:
        self._reply(code, _encode(payload))

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length", "0"))
        raw = self.rfile.read(length) if length else b""
        try:
            payload = json.loads(raw.decode("utf-8")) if raw else {}
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ValueError(f"malformed JSON body: {exc}") from exc
        if not isinstance(payload, dict):
            raise ValueError("JSON body must be an object")
        return payload

    def do_GET(self):  # noqa: N802 - stdlib naming
        if self.path == "/api/state":
            self._reply_json(200, self.session.state())
            return
        if self.path.startswith("/api/"):
            self._reply_json(404, {"error": "unknown endpoint", "path": self.path})
            return
        self._serve_static()

    def do_POST(self):  # noqa: N802 - stdlib naming
        try:
            body = self._read_body()
        except ValueError as exc:
            self._reply_json(400, {"error": str(exc)})
            return
        if self.path == "/api/portfolio":
            selected = body.get("selected")
            if not isinstance(selected, list) or not all(isinstance(n, str) for n in selected):
                self._reply_json(400, {"error": "'selected' must be a list of names"})
                return
            try:
                self._reply_json(200, self.session.set_selection(selected))
            except UnknownCountermeasureError as exc:
                self._reply_json(404, {"error": "unknown countermeasure", "name": exc.name})
            return
        if self.path == "/api/optimize":
            threshold = body.get("threshold", 0.8)
            cutoff = body.get("cutoff", 0.0)
            if not isinstance(threshold, (int, float)) or not 0.0 <= float(threshold) <= 1.0:
                self._reply_json(400, {"error": "'threshold' must be a number in [0, 1]"})
                return
            if not isinstance(cutoff, (int, float)) or float(cutoff) < 0.0:
                self._reply_json(400, {"error": "'cutoff' must be a number >= 0"})
                return
            try:
                snapshot = self.session.optimize(float(threshold), float(cutoff))
            except InfeasiblePortfolioError as exc:
                self._reply_json(
                    409,
                    {
                        "error": "infeasible",
                        "threshold": exc.threshold,
                        "uncoverable": exc.uncoverable,
                    },
                )
                return
            self._reply_json(200, snapshot)
            return
        self._reply_json(404, {"error": "unknown endpoint", "path": self.path})

    def _serve_static(self) -> None:
        name = self.path.lstrip("/") or "index.html"
        if self.assets_dir is not None:
            root = self.assets_dir.resolve()
            target = (root / name).resolve()
            if target.is_relative_to(root) and target.is_file():
                content_type = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
                self._reply(200, target.read_bytes(), content_type)
                return
            if name == "index.html":
                self._reply(404, b"console build incomplete", "text/plain; charset=utf-8")
                return
        if name == "index.html":
            self._reply(200, _FALLBACK_PAGE.encode("utf-8"), "text/html; charset=utf-8")
            return
        self._reply(404, b"not found", "text/plain; charset=utf-8")


def default_assets_dir() -> Path | None:
    candidate = Path.cwd() / "frontend" / "dist"
    return candidate if candidate.is_dir() else None


def make_server(
    session: WhatIfSession, port: int, assets_dir: Path | None = None
) -> ThreadingHTTPServer:
    handler = type(
        "BoundWhatIfHandler",
        (WhatIfHandler,),
        {"session": session, "assets_dir": assets_dir},
    )
    return ThreadingHTTPServer(("127.0.0.1", port), handler)


def run_service(
    model: SystemModel,
    forest: list[EvaluatedTree],
    analysis: RiskAnalysis,
    effect: EffectivenessMatrix,
    port: int,
    out,
) -> None:
    session = WhatIfSession(model, forest, analysis, effect)
    server = make_server(session, port, default_assets_dir())
    host, bound_port = server.server_address
    out.write(f"what-if service on http://{host}:{bound_port}/\n")
    out.flush()
    try:
        server.serve_forever()
    finally:
        server.server_close()
