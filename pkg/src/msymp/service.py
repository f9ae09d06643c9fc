"""HTTP service wrapping the engine: run scripts, check scripts, selftest.

The plain functions (run_script, check_script, selftest) hold the logic; the
FastAPI endpoints and the CLI are both thin clients of them.
"""

from __future__ import annotations

from fastapi import FastAPI
from pydantic import BaseModel, Field

from . import __version__
from .executor import EXIT_INTERNAL, execute
from .lang import parse
from .selftest import DEFAULT_BUNDLES, run_selftest


class DiagnosticModel(BaseModel):
    severity: str
    line: int
    col_start: int
    col_end: int
    message: str


class ScriptRequest(BaseModel):
    script: str


class RunResponse(BaseModel):
    exit_code: int
    output: str
    diagnostics: list[DiagnosticModel] = Field(default_factory=list)


class CheckResponse(BaseModel):
    ok: bool
    diagnostics: list[DiagnosticModel] = Field(default_factory=list)


class SelftestRequest(BaseModel):
    bundles: list[tuple[int, int]] | None = None


class SelftestRowModel(BaseModel):
    name: str
    bundle: str
    passed: bool


class SelftestResponse(BaseModel):
    ok: bool
    rows: list[SelftestRowModel]
    table: str


class HealthResponse(BaseModel):
    status: str
    version: str


def _diag_models(diags) -> list[DiagnosticModel]:
    return [
        DiagnosticModel(severity=d.severity, line=d.span.line,
                        col_start=d.span.col_start, col_end=d.span.col_end,
                        message=d.message)
        for d in diags
    ]


def run_script(text: str) -> RunResponse:
    script, diags = parse(text)
    if script is None:
        return RunResponse(exit_code=EXIT_INTERNAL, output="",
                           diagnostics=_diag_models(diags))
    result = execute(script)
    return RunResponse(exit_code=result.exit_code, output=result.output,
                       diagnostics=_diag_models(diags))


def check_script(text: str) -> CheckResponse:
    script, diags = parse(text)
    return CheckResponse(ok=script is not None, diagnostics=_diag_models(diags))


def selftest(bundles: list[tuple[int, int]] | None = None) -> SelftestResponse:
    ok, rows, table = run_selftest(tuple(bundles) if bundles else DEFAULT_BUNDLES)
    return SelftestResponse(
        ok=ok,
        rows=[SelftestRowModel(name=r.name, bundle=r.bundle, passed=r.passed)
              for r in rows],
        table=table,
    )


app = FastAPI(
    title="msymp",
    description="Exact exterior-calculus engine for multisymplectic phase spaces",
    version=__version__,
)


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/run", response_model=RunResponse)
def run_endpoint(req: ScriptRequest) -> RunResponse:
    return run_script(req.script)


@app.post("/check", response_model=CheckResponse)
def check_endpoint(req: ScriptRequest) -> CheckResponse:
    return check_script(req.script)


@app.post("/selftest", response_model=SelftestResponse)
def selftest_endpoint(req: SelftestRequest) -> SelftestResponse:
    return selftest(req.bundles)
