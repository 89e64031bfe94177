"""HTTP front end.  Every route runs the same handler as the matching CLI
subcommand and answers with its report; failures keep their exit code."""

from fastapi import FastAPI

from . import handlers
from .errors import RelkError
from .problem import load, open_problem
from .schemas import BoundaryRequest, KGroupsRequest, RelativeRequest, Report, SixTermRequest, VerifyRequest

app = FastAPI(title="relk", version="0.1.0")


def _problem(req):
    if req.problem is not None:
        prob = load(req.problem, "request")
    elif req.fixture is not None:
        prob = open_problem(req.fixture)
    else:
        raise handlers.ResolutionError("send a problem document or a fixture name")
    settings = prob.doc.setdefault("settings", {})
    if req.tolerance is not None:
        settings["tolerance"] = req.tolerance
    if req.grid is not None:
        settings["grid"] = req.grid
    return prob


def _run(command, req, fn):
    try:
        out = fn(_problem(req))
    except RelkError as exc:
        out = handlers.failure(command, exc)
    return Report(command=out.command, exit_code=out.exit_code, ok=out.exit_code == 0,
                  text=out.text, results=out.results)


@app.post("/kgroups", response_model=Report)
def kgroups(req: KGroupsRequest):
    return _run("kgroups", req, lambda p: handlers.kgroups(p, req.alg))


@app.post("/relative", response_model=Report)
def relative(req: RelativeRequest):
    return _run("relative", req, lambda p: handlers.relative(p, req.hom))


@app.post("/sixterm", response_model=Report)
def sixterm(req: SixTermRequest):
    return _run("sixterm", req, lambda p: handlers.sixterm(p, req.ladder))


@app.post("/boundary", response_model=Report)
def boundary(req: BoundaryRequest):
    return _run("boundary", req, lambda p: handlers.boundary(p, req.ladder, req.map, req.triple))


@app.post("/verify", response_model=Report)
def verify(req: VerifyRequest):
    return _run("verify", req, lambda p: handlers.verify(p, req.triple, req.certificate))


@app.get("/fixtures", response_model=Report)
def fixtures(name: str = None):
    try:
        out = handlers.fixtures(name=name)
    except RelkError as exc:
        out = handlers.failure("fixtures", exc)
    return Report(command=out.command, exit_code=out.exit_code, ok=out.exit_code == 0,
                  text=out.text, results=out.results)
