"""Execution of parsed scripts.

Each command prints its result in canonical serialization followed by a
status line; blocks are separated by blank lines and prefixed with an echo
of the command.  Exit codes: 0 clean, 1 at least one verdict failed
(not-hamiltonian, broken identity, not poisson, not multisymplectic),
2 internal error.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .bracket import (
    HamiltonianNm1Form,
    HamiltonianPair,
    bracket,
    bracket_coords,
    bracket_naive,
    certify_pair,
    decide_hamiltonian,
    graded_bracket,
    is_poisson_form,
    jacobi_defect,
    kernel_annihilates,
)
from .exterior import Form, contract, lie_derivative
from .lang import Command, Script
from .phase import Bundle, ProjectableVF, lift_cojet, momentum_map, omega, theta
from .poly import Point
from .serialize import graded_str

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_INTERNAL = 2

_POINT_SEED = 518035  # fixed: poisson-check sampling must be reproducible


def sample_points(b: Bundle, count: int = 4) -> list[Point]:
    """A deterministic battery of rational sample points."""
    rng = random.Random(_POINT_SEED + 31 * b.n + b.N)
    pts = []
    for _ in range(count):
        assignment = {
            c: Fraction(rng.randint(-3, 3), rng.randint(1, 3))
            for c in b.phase.coords
        }
        pts.append(Point(b.phase, assignment))
    return pts


@dataclass
class ExecResult:
    output: str
    exit_code: int


class _Executor:
    def __init__(self, script: Script):
        self.script = script
        self.b = script.bundle
        self.lines: list[str] = []
        self.exit_code = EXIT_OK

    def emit(self, *lines: str) -> None:
        self.lines.extend(lines)

    def verdict_failure(self) -> None:
        self.exit_code = max(self.exit_code, EXIT_VERDICT)

    def run(self) -> ExecResult:
        for cmd in self.script.commands:
            self.emit(f":: {cmd.rendered}")
            try:
                handler = getattr(self, "_cmd_" + cmd.name.replace("-", "_"))
                handler(cmd)
            except Exception as e:  # noqa: BLE001 - report, stop, exit 2
                self.emit(f"internal error: {e}", "status: internal-error")
                self.exit_code = EXIT_INTERNAL
                break
            self.emit("")
        out = "\n".join(self.lines).rstrip("\n") + "\n"
        return ExecResult(output=out, exit_code=self.exit_code)

    # argument helpers -------------------------------------------------------

    def vf(self, name: str) -> ProjectableVF:
        return self.script.env[name]

    def hform(self, name: str) -> HamiltonianNm1Form:
        return self.script.env[name]

    # commands ----------------------------------------------------------------

    def _cmd_theta(self, cmd: Command) -> None:
        self.emit(graded_str(theta(self.b)), "status: ok")

    def _cmd_omega(self, cmd: Command) -> None:
        self.emit(graded_str(omega(self.b)), "status: ok")

    def _cmd_lift(self, cmd: Command) -> None:
        self.emit(graded_str(lift_cojet(self.vf(cmd.args[0]))), "status: ok")

    def _cmd_momentum(self, cmd: Command) -> None:
        x = self.vf(cmd.args[0])
        j = momentum_map(x)
        self.emit(graded_str(j))
        lifted = lift_cojet(x)
        if (contract(lifted, omega(self.b)) - j.d()).is_zero():
            self.emit("status: certified (i_X omega = dJ)")
        else:
            self.emit("status: internal-error")
            self.exit_code = EXIT_INTERNAL

    def _cmd_hamvf(self, cmd: Command) -> None:
        name = cmd.args[0]
        obj = self.script.env[name]
        if isinstance(obj, HamiltonianNm1Form):
            field = obj.vector_field()
            self.emit(graded_str(field), "status: certified (i_X omega = df)")
            return
        verdict = decide_hamiltonian(self.b, obj)
        if isinstance(verdict, HamiltonianPair):
            self.emit(graded_str(verdict.field),
                      "status: certified (i_X omega = df)")
        else:
            self.emit("not-hamiltonian")
            if verdict.non_conforming is not None:
                self.emit(f"non-conforming part: {graded_str(verdict.non_conforming)}")
            if verdict.residual is not None:
                self.emit(f"residual: {graded_str(verdict.residual)}")
            self.emit(f"status: not-hamiltonian ({verdict.reason})")
            self.verdict_failure()

    def _cmd_bracket(self, cmd: Command) -> None:
        f, g = self.hform(cmd.args[0]), self.hform(cmd.args[1])
        r = bracket(f, g)
        self.emit(graded_str(r.value.form))
        self.emit(f"status: certified hamiltonian; naive terms: "
                  f"{r.naive_part.num_terms()}, correction terms: "
                  f"{r.correction_part.num_terms()}, value terms: "
                  f"{r.value.form.num_terms()}")

    def _cmd_bracket_naive(self, cmd: Command) -> None:
        f, g = self.hform(cmd.args[0]), self.hform(cmd.args[1])
        self.emit(graded_str(bracket_naive(f, g)), "status: ok")

    def _cmd_bracket_coords(self, cmd: Command) -> None:
        f, g = self.hform(cmd.args[0]), self.hform(cmd.args[1])
        value = bracket_coords(f, g)
        self.emit(graded_str(value))
        if (value - bracket(f, g).value.form).is_zero():
            self.emit("status: agrees with bracket()")
        else:
            self.emit("status: internal-error (coordinate display disagrees)")
            self.exit_code = EXIT_INTERNAL

    def _cmd_jacobi(self, cmd: Command) -> None:
        f, g, h = (self.hform(a) for a in cmd.args)
        total = bracket(f, bracket(g, h).value).value.form \
            + bracket(g, bracket(h, f).value).value.form \
            + bracket(h, bracket(f, g).value).value.form
        self.emit(graded_str(total))
        if total.is_zero():
            self.emit("status: jacobi ok")
        else:
            self.emit("status: jacobi FAILED")
            self.verdict_failure()

    def _cmd_defect(self, cmd: Command) -> None:
        f, g, h = (self.hform(a) for a in cmd.args)
        d = jacobi_defect(f, g, h)  # raises on internal mismatch
        self.emit(graded_str(d), "status: consistent with cyclic naive sum")

    def _cmd_graded_bracket(self, cmd: Command) -> None:
        f, g = self.hform(cmd.args[0]), self.hform(cmd.args[1])
        F = certify_pair(self.b, f.form, f.vector_field())
        G = certify_pair(self.b, g.form, g.vector_field())
        value = graded_bracket(F, G)
        self.emit(graded_str(value), "status: expressions agree; pairs certified")

    def _cmd_poisson_check(self, cmd: Command) -> None:
        name = cmd.args[0]
        obj = self.script.env[name]
        pts = sample_points(self.b)
        if isinstance(obj, HamiltonianNm1Form):
            pair = certify_pair(self.b, obj.form, obj.vector_field())
            verdict = is_poisson_form(pair, pts)
        else:
            verdict = kernel_annihilates(self.b, obj, pts,
                                         tuple(range(1, self.b.n + 1)))
        degs = ", ".join(str(r) for r in verdict.degrees)
        if verdict.poisson:
            self.emit(f"poisson at {verdict.points_checked} sampled points "
                      f"(multivector degrees {degs})", "status: poisson")
        else:
            k, r, z = verdict.counterexample
            self.emit(f"counterexample at point {k + 1}, degree {r}: {graded_str(z)}",
                      "status: not-poisson")
            self.verdict_failure()

    def _cmd_verify_multisymplectic(self, cmd: Command) -> None:
        x = self.vf(cmd.args[0])
        lifted = lift_cojet(x)
        lt = lie_derivative(lifted, theta(self.b))
        lo = lie_derivative(lifted, omega(self.b))
        ok = True
        for label, val in (("theta", lt), ("omega", lo)):
            if val.is_zero():
                self.emit(f"L_X {label} = 0")
            else:
                self.emit(f"L_X {label} = {graded_str(val)}")
                ok = False
        if ok:
            self.emit("status: multisymplectic")
        else:
            self.emit("status: NOT multisymplectic")
            self.verdict_failure()

    def _cmd_eval(self, cmd: Command) -> None:
        name, ptspec = cmd.args
        obj = self.script.env[name]
        pt = Point(self.b.phase, ptspec["assignment"], default=ptspec["default"])
        if isinstance(obj, ProjectableVF):
            value = obj.as_vector_on_e().evaluate(pt)
        elif isinstance(obj, HamiltonianNm1Form):
            value = obj.form.evaluate(pt)
        else:
            value = obj.evaluate(pt)
        self.emit(graded_str(value), "status: ok")


def execute(script: Script) -> ExecResult:
    """Run every command of a validated script, collecting textual output."""
    return _Executor(script).run()
