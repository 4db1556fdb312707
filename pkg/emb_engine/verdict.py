from dataclasses import dataclass, field


@dataclass(frozen=True)
class Obstruction:
    kind: str
    detail: str = ""

    def as_dict(self):
        return {"kind": self.kind, "detail": self.detail}


@dataclass(frozen=True, eq=False)
class Verdict:
    """Decision result: a witness on Yes, an obstruction on No."""

    yes: bool
    witness: object = None
    obstruction: Obstruction = None

    def __bool__(self):
        return self.yes


def yes(witness=None):
    return Verdict(True, witness=witness)


def no(kind, detail=""):
    return Verdict(False, obstruction=Obstruction(kind, detail))


@dataclass
class VerificationReport:
    """Outcome of a depth-bounded witness check; failures are plain messages."""

    depth: int
    failures: list = field(default_factory=list)
    points_checked: int = 0

    @property
    def passed(self):
        return not self.failures

    def fail(self, message):
        self.failures.append(message)

    def as_dict(self):
        return {
            "passed": self.passed,
            "depth": self.depth,
            "pointsChecked": self.points_checked,
            "failures": list(self.failures),
        }
