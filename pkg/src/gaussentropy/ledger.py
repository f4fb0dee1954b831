"""Time-stamped record of entropy production and its constituents."""

from dataclasses import asdict, dataclass, fields
import math

NAN = float("nan")


@dataclass(frozen=True)
class EntropyLedger:
    """Entropy production and its decomposition at one time (nats, energy).

    Fields that a given route does not compute are NaN.
    """

    t: float = NAN
    sigma: float = NAN
    I_M: float = NAN
    D_env: float = NAN
    J_bound: float = NAN
    I_SE: float = NAN
    I_env: float = NAN
    J_SE: float = NAN
    heat_Q: float = NAN
    dS_system: float = NAN
    hs_lower: float = NAN
    gh_lower: float = NAN
    entropy_flow: float = NAN
    J_M: float = NAN
    J_W_M: float = NAN
    J_W_SE: float = NAN

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]

    def as_dict(self):
        return asdict(self)

    def violations(self, tol=1e-9):
        """Names of the ordering relations this record breaks (finite fields only)."""
        bad = []

        def check(name, ok):
            if ok is False:
                bad.append(name)

        def fin(*xs):
            return all(math.isfinite(x) for x in xs)

        if fin(self.sigma, self.I_M, self.D_env):
            check("sigma = I_M + D_env", abs(self.sigma - self.I_M - self.D_env) <= tol)
        if fin(self.D_env):
            check("D_env >= 0", self.D_env >= -tol)
        if fin(self.I_M, self.I_SE):
            check("I_M >= I_SE", self.I_M >= self.I_SE - tol)
        if fin(self.I_SE):
            check("I_SE >= 0", self.I_SE >= -tol)
        if fin(self.I_M, self.I_SE, self.I_env):
            check("I_M = I_SE + I_env", abs(self.I_M - self.I_SE - self.I_env) <= tol)
        if fin(self.I_M, self.hs_lower):
            check("hs_lower <= I_M", 0 <= self.hs_lower + tol and self.hs_lower <= self.I_M + tol)
        if fin(self.I_M, self.gh_lower):
            check("gh_lower <= I_M", 0 <= self.gh_lower + tol and self.gh_lower <= self.I_M + tol)
        if fin(self.I_M, self.J_W_M):
            check("J_W_M <= I_M", -tol <= self.J_W_M <= self.I_M + tol)
        if fin(self.J_M, self.J_bound):
            check("J_M <= J_bound", self.J_M <= self.J_bound + tol)
        return bad
