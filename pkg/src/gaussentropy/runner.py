"""Scenario resolution, evaluation and the Gaussian-versus-many-body cross-check.

A scenario has a ``kind``, physical ``params``, an ``axis`` (the first CSV
column) and optional ``panels`` (one CSV each, given as parameter overrides).
Evaluation is deterministic: identical scenarios give identical tables.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import copy
import math
import time
import warnings

import numpy as np

from .boson_gaussian import (
    BosonBathSpec, CovariancePropagator, bose_entropy_ledger, build_bosonic_hamiltonian, init_covariance,
    mode_block, two_mode_bose, two_mode_eps_max, vn_entropy_bose,
)
from .fermion_exact import MAX_BATH_MODES, build_many_body, evolve_density, exact_ledger
from .fermion_gaussian import (
    CorrelationPropagator, FermionBathSpec, binary_entropy, build_single_particle_hamiltonian, entropy_ledger,
    init_correlation_matrix, perturbative_fock_correlation, perturbative_total_correlation, two_mode_fermi,
)
from .presets import PRESETS, get_preset
from .transport_fcs import (
    WeakCouplingWarning, ballistic_current_and_variance, bose_band_channel, bose_channel, current_and_variance,
    fermi_channel, markov_relaxation, markov_transport,
)

ORACLE_TOL = 1e-8
ORACLE_MAX_BATH = 8
ORACLE_FIELDS = ("sigma", "I_M", "D_env", "I_SE", "I_env", "heat_Q", "dS_system", "entropy_flow")

REQUIRED = object()

PARAMS = {
    "ferm_relax": dict(K=REQUIRED, W=REQUIRED, Gamma=REQUIRED, beta=1.0, mu=0.0, eps0=REQUIRED,
                       band_center=0.0, n0=0.0, t_fixed=None),
    "ferm_exact": dict(K=REQUIRED, W=REQUIRED, Gamma=REQUIRED, beta=1.0, mu=0.0, eps0=REQUIRED,
                       band_center=0.0, n0=0.0, t_fixed=None),
    "ferm_transport": dict(K=REQUIRED, W=REQUIRED, Gamma=REQUIRED, beta_H=REQUIRED, beta_C=REQUIRED,
                           eps0=REQUIRED, n0="stationary", t_fixed=None),
    "bose_relax": dict(K=REQUIRED, omega0=1.0, omega_c=REQUIRED, gamma=REQUIRED, kT=REQUIRED,
                       start="vacuum", t_fixed=None),
    "bose_transport": dict(K=REQUIRED, W=REQUIRED, gamma=REQUIRED, beta_H=REQUIRED, beta_C=REQUIRED,
                           omega0=REQUIRED, t0=None, start="stationary", t_fixed=None),
    "two_mode_ferm": dict(n_i=REQUIRED, n_j=REQUIRED),
    "two_mode_bose": dict(n_i=REQUIRED, n_j=REQUIRED, symmetry="squeezed", cutoff=30),
    "fcs_sweep": dict(beta_H=REQUIRED, beta_C=REQUIRED, Gamma=REQUIRED, W=REQUIRED, omega_c_ratio=3.0),
}

AXES = {
    "ferm_relax": ("t", "K"), "ferm_exact": ("t", "K"), "ferm_transport": ("t", "K"),
    "bose_relax": ("t", "K"), "bose_transport": ("t", "K"),
    "two_mode_ferm": ("eps2",), "two_mode_bose": ("eps2",), "fcs_sweep": ("eps0",),
}

_FERM_LEDGER = ["sigma", "I_M", "D_env", "J_bound", "I_SE", "I_env", "J_SE", "heat_Q", "dS_system",
                "hs_lower", "gh_lower", "entropy_flow"]
_BOSE_LEDGER = ["sigma", "I_M", "D_env", "I_SE", "I_env", "heat_Q", "dS_system", "entropy_flow",
                "J_W_M", "J_W_SE"]

COLUMNS = {
    "ferm_relax": _FERM_LEDGER + ["N0", "S_S", "minus_beta_Q", "N0_markov", "S_S_markov",
                                  "minus_beta_Q_markov", "sigma_markov", "I_pert", "J_pert", "D_SE", "ln2"],
    "ferm_exact": _FERM_LEDGER + ["J_M", "I_pert", "J_pert", "D_SE", "ln2"],
    "ferm_transport": _FERM_LEDGER + ["sigma_markov", "sigma_ballistic", "sigma_counting", "I_pert", "D_SE"],
    "bose_relax": _BOSE_LEDGER + ["N0", "S_S"],
    "bose_transport": _BOSE_LEDGER + ["sigma_minus_t0", "markov_minus_t0", "ballistic_minus_t0",
                                      "sigma_markov", "sigma_ballistic"],
    "two_mode_ferm": ["eps", "I_ij", "J_F_ij", "ratio"],
    "two_mode_bose": ["eps", "I_ij", "J_W_ij", "J_F_ij", "leakage"],
    "fcs_sweep": ["J_F", "J_F_bal", "J_B", "J_B_bal", "Var_F", "Var_F_bal", "Var_B", "Var_B_bal"],
}


class ConfigError(ValueError):
    """Scenario cannot be resolved to a complete, consistent parameter set."""


class OracleMismatch(RuntimeError):
    """Gaussian and many-body routes disagree beyond tolerance."""


@dataclass
class Panel:
    label: str
    params: dict
    header: list
    rows: list
    runtime: float = 0.0


@dataclass
class OracleReport:
    """Maximum absolute deviation per ledger quantity between the two routes."""

    deviations: dict
    J_M_within_bound: bool
    tol: float = ORACLE_TOL
    times: list = field(default_factory=list)

    @property
    def passed(self):
        return self.J_M_within_bound and all(d < self.tol for d in self.deviations.values())

    @property
    def worst(self):
        return max(self.deviations, key=self.deviations.get)

    def as_dict(self):
        return dict(deviations=self.deviations, J_M_within_bound=self.J_M_within_bound, tol=self.tol,
                    passed=self.passed)


# --------------------------------------------------------------------- resolve


def _merge_preset(config):
    config = copy.deepcopy(config)
    name = config.pop("preset", None)
    if name is None:
        return config
    if name not in PRESETS:
        raise ConfigError(f"preset: unknown preset {name!r} (available: {', '.join(sorted(PRESETS))})")
    sc = get_preset(name)
    if "kind" in config and config["kind"] != sc["kind"]:
        raise ConfigError(f"kind: preset {name!r} is {sc['kind']!r}, cannot change it to {config['kind']!r}")
    sc["params"].update(config.pop("params", {}))
    sc.update(config)
    return sc


def _check_params(kind, params, where="params"):
    allowed = PARAMS[kind]
    for k in params:
        if k not in allowed:
            raise ConfigError(f"{where}.{k}: unknown parameter for kind {kind!r} "
                              f"(allowed: {', '.join(allowed)})")


def resolve(config):
    """Complete scenario from a config dict (preset names and overrides merged).

    Raises
    ------
    ConfigError
        With the offending field in the message.
    """
    sc = _merge_preset(config)
    for key in ("kind", "params", "axis"):
        if key not in sc:
            raise ConfigError(f"{key}: required field missing")
    kind = sc["kind"]
    if kind not in PARAMS:
        raise ConfigError(f"kind: unknown kind {kind!r}")
    sc.setdefault("name", kind)
    sc.setdefault("panels", [{}])
    sc.setdefault("oracle_check", False)
    sc.setdefault("source", "")
    _check_params(kind, sc["params"])
    for i, p in enumerate(sc["panels"]):
        _check_params(kind, p, f"panels[{i}]")
    for i, p in enumerate(sc["panels"]):
        full = {**sc["params"], **p}
        missing = [k for k, v in PARAMS[kind].items() if v is REQUIRED and k not in full]
        if missing:
            raise ConfigError(f"params.{missing[0]}: required for kind {kind!r}")

    axis = sc["axis"]
    if axis.get("name") not in AXES[kind]:
        raise ConfigError(f"axis.name: {axis.get('name')!r} not valid for kind {kind!r} "
                          f"(allowed: {', '.join(AXES[kind])})")
    if "values" not in axis and not all(k in axis for k in ("start", "stop", "num")):
        raise ConfigError("axis: give either 'values' or 'start', 'stop' and 'num'")
    if axis["name"] == "K":
        if any("t_fixed" not in {**sc["params"], **p} or {**sc["params"], **p}["t_fixed"] is None
               for p in sc["panels"]):
            raise ConfigError("params.t_fixed: required when the axis is K")
        vals = axis.get("values", [])
        if any(int(v) != v or v < 2 for v in vals):
            raise ConfigError("axis.values: K must be integers >= 2")
    if axis.get("stop") == "max" and axis["name"] != "eps2":
        raise ConfigError("axis.stop: 'max' only applies to the eps2 axis")

    cols = sc.get("columns") or [axis["name"]] + COLUMNS[kind]
    if cols[0] != axis["name"]:
        cols = [axis["name"]] + [c for c in cols if c != axis["name"]]
    extra = ["inv_K"] if axis["name"] == "K" else []
    extra += ["eps2"] if kind.startswith("two_mode") else []
    bad = [c for c in cols[1:] if c not in COLUMNS[kind] + extra]
    if bad:
        raise ConfigError(f"columns: {bad[0]!r} not available for kind {kind!r}")
    sc["columns"] = cols

    if sc["oracle_check"]:
        if kind not in ("ferm_relax", "ferm_exact", "ferm_transport"):
            raise ConfigError(f"oracle_check: only fermionic kinds can be cross-checked, not {kind!r}")
        for p in sc["panels"]:
            full = {**sc["params"], **p}
            Ks = axis["values"] if axis["name"] == "K" else [full["K"]]
            n_baths = 2 if kind == "ferm_transport" else 1
            if max(Ks) * n_baths > ORACLE_MAX_BATH:
                raise ConfigError(f"oracle_check: {max(Ks) * n_baths} bath modes exceeds the cross-check "
                                  f"limit of {ORACLE_MAX_BATH}")
    if kind == "ferm_exact":
        full_Ks = [axis["values"] if axis["name"] == "K" else [{**sc["params"], **p}["K"]] for p in sc["panels"]]
        if max(max(k) for k in full_Ks) > MAX_BATH_MODES:
            raise ConfigError(f"params.K: the many-body route supports at most {MAX_BATH_MODES} bath modes")
    return sc


def apply_sweep(sc, key, values):
    """Replace the axis (if ``key`` names it) or expand the panels over ``values``."""
    sc = copy.deepcopy(sc)
    if key == sc["axis"]["name"]:
        sc["axis"] = {"name": key, "values": list(values)}
        return sc
    if key not in PARAMS[sc["kind"]]:
        raise ConfigError(f"sweep: {key!r} is neither the axis nor a parameter of kind {sc['kind']!r}")
    sc["panels"] = [{**p, key: v} for p in sc["panels"] for v in values]
    return sc


def _axis_values(sc, params):
    ax = sc["axis"]
    if "values" in ax:
        return [float(v) for v in ax["values"]]
    stop = ax["stop"]
    if stop == "max":
        stop = _eps_max(sc["kind"], params) ** 2
    return [float(v) for v in np.linspace(ax["start"], stop, ax["num"])]


def _eps_max(kind, p):
    if kind == "two_mode_ferm":
        return min(math.sqrt(p["n_i"] * p["n_j"]), math.sqrt((1 - p["n_i"]) * (1 - p["n_j"])))
    return two_mode_eps_max(p["n_i"], p["n_j"], p["symmetry"])


# ------------------------------------------------------------------ evaluators


def _ferm_spec(p, K):
    return FermionBathSpec.uniform(int(K), p["W"], p["Gamma"], p["beta"], mu=p["mu"], eps0=p["eps0"],
                                   band_center=p["band_center"])


def _ferm_two_bath(p, K):
    return [FermionBathSpec.uniform(int(K), p["W"], p["Gamma"], p["beta_H"], eps0=p["eps0"], name="H"),
            FermionBathSpec.uniform(int(K), p["W"], p["Gamma"], p["beta_C"], eps0=p["eps0"], name="C")]


def _bose_relax_spec(p, K):
    return BosonBathSpec.ohmic(int(K), p["omega_c"], p["gamma"], 1.0 / p["kT"], p["omega0"])


def _bose_two_bath(p, K):
    return [BosonBathSpec.band(int(K), p["W"], p["gamma"], p["beta_H"], p["omega0"], name="H"),
            BosonBathSpec.band(int(K), p["W"], p["gamma"], p["beta_C"], p["omega0"], name="C")]


def _ledger_values(L, names):
    return {k: getattr(L, k) for k in names}


class _FermionModel:
    """Propagator and references for one fermionic parameter set."""

    def __init__(self, kind, p, K, cols):
        self.kind, self.p, self.cols = kind, p, set(cols)
        self.specs = _ferm_two_bath(p, K) if kind == "ferm_transport" else [_ferm_spec(p, K)]
        self.C0 = init_correlation_matrix(self.specs, p["n0"])
        self.prop = CorrelationPropagator(build_single_particle_hamiltonian(self.specs))
        if kind == "ferm_exact":
            self.H_many, self.rho0 = build_many_body(self.specs, p["n0"])
            for N in self.H_many.blocks:
                self.H_many.eig(N)
        if kind == "ferm_relax" and self.cols & {"N0_markov", "S_S_markov", "minus_beta_Q_markov", "sigma_markov"}:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", WeakCouplingWarning)
                self.markov = markov_relaxation(self.specs[0], float(self.C0[0, 0].real))
        if kind == "ferm_transport":
            dbeta = p["beta_C"] - p["beta_H"]
            ch = fermi_channel(p["eps0"], p["Gamma"], p["Gamma"], p["W"], p["beta_H"], p["beta_C"])
            self.rates = {}
            if "sigma_markov" in self.cols:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", WeakCouplingWarning)
                    self.rates["sigma_markov"] = markov_transport(
                        "fermi", p["eps0"], p["Gamma"], p["Gamma"], p["beta_H"], p["beta_C"]).sigma_rate
            if "sigma_ballistic" in self.cols:
                self.rates["sigma_ballistic"] = dbeta * ballistic_current_and_variance(ch).J_Q
            if "sigma_counting" in self.cols:
                self.rates["sigma_counting"] = dbeta * current_and_variance(ch).J_Q

    def ledger(self, t):
        C = self.prop(self.C0, t)
        L = entropy_ledger(C, self.C0, self.specs, t=t, chain_bound="J_bound" in self.cols,
                           localize=bool(self.cols & {"J_SE", "D_SE"}))
        return C, L

    def row(self, t):
        C, L = self.ledger(t)
        out = _ledger_values(L, _FERM_LEDGER)
        c = self.cols
        if self.kind == "ferm_exact":
            E = exact_ledger(evolve_density(self.rho0, self.H_many, t), self.rho0, self.specs, t=t)
            out.update(_ledger_values(E, ORACLE_FIELDS))
            out["J_M"] = E.J_M
        n0 = float(C[0, 0].real)
        out.update(N0=n0, S_S=float(binary_entropy(n0)), minus_beta_Q=L.entropy_flow,
                   D_SE=out["I_SE"] - out["J_SE"], ln2=math.log(2))
        if "I_pert" in c:
            out["I_pert"] = perturbative_total_correlation(C)
        if "J_pert" in c:
            out["J_pert"] = perturbative_fock_correlation(C)
        if hasattr(self, "markov"):
            m = self.markov
            out.update(N0_markov=float(m.occupation(t)), S_S_markov=float(binary_entropy(m.occupation(t))),
                       minus_beta_Q_markov=float(m.entropy_flow(t)), sigma_markov=float(m.sigma(t)))
        for k, rate in getattr(self, "rates", {}).items():
            out[k] = rate * t
        return out


class _BosonModel:
    def __init__(self, kind, p, K, cols):
        self.kind, self.p, self.cols = kind, p, set(cols)
        if kind == "bose_relax":
            self.specs = [_bose_relax_spec(p, K)]
            start = p["start"]
            beta = self.specs[0].beta
            if start == "vacuum":
                self.S0 = init_covariance(self.specs, system_occupancy=0.0)
            elif start == "thermal2T":
                self.S0 = init_covariance(self.specs, system_beta=beta / 2)
            elif start == "stationary" or isinstance(start, (int, float)):
                self.S0 = init_covariance(self.specs, system_occupancy=start)
            else:
                raise ConfigError(f"params.start: unknown initial state {start!r}")
        else:
            self.specs = _bose_two_bath(p, K)
            self.S0 = init_covariance(self.specs, system_occupancy=p["start"])
        self.prop = CovariancePropagator(build_bosonic_hamiltonian(self.specs))
        if kind == "bose_transport":
            w0, g = p["omega0"], p["gamma"]
            dbeta = p["beta_C"] - p["beta_H"]
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", WeakCouplingWarning)
                self.rate_markov = markov_transport("bose", w0, g * w0, g * w0, p["beta_H"], p["beta_C"]).sigma_rate
            ch = bose_band_channel(w0, g, g, p["W"], p["beta_H"], p["beta_C"])
            self.rate_ballistic = dbeta * ballistic_current_and_variance(ch).J_Q
            self.t0 = p["t0"] if p["t0"] is not None else 1.0 / (w0 * g)
            self.sigma_t0 = self._ledger(self.t0).sigma

    def _ledger(self, t):
        return bose_entropy_ledger(self.prop(self.S0, t), self.S0, self.specs, t=t)

    def row(self, t):
        St = self.prop(self.S0, t)
        L = bose_entropy_ledger(St, self.S0, self.specs, t=t)
        out = _ledger_values(L, _BOSE_LEDGER)
        out["N0"] = (St[0, 0] + St[self.prop.N, self.prop.N]) / 2 - 0.5
        out["S_S"] = vn_entropy_bose(mode_block(St, [0]))
        if self.kind == "bose_transport":
            nan = float("nan")
            after = t >= self.t0
            out.update(
                sigma_minus_t0=L.sigma - self.sigma_t0 if after else nan,
                markov_minus_t0=self.rate_markov * (t - self.t0) if after else nan,
                ballistic_minus_t0=self.rate_ballistic * (t - self.t0) if after else nan,
                sigma_markov=self.rate_markov * t, sigma_ballistic=self.rate_ballistic * t,
            )
        return out


def _time_panel(sc, p, pool):
    kind, cols = sc["kind"], sc["columns"]
    Model = _BosonModel if kind.startswith("bose") else _FermionModel
    if sc["axis"]["name"] == "t":
        model = Model(kind, p, p["K"], cols)
        return list(pool.map(model.row, _axis_values(sc, p)))

    def at_K(K):
        row = Model(kind, p, K, cols).row(p["t_fixed"])
        row["inv_K"] = 1.0 / K
        return row

    return list(pool.map(at_K, _axis_values(sc, p)))


def _two_mode_panel(sc, p, pool):
    kind = sc["kind"]
    want_fock = "J_F_ij" in sc["columns"] or "leakage" in sc["columns"]
    eps_max = _eps_max(kind, p)

    def at(eps2):
        if eps2 < 0:
            raise ConfigError(f"axis: eps2={eps2} must be non-negative")
        eps = min(math.sqrt(eps2), eps_max)
        if kind == "two_mode_ferm":
            r = two_mode_fermi(p["n_i"], p["n_j"], eps)
            return dict(eps=eps, I_ij=r.I_ij, J_F_ij=r.J_F_ij, ratio=r.J_F_ij / r.I_ij if r.I_ij > 0 else 0.0)
        sign = {"squeezed": -1.0, "equal": 1.0, "q_only": 0.0}.get(p["symmetry"])
        if sign is None:
            raise ConfigError(f"params.symmetry: unknown symmetry {p['symmetry']!r}")
        r = two_mode_bose(p["n_i"], p["n_j"], eps, sign * eps, fock=want_fock, cutoff=int(p["cutoff"]),
                          max_leakage=None)
        return dict(eps=eps, I_ij=r.I_ij, J_W_ij=r.J_W_ij, J_F_ij=r.J_F_ij, leakage=r.leakage)

    return list(pool.map(at, _axis_values(sc, p)))


def _fcs_panel(sc, p, pool):
    def at(e0):
        if not e0 > 0:
            raise ConfigError(f"axis: eps0={e0} must be positive")
        f = fermi_channel(e0, p["Gamma"], p["Gamma"], p["W"], p["beta_H"], p["beta_C"])
        # bosonic rate gamma * omega0 held at Gamma across the sweep
        b = bose_channel(e0, p["Gamma"] / e0, p["Gamma"] / e0, p["omega_c_ratio"] * e0, p["beta_H"], p["beta_C"])
        sf, sfb = current_and_variance(f), ballistic_current_and_variance(f)
        sb, sbb = current_and_variance(b), ballistic_current_and_variance(b)
        return dict(J_F=sf.J_Q, J_F_bal=sfb.J_Q, J_B=sb.J_Q, J_B_bal=sbb.J_Q, Var_F=sf.var_JQ,
                    Var_F_bal=sfb.var_JQ, Var_B=sb.var_JQ, Var_B_bal=sbb.var_JQ)

    return list(pool.map(at, _axis_values(sc, p)))


def _panel_label(overrides):
    return "_".join(f"{k}{v}" for k, v in overrides.items())


def run_scenario(sc, threads=1):
    """Evaluate every panel of a resolved scenario.

    Returns
    -------
    panels : list of Panel
    oracle : list of OracleReport (empty unless ``sc["oracle_check"]``)
    """
    kind = sc["kind"]
    panels, reports = [], []
    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        for overrides in sc["panels"]:
            start = time.perf_counter()
            p = {k: v for k, v in PARAMS[kind].items() if v is not REQUIRED}
            p.update(sc["params"])
            p.update(overrides)
            if kind.startswith("two_mode"):
                rows = _two_mode_panel(sc, p, pool)
            elif kind == "fcs_sweep":
                rows = _fcs_panel(sc, p, pool)
            else:
                rows = _time_panel(sc, p, pool)
            axis = sc["axis"]["name"]
            values = _axis_values(sc, p)
            table = []
            for x, r in zip(values, rows):
                r[axis] = int(x) if axis == "K" else x
                table.append([r[c] for c in sc["columns"]])
            panels.append(Panel(_panel_label(overrides), p, list(sc["columns"]), table,
                                time.perf_counter() - start))
            if sc["oracle_check"]:
                Ks = values if axis == "K" else [p["K"]]
                for K in Ks:
                    specs = _ferm_two_bath(p, K) if kind == "ferm_transport" else [_ferm_spec(p, K)]
                    times = [p["t_fixed"]] if axis == "K" else values
                    reports.append(oracle_check(specs, times, system_occupancy=p["n0"]))
    return panels, reports


def oracle_check(spec, times, system_occupancy=0.0, exact_spec=None, tol=ORACLE_TOL):
    """Run the Gaussian and many-body routes side by side.

    Parameters
    ----------
    spec : FermionBathSpec or list
        Scenario for the Gaussian route.
    exact_spec : FermionBathSpec or list, optional
        Scenario for the many-body route (defaults to ``spec``); a deliberately
        different one exercises the failure path.
    """
    specs = [spec] if isinstance(spec, FermionBathSpec) else list(spec)
    exact_specs = specs if exact_spec is None else (
        [exact_spec] if isinstance(exact_spec, FermionBathSpec) else list(exact_spec))
    if sum(s.K for s in exact_specs) > ORACLE_MAX_BATH:
        raise ConfigError(f"oracle_check: more than {ORACLE_MAX_BATH} bath modes")
    C0 = init_correlation_matrix(specs, system_occupancy)
    prop = CorrelationPropagator(build_single_particle_hamiltonian(specs))
    H_many, rho0 = build_many_body(exact_specs, system_occupancy)
    dev = dict.fromkeys(ORACLE_FIELDS, 0.0)
    bounded = True
    for t in times:
        G = entropy_ledger(prop(C0, t), C0, specs, t=t, localize=False)
        E = exact_ledger(evolve_density(rho0, H_many, t), rho0, exact_specs, t=t)
        for k in ORACLE_FIELDS:
            dev[k] = max(dev[k], abs(getattr(G, k) - getattr(E, k)))
        bounded &= bool(E.J_M <= G.J_bound + tol)
    return OracleReport(dev, bounded, tol, [float(t) for t in times])
