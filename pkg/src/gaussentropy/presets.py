"""Named scenarios that regenerate the reference data sets.

Energies are in units of the (hot) bath temperature ``k_B T = 1`` for the
fermionic and transport scenarios, and of ``omega0 = 1`` for the
Caldeira-Leggett ones. Times are absolute (``hbar = 1``). ``source`` holds the
parameter string of the reference data set verbatim.
"""

import copy

_FERM_SMALL = dict(K=8, W=3.0, Gamma=1.0, beta=1.0, mu=0.0, eps0=-0.5, band_center=0.0, n0=0.0)
_FERM_LARGE = dict(K=400, W=1.0, Gamma=0.02, beta=1.0, mu=1.0, eps0=0.0, band_center=0.0, n0=0.0)
_FERM_TWO_BATH = dict(K=400, W=1.0, Gamma=0.05, beta_H=1.0, beta_C=2.0, eps0=4.0, n0="stationary")
_CALDEIRA_LEGGETT = dict(K=600, omega0=1.0, omega_c=4.0, gamma=0.01, start="vacuum")
_BOSE_TWO_BATH = dict(K=300, W=1.0, gamma=0.0125, beta_H=1.0, beta_C=2.0, omega0=4.0, t0=20.0)

_SMALL_SOURCE = ("initially empty system (<N_0(0)>=0), epsilon_0=-0.5 k_B T, Gamma=k_B T, mu=0, "
                 "W=3 k_B T and K=8")
_LARGE_SOURCE = ("initially empty system (<N_0(0)>=0), Gamma=0.02 k_B T, epsilon_0=0, mu=k_B T, "
                 "W=k_B T and K=400")
_CL_SOURCE = "initial vacuum state of the system, omega_c=4 omega_0, gamma=0.01 omega_0, and K=600"
_BOSE_TWO_BATH_SOURCE = ("t_0=1/(omega_0 gamma), omega_0=4 k_B T_H, T_C=0.5 T_H, gamma_H=gamma_C=gamma=0.0125, "
                         "W=k_B T_H, K=300")

PRESETS = {
    "fig1": dict(
        kind="two_mode_ferm",
        params=dict(n_i=0.5, n_j=0.4),
        axis=dict(name="eps2", start=0.0, stop="max", num=41),
        columns=["eps2", "I_ij", "J_F_ij"],
        source="<n_i>=0.5, <n_j>=0.4, and epsilon_max=sqrt(<n_i><n_j>)",
    ),
    "fig2": dict(
        kind="ferm_exact",
        params=_FERM_SMALL,
        axis=dict(name="t", start=0.0, stop=10.0, num=51),
        columns=["t", "sigma", "I_M", "J_M", "D_env"],
        source=_SMALL_SOURCE,
    ),
    "fig3": dict(
        kind="ferm_exact",
        params=dict(_FERM_SMALL, t_fixed=3.0),
        axis=dict(name="K", values=[4, 6, 8, 10, 12]),
        columns=["K", "inv_K", "sigma", "I_M", "J_M", "D_env"],
        source="Gamma t=3 and other parameters as for: " + _SMALL_SOURCE,
    ),
    "fig4": dict(
        kind="ferm_exact",
        params=_FERM_SMALL,
        axis=dict(name="t", start=0.0, stop=10.0, num=51),
        columns=["t", "I_M", "I_pert", "J_M", "J_pert"],
        source=_SMALL_SOURCE,
    ),
    "fig5": dict(
        kind="ferm_relax",
        params=_FERM_LARGE,
        axis=dict(name="t", start=0.0, stop=250.0, num=51),
        columns=["t", "N0", "N0_markov", "S_S", "S_S_markov", "minus_beta_Q", "minus_beta_Q_markov"],
        source=_LARGE_SOURCE,
    ),
    "fig6": dict(
        kind="ferm_relax",
        params=_FERM_LARGE,
        axis=dict(name="t", start=0.0, stop=250.0, num=26),
        columns=["t", "sigma", "I_M", "J_bound", "D_env", "I_pert"],
        source=_LARGE_SOURCE,
    ),
    "fig7": dict(
        kind="ferm_relax",
        params=_FERM_LARGE,
        axis=dict(name="t", start=0.0, stop=250.0, num=51),
        columns=["t", "I_SE", "J_SE", "D_SE", "ln2"],
        source=_LARGE_SOURCE,
    ),
    "fig8": dict(
        kind="ferm_relax",
        params=dict(_FERM_LARGE, t_fixed=250.0),
        axis=dict(name="K", values=[50, 100, 200, 300, 400]),
        columns=["K", "inv_K", "I_M", "I_pert"],
        source="Gamma t=5, other parameters as for: " + _LARGE_SOURCE,
    ),
    "fig9": dict(
        kind="bose_relax",
        params=_CALDEIRA_LEGGETT,
        axis=dict(name="t", start=0.0, stop=500.0, num=51),
        panels=[dict(kT=0.5), dict(kT=1.0), dict(kT=4.0)],
        columns=["t", "sigma", "I_M", "J_W_M", "D_env"],
        source=_CL_SOURCE,
    ),
    "bosth": dict(
        kind="bose_relax",
        params=dict(_CALDEIRA_LEGGETT, start="thermal2T"),
        axis=dict(name="t", start=0.0, stop=500.0, num=51),
        panels=[dict(kT=0.5), dict(kT=1.0), dict(kT=4.0)],
        columns=["t", "sigma", "I_M", "J_W_M", "D_env"],
        source="system initialized in a thermal state with the temperature 2T, otherwise: " + _CL_SOURCE,
    ),
    "fig10": dict(
        kind="fcs_sweep",
        params=dict(beta_H=1.0, beta_C=2.0, Gamma=0.05, W=1.0, omega_c_ratio=3.0),
        axis=dict(name="eps0", values=[0.1] + [0.25 * k for k in range(1, 25)]),
        columns=["eps0", "J_F", "J_F_bal", "J_B", "J_B_bal", "Var_F", "Var_F_bal", "Var_B", "Var_B_bal"],
        source="T_C=0.5 T_H, Gamma=0.05 k_B T_H, W=k_B T_H, omega_c=3 omega_0",
    ),
    "fig11": dict(
        kind="ferm_transport",
        params=_FERM_TWO_BATH,
        axis=dict(name="t", start=0.0, stop=100.0, num=11),
        columns=["t", "sigma", "sigma_markov", "sigma_ballistic", "I_M", "J_bound", "D_env"],
        source=("epsilon_0=4 k_B T_H, mu_H=mu_C=0, T_C=0.5 T_H, Gamma_H=Gamma_C=Gamma=0.05 k_B T_H, "
                "W=k_B T_H, K=400"),
    ),
    "fig12": dict(
        kind="bose_transport",
        params=_BOSE_TWO_BATH,
        axis=dict(name="t", start=0.0, stop=200.0, num=41),
        columns=["t", "sigma", "sigma_minus_t0", "markov_minus_t0", "ballistic_minus_t0"],
        source=_BOSE_TWO_BATH_SOURCE,
    ),
    "fig13": dict(
        kind="bose_transport",
        params=_BOSE_TWO_BATH,
        axis=dict(name="t", start=0.0, stop=200.0, num=41),
        columns=["t", "sigma", "I_M", "J_W_M", "D_env"],
        source="parameters as for: " + _BOSE_TWO_BATH_SOURCE,
    ),
    "bos2s": dict(
        kind="two_mode_bose",
        params=dict(symmetry="squeezed", cutoff=30),
        axis=dict(name="eps2", start=0.0, stop="max", num=21),
        panels=[dict(n_i=3.0, n_j=3.0), dict(n_i=4.0, n_j=2.0)],
        columns=["eps2", "I_ij", "J_W_ij", "J_F_ij", "leakage"],
        source=("(a) <n_i>=<n_j>=3, and (b) <n_i>=4, <n_j>=2, with "
                "epsilon_max=sqrt((<n_i>+1)<n_j>)"),
    ),
    "bos2s_lowoc": dict(
        kind="two_mode_bose",
        params=dict(n_i=1.0, n_j=1.0, cutoff=30),
        axis=dict(name="eps2", start=0.0, stop="max", num=21),
        panels=[dict(symmetry="squeezed"), dict(symmetry="equal"), dict(symmetry="q_only")],
        columns=["eps2", "I_ij", "J_W_ij", "J_F_ij", "leakage"],
        source=("<n_i>=<n_j>=1, and (a) epsilon_q=-epsilon_p=epsilon, (b) epsilon_q=epsilon_p=epsilon, "
                "and (c) epsilon_q=epsilon, epsilon_p=0"),
    ),
}


def get_preset(name):
    """Deep copy of the named scenario (with ``name`` filled in)."""
    if name not in PRESETS:
        raise KeyError(name)
    sc = copy.deepcopy(PRESETS[name])
    sc["name"] = name
    return sc
