"""Figure parameter sets, converted to g_1 units.

Captions quote the exciton-2 pump as a multiple of g_2; those are multiplied
out here so nothing downstream mixes units.
"""

from __future__ import annotations

from .core import SystemParams

G2 = 1.5

BASE = SystemParams(
    gamma_a=0.3,
    gamma_1=0.15,
    gamma_2=0.2,
    g_2=G2,
    delta_1=1.0,
    delta_2=0.0,
    P_a=0.1,
    P_1=0.1,
    P_2=0.1 * G2,
    beta=0.0,
)

BETAS = (0.0, 0.25, 0.5, 1.0)
PUMP_SCALES = (0.01, 0.1, 1.0, 10.0)
CAVITY_PUMPS = (0.01, 0.1, 1.0, 10.0)

FIGURE_CHANNEL = {2: "cavity", 3: "exciton1", 4: "exciton2", 5: "cavity", 6: "cavity"}


def fig2(beta: float = 0.0) -> SystemParams:
    return BASE.replace(beta=beta)


def fig5(scale: float, beta: float = 0.0) -> SystemParams:
    """Exciton pumps P_1 = scale*g_1, P_2 = scale*g_2."""
    return BASE.replace(P_1=scale, P_2=scale * G2, beta=beta)


def fig6(P_a: float, beta: float = 0.0) -> SystemParams:
    return BASE.replace(P_a=P_a, beta=beta)


def figure_panels(figure: int) -> list[tuple[str, SystemParams]]:
    """Named parameter sets behind each panel of a figure."""
    if figure in (2, 3, 4):
        return [(f"beta={b:g}", fig2(b)) for b in BETAS]
    if figure == 5:
        return [
            (f"{panel}_pump={s:g}_beta={b:g}", fig5(s, b))
            for panel, s in zip("abcd", PUMP_SCALES)
            for b in (0.0, 1.0)
        ]
    if figure == 6:
        return [
            (f"{panel}_P_a={pa:g}_beta={b:g}", fig6(pa, b))
            for panel, pa in zip("abcd", CAVITY_PUMPS)
            for b in (0.0, 1.0)
        ]
    raise ValueError(f"no preset for figure {figure}")


PRESETS = {
    "fig2": fig2(0.0),
    "fig3": fig2(0.0),
    "fig4": fig2(0.0),
    "fig5": fig5(0.01),
    "fig6": fig6(0.01),
    # both excitons uncoupled: the cavity line alone
    "decoupled": BASE.replace(g_1=0.0, g_2=0.0),
}


def all_panel_params() -> dict[str, SystemParams]:
    """Every distinct figure parameter set, keyed ``figN/panel``."""
    out = {}
    for fig in (2, 3, 4, 5, 6):
        for name, p in figure_panels(fig):
            out[f"fig{fig}/{name}"] = p
    return out
