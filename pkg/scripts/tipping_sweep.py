"""Sweep remediation capex and report the break-even methane price under GWP100 and GWP20."""
import argparse
from dataclasses import replace

import numpy as np

from stockfire import gas_model as gm
from stockfire import regime_engine as rg
from stockfire import scenario_io as sio


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario")
    ap.add_argument("--regime", default=str(sio.DATA_DIR / "methane_credit_demo.regime"))
    ap.add_argument("--capex", type=float, nargs=3, default=(20.0, 100.0, 10.0),
                    metavar=("START", "STOP", "STEP"))
    args = ap.parse_args()
    scn = sio.load_scenario(args.scenario) if args.scenario else sio.reference_scenario()
    template = rg.load_regime(args.regime)
    start, stop, step = args.capex
    print(f"{'capex $/t':>10}{'lambda* GWP100':>16}{'lambda* GWP20':>16}")
    for capex in np.arange(start, stop + step / 2, step):
        s = replace(scn, costs=replace(scn.costs, remediation_capex_opex=float(capex)))
        cells = []
        for gwp in (gm.GWP100, gm.GWP20):
            lam = rg.tipping_point_lambda(s, replace(template, gwp=gwp))
            cells.append("none" if lam is None else f"{lam:.2f}")
        print(f"{capex:10.1f}{cells[0]:>16}{cells[1]:>16}")


if __name__ == "__main__":
    main()
