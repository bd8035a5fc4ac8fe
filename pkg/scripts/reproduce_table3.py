"""Print the site comparison table for a scenario and write it to --out."""
import argparse
from pathlib import Path

from stockfire import scenario_io as sio


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario")
    ap.add_argument("--out", type=Path, default=Path("out"))
    args = ap.parse_args()
    scn = sio.load_scenario(args.scenario) if args.scenario else sio.reference_scenario()
    t = sio.reproduce_table3(scn)
    rows = [
        ("Baseline CH4 (tCO2e/yr)", f"{t.baseline_ch4_tco2e_yr:,.0f}"),
        ("Project CH4 (tCO2e/yr)", f"{t.project_ch4_tco2e_yr:,.0f}"),
        ("Reduction", f"{100 * t.reduction_pct:.1f} %"),
        ("Land recovered (ha)", f"{t.land_ha:g}"),
        ("Firm capacity (MW)", f"{t.firm_capacity_mw:g}"),
        ("Annual generation (GWh)", f"{t.annual_generation_gwh:.1f}"),
        ("  baseline gas engines (GWh)", f"{sio.baseline_lfg_generation_gwh(scn):.1f}"),
        ("Share of DC demand", f"{100 * t.dc_share_pct:.2f} %"),
    ]
    width = max(len(r[0]) for r in rows)
    for label, value in rows:
        print(f"{label:<{width}}  {value:>12}")
    for p in sio.write_report(sio.ReportBundle(table3=t, pathways=sio.pathway_balances(scn)), args.out):
        print(f"wrote {p}")


if __name__ == "__main__":
    main()
