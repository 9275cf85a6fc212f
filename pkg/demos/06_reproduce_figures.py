"""Write the four figure data sets (CSV plus SVG) through the command line.

Usage: python demos/06_reproduce_figures.py [output_dir]

Figure 3 is the bias and normalized variance of theta_hat against theta,
figure 5 the same for delta_phi_hat, and figures 4 and 6 compare the
standardized cumulative distributions with the normal law.
"""

import sys

from polestim.cli import main

out = sys.argv[1] if len(sys.argv) > 1 else "figures"
for which, extra in (("3", ["--grid", "91"]), ("4", []), ("5", ["--grid", "31"]), ("6", [])):
    code = main(["figure", which, "--out", out, *extra])
    if code:
        sys.exit(code)
print(f"figures written to {out}/")
