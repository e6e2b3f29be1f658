"""
Approaching the lower bound
===========================

``psi(x) ~ exp(-|x|/2) |x|^(eps - 1/2)`` gives ``<(2xp)^2>_W = 2 eps - 1``,
arbitrarily close to -1 as ``eps`` shrinks.
"""

import numpy as np

from wignerneg.regularized import RegularizedStateParams, fb_moment, psi_norm_check, wigner_point

for eps in (1.0, 0.5, 0.25, 0.1, 0.05, 0.02):
    params = RegularizedStateParams(eps)
    print("eps=%-5g norm=%.12f  <(2xp)^2>_W=%.9f" % (eps, psi_norm_check(params), fb_moment(params)))

# a slice of the Wigner function; it oscillates in sign along p
params = RegularizedStateParams(0.1)
ps = np.linspace(0, 4, 9)
print(np.round(wigner_point(params, 1.0, ps), 5))
