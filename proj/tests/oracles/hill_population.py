"""Population value of the Hill functional at the top-2% threshold for h(Z), Z ~ N(0,1)."""
from mpmath import mp, mpf, exp, log, quad, npdf, ncdf, erfinv, sqrt, inf

mp.dps = 30


def tail_magnitude(z, b):
    # |h| along the tail where |h| ~ 2 exp(b x^2); b = 0.2 right, 0.1 left
    return 2 * (exp(b * z * z) - 1) + z


def hill_index(b, q=mpf("0.02")):
    z0 = sqrt(2) * erfinv(1 - 2 * q)
    g0 = tail_magnitude(z0, b)
    gamma = quad(lambda z: log(tail_magnitude(z, b) / g0) * npdf(z), [z0, inf]) / q
    return 1 / gamma


print("right", hill_index(mpf("0.2")))
print("left ", hill_index(mpf("0.1")))
