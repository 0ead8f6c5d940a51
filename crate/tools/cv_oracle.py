"""High-precision reference implementation of the CV secret-key-rate formulas.

Evaluates the Gaussian-modulation, M-PSK and multipartite-CKA key rates with
60-digit arithmetic (mpmath) and freezes randomized input/output pairs into
a JSON fixture consumed by the Rust test suite. The Rust implementation must
reproduce every frozen value to 1e-9 relative.

Run from the repository root:

    python3 tools/cv_oracle.py crates/core/tests/fixtures/cv_oracle.json
"""

import json
import random
import sys

import mpmath as mp

mp.mp.dps = 60


def log2(x):
    return mp.log(x) / mp.log(2)


def gfun(x):
    """G(x) = (x+1) log2(x+1) - x log2(x), continuous at 0."""
    if x <= 0:
        return mp.mpf(0)
    return (x + 1) * log2(x + 1) - x * log2(x)


def mutual_information(va, t, xi, pdet, vel, det):
    if det == "hom":
        return mp.mpf("0.5") * log2(1 + pdet * t * va / (1 + vel + pdet * t * xi))
    return log2(1 + pdet * t * va / (2 + 2 * vel + pdet * t * xi))


def gaussian_holevo(va, t, xi, pdet, vel, det):
    V = va + 1
    chi_line = 1 / t - 1 + xi
    if det == "hom":
        chi_det = (1 - pdet + vel) / pdet
    else:
        chi_det = (1 + (1 - pdet) + 2 * vel) / pdet
    chi_tot = chi_line + chi_det / t

    A = V**2 * (1 - 2 * t) + 2 * t + t**2 * (V + chi_line) ** 2
    B = t**2 * (V * chi_line + 1) ** 2
    sq_b = mp.sqrt(B)
    l1 = mp.sqrt((A + mp.sqrt(A**2 - 4 * B)) / 2)
    l2 = mp.sqrt((A - mp.sqrt(A**2 - 4 * B)) / 2)

    denom = t * (V + chi_tot)
    if det == "hom":
        C = (A * chi_det + V * sq_b + t * (V + chi_line)) / denom
        D = sq_b * (V + sq_b * chi_det) / denom
    else:
        C = (
            A * chi_det**2
            + B
            + 1
            + 2 * chi_det * (V * sq_b + t * (V + chi_line))
            + 2 * t * (V**2 - 1)
        ) / denom**2
        D = ((V + sq_b * chi_det) / denom) ** 2

    l3 = mp.sqrt((C + mp.sqrt(C**2 - 4 * D)) / 2)
    l4 = mp.sqrt((C - mp.sqrt(C**2 - 4 * D)) / 2)
    chi = gfun((l1 - 1) / 2) + gfun((l2 - 1) / 2) - gfun((l3 - 1) / 2) - gfun((l4 - 1) / 2)
    return chi, (l1, l2, l3, l4)


def gaussian_skr(va, t, xi, pdet, vel, beta, det):
    iab = mutual_information(va, t, xi, pdet, vel, det)
    chi, _ = gaussian_holevo(va, t, xi, pdet, vel, det)
    return max(mp.mpf(0), beta * iab - chi), iab, chi


def psk_nu(m, alpha_sq):
    """nu_k for an m-point phase-shift-keyed constellation."""
    nus = []
    for k in range(m):
        acc = mp.mpc(0)
        for j in range(m):
            phase = mp.mpc(0, 2 * mp.pi * j / m)
            acc += mp.e ** (-mp.mpc(0, 1) * j * k * 2 * mp.pi / m) * mp.e ** (alpha_sq * mp.e**phase)
        nus.append(acc / m)
    return nus


def psk_holevo(m, alpha_sq, t, xi, pdet, vel, det):
    va = 2 * alpha_sq
    V = va + 1
    W = 1 + pdet * t * va + pdet * t * xi + vel
    nus = psk_nu(m, alpha_sq)
    for nu in nus:
        if abs(mp.im(nu)) > mp.mpf("1e-10"):
            raise ValueError("nu_k has non-negligible imaginary part")
    nur = [mp.re(nu) for nu in nus]

    s32 = sum(nur[k] ** mp.mpf("1.5") / mp.sqrt(nur[(k + 1) % m]) for k in range(m))
    s2 = sum(nur[j] ** 2 / nur[(j + 1) % m] for j in range(m))
    exp_a = mp.e ** (-alpha_sq)
    inner = exp_a * s2 - exp_a**2 * s32**2
    Z = mp.sqrt(t) * (2 * alpha_sq * exp_a * s32 - mp.sqrt(2 * xi * alpha_sq) * mp.sqrt(inner))

    delta = V**2 + W**2 - 2 * Z**2
    det_g = (V * W - Z**2) ** 2
    l1 = mp.sqrt((delta + mp.sqrt(delta**2 - 4 * det_g)) / 2)
    l2 = mp.sqrt((delta - mp.sqrt(delta**2 - 4 * det_g)) / 2)
    if det == "hom":
        l3 = V - Z**2 / (W + 1)
    else:
        l3 = mp.sqrt(V * (V - Z**2 / W))
    chi = gfun((l1 - 1) / 2) + gfun((l2 - 1) / 2) - gfun((l3 - 1) / 2)
    return chi, Z, W, (l1, l2, l3)


def psk_skr(m, alpha_sq, t, xi, pdet, vel, beta, det):
    va = 2 * alpha_sq
    iab = mutual_information(va, t, xi, pdet, vel, det)
    chi, _, _, _ = psk_holevo(m, alpha_sq, t, xi, pdet, vel, det)
    return max(mp.mpf(0), beta * iab - chi), iab, chi


def cka_skr(mu, n, t, pdet, vel, beta):
    delta = (1 - pdet + vel) / pdet
    omega = 2 * delta + 1
    x = t * mu + (1 - t) * omega
    y = mu
    z_sq = t * (mu**2 - 1)

    d1 = y - (n - 1) * z_sq / (n * x)
    d2 = y - z_sq / (n * x)
    th1 = z_sq / (n * x)

    det_vi = d1 * d2
    tr_vi = d1 + d2
    # Bob j conditioned on a first-quadrature homodyne measurement at Bob i.
    d1c = d1 - th1**2 / d1
    det_vij = d1c * d2
    tr_vij = d1c + d2
    iab = mp.mpf("0.5") * log2((1 + det_vi + tr_vi) / (1 + det_vij + tr_vij))

    nu = mp.sqrt(y * (y - z_sq / x))
    lam = n * omega * mu + t * (1 + (n - 1 - n * omega) * mu)
    lam_bar = n * omega * mu + t * (n - 1 - (n * omega - 1) * mu)
    tau = n * omega * (1 - t) + t * (n - 1 + mu)
    tau_bar = n * omega * (1 - t) + t * ((n - 1) * mu + 1)
    nu_n = mp.sqrt(lam * lam_bar / (tau * tau_bar))
    chi = 2 * gfun((nu - 1) / 2) - gfun((nu_n - 1) / 2)
    return max(mp.mpf(0), beta * iab - chi), iab, chi, (nu, nu_n)


def fmt(x):
    return mp.nstr(mp.mpf(x), 17, strip_zeros=False)


def freeze(path):
    rng = random.Random(20240917)
    out = {"gaussian": [], "psk": [], "cka": []}

    while len(out["gaussian"]) < 50:
        va = mp.mpf(10) ** mp.mpf(rng.uniform(-0.3, 1.6))
        d_km = mp.mpf(rng.uniform(0.0, 80.0))
        t = mp.mpf(10) ** (-mp.mpf("0.018") * d_km)
        xi = mp.mpf(rng.uniform(0.0, 0.04))
        pdet = mp.mpf(rng.uniform(0.3, 1.0))
        vel = mp.mpf(rng.uniform(0.0, 0.08))
        beta = mp.mpf(rng.uniform(0.8, 1.0))
        det = rng.choice(["hom", "het"])
        k, iab, chi = gaussian_skr(va, t, xi, pdet, vel, beta, det)
        if k < mp.mpf("1e-4"):
            continue
        out["gaussian"].append(
            {
                "v_a": fmt(va), "t": fmt(t), "xi": fmt(xi), "p_det": fmt(pdet),
                "v_el": fmt(vel), "beta": fmt(beta), "detection": det,
                "iab": fmt(iab), "chi": fmt(chi), "k": fmt(k),
            }
        )

    while len(out["psk"]) < 50:
        m = rng.choice([2, 3, 4, 4, 4, 8, 16])
        alpha_sq = mp.mpf(rng.uniform(0.05, 1.2))
        d_km = mp.mpf(rng.uniform(0.0, 30.0))
        t = mp.mpf(10) ** (-mp.mpf("0.018") * d_km)
        xi = mp.mpf(rng.uniform(0.0, 0.03))
        pdet = mp.mpf(rng.uniform(0.4, 1.0))
        vel = mp.mpf(rng.uniform(0.0, 0.05))
        beta = mp.mpf(rng.uniform(0.85, 1.0))
        det = rng.choice(["hom", "het"])
        try:
            k, iab, chi = psk_skr(m, alpha_sq, t, xi, pdet, vel, beta, det)
        except ValueError:
            continue
        if k < mp.mpf("1e-4"):
            continue
        out["psk"].append(
            {
                "m": m, "alpha_sq": fmt(alpha_sq), "t": fmt(t), "xi": fmt(xi),
                "p_det": fmt(pdet), "v_el": fmt(vel), "beta": fmt(beta), "detection": det,
                "iab": fmt(iab), "chi": fmt(chi), "k": fmt(k),
            }
        )

    while len(out["cka"]) < 50:
        n = rng.randint(2, 10)
        mu = 1 + mp.mpf(10) ** mp.mpf(rng.uniform(-0.5, 1.5))
        d_m = mp.mpf(rng.uniform(0.0, 400.0))
        t = mp.mpf(10) ** (-mp.mpf("0.018") * d_m / 1000)
        pdet = mp.mpf(rng.uniform(0.5, 1.0))
        vel = mp.mpf(rng.uniform(0.0, 0.03))
        beta = mp.mpf(rng.uniform(0.85, 1.0))
        k, iab, chi, _ = cka_skr(mu, n, t, pdet, vel, beta)
        if k < mp.mpf("1e-4"):
            continue
        out["cka"].append(
            {
                "m_mod": fmt(mu), "n": n, "t": fmt(t), "p_det": fmt(pdet),
                "v_el": fmt(vel), "beta": fmt(beta),
                "iab": fmt(iab), "chi": fmt(chi), "k": fmt(k),
            }
        )

    with open(path, "w") as fh:
        json.dump(out, fh, indent=1)
    print(f"wrote {path}: {sum(len(v) for v in out.values())} cases")


def spot_values():
    """Print the hand-checkable scalar values frozen into unit tests."""
    print("h-like spots:")
    print("  G(0.5) =", fmt(gfun(mp.mpf("0.5"))))
    print("  G(1)   =", fmt(gfun(mp.mpf(1))))
    t10 = mp.mpf(10) ** mp.mpf("-0.18")
    iab = mutual_information(mp.mpf(5), t10, mp.mpf("0.01"), mp.mpf("0.7"), mp.mpf("0.005"), "hom")
    chi, lams = gaussian_holevo(mp.mpf(5), t10, mp.mpf("0.01"), mp.mpf("0.7"), mp.mpf("0.005"), "hom")
    print("  baseline 10km VA=5 hom: iab =", fmt(iab), " chi =", fmt(chi))
    k, iab, chi = gaussian_skr(mp.mpf(5), t10, mp.mpf("0.01"), mp.mpf("0.7"), mp.mpf("0.005"), mp.mpf("0.95"), "hom")
    print("  K =", fmt(k))
    chi, Z, W, lams = psk_holevo(4, mp.mpf("0.5"), mp.mpf(1), mp.mpf(0), mp.mpf(1), mp.mpf(0), "hom")
    print("  psk M=4 a2=0.5 perfect hom: chi =", fmt(chi), " Z =", fmt(Z), " W =", fmt(W))
    k, iab, chi = psk_skr(4, mp.mpf("0.5"), mp.mpf(1), mp.mpf(0), mp.mpf(1), mp.mpf(0), mp.mpf(1), "hom")
    print("  psk K =", fmt(k), "iab =", fmt(iab))
    t100m = mp.mpf(10) ** (-mp.mpf("0.18") * mp.mpf("0.1") / 10)
    k, iab, chi, nus = cka_skr(mp.mpf(20), 5, t100m, mp.mpf("0.7"), mp.mpf("0.005"), mp.mpf("0.95"))
    print("  cka n=5 mu=20 100m: K =", fmt(k), "iab =", fmt(iab), "chi =", fmt(chi))
    k, iab, chi, nus = cka_skr(mp.mpf(20), 5, mp.mpf(1), mp.mpf(1), mp.mpf(0), mp.mpf(1))
    print("  cka lossless: K =", fmt(k), "chi =", fmt(chi), "nu =", fmt(nus[0]), "nu_n =", fmt(nus[1]))


if __name__ == "__main__":
    spot_values()
    if len(sys.argv) > 1:
        freeze(sys.argv[1])
