"""Shared builders for the test matrix."""

from noiselab.codes import (
    DataSyndromeSpec,
    build_data_syndrome_code,
    builtin_code,
    toric_edge_index,
)
from noiselab.noise import local_channel, noise_model
from noiselab.pauli import parse_element


def depolarizing(site, p, ambient):
    return local_channel(
        [site], {"I": 1 - p, "X": p / 3, "Y": p / 3, "Z": p / 3}, ambient
    )


def bitflip(site, p, ambient):
    return local_channel([site], {"I": 1 - p, "X": p}, ambient)


def bit_channel(bit_site, q, ambient):
    return local_channel([bit_site], {"0": 1 - q, "1": q}, ambient)


def xx_correlated(sites, ambient):
    return local_channel(
        sites, {"II": 0.9, "XX": 0.05, "XI": 0.03, "IX": 0.02}, ambient
    )


def pair_correlated(sites, ambient):
    return local_channel(
        sites,
        {"II": 0.88, "XX": 0.04, "ZZ": 0.03, "YY": 0.02, "XI": 0.02, "IZ": 0.01},
        ambient,
    )


def plaquette_sites(x, y, d=3):
    return sorted(
        {
            toric_edge_index(d, "h", x, y),
            toric_edge_index(d, "h", x, (y + 1) % d),
            toric_edge_index(d, "v", x, y),
            toric_edge_index(d, "v", (x + 1) % d, y),
        }
    )


def z_plaquette_channel(x, y, ambient):
    return local_channel(
        plaquette_sites(x, y),
        {"IIII": 0.85, "ZZZZ": 0.05, "ZZII": 0.04, "IIZZ": 0.03, "ZIIZ": 0.03},
        ambient,
    )


def rep3_bitflip_model(ps=(0.1, 0.2, 0.05)):
    amb = (3, 0)
    return noise_model([bitflip(i, p, amb) for i, p in enumerate(ps)], amb)


def ds_rep3_code():
    spec = DataSyndromeSpec(
        base_generators=(parse_element("ZZI"), parse_element("IZZ")),
        selection=((0,), (1,), (0,), (1,)),
    )
    return build_data_syndrome_code(spec, name="ds-rep3")


def ds_rep3_model(q=0.1, ps=(0.1, 0.2, 0.05)):
    code = ds_rep3_code()
    amb = code.ambient
    chans = [bitflip(i, p, amb) for i, p in enumerate(ps)]
    chans += [bit_channel(3 + j, q, amb) for j in range(4)]
    return noise_model(chans, amb)


def suite_models(code):
    """The verified correctable noise pairings used by the acceptance suite:
    singleton channels at two rates plus one multi-qubit-support model."""
    amb = code.ambient
    name = code.name
    if name.startswith("repetition"):
        n = code.n_pauli
        singles = [
            noise_model([bitflip(i, p, amb) for i in range(n)], amb)
            for p in (0.01, 0.1)
        ]
        if n >= 5:
            multi = noise_model(
                [xx_correlated([0, 1], amb), xx_correlated([2, 3], amb), bitflip(4, 0.1, amb)],
                amb,
            )
        else:
            multi = noise_model([xx_correlated([0, 1], amb)], amb)
        return singles + [multi]
    if name == "four-qubit":
        # any two-qubit region of this code supports a weight-2 logical, so
        # full-alphabet singleton noise on several qubits is not correctable;
        # bit-flip noise on the gauge pair {0, 1} is.
        singles = [
            noise_model([bitflip(0, p, amb), bitflip(1, p / 2, amb)], amb)
            for p in (0.01, 0.1)
        ]
        multi = noise_model([xx_correlated([0, 1], amb)], amb)
        return singles + [multi]
    if name == "toric-3":
        singles = [
            noise_model(
                [depolarizing(i, p, amb) for i in range(code.n_pauli)], amb
            )
            for p in (0.01, 0.1)
        ]
        multi = noise_model(
            [z_plaquette_channel(x, y, amb) for (x, y) in [(0, 0), (1, 1), (2, 2), (1, 0)]],
            amb,
        )
        return singles + [multi]
    singles = [
        noise_model([depolarizing(i, p, amb) for i in range(code.n_pauli)], amb)
        for p in (0.01, 0.1)
    ]
    if name == "five-qubit":
        multi = noise_model([pair_correlated([0, 1], amb)], amb)
    elif name == "steane":
        multi = noise_model(
            [pair_correlated([0, 1], amb), depolarizing(6, 0.1, amb)], amb
        )
    else:  # shor, bacon-shor-3
        multi = noise_model(
            [pair_correlated([0, 1], amb), pair_correlated([3, 4], amb)], amb
        )
    return singles + [multi]


SUITE_CODE_SPECS = [
    ("repetition", {"n": 3}),
    ("repetition", {"n": 5}),
    ("four-qubit", {}),
    ("five-qubit", {}),
    ("steane", {}),
    ("shor", {}),
    ("bacon-shor", {"d": 3}),
    ("toric", {"d": 3}),
]


def suite_codes():
    return [builtin_code(name, **params) for name, params in SUITE_CODE_SPECS]
