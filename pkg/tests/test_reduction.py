"""Alphabet reduction: maps, group images, and outcome preservation."""

import pytest

from conftest import (
    bitflip,
    depolarizing,
    ds_rep3_code,
    ds_rep3_model,
    rep3_bitflip_model,
    xx_correlated,
)
from noiselab.codes import builtin_code
from noiselab.noise import exact_moment, local_channel, noise_model
from noiselab.pauli import (
    GroupElement,
    bicharacter,
    enumerate_group,
    in_span,
    parse_element,
)
from noiselab.reduction import reduce_problem


class TestIdentityRewrite:
    def test_full_alphabet_is_identity(self):
        code = builtin_code("five-qubit")
        amb = (5, 0)
        model = noise_model([depolarizing(i, 0.1, amb) for i in range(5)], amb)
        rp = reduce_problem(code, model)
        assert rp.identity
        assert rp.code is code
        assert rp.model is model

    def test_two_distinct_paulis_generate_full(self):
        code = builtin_code("repetition", n=3)
        amb = (3, 0)
        chans = [
            local_channel([i], {"I": 0.8, "X": 0.1, "Z": 0.1}, amb) for i in range(3)
        ]
        rp = reduce_problem(code, noise_model(chans, amb))
        assert rp.identity


class TestBitflipReduction:
    def test_rep3_shapes(self):
        code = builtin_code("repetition", n=3)
        model = rep3_bitflip_model()
        rp = reduce_problem(code, model)
        assert not rp.identity
        assert rp.ambient == (0, 3)
        assert rp.code.meas.rank == 2
        assert rp.code.gauge.rank == 0
        assert rp.logical_image.rank == 3
        assert rp.code.undetectable.rank == 1  # the all-ones pattern

    def test_character_map_preserves_outcomes(self):
        code = builtin_code("repetition", n=3)
        model = rep3_bitflip_model()
        rp = reduce_problem(code, model)
        errors = [
            parse_element(s) for s in ("III", "XII", "IXI", "XXI", "XXX", "IXX")
        ]
        for m in enumerate_group(code.meas):
            for e in errors:
                assert bicharacter(m, e) == bicharacter(
                    rp.character_image(m), rp.embed_error(e)
                )

    def test_structurally_trivial_measurement(self):
        code = builtin_code("four-qubit")
        amb = (4, 0)
        model = noise_model([bitflip(0, 0.1, amb), bitflip(1, 0.05, amb)], amb)
        rp = reduce_problem(code, model)
        # XXXX and XXII act trivially on bit-flip errors at sites 0, 1
        assert rp.character_image(parse_element("XXXX")).is_identity
        assert rp.character_image(parse_element("XXII")).is_identity
        assert not rp.character_image(parse_element("ZZZZ")).is_identity

    def test_gauge_inside_alphabet(self):
        code = builtin_code("four-qubit")
        amb = (4, 0)
        model = noise_model([xx_correlated([0, 1], amb)], amb)
        rp = reduce_problem(code, model)
        # XXII is a stabilizer made of producible errors; it survives as gauge
        assert rp.code.gauge.rank == 1
        assert rp.code.meas.rank == 1

    def test_embed_rejects_outside_alphabet(self):
        code = builtin_code("repetition", n=3)
        model = rep3_bitflip_model()
        rp = reduce_problem(code, model)
        with pytest.raises(ValueError, match="alphabet"):
            rp.embed_error(parse_element("ZII"))

    def test_dual_inclusion_in_reduced_code(self):
        code = builtin_code("four-qubit")
        amb = (4, 0)
        model = noise_model([xx_correlated([0, 1], amb)], amb)
        rp = reduce_problem(code, model)
        for g in rp.code.gauge.rows:
            for m in rp.code.meas.rows:
                assert bicharacter(g, m) == 1

    def test_logical_image_annihilates_reduced_gauge(self):
        code = builtin_code("four-qubit")
        amb = (4, 0)
        model = noise_model([xx_correlated([0, 1], amb)], amb)
        rp = reduce_problem(code, model)
        for l in rp.logical_image.rows:
            assert in_span(rp.code.logical, l)


class TestMixedReduction:
    def test_y_only_alphabet(self):
        code = builtin_code("repetition", n=3)
        amb = (3, 0)
        chans = [local_channel([i], {"I": 0.9, "Y": 0.1}, amb) for i in range(3)]
        rp = reduce_problem(code, noise_model(chans, amb))
        assert rp.ambient == (0, 3)
        # Z anticommutes with Y, so ZZI maps to the parity check (1,1,0)
        img = rp.character_image(parse_element("ZZI"))
        assert img.bits == 0b011

    def test_data_syndrome_reduction(self):
        code = ds_rep3_code()
        model = ds_rep3_model()
        rp = reduce_problem(code, model)
        assert rp.ambient == (0, 7)
        assert rp.code.meas.rank == 4
        # measurement-error bits stay literal
        e_bit = GroupElement(3, 4, 0, 0, 1)
        assert rp.embed_error(e_bit).bits == 0b0001000

    def test_moment_preserved_under_reduction(self):
        code = builtin_code("repetition", n=3)
        model = rep3_bitflip_model()
        rp = reduce_problem(code, model)
        for a in enumerate_group(code.meas):
            assert exact_moment(model, a) == pytest.approx(
                exact_moment(rp.model, rp.character_image(a)), abs=1e-12
            )

    def test_region_map_drops_trivial_sites(self):
        code = builtin_code("five-qubit")
        amb = (5, 0)
        model = noise_model([bitflip(0, 0.1, amb), bitflip(2, 0.1, amb)], amb)
        rp = reduce_problem(code, model)
        assert rp.map_region({0, 1, 2}) == rp.map_region({0, 2})
        assert len(rp.map_region({0, 1, 2})) == 2
