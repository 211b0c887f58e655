"""Syndrome generation, dataset files, and empirical moments."""

import math

import numpy as np
import pytest

from conftest import (
    bitflip,
    ds_rep3_code,
    ds_rep3_model,
    rep3_bitflip_model,
)
from noiselab.codes import builtin_code
from noiselab.noise import exact_moment, local_channel, noise_model
from noiselab.pauli import enumerate_group, identity, parse_element
from noiselab.simulate import (
    SyndromeDataset,
    dataset_to_csv,
    empirical_moments,
    load_dataset,
    run_rounds,
    save_dataset,
)


class TestRunRounds:
    def test_zero_noise_all_zero(self):
        code = builtin_code("repetition", n=3)
        amb = (3, 0)
        model = noise_model(
            [local_channel([0], {"I": 1.0}, amb)], amb
        )
        ds = run_rounds(code, model, 500, seed=1)
        assert ds.rows == 500
        assert not ds.bits().any()

    def test_half_rate_middle_qubit(self):
        # X on the middle qubit flips both generators; at rate one half both
        # bit columns are fair coins and perfectly correlated
        code = builtin_code("repetition", n=3)
        amb = (3, 0)
        model = noise_model([bitflip(1, 0.5, amb)], amb)
        n = 40_000
        ds = run_rounds(code, model, n, seed=9)
        bits = ds.bits()
        rate0 = bits[:, 0].mean()
        sigma = 0.5 / math.sqrt(n)
        assert abs(rate0 - 0.5) < 5 * sigma
        assert (bits[:, 0] == bits[:, 1]).all()

    def test_deterministic_replay(self):
        code = builtin_code("repetition", n=3)
        model = rep3_bitflip_model()
        a = run_rounds(code, model, 20_000, seed=33)
        b = run_rounds(code, model, 20_000, seed=33)
        assert np.array_equal(a.words, b.words)
        c = run_rounds(code, model, 20_000, seed=34)
        assert not np.array_equal(a.words, c.words)

    def test_thread_count_invariance(self):
        code = builtin_code("repetition", n=3)
        model = rep3_bitflip_model()
        a = run_rounds(code, model, 50_000, seed=5, threads=1)
        b = run_rounds(code, model, 50_000, seed=5, threads=4)
        assert np.array_equal(a.words, b.words)

    def test_paired_rounds_for_data_syndrome(self):
        code = ds_rep3_code()
        model = ds_rep3_model()
        ds = run_rounds(code, model, 1001, seed=2)
        assert ds.rows == 500
        assert ds.meta["pairing"] == "paired"

    def test_paired_measurement_moment_is_squared(self):
        q = 0.12
        code = ds_rep3_code()
        model = ds_rep3_model(q=q, ps=(0.0, 0.0, 0.0))
        n = 400_000
        ds = run_rounds(code, model, n, seed=11)
        # generators 0 and 2 both measure ZZI; their XOR isolates the
        # measurement-error bits of slots 0 and 2
        e02 = code.meas_generators[0] * code.meas_generators[2]
        table = empirical_moments(ds, code, [e02])
        expected = (1 - 2 * q) ** 4  # two bits, each already a two-round XOR
        assert abs(table[e02] - expected) < 5 * table.stderr_of(e02)


class TestEmpiricalMoments:
    def test_identity_exact(self):
        code = builtin_code("repetition", n=3)
        ds = run_rounds(code, rep3_bitflip_model(), 1000, seed=0)
        table = empirical_moments(ds, code, [identity(3)])
        assert table[identity(3)] == 1.0
        assert table.stderr_of(identity(3)) == 0.0

    def test_converges_to_exact(self):
        code = builtin_code("repetition", n=3)
        model = rep3_bitflip_model()
        n = 10**6
        ds = run_rounds(code, model, n, seed=101)
        elems = list(enumerate_group(code.meas))
        table = empirical_moments(ds, code, elems)
        zz = parse_element("ZZI")
        assert table.stderr_of(zz) == pytest.approx(
            math.sqrt((1 - 0.48**2) / n), rel=0.05
        )
        for s in elems:
            if s.is_identity:
                continue
            assert abs(table[s] - exact_moment(model, s)) < 5 * table.stderr_of(s)

    def test_five_sigma_quantile_at_1e5_rounds(self):
        # across the small-code matrix, at least 99% of estimated moments sit
        # within five estimated errors of the exact values
        from conftest import depolarizing
        from noiselab.estimation import estimate_logical_moments

        checks = ok = 0
        cases = [
            (builtin_code("repetition", n=3), rep3_bitflip_model()),
            (
                builtin_code("five-qubit"),
                noise_model(
                    [depolarizing(i, 0.05, (5, 0)) for i in range(5)], (5, 0)
                ),
            ),
        ]
        for seed, (code, model) in enumerate(cases):
            ds = run_rounds(code, model, 10**5, seed=1000 + seed)
            meas = list(enumerate_group(code.meas))
            table = empirical_moments(ds, code, meas)
            for s in meas:
                err = table.stderr_of(s)
                delta = abs(table[s] - exact_moment(model, s))
                checks += 1
                ok += delta <= 5 * err if err else delta <= 1e-12
            result = estimate_logical_moments(
                table, code, model, list(enumerate_group(code.logical))
            )
            for t, v in result.moments.entries.items():
                err = result.moments.stderr_of(t)
                delta = abs(v - exact_moment(model, t))
                checks += 1
                ok += delta <= 5 * err if err else delta <= 1e-9
        assert ok / checks >= 0.99

    def test_product_moment_differs_from_product_of_moments(self):
        # with a correlated middle-qubit flip the product estimate carries the
        # correlation that the individual-moment product misses
        code = builtin_code("repetition", n=3)
        amb = (3, 0)
        model = noise_model([bitflip(1, 0.5, amb)], amb)
        ds = run_rounds(code, model, 100_000, seed=21)
        g0 = code.meas_generators[0]
        g1 = code.meas_generators[1]
        table = empirical_moments(ds, code, [g0, g1, g0 * g1])
        product_of_estimates = table[g0] * table[g1]
        assert table[g0 * g1] == pytest.approx(1.0, abs=1e-12)
        assert abs(table[g0 * g1] - product_of_estimates) > 0.9

    def test_rejects_non_member(self):
        code = builtin_code("repetition", n=3)
        ds = run_rounds(code, rep3_bitflip_model(), 100, seed=0)
        with pytest.raises(ValueError, match="ZII"):
            empirical_moments(ds, code, [parse_element("ZII")])

    def test_row_permutation_invariance(self):
        code = builtin_code("repetition", n=3)
        ds = run_rounds(code, rep3_bitflip_model(), 5000, seed=3)
        elems = list(enumerate_group(code.meas))
        base = empirical_moments(ds, code, elems)
        rng = np.random.default_rng(0)
        perm = rng.permutation(ds.rows)
        shuffled = SyndromeDataset.from_bits(ds.bits()[perm], seed=ds.seed)
        again = empirical_moments(shuffled, code, elems)
        for s in elems:
            assert again[s] == base[s]


class TestDatasetFiles:
    def test_roundtrip(self, tmp_path):
        code = builtin_code("repetition", n=3)
        ds = run_rounds(code, rep3_bitflip_model(), 12345, seed=77)
        path = tmp_path / "rounds.synd"
        save_dataset(path, ds, n_pauli=3)
        back = load_dataset(path)
        assert back.rows == ds.rows
        assert back.n_generators == ds.n_generators
        assert back.seed == 77
        assert np.array_equal(back.words, ds.words)

    def test_file_size_arithmetic(self, tmp_path):
        code = builtin_code("repetition", n=3)
        n = 10_000
        ds = run_rounds(code, rep3_bitflip_model(), n, seed=0)
        path = tmp_path / "rounds.synd"
        save_dataset(path, ds, n_pauli=3)
        m = len(code.meas_generators)
        header = 5 + 4 + 4 + 8 + 8
        expected = header + ((m + 63) // 64) * 8 * n
        assert path.stat().st_size == expected

    def test_empty_dataset(self, tmp_path):
        code = builtin_code("repetition", n=3)
        ds = run_rounds(code, rep3_bitflip_model(), 0, seed=0)
        path = tmp_path / "empty.synd"
        save_dataset(path, ds, n_pauli=3)
        back = load_dataset(path)
        assert back.rows == 0

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "junk.synd"
        path.write_bytes(b"NOPE!" + b"\x00" * 32)
        with pytest.raises(ValueError, match="magic"):
            load_dataset(path)

    def test_csv_export(self, tmp_path):
        code = builtin_code("repetition", n=3)
        ds = run_rounds(code, rep3_bitflip_model(), 50, seed=4)
        path = tmp_path / "rounds.csv"
        dataset_to_csv(path, ds)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "g0,g1"
        assert len(lines) == 51
        bits = ds.bits()
        first = [int(v) for v in lines[1].split(",")]
        assert first == list(bits[0])

    def test_wide_codes_pack_into_multiple_words(self):
        bits = np.zeros((3, 70), dtype=np.uint8)
        bits[1, 0] = bits[1, 69] = 1
        ds = SyndromeDataset.from_bits(bits)
        assert ds.words.shape == (3, 2)
        assert np.array_equal(ds.bits(), bits)
