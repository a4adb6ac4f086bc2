import math

import pytest
from hypothesis import given, settings, strategies as st

from photoderiv import (
    NotFinite,
    OutOfRange,
    ReducedScheme,
    SplitterSpec,
    invert_scheme,
    make_squeeze,
    reduce_scheme,
)

# frozen with mpmath at 256 bits: s = 15 ln(10)/20, y = tanh(s)/2, sinh(s)^2
DB15_S = 1.726938819745534263
DB15_Y = 0.4693465699682844912
DB15_MEAN_N = 7.413599844571369278
# s = atanh(0.5), cosh = 1/sqrt(0.75)
Y025_S = 0.5493061443340548457
Y025_COSH = 1.1547005383792515290


class TestMakeSqueeze:
    def test_vacuum_limit(self):
        sq = make_squeeze("amplitude", 0.0)
        assert sq.s == 0 and sq.y == 0 and sq.s_db == 0 and sq.mean_n == 0

    def test_fifteen_db(self):
        sq = make_squeeze("decibels", 15.0)
        assert sq.s == pytest.approx(DB15_S, rel=1e-14)
        assert sq.y == pytest.approx(DB15_Y, rel=1e-14)
        assert sq.mean_n == pytest.approx(DB15_MEAN_N, rel=1e-13)

    def test_series_parameter_quarter(self):
        sq = make_squeeze("series_parameter", 0.25)
        assert sq.s == pytest.approx(Y025_S, rel=1e-14)
        assert sq.cosh_s == pytest.approx(Y025_COSH, rel=1e-14)

    def test_mean_photons(self):
        sq = make_squeeze("mean_photons", DB15_MEAN_N)
        assert sq.s == pytest.approx(DB15_S, rel=1e-12)

    @pytest.mark.parametrize("kind,value", [
        ("amplitude", -0.1),
        ("series_parameter", 0.5),
        ("series_parameter", -1e-3),
        ("decibels", -2.0),
        ("mean_photons", -0.5),
    ])
    def test_out_of_range(self, kind, value):
        with pytest.raises(OutOfRange):
            make_squeeze(kind, value)

    def test_not_finite(self):
        with pytest.raises(NotFinite):
            make_squeeze("amplitude", float("nan"))
        with pytest.raises(NotFinite):
            make_squeeze("series_parameter", float("inf"))

    def test_bad_kind(self):
        with pytest.raises(OutOfRange):
            make_squeeze("bogus", 1.0)

    @given(s=st.floats(min_value=1e-6, max_value=6.0))
    @settings(max_examples=200)
    def test_kind_consistency(self, s):
        base = make_squeeze("amplitude", s)
        for kind, value in [("series_parameter", base.y), ("decibels", base.s_db),
                            ("mean_photons", base.mean_n)]:
            rebuilt = make_squeeze(kind, value)
            assert rebuilt.s == pytest.approx(base.s, rel=1e-12)
            assert rebuilt.y == pytest.approx(base.y, rel=1e-12)
            assert rebuilt.mean_n == pytest.approx(base.mean_n, rel=1e-11, abs=1e-300)

    @given(s1=st.floats(min_value=0, max_value=6.0), ds=st.floats(min_value=1e-9, max_value=1.0))
    @settings(max_examples=200)
    def test_monotone_in_s(self, s1, ds):
        a = make_squeeze("amplitude", s1)
        b = make_squeeze("amplitude", s1 + ds)
        assert b.y > a.y
        assert b.mean_n > a.mean_n

    def test_cosh_identity(self):
        sq = make_squeeze("series_parameter", 0.31)
        assert sq.cosh_s == pytest.approx(1 / math.sqrt(1 - 4 * sq.y**2), rel=1e-14)


class TestSplitter:
    def test_unitarity_and_bsp(self):
        bs = SplitterSpec.from_transmittance(0.8)
        assert bs.t**2 + bs.r**2 == pytest.approx(1.0, abs=1e-15)
        assert bs.bsp == pytest.approx(0.25, rel=1e-14)

    def test_transparent(self):
        bs = SplitterSpec.from_transmittance(1.0)
        assert bs.r == 0 and bs.bsp == 0

    def test_from_bsp_roundtrip(self):
        bs = SplitterSpec.from_bsp(4.0)
        assert bs.transmittance == pytest.approx(0.2, rel=1e-14)
        assert bs.bsp == pytest.approx(4.0, rel=1e-13)

    @pytest.mark.parametrize("t2", [0.0, -0.2, 1.2])
    def test_bad_transmittance(self, t2):
        with pytest.raises(OutOfRange):
            SplitterSpec.from_transmittance(t2)

    def test_non_unitary_pair_rejected(self):
        with pytest.raises(OutOfRange):
            SplitterSpec(t=0.9, r=0.9)


class TestReducedScheme:
    def test_transparent_splitter(self):
        rs = reduce_scheme(make_squeeze("series_parameter", 0.25),
                           SplitterSpec.from_transmittance(1.0), 0)
        assert rs.y1 == pytest.approx(0.25, rel=1e-15)
        assert rs.b == 0 and rs.k == 0

    def test_reduction_arithmetic(self):
        rs = reduce_scheme(make_squeeze("series_parameter", 0.25),
                           SplitterSpec.from_transmittance(0.8), 0)
        assert rs.y1 == pytest.approx(0.2, rel=1e-14)
        assert rs.b == pytest.approx(0.25, rel=1e-14)

    def test_reduction_k2(self):
        rs = reduce_scheme(make_squeeze("series_parameter", 0.4),
                           SplitterSpec.from_transmittance(0.5), 2)
        assert rs.y1 == pytest.approx(0.2, rel=1e-14)
        assert rs.b == pytest.approx(1.0, rel=1e-14)
        assert rs.k == 2

    def test_invert(self):
        sq, bs = invert_scheme(ReducedScheme(0.2, 0.25, 0))
        assert sq.y == pytest.approx(0.25, rel=1e-14)
        assert bs.transmittance == pytest.approx(0.8, rel=1e-14)

    def test_invert_transparent(self):
        sq, bs = invert_scheme(ReducedScheme(0.2, 0.0, 0))
        assert sq.y == pytest.approx(0.2, rel=1e-15)
        assert bs.t == 1.0

    def test_domain_boundary(self):
        with pytest.raises(OutOfRange):
            ReducedScheme(0.4, 0.5, 0)  # y would be 0.6 >= 0.5

    def test_vacuum_point_allowed(self):
        rs = ReducedScheme(0.0, 2.0, 1)
        assert rs.y == 0

    def test_negative_k(self):
        with pytest.raises(OutOfRange):
            ReducedScheme(0.1, 0.5, -1)

    @given(y=st.floats(min_value=0, max_value=0.499), t2=st.floats(min_value=1e-3, max_value=1.0),
           k=st.integers(min_value=0, max_value=5))
    @settings(max_examples=200)
    def test_round_trip(self, y, t2, k):
        sq = make_squeeze("series_parameter", y)
        bs = SplitterSpec.from_transmittance(t2)
        rs = reduce_scheme(sq, bs, k)
        sq2, bs2 = invert_scheme(rs)
        assert sq2.y == pytest.approx(sq.y, rel=1e-12, abs=1e-300)
        assert bs2.transmittance == pytest.approx(bs.transmittance, rel=1e-12)
        rs2 = reduce_scheme(sq2, bs2, k)
        assert rs2.y1 == pytest.approx(rs.y1, rel=1e-12, abs=1e-300)
        assert rs2.b == pytest.approx(rs.b, rel=1e-12, abs=1e-300)
