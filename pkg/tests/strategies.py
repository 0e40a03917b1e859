"""Hypothesis strategies shared by the property tests."""
from fractions import Fraction

from hypothesis import strategies as st

from symwave.laurent import GaussianRational, LaurentPoly

rationals = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 6))
gaussians = st.builds(GaussianRational, rationals, rationals)


@st.composite
def polys(draw, dim=2, complex_=True, sigma=None, max_terms=5, radius=2):
    keys = st.tuples(*[st.integers(-radius, radius)] * dim)
    vals = gaussians if complex_ else rationals
    cf = draw(st.dictionaries(keys, vals, min_size=1, max_size=max_terms))
    return LaurentPoly(cf, sigma=sigma, dim=dim)


# expanding matrices with small determinant used across the suite
DILATIONS_2D = [((1, -2), (2, -1)), ((1, 1), (1, -1)), ((1, -1), (1, 1)), ((2, 0), (0, 2)),
                ((2, 1), (0, 2)), ((0, 2), (1, 0)), ((1, 2), (1, -1))]
DILATIONS_1D = [((2,),), ((3,),), ((4,),), ((-2,),), ((-3,),)]
