from hypothesis import settings
from hypothesis import strategies as st

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def raw_letters(ngens: int, max_size: int = 12):
    return st.lists(st.tuples(st.integers(0, ngens - 1), st.integers(-3, 3)), max_size=max_size)
