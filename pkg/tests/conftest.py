import pytest

from adual import affine, zoo


@pytest.fixture(scope="session")
def z2():
    return zoo.cyclic_group(2)


@pytest.fixture(scope="session")
def z3():
    return zoo.cyclic_group(3)


@pytest.fixture(scope="session")
def z4():
    return zoo.cyclic_group(4)


@pytest.fixture(scope="session")
def z6():
    return zoo.cyclic_group(6)


@pytest.fixture(scope="session")
def v4():
    return zoo.klein_group()


@pytest.fixture(scope="session")
def s3():
    return zoo.symmetric_group_3()


@pytest.fixture(scope="session")
def semilattice():
    return zoo.two_element_semilattice()


@pytest.fixture(scope="session")
def terms(z2, z3, z4, z6, v4):
    return {A.name: affine.find_affine_term(A) for A in (z2, z3, z4, z6, v4)}
